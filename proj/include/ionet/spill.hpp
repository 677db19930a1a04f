#pragma once

#include "ionet/netcore.hpp"

#include <vector>

namespace ionet::spill {

// 0/1 link matrix from partner-row shares: row i marks the partners supplying
// (up) or buying (dw) at least a theta share. Diagonal forced to 0; links are
// between distinct industries.
struct LinkMatrix {
    net::Layer layer = net::Layer::market;
    int period = 0;
    net::Direction dir = net::Direction::up;
    double theta = 0.0;
    net::Index index;
    net::SquareMat l;
};

// theta must lie in (0, 1]. The comparison is weight >= theta, so boundary
// shares count as links. Because nonzero partner rows sum to 1, a row can
// carry at most floor(1/theta) links.
LinkMatrix threshold_links(const net::ShareMatrix& sm, double theta);

// Size spillover over linked partners: out[i] = sum over j != i of
// l(i, j) * a[j]. Accumulation runs left to right in index order, one term
// per partner, so results agree bit for bit with a naive loop.
std::vector<double> spillover(const LinkMatrix& lm, const net::NodeSizes& sizes);

// Weighted variant: the partner share itself replaces the 0/1 link.
std::vector<double> spillover_weighted(const net::ShareMatrix& sm, const net::NodeSizes& sizes);

} // namespace ionet::spill
