#pragma once

#include "ionet/netcore.hpp"

#include <string>
#include <vector>

namespace ionet::metrics {

// ---- centrality ------------------------------------------------------------

struct PagerankOptions {
    double damping = 0.85;
    double tol = 1e-12; // L1 change between iterates
    int max_iter = 10000;
};

struct PagerankResult {
    std::vector<double> pr; // sums to 1
    int iterations = 0;
    double residual = 0.0;
};

// Weighted directed PageRank of a nonnegative adjacency with adj(s, t) the
// out-link weight of s toward t. Out-weights are normalized per node; nodes
// without out-links spread their mass uniformly. Iteration starts from the
// uniform vector and stops when the L1 change drops below tol.
PagerankResult pagerank(const net::SquareMat& adj, const PagerankOptions& opt = {});

// Direction-aware wrapper: rank flows along partner rows, so up ranks
// heavily-relied-on suppliers and dw ranks heavily-supplied customers.
PagerankResult pagerank_shares(const net::ShareMatrix& sm, const PagerankOptions& opt = {});

// Partner-row degree (count of weights above thr, self excluded) and strength
// (sum of weights, self excluded).
struct DegreeStrength {
    std::vector<double> degree;
    std::vector<double> strength;
};
DegreeStrength degree_strength(const net::ShareMatrix& sm, double thr = 0.0);

// ---- similarity ------------------------------------------------------------

// Pairwise cosine similarity of partner rows (up: supplier profiles, dw:
// customer profiles). Zero rows yield 0 against everything, including
// themselves, so sparse industries never produce spurious similarity.
net::SquareMat cosine_similarity(const net::ShareMatrix& sm);

// ---- whole-network statistics ---------------------------------------------

struct StatsOptions {
    double bin_threshold = 0.0; // link kept when weight > threshold
    bool percent_weights = false; // report avg_weight x100
};

struct NetworkStats {
    int n = 0;
    long links = 0;             // directed, self excluded
    double density = 0.0;       // links / (n (n-1))
    double avg_degree = 0.0;    // links / n
    double avg_weight = 0.0;    // mean over kept links
    double reciprocity = 0.0;   // share of links whose reverse is a link
    double transitivity = 0.0;  // global clustering of the undirected projection
    int diameter = 0;           // hops, largest strongly connected component
    double mean_distance = 0.0; // mean over ordered reachable pairs in that component
    double assortativity_degree = 0.0; // Pearson of endpoint total degrees over links
    double assortativity_size = 0.0;   // Pearson of endpoint sizes over links
};

// Self-loops are ignored throughout. sizes must align with the matrix.
NetworkStats network_stats(const net::SquareMat& w, const std::vector<double>& sizes,
                           const StatsOptions& opt = {});

// ---- rankings and edge exports ---------------------------------------------

struct RankRow {
    std::string code;
    double value = 0.0;
};

struct RankTable {
    std::vector<RankRow> top; // descending by value, ties by code ascending
    double q1 = 0.0, median = 0.0, q3 = 0.0; // quartiles over all values
};

RankTable top_k_ranking(const std::vector<double>& values, const net::Index& index, int k);

struct FilteredEdge {
    int window_set = 0;
    std::string source; // supplier
    std::string target; // receiver
    double mean_weight = 0.0;
};

struct EdgeFilterResult {
    double mean = 0.0;      // over all ordered off-diagonal pairs, all matrices
    double sd = 0.0;        // sample sd over the same population
    double threshold = 0.0; // mean + sd
    std::vector<FilteredEdge> edges;
};

// Keeps the (i, j) pairs whose within-set mean weight strictly exceeds the
// global mean + sd; the cutoff pools every matrix of every set so the same
// bar applies to each subperiod. Self links never pass.
EdgeFilterResult export_filtered_edges(
    const std::vector<std::vector<const net::SquareMat*>>& window_sets, const net::Index& index);

} // namespace ionet::metrics
