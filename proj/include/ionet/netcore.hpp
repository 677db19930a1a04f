#pragma once

#include "ionet/ingest.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace ionet::net {

// Row-major square matrix. Orientation convention for flows and shares:
// entry (i, j) refers to what industry i receives from industry j, so row i
// collects i's suppliers.
struct SquareMat {
    int n = 0;
    std::vector<double> a;

    SquareMat() = default;
    explicit SquareMat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double* row(int i) { return a.data() + static_cast<std::size_t>(i) * n; }
    const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * n; }

    SquareMat transposed() const;
};

// Fixed code ordering shared by every matrix and vector of one network.
struct Index {
    std::vector<std::string> codes;
    std::unordered_map<std::string, int> pos;

    static Index from_codes(std::vector<std::string> codes); // sorted, dedup
    int size() const { return static_cast<int>(codes.size()); }
    int at(const std::string& code) const; // -1 when absent
    bool same_codes(const Index& other) const { return codes == other.codes; }
};

enum class Layer { market, innovation };
enum class Direction { up, dw };

std::string layer_name(Layer l);
std::string direction_name(Direction d);

struct FlowMatrix {
    Layer layer = Layer::market;
    int period = 0;
    Index index;
    SquareMat flow;
};

struct ShareMatrix {
    Layer layer = Layer::market;
    int period = 0;
    Direction dir = Direction::up;
    Index index;
    SquareMat w;
};

struct NodeSizes {
    Layer layer = Layer::market;
    int period = 0;
    Index index;
    std::vector<double> a;
};

// Index from edge endpoint codes across all periods.
Index index_from_edges(const std::vector<ingest::FlowEdge>& edges);

// Accumulates edges of one period into a dense matrix at (target, source);
// duplicate (source, target) pairs add up, zero values are dropped. Every
// endpoint must be in the index. Sources that record flows in the opposite
// orientation are handled by swapping the source/target columns at parse time.
FlowMatrix build_flow_matrix(const std::vector<ingest::FlowEdge>& edges, const Index& index,
                             int period, Layer layer);

// Input shares: row i divided by i's total purchases. Rows with positive sums
// become unit-sum; all-zero rows stay zero.
ShareMatrix input_shares(const FlowMatrix& fm);

// Denominator for output shares. supplier_output divides entry (i, j) by
// supplier j's total sales (column sums; nonzero columns become unit-sum).
// receiver_output divides by receiver i's total sales instead.
enum class DwDenominator { supplier_output, receiver_output };

ShareMatrix output_shares(const FlowMatrix& fm,
                          DwDenominator den = DwDenominator::supplier_output);

// Market size of industry i: total sales, the column sum over receivers.
NodeSizes market_sizes(const FlowMatrix& fm);

// Innovation sizes injected from windowed event stocks at the matching
// anchor; industries without recorded events get 0.
NodeSizes innovation_sizes(const Index& index, int period, const ingest::StockTable& stocks,
                           bool weighted = true);

// Rows as partner-share vectors for either direction: up rows are i's
// supplier shares (copy), dw rows are i's customer shares (transpose). With
// the supplier_output denominator each nonzero partner row sums to 1, which
// is what bounds links per row after thresholding.
SquareMat partner_rows(const ShareMatrix& sm);

enum class SizeNorm { per_period_mean, global_sd };

// per_period_mean divides by the vector's own mean (post: mean 1) and is the
// normalization behind ranking tables. global_sd divides by a dispersion
// computed elsewhere over the whole panel of vectors.
std::vector<double> normalize_sizes(const std::vector<double>& a, SizeNorm mode,
                                    double global_sd = 0.0);

// Sample standard deviation pooled over several vectors.
double pooled_sd(const std::vector<const std::vector<double>*>& vecs);

// Both layers of one snapshot panel on a shared index.
struct DuplexPanelNetwork {
    Index index;
    std::vector<int> periods; // ascending
    std::vector<FlowMatrix> market;     // aligned with periods
    std::vector<FlowMatrix> innovation; // aligned with periods

    void validate() const; // shared index, aligned periods
};

} // namespace ionet::net
