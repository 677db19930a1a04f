#include "ionet/netcore.hpp"

#include "ionet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ionet::net {

SquareMat SquareMat::transposed() const {
    SquareMat t(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Index Index::from_codes(std::vector<std::string> codes) {
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    Index idx;
    idx.codes = std::move(codes);
    idx.pos.reserve(idx.codes.size());
    for (int i = 0; i < static_cast<int>(idx.codes.size()); ++i) idx.pos[idx.codes[i]] = i;
    return idx;
}

int Index::at(const std::string& code) const {
    auto it = pos.find(code);
    return it == pos.end() ? -1 : it->second;
}

std::string layer_name(Layer l) { return l == Layer::market ? "market" : "innovation"; }
std::string direction_name(Direction d) { return d == Direction::up ? "up" : "dw"; }

Index index_from_edges(const std::vector<ingest::FlowEdge>& edges) {
    std::vector<std::string> codes;
    codes.reserve(edges.size() * 2);
    for (const auto& e : edges) {
        codes.push_back(e.source);
        codes.push_back(e.target);
    }
    if (codes.empty()) throw data_error("EmptyInput", "no edges");
    return Index::from_codes(std::move(codes));
}

FlowMatrix build_flow_matrix(const std::vector<ingest::FlowEdge>& edges, const Index& index,
                             int period, Layer layer) {
    FlowMatrix fm;
    fm.layer = layer;
    fm.period = period;
    fm.index = index;
    fm.flow = SquareMat(index.size());
    for (const auto& e : edges) {
        if (e.period != period) continue;
        int s = index.at(e.source);
        int t = index.at(e.target);
        if (s < 0) throw data_error("UnknownCode", "'" + e.source + "'");
        if (t < 0) throw data_error("UnknownCode", "'" + e.target + "'");
        if (e.value < 0.0) throw data_error("NegativeValue", e.source + "->" + e.target);
        if (e.value == 0.0) continue;
        // Receiver-row convention: (receiver, supplier).
        fm.flow(t, s) += e.value;
    }
    return fm;
}

ShareMatrix input_shares(const FlowMatrix& fm) {
    ShareMatrix sm;
    sm.layer = fm.layer;
    sm.period = fm.period;
    sm.dir = Direction::up;
    sm.index = fm.index;
    sm.w = SquareMat(fm.flow.n);
    const int n = fm.flow.n;
    for (int i = 0; i < n; ++i) {
        double tot = 0.0;
        for (int j = 0; j < n; ++j) tot += fm.flow(i, j);
        if (tot > 0.0)
            for (int j = 0; j < n; ++j) sm.w(i, j) = fm.flow(i, j) / tot;
    }
    return sm;
}

ShareMatrix output_shares(const FlowMatrix& fm, DwDenominator den) {
    ShareMatrix sm;
    sm.layer = fm.layer;
    sm.period = fm.period;
    sm.dir = Direction::dw;
    sm.index = fm.index;
    sm.w = SquareMat(fm.flow.n);
    const int n = fm.flow.n;
    // Column sum of k = industry k's total sales.
    std::vector<double> sales(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sales[j] += fm.flow(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d = den == DwDenominator::supplier_output ? sales[j] : sales[i];
            if (d > 0.0) sm.w(i, j) = fm.flow(i, j) / d;
        }
    return sm;
}

NodeSizes market_sizes(const FlowMatrix& fm) {
    NodeSizes ns;
    ns.layer = fm.layer;
    ns.period = fm.period;
    ns.index = fm.index;
    ns.a.assign(fm.flow.n, 0.0);
    for (int i = 0; i < fm.flow.n; ++i)
        for (int j = 0; j < fm.flow.n; ++j) ns.a[j] += fm.flow(i, j);
    return ns;
}

NodeSizes innovation_sizes(const Index& index, int period, const ingest::StockTable& stocks,
                           bool weighted) {
    NodeSizes ns;
    ns.layer = Layer::innovation;
    ns.period = period;
    ns.index = index;
    ns.a.assign(index.size(), 0.0);
    for (int i = 0; i < index.size(); ++i) {
        auto it = stocks.stock.find({index.codes[i], period});
        if (it != stocks.stock.end())
            ns.a[i] = weighted ? it->second.weighted : it->second.unweighted;
    }
    return ns;
}

SquareMat partner_rows(const ShareMatrix& sm) {
    return sm.dir == Direction::up ? sm.w : sm.w.transposed();
}

std::vector<double> normalize_sizes(const std::vector<double>& a, SizeNorm mode,
                                    double global_sd) {
    if (a.empty()) throw data_error("EmptyInput", "no sizes");
    std::vector<double> out(a.size());
    if (mode == SizeNorm::per_period_mean) {
        double mean = 0.0;
        for (double v : a) mean += v;
        mean /= static_cast<double>(a.size());
        if (!(mean > 0.0)) throw numeric_error("ZeroDispersion", "size mean is not positive");
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / mean;
    } else {
        if (!(global_sd > 0.0)) throw numeric_error("ZeroDispersion", "pooled sd is not positive");
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / global_sd;
    }
    return out;
}

double pooled_sd(const std::vector<const std::vector<double>*>& vecs) {
    long n = 0;
    double mean = 0.0;
    for (const auto* v : vecs)
        for (double x : *v) {
            ++n;
            mean += x;
        }
    if (n < 2) throw numeric_error("ZeroDispersion", "need at least 2 values");
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto* v : vecs)
        for (double x : *v) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw numeric_error("ZeroDispersion", "pooled sd is 0");
    return sd;
}

void DuplexPanelNetwork::validate() const {
    if (periods.empty()) throw data_error("EmptyInput", "no periods");
    if (!std::is_sorted(periods.begin(), periods.end()))
        throw data_error("UnsortedPeriods", "period grid must ascend");
    if (market.size() != periods.size() || innovation.size() != periods.size())
        throw data_error("IndexMismatch", "layer snapshots not aligned with period grid");
    for (std::size_t k = 0; k < periods.size(); ++k) {
        if (market[k].period != periods[k] || innovation[k].period != periods[k])
            throw data_error("IndexMismatch", "snapshot period out of order");
        if (!market[k].index.same_codes(index) || !innovation[k].index.same_codes(index))
            throw data_error("IndexMismatch", "layers must share the node index");
    }
}

} // namespace ionet::net
