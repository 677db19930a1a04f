#include "ionet/netmetrics.hpp"

#include "ionet/errors.hpp"
#include "ionet/kernels.hpp"
#include "ionet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace ionet::metrics {

PagerankResult pagerank(const net::SquareMat& adj, const PagerankOptions& opt) {
    const int n = adj.n;
    if (n == 0) throw data_error("EmptyInput", "empty adjacency");
    if (!(opt.damping > 0.0) || !(opt.damping < 1.0))
        throw config_error("BadValue", "damping must lie in (0,1)");
    for (double v : adj.a)
        if (v < 0.0 || !std::isfinite(v))
            throw data_error("NegativeValue", "adjacency weights must be finite and >= 0");

    // Column-stochastic transition: M(t, s) = adj(s, t) / outsum(s); nodes
    // without out-links get uniform columns so mass is conserved.
    net::SquareMat M(n);
    for (int s = 0; s < n; ++s) {
        double out = kernels::sum(adj.row(s), static_cast<std::size_t>(n));
        if (out > 0.0) {
            for (int t = 0; t < n; ++t) M(t, s) = adj(s, t) / out;
        } else {
            double u = 1.0 / static_cast<double>(n);
            for (int t = 0; t < n; ++t) M(t, s) = u;
        }
    }

    std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n);
    const double base = (1.0 - opt.damping) / static_cast<double>(n);
    PagerankResult res;
    for (int it = 1; it <= opt.max_iter; ++it) {
        for (int t = 0; t < n; ++t)
            y[t] = base + opt.damping * kernels::dot(M.row(t), x.data(), static_cast<std::size_t>(n));
        double change = kernels::l1_diff(x.data(), y.data(), static_cast<std::size_t>(n));
        x.swap(y);
        res.iterations = it;
        res.residual = change;
        if (change < opt.tol) {
            double tot = kernels::sum(x.data(), static_cast<std::size_t>(n));
            kernels::scale(x.data(), x.data(), 1.0 / tot, static_cast<std::size_t>(n));
            res.pr = std::move(x);
            return res;
        }
    }
    throw numeric_error("NonConvergence",
                        "no convergence after " + std::to_string(opt.max_iter) +
                            " iterations, residual " + std::to_string(res.residual));
}

PagerankResult pagerank_shares(const net::ShareMatrix& sm, const PagerankOptions& opt) {
    return pagerank(net::partner_rows(sm), opt);
}

DegreeStrength degree_strength(const net::ShareMatrix& sm, double thr) {
    net::SquareMat p = net::partner_rows(sm);
    const int n = p.n;
    DegreeStrength ds;
    ds.degree.assign(n, 0.0);
    ds.strength.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = p.row(i);
        int deg = 0;
        for (int j = 0; j < n; ++j)
            if (j != i && row[j] > thr) ++deg;
        ds.degree[i] = deg;
        ds.strength[i] = kernels::sum(row, static_cast<std::size_t>(n)) - p(i, i);
    }
    return ds;
}

net::SquareMat cosine_similarity(const net::ShareMatrix& sm) {
    net::SquareMat p = net::partner_rows(sm);
    const int n = p.n;
    std::vector<double> norm(n, 0.0);
    for (int i = 0; i < n; ++i)
        norm[i] = std::sqrt(kernels::dot(p.row(i), p.row(i), static_cast<std::size_t>(n)));

    net::SquareMat sim(n);
    for (int i = 0; i < n; ++i) {
        // Unit diagonal on rows with mass; zero rows stay 0 everywhere.
        sim(i, i) = norm[i] > 0.0 ? 1.0 : 0.0;
        for (int j = i + 1; j < n; ++j) {
            double v = 0.0;
            if (norm[i] > 0.0 && norm[j] > 0.0)
                v = kernels::dot(p.row(i), p.row(j), static_cast<std::size_t>(n)) /
                    (norm[i] * norm[j]);
            sim(i, j) = v;
            sim(j, i) = v;
        }
    }
    return sim;
}

namespace {

// Iterative Tarjan; returns component id per node.
std::vector<int> strong_components(const std::vector<uint8_t>& adj, int n, int& n_comp) {
    std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
    std::vector<uint8_t> on_stack(n, 0);
    std::vector<int> stack;
    int counter = 0;
    n_comp = 0;

    struct Frame {
        int v;
        int j;
    };
    for (int root = 0; root < n; ++root) {
        if (idx[root] != -1) continue;
        std::vector<Frame> call{{root, 0}};
        while (!call.empty()) {
            Frame& f = call.back();
            int v = f.v;
            if (f.j == 0) {
                idx[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (f.j < n) {
                int w = f.j++;
                if (!adj[static_cast<std::size_t>(v) * n + w]) continue;
                if (idx[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], idx[w]);
            }
            if (descended) continue;
            if (low[v] == idx[v]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = n_comp;
                    if (w == v) break;
                }
                ++n_comp;
            }
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comp;
}

} // namespace

NetworkStats network_stats(const net::SquareMat& w, const std::vector<double>& sizes,
                           const StatsOptions& opt) {
    const int n = w.n;
    if (n < 2) throw data_error("DegenerateGraph", "need at least 2 nodes");
    if (static_cast<int>(sizes.size()) != n)
        throw data_error("IndexMismatch", "sizes do not align with matrix");

    std::vector<uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    long links = 0;
    double wsum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (w(i, j) > opt.bin_threshold) {
                adj[static_cast<std::size_t>(i) * n + j] = 1;
                ++links;
                wsum += w(i, j);
            }
        }
    if (links == 0) throw data_error("DegenerateGraph", "no links above threshold");

    NetworkStats st;
    st.n = n;
    st.links = links;
    st.density = static_cast<double>(links) / (static_cast<double>(n) * (n - 1));
    st.avg_degree = static_cast<double>(links) / n;
    st.avg_weight = wsum / static_cast<double>(links) * (opt.percent_weights ? 100.0 : 1.0);

    long recip = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adj[static_cast<std::size_t>(i) * n + j] &&
                adj[static_cast<std::size_t>(j) * n + i])
                ++recip;
    st.reciprocity = static_cast<double>(recip) / static_cast<double>(links);

    // Global clustering on the undirected projection: 3 x triangles over
    // centered connected triples.
    std::vector<uint8_t> und(static_cast<std::size_t>(n) * n, 0);
    std::vector<int> udeg(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && (adj[static_cast<std::size_t>(i) * n + j] ||
                           adj[static_cast<std::size_t>(j) * n + i]))
                und[static_cast<std::size_t>(i) * n + j] = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (und[static_cast<std::size_t>(i) * n + j]) ++udeg[i];
    long triangles = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (!und[static_cast<std::size_t>(i) * n + j]) continue;
            for (int k = j + 1; k < n; ++k)
                if (und[static_cast<std::size_t>(i) * n + k] &&
                    und[static_cast<std::size_t>(j) * n + k])
                    ++triangles;
        }
    long triples = 0;
    for (int i = 0; i < n; ++i) triples += static_cast<long>(udeg[i]) * (udeg[i] - 1) / 2;
    st.transitivity = triples > 0 ? 3.0 * static_cast<double>(triangles) / static_cast<double>(triples)
                                  : std::nan("");

    // Hop distances inside the largest strongly connected component (ties
    // resolved toward the component containing the smallest node index).
    int n_comp = 0;
    std::vector<int> comp = strong_components(adj, n, n_comp);
    std::vector<int> comp_size(n_comp, 0);
    for (int v = 0; v < n; ++v) ++comp_size[comp[v]];
    int best = 0;
    for (int c = 1; c < n_comp; ++c)
        if (comp_size[c] > comp_size[best]) best = c;
    for (int v = 0; v < n; ++v)
        if (comp_size[comp[v]] == comp_size[best]) {
            best = comp[v];
            break;
        }
    std::vector<int> members;
    for (int v = 0; v < n; ++v)
        if (comp[v] == best) members.push_back(v);

    if (members.size() < 2) {
        st.diameter = 0;
        st.mean_distance = std::nan("");
    } else {
        long pairs = 0;
        long dist_sum = 0;
        int diam = 0;
        std::vector<int> dist(n);
        std::deque<int> queue;
        for (int src : members) {
            std::fill(dist.begin(), dist.end(), -1);
            dist[src] = 0;
            queue.clear();
            queue.push_back(src);
            while (!queue.empty()) {
                int v = queue.front();
                queue.pop_front();
                for (int t = 0; t < n; ++t)
                    if (adj[static_cast<std::size_t>(v) * n + t] && comp[t] == best &&
                        dist[t] < 0) {
                        dist[t] = dist[v] + 1;
                        queue.push_back(t);
                    }
            }
            for (int t : members)
                if (t != src) {
                    // All members are mutually reachable inside one strong
                    // component.
                    dist_sum += dist[t];
                    diam = std::max(diam, dist[t]);
                    ++pairs;
                }
        }
        st.diameter = diam;
        st.mean_distance = static_cast<double>(dist_sum) / static_cast<double>(pairs);
    }

    // Endpoint correlations over directed links.
    std::vector<int> tdeg(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adj[static_cast<std::size_t>(i) * n + j]) {
                ++tdeg[i];
                ++tdeg[j];
            }
    std::vector<double> ds, dt, ss, stgt;
    ds.reserve(links);
    dt.reserve(links);
    ss.reserve(links);
    stgt.reserve(links);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adj[static_cast<std::size_t>(i) * n + j]) {
                ds.push_back(tdeg[i]);
                dt.push_back(tdeg[j]);
                ss.push_back(sizes[i]);
                stgt.push_back(sizes[j]);
            }
    // A lone link carries no co-variation; the correlation is undefined, not
    // an error.
    st.assortativity_degree = links < 2 ? std::nan("") : stats::pearson(ds, dt);
    st.assortativity_size = links < 2 ? std::nan("") : stats::pearson(ss, stgt);
    return st;
}

RankTable top_k_ranking(const std::vector<double>& values, const net::Index& index, int k) {
    const int n = static_cast<int>(values.size());
    if (n != index.size()) throw data_error("IndexMismatch", "values do not align with index");
    if (k < 1 || k > n)
        throw data_error("KTooLarge", "k=" + std::to_string(k) + " outside [1," +
                                          std::to_string(n) + "]");
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return index.codes[a] < index.codes[b];
    });
    RankTable t;
    t.top.reserve(k);
    for (int r = 0; r < k; ++r) t.top.push_back({index.codes[order[r]], values[order[r]]});
    t.q1 = stats::quantile(values, 0.25);
    t.median = stats::quantile(values, 0.5);
    t.q3 = stats::quantile(values, 0.75);
    return t;
}

EdgeFilterResult export_filtered_edges(
    const std::vector<std::vector<const net::SquareMat*>>& window_sets, const net::Index& index) {
    if (window_sets.empty()) throw data_error("EmptyInput", "no window sets");
    int n = index.size();
    long total_mats = 0;
    for (const auto& set : window_sets) {
        if (set.empty()) throw data_error("EmptyInput", "empty window set");
        for (const auto* m : set) {
            if (m->n != n) throw data_error("IndexMismatch", "matrix does not align with index");
            ++total_mats;
        }
    }

    // Pooled mean and sample sd over every ordered off-diagonal pair of every
    // matrix, zeros included: the bar is global, the selection per set.
    const double cells = static_cast<double>(total_mats) * n * (n - 1);
    if (cells < 2) throw data_error("DegenerateGraph", "not enough pairs");
    double sum = 0.0;
    for (const auto& set : window_sets)
        for (const auto* m : set)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) sum += (*m)(i, j);
    double mean = sum / cells;
    double ss = 0.0;
    for (const auto& set : window_sets)
        for (const auto* m : set)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) {
                        double d = (*m)(i, j) - mean;
                        ss += d * d;
                    }
    double sd = std::sqrt(ss / (cells - 1.0));

    EdgeFilterResult res;
    res.mean = mean;
    res.sd = sd;
    res.threshold = mean + sd;
    for (int s = 0; s < static_cast<int>(window_sets.size()); ++s) {
        const auto& set = window_sets[s];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double m = 0.0;
                for (const auto* mat : set) m += (*mat)(i, j);
                m /= static_cast<double>(set.size());
                if (m > res.threshold)
                    // Entry (i, j) holds what i receives from j: j supplies i.
                    res.edges.push_back({s, index.codes[j], index.codes[i], m});
            }
    }
    return res;
}

} // namespace ionet::metrics
