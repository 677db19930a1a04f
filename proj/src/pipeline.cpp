#include "ionet/pipeline.hpp"

#include "ionet/csvio.hpp"
#include "ionet/econ.hpp"
#include "ionet/errors.hpp"
#include "ionet/ingest.hpp"
#include "ionet/netcore.hpp"
#include "ionet/netmetrics.hpp"
#include "ionet/panel.hpp"
#include "ionet/spill.hpp"
#include "ionet/synthlab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace ionet::pipeline {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::uint64_t fnv1a_str(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

// ---- configuration ---------------------------------------------------------

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("MissingFile", path);
    Config cfg;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw config_error("BadValue",
                                   path + ":" + std::to_string(lineno) + ": bad section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw config_error("BadValue",
                                   path + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("BadValue",
                               path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty())
            throw config_error("BadValue", path + ":" + std::to_string(lineno) + ": empty key");
        cfg.kv[section.empty() ? key : section + "." + key] = val;
    }
    return cfg;
}

void Config::set_override(const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
        throw config_error("BadValue", "override must look like section.key=value: " + assignment);
    kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

bool Config::has(const std::string& key) const { return kv.count(key) != 0; }

std::string Config::str(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw config_error("MissingKey", key);
    return it->second;
}

std::string Config::str_or(const std::string& key, const std::string& def) const {
    auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
}

double Config::num_or(const std::string& key, double def) const {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    const std::string& v = it->second;
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw config_error("BadValue", key + " must be numeric, got '" + v + "'");
    return x;
}

long Config::int_or(const std::string& key, long def) const {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    const std::string& v = it->second;
    char* end = nullptr;
    long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw config_error("BadValue", key + " must be an integer, got '" + v + "'");
    return x;
}

bool Config::flag_or(const std::string& key, bool def) const {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    std::string v = lower(it->second);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw config_error("BadValue", key + " must be a boolean, got '" + it->second + "'");
}

std::vector<std::string> Config::list_or(const std::string& key, const std::string& def) const {
    std::string v = str_or(key, def);
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string Config::resolved() const {
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

// ---- stage plumbing --------------------------------------------------------

namespace {

struct Ctx {
    const Config& cfg;
    std::string outdir;

    std::string path(const std::string& rel) const { return outdir + "/" + rel; }
};

// Exclusive-use marker; removed on scope exit even when the stage throws.
class Lock {
public:
    explicit Lock(const std::string& outdir) : path_(outdir + "/.lock") {
        if (fs::exists(path_))
            throw config_error("OutdirLocked",
                               path_ + " exists; remove it if no other run is active");
        std::ofstream f(path_);
        if (!f) throw config_error("UnwritablePath", path_);
        f << "busy\n";
    }
    ~Lock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }

private:
    std::string path_;
};

void write_manifest(const Ctx& c, const std::string& stage, std::vector<std::string> files) {
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    std::ostringstream out;
    out << "stage=" << stage << "\n";
    out << "config=" << csv::hash_hex(fnv1a_str(c.cfg.resolved())) << "\n";
    for (const auto& rel : files) {
        std::string full = c.path(rel);
        out << "file=" << rel << " hash=" << csv::hash_hex(csv::fnv1a_file(full))
            << " size=" << fs::file_size(full) << "\n";
    }
    std::ofstream f(c.path("manifest_" + stage + ".txt"), std::ios::binary);
    if (!f) throw config_error("UnwritablePath", c.path("manifest_" + stage + ".txt"));
    f << out.str();
}

// NaN prints as an empty cell, the same convention the panel reader uses.
std::string cell_data(double x) { return std::isnan(x) ? "" : csv::fmt_data(x); }
std::string cell_report(double x) { return std::isnan(x) ? "" : csv::fmt_report(x); }

void write_edge_table(const std::string& path, const std::vector<ingest::FlowEdge>& edges) {
    csv::Table t;
    t.header = {"source", "target", "value", "period"};
    for (const auto& e : edges)
        t.rows.push_back({e.source, e.target, csv::fmt_data(e.value), csv::fmt_int(e.period)});
    csv::write_file(path, t);
}

std::vector<ingest::FlowEdge> read_edge_table(const std::string& path) {
    ingest::EdgeColumns cols;
    return ingest::parse_flow_edgelist_file(path, cols);
}

std::string shares_rel(net::Layer layer, net::Direction dir, int period) {
    return "shares_" + net::layer_name(layer) + "_" + net::direction_name(dir) + "_" +
           std::to_string(period) + ".csv";
}

void write_shares(const std::string& path, const net::ShareMatrix& sm) {
    csv::Table t;
    t.header = {"receiver", "supplier", "share"};
    for (int i = 0; i < sm.w.n; ++i)
        for (int j = 0; j < sm.w.n; ++j)
            if (sm.w(i, j) != 0.0)
                t.rows.push_back(
                    {sm.index.codes[i], sm.index.codes[j], csv::fmt_data(sm.w(i, j))});
    csv::write_file(path, t);
}

net::ShareMatrix read_shares(const std::string& path, const net::Index& index, net::Layer layer,
                             net::Direction dir, int period) {
    csv::Table t = csv::read_file(path);
    std::size_t rc = t.col("receiver"), sc = t.col("supplier"), wc = t.col("share");
    net::ShareMatrix sm;
    sm.layer = layer;
    sm.period = period;
    sm.dir = dir;
    sm.index = index;
    sm.w = net::SquareMat(index.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        int i = index.at(t.rows[r][rc]);
        int j = index.at(t.rows[r][sc]);
        if (i < 0 || j < 0)
            throw data_error("UnknownCode", path + ": row " + std::to_string(r + 1));
        sm.w(i, j) = csv::to_num(t.rows[r][wc], r + 1);
    }
    return sm;
}

struct SizeStore {
    // layer name -> (code, period) -> size
    std::map<std::string, ingest::SeriesMap> by_layer;
    std::vector<int> periods; // sorted union
};

SizeStore read_sizes(const std::string& path) {
    csv::Table t = csv::read_file(path);
    std::size_t lc = t.col("layer"), cc = t.col("code"), pc = t.col("period"), sc = t.col("size");
    SizeStore s;
    std::set<int> per;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        int period = static_cast<int>(csv::to_int(t.rows[r][pc], r + 1));
        s.by_layer[t.rows[r][lc]][{t.rows[r][cc], period}] = csv::to_num(t.rows[r][sc], r + 1);
        per.insert(period);
    }
    s.periods.assign(per.begin(), per.end());
    return s;
}

std::vector<double> sizes_vec(const SizeStore& s, const std::string& layer,
                              const net::Index& index, int period) {
    auto it = s.by_layer.find(layer);
    if (it == s.by_layer.end()) throw data_error("UnknownCode", "no sizes for layer " + layer);
    std::vector<double> v(index.codes.size(), 0.0);
    for (std::size_t i = 0; i < index.codes.size(); ++i) {
        auto jt = it->second.find({index.codes[i], period});
        if (jt != it->second.end()) v[i] = jt->second;
    }
    return v;
}

net::Index read_index(const std::string& path) {
    csv::Table t = csv::read_file(path);
    std::size_t cc = t.col("code");
    std::vector<std::string> codes;
    for (const auto& row : t.rows) codes.push_back(row[cc]);
    return net::Index::from_codes(std::move(codes));
}

net::DwDenominator dw_denominator(const Config& cfg) {
    std::string v = cfg.str_or("network.dw_denominator", "supplier_output");
    if (v == "supplier_output") return net::DwDenominator::supplier_output;
    if (v == "receiver_output") return net::DwDenominator::receiver_output;
    throw config_error("BadValue", "network.dw_denominator must be supplier_output or "
                                   "receiver_output, got '" + v + "'");
}

std::vector<net::Direction> parse_dirs(const std::vector<std::string>& names) {
    std::vector<net::Direction> out;
    for (const auto& n : names) {
        if (n == "up")
            out.push_back(net::Direction::up);
        else if (n == "dw")
            out.push_back(net::Direction::dw);
        else
            throw config_error("BadValue", "direction must be up or dw, got '" + n + "'");
    }
    if (out.empty()) throw config_error("BadValue", "no directions configured");
    return out;
}

constexpr net::Layer kLayers[2] = {net::Layer::market, net::Layer::innovation};

// ---- stages ----------------------------------------------------------------

std::vector<std::string> stage_simulate(const Ctx& c) {
    synth::DuplexSpec ds;
    ds.n_nodes = static_cast<int>(c.cfg.int_or("simulate.nodes", 100));
    ds.periods.clear();
    if (c.cfg.has("simulate.periods")) {
        for (const auto& p : c.cfg.list_or("simulate.periods", ""))
            ds.periods.push_back(static_cast<int>(csv::to_int(p, 1)));
    } else {
        long np = c.cfg.int_or("simulate.n_periods", 8);
        for (int p = 1; p <= np; ++p) ds.periods.push_back(p);
    }
    ds.p_market = c.cfg.num_or("simulate.p_market", 0.15);
    ds.p_innov = c.cfg.num_or("simulate.p_innov", 0.10);
    ds.w_mean_market = c.cfg.num_or("simulate.w_market", 100.0);
    ds.w_mean_innov = c.cfg.num_or("simulate.w_innov", 10.0);
    ds.seed = static_cast<std::uint64_t>(c.cfg.int_or("simulate.seed", 42));
    synth::DuplexDraw draw = synth::gen_random_duplex(ds);
    write_edge_table(c.path("market.csv"), draw.market);
    write_edge_table(c.path("innovation.csv"), draw.innovation);
    return {"market.csv", "innovation.csv"};
}

std::vector<std::string> stage_ingest(const Ctx& c) {
    ingest::EdgeColumns cols;
    cols.source = c.cfg.str_or("ingest.source_col", "source");
    cols.target = c.cfg.str_or("ingest.target_col", "target");
    cols.value = c.cfg.str_or("ingest.value_col", "value");
    cols.period = c.cfg.str_or("ingest.period_col", "period");
    std::string delim = c.cfg.str_or("ingest.delim", ",");
    if (delim.size() != 1) throw config_error("BadValue", "ingest.delim must be one character");
    cols.delim = delim[0];
    // Producer-row sources list the buyer in the source column; swapping the
    // column names restores the supplier-to-receiver orientation.
    if (c.cfg.flag_or("ingest.swap_orientation", false)) std::swap(cols.source, cols.target);

    std::set<std::string> codes;
    std::vector<std::string> written;
    for (net::Layer layer : kLayers) {
        std::string name = net::layer_name(layer);
        std::string file = c.cfg.str_or("ingest." + name + "_file", c.path(name + ".csv"));
        auto edges = ingest::parse_flow_edgelist_file(file, cols);
        // Canonical form: duplicates accumulated, rows ordered.
        std::map<std::tuple<int, std::string, std::string>, double> acc;
        for (const auto& e : edges) {
            acc[{e.period, e.source, e.target}] += e.value;
            codes.insert(e.source);
            codes.insert(e.target);
        }
        std::vector<ingest::FlowEdge> canon;
        for (const auto& [key, value] : acc)
            canon.push_back({std::get<1>(key), std::get<2>(key), value, std::get<0>(key)});
        std::string rel = "edges_" + name + ".csv";
        write_edge_table(c.path(rel), canon);
        written.push_back(rel);
    }
    csv::Table idx;
    idx.header = {"code"};
    for (const auto& code : codes) idx.rows.push_back({code});
    csv::write_file(c.path("index.csv"), idx);
    written.push_back("index.csv");
    return written;
}

std::vector<std::string> stage_build(const Ctx& c) {
    net::Index index = read_index(c.path("index.csv"));
    net::DwDenominator den = dw_denominator(c.cfg);

    std::map<std::string, std::vector<ingest::FlowEdge>> edges;
    std::set<int> periods;
    for (net::Layer layer : kLayers) {
        std::string name = net::layer_name(layer);
        edges[name] = read_edge_table(c.path("edges_" + name + ".csv"));
        for (const auto& e : edges[name]) periods.insert(e.period);
    }

    std::vector<std::string> written;
    csv::Table sizes;
    sizes.header = {"layer", "code", "period", "size"};
    for (net::Layer layer : kLayers) {
        std::string name = net::layer_name(layer);
        for (int period : periods) {
            net::FlowMatrix fm = net::build_flow_matrix(edges[name], index, period, layer);
            net::ShareMatrix up = net::input_shares(fm);
            net::ShareMatrix dw = net::output_shares(fm, den);
            std::string rel_up = shares_rel(layer, net::Direction::up, period);
            std::string rel_dw = shares_rel(layer, net::Direction::dw, period);
            write_shares(c.path(rel_up), up);
            write_shares(c.path(rel_dw), dw);
            written.push_back(rel_up);
            written.push_back(rel_dw);
            net::NodeSizes ns = net::market_sizes(fm);
            for (std::size_t i = 0; i < index.codes.size(); ++i)
                sizes.rows.push_back({name, index.codes[i], csv::fmt_int(period),
                                      csv::fmt_data(ns.a[i])});
        }
    }
    csv::write_file(c.path("sizes.csv"), sizes);
    written.push_back("sizes.csv");
    return written;
}

std::vector<std::string> stage_metrics(const Ctx& c) {
    net::Index index = read_index(c.path("index.csv"));
    SizeStore sizes = read_sizes(c.path("sizes.csv"));
    auto dirs = parse_dirs(c.cfg.list_or("metrics.directions", "up"));
    metrics::PagerankOptions po;
    po.damping = c.cfg.num_or("metrics.pagerank_damping", 0.85);
    double deg_thr = c.cfg.num_or("metrics.degree_threshold", 0.0);
    metrics::StatsOptions so;
    so.bin_threshold = c.cfg.num_or("metrics.bin_threshold", 0.0);
    so.percent_weights = c.cfg.flag_or("metrics.percent_weights", false);

    csv::Table cent;
    cent.header = {"layer", "dir", "period", "code", "pagerank", "degree", "strength"};
    csv::Table nst;
    nst.header = {"layer", "period", "n", "links", "density", "avg_degree",
                  "avg_weight", "reciprocity", "transitivity", "diameter",
                  "mean_distance", "assortativity_degree", "assortativity_size"};

    for (net::Layer layer : kLayers) {
        std::string name = net::layer_name(layer);
        for (int period : sizes.periods) {
            for (net::Direction dir : dirs) {
                net::ShareMatrix sm =
                    read_shares(c.path(shares_rel(layer, dir, period)), index, layer, dir, period);
                metrics::PagerankResult pr = metrics::pagerank_shares(sm, po);
                metrics::DegreeStrength ds = metrics::degree_strength(sm, deg_thr);
                for (std::size_t i = 0; i < index.codes.size(); ++i)
                    cent.rows.push_back({name, net::direction_name(dir), csv::fmt_int(period),
                                         index.codes[i], csv::fmt_data(pr.pr[i]),
                                         csv::fmt_data(ds.degree[i]),
                                         csv::fmt_data(ds.strength[i])});
            }
            net::ShareMatrix up = read_shares(c.path(shares_rel(layer, net::Direction::up, period)),
                                              index, layer, net::Direction::up, period);
            std::vector<double> sv = sizes_vec(sizes, name, index, period);
            metrics::NetworkStats st = metrics::network_stats(up.w, sv, so);
            nst.rows.push_back({name, csv::fmt_int(period), csv::fmt_int(st.n),
                                csv::fmt_int(st.links), cell_data(st.density),
                                cell_data(st.avg_degree), cell_data(st.avg_weight),
                                cell_data(st.reciprocity), cell_data(st.transitivity),
                                csv::fmt_int(st.diameter), cell_data(st.mean_distance),
                                cell_data(st.assortativity_degree),
                                cell_data(st.assortativity_size)});
        }
    }
    csv::write_file(c.path("centrality.csv"), cent);
    csv::write_file(c.path("netstats.csv"), nst);
    return {"centrality.csv", "netstats.csv"};
}

std::vector<std::string> stage_spill(const Ctx& c) {
    net::Index index = read_index(c.path("index.csv"));
    SizeStore sizes = read_sizes(c.path("sizes.csv"));
    auto dirs = parse_dirs(c.cfg.list_or("spill.directions", "up"));
    double theta = c.cfg.num_or("spill.theta", 0.05);
    bool weighted = c.cfg.flag_or("spill.weighted", false);

    // column name -> (code, period) -> value
    std::vector<std::pair<std::string, ingest::SeriesMap>> columns;
    for (net::Layer layer : kLayers) {
        std::string name = net::layer_name(layer);
        for (net::Direction dir : dirs) {
            ingest::SeriesMap plain, wcol;
            for (int period : sizes.periods) {
                net::ShareMatrix sm =
                    read_shares(c.path(shares_rel(layer, dir, period)), index, layer, dir, period);
                net::NodeSizes ns;
                ns.layer = layer;
                ns.period = period;
                ns.index = index;
                ns.a = sizes_vec(sizes, name, index, period);
                spill::LinkMatrix lm = spill::threshold_links(sm, theta);
                std::vector<double> v = spill::spillover(lm, ns);
                for (std::size_t i = 0; i < index.codes.size(); ++i)
                    plain[{index.codes[i], period}] = v[i];
                if (weighted) {
                    std::vector<double> wv = spill::spillover_weighted(sm, ns);
                    for (std::size_t i = 0; i < index.codes.size(); ++i)
                        wcol[{index.codes[i], period}] = wv[i];
                }
            }
            columns.push_back({"spill_" + name + "_" + net::direction_name(dir), plain});
            if (weighted)
                columns.push_back({"wspill_" + name + "_" + net::direction_name(dir), wcol});
        }
    }

    csv::Table t;
    t.header = {"code", "period"};
    for (const auto& [name, series] : columns) t.header.push_back(name);
    for (const auto& code : index.codes)
        for (int period : sizes.periods) {
            std::vector<std::string> row = {code, csv::fmt_int(period)};
            for (const auto& [name, series] : columns) {
                auto it = series.find({code, period});
                row.push_back(it == series.end() ? "" : csv::fmt_data(it->second));
            }
            t.rows.push_back(std::move(row));
        }
    csv::write_file(c.path("spillovers.csv"), t);
    return {"spillovers.csv"};
}

std::vector<std::string> stage_panel(const Ctx& c) {
    SizeStore sizes = read_sizes(c.path("sizes.csv"));
    std::map<std::string, ingest::SeriesMap> columns;
    for (const auto& [layer, series] : sizes.by_layer) columns["size_" + layer] = series;

    csv::Table sp = csv::read_file(c.path("spillovers.csv"));
    std::size_t cc = sp.col("code"), pc = sp.col("period");
    for (std::size_t j = 0; j < sp.header.size(); ++j) {
        if (j == cc || j == pc) continue;
        ingest::SeriesMap series;
        for (std::size_t r = 0; r < sp.rows.size(); ++r) {
            const std::string& cell = sp.rows[r][j];
            if (cell.empty()) continue;
            series[{sp.rows[r][cc], static_cast<int>(csv::to_int(sp.rows[r][pc], r + 1))}] =
                csv::to_num(cell, r + 1);
        }
        columns[sp.header[j]] = std::move(series);
    }

    panel::BalanceSpec bal;
    bal.balanced = c.cfg.flag_or("panel.balanced", false);
    bal.size_columns = c.cfg.list_or("panel.size_columns", "size_market,size_innovation");
    panel::Panel p = panel::assemble(columns, bal);

    for (const auto& col : c.cfg.list_or("panel.log1p", "")) panel::log1p_col(p, col);
    for (const auto& col : c.cfg.list_or("panel.scale_sd", "")) panel::scale_by_sd(p, col);
    auto iqr_cols = c.cfg.list_or("panel.iqr_columns", "");
    if (!iqr_cols.empty())
        panel::remove_outliers_iqr(p, iqr_cols, c.cfg.num_or("panel.iqr_a", 1.5));
    auto lag_cols = c.cfg.list_or("panel.lag_columns", "");
    long k = c.cfg.int_or("panel.lag_k", 1);
    for (const auto& col : lag_cols)
        panel::lag_col(p, col, static_cast<int>(k), col + "_l" + std::to_string(k));

    panel::write_csv(p, c.path("panel.csv"));
    panel::write_provenance(p, c.path("provenance.tsv"));
    return {"panel.csv", "provenance.tsv"};
}

std::vector<std::string> stage_estimate(const Ctx& c) {
    panel::Panel p = panel::read_csv(c.path("panel.csv"));
    auto estimators = c.cfg.list_or("estimate.estimators", "bb");
    std::string dep = c.cfg.str_or("estimate.dep", "size_market");
    auto exog = c.cfg.list_or("estimate.exog", "spill_market_up,spill_innovation_up");

    econ::GmmOptions go;
    go.max_lag = static_cast<int>(c.cfg.int_or("estimate.max_lag", 0));
    go.collapse = c.cfg.flag_or("estimate.collapse", false);
    go.steps = static_cast<int>(c.cfg.int_or("estimate.steps", 0));
    go.time_dummies = c.cfg.flag_or("estimate.time_dummies", true);
    go.robust = c.cfg.flag_or("estimate.robust", true);
    go.extra_iv = c.cfg.list_or("estimate.extra_iv", "");

    csv::Table est;
    est.header = {"estimator", "term", "coef", "se", "z", "p", "sig"};
    csv::Table diag;
    diag.header = {"estimator", "n_obs", "n_groups", "n_instruments", "weighting_rank",
                   "r2", "ar1_z", "ar1_p", "ar2_z", "ar2_p",
                   "sargan_stat", "sargan_df", "sargan_p"};

    for (const auto& kind : estimators) {
        econ::EstimationResult r;
        bool gmm = true;
        if (kind == "fe") {
            gmm = false;
            econ::FeSpec fs;
            fs.dep = dep;
            fs.regressors = c.cfg.list_or("estimate.regressors", "");
            if (fs.regressors.empty()) fs.regressors = exog;
            fs.weight_column = c.cfg.str_or("estimate.weight_column", "");
            econ::FeOptions fo;
            r = econ::fe_weighted(p, fs, fo);
        } else if (kind == "ab" || kind == "bb") {
            econ::GmmSpec gs;
            gs.dep = dep;
            gs.exog = exog;
            r = kind == "ab" ? econ::ab_gmm(p, gs, go) : econ::bb_gmm(p, gs, go);
        } else {
            throw config_error("BadValue", "estimator must be fe, ab or bb, got '" + kind + "'");
        }
        for (const auto& coef : r.coefs)
            est.rows.push_back({r.estimator, coef.name, cell_report(coef.coef),
                                cell_report(coef.se), cell_report(coef.z), cell_report(coef.p),
                                coef.sig});
        diag.rows.push_back({r.estimator, csv::fmt_int(r.n_obs), csv::fmt_int(r.n_groups),
                             gmm ? csv::fmt_int(r.n_instruments) : "",
                             gmm ? csv::fmt_int(r.weighting_rank) : "", cell_report(r.r2),
                             gmm ? cell_report(r.ar1.z) : "", gmm ? cell_report(r.ar1.p) : "",
                             gmm ? cell_report(r.ar2.z) : "", gmm ? cell_report(r.ar2.p) : "",
                             gmm ? cell_report(r.sargan.stat) : "",
                             gmm ? csv::fmt_int(r.sargan.df) : "",
                             gmm ? cell_report(r.sargan.p) : ""});
    }
    csv::write_file(c.path("estimates.csv"), est);
    csv::write_file(c.path("diagnostics.csv"), diag);
    return {"estimates.csv", "diagnostics.csv"};
}

std::vector<std::string> stage_report(const Ctx& c) {
    long top_k = c.cfg.int_or("report.top_k", 10);
    csv::Table nst = csv::read_file(c.path("netstats.csv"));
    csv::Table cent = csv::read_file(c.path("centrality.csv"));
    csv::Table est = csv::read_file(c.path("estimates.csv"));
    csv::Table diag = csv::read_file(c.path("diagnostics.csv"));
    SizeStore sizes = read_sizes(c.path("sizes.csv"));

    std::ostringstream out;
    auto echo = [&out](const csv::Table& t) {
        for (std::size_t j = 0; j < t.header.size(); ++j)
            out << (j ? "\t" : "") << t.header[j];
        out << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                std::string cell = row[j];
                // Re-render numeric cells at report precision.
                char* end = nullptr;
                double x = std::strtod(cell.c_str(), &end);
                if (!cell.empty() && end == cell.c_str() + cell.size()) cell = csv::fmt_report(x);
                out << (j ? "\t" : "") << cell;
            }
            out << "\n";
        }
    };

    out << "== network statistics ==\n";
    echo(nst);

    out << "\n== centrality rankings (last period) ==\n";
    // (layer, dir) -> code -> pagerank for the latest period present.
    std::size_t lc = cent.col("layer"), dc = cent.col("dir"), pc = cent.col("period"),
                cc = cent.col("code"), prc = cent.col("pagerank");
    std::map<std::pair<std::string, std::string>, int> last_period;
    for (std::size_t r = 0; r < cent.rows.size(); ++r) {
        auto key = std::make_pair(cent.rows[r][lc], cent.rows[r][dc]);
        int period = static_cast<int>(csv::to_int(cent.rows[r][pc], r + 1));
        auto it = last_period.find(key);
        if (it == last_period.end() || period > it->second) last_period[key] = period;
    }
    for (const auto& [key, period] : last_period) {
        std::vector<std::string> codes;
        std::map<std::string, double> value;
        for (std::size_t r = 0; r < cent.rows.size(); ++r)
            if (cent.rows[r][lc] == key.first && cent.rows[r][dc] == key.second &&
                csv::to_int(cent.rows[r][pc], r + 1) == period) {
                codes.push_back(cent.rows[r][cc]);
                value[cent.rows[r][cc]] = csv::to_num(cent.rows[r][prc], r + 1);
            }
        net::Index idx = net::Index::from_codes(codes);
        std::vector<double> vals(idx.codes.size());
        for (std::size_t i = 0; i < idx.codes.size(); ++i) vals[i] = value[idx.codes[i]];
        int k = static_cast<int>(std::min<long>(top_k, static_cast<long>(vals.size())));
        metrics::RankTable rt = metrics::top_k_ranking(vals, idx, k);
        out << key.first << " " << key.second << " pagerank, period " << period << "\n";
        for (std::size_t i = 0; i < rt.top.size(); ++i)
            out << "  " << (i + 1) << ". " << rt.top[i].code << " "
                << csv::fmt_report(rt.top[i].value) << "\n";
        out << "  quartiles " << csv::fmt_report(rt.q1) << " " << csv::fmt_report(rt.median)
            << " " << csv::fmt_report(rt.q3) << "\n";
    }

    out << "\n== size rankings (last period, mean-normalized) ==\n";
    for (const auto& [layer, series] : sizes.by_layer) {
        int period = sizes.periods.back();
        std::vector<std::string> codes;
        std::vector<double> vals;
        for (const auto& [key, v] : series)
            if (key.second == period) {
                codes.push_back(key.first);
                vals.push_back(v);
            }
        net::Index idx = net::Index::from_codes(codes); // already sorted by map order
        std::vector<double> norm = net::normalize_sizes(vals, net::SizeNorm::per_period_mean);
        int k = static_cast<int>(std::min<long>(top_k, static_cast<long>(norm.size())));
        metrics::RankTable rt = metrics::top_k_ranking(norm, idx, k);
        out << layer << " size, period " << period << "\n";
        for (std::size_t i = 0; i < rt.top.size(); ++i)
            out << "  " << (i + 1) << ". " << rt.top[i].code << " "
                << csv::fmt_report(rt.top[i].value) << "\n";
    }

    out << "\n== estimates ==\n";
    echo(est);
    out << "\n== diagnostics ==\n";
    echo(diag);

    std::ofstream f(c.path("summary.txt"), std::ios::binary);
    if (!f) throw config_error("UnwritablePath", c.path("summary.txt"));
    f << out.str();
    return {"summary.txt"};
}

using StageFn = std::vector<std::string> (*)(const Ctx&);

const std::vector<std::pair<std::string, StageFn>>& stage_table() {
    static const std::vector<std::pair<std::string, StageFn>> table = {
        {"simulate", stage_simulate}, {"ingest", stage_ingest}, {"build", stage_build},
        {"metrics", stage_metrics},   {"spill", stage_spill},   {"panel", stage_panel},
        {"estimate", stage_estimate}, {"report", stage_report},
    };
    return table;
}

} // namespace

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : stage_table()) out.push_back(name);
        out.push_back("all");
        return out;
    }();
    return names;
}

void run(const std::string& stage, const Config& cfg) {
    Ctx c{cfg, cfg.str_or("io.outdir", "out")};
    fs::create_directories(c.outdir);
    Lock lock(c.outdir);

    if (stage == "all") {
        std::vector<std::string> everything;
        for (const auto& [name, fn] : stage_table()) {
            if (name == "simulate") continue;
            auto files = fn(c);
            write_manifest(c, name, files);
            everything.insert(everything.end(), files.begin(), files.end());
        }
        write_manifest(c, "all", everything);
        return;
    }
    for (const auto& [name, fn] : stage_table())
        if (name == stage) {
            write_manifest(c, name, fn(c));
            return;
        }
    throw config_error("BadValue", "unknown stage '" + stage + "'");
}

} // namespace ionet::pipeline
