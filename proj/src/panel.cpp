#include "ionet/panel.hpp"

#include "ionet/csvio.hpp"
#include "ionet/errors.hpp"
#include "ionet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ionet::panel {

namespace {

bool missing(double v) { return std::isnan(v); }

void check_even_spacing(const std::vector<int>& periods) {
    if (periods.size() < 2) return;
    int step = periods[1] - periods[0];
    if (step <= 0) throw data_error("UnevenPeriodGrid", "periods must strictly ascend");
    for (std::size_t k = 2; k < periods.size(); ++k)
        if (periods[k] - periods[k - 1] != step)
            throw data_error("UnevenPeriodGrid", "period spacing changes at " +
                                                     std::to_string(periods[k]));
}

std::vector<double> active_values(const Panel& p, const std::string& column) {
    const auto& c = p.col(column);
    std::vector<double> out;
    out.reserve(c.size());
    for (std::size_t r = 0; r < c.size(); ++r)
        if (p.active[r] && !missing(c[r])) out.push_back(c[r]);
    return out;
}

} // namespace

const std::vector<double>& Panel::col(const std::string& name) const {
    auto it = cols.find(name);
    if (it == cols.end()) throw data_error("MissingColumn", "panel has no column '" + name + "'");
    return it->second;
}

int Panel::period_pos(int period) const {
    for (std::size_t k = 0; k < periods.size(); ++k)
        if (periods[k] == period) return static_cast<int>(k);
    return -1;
}

Panel assemble(const std::map<std::string, ingest::SeriesMap>& columns, const BalanceSpec& bal) {
    if (columns.empty()) throw data_error("EmptyInput", "no columns");
    std::set<std::string> inds;
    std::set<int> pers;
    for (const auto& [name, series] : columns)
        for (const auto& [key, v] : series) {
            (void)v;
            inds.insert(key.first);
            pers.insert(key.second);
        }
    if (inds.empty()) throw data_error("EmptyInput", "no observations");

    Panel p;
    p.industries.assign(inds.begin(), inds.end());
    p.periods.assign(pers.begin(), pers.end());
    check_even_spacing(p.periods);
    p.active.assign(p.n_rows(), 1);
    for (const auto& [name, series] : columns) {
        std::vector<double> col(p.n_rows(), std::nan(""));
        for (const auto& [key, v] : series) {
            auto it = std::lower_bound(p.industries.begin(), p.industries.end(), key.first);
            int i = static_cast<int>(it - p.industries.begin());
            int t = p.period_pos(key.second);
            col[p.idx(i, t)] = v;
        }
        p.cols[name] = std::move(col);
    }

    if (bal.balanced) {
        if (bal.size_columns.empty())
            throw config_error("BadValue", "balanced mode needs size columns");
        std::vector<std::string> kept;
        std::vector<uint8_t> keep(p.industries.size(), 1);
        for (const auto& name : bal.size_columns) {
            const auto& c = p.col(name);
            for (int i = 0; i < p.n_ind(); ++i)
                for (int t = 0; t < p.n_per(); ++t) {
                    double v = c[p.idx(i, t)];
                    if (missing(v) || !(v > 0.0)) keep[i] = 0;
                }
        }
        Panel q;
        for (int i = 0; i < p.n_ind(); ++i)
            if (keep[i]) q.industries.push_back(p.industries[i]);
        if (q.industries.empty()) throw data_error("EmptyCell", "balancing removed every industry");
        q.periods = p.periods;
        q.active.assign(q.n_rows(), 1);
        for (const auto& [name, c] : p.cols) {
            std::vector<double> col(q.n_rows());
            int qi = 0;
            for (int i = 0; i < p.n_ind(); ++i) {
                if (!keep[i]) continue;
                for (int t = 0; t < p.n_per(); ++t) col[q.idx(qi, t)] = c[p.idx(i, t)];
                ++qi;
            }
            q.cols[name] = std::move(col);
        }
        q.history.push_back("balanced:" + std::to_string(p.n_ind()) + "->" +
                            std::to_string(q.n_ind()));
        return q;
    }
    return p;
}

void scale_by_sd(Panel& p, const std::string& column) {
    auto vals = active_values(p, column);
    if (vals.size() < 2) throw numeric_error("TooFewObservations", "column '" + column + "'");
    double sd = stats::sample_sd(vals);
    if (!(sd > 0.0)) throw numeric_error("ZeroDispersion", "column '" + column + "'");
    auto& c = p.cols.at(column);
    for (auto& v : c) v = v / sd; // NaN stays NaN
    p.provenance[column].push_back({"scale_sd", {{"sd", sd}}});
}

void log1p_col(Panel& p, const std::string& column) {
    auto& c = p.cols.at(column);
    for (std::size_t r = 0; r < c.size(); ++r)
        if (p.active[r] && !missing(c[r]) && c[r] <= -1.0)
            throw numeric_error("DomainError",
                                "column '" + column + "' has values <= -1");
    for (auto& v : c) v = std::log1p(v);
    p.provenance[column].push_back({"log1p", {}});
}

void remove_outliers_iqr(Panel& p, const std::vector<std::string>& columns, double a) {
    if (!(a > 0.0)) throw config_error("BadValue", "iqr multiplier must be positive");
    struct Bounds {
        std::string column;
        double q1, q3, lo, hi;
    };
    std::vector<Bounds> bounds;
    for (const auto& name : columns) {
        auto vals = active_values(p, name);
        if (vals.size() < 4)
            throw numeric_error("TooFewObservations", "column '" + name + "' has " +
                                                          std::to_string(vals.size()) +
                                                          " values, need 4");
        double q1 = stats::quantile(vals, 0.25);
        double q3 = stats::quantile(vals, 0.75);
        double iqr = q3 - q1;
        bounds.push_back({name, q1, q3, q1 - a * iqr, q3 + a * iqr});
    }
    // Bounds fixed above; drop the union of violators.
    for (const auto& b : bounds) {
        const auto& c = p.col(b.column);
        for (int i = 0; i < p.n_ind(); ++i)
            for (int t = 0; t < p.n_per(); ++t) {
                std::size_t r = p.idx(i, t);
                if (!p.active[r] || missing(c[r])) continue;
                if (c[r] < b.lo || c[r] > b.hi)
                    p.removals.push_back(
                        {p.industries[i], p.periods[t], b.column, c[r], b.lo, b.hi});
            }
    }
    for (const auto& rem : bounds) {
        p.provenance[rem.column].push_back({"iqr_filter",
                                            {{"a", a},
                                             {"q1", rem.q1},
                                             {"q3", rem.q3},
                                             {"lo", rem.lo},
                                             {"hi", rem.hi}}});
    }
    for (const auto& rm : p.removals) {
        auto it = std::lower_bound(p.industries.begin(), p.industries.end(), rm.industry);
        if (it == p.industries.end() || *it != rm.industry) continue;
        int i = static_cast<int>(it - p.industries.begin());
        int t = p.period_pos(rm.period);
        if (t >= 0) p.active[p.idx(i, t)] = 0;
    }
}

void lag_col(Panel& p, const std::string& column, int k, const std::string& out) {
    if (k < 1) throw config_error("BadValue", "lag must be >= 1");
    const auto& c = p.col(column);
    std::vector<double> lagged(p.n_rows(), std::nan(""));
    for (int i = 0; i < p.n_ind(); ++i)
        for (int t = k; t < p.n_per(); ++t) lagged[p.idx(i, t)] = c[p.idx(i, t - k)];
    p.cols[out] = std::move(lagged);
    p.history.push_back("lag:" + column + "+" + std::to_string(k) + "->" + out);
}

namespace {

Panel keep_industries(const Panel& p, const std::vector<uint8_t>& keep, const std::string& note) {
    Panel q;
    for (int i = 0; i < p.n_ind(); ++i)
        if (keep[i]) q.industries.push_back(p.industries[i]);
    if (q.industries.empty()) throw data_error("EmptyCell", note + " selects no industries");
    q.periods = p.periods;
    q.active.assign(q.n_rows(), 1);
    int qi = 0;
    for (int i = 0; i < p.n_ind(); ++i) {
        if (!keep[i]) continue;
        for (int t = 0; t < p.n_per(); ++t) q.active[q.idx(qi, t)] = p.active[p.idx(i, t)];
        ++qi;
    }
    for (const auto& [name, c] : p.cols) {
        std::vector<double> col(q.n_rows());
        qi = 0;
        for (int i = 0; i < p.n_ind(); ++i) {
            if (!keep[i]) continue;
            for (int t = 0; t < p.n_per(); ++t) col[q.idx(qi, t)] = c[p.idx(i, t)];
            ++qi;
        }
        q.cols[name] = std::move(col);
    }
    q.provenance = p.provenance;
    q.removals = p.removals;
    q.history = p.history;
    q.history.push_back(note);
    return q;
}

} // namespace

Panel subset(const Panel& p, const GroupSpec& g) {
    using Kind = GroupSpec::Kind;
    switch (g.kind) {
        case Kind::median_split_above:
        case Kind::median_split_below: {
            const auto& c = p.col(g.column);
            std::vector<double> avg(p.industries.size(), std::nan(""));
            std::vector<double> pool;
            for (int i = 0; i < p.n_ind(); ++i) {
                double s = 0.0;
                int n = 0;
                for (int t = 0; t < p.n_per(); ++t) {
                    std::size_t r = p.idx(i, t);
                    if (p.active[r] && !missing(c[r])) {
                        s += c[r];
                        ++n;
                    }
                }
                if (n > 0) {
                    avg[i] = s / n;
                    pool.push_back(avg[i]);
                }
            }
            if (pool.size() < 2)
                throw numeric_error("TooFewObservations", "median split on '" + g.column + "'");
            double med = stats::quantile(pool, 0.5);
            std::vector<uint8_t> keep(p.industries.size(), 0);
            bool above = g.kind == Kind::median_split_above;
            for (int i = 0; i < p.n_ind(); ++i) {
                if (missing(avg[i])) continue;
                bool hi = avg[i] > med;
                keep[i] = (hi == above) ? 1 : 0;
            }
            return keep_industries(p, keep,
                                   std::string("median_split_") + (above ? "above" : "below") +
                                       ":" + g.column);
        }
        case Kind::code_prefix: {
            std::vector<uint8_t> keep(p.industries.size(), 0);
            for (int i = 0; i < p.n_ind(); ++i)
                if (p.industries[i].rfind(g.prefix, 0) == 0) keep[i] = 1;
            return keep_industries(p, keep, "code_prefix:" + g.prefix);
        }
        case Kind::class_file: {
            std::vector<uint8_t> keep(p.industries.size(), 0);
            bool label_seen = false;
            for (const auto& [ind, lab] : g.class_map)
                if (lab == g.class_label) label_seen = true;
            if (!label_seen)
                throw data_error("UnknownClass", "label '" + g.class_label + "'");
            for (int i = 0; i < p.n_ind(); ++i) {
                auto it = g.class_map.find(p.industries[i]);
                if (it != g.class_map.end() && it->second == g.class_label) keep[i] = 1;
            }
            return keep_industries(p, keep, "class:" + g.class_label);
        }
        case Kind::period_window: {
            std::vector<int> periods;
            for (int t : p.periods)
                if (t >= g.start_period && t <= g.end_period) periods.push_back(t);
            if (periods.empty())
                throw data_error("EmptyCell", "period window selects no periods");
            Panel q;
            q.industries = p.industries;
            q.periods = periods;
            q.active.assign(q.n_rows(), 1);
            int off = p.period_pos(periods.front());
            for (int i = 0; i < p.n_ind(); ++i)
                for (int t = 0; t < q.n_per(); ++t)
                    q.active[q.idx(i, t)] = p.active[p.idx(i, off + t)];
            for (const auto& [name, c] : p.cols) {
                std::vector<double> col(q.n_rows());
                for (int i = 0; i < p.n_ind(); ++i)
                    for (int t = 0; t < q.n_per(); ++t) col[q.idx(i, t)] = c[p.idx(i, off + t)];
                q.cols[name] = std::move(col);
            }
            q.provenance = p.provenance;
            q.removals = p.removals;
            q.history = p.history;
            q.history.push_back("period_window:" + std::to_string(g.start_period) + "-" +
                                std::to_string(g.end_period));
            return q;
        }
    }
    throw config_error("BadValue", "unknown subset kind");
}

ReplayResult replay(const std::vector<double>& raw, const std::vector<TransformRecord>& recs) {
    ReplayResult out;
    out.values = raw;
    out.keep.assign(raw.size(), 1);
    for (const auto& rec : recs) {
        if (rec.op == "scale_sd") {
            double sd = rec.params.at("sd");
            for (auto& v : out.values) v = v / sd;
        } else if (rec.op == "log1p") {
            for (auto& v : out.values) v = std::log1p(v);
        } else if (rec.op == "iqr_filter") {
            double lo = rec.params.at("lo"), hi = rec.params.at("hi");
            for (std::size_t r = 0; r < out.values.size(); ++r) {
                double v = out.values[r];
                if (!missing(v) && (v < lo || v > hi)) out.keep[r] = 0;
            }
        } else {
            throw data_error("BadValue", "unknown provenance op '" + rec.op + "'");
        }
    }
    return out;
}

void write_csv(const Panel& p, const std::string& path) {
    csv::Table t;
    t.header = {"industry", "period", "active"};
    for (const auto& [name, c] : p.cols) {
        (void)c;
        t.header.push_back(name);
    }
    for (int i = 0; i < p.n_ind(); ++i)
        for (int ti = 0; ti < p.n_per(); ++ti) {
            std::vector<std::string> row{p.industries[i], std::to_string(p.periods[ti]),
                                         p.active[p.idx(i, ti)] ? "1" : "0"};
            for (const auto& [name, c] : p.cols) {
                (void)name;
                double v = c[p.idx(i, ti)];
                row.push_back(missing(v) ? "" : csv::fmt_data(v));
            }
            t.rows.push_back(std::move(row));
        }
    csv::write_file(path, t);
}

void write_provenance(const Panel& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("UnwritablePath", path);
    for (const auto& [column, recs] : p.provenance)
        for (const auto& rec : recs) {
            out << column << '\t' << rec.op << '\t';
            bool first = true;
            for (const auto& [k, v] : rec.params) {
                if (!first) out << ';';
                out << k << '=' << csv::fmt_data(v);
                first = false;
            }
            out << '\n';
        }
}

Panel read_csv(const std::string& path) {
    csv::Table t = csv::read_file(path);
    std::size_t ci = t.col("industry");
    std::size_t cp = t.col("period");
    std::size_t ca = t.col("active");

    std::map<std::string, ingest::SeriesMap> columns;
    std::vector<std::pair<std::size_t, std::string>> value_cols;
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (c != ci && c != cp && c != ca) value_cols.push_back({c, t.header[c]});

    std::set<std::string> inds;
    std::set<int> pers;
    std::map<std::pair<std::string, int>, bool> act;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        std::pair<std::string, int> key{row[ci], static_cast<int>(csv::to_int(row[cp], r + 2))};
        inds.insert(key.first);
        pers.insert(key.second);
        act[key] = row[ca] == "1";
        for (const auto& [c, name] : value_cols)
            if (!row[c].empty()) columns[name][key] = csv::to_num(row[c], r + 2);
    }

    Panel p;
    p.industries.assign(inds.begin(), inds.end());
    p.periods.assign(pers.begin(), pers.end());
    check_even_spacing(p.periods);
    p.active.assign(p.n_rows(), 1);
    for (int i = 0; i < p.n_ind(); ++i)
        for (int ti = 0; ti < p.n_per(); ++ti) {
            auto it = act.find({p.industries[i], p.periods[ti]});
            p.active[p.idx(i, ti)] = (it != act.end() && it->second) ? 1 : 0;
        }
    for (const auto& [c, name] : value_cols) {
        (void)c;
        std::vector<double> col(p.n_rows(), std::nan(""));
        auto it = columns.find(name);
        if (it != columns.end())
            for (const auto& [key, v] : it->second) {
                auto ii = std::lower_bound(p.industries.begin(), p.industries.end(), key.first);
                int i = static_cast<int>(ii - p.industries.begin());
                col[p.idx(i, p.period_pos(key.second))] = v;
            }
        p.cols[name] = std::move(col);
    }
    return p;
}

void read_provenance(Panel& p, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("MissingFile", path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string column, op, params;
        if (!std::getline(ss, column, '\t') || !std::getline(ss, op, '\t'))
            throw data_error("BadValue", "provenance line " + std::to_string(lineno));
        std::getline(ss, params, '\t');
        TransformRecord rec;
        rec.op = op;
        if (!params.empty()) {
            std::stringstream ps(params);
            std::string kv;
            while (std::getline(ps, kv, ';')) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw data_error("BadValue", "provenance line " + std::to_string(lineno));
                rec.params[kv.substr(0, eq)] = csv::to_num(kv.substr(eq + 1), lineno);
            }
        }
        p.provenance[column].push_back(std::move(rec));
    }
}

} // namespace ionet::panel
