#include "ionet/ingest.hpp"

#include "ionet/csvio.hpp"
#include "ionet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ionet::ingest {

std::vector<FlowEdge> parse_flow_edgelist(std::istream& in, const EdgeColumns& cols) {
    csv::Table t = csv::read(in, cols.delim);
    std::size_t cs = t.col(cols.source);
    std::size_t ct = t.col(cols.target);
    std::size_t cv = t.col(cols.value);
    std::size_t cp = cols.has_period ? t.col(cols.period) : 0;

    std::vector<FlowEdge> edges;
    edges.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        FlowEdge e;
        e.source = row[cs];
        e.target = row[ct];
        e.value = csv::to_num(row[cv], r + 2);
        if (!std::isfinite(e.value))
            throw data_error("NonNumericValue", "row " + std::to_string(r + 2) + ": non-finite value");
        if (e.value < 0.0)
            throw data_error("NegativeValue", "row " + std::to_string(r + 2) + ": " + row[cv]);
        e.period = cols.has_period ? static_cast<int>(csv::to_int(row[cp], r + 2))
                                   : cols.default_period;
        if (e.source.empty() || e.target.empty())
            throw data_error("EmptyCode", "row " + std::to_string(r + 2));
        edges.push_back(std::move(e));
    }
    return edges;
}

std::vector<FlowEdge> parse_flow_edgelist_file(const std::string& path, const EdgeColumns& cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("MissingFile", path);
    return parse_flow_edgelist(in, cols);
}

ConcordanceMap parse_concordance(std::istream& in, const ConcordanceColumns& cols) {
    csv::Table t = csv::read(in, cols.delim);
    std::size_t cs = t.col(cols.source);
    std::size_t ct = t.col(cols.target);
    bool weighted = t.has_col(cols.weight);
    std::size_t cw = weighted ? t.col(cols.weight) : 0;

    ConcordanceMap map;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        double w = 1.0;
        if (weighted) {
            w = csv::to_num(row[cw], r + 2);
            if (!(w > 0.0) || w > 1.0)
                throw data_error("WeightOutOfRange",
                                 "row " + std::to_string(r + 2) + ": " + row[cw]);
        }
        map[row[cs]].push_back({row[ct], w});
    }
    if (map.empty()) throw data_error("EmptyMap", "concordance has no rows");

    // Per-source normalization: uniform split when unweighted, proportional
    // rescale otherwise. Post: weights of each source sum to 1 within 1e-9.
    for (auto& [src, entries] : map) {
        double tot = 0.0;
        for (auto& e : entries) tot += e.weight;
        if (!(tot > 0.0)) throw data_error("WeightOutOfRange", "source '" + src + "' sums to 0");
        for (auto& e : entries) e.weight /= tot;
    }
    return map;
}

ConcordanceMap parse_concordance_file(const std::string& path, const ConcordanceColumns& cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("MissingFile", path);
    return parse_concordance(in, cols);
}

namespace {

// Expand one code through the map. Returns empty when unmapped and strict
// handling was deferred to the caller.
const std::vector<ConcordanceEntry>* lookup(const ConcordanceMap& map, const std::string& code) {
    auto it = map.find(code);
    return it == map.end() ? nullptr : &it->second;
}

} // namespace

std::vector<FlowEdge> apply_concordance(const std::vector<FlowEdge>& edges,
                                        const ConcordanceMap& map, ConcordanceSide side,
                                        UnmappedPolicy policy) {
    bool do_src = side == ConcordanceSide::source || side == ConcordanceSide::both;
    bool do_tgt = side == ConcordanceSide::target || side == ConcordanceSide::both;

    std::vector<FlowEdge> out;
    out.reserve(edges.size());
    std::vector<ConcordanceEntry> self(1);
    for (const auto& e : edges) {
        const std::vector<ConcordanceEntry>* src_ent;
        const std::vector<ConcordanceEntry>* tgt_ent;
        std::vector<ConcordanceEntry> src_self{{e.source, 1.0}}, tgt_self{{e.target, 1.0}};
        if (do_src) {
            src_ent = lookup(map, e.source);
            if (!src_ent) {
                if (policy == UnmappedPolicy::strict)
                    throw data_error("UnmappedCode", "source '" + e.source + "'");
                src_ent = &src_self;
            }
        } else {
            src_ent = &src_self;
        }
        if (do_tgt) {
            tgt_ent = lookup(map, e.target);
            if (!tgt_ent) {
                if (policy == UnmappedPolicy::strict)
                    throw data_error("UnmappedCode", "target '" + e.target + "'");
                tgt_ent = &tgt_self;
            }
        } else {
            tgt_ent = &tgt_self;
        }
        for (const auto& s : *src_ent)
            for (const auto& t : *tgt_ent)
                out.push_back({s.target, t.target, e.value * s.weight * t.weight, e.period});
    }
    return out;
}

std::vector<EventRecord> parse_events(std::istream& in, const EventColumns& cols) {
    csv::Table t = csv::read(in, cols.delim);
    std::size_t ci = t.col(cols.id);
    std::size_t cy = t.col(cols.year);
    std::size_t cc = t.col(cols.codes);
    std::size_t cn = t.col(cols.citations);

    std::vector<EventRecord> events;
    events.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        EventRecord e;
        e.id = row[ci];
        e.year = static_cast<int>(csv::to_int(row[cy], r + 2));
        e.citations = csv::to_num(row[cn], r + 2);
        if (e.citations < 0.0)
            throw data_error("NegativeValue",
                             "row " + std::to_string(r + 2) + ": citations " + row[cn]);
        std::stringstream ss(row[cc]);
        std::string code;
        while (std::getline(ss, code, ';'))
            if (!code.empty()) e.codes.push_back(code);
        if (e.codes.empty())
            throw data_error("EmptyCode", "row " + std::to_string(r + 2) + ": no codes");
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<EventRecord> parse_events_file(const std::string& path, const EventColumns& cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("MissingFile", path);
    return parse_events(in, cols);
}

Stock citation_weighted_stock(const std::vector<std::pair<double, double>>& weight_cites) {
    Stock s;
    for (const auto& [w, c] : weight_cites) {
        s.weighted += w * (1.0 + c);
        s.unweighted += w;
    }
    return s;
}

StockTable window_events(const std::vector<EventRecord>& events, const WindowGrid& grid,
                         const ConcordanceMap* map, UnmappedPolicy policy) {
    if (grid.anchors.empty() || grid.window_len <= 0)
        throw data_error("EmptyWindowGrid", "need at least one anchor and positive length");

    // Window bounds per anchor; reject overlaps so each event lands in at
    // most one window.
    struct Win {
        int lo, hi, anchor;
    };
    std::vector<Win> wins;
    wins.reserve(grid.anchors.size());
    for (int a : grid.anchors) {
        if (grid.timing == WindowTiming::prior)
            wins.push_back({a - grid.window_len + 1, a, a});
        else
            wins.push_back({a, a + grid.window_len - 1, a});
    }
    std::sort(wins.begin(), wins.end(), [](const Win& x, const Win& y) { return x.lo < y.lo; });
    for (std::size_t i = 1; i < wins.size(); ++i)
        if (wins[i].lo <= wins[i - 1].hi)
            throw data_error("OverlappingWindows",
                             "anchors " + std::to_string(wins[i - 1].anchor) + " and " +
                                 std::to_string(wins[i].anchor));

    StockTable table;
    for (const auto& e : events) {
        const Win* hit = nullptr;
        for (const auto& w : wins)
            if (e.year >= w.lo && e.year <= w.hi) {
                hit = &w;
                break;
            }
        if (!hit) {
            table.unassigned_records += static_cast<long>(e.codes.size());
            continue;
        }
        for (const auto& code : e.codes) {
            table.assigned_records += 1;
            if (map) {
                const auto* entries = lookup(*map, code);
                if (!entries) {
                    if (policy == UnmappedPolicy::strict)
                        throw data_error("UnmappedCode", "event code '" + code + "'");
                    auto& s = table.stock[{code, hit->anchor}];
                    s.weighted += 1.0 + e.citations;
                    s.unweighted += 1.0;
                    continue;
                }
                for (const auto& ent : *entries) {
                    auto& s = table.stock[{ent.target, hit->anchor}];
                    s.weighted += ent.weight * (1.0 + e.citations);
                    s.unweighted += ent.weight;
                }
            } else {
                auto& s = table.stock[{code, hit->anchor}];
                s.weighted += 1.0 + e.citations;
                s.unweighted += 1.0;
            }
        }
    }
    return table;
}

AuxPanel parse_aux_panel(std::istream& in, const AuxColumns& cols) {
    csv::Table t = csv::read(in, cols.delim);
    std::size_t ci = t.col(cols.industry);
    std::size_t cp = t.col(cols.period);

    AuxPanel p;
    std::vector<std::pair<std::size_t, std::string>> value_cols;
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (c != ci && c != cp) value_cols.push_back({c, t.header[c]});
    if (value_cols.empty()) throw data_error("MissingColumn", "no value columns");

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        std::pair<std::string, int> key{row[ci],
                                        static_cast<int>(csv::to_int(row[cp], r + 2))};
        for (const auto& [c, name] : value_cols) {
            if (row[c].empty()) continue;
            auto& series = p.columns[name];
            if (!series.emplace(key, csv::to_num(row[c], r + 2)).second)
                throw data_error("DuplicateKey", "column '" + name + "', industry '" +
                                                     key.first + "', period " +
                                                     std::to_string(key.second));
        }
    }
    return p;
}

AuxPanel parse_aux_panel_file(const std::string& path, const AuxColumns& cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("MissingFile", path);
    return parse_aux_panel(in, cols);
}

SeriesMap deflate(const SeriesMap& nominal, const SeriesMap& deflator) {
    SeriesMap real;
    for (const auto& [key, v] : nominal) {
        auto it = deflator.find(key);
        if (it == deflator.end())
            throw data_error("MissingDeflator", "industry '" + key.first + "', period " +
                                                    std::to_string(key.second));
        if (!(it->second > 0.0))
            throw data_error("NonPositiveDeflator", "industry '" + key.first + "', period " +
                                                        std::to_string(key.second));
        real[key] = v / it->second;
    }
    return real;
}

} // namespace ionet::ingest
