#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ionet::ingest {

// ---- flow edgelists --------------------------------------------------------

// One directed flow: `source` supplies `target` with `value` in `period`.
struct FlowEdge {
    std::string source;
    std::string target;
    double value = 0.0;
    int period = 0;
};

struct EdgeColumns {
    std::string source = "source";
    std::string target = "target";
    std::string value = "value";
    std::string period = "period"; // ignored when has_period is false
    bool has_period = true;
    int default_period = 0;
    char delim = ',';
};

// Rejects negative values; zero-valued rows are kept (they carry support
// information for some sources and are dropped at matrix build time).
std::vector<FlowEdge> parse_flow_edgelist(std::istream& in, const EdgeColumns& cols);
std::vector<FlowEdge> parse_flow_edgelist_file(const std::string& path, const EdgeColumns& cols);

// ---- concordances ----------------------------------------------------------

struct ConcordanceEntry {
    std::string target;
    double weight = 0.0;
};

// source code -> weighted targets; per-source weights sum to 1 within 1e-9.
using ConcordanceMap = std::map<std::string, std::vector<ConcordanceEntry>>;

struct ConcordanceColumns {
    std::string source = "source";
    std::string target = "target";
    std::string weight = "weight"; // optional column
    char delim = ',';
};

// Weighted rows must have weights in (0, 1]; a source whose weights do not sum
// to 1 is renormalized. When the weight column is absent every source splits
// uniformly across its targets (1/k each).
ConcordanceMap parse_concordance(std::istream& in, const ConcordanceColumns& cols);
ConcordanceMap parse_concordance_file(const std::string& path, const ConcordanceColumns& cols);

enum class ConcordanceSide { source, target, both };
enum class UnmappedPolicy { strict, passthrough };

// Re-keys edge endpoints through the map, splitting values by weight. Total
// flow value is conserved up to rounding. strict: an endpoint code missing
// from the map raises UnmappedCode; passthrough: the code is kept as is with
// weight 1.
std::vector<FlowEdge> apply_concordance(const std::vector<FlowEdge>& edges,
                                        const ConcordanceMap& map, ConcordanceSide side,
                                        UnmappedPolicy policy = UnmappedPolicy::strict);

// ---- dated events (patents) ------------------------------------------------

// An event carries one or more classification codes; each listed code is an
// independent (event, code) record sharing the event's citation count.
struct EventRecord {
    std::string id;
    int year = 0;
    std::vector<std::string> codes;
    double citations = 0.0;
};

struct EventColumns {
    std::string id = "id";
    std::string year = "year";
    std::string codes = "codes"; // ';'-separated list inside the cell
    std::string citations = "citations";
    char delim = ',';
};

std::vector<EventRecord> parse_events(std::istream& in, const EventColumns& cols);
std::vector<EventRecord> parse_events_file(const std::string& path, const EventColumns& cols);

enum class WindowTiming { prior, post };

// Non-overlapping windows; with prior timing the window anchored at a covers
// years [a - len + 1, a], with post timing [a, a + len - 1].
struct WindowGrid {
    std::vector<int> anchors;
    int window_len = 5;
    WindowTiming timing = WindowTiming::prior;
};

struct Stock {
    double weighted = 0.0;   // sum of weight * (1 + citations)
    double unweighted = 0.0; // sum of weight
};

// (industry code, anchor) -> stock.
struct StockTable {
    std::map<std::pair<std::string, int>, Stock> stock;
    long assigned_records = 0;
    long unassigned_records = 0; // events falling outside every window
};

// Accumulates citation-weighted stocks per industry and window. Codes are
// mapped through `map` when given (policy as in apply_concordance), otherwise
// taken as industry codes directly. Every (event, code) record lands in at
// most one window; overlapping grids are rejected.
StockTable window_events(const std::vector<EventRecord>& events, const WindowGrid& grid,
                         const ConcordanceMap* map = nullptr,
                         UnmappedPolicy policy = UnmappedPolicy::strict);

// Stock of one industry-window cell from (weight, citations) pairs.
Stock citation_weighted_stock(const std::vector<std::pair<double, double>>& weight_cites);

// ---- auxiliary panel series ------------------------------------------------

// (industry, period) -> value.
using SeriesMap = std::map<std::pair<std::string, int>, double>;

struct AuxPanel {
    std::map<std::string, SeriesMap> columns;
};

struct AuxColumns {
    std::string industry = "industry";
    std::string period = "period";
    char delim = ',';
};

// Reads every non-key column as a numeric series; empty cells are skipped
// (missing observation). Duplicate (industry, period) keys are rejected.
AuxPanel parse_aux_panel(std::istream& in, const AuxColumns& cols);
AuxPanel parse_aux_panel_file(const std::string& path, const AuxColumns& cols);

// Nominal series divided by a positive deflator, matched on (industry, period).
SeriesMap deflate(const SeriesMap& nominal, const SeriesMap& deflator);

} // namespace ionet::ingest
