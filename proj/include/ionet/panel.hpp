#pragma once

#include "ionet/ingest.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ionet::panel {

// One applied value transformation. Parameters hold everything replay needs;
// replaying the records against the raw column reproduces the stored column
// bit for bit (recorded statistics are reused, never recomputed).
struct TransformRecord {
    std::string op; // "scale_sd" | "log1p" | "iqr_filter"
    std::map<std::string, double> params;
};

struct RemovalRecord {
    std::string industry;
    int period = 0;
    std::string column;
    double value = 0.0;
    double lo = 0.0, hi = 0.0;
};

// Long-format panel on a dense (industry x period) grid. Missing observations
// are NaN; rows dropped by outlier screening stay in the grid with
// active = 0. Periods are evenly spaced, so lags shift grid positions.
struct Panel {
    std::vector<std::string> industries; // sorted, unique
    std::vector<int> periods;            // ascending, evenly spaced
    std::vector<uint8_t> active;         // industries.size() * periods.size()
    std::map<std::string, std::vector<double>> cols;
    std::map<std::string, std::vector<TransformRecord>> provenance;
    std::vector<RemovalRecord> removals;
    std::vector<std::string> history; // structural ops (subsets, lags, balance)

    int n_ind() const { return static_cast<int>(industries.size()); }
    int n_per() const { return static_cast<int>(periods.size()); }
    std::size_t n_rows() const { return industries.size() * periods.size(); }
    std::size_t idx(int i, int p) const {
        return static_cast<std::size_t>(i) * periods.size() + static_cast<std::size_t>(p);
    }
    const std::vector<double>& col(const std::string& name) const;
    bool has_col(const std::string& name) const { return cols.count(name) != 0; }
    int period_pos(int period) const; // -1 when absent
};

struct BalanceSpec {
    bool balanced = false;
    // Columns that must be present and strictly positive in every period for
    // an industry to survive balancing.
    std::vector<std::string> size_columns;
};

// Grid = sorted union of keys over all series; cells without a value are NaN.
Panel assemble(const std::map<std::string, ingest::SeriesMap>& columns, const BalanceSpec& bal);

// ---- value transformations (recorded in provenance) ------------------------

// x / sd with the sample sd over active non-missing values.
void scale_by_sd(Panel& p, const std::string& column);

// ln(1 + x); requires x > -1 on active non-missing values.
void log1p_col(Panel& p, const std::string& column);

// Pooled interquartile screen: bounds [Q1 - a IQR, Q3 + a IQR] are computed
// per column on the data as given, then the union of violating rows is
// deactivated. Bounds never depend on the removal order, so the dropped set
// is the same whatever the column order.
void remove_outliers_iqr(Panel& p, const std::vector<std::string>& columns, double a);

// ---- structural operations -------------------------------------------------

// New column `out` holding `column` shifted k grid positions back within each
// industry; the first k periods are missing.
void lag_col(Panel& p, const std::string& column, int k, const std::string& out);

struct GroupSpec {
    enum class Kind {
        median_split_above, // industries strictly above the median time average
        median_split_below, // complement (at or below)
        code_prefix,
        class_file,
        period_window,
    };
    Kind kind = Kind::code_prefix;
    std::string column;  // median splits: column whose time average is ranked
    std::string prefix;  // code_prefix
    std::map<std::string, std::string> class_map; // industry -> label
    std::string class_label;
    int start_period = 0, end_period = 0; // period_window, inclusive
};

Panel subset(const Panel& p, const GroupSpec& g);

// ---- replay and serialization ----------------------------------------------

struct ReplayResult {
    std::vector<double> values;
    std::vector<uint8_t> keep; // 0 where an iqr_filter record excludes the row
};

// Applies the records to a raw column. Division reuses the recorded sd and
// screening reuses the recorded bounds, which is what makes replay bit-exact.
ReplayResult replay(const std::vector<double>& raw, const std::vector<TransformRecord>& recs);

// Long CSV (industry, period, active, columns...) at full precision plus a
// sidecar with one provenance line per record. Reading restores both.
void write_csv(const Panel& p, const std::string& path);
void write_provenance(const Panel& p, const std::string& path);
Panel read_csv(const std::string& path);
void read_provenance(Panel& p, const std::string& path);

} // namespace ionet::panel
