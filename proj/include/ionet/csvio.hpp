#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ionet::csv {

// Minimal delimited-text table. Quoting is supported on read (RFC-style double
// quotes); writes never need it because codes and column names are plain
// tokens.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column position by name; throws MissingColumn.
    std::size_t col(const std::string& name) const;
    bool has_col(const std::string& name) const;
};

Table read(std::istream& in, char delim = ',');
Table read_file(const std::string& path, char delim = ',');

void write(std::ostream& out, const Table& t, char delim = ',');
void write_file(const std::string& path, const Table& t, char delim = ',');

// Strict numeric parse of a whole cell; throws NonNumericValue with the
// 1-based data row for error messages.
double to_num(const std::string& cell, std::size_t row);
long to_int(const std::string& cell, std::size_t row);

// Formatting used across artifacts: fmt_report for printed results (10
// significant digits), fmt_data for values a later stage re-reads (17
// significant digits, round-trip exact).
std::string fmt_report(double x);
std::string fmt_data(double x);
std::string fmt_int(long x);

// FNV-1a 64-bit over a file's bytes; content hashes in stage manifests.
std::uint64_t fnv1a_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

} // namespace ionet::csv
