#include "ionet/csvio.hpp"

#include "ionet/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ionet::csv {

std::size_t Table::col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw data_error("MissingColumn", "no column named '" + name + "'");
}

bool Table::has_col(const std::string& name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim, std::size_t rowno) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"' && cell.empty()) {
            quoted = true;
        } else if (c == delim) {
            out.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (quoted)
        throw data_error("UnterminatedQuote", "row " + std::to_string(rowno));
    out.push_back(cell);
    return out;
}

} // namespace

Table read(std::istream& in, char delim) {
    Table t;
    std::string line;
    std::size_t rowno = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++rowno;
        if (line.empty()) continue;
        auto cells = split_line(line, delim, rowno);
        if (rowno == 1) {
            t.header = std::move(cells);
        } else {
            if (cells.size() != t.header.size())
                throw data_error("RaggedRow", "row " + std::to_string(rowno) + " has " +
                                                  std::to_string(cells.size()) + " cells, expected " +
                                                  std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (t.header.empty()) throw data_error("EmptyInput", "no header row");
    return t;
}

Table read_file(const std::string& path, char delim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("MissingFile", path);
    return read(in, delim);
}

void write(std::ostream& out, const Table& t, char delim) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) out << delim;
        out << t.header[i];
    }
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << delim;
            out << row[i];
        }
        out << '\n';
    }
}

void write_file(const std::string& path, const Table& t, char delim) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("UnwritablePath", path);
    write(out, t, delim);
}

double to_num(const std::string& cell, std::size_t row) {
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw data_error("NonNumericValue",
                         "row " + std::to_string(row) + ": '" + cell + "'");
    }
}

long to_int(const std::string& cell, std::size_t row) {
    try {
        std::size_t pos = 0;
        long v = std::stol(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw data_error("NonNumericValue",
                         "row " + std::to_string(row) + ": '" + cell + "'");
    }
}

std::string fmt_report(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string fmt_data(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_int(long x) { return std::to_string(x); }

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("MissingFile", path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace ionet::csv
