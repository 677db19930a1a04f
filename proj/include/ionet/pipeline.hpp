#pragma once

#include <map>
#include <string>
#include <vector>

namespace ionet::pipeline {

// Flat key=value configuration with "[section]" grouping. Keys are addressed
// as "section.key"; later assignments win, which is what makes command-line
// overrides work. Values stay strings until a typed accessor parses them.
struct Config {
    std::map<std::string, std::string> kv;

    static Config from_file(const std::string& path);
    void set_override(const std::string& assignment); // "section.key=value"

    bool has(const std::string& key) const;
    std::string str(const std::string& key) const; // throws MissingKey
    std::string str_or(const std::string& key, const std::string& def) const;
    double num_or(const std::string& key, double def) const;
    long int_or(const std::string& key, long def) const;
    bool flag_or(const std::string& key, bool def) const;
    // Comma-separated list; empty string means empty list.
    std::vector<std::string> list_or(const std::string& key, const std::string& def) const;

    std::string resolved() const; // sorted key=value lines, one per key
};

// Stage names in run order; "simulate" generates inputs, "all" chains
// ingest through report.
const std::vector<std::string>& stage_names();

// Runs one stage against the configured output directory. Every stage writes
// a manifest_<stage>.txt listing its artifacts with content hashes and no
// timestamps, so equal inputs produce byte-identical manifests. A .lock file
// guards the directory against concurrent runs.
void run(const std::string& stage, const Config& cfg);

} // namespace ionet::pipeline
