#include "doctest.h"

#include "ionet/csvio.hpp"
#include "ionet/errors.hpp"
#include "ionet/panel.hpp"
#include "ionet/pipeline.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

using namespace ionet;
namespace fs = std::filesystem;
namespace pl = pipeline;

namespace {

template <class F>
std::string err_name(F&& f) {
    try {
        f();
    } catch (const error& e) {
        return e.name();
    }
    return {};
}

// Fresh directory under the system temp root; wiped before use.
std::string scratch(const std::string& leaf) {
    const char* base = std::getenv("TMPDIR");
    std::string dir = std::string(base ? base : "/tmp") + "/ionet_pipe_" + leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Reference FNV-1a 64 over a string; the manifest config line must match it.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string parse_err(const std::string& leaf, const std::string& content) {
    std::string path = scratch("cfg_err") + "/" + leaf;
    write_text(path, content);
    return err_name([&] { pl::Config::from_file(path); });
}

std::string manifest_file_line(const std::string& dir, const std::string& rel) {
    std::string full = dir + "/" + rel;
    return "file=" + rel + " hash=" + csv::hash_hex(csv::fnv1a_file(full)) +
           " size=" + std::to_string(fs::file_size(full)) + "\n";
}

pl::Config chain_config(const std::string& outdir) {
    pl::Config cfg;
    cfg.set_override("io.outdir=" + outdir);
    cfg.set_override("simulate.nodes=30");
    cfg.set_override("simulate.n_periods=4");
    cfg.set_override("simulate.seed=11");
    cfg.set_override("simulate.p_market=0.3");
    cfg.set_override("simulate.p_innov=0.25");
    cfg.set_override("estimate.estimators=fe,bb");
    return cfg;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config parses sections, comments and repeated keys") {
    std::string path = scratch("cfg") + "/a.ini";
    write_text(path,
               "# leading comment\n"
               "; alternative comment style\n"
               "top = plain\n"
               "crlf = ok\r\n"
               "[io]\n"
               "outdir = /somewhere/out\n"
               "[simulate]\n"
               "nodes = 12\n"
               "nodes = 18\n"
               "seed=7\n"
               "[ spill ]\n"
               "theta = 0.07\n");
    pl::Config cfg = pl::Config::from_file(path);

    CHECK(cfg.has("top"));
    CHECK(cfg.str("top") == "plain");
    CHECK(cfg.str("crlf") == "ok");
    CHECK(cfg.str("io.outdir") == "/somewhere/out");
    // Later assignment wins.
    CHECK(cfg.int_or("simulate.nodes", 0) == 18);
    CHECK(cfg.int_or("simulate.seed", 0) == 7);
    // Section names are trimmed.
    CHECK(cfg.num_or("spill.theta", 0.0) == doctest::Approx(0.07));
    CHECK_FALSE(cfg.has("simulate.missing"));
    CHECK(cfg.str_or("simulate.missing", "dflt") == "dflt");
    CHECK(err_name([&] { cfg.str("simulate.missing"); }) == "MissingKey");
}

TEST_CASE("config file errors carry names") {
    CHECK(err_name([] { pl::Config::from_file("/nonexistent/nowhere.ini"); }) == "MissingFile");
    CHECK(parse_err("s1.ini", "[oops\n") == "BadValue");
    CHECK(parse_err("s2.ini", "[]\n") == "BadValue");
    CHECK(parse_err("s3.ini", "[ ]\n") == "BadValue");
    CHECK(parse_err("s4.ini", "noequals\n") == "BadValue");
    CHECK(parse_err("s5.ini", "= value\n") == "BadValue");
}

TEST_CASE("typed accessors parse and reject") {
    pl::Config cfg;
    cfg.set_override("a.num=2.5");
    cfg.set_override("a.int=42");
    cfg.set_override("a.bad=abc");
    cfg.set_override("a.list= x , y ,, z ");

    CHECK(cfg.num_or("a.num", 0.0) == 2.5);
    CHECK(cfg.num_or("a.int", 0.0) == 42.0);
    CHECK(cfg.int_or("a.int", 0) == 42);
    CHECK(cfg.num_or("a.absent", -1.5) == -1.5);
    CHECK(cfg.int_or("a.absent", 9) == 9);
    CHECK(err_name([&] { cfg.int_or("a.num", 0); }) == "BadValue");
    CHECK(err_name([&] { cfg.num_or("a.bad", 0.0); }) == "BadValue");
    CHECK(err_name([&] { cfg.int_or("a.bad", 0); }) == "BadValue");

    for (const char* t : {"1", "true", "YES", "on"}) {
        cfg.set_override(std::string("a.flag=") + t);
        CHECK(cfg.flag_or("a.flag", false));
    }
    for (const char* f : {"0", "False", "no", "OFF"}) {
        cfg.set_override(std::string("a.flag=") + f);
        CHECK_FALSE(cfg.flag_or("a.flag", true));
    }
    cfg.set_override("a.flag=maybe");
    CHECK(err_name([&] { cfg.flag_or("a.flag", false); }) == "BadValue");
    CHECK(cfg.flag_or("a.absent", true));

    CHECK(cfg.list_or("a.list", "") == std::vector<std::string>{"x", "y", "z"});
    CHECK(cfg.list_or("a.absent", "p,q") == std::vector<std::string>{"p", "q"});
    CHECK(cfg.list_or("a.absent", "").empty());

    CHECK(err_name([&] { cfg.set_override("notanassignment"); }) == "BadValue");
    CHECK(err_name([&] { cfg.set_override("=5"); }) == "BadValue");
}

TEST_CASE("resolved text is sorted and newline terminated") {
    pl::Config cfg;
    cfg.set_override("b.two=2");
    cfg.set_override("a.one=1");
    cfg.set_override("a.one=1b");
    CHECK(cfg.resolved() == "a.one=1b\nb.two=2\n");
}

TEST_CASE("stage names run in order and end with all") {
    std::vector<std::string> want = {"simulate", "ingest", "build",    "metrics", "spill",
                                     "panel",    "estimate", "report", "all"};
    CHECK(pl::stage_names() == want);
}

TEST_CASE("simulate writes edge tables and an exact manifest") {
    std::string dir = scratch("sim");
    pl::Config cfg;
    cfg.set_override("io.outdir=" + dir);
    cfg.set_override("simulate.nodes=10");
    cfg.set_override("simulate.n_periods=2");
    cfg.set_override("simulate.seed=5");
    pl::run("simulate", cfg);

    for (const char* rel : {"market.csv", "innovation.csv"}) {
        csv::Table t = csv::read_file(dir + "/" + rel);
        CHECK(t.header == std::vector<std::string>{"source", "target", "value", "period"});
        CHECK(t.rows.size() > 0);
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            CHECK(t.rows[r][0] != t.rows[r][1]);
            CHECK(csv::to_num(t.rows[r][2], r + 1) > 0.0);
            long p = csv::to_int(t.rows[r][3], r + 1);
            CHECK(p >= 1);
            CHECK(p <= 2);
        }
    }

    // Manifest reconstructed byte for byte: stage, config hash, then the
    // artifact lines sorted by relative path.
    std::string expect = "stage=simulate\n";
    expect += "config=" + csv::hash_hex(fnv1a(cfg.resolved())) + "\n";
    expect += manifest_file_line(dir, "innovation.csv");
    expect += manifest_file_line(dir, "market.csv");
    CHECK(slurp(dir + "/manifest_simulate.txt") == expect);
    CHECK_FALSE(fs::exists(dir + "/.lock"));
}

TEST_CASE("simulate then all yields a readable artifact set") {
    std::string dir = scratch("chain");
    pl::Config cfg = chain_config(dir);
    pl::run("simulate", cfg);
    pl::run("all", cfg);

    // Ingest canonicalizes: strictly increasing (period, source, target).
    csv::Table edges = csv::read_file(dir + "/edges_market.csv");
    CHECK(edges.header == std::vector<std::string>{"source", "target", "value", "period"});
    std::tuple<long, std::string, std::string> prev{-1, "", ""};
    for (std::size_t r = 0; r < edges.rows.size(); ++r) {
        std::tuple<long, std::string, std::string> key{csv::to_int(edges.rows[r][3], r + 1),
                                                       edges.rows[r][0], edges.rows[r][1]};
        CHECK(prev < key);
        prev = key;
    }

    csv::Table idx = csv::read_file(dir + "/index.csv");
    CHECK(idx.header == std::vector<std::string>{"code"});
    CHECK(idx.rows.size() == 30);

    // Up shares carry unit receiver rows; only nonzero cells are stored.
    csv::Table sh = csv::read_file(dir + "/shares_market_up_1.csv");
    CHECK(sh.header == std::vector<std::string>{"receiver", "supplier", "share"});
    std::map<std::string, double> row_sum;
    for (std::size_t r = 0; r < sh.rows.size(); ++r) {
        double s = csv::to_num(sh.rows[r][2], r + 1);
        CHECK(s > 0.0);
        row_sum[sh.rows[r][0]] += s;
    }
    CHECK(row_sum.size() > 0);
    for (const auto& [code, s] : row_sum) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fs::exists(dir + "/shares_innovation_dw_4.csv"));

    csv::Table sizes = csv::read_file(dir + "/sizes.csv");
    CHECK(sizes.header == std::vector<std::string>{"layer", "code", "period", "size"});
    CHECK(sizes.rows.size() == 2 * 30 * 4);

    // Centrality covers layer x direction x period x code; pagerank columns
    // sum to one within each block.
    csv::Table cent = csv::read_file(dir + "/centrality.csv");
    CHECK(cent.rows.size() == 2 * 1 * 4 * 30);
    double pr_sum = 0.0;
    for (std::size_t r = 0; r < cent.rows.size(); ++r)
        if (cent.rows[r][0] == "market" && cent.rows[r][2] == "1")
            pr_sum += csv::to_num(cent.rows[r][4], r + 1);
    CHECK(pr_sum == doctest::Approx(1.0).epsilon(1e-12));

    csv::Table nst = csv::read_file(dir + "/netstats.csv");
    CHECK(nst.rows.size() == 2 * 4);
    for (std::size_t r = 0; r < nst.rows.size(); ++r)
        CHECK(csv::to_int(nst.rows[r][2], r + 1) == 30);

    csv::Table sp = csv::read_file(dir + "/spillovers.csv");
    CHECK(sp.header == std::vector<std::string>{"code", "period", "spill_market_up",
                                                "spill_innovation_up"});
    CHECK(sp.rows.size() == 30 * 4);

    panel::Panel p = panel::read_csv(dir + "/panel.csv");
    CHECK(p.n_ind() == 30);
    CHECK(p.periods == std::vector<int>{1, 2, 3, 4});
    for (const char* c : {"size_market", "size_innovation", "spill_market_up",
                          "spill_innovation_up"})
        CHECK(p.has_col(c));
    CHECK(fs::exists(dir + "/provenance.tsv"));

    csv::Table est = csv::read_file(dir + "/estimates.csv");
    std::set<std::string> est_names, terms;
    for (const auto& row : est.rows) {
        est_names.insert(row[0]);
        terms.insert(row[1]);
    }
    CHECK(est_names == std::set<std::string>{"fe_weighted", "bb_system_gmm"});
    CHECK(terms.count("spill_market_up") == 1);
    CHECK(terms.count("size_market_lag1") == 1);

    csv::Table diag = csv::read_file(dir + "/diagnostics.csv");
    CHECK(diag.rows.size() == 2);
    for (std::size_t r = 0; r < diag.rows.size(); ++r)
        CHECK(csv::to_int(diag.rows[r][1], r + 1) == 120); // 30 industries, complete grid

    std::string summary = slurp(dir + "/summary.txt");
    CHECK(summary.rfind("== network statistics ==\n", 0) == 0);
    CHECK(summary.find("== diagnostics ==") != std::string::npos);

    for (const char* st : {"ingest", "build", "metrics", "spill", "panel", "estimate",
                           "report", "all"})
        CHECK(fs::exists(dir + "/manifest_" + std::string(st) + ".txt"));
    // 28 artifacts behind the two header lines.
    std::string all = slurp(dir + "/manifest_all.txt");
    std::size_t file_lines = 0;
    std::istringstream ss(all);
    for (std::string line; std::getline(ss, line);)
        if (line.rfind("file=", 0) == 0) ++file_lines;
    CHECK(file_lines == 28);
}

TEST_CASE("rerunning in a wiped outdir reproduces manifests byte for byte") {
    std::string dir = scratch("det");
    pl::Config cfg = chain_config(dir);
    pl::run("simulate", cfg);
    pl::run("all", cfg);
    std::string manifest = slurp(dir + "/manifest_all.txt");
    std::string estimates = slurp(dir + "/estimates.csv");
    std::string summary = slurp(dir + "/summary.txt");
    CHECK(manifest.size() > 0);

    fs::remove_all(dir);
    fs::create_directories(dir);
    pl::run("simulate", cfg);
    pl::run("all", cfg);
    CHECK(slurp(dir + "/manifest_all.txt") == manifest);
    CHECK(slurp(dir + "/estimates.csv") == estimates);
    CHECK(slurp(dir + "/summary.txt") == summary);
}

TEST_CASE("lock file guards the outdir and is always released") {
    std::string dir = scratch("lock");
    pl::Config cfg;
    cfg.set_override("io.outdir=" + dir);
    cfg.set_override("simulate.nodes=6");
    cfg.set_override("simulate.n_periods=1");

    write_text(dir + "/.lock", "busy\n");
    CHECK(err_name([&] { pl::run("simulate", cfg); }) == "OutdirLocked");
    fs::remove(dir + "/.lock");

    pl::run("simulate", cfg);
    CHECK_FALSE(fs::exists(dir + "/.lock"));

    // The lock is scope-bound: released even when the stage name is rejected.
    CHECK(err_name([&] { pl::run("frobnicate", cfg); }) == "BadValue");
    CHECK_FALSE(fs::exists(dir + "/.lock"));
}

} // TEST_SUITE
