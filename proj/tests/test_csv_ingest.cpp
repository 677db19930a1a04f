#include <doctest.h>

#include "ionet/csvio.hpp"
#include "ionet/errors.hpp"
#include "ionet/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

using namespace ionet;

namespace {

std::string err_name(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.name();
    }
    return "";
}

} // namespace

TEST_SUITE("ingest") {

TEST_CASE("csv reader handles quotes, CRLF and blank lines") {
    std::istringstream in("a,b,c\r\n\"x,1\",\"he said \"\"hi\"\"\",3\n\n1,2,3\n");
    csv::Table t = csv::read(in);
    REQUIRE(t.header.size() == 3);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "x,1");
    CHECK(t.rows[0][1] == "he said \"hi\"");
    CHECK(t.rows[1][2] == "3");
    CHECK(t.col("b") == 1);
    CHECK(t.has_col("c"));
    CHECK_FALSE(t.has_col("d"));
}

TEST_CASE("csv reader rejects malformed input") {
    std::istringstream ragged("a,b\n1,2,3\n");
    CHECK(err_name([&] { csv::read(ragged); }) == "RaggedRow");
    std::istringstream unterminated("a,b\n\"open,2\n");
    CHECK(err_name([&] { csv::read(unterminated); }) == "UnterminatedQuote");
    std::istringstream empty("");
    CHECK(err_name([&] { csv::read(empty); }) == "EmptyInput");
    std::istringstream header_only("a,b\n");
    CHECK(csv::read(header_only).rows.empty());
}

TEST_CASE("numeric cells parse whole-cell or not at all") {
    CHECK(csv::to_num("1.5", 1) == 1.5);
    CHECK(csv::to_num("-2e3", 1) == -2000.0);
    CHECK(err_name([] { csv::to_num("1.5x", 4); }) == "NonNumericValue");
    CHECK(err_name([] { csv::to_num("", 4); }) == "NonNumericValue");
    CHECK(csv::to_int("42", 1) == 42);
    CHECK(err_name([] { csv::to_int("4.2", 1); }) == "NonNumericValue");
}

TEST_CASE("data formatting round-trips doubles exactly") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 123456.789, 0.0}) {
        std::string s = csv::fmt_data(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
    CHECK(csv::fmt_report(0.123456789012345) == "0.123456789");
}

TEST_CASE("file hashing matches the published FNV-1a vector") {
    std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                       "/ionet_fnv_probe.bin";
    {
        std::ofstream f(path, std::ios::binary);
        f << "abc";
    }
    CHECK(csv::hash_hex(csv::fnv1a_file(path)) == "e71fa2190541574b");
    std::remove(path.c_str());
}

TEST_CASE("flow edgelists parse with validation") {
    ingest::EdgeColumns cols;
    std::istringstream in("source,target,value,period\nA,B,10.5,2000\nB,C,0,2000\nA,C,3,2001\n");
    auto edges = ingest::parse_flow_edgelist(in, cols);
    REQUIRE(edges.size() == 3);
    CHECK(edges[0].source == "A");
    CHECK(edges[0].value == 10.5);
    CHECK(edges[1].value == 0.0); // zero rows carry support information
    CHECK(edges[2].period == 2001);

    std::istringstream neg("source,target,value,period\nA,B,-1,2000\n");
    CHECK(err_name([&] { ingest::parse_flow_edgelist(neg, cols); }) == "NegativeValue");
    std::istringstream inf("source,target,value,period\nA,B,inf,2000\n");
    CHECK(err_name([&] { ingest::parse_flow_edgelist(inf, cols); }) == "NonNumericValue");
    std::istringstream blank("source,target,value,period\n,B,1,2000\n");
    CHECK(err_name([&] { ingest::parse_flow_edgelist(blank, cols); }) == "EmptyCode");
    std::istringstream miss("source,target,period\nA,B,2000\n");
    CHECK(err_name([&] { ingest::parse_flow_edgelist(miss, cols); }) == "MissingColumn");
}

TEST_CASE("edgelists without a period column take the default") {
    ingest::EdgeColumns cols;
    cols.has_period = false;
    cols.default_period = 1997;
    std::istringstream in("source,target,value\nA,B,5\n");
    auto edges = ingest::parse_flow_edgelist(in, cols);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].period == 1997);
}

TEST_CASE("swapping source and target columns flips orientation at parse time") {
    ingest::EdgeColumns cols;
    std::swap(cols.source, cols.target);
    std::istringstream in("source,target,value,period\nBUYER,SELLER,5,1\n");
    auto edges = ingest::parse_flow_edgelist(in, cols);
    CHECK(edges[0].source == "SELLER");
    CHECK(edges[0].target == "BUYER");
}

TEST_CASE("unweighted concordances split uniformly") {
    std::ostringstream src;
    src << "source,target\n";
    for (int i = 1; i <= 9; ++i) src << "X,T" << i << "\n";
    std::istringstream in(src.str());
    auto map = ingest::parse_concordance(in, {});
    REQUIRE(map.at("X").size() == 9);
    for (const auto& e : map.at("X")) CHECK(e.weight == 1.0 / 9.0);
}

TEST_CASE("weighted concordances renormalize per source") {
    std::istringstream in("source,target,weight\nX,A,0.8\nX,B,0.4\nY,C,1\n");
    auto map = ingest::parse_concordance(in, {});
    REQUIRE(map.at("X").size() == 2);
    CHECK(map.at("X")[0].weight == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(map.at("X")[1].weight == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(map.at("Y")[0].weight == 1.0);

    std::istringstream zero("source,target,weight\nX,A,0\n");
    CHECK(err_name([&] { ingest::parse_concordance(zero, {}); }) == "WeightOutOfRange");
    std::istringstream big("source,target,weight\nX,A,1.2\n");
    CHECK(err_name([&] { ingest::parse_concordance(big, {}); }) == "WeightOutOfRange");
    std::istringstream blank("source,target\n");
    CHECK(err_name([&] { ingest::parse_concordance(blank, {}); }) == "EmptyMap");
}

TEST_CASE("near-unit weight pairs survive renormalization") {
    std::istringstream in("source,target,weight\nK,P,0.9996819\nK,Q,0.0003181\n");
    auto map = ingest::parse_concordance(in, {});
    CHECK(map.at("K")[0].weight == doctest::Approx(0.9996819).epsilon(1e-12));
    CHECK(map.at("K")[1].weight == doctest::Approx(0.0003181).epsilon(1e-12));
    double tot = map.at("K")[0].weight + map.at("K")[1].weight;
    CHECK(std::fabs(tot - 1.0) < 1e-9);
}

TEST_CASE("concordance application conserves value and respects sides") {
    std::istringstream cin("source,target,weight\nA,A1,0.25\nA,A2,0.75\nB,B1,1\nC,C1,1\n");
    auto map = ingest::parse_concordance(cin, {});
    std::vector<ingest::FlowEdge> edges = {{"A", "B", 8.0, 1}, {"B", "C", 3.0, 1}};

    auto both = ingest::apply_concordance(edges, map, ingest::ConcordanceSide::both);
    REQUIRE(both.size() == 3); // 2x1 + 1x1
    double total = 0.0;
    for (const auto& e : both) total += e.value;
    CHECK(total == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(both[0].source == "A1");
    CHECK(both[0].value == doctest::Approx(2.0));
    CHECK(both[1].source == "A2");
    CHECK(both[1].value == doctest::Approx(6.0));

    auto src_only = ingest::apply_concordance(edges, map, ingest::ConcordanceSide::source);
    CHECK(src_only[0].target == "B"); // untouched side keeps raw codes

    std::vector<ingest::FlowEdge> bad = {{"Z", "B", 1.0, 1}};
    CHECK(err_name([&] {
              ingest::apply_concordance(bad, map, ingest::ConcordanceSide::both);
          }) == "UnmappedCode");
    auto kept = ingest::apply_concordance(bad, map, ingest::ConcordanceSide::both,
                                          ingest::UnmappedPolicy::passthrough);
    CHECK(kept[0].source == "Z");
    CHECK(kept[0].value == 1.0);
}

TEST_CASE("event records parse code lists and reject bad rows") {
    std::istringstream in("id,year,codes,citations\nP1,1998,C1;C2,4\nP2,2001,C3,0\n");
    auto events = ingest::parse_events(in, {});
    REQUIRE(events.size() == 2);
    CHECK(events[0].codes == std::vector<std::string>{"C1", "C2"});
    CHECK(events[0].citations == 4.0);

    std::istringstream neg("id,year,codes,citations\nP1,1998,C1,-2\n");
    CHECK(err_name([&] { ingest::parse_events(neg, {}); }) == "NegativeValue");
    std::istringstream nocodes("id,year,codes,citations\nP1,1998,;,1\n");
    CHECK(err_name([&] { ingest::parse_events(nocodes, {}); }) == "EmptyCode");
}

TEST_CASE("prior windows cover the anchor and the preceding years") {
    std::vector<ingest::EventRecord> events = {
        {"P1", 1996, {"C1"}, 2.0},  // inside 1996..2000
        {"P2", 1995, {"C1"}, 9.0},  // outside every window
        {"P3", 2000, {"C1", "C2"}, 1.0},
    };
    ingest::WindowGrid grid;
    grid.anchors = {2000};
    grid.window_len = 5;
    auto table = ingest::window_events(events, grid);
    CHECK(table.assigned_records == 3);
    CHECK(table.unassigned_records == 1);
    auto s = table.stock.at({"C1", 2000});
    CHECK(s.weighted == doctest::Approx(3.0 + 2.0).epsilon(1e-12)); // (1+2) + (1+1)
    CHECK(s.unweighted == 2.0);
    CHECK(table.stock.at({"C2", 2000}).weighted == 2.0);
}

TEST_CASE("overlapping window grids are rejected") {
    ingest::WindowGrid grid;
    grid.anchors = {2000, 2004};
    grid.window_len = 5; // 1996..2000 and 2000..2004 share the year 2000
    CHECK(err_name([&] { ingest::window_events({}, grid); }) == "OverlappingWindows");
    grid.anchors = {2000, 2005};
    CHECK(ingest::window_events({}, grid).assigned_records == 0);
    grid.anchors = {};
    CHECK(err_name([&] { ingest::window_events({}, grid); }) == "EmptyWindowGrid");
}

TEST_CASE("windowed stocks push event weight through a concordance") {
    std::istringstream cin("source,target,weight\nC1,I1,0.25\nC1,I2,0.75\n");
    auto map = ingest::parse_concordance(cin, {});
    std::vector<ingest::EventRecord> events = {{"P1", 1999, {"C1"}, 3.0}};
    ingest::WindowGrid grid;
    grid.anchors = {2000};
    grid.window_len = 5;
    auto table = ingest::window_events(events, grid, &map);
    CHECK(table.stock.at({"I1", 2000}).weighted == doctest::Approx(0.25 * 4.0));
    CHECK(table.stock.at({"I2", 2000}).weighted == doctest::Approx(0.75 * 4.0));
    CHECK(table.stock.at({"I1", 2000}).unweighted == doctest::Approx(0.25));

    std::vector<ingest::EventRecord> unknown = {{"P2", 1999, {"C9"}, 0.0}};
    CHECK(err_name([&] { ingest::window_events(unknown, grid, &map); }) == "UnmappedCode");
    auto kept = ingest::window_events(unknown, grid, &map, ingest::UnmappedPolicy::passthrough);
    CHECK(kept.stock.at({"C9", 2000}).weighted == 1.0);
}

TEST_CASE("post windows run forward from the anchor") {
    std::vector<ingest::EventRecord> events = {{"P1", 2002, {"C1"}, 0.0}};
    ingest::WindowGrid grid;
    grid.anchors = {2000};
    grid.window_len = 3; // 2000..2002
    grid.timing = ingest::WindowTiming::post;
    auto table = ingest::window_events(events, grid);
    CHECK(table.stock.count({"C1", 2000}) == 1);
}

TEST_CASE("citation-weighted stocks accumulate weight times one plus citations") {
    auto s = ingest::citation_weighted_stock({{0.5, 3.0}, {1.0, 0.0}});
    CHECK(s.weighted == 0.5 * 4.0 + 1.0);
    CHECK(s.unweighted == 1.5);
}

TEST_CASE("aux panels read sparse numeric columns") {
    std::istringstream in("industry,period,emp,va\nA,1,10,\nA,2,11,200\nB,1,5,50\n");
    auto p = ingest::parse_aux_panel(in, {});
    CHECK(p.columns.at("emp").size() == 3);
    CHECK(p.columns.at("va").size() == 2); // empty cell skipped
    CHECK(p.columns.at("va").at({"A", 2}) == 200.0);

    std::istringstream dup("industry,period,emp\nA,1,10\nA,1,11\n");
    CHECK(err_name([&] { ingest::parse_aux_panel(dup, {}); }) == "DuplicateKey");
    std::istringstream novals("industry,period\nA,1\n");
    CHECK(err_name([&] { ingest::parse_aux_panel(novals, {}); }) == "MissingColumn");
}

TEST_CASE("deflation divides matched cells and flags gaps") {
    ingest::SeriesMap nominal = {{{"A", 1}, 100.0}, {{"A", 2}, 110.0}};
    ingest::SeriesMap deflator = {{{"A", 1}, 2.0}, {{"A", 2}, 2.2}};
    auto real = ingest::deflate(nominal, deflator);
    CHECK(real.at({"A", 1}) == 50.0);
    CHECK(real.at({"A", 2}) == doctest::Approx(50.0));

    deflator.erase({"A", 2});
    CHECK(err_name([&] { ingest::deflate(nominal, deflator); }) == "MissingDeflator");
    deflator[{"A", 2}] = 0.0;
    CHECK(err_name([&] { ingest::deflate(nominal, deflator); }) == "NonPositiveDeflator");
}

} // TEST_SUITE
