#include "doctest.h"

#include "ionet/errors.hpp"
#include "ionet/synthlab.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace ionet;

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

} // namespace

TEST_SUITE("synth") {

TEST_CASE("ar1 panels have the advertised shape and are seed-stable") {
    synth::DgpSpec d;
    d.n = 10;
    d.t_periods = 5;
    d.beta = {0.3};
    d.seed = 9;
    auto p = synth::gen_ar1_panel(d);
    CHECK(p.n_ind() == 10);
    CHECK(p.industries.front() == "S0001");
    CHECK(p.industries.back() == "S0010");
    CHECK(p.periods == std::vector<int>{1, 2, 3, 4, 5});
    for (auto a : p.active) CHECK(a == 1);
    REQUIRE(p.has_col("y"));
    REQUIRE(p.has_col("x1"));
    for (double v : p.col("y")) CHECK(std::isfinite(v));
    for (double v : p.col("x1")) CHECK(std::isfinite(v));

    auto q = synth::gen_ar1_panel(d);
    CHECK(q.col("y") == p.col("y"));
    CHECK(q.col("x1") == p.col("x1"));

    synth::DgpSpec d2 = d;
    d2.seed = 10;
    CHECK(synth::gen_ar1_panel(d2).col("y") != p.col("y"));

    synth::DgpSpec ma = d;
    ma.ma1 = 0.5;
    CHECK(synth::gen_ar1_panel(ma).col("y") != p.col("y"));

    synth::DgpSpec cold = d;
    cold.burn_in = 0;
    CHECK(synth::gen_ar1_panel(cold).col("y") != p.col("y"));
}

TEST_CASE("generator arguments are validated") {
    synth::DgpSpec d;
    d.n = 0;
    CHECK(err_name([&] { synth::gen_ar1_panel(d); }) == "BadValue");
    d.n = 5;
    d.burn_in = -1;
    CHECK(err_name([&] { synth::gen_ar1_panel(d); }) == "BadValue");

    synth::DuplexSpec s;
    s.n_nodes = 1;
    CHECK(err_name([&] { synth::gen_random_duplex(s); }) == "BadValue");
    s.n_nodes = 5;
    s.periods.clear();
    CHECK(err_name([&] { synth::gen_random_duplex(s); }) == "BadValue");
}

TEST_CASE("duplex draws are reproducible and clean") {
    synth::DuplexSpec s;
    s.n_nodes = 30;
    s.periods = {1990, 1991};
    s.seed = 4;
    auto a = synth::gen_random_duplex(s);
    auto b = synth::gen_random_duplex(s);
    REQUIRE(a.market.size() == b.market.size());
    REQUIRE(a.innovation.size() == b.innovation.size());
    CHECK(!a.market.empty());
    CHECK(!a.innovation.empty());
    for (std::size_t i = 0; i < a.market.size(); ++i) {
        CHECK(a.market[i].source == b.market[i].source);
        CHECK(a.market[i].target == b.market[i].target);
        CHECK(a.market[i].value == b.market[i].value);
        CHECK(a.market[i].period == b.market[i].period);
    }
    for (const auto& e : a.market) {
        CHECK(e.source != e.target);
        CHECK(e.value > 0.0);
        CHECK((e.period == 1990 || e.period == 1991));
    }
    for (const auto& e : a.innovation) CHECK(e.source != e.target);
}

TEST_CASE("dense pagerank oracle solves a two-node chain in closed form") {
    net::SquareMat adj(2);
    adj(0, 1) = 1.0; // node 1 dangling
    auto pr = synth::oracle_pagerank_dense(adj, 0.85);
    double p1 = 0.13875 / 0.21375;
    CHECK(std::abs(pr[1] - p1) <= 1e-12);
    CHECK(std::abs(pr[0] - (1.0 - p1)) <= 1e-12);
}

TEST_CASE("replication draws only depend on master seed and index") {
    synth::DgpSpec d;
    d.n = 40;
    d.t_periods = 6;
    d.rho = 0.6;
    synth::McEstimatorSpec bb;
    bb.name = "bb";
    bb.kind = synth::McEstimatorSpec::Kind::bb;

    auto small = synth::montecarlo(d, 5, 777, {bb});
    auto big = synth::montecarlo(d, 10, 777, {bb});
    REQUIRE(small.cells.size() == 1);
    REQUIRE(big.cells.size() == 1);
    CHECK(small.cells[0].name == "bb");
    REQUIRE(small.cells[0].rho_draws.size() == 5);
    REQUIRE(big.cells[0].rho_draws.size() == 10);
    for (int i = 0; i < 5; ++i)
        CHECK(small.cells[0].rho_draws[i] == big.cells[0].rho_draws[i]);
    CHECK(small.reps == 5);
    CHECK(small.master_seed == 777);
}

TEST_CASE("every estimator kind runs on the same replications") {
    synth::DgpSpec d;
    d.n = 80;
    d.t_periods = 6;
    d.rho = 0.5;
    std::vector<synth::McEstimatorSpec> ests(3);
    ests[0].name = "fe";
    ests[0].kind = synth::McEstimatorSpec::Kind::fe;
    ests[1].name = "ab";
    ests[1].kind = synth::McEstimatorSpec::Kind::ab;
    ests[2].name = "bb";
    ests[2].kind = synth::McEstimatorSpec::Kind::bb;
    auto R = synth::montecarlo(d, 3, 99, ests);
    REQUIRE(R.cells.size() == 3);
    for (const auto& c : R.cells) {
        CHECK(c.n_ok == 3);
        CHECK(c.n_err == 0);
        CHECK(std::isfinite(c.mean_rho));
        CHECK(std::isfinite(c.sd_rho));
    }
    // GMM cells carry diagnostic rejection shares; the within cell does not.
    CHECK(std::isfinite(R.cells[1].rej_ar1));
    CHECK(std::isnan(R.cells[0].rej_ar1));
}

TEST_CASE("estimator failures are tallied rather than fatal") {
    synth::DgpSpec d;
    d.n = 20;
    d.t_periods = 2; // too short for any difference design
    synth::McEstimatorSpec ab;
    ab.name = "ab";
    ab.kind = synth::McEstimatorSpec::Kind::ab;
    auto R = synth::montecarlo(d, 4, 5, {ab});
    CHECK(R.cells[0].n_ok == 0);
    CHECK(R.cells[0].n_err == 4);
    CHECK(std::isnan(R.cells[0].mean_rho));

    CHECK(err_name([&] { synth::montecarlo(d, 0, 5, {ab}); }) == "BadValue");
    CHECK(err_name([&] { synth::montecarlo(d, 4, 5, {}); }) == "BadValue");
}

} // TEST_SUITE
