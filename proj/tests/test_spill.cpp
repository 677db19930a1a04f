#include "doctest.h"

#include "ionet/errors.hpp"
#include "ionet/rng.hpp"
#include "ionet/spill.hpp"
#include "oracles.hpp"

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

net::Index num_index(int n) {
    std::vector<std::string> codes;
    for (int i = 0; i < n; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "N%03d", i);
        codes.emplace_back(buf);
    }
    return net::Index::from_codes(codes);
}

// Random unit-sum partner rows in the given direction: up rows or dw columns.
net::ShareMatrix random_shares(int n, net::Direction dir, std::uint64_t seed, double density = 0.4) {
    Rng r(seed);
    net::SquareMat w(n);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j)
            if (i != j && r.bernoulli(density)) {
                double v = r.exponential(1.0);
                w(i, j) = v;
                sum += v;
            }
        if (sum > 0.0)
            for (int j = 0; j < n; ++j) w(i, j) /= sum;
    }
    if (dir == net::Direction::dw) w = w.transposed(); // unit columns
    net::ShareMatrix sm;
    sm.layer = net::Layer::market;
    sm.period = 1;
    sm.dir = dir;
    sm.index = num_index(n);
    sm.w = std::move(w);
    return sm;
}

net::NodeSizes sizes_for(const net::Index& idx, std::uint64_t seed) {
    Rng r(seed);
    net::NodeSizes s;
    s.layer = net::Layer::market;
    s.period = 1;
    s.index = idx;
    for (int i = 0; i < idx.size(); ++i) s.a.push_back(r.exponential(50.0));
    return s;
}

} // namespace

TEST_SUITE("spill") {

TEST_CASE("theta must lie in the half open unit interval") {
    net::ShareMatrix sm = random_shares(4, net::Direction::up, 1);
    CHECK(err_name([&] { spill::threshold_links(sm, 0.0); }) == "ThetaOutOfRange");
    CHECK(err_name([&] { spill::threshold_links(sm, -0.1); }) == "ThetaOutOfRange");
    CHECK(err_name([&] { spill::threshold_links(sm, 1.0001); }) == "ThetaOutOfRange");
    CHECK_NOTHROW(spill::threshold_links(sm, 1.0));
    CHECK_NOTHROW(spill::threshold_links(sm, 1e-9));
}

TEST_CASE("thresholding keeps shares at or above theta and zeroes the diagonal") {
    net::SquareMat w(3);
    w(0, 1) = 0.6;
    w(0, 2) = 0.4;
    w(1, 0) = 1.0;
    w(2, 0) = 0.2;
    w(2, 1) = 0.8;
    net::ShareMatrix sm;
    sm.dir = net::Direction::up;
    sm.index = num_index(3);
    sm.w = w;

    auto lm = spill::threshold_links(sm, 0.5);
    CHECK(lm.theta == 0.5);
    CHECK(lm.l(0, 1) == 1.0);
    CHECK(lm.l(0, 2) == 0.0);
    CHECK(lm.l(1, 0) == 1.0);
    CHECK(lm.l(2, 1) == 1.0);
    CHECK(lm.l(2, 0) == 0.0);

    // The boundary share counts.
    auto lb = spill::threshold_links(sm, 0.4);
    CHECK(lb.l(0, 2) == 1.0);

    // Diagonal mass never becomes a link.
    net::ShareMatrix sd = sm;
    sd.w(1, 1) = 0.9;
    auto ld = spill::threshold_links(sd, 0.5);
    for (int i = 0; i < 3; ++i) CHECK(ld.l(i, i) == 0.0);
}

TEST_CASE("unit partner rows admit at most floor(1/theta) links per row") {
    const double theta = 0.05;
    for (auto dir : {net::Direction::up, net::Direction::dw}) {
        for (std::uint64_t seed : {2u, 3u, 4u}) {
            net::ShareMatrix sm = random_shares(30, dir, seed, 0.8);
            auto lm = spill::threshold_links(sm, theta);
            for (int i = 0; i < 30; ++i) {
                int cnt = 0;
                for (int j = 0; j < 30; ++j)
                    if (lm.l(i, j) != 0.0) ++cnt;
                CHECK(cnt <= 20);
            }
        }
    }
}

TEST_CASE("spillover accumulates linked partner sizes") {
    net::SquareMat w(3);
    w(0, 1) = 0.6;
    w(0, 2) = 0.4;
    w(1, 0) = 1.0;
    w(2, 0) = 0.2;
    w(2, 1) = 0.8;
    net::ShareMatrix sm;
    sm.dir = net::Direction::up;
    sm.index = num_index(3);
    sm.w = w;
    net::NodeSizes sz;
    sz.index = sm.index;
    sz.a = {10.0, 20.0, 30.0};

    auto lm = spill::threshold_links(sm, 0.5);
    auto sp = spill::spillover(lm, sz);
    CHECK(sp == std::vector<double>{20.0, 10.0, 20.0});

    auto wide = spill::spillover(spill::threshold_links(sm, 0.4), sz);
    CHECK(wide == std::vector<double>{50.0, 10.0, 20.0});
}

TEST_CASE("spillover equals the dense oracle bitwise") {
    for (std::uint64_t seed : {5u, 6u, 7u}) {
        net::ShareMatrix sm = random_shares(25, net::Direction::up, seed);
        net::NodeSizes sz = sizes_for(sm.index, seed + 100);
        for (double theta : {0.02, 0.05, 0.2}) {
            auto lm = spill::threshold_links(sm, theta);
            auto got = spill::spillover(lm, sz);
            auto ref = oracle::naive_spillover(lm.l, sz.a);
            REQUIRE(got.size() == ref.size());
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == ref[i]);
        }
    }
}

TEST_CASE("spillover is monotone in theta") {
    net::ShareMatrix sm = random_shares(20, net::Direction::up, 8, 0.7);
    net::NodeSizes sz = sizes_for(sm.index, 55);
    auto lo = spill::spillover(spill::threshold_links(sm, 0.03), sz);
    auto mid = spill::spillover(spill::threshold_links(sm, 0.1), sz);
    auto hi = spill::spillover(spill::threshold_links(sm, 0.3), sz);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        CHECK(lo[i] >= mid[i]);
        CHECK(mid[i] >= hi[i]);
    }
}

TEST_CASE("spillover is linear in the size vector") {
    net::ShareMatrix sm = random_shares(18, net::Direction::dw, 9, 0.6);
    net::NodeSizes sz = sizes_for(sm.index, 66);
    auto lm = spill::threshold_links(sm, 0.05);
    auto base = spill::spillover(lm, sz);

    net::NodeSizes doubled = sz;
    for (double& v : doubled.a) v *= 2.0;
    auto twice = spill::spillover(lm, doubled);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(twice[i] == 2.0 * base[i]);

    net::NodeSizes scaled = sz;
    for (double& v : scaled.a) v *= 1.7;
    auto sc = spill::spillover(lm, scaled);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(std::abs(sc[i] - 1.7 * base[i]) <= 1e-12 * (1.0 + std::abs(base[i])));
}

TEST_CASE("spillover rejects a mismatched size index") {
    net::ShareMatrix sm = random_shares(5, net::Direction::up, 10);
    auto lm = spill::threshold_links(sm, 0.1);
    net::NodeSizes bad;
    bad.index = num_index(6);
    bad.a.assign(6, 1.0);
    CHECK(err_name([&] { spill::spillover(lm, bad); }) == "IndexMismatch");
    CHECK(err_name([&] { spill::spillover_weighted(sm, bad); }) == "IndexMismatch");
}

TEST_CASE("weighted spillover contracts partner shares against sizes") {
    net::ShareMatrix sm = random_shares(15, net::Direction::up, 11, 0.5);
    net::NodeSizes sz = sizes_for(sm.index, 77);
    auto got = spill::spillover_weighted(sm, sz);
    net::SquareMat p = net::partner_rows(sm);
    for (int i = 0; i < 15; ++i) {
        double want = 0.0;
        for (int j = 14; j >= 0; --j)
            if (j != i) want += p(i, j) * sz.a[j];
        CHECK(std::abs(got[i] - want) <= 1e-12 * (1.0 + std::abs(want)));
    }

    // A full-weight row recovers the plain sum of partner sizes.
    net::SquareMat w(3);
    w(0, 1) = 0.5;
    w(0, 2) = 0.5;
    net::ShareMatrix tiny;
    tiny.dir = net::Direction::up;
    tiny.index = num_index(3);
    tiny.w = w;
    net::NodeSizes ts;
    ts.index = tiny.index;
    ts.a = {4.0, 6.0, 10.0};
    auto tw = spill::spillover_weighted(tiny, ts);
    CHECK(std::abs(tw[0] - 8.0) <= 1e-15);
    CHECK(tw[1] == 0.0);
    CHECK(tw[2] == 0.0);
}

} // TEST_SUITE
