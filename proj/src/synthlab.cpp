#include "ionet/synthlab.hpp"

#include "ionet/errors.hpp"
#include "ionet/rng.hpp"
#include "ionet/stats.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>

namespace ionet::synth {

namespace {

std::string padded(const char* prefix, int i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, i);
    return buf;
}

} // namespace

panel::Panel gen_ar1_panel(const DgpSpec& spec) {
    if (spec.n < 1 || spec.t_periods < 1)
        throw config_error("BadValue", "panel dimensions must be positive");
    if (spec.burn_in < 0) throw config_error("BadValue", "burn_in must be >= 0");
    const int N = spec.n, T = spec.t_periods;
    const int Kx = static_cast<int>(spec.beta.size());

    panel::Panel p;
    for (int i = 1; i <= N; ++i) p.industries.push_back(padded("S", i, 4));
    for (int t = 1; t <= T; ++t) p.periods.push_back(t);
    p.active.assign(p.n_rows(), 1);
    p.cols["y"].assign(p.n_rows(), 0.0);
    std::vector<std::vector<double>*> xs;
    for (int k = 1; k <= Kx; ++k) {
        auto& c = p.cols["x" + std::to_string(k)];
        c.assign(p.n_rows(), 0.0);
        xs.push_back(&c);
    }
    auto& yc = p.cols["y"];

    Rng rng(spec.seed);
    std::vector<double> x(Kx);
    for (int i = 0; i < N; ++i) {
        double alpha = rng.normal(0.0, spec.fe_sd);
        double y = 0.0, eps_prev = 0.0;
        auto step = [&](double& yv) {
            for (int k = 0; k < Kx; ++k) x[k] = rng.normal(0.0, spec.x_sd);
            double eps = rng.normal(0.0, spec.noise_sd);
            double shock = eps + spec.ma1 * eps_prev;
            eps_prev = eps;
            double mean_part = alpha;
            for (int k = 0; k < Kx; ++k) mean_part += spec.beta[k] * x[k];
            yv = spec.rho * yv + mean_part + shock;
        };
        if (spec.burn_in == 0)
            y = rng.normal(0.0, spec.y0_sd);
        else
            for (int b = 0; b < spec.burn_in; ++b) step(y);
        for (int t = 0; t < T; ++t) {
            step(y);
            std::size_t r = p.idx(i, t);
            yc[r] = y;
            for (int k = 0; k < Kx; ++k) (*xs[k])[r] = x[k];
        }
    }
    return p;
}

DuplexDraw gen_random_duplex(const DuplexSpec& spec) {
    if (spec.n_nodes < 2) throw config_error("BadValue", "need at least two nodes");
    if (spec.periods.empty()) throw config_error("BadValue", "no periods given");
    DuplexDraw out;
    Rng rng(spec.seed);
    std::vector<std::string> codes;
    for (int i = 1; i <= spec.n_nodes; ++i) codes.push_back(padded("N", i, 4));
    for (int period : spec.periods) {
        for (int i = 0; i < spec.n_nodes; ++i)
            for (int j = 0; j < spec.n_nodes; ++j) {
                if (i == j) continue;
                if (rng.bernoulli(spec.p_market))
                    out.market.push_back(
                        {codes[i], codes[j], rng.exponential(spec.w_mean_market), period});
            }
        for (int i = 0; i < spec.n_nodes; ++i)
            for (int j = 0; j < spec.n_nodes; ++j) {
                if (i == j) continue;
                if (rng.bernoulli(spec.p_innov))
                    out.innovation.push_back(
                        {codes[i], codes[j], rng.exponential(spec.w_mean_innov), period});
            }
    }
    return out;
}

std::vector<double> oracle_pagerank_dense(const net::SquareMat& adj, double damping) {
    const int N = static_cast<int>(adj.n);
    if (N == 0) throw data_error("DegenerateGraph", "empty adjacency");
    Eigen::MatrixXd M(N, N);
    for (int s = 0; s < N; ++s) {
        double outsum = 0.0;
        for (int t = 0; t < N; ++t) outsum += adj(s, t);
        if (outsum > 0.0)
            for (int t = 0; t < N; ++t) M(t, s) = adj(s, t) / outsum;
        else
            for (int t = 0; t < N; ++t) M(t, s) = 1.0 / N;
    }
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(N, N) - damping * M;
    Eigen::VectorXd rhs = Eigen::VectorXd::Constant(N, (1.0 - damping) / N);
    Eigen::VectorXd x = lhs.partialPivLu().solve(rhs);
    double total = x.sum();
    std::vector<double> pr(N);
    for (int t = 0; t < N; ++t) pr[t] = x(t) / total;
    return pr;
}

McResult montecarlo(const DgpSpec& dgp, int reps, std::uint64_t master_seed,
                    const std::vector<McEstimatorSpec>& estimators) {
    if (reps < 1) throw config_error("BadValue", "reps must be positive");
    if (estimators.empty()) throw config_error("BadValue", "no estimators given");
    McResult R;
    R.reps = reps;
    R.master_seed = master_seed;
    for (const auto& est : estimators) {
        McCell c;
        c.name = est.name;
        R.cells.push_back(std::move(c));
    }
    const int Kx = static_cast<int>(dgp.beta.size());
    std::vector<std::string> xnames;
    for (int k = 1; k <= Kx; ++k) xnames.push_back("x" + std::to_string(k));
    bool need_lag = false;
    for (const auto& est : estimators)
        if (est.kind == McEstimatorSpec::Kind::fe) need_lag = true;

    struct Tally {
        long ar1_n = 0, ar1_rej = 0;
        long ar2_n = 0, ar2_rej = 0;
        long sar_n = 0, sar_rej = 0;
    };
    std::vector<Tally> tallies(estimators.size());

    for (int rep = 0; rep < reps; ++rep) {
        DgpSpec d = dgp;
        d.seed = splitmix64(master_seed + static_cast<std::uint64_t>(rep));
        panel::Panel pan = gen_ar1_panel(d);
        if (need_lag) panel::lag_col(pan, "y", 1, "y_l1");

        for (std::size_t e = 0; e < estimators.size(); ++e) {
            const auto& est = estimators[e];
            auto& cell = R.cells[e];
            auto& tl = tallies[e];
            try {
                econ::EstimationResult r;
                if (est.kind == McEstimatorSpec::Kind::fe) {
                    econ::FeSpec fs;
                    fs.dep = "y";
                    fs.regressors.push_back("y_l1");
                    for (const auto& xn : xnames) fs.regressors.push_back(xn);
                    r = econ::fe_weighted(pan, fs, est.fe);
                } else {
                    econ::GmmSpec gs;
                    gs.dep = "y";
                    gs.exog = xnames;
                    r = est.kind == McEstimatorSpec::Kind::ab ? econ::ab_gmm(pan, gs, est.gmm)
                                                              : econ::bb_gmm(pan, gs, est.gmm);
                }
                cell.rho_draws.push_back(r.coefs.at(0).coef);
                ++cell.n_ok;
                if (est.kind != McEstimatorSpec::Kind::fe) {
                    if (std::isfinite(r.ar1.p)) {
                        ++tl.ar1_n;
                        if (r.ar1.p < 0.05) ++tl.ar1_rej;
                    }
                    if (std::isfinite(r.ar2.p)) {
                        ++tl.ar2_n;
                        if (r.ar2.p < 0.05) ++tl.ar2_rej;
                    }
                    if (std::isfinite(r.sargan.p)) {
                        ++tl.sar_n;
                        if (r.sargan.p < 0.05) ++tl.sar_rej;
                    }
                }
            } catch (const error&) {
                ++cell.n_err;
            }
        }
    }

    for (std::size_t e = 0; e < R.cells.size(); ++e) {
        auto& cell = R.cells[e];
        const auto& tl = tallies[e];
        cell.mean_rho = cell.rho_draws.empty() ? std::nan("") : stats::mean(cell.rho_draws);
        cell.sd_rho =
            cell.rho_draws.size() > 1 ? stats::sample_sd(cell.rho_draws) : std::nan("");
        cell.rej_ar1 = tl.ar1_n ? static_cast<double>(tl.ar1_rej) / tl.ar1_n : std::nan("");
        cell.rej_ar2 = tl.ar2_n ? static_cast<double>(tl.ar2_rej) / tl.ar2_n : std::nan("");
        cell.rej_sargan = tl.sar_n ? static_cast<double>(tl.sar_rej) / tl.sar_n : std::nan("");
    }
    return R;
}

} // namespace ionet::synth
