#include "ionet/econ.hpp"

#include "ionet/errors.hpp"
#include "ionet/stats.hpp"
#include "dist.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace ionet::econ {

// Estimation internals preserved for post-fit diagnostics. Rows are stacked
// per group with the difference block first (grid positions 2..T-1), then,
// for system fits, the levels block over the same positions. Unusable rows
// are zeroed across y, X and Z, which removes them from every moment sum.
struct GmmDetail {
    int K = 0;
    int q = 0;
    int T = 0;
    int m = 0; // rows per block (T - 2)
    bool system = false;
    std::vector<std::string> coef_names;
    std::vector<Eigen::MatrixXd> Z;
    std::vector<Eigen::MatrixXd> X;
    std::vector<Eigen::VectorXd> y;
    std::vector<Eigen::VectorXd> u;
    std::vector<std::vector<uint8_t>> usable;
    Eigen::MatrixXd A;       // final weighting
    Eigen::MatrixXd V;       // coefficient covariance
    Eigen::MatrixXd ginv_sa; // K x q: (S'AS)^-1 S'A
    Eigen::VectorXd beta;
};

long count_dep_instruments(int n_periods, int max_lag, bool collapse) {
    if (n_periods < 3) return 0;
    if (collapse) {
        long full = n_periods - 2;
        return max_lag == 0 ? full : std::min<long>(full, max_lag);
    }
    long total = 0;
    for (int t = 3; t <= n_periods; ++t) {
        long avail = t - 2;
        total += max_lag == 0 ? avail : std::min<long>(avail, max_lag);
    }
    return total;
}

namespace {

bool finite(double v) { return std::isfinite(v); }

// Symmetric PSD pseudo-inverse; rank counted against a relative eigenvalue
// cutoff.
Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& W, int& rank) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
    const auto& ev = es.eigenvalues();
    double emax = 0.0;
    for (int i = 0; i < ev.size(); ++i) emax = std::max(emax, std::fabs(ev(i)));
    double tol = emax * 1e-12;
    rank = 0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (int i = 0; i < ev.size(); ++i)
        if (ev(i) > tol && ev(i) > 0.0) {
            inv(i) = 1.0 / ev(i);
            ++rank;
        }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

struct Extracted {
    int T = 0;
    int Kx = 0;
    int n_iv = 0;
    std::vector<std::string> groups;
    std::vector<std::vector<double>> y;               // [g][t]
    std::vector<std::vector<std::vector<double>>> x;  // [g][k][t]
    std::vector<std::vector<std::vector<double>>> iv; // [g][j][t]
};

Extracted extract(const panel::Panel& p, const GmmSpec& spec, const GmmOptions& opt) {
    Extracted e;
    e.T = p.n_per();
    e.Kx = static_cast<int>(spec.exog.size());
    e.n_iv = static_cast<int>(opt.extra_iv.size());
    const auto& yc = p.col(spec.dep);
    std::vector<const std::vector<double>*> xc, ivc;
    for (const auto& name : spec.exog) xc.push_back(&p.col(name));
    for (const auto& name : opt.extra_iv) ivc.push_back(&p.col(name));

    for (int i = 0; i < p.n_ind(); ++i) {
        e.groups.push_back(p.industries[i]);
        std::vector<double> gy(e.T);
        for (int t = 0; t < e.T; ++t) {
            std::size_t r = p.idx(i, t);
            gy[t] = p.active[r] ? yc[r] : std::nan("");
        }
        e.y.push_back(std::move(gy));
        std::vector<std::vector<double>> gx;
        for (const auto* c : xc) {
            std::vector<double> col(e.T);
            for (int t = 0; t < e.T; ++t) {
                std::size_t r = p.idx(i, t);
                col[t] = p.active[r] ? (*c)[r] : std::nan("");
            }
            gx.push_back(std::move(col));
        }
        e.x.push_back(std::move(gx));
        std::vector<std::vector<double>> gi;
        for (const auto* c : ivc) {
            std::vector<double> col(e.T);
            for (int t = 0; t < e.T; ++t) {
                std::size_t r = p.idx(i, t);
                col[t] = p.active[r] ? (*c)[r] : std::nan("");
            }
            gi.push_back(std::move(col));
        }
        e.iv.push_back(std::move(gi));
    }
    return e;
}

EstimationResult run_gmm(const panel::Panel& p, const GmmSpec& spec, const GmmOptions& opt_in,
                         bool system) {
    GmmOptions opt = opt_in;
    if (opt.steps == 0) opt.steps = system ? 1 : 2;
    if (opt.steps != 1 && opt.steps != 2)
        throw config_error("BadValue", "steps must be 1 or 2");
    if (opt.max_lag < 0) throw config_error("BadValue", "max_lag must be >= 0");

    Extracted e = extract(p, spec, opt);
    const int T = e.T;
    if (T < 3) throw data_error("TooFewPeriods", "dynamic panel needs >= 3 periods");
    const int m = T - 2;
    const int G = static_cast<int>(e.groups.size());

    // Instrument layout.
    const int n_dep_diff = static_cast<int>(count_dep_instruments(T, opt.max_lag, opt.collapse));
    const int n_dep_lev = system ? (opt.collapse ? 1 : m) : 0;
    const int n_self = e.Kx + e.n_iv;
    const int n_dum = opt.time_dummies ? m : 0;
    const int q = n_dep_diff + n_dep_lev + n_self + n_dum;
    const int K = 1 + e.Kx + n_dum;
    if (q < K) throw numeric_error("Underidentified",
                                   std::to_string(q) + " instruments for " + std::to_string(K) +
                                       " parameters");

    // Depth cap for dependent-lag instruments at diff row grid position t:
    // depths 2..1+min(t-1, max_lag), all available when max_lag is 0.
    auto depth_hi = [&](int t) {
        int avail = t; // y[t-depth] exists for depth <= t
        return opt.max_lag == 0 ? avail : std::min(avail, opt.max_lag + 1);
    };
    // Column start of the per-row block in the uncollapsed layout.
    std::vector<int> row_block_start(m, 0);
    if (!opt.collapse) {
        int acc = 0;
        for (int r = 0; r < m; ++r) {
            row_block_start[r] = acc;
            int t = r + 2;
            acc += std::max(0, depth_hi(t) - 1);
        }
    }

    const int rows = system ? 2 * m : m;
    GmmDetail det;
    det.K = K;
    det.q = q;
    det.T = T;
    det.m = m;
    det.system = system;
    det.coef_names.push_back(spec.dep + "_lag1");
    for (const auto& name : spec.exog) det.coef_names.push_back(name);
    for (int s = 0; s < n_dum; ++s)
        det.coef_names.push_back("period_" + std::to_string(p.periods[s + 2]));

    Eigen::MatrixXd W1 = Eigen::MatrixXd::Zero(q, q);
    Eigen::MatrixXd Szx = Eigen::MatrixXd::Zero(q, K);
    Eigen::VectorXd szy = Eigen::VectorXd::Zero(q);
    long n_obs = 0;
    int n_groups = 0;

    for (int g = 0; g < G; ++g) {
        const auto& y = e.y[g];
        Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(rows, q);
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(rows, K);
        Eigen::VectorXd yy = Eigen::VectorXd::Zero(rows);
        std::vector<uint8_t> usable(rows, 0);

        for (int r = 0; r < m; ++r) {
            int t = r + 2;
            // Difference equation at t: needs y at t, t-1, t-2 and x at t, t-1.
            bool ok = finite(y[t]) && finite(y[t - 1]) && finite(y[t - 2]);
            for (int k = 0; k < e.Kx && ok; ++k)
                ok = finite(e.x[g][k][t]) && finite(e.x[g][k][t - 1]);
            if (!ok) continue;
            usable[r] = 1;
            yy(r) = y[t] - y[t - 1];
            X(r, 0) = y[t - 1] - y[t - 2];
            for (int k = 0; k < e.Kx; ++k) X(r, 1 + k) = e.x[g][k][t] - e.x[g][k][t - 1];
            for (int s = 0; s < n_dum; ++s) {
                double d = (t == s + 2 ? 1.0 : 0.0) - (t - 1 == s + 2 ? 1.0 : 0.0);
                X(r, 1 + e.Kx + s) = d;
            }
            // Dependent-lag instruments in levels.
            int hi = depth_hi(t);
            for (int depth = 2; depth <= hi; ++depth) {
                double v = y[t - depth];
                if (!finite(v)) continue;
                int col = opt.collapse ? (depth - 2) : (row_block_start[r] + depth - 2);
                Z(r, col) = v;
            }
            // Self-instrumenting differenced regressors and extra columns.
            for (int k = 0; k < e.Kx; ++k)
                Z(r, n_dep_diff + n_dep_lev + k) = e.x[g][k][t] - e.x[g][k][t - 1];
            for (int j = 0; j < e.n_iv; ++j) {
                double a = e.iv[g][j][t], b = e.iv[g][j][t - 1];
                if (finite(a) && finite(b)) Z(r, n_dep_diff + n_dep_lev + e.Kx + j) = a - b;
            }
            for (int s = 0; s < n_dum; ++s)
                Z(r, n_dep_diff + n_dep_lev + n_self + s) = X(r, 1 + e.Kx + s);
        }

        if (system)
            for (int r = 0; r < m; ++r) {
                int t = r + 2;
                int rr = m + r;
                bool ok = finite(y[t]) && finite(y[t - 1]);
                for (int k = 0; k < e.Kx && ok; ++k) ok = finite(e.x[g][k][t]);
                if (!ok) continue;
                usable[rr] = 1;
                yy(rr) = y[t];
                X(rr, 0) = y[t - 1];
                for (int k = 0; k < e.Kx; ++k) X(rr, 1 + k) = e.x[g][k][t];
                for (int s = 0; s < n_dum; ++s) X(rr, 1 + e.Kx + s) = t == s + 2 ? 1.0 : 0.0;
                // Lagged difference of the dependent variable.
                if (finite(y[t - 1]) && finite(y[t - 2])) {
                    double dv = y[t - 1] - y[t - 2];
                    Z(rr, n_dep_diff + (opt.collapse ? 0 : r)) = dv;
                }
                for (int k = 0; k < e.Kx; ++k)
                    Z(rr, n_dep_diff + n_dep_lev + k) = e.x[g][k][t];
                for (int j = 0; j < e.n_iv; ++j)
                    if (finite(e.iv[g][j][t]))
                        Z(rr, n_dep_diff + n_dep_lev + e.Kx + j) = e.iv[g][j][t];
                for (int s = 0; s < n_dum; ++s)
                    Z(rr, n_dep_diff + n_dep_lev + n_self + s) = X(rr, 1 + e.Kx + s);
            }

        bool any = false;
        for (int r = 0; r < rows; ++r)
            if (usable[r]) {
                ++n_obs;
                any = true;
            }
        if (any) ++n_groups;

        // One-step weighting: differencing covariance on the difference
        // block, identity on the levels block, masked to usable rows.
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(rows, rows);
        for (int r = 0; r < m; ++r) {
            H(r, r) = 2.0;
            if (r + 1 < m) {
                H(r, r + 1) = -1.0;
                H(r + 1, r) = -1.0;
            }
        }
        for (int r = m; r < rows; ++r) H(r, r) = 1.0;
        for (int r = 0; r < rows; ++r)
            if (!usable[r]) {
                H.row(r).setZero();
                H.col(r).setZero();
            }

        W1 += Z.transpose() * H * Z;
        Szx += Z.transpose() * X;
        szy += Z.transpose() * yy;

        det.Z.push_back(std::move(Z));
        det.X.push_back(std::move(X));
        det.y.push_back(std::move(yy));
        det.usable.push_back(std::move(usable));
    }

    if (n_obs <= K) throw numeric_error("TooFewObservations",
                                        std::to_string(n_obs) + " usable rows for " +
                                            std::to_string(K) + " parameters");

    int rank1 = 0;
    Eigen::MatrixXd A1 = pinv_psd(W1, rank1);

    auto solve_beta = [&](const Eigen::MatrixXd& A) {
        Eigen::MatrixXd Gm = Szx.transpose() * A * Szx;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Gm);
        qr.setThreshold(1e-10);
        if (qr.rank() < K)
            throw numeric_error("RankDeficient", "moment cross-product rank " +
                                                     std::to_string(qr.rank()) + " < " +
                                                     std::to_string(K));
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Gm);
        Eigen::VectorXd beta = ldlt.solve(Szx.transpose() * A * szy);
        Eigen::MatrixXd Ginv = ldlt.solve(Eigen::MatrixXd::Identity(K, K));
        return std::pair<Eigen::VectorXd, Eigen::MatrixXd>(beta, Ginv);
    };

    auto residuals = [&](const Eigen::VectorXd& beta) {
        std::vector<Eigen::VectorXd> u;
        u.reserve(det.Z.size());
        for (std::size_t g = 0; g < det.Z.size(); ++g)
            u.push_back(det.y[g] - det.X[g] * beta);
        return u;
    };
    auto omega = [&](const std::vector<Eigen::VectorXd>& u) {
        Eigen::MatrixXd O = Eigen::MatrixXd::Zero(q, q);
        for (std::size_t g = 0; g < det.Z.size(); ++g) {
            Eigen::VectorXd zu = det.Z[g].transpose() * u[g];
            O += zu * zu.transpose();
        }
        return O;
    };

    auto [beta1, Ginv1] = solve_beta(A1);
    std::vector<Eigen::VectorXd> u1 = residuals(beta1);

    Eigen::VectorXd beta;
    Eigen::MatrixXd A, Ginv;
    std::vector<Eigen::VectorXd> u;
    int wrank = rank1;
    if (opt.steps == 2) {
        Eigen::MatrixXd O1 = omega(u1);
        int rank2 = 0;
        Eigen::MatrixXd A2 = pinv_psd(O1, rank2);
        auto [b2, Gi2] = solve_beta(A2);
        beta = b2;
        Ginv = Gi2;
        A = A2;
        u = residuals(beta);
        wrank = rank2;
    } else {
        beta = beta1;
        Ginv = Ginv1;
        A = A1;
        u = std::move(u1);
    }

    Eigen::MatrixXd V;
    if (opt.robust) {
        Eigen::MatrixXd O = omega(u);
        Eigen::MatrixXd bread = Ginv * Szx.transpose() * A;
        V = bread * O * bread.transpose();
    } else if (opt.steps == 1) {
        // Homoskedastic one-step variance; the error scale comes from the
        // block whose residuals have a clean interpretation.
        double rss = 0.0;
        long cnt = 0;
        for (std::size_t g = 0; g < det.Z.size(); ++g)
            for (int r = 0; r < rows; ++r)
                if (det.usable[g][r]) {
                    bool diff_row = r < m;
                    if (system ? !diff_row : diff_row) {
                        rss += u[g](r) * u[g](r);
                        ++cnt;
                    }
                }
        double scale = system ? 1.0 : 2.0; // differenced errors double the variance
        double s2 = rss / (scale * static_cast<double>(cnt - K));
        V = s2 * Ginv;
    } else {
        V = Ginv;
    }

    det.A = A;
    det.V = V;
    det.beta = beta;
    det.ginv_sa = Ginv * Szx.transpose() * A;
    det.u = std::move(u);

    EstimationResult res;
    res.estimator = system ? "bb_system_gmm" : "ab_diff_gmm";
    res.n_obs = n_obs;
    res.n_groups = n_groups;
    res.n_instruments = q;
    res.weighting_rank = wrank;
    for (int k = 0; k < K; ++k) {
        CoefRow c;
        c.name = det.coef_names[k];
        c.coef = beta(k);
        c.se = std::sqrt(std::max(0.0, V(k, k)));
        c.z = c.se > 0.0 ? c.coef / c.se : std::nan("");
        c.p = std::isnan(c.z) ? std::nan("") : dist::two_sided_p(c.z);
        c.sig = std::isnan(c.p) ? "" : significance_code(c.p);
        res.coefs.push_back(std::move(c));
    }

    // Fit quality on the block matching the estimator's target equation.
    {
        std::vector<double> fit, obs;
        for (std::size_t g = 0; g < det.Z.size(); ++g)
            for (int r = system ? m : 0; r < rows; ++r)
                if (det.usable[g][r]) {
                    fit.push_back(det.X[g].row(r) * beta);
                    obs.push_back(det.y[g](r));
                }
        double rho = fit.size() > 1 ? stats::pearson(fit, obs) : std::nan("");
        res.r2 = std::isnan(rho) ? std::nan("") : rho * rho;
    }

    res.detail = std::make_shared<const GmmDetail>(std::move(det));
    for (int order : {1, 2}) {
        ArTest at;
        at.order = order;
        try {
            at = ar_test(res, order);
        } catch (const error&) {
            at.z = std::nan("");
            at.p = std::nan("");
        }
        (order == 1 ? res.ar1 : res.ar2) = at;
    }
    res.sargan.df = q - K;
    try {
        res.sargan = sargan_test(res);
    } catch (const error&) {
        res.sargan.stat = std::nan("");
        res.sargan.p = std::nan("");
    }
    return res;
}

} // namespace

EstimationResult ab_gmm(const panel::Panel& p, const GmmSpec& spec, const GmmOptions& opt) {
    return run_gmm(p, spec, opt, false);
}

EstimationResult bb_gmm(const panel::Panel& p, const GmmSpec& spec, const GmmOptions& opt) {
    return run_gmm(p, spec, opt, true);
}

ArTest ar_test(const EstimationResult& r, int order) {
    if (!r.detail) throw config_error("BadValue", "result carries no estimation detail");
    const GmmDetail& d = *r.detail;
    if (order < 1) throw config_error("BadValue", "order must be >= 1");
    if (order >= d.m)
        throw numeric_error("TooFewPeriodsForOrder",
                            "order " + std::to_string(order) + " with " + std::to_string(d.m) +
                                " difference rows");

    const int rows = d.system ? 2 * d.m : d.m;
    double d0 = 0.0, t1 = 0.0;
    Eigen::RowVectorXd wX = Eigen::RowVectorXd::Zero(d.K);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(d.q);
    long overlap = 0;
    for (std::size_t g = 0; g < d.Z.size(); ++g) {
        // Residuals lagged `order` positions within the difference block.
        Eigen::VectorXd w = Eigen::VectorXd::Zero(rows);
        for (int rr = order; rr < d.m; ++rr)
            if (d.usable[g][rr] && d.usable[g][rr - order]) {
                w(rr) = d.u[g](rr - order);
                ++overlap;
            }
        double wu = w.dot(d.u[g]);
        d0 += wu;
        t1 += wu * wu;
        wX += w.transpose() * d.X[g];
        h += (d.Z[g].transpose() * d.u[g]) * wu;
    }
    if (overlap == 0)
        throw numeric_error("TooFewPeriodsForOrder", "no overlapping residual pairs");

    double t2 = (wX * (d.ginv_sa * h))(0);
    double t3 = (wX * d.V * wX.transpose())(0);
    double var = t1 - 2.0 * t2 + t3;
    if (!(var > 0.0)) throw numeric_error("DegenerateVariance", "test variance not positive");

    ArTest at;
    at.order = order;
    at.z = d0 / std::sqrt(var);
    at.p = dist::two_sided_p(at.z);
    return at;
}

SarganTest sargan_test(const EstimationResult& r) {
    if (!r.detail) throw config_error("BadValue", "result carries no estimation detail");
    const GmmDetail& d = *r.detail;
    int df = d.q - d.K;
    if (df <= 0) throw numeric_error("JustIdentified", "no overidentifying restrictions");

    Eigen::VectorXd s = Eigen::VectorXd::Zero(d.q);
    Eigen::MatrixXd O = Eigen::MatrixXd::Zero(d.q, d.q);
    for (std::size_t g = 0; g < d.Z.size(); ++g) {
        Eigen::VectorXd zu = d.Z[g].transpose() * d.u[g];
        s += zu;
        O += zu * zu.transpose();
    }
    int rank = 0;
    Eigen::MatrixXd Oinv = pinv_psd(O, rank);
    SarganTest t;
    t.stat = s.dot(Oinv * s);
    t.df = df;
    t.p = dist::chi2_sf(t.stat, df);
    return t;
}

} // namespace ionet::econ
