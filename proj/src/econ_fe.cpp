#include "ionet/econ.hpp"

#include "ionet/errors.hpp"
#include "ionet/stats.hpp"
#include "dist.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>

namespace ionet::econ {

std::string significance_code(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    if (p < 0.1) return ".";
    return "";
}

EstimationResult fe_weighted(const panel::Panel& p, const FeSpec& spec, const FeOptions& opt) {
    const int K = static_cast<int>(spec.regressors.size());
    if (K == 0) throw config_error("BadValue", "no regressors");

    const auto& y_col = p.col(spec.dep);
    std::vector<const std::vector<double>*> x_cols;
    for (const auto& name : spec.regressors) x_cols.push_back(&p.col(name));
    const std::vector<double>* w_col = spec.weight_column.empty() ? nullptr
                                                                  : &p.col(spec.weight_column);

    // Complete-case rows.
    struct Row {
        int ind, per;
        double y, w;
    };
    std::vector<Row> rows;
    std::vector<std::vector<double>> X; // per row
    for (int i = 0; i < p.n_ind(); ++i)
        for (int t = 0; t < p.n_per(); ++t) {
            std::size_t r = p.idx(i, t);
            if (!p.active[r] || std::isnan(y_col[r])) continue;
            bool ok = true;
            for (const auto* xc : x_cols)
                if (std::isnan((*xc)[r])) ok = false;
            double w = 1.0;
            if (w_col) {
                w = (*w_col)[r];
                if (std::isnan(w)) ok = false;
            }
            if (!ok) continue;
            if (w_col && !(w > 0.0))
                throw data_error("NonPositiveWeight",
                                 p.industries[i] + "/" + std::to_string(p.periods[t]));
            rows.push_back({i, t, y_col[r], w});
            std::vector<double> xr(K);
            for (int k = 0; k < K; ++k) xr[k] = (*x_cols[k])[r];
            X.push_back(std::move(xr));
        }
    const long n = static_cast<long>(rows.size());
    if (n <= K + 1) throw numeric_error("TooFewObservations", std::to_string(n) + " usable rows");

    // Compact factor ids.
    std::map<int, int> ind_id, per_id;
    for (const auto& r : rows) {
        ind_id.emplace(r.ind, static_cast<int>(ind_id.size()));
        per_id.emplace(r.per, static_cast<int>(per_id.size()));
    }
    const int NI = static_cast<int>(ind_id.size());
    const int NT = static_cast<int>(per_id.size());

    // Weighted demeaning by industry then period, iterated to convergence;
    // all variables share the sweep so the transformation is identical.
    const int nv = K + 1;
    std::vector<std::vector<double>> v(nv, std::vector<double>(n));
    for (long r = 0; r < n; ++r) {
        v[0][r] = rows[r].y;
        for (int k = 0; k < K; ++k) v[k + 1][r] = X[r][k];
    }
    std::vector<double> wsum_i(NI, 0.0), wsum_t(NT, 0.0);
    for (long r = 0; r < n; ++r) {
        wsum_i[ind_id[rows[r].ind]] += rows[r].w;
        wsum_t[per_id[rows[r].per]] += rows[r].w;
    }
    std::vector<double> acc_i(NI), acc_t(NT);
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        double moved = 0.0;
        for (int j = 0; j < nv; ++j) {
            std::fill(acc_i.begin(), acc_i.end(), 0.0);
            for (long r = 0; r < n; ++r) acc_i[ind_id[rows[r].ind]] += rows[r].w * v[j][r];
            for (int g = 0; g < NI; ++g) {
                acc_i[g] /= wsum_i[g];
                moved = std::max(moved, std::fabs(acc_i[g]));
            }
            for (long r = 0; r < n; ++r) v[j][r] -= acc_i[ind_id[rows[r].ind]];

            std::fill(acc_t.begin(), acc_t.end(), 0.0);
            for (long r = 0; r < n; ++r) acc_t[per_id[rows[r].per]] += rows[r].w * v[j][r];
            for (int g = 0; g < NT; ++g) {
                acc_t[g] /= wsum_t[g];
                moved = std::max(moved, std::fabs(acc_t[g]));
            }
            for (long r = 0; r < n; ++r) v[j][r] -= acc_t[per_id[rows[r].per]];
        }
        if (moved < opt.tol) break;
    }
    if (it >= opt.max_iter)
        throw numeric_error("NonConvergence", "demeaning did not settle in " +
                                                  std::to_string(opt.max_iter) + " sweeps");

    // Weighted least squares on the transformed data.
    Eigen::MatrixXd Xt(n, K);
    Eigen::VectorXd yt(n), wv(n);
    for (long r = 0; r < n; ++r) {
        yt(r) = v[0][r];
        for (int k = 0; k < K; ++k) Xt(r, k) = v[k + 1][r];
        wv(r) = rows[r].w;
    }
    Eigen::MatrixXd Xw = wv.cwiseSqrt().asDiagonal() * Xt;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
    qr.setThreshold(1e-10);
    if (qr.rank() < K)
        throw numeric_error("RankDeficient", "design rank " + std::to_string(qr.rank()) +
                                                 " < " + std::to_string(K));
    Eigen::MatrixXd B = Xt.transpose() * wv.asDiagonal() * Xt;
    Eigen::VectorXd b = Xt.transpose() * wv.asDiagonal() * yt;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(B);
    Eigen::VectorXd beta = ldlt.solve(b);
    Eigen::VectorXd resid = yt - Xt * beta;

    // Cluster-robust covariance: industry + period - their intersection. The
    // intersection clusters are single rows on this grid.
    Eigen::MatrixXd Binv = ldlt.solve(Eigen::MatrixXd::Identity(K, K));
    auto cluster_meat = [&](const std::vector<int>& id, int ng) {
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(ng, K);
        for (long r = 0; r < n; ++r)
            S.row(id[r]) += (rows[r].w * resid(r)) * Xt.row(r);
        return Eigen::MatrixXd(S.transpose() * S);
    };
    std::vector<int> rid_i(n), rid_t(n);
    for (long r = 0; r < n; ++r) {
        rid_i[r] = ind_id[rows[r].ind];
        rid_t[r] = per_id[rows[r].per];
    }
    Eigen::MatrixXd meat = cluster_meat(rid_i, NI);
    if (opt.two_way_cluster) {
        meat += cluster_meat(rid_t, NT);
        Eigen::MatrixXd cell = Eigen::MatrixXd::Zero(K, K);
        for (long r = 0; r < n; ++r) {
            Eigen::VectorXd g = rows[r].w * resid(r) * Xt.row(r).transpose();
            cell += g * g.transpose();
        }
        meat -= cell;
    }
    Eigen::MatrixXd V = Binv * meat * Binv;

    EstimationResult res;
    res.estimator = "fe_weighted";
    res.n_obs = n;
    res.n_groups = NI;
    res.n_instruments = 0;
    for (int k = 0; k < K; ++k) {
        CoefRow c;
        c.name = spec.regressors[k];
        c.coef = beta(k);
        c.se = std::sqrt(std::max(0.0, V(k, k)));
        c.z = c.se > 0.0 ? c.coef / c.se : std::nan("");
        c.p = std::isnan(c.z) ? std::nan("") : dist::two_sided_p(c.z);
        c.sig = std::isnan(c.p) ? "" : significance_code(c.p);
        res.coefs.push_back(std::move(c));
    }

    // Fitted values absorb the fixed effects exactly: the within residual is
    // the full-model residual at the optimum.
    std::vector<double> fitted(n), observed(n);
    for (long r = 0; r < n; ++r) {
        fitted[r] = rows[r].y - resid(r);
        observed[r] = rows[r].y;
    }
    double rho = stats::pearson(fitted, observed);
    res.r2 = std::isnan(rho) ? std::nan("") : rho * rho;
    res.ar1.z = res.ar2.z = std::nan("");
    res.ar1.p = res.ar2.p = std::nan("");
    res.ar1.order = 1;
    res.ar2.order = 2;
    res.sargan.stat = std::nan("");
    res.sargan.p = std::nan("");
    return res;
}

} // namespace ionet::econ
