#pragma once

#include "ionet/panel.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ionet::econ {

struct CoefRow {
    std::string name;
    double coef = 0.0;
    double se = 0.0;
    double z = 0.0;
    double p = 1.0;
    std::string sig;
};

struct ArTest {
    int order = 0;
    double z = 0.0;
    double p = 1.0;
};

struct SarganTest {
    double stat = 0.0;
    int df = 0;
    double p = 1.0;
};

// Estimation internals kept for post-fit diagnostics; plain containers so the
// linear-algebra backend stays an implementation detail.
struct GmmDetail;

struct EstimationResult {
    std::string estimator;
    std::vector<CoefRow> coefs;
    long n_obs = 0;       // usable estimation rows (both blocks for system fits)
    int n_groups = 0;
    int n_instruments = 0;
    double r2 = 0.0;      // squared correlation of fitted and observed
    ArTest ar1, ar2;      // z NaN when the order is not computable
    SarganTest sargan;    // df 0 when just identified
    int weighting_rank = -1; // rank actually used when the weighting target was singular
    std::shared_ptr<const GmmDetail> detail;
};

// Two-sided significance marker: *** below 0.001, ** below 0.01, * below
// 0.05, . below 0.1 (strict comparisons), empty otherwise.
std::string significance_code(double p);

// ---- weighted two-way fixed effects ----------------------------------------

struct FeSpec {
    std::string dep;
    std::vector<std::string> regressors;
    std::string weight_column; // empty: unit weights
};

struct FeOptions {
    double tol = 1e-10; // alternating demeaning convergence
    int max_iter = 10000;
    bool two_way_cluster = true; // industry + period - intersection; else by industry
};

// Minimizes sum w (y - x'b - fe_industry - fe_period)^2 by iterated weighted
// demeaning, then weighted least squares on the transformed data.
EstimationResult fe_weighted(const panel::Panel& p, const FeSpec& spec, const FeOptions& opt = {});

// ---- dynamic panel GMM -----------------------------------------------------

struct GmmSpec {
    std::string dep;                  // the first lag enters as a regressor internally
    std::vector<std::string> exog;    // further regressors, instrumenting themselves
};

struct GmmOptions {
    int max_lag = 0;      // dependent-lag instrument depth; 0 = all available
    bool collapse = false;
    int steps = 0;        // 0 = estimator default (difference 2, system 1)
    bool time_dummies = true;
    bool robust = true;   // sandwich covariance; classical available on one-step fits
    std::vector<std::string> extra_iv; // extra instrument columns (levels; differenced
                                       // for the difference block)
};

// First-difference GMM: differenced equation instrumented by lagged levels of
// the dependent variable plus self-instrumenting differenced regressors.
EstimationResult ab_gmm(const panel::Panel& p, const GmmSpec& spec, const GmmOptions& opt = {});

// System GMM: difference block as above stacked with the levels equation,
// which is instrumented by the lagged first difference of the dependent
// variable; period dummies are estimated jointly with the coefficients.
EstimationResult bb_gmm(const panel::Panel& p, const GmmSpec& spec, const GmmOptions& opt = {});

// Serial-correlation z test of given order on difference-block residuals,
// with the estimation-uncertainty variance correction.
ArTest ar_test(const EstimationResult& r, int order);

// Overidentification J statistic against the empirical moment covariance;
// chi2 with (instruments - parameters) degrees of freedom.
SarganTest sargan_test(const EstimationResult& r);

// Dependent-variable instrument columns in the difference block for an
// n_periods-long panel (0 max_lag = all available depths).
long count_dep_instruments(int n_periods, int max_lag, bool collapse);

} // namespace ionet::econ
