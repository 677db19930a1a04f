#pragma once

#include "ionet/errors.hpp"

#include <cmath>

// Tail probabilities used by the estimator diagnostics. chi2_sf is the
// regularized upper incomplete gamma Q(df/2, x/2), evaluated by series for
// small x and by Lentz continued fraction otherwise.

namespace ionet::econ::dist {

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

inline double two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

inline double chi2_sf(double x, int df) {
    if (df < 1) throw numeric_error("DomainError", "chi2 needs df >= 1");
    if (!(x >= 0.0)) {
        if (std::isnan(x)) return std::nan("");
        return 1.0;
    }
    if (x == 0.0) return 1.0;
    double a = 0.5 * df;
    double half = 0.5 * x;
    if (half < a + 1.0) return 1.0 - detail::gamma_p_series(a, half);
    return detail::gamma_q_cf(a, half);
}

} // namespace ionet::econ::dist
