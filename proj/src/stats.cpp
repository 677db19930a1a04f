#include "ionet/stats.hpp"

#include "ionet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ionet::stats {

double mean(const std::vector<double>& x) {
    if (x.empty()) throw numeric_error("TooFewObservations", "mean of empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_sd(const std::vector<double>& x) {
    if (x.size() < 2) throw numeric_error("TooFewObservations", "sd needs at least 2 values");
    double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile(std::vector<double> x, double p) {
    if (x.empty()) throw numeric_error("TooFewObservations", "quantile of empty sample");
    if (p < 0.0 || p > 1.0) throw numeric_error("DomainError", "quantile p outside [0,1]");
    std::sort(x.begin(), x.end());
    double h = (static_cast<double>(x.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= x.size()) return x.back();
    double frac = h - static_cast<double>(lo);
    return x[lo] + frac * (x[lo + 1] - x[lo]);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw numeric_error("TooFewObservations", "correlation needs two equal-length samples");
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nan("");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace ionet::stats
