#pragma once

#include <vector>

namespace ionet::stats {

double mean(const std::vector<double>& x);

// Sample standard deviation (n - 1 denominator).
double sample_sd(const std::vector<double>& x);

// Quantile with linear interpolation between order statistics: for p in
// [0, 1], h = (n - 1) p, q = x(floor h) + (h - floor h) (x(floor h + 1) -
// x(floor h)) on the sorted sample. Matches the common statistical software
// default.
double quantile(std::vector<double> x, double p);

// Pearson correlation; NaN when either side has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

} // namespace ionet::stats
