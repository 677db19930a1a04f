#include "ionet/kernels.hpp"

#include <cmath>

namespace ionet::kernels::scalar {

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void scale(double* y, const double* x, double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = c * x[i];
}

double l1_diff(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i] - y[i]);
    return s;
}

std::size_t count_ge(const double* x, double t, std::size_t n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] >= t) ++c;
    return c;
}

} // namespace ionet::kernels::scalar
