#include "ionet/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace ionet::kernels::neon {

double sum(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void scale(double* y, const double* x, double c, std::size_t n) {
    float64x2_t vc = vdupq_n_f64(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(vc, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = c * x[i];
}

double l1_diff(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vaddq_f64(acc, vabsq_f64(vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i))));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += std::fabs(x[i] - y[i]);
    return s;
}

std::size_t count_ge(const double* x, double t, std::size_t n) {
    const float64x2_t vt = vdupq_n_f64(t);
    std::size_t c = 0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        uint64x2_t cmp = vcgeq_f64(vld1q_f64(x + i), vt);
        c += (vgetq_lane_u64(cmp, 0) & 1u) + (vgetq_lane_u64(cmp, 1) & 1u);
    }
    for (; i < n; ++i)
        if (x[i] >= t) ++c;
    return c;
}

} // namespace ionet::kernels::neon

#endif
