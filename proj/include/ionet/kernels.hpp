#pragma once

#include <cstddef>
#include <string>

// Small dense primitives used by the network-side numerics. Each operation has
// a scalar reference implementation and, where the host CPU supports it, a
// vectorized variant; the active variant is chosen once at load time and can be
// overridden for testing. SIMD variants may reassociate sums, so callers that
// need a fixed accumulation order (bitwise-reproducible against a naive loop)
// must use the *_ordered entry points, which always run the scalar code.

namespace ionet::kernels {

enum class Backend { scalar, avx2, neon };

// Active backend for the dispatched entry points below.
Backend active_backend();
std::string backend_name(Backend b);

// Force a specific backend (scalar is always available; forcing an
// unsupported SIMD backend throws). Passing the detected backend restores
// normal operation.
void force_backend(Backend b);
Backend detected_backend();

// ---- dispatched primitives -------------------------------------------------

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
// y[i] = c * x[i]
void scale(double* y, const double* x, double c, std::size_t n);
// sum_i |x[i] - y[i]|
double l1_diff(const double* x, const double* y, std::size_t n);
// #{i : x[i] >= t}
std::size_t count_ge(const double* x, double t, std::size_t n);

// ---- fixed-order scalar entry points ---------------------------------------

// Left-to-right accumulation, one rounding per add. Identical operation
// sequence to a plain indexed loop, so results match a naive reference
// bit for bit.
double sum_ordered(const double* x, std::size_t n);
double dot_ordered(const double* x, const double* y, std::size_t n);

namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void scale(double* y, const double* x, double c, std::size_t n);
double l1_diff(const double* x, const double* y, std::size_t n);
std::size_t count_ge(const double* x, double t, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void scale(double* y, const double* x, double c, std::size_t n);
double l1_diff(const double* x, const double* y, std::size_t n);
std::size_t count_ge(const double* x, double t, std::size_t n);
} // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void scale(double* y, const double* x, double c, std::size_t n);
double l1_diff(const double* x, const double* y, std::size_t n);
std::size_t count_ge(const double* x, double t, std::size_t n);
} // namespace neon
#endif

} // namespace ionet::kernels
