#include "ionet/kernels.hpp"

#include "ionet/errors.hpp"

namespace ionet::kernels {

namespace {

struct Vtable {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    void (*scale)(double*, const double*, double, std::size_t);
    double (*l1_diff)(const double*, const double*, std::size_t);
    std::size_t (*count_ge)(const double*, double, std::size_t);
};

constexpr Vtable kScalar{scalar::sum, scalar::dot, scalar::scale, scalar::l1_diff,
                         scalar::count_ge};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Vtable kAvx2{avx2::sum, avx2::dot, avx2::scale, avx2::l1_diff, avx2::count_ge};
#endif
#if defined(__aarch64__)
constexpr Vtable kNeon{neon::sum, neon::dot, neon::scale, neon::l1_diff, neon::count_ge};
#endif

Backend detect() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
    return Backend::scalar;
#elif defined(__aarch64__)
    return Backend::neon;
#else
    return Backend::scalar;
#endif
}

const Vtable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar: return &kScalar;
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2: return &kAvx2;
#endif
#if defined(__aarch64__)
        case Backend::neon: return &kNeon;
#endif
        default: return nullptr;
    }
}

struct State {
    Backend detected = detect();
    Backend active = detected;
    const Vtable* vt = table_for(detected);
};

State& state() {
    static State s;
    return s;
}

} // namespace

Backend active_backend() { return state().active; }
Backend detected_backend() { return state().detected; }

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

void force_backend(Backend b) {
    const Vtable* vt = table_for(b);
    if (vt == nullptr || (b != Backend::scalar && b != state().detected))
        throw config_error("UnsupportedBackend",
                           "backend " + backend_name(b) + " not available on this host");
    state().active = b;
    state().vt = vt;
}

double sum(const double* x, std::size_t n) { return state().vt->sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return state().vt->dot(x, y, n); }
void scale(double* y, const double* x, double c, std::size_t n) { state().vt->scale(y, x, c, n); }
double l1_diff(const double* x, const double* y, std::size_t n) {
    return state().vt->l1_diff(x, y, n);
}
std::size_t count_ge(const double* x, double t, std::size_t n) {
    return state().vt->count_ge(x, t, n);
}

double sum_ordered(const double* x, std::size_t n) { return scalar::sum(x, n); }
double dot_ordered(const double* x, const double* y, std::size_t n) {
    return scalar::dot(x, y, n);
}

} // namespace ionet::kernels
