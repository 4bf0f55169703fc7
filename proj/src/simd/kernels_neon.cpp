// NEON variants (2-lane double vectors) for aarch64.

#include "bkmr/simd.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace bkmr::la::simd {

namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    for (; i + 2 <= n; i += 2)
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    double sum = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void axpy4_neon(const double* a, const double* x0, const double* x1,
                const double* x2, const double* x3, double* y, std::size_t n) {
    const float64x2_t a0 = vdupq_n_f64(a[0]);
    const float64x2_t a1 = vdupq_n_f64(a[1]);
    const float64x2_t a2 = vdupq_n_f64(a[2]);
    const float64x2_t a3 = vdupq_n_f64(a[3]);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t acc = vld1q_f64(y + i);
        acc = vfmaq_f64(acc, a0, vld1q_f64(x0 + i));
        acc = vfmaq_f64(acc, a1, vld1q_f64(x1 + i));
        acc = vfmaq_f64(acc, a2, vld1q_f64(x2 + i));
        acc = vfmaq_f64(acc, a3, vld1q_f64(x3 + i));
        vst1q_f64(y + i, acc);
    }
    for (; i < n; ++i)
        y[i] += a[0] * x0[i] + a[1] * x1[i] + a[2] * x2[i] + a[3] * x3[i];
}

void scal_neon(double a, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void rot_neon(double* x, double* y, double c, double s, std::size_t n) {
    const float64x2_t vc = vdupq_n_f64(c);
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t xi = vld1q_f64(x + i);
        const float64x2_t yi = vld1q_f64(y + i);
        vst1q_f64(x + i, vfmaq_f64(vmulq_f64(vs, yi), vc, xi));
        vst1q_f64(y + i, vfmsq_f64(vmulq_f64(vc, yi), vs, xi));
    }
    for (; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi + s * yi;
        y[i] = c * yi - s * xi;
    }
}

double sumsq_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(x + i);
        acc = vfmaq_f64(acc, v, v);
    }
    double sum = vaddvq_f64(acc);
    for (; i < n; ++i) sum += x[i] * x[i];
    return sum;
}

} // namespace

const Kernels* neon_kernels() {
    static const Kernels table = {
        "neon", dot_neon, axpy_neon, axpy4_neon, scal_neon, rot_neon, sumsq_neon,
    };
    return &table;
}

} // namespace bkmr::la::simd

#else

namespace bkmr::la::simd {
const Kernels* neon_kernels() { return nullptr; }
} // namespace bkmr::la::simd

#endif
