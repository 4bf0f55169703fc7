#pragma once

#include <cstddef>

// Low-level vector kernels behind the dense linear algebra layer.
//
// Every kernel has a scalar reference implementation plus optional SIMD
// variants (AVX2+FMA on x86-64, NEON on aarch64) selected once at runtime.
// The environment variable BKMR_VI_SIMD=scalar|avx2|neon|auto overrides the
// automatic choice; unavailable requests fall back to scalar.

namespace bkmr::la::simd {

struct Kernels {
    const char* name;

    // sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y[i] += a0*x0[i] + a1*x1[i] + a2*x2[i] + a3*x3[i]
    void (*axpy4)(const double* a, const double* x0, const double* x1,
                  const double* x2, const double* x3, double* y, std::size_t n);
    // x[i] *= a
    void (*scal)(double a, double* x, std::size_t n);
    // plane rotation: (x[i], y[i]) <- (c*x[i] + s*y[i], c*y[i] - s*x[i])
    void (*rot)(double* x, double* y, double c, double s, std::size_t n);
    // sum_i x[i]^2
    double (*sumsq)(const double* x, std::size_t n);
};

const Kernels& scalar_kernels();

// nullptr when the variant is not compiled in or the CPU lacks support.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// The table used by the linear algebra layer. Resolved on first use.
const Kernels& active();

// Force a specific table ("scalar", "avx2", "neon", "auto"). Returns false
// and leaves the selection unchanged if the variant is unavailable.
bool select(const char* name);

} // namespace bkmr::la::simd
