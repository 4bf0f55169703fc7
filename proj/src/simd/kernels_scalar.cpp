#include "bkmr/simd.hpp"

namespace bkmr::la::simd {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc0 += x[i] * y[i];
        acc1 += x[i + 1] * y[i + 1];
    }
    if (i < n) acc0 += x[i] * y[i];
    return acc0 + acc1;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy4_scalar(const double* a, const double* x0, const double* x1,
                  const double* x2, const double* x3, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a[0] * x0[i] + a[1] * x1[i] + a[2] * x2[i] + a[3] * x3[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi + s * yi;
        y[i] = c * yi - s * xi;
    }
}

double sumsq_scalar(const double* x, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc0 += x[i] * x[i];
        acc1 += x[i + 1] * x[i + 1];
    }
    if (i < n) acc0 += x[i] * x[i];
    return acc0 + acc1;
}

} // namespace

const Kernels& scalar_kernels() {
    static const Kernels table = {
        "scalar",    dot_scalar, axpy_scalar, axpy4_scalar,
        scal_scalar, rot_scalar, sumsq_scalar,
    };
    return table;
}

} // namespace bkmr::la::simd
