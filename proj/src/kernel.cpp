#include "bkmr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bkmr/simd.hpp"

namespace bkmr {

la::Matrix quadratic_kernel(const la::Matrix& exposures) {
    const std::size_t n = exposures.rows();
    const std::size_t m = exposures.cols();
    if (n < 2 || m < 1)
        throw InputError("quadratic_kernel: need at least 2 subjects and 1 exposure column");
    if (!la::all_finite(exposures))
        throw InputError("quadratic_kernel: exposure matrix has non-finite entries");

    const auto& kr = la::simd::active();
    la::Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double g = 1.0 + kr.dot(exposures.row(i), exposures.row(j), m);
            const double v = g * g;
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

KernelMatrix nearest_pd(const la::Matrix& s, double eps_floor) {
    if (!s.square() || s.rows() == 0) throw InputError("nearest_pd: matrix must be square");
    if (!(eps_floor > 0.0)) throw InputError("nearest_pd: eps_floor must be positive");
    if (!la::all_finite(s)) throw InputError("nearest_pd: matrix has non-finite entries");

    const double scale = std::max(1.0, la::max_abs(s));
    if (la::max_asymmetry(s) > 1e-8 * scale)
        throw InputError("nearest_pd: matrix is asymmetric beyond 1e-8 relative tolerance");

    la::Matrix sym = s;
    la::symmetrize(sym);

    la::SymEig eig = la::sym_eig(sym);
    const double lam_max = *std::max_element(eig.values.begin(), eig.values.end());
    const double lam_min = *std::min_element(eig.values.begin(), eig.values.end());
    const double floor_base = lam_max > 0.0 ? lam_max : std::max(-lam_min, 1.0);
    const double floor = eps_floor * floor_base;

    if (lam_min >= floor) {
        // already satisfies the floor: keep the symmetrized input bit-for-bit
        try {
            la::Cholesky chol(sym);
            return KernelMatrix(std::move(sym), std::move(chol), eps_floor);
        } catch (const la::NotPositiveDefinite&) {
            // marginal case; fall through to the clipped reconstruction
        }
    }

    la::Matrix scaled_vecs = eig.vectors;
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        const double lam = std::max(eig.values[i], floor);
        la::simd::active().scal(lam, scaled_vecs.row(i), scaled_vecs.cols());
    }
    la::Matrix repaired = la::matmul_tn(scaled_vecs, eig.vectors);
    la::symmetrize(repaired);

    try {
        la::Cholesky chol(repaired);
        return KernelMatrix(std::move(repaired), std::move(chol), eps_floor);
    } catch (const la::NotPositiveDefinite&) {
        throw InternalError("nearest_pd: repaired matrix failed Cholesky factorization");
    }
}

la::Vector kernel_solve(const KernelMatrix& k, const la::Vector& b) {
    if (b.size() != k.n())
        throw InputError("kernel_solve: vector length " + std::to_string(b.size()) +
                         " does not match kernel dimension " + std::to_string(k.n()));
    return k.chol_.solve(b);
}

la::Matrix kernel_solve(const KernelMatrix& k, const la::Matrix& b) {
    if (b.rows() != k.n())
        throw InputError("kernel_solve: matrix has " + std::to_string(b.rows()) +
                         " rows but kernel dimension is " + std::to_string(k.n()));
    return k.chol_.solve(b);
}

} // namespace bkmr
