#pragma once

#include "bkmr/linalg.hpp"

// Exposure-profile kernel: the parameter-free inhomogeneous quadratic kernel
// K(z, z') = (1 + z.z')^2, repaired to a numerically positive definite matrix
// by eigenvalue clipping against a relative floor.

namespace bkmr {

// Positive definite kernel matrix with its lower Cholesky factor.
// Immutable after construction; safe to share across threads.
class KernelMatrix {
public:
    const la::Matrix& k() const { return k_; }
    const la::Matrix& chol_lower() const { return chol_.lower(); }
    double eps_floor() const { return eps_floor_; }
    std::size_t n() const { return k_.rows(); }
    double log_det() const { return chol_.log_det(); }

    friend KernelMatrix nearest_pd(const la::Matrix&, double);
    friend la::Vector kernel_solve(const KernelMatrix&, const la::Vector&);
    friend la::Matrix kernel_solve(const KernelMatrix&, const la::Matrix&);

private:
    KernelMatrix(la::Matrix k, la::Cholesky chol, double eps_floor)
        : k_(std::move(k)), chol_(std::move(chol)), eps_floor_(eps_floor) {}

    la::Matrix k_;
    la::Cholesky chol_;
    double eps_floor_;
};

// S_ij = (1 + z_i . z_j)^2 over the rows of the exposure matrix.
// Throws InputError on non-finite entries or fewer than 2 rows.
la::Matrix quadratic_kernel(const la::Matrix& exposures);

// Nearest positive definite repair: symmetrize (rejecting asymmetry beyond
// 1e-8 relative), clip eigenvalues below eps_floor * lambda_max(S) up to the
// floor, and factor. A matrix already satisfying the floor passes through
// unchanged. When lambda_max(S) <= 0 the floor falls back to
// eps_floor * max(spectral radius, 1) so the result is still factorizable.
KernelMatrix nearest_pd(const la::Matrix& s, double eps_floor = 1e-8);

// X with K X = B via two triangular solves against the stored factor;
// K^{-1} is never formed.
la::Vector kernel_solve(const KernelMatrix& k, const la::Vector& b);
la::Matrix kernel_solve(const KernelMatrix& k, const la::Matrix& b);

} // namespace bkmr
