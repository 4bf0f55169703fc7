#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bkmr/kernel.hpp"
#include "bkmr/rng.hpp"
#include "support/oracles.hpp"

using namespace bkmr;
using la::Matrix;
using la::Vector;

namespace {

// one-shot eigenvalue clipping via the Jacobi oracle
Matrix clip_oracle(const Matrix& s, double eps_floor) {
    const auto eig = oracle::jacobi_eig(s);
    const double lam_max = *std::max_element(eig.values.begin(), eig.values.end());
    const double floor = eps_floor * lam_max;
    const std::size_t n = s.rows();
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = std::max(eig.values[k], floor);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += lam * eig.vectors(k, i) * eig.vectors(k, j);
    }
    return out;
}

} // namespace

TEST_CASE("quadratic kernel on all-zero exposures is all ones") {
    const Matrix z(4, 3);
    const Matrix s = quadratic_kernel(z);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(s(i, j) == doctest::Approx(1.0));
}

TEST_CASE("quadratic kernel single column example") {
    Matrix z(2, 1);
    z(0, 0) = 1.0;
    z(1, 0) = 2.0;
    const Matrix s = quadratic_kernel(z);
    CHECK(s(0, 0) == doctest::Approx(4.0));
    CHECK(s(0, 1) == doctest::Approx(9.0));
    CHECK(s(1, 0) == doctest::Approx(9.0));
    CHECK(s(1, 1) == doctest::Approx(25.0));
}

TEST_CASE("identical exposure rows give identical kernel rows") {
    Rng rng(3);
    Matrix z = oracle::random_matrix(rng, 5, 3);
    for (std::size_t j = 0; j < 3; ++j) z(4, j) = z(1, j);
    const Matrix s = quadratic_kernel(z);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(s(4, j) == doctest::Approx(s(1, j)));
        CHECK(s(j, 4) == doctest::Approx(s(j, 1)));
    }
}

TEST_CASE("quadratic kernel is invariant under subject permutation") {
    Rng rng(4);
    const Matrix z = oracle::random_matrix(rng, 6, 2);
    const Matrix s = quadratic_kernel(z);
    const std::size_t perm[] = {3, 0, 5, 1, 4, 2};
    Matrix zp(6, 2);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 2; ++j) zp(i, j) = z(perm[i], j);
    const Matrix sp = quadratic_kernel(zp);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            CHECK(sp(i, j) == doctest::Approx(s(perm[i], perm[j])));
}

TEST_CASE("quadratic kernel rejects non-finite input") {
    Matrix z(2, 1);
    z(0, 0) = std::nan("");
    CHECK_THROWS_AS(quadratic_kernel(z), InputError);
}

TEST_CASE("nearest_pd keeps an already-PD matrix unchanged") {
    const Matrix s = Matrix::identity(3);
    const KernelMatrix k = nearest_pd(s, 1e-8);
    CHECK(la::frobenius_distance(k.k(), s) == doctest::Approx(0.0));
}

TEST_CASE("nearest_pd clips the indefinite 2x2 example") {
    Matrix s(2, 2);
    s(0, 0) = 1.0;
    s(0, 1) = 2.0;
    s(1, 0) = 2.0;
    s(1, 1) = 1.0; // eigenvalues 3 and -1
    const double eps = 1e-8;
    const KernelMatrix k = nearest_pd(s, eps);
    const Matrix want = clip_oracle(s, eps);
    CHECK(la::frobenius_distance(k.k(), want) < 1e-9);
    // structure: close to the rank-one [[1.5, 1.5], [1.5, 1.5]] plus the floor
    CHECK(k.k()(0, 0) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(k.k()(0, 1) == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("nearest_pd floors diag(1, -1) to diag(1, eps)") {
    Matrix s(2, 2);
    s(0, 0) = 1.0;
    s(1, 1) = -1.0;
    const KernelMatrix k = nearest_pd(s, 1e-8);
    CHECK(k.k()(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.k()(1, 1) == doctest::Approx(1e-8).epsilon(1e-6));
    CHECK(std::abs(k.k()(0, 1)) < 1e-15);
}

TEST_CASE("nearest_pd rejects asymmetry beyond tolerance") {
    Matrix s(2, 2);
    s(0, 0) = 1.0;
    s(1, 1) = 1.0;
    s(0, 1) = 0.5;
    s(1, 0) = 0.5 + 1e-3;
    CHECK_THROWS_AS(nearest_pd(s, 1e-8), InputError);
}

TEST_CASE("nearest_pd repair properties on random indefinite matrices") {
    Rng rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 2 + rng.uniform_below(15);
        Matrix s = oracle::random_matrix(rng, n, n);
        la::symmetrize(s);
        const double eps = 1e-8;
        const KernelMatrix k = nearest_pd(s, eps);

        // Cholesky pivots strictly positive by construction
        for (std::size_t i = 0; i < n; ++i) CHECK(k.chol_lower()(i, i) > 0.0);

        // K = L L^T within tolerance
        const Matrix llt =
            oracle::naive_matmul(k.chol_lower(), k.chol_lower().transposed());
        CHECK(la::frobenius_distance(llt, k.k()) <
              1e-10 * std::max(1.0, la::max_abs(k.k())) * n);

        // eigenvalues at or above the floor (checked with the Jacobi oracle)
        const auto eig = oracle::jacobi_eig(k.k());
        Matrix sym = s;
        la::symmetrize(sym);
        const auto eig_s = oracle::jacobi_eig(sym);
        const double lam_max = *std::max_element(eig_s.values.begin(), eig_s.values.end());
        const double floor = eps * std::max(lam_max, 0.0);
        for (double v : eig.values) CHECK(v >= floor - 1e-9 * std::max(1.0, std::abs(lam_max)));

        // at least as close as the one-shot clipping projection
        if (lam_max > 0.0) {
            const Matrix clipped = clip_oracle(sym, eps);
            CHECK(la::frobenius_distance(k.k(), sym) <=
                  la::frobenius_distance(clipped, sym) + 1e-9);
        }
    }
}

TEST_CASE("kernel_solve identities") {
    const KernelMatrix id = nearest_pd(Matrix::identity(3), 1e-8);
    const Vector b{1.0, -2.0, 3.0};
    const Vector x = kernel_solve(id, b);
    for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]));

    Matrix d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    const KernelMatrix kd = nearest_pd(d, 1e-8);
    const Vector got = kernel_solve(kd, Vector{2.0, 4.0});
    CHECK(got[0] == doctest::Approx(1.0));
    CHECK(got[1] == doctest::Approx(1.0));
}

TEST_CASE("kernel_solve recovers a known solution on random SPD systems") {
    Rng rng(33);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 2 + rng.uniform_below(48);
        const Matrix spd = oracle::random_spd(rng, n);
        const KernelMatrix k = nearest_pd(spd, 1e-12);
        const Vector x = oracle::random_vector(rng, n);
        const Vector b = oracle::naive_matvec(k.k(), x);
        const Vector got = kernel_solve(k, b);
        CHECK(oracle::max_rel_diff(got, x) < 1e-10);

        // matrix right-hand side round trip
        const Matrix bm = oracle::random_matrix(rng, n, 3);
        const Matrix xm = kernel_solve(k, bm);
        const Matrix back = oracle::naive_matmul(k.k(), xm);
        CHECK(la::frobenius_distance(back, bm) < 1e-8 * std::max(1.0, la::max_abs(bm)));
    }
}

TEST_CASE("kernel_solve rejects dimension mismatches") {
    const KernelMatrix id = nearest_pd(Matrix::identity(3), 1e-8);
    CHECK_THROWS_AS(kernel_solve(id, Vector{1.0, 2.0}), InputError);
    CHECK_THROWS_AS(kernel_solve(id, Matrix(2, 2)), InputError);
}

TEST_CASE("nearest_pd handles the realistic quadratic kernel scale") {
    // raw exposures at survey scale: huge spectral radius, rank-deficient
    Rng rng(35);
    Matrix z(30, 4);
    for (std::size_t i = 0; i < 30; ++i) {
        z(i, 0) = 190.0 * std::exp(0.3 * rng.normal());
        z(i, 1) = 0.45 * std::exp(rng.normal());
        z(i, 2) = 1.1 * std::exp(rng.normal());
        z(i, 3) = 1.2 * std::exp(rng.normal());
    }
    const Matrix s = quadratic_kernel(z);
    const KernelMatrix k = nearest_pd(s);
    const Vector x = oracle::random_vector(rng, 30);
    const Vector b = oracle::naive_matvec(k.k(), x);
    const Vector got = kernel_solve(k, b);
    CHECK(oracle::max_rel_diff(got, x) < 1e-6);
}
