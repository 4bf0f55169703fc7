#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bkmr/linalg.hpp"
#include "bkmr/rng.hpp"
#include "support/oracles.hpp"

using namespace bkmr;
using la::Matrix;
using la::Vector;

TEST_CASE("matmul and matvec match naive oracles") {
    Rng rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix a = oracle::random_matrix(rng, 9, 5);
        const Matrix b = oracle::random_matrix(rng, 5, 11);
        const Matrix c = la::matmul(a, b);
        const Matrix want = oracle::naive_matmul(a, b);
        CHECK(la::frobenius_distance(c, want) < 1e-12);

        const Vector x = oracle::random_vector(rng, 5);
        const Vector y = la::matvec(a, x);
        const Vector wanty = oracle::naive_matvec(a, x);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(wanty[i]));

        const Matrix ata = la::matmul_tn(a, a);
        const Matrix wanted = oracle::naive_matmul(a.transposed(), a);
        CHECK(la::frobenius_distance(ata, wanted) < 1e-12);
    }
}

TEST_CASE("cholesky factors and solves SPD systems") {
    Rng rng(11);
    for (int rep = 0; rep < 8; ++rep) {
        const std::size_t n = 2 + rng.uniform_below(20);
        const Matrix a = oracle::random_spd(rng, n);
        la::Cholesky chol(a);

        // L L^T reproduces A
        const Matrix l = chol.lower();
        const Matrix llt = oracle::naive_matmul(l, l.transposed());
        CHECK(la::frobenius_distance(llt, a) < 1e-9 * std::max(1.0, la::max_abs(a)));

        // solve against a known x
        const Vector x = oracle::random_vector(rng, n);
        const Vector b = oracle::naive_matvec(a, x);
        const Vector got = chol.solve(b);
        CHECK(oracle::max_rel_diff(got, x) < 1e-9);

        // matrix solve + inverse
        const Matrix inv = chol.inverse();
        const Matrix should_be_i = oracle::naive_matmul(a, inv);
        CHECK(la::frobenius_distance(should_be_i, Matrix::identity(n)) < 1e-8);

        // log det vs Gauss-Jordan-free oracle: product of Jacobi eigenvalues
        const auto eig = oracle::jacobi_eig(a);
        double want_logdet = 0.0;
        for (double v : eig.values) want_logdet += std::log(v);
        CHECK(chol.log_det() == doctest::Approx(want_logdet).epsilon(1e-9));
    }
}

TEST_CASE("cholesky rejects indefinite matrices") {
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = 2.0;
    m(1, 0) = 2.0;
    m(1, 1) = 1.0;
    CHECK_THROWS_AS(la::Cholesky{m}, la::NotPositiveDefinite);
}

TEST_CASE("sym_eig reconstructs the matrix and matches the Jacobi oracle") {
    Rng rng(13);
    for (int rep = 0; rep < 8; ++rep) {
        const std::size_t n = 2 + rng.uniform_below(24);
        Matrix a = oracle::random_matrix(rng, n, n);
        la::symmetrize(a);

        const la::SymEig eig = la::sym_eig(a);
        REQUIRE(eig.values.size() == n);

        // reconstruction: sum_k lambda_k v_k v_k^T
        Matrix recon(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    recon(i, j) += eig.values[k] * eig.vectors(k, i) * eig.vectors(k, j);
        CHECK(la::frobenius_distance(recon, a) < 1e-10 * std::max(1.0, la::max_abs(a)) * n);

        // orthonormal rows
        for (std::size_t k = 0; k < n; ++k) {
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm += eig.vectors(k, i) * eig.vectors(k, i);
            CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
        }

        // same spectrum as the Jacobi oracle
        auto got = eig.values;
        auto want = oracle::jacobi_eig(a).values;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        for (std::size_t i = 0; i < n; ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-8));
    }
}

TEST_CASE("sym_eig handles huge dynamic range") {
    // rank-1 dominant direction plus a tiny one, like a quadratic kernel
    Matrix a(3, 3);
    const double big = 1e12;
    a(0, 0) = big + 1.0;
    a(0, 1) = big;
    a(1, 0) = big;
    a(1, 1) = big + 1.0;
    a(2, 2) = 1e-6;
    const la::SymEig eig = la::sym_eig(a);
    auto vals = eig.values;
    std::sort(vals.begin(), vals.end());
    CHECK(vals[2] == doctest::Approx(2.0 * big + 1.0).epsilon(1e-12));
    CHECK(vals[0] == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(vals[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("rank_qr reports numerical rank") {
    Rng rng(17);
    const Matrix x = oracle::random_design(rng, 12, 4);
    CHECK(la::rank_qr(x) == 4);

    // duplicate a column
    Matrix bad(12, 5);
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 4; ++j) bad(i, j) = x(i, j);
        bad(i, 4) = x(i, 1);
    }
    CHECK(la::rank_qr(bad) == 4);

    const Matrix zero(6, 3);
    CHECK(la::rank_qr(zero) == 0);
}

TEST_CASE("symmetrize and trace helpers") {
    Matrix a(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = 3.0;
    a(0, 0) = 5.0;
    a(1, 1) = 7.0;
    la::symmetrize(a);
    CHECK(a(0, 1) == doctest::Approx(2.0));
    CHECK(a(1, 0) == doctest::Approx(2.0));
    CHECK(la::trace(a) == doctest::Approx(12.0));
    CHECK(la::max_asymmetry(a) == doctest::Approx(0.0));

    Matrix b = Matrix::identity(2);
    // tr(A B) with symmetric B
    CHECK(la::trace_product_sym(a, b) == doctest::Approx(12.0));
}
