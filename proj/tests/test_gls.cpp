#include <doctest.h>

#include <cmath>

#include "bkmr/elicit.hpp"
#include "bkmr/gls.hpp"
#include "bkmr/kernel.hpp"
#include "bkmr/rng.hpp"
#include "support/oracles.hpp"

using namespace bkmr;
using la::Matrix;
using la::Vector;

namespace {

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t p) {
    const Matrix x = oracle::random_design(rng, n, p);
    Vector y = oracle::random_vector(rng, n, 2.0);
    const Matrix z = oracle::random_matrix(rng, n, 2);
    return Dataset(std::move(y), x, z);
}

// synthetic fit state with a chosen h block and noise level
FitResult synthetic_fit(const Dataset& data, Matrix sigma_h, Vector mu_h,
                        double sigma2_map) {
    FitResult fr;
    fr.posterior.mu_h = std::move(mu_h);
    fr.posterior.sigma_h = std::move(sigma_h);
    fr.posterior.mu_beta = Vector(data.p(), 0.0);
    fr.posterior.sigma_beta = Matrix::identity(data.p());
    fr.posterior.nu_sigma_q = static_cast<double>(data.n());
    fr.posterior.nu_tau_q = static_cast<double>(data.n());
    fr.posterior.scale_sigma_q = sigma2_map;
    fr.posterior.scale_tau_q = 1.0;
    fr.sigma2_map = sigma2_map;
    fr.trace.converged = true;
    return fr;
}

} // namespace

TEST_CASE("gls with zero h block reproduces OLS exactly") {
    Rng rng(60);
    const Dataset data = random_dataset(rng, 10, 3);
    const FitResult fr =
        synthetic_fit(data, Matrix(10, 10), Vector(10, 0.0), 1.0);
    const GlsResult g = gls_correct(fr, data);
    const OlsSummary ref = ols(data);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::abs(g.beta_gls[j] - ref.coef[j]) < 1e-12);
    const Matrix xtx_inv = oracle::gj_inverse(oracle::naive_matmul(data.x().transposed(),
                                                                   data.x()));
    CHECK(la::frobenius_distance(g.cov_gls, xtx_inv) < 1e-12);
}

TEST_CASE("scalar covariance leaves the estimate at OLS and scales the covariance") {
    Rng rng(61);
    const Dataset data = random_dataset(rng, 12, 2);
    const FitResult fr =
        synthetic_fit(data, la::scaled(Matrix::identity(12), 3.0), Vector(12, 0.0), 1.0);
    // Sigma_qy = 3 I + 1 I = 4 I
    const GlsResult g = gls_correct(fr, data);
    const OlsSummary ref = ols(data);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(std::abs(g.beta_gls[j] - ref.coef[j]) < 1e-12);
    const Matrix xtx_inv = oracle::gj_inverse(oracle::naive_matmul(data.x().transposed(),
                                                                   data.x()));
    CHECK(la::frobenius_distance(g.cov_gls, la::scaled(xtx_inv, 4.0)) < 1e-10);
}

TEST_CASE("gls matches the dense generalized-least-squares oracle") {
    Rng rng(62);
    for (int rep = 0; rep < 8; ++rep) {
        const Dataset data = random_dataset(rng, 6, 2);
        const Matrix sigma_h = oracle::random_spd(rng, 6, 0.5);
        const Vector mu_h = oracle::random_vector(rng, 6);
        const double s2 = 0.5 + rng.uniform();
        const FitResult fr = synthetic_fit(data, sigma_h, mu_h, s2);

        const GlsResult g = gls_correct(fr, data);

        Matrix sigma_y = sigma_h;
        for (std::size_t i = 0; i < 6; ++i) sigma_y(i, i) += s2;
        const Vector z = la::sub(data.y(), mu_h);
        const oracle::GlsFit want = oracle::dense_gls(data.x(), z, sigma_y);
        CHECK(oracle::max_rel_diff(g.beta_gls, want.beta) < 1e-9);
        CHECK(la::frobenius_distance(g.cov_gls, want.cov) <
              1e-9 * std::max(1.0, la::max_abs(want.cov)));
    }
}

TEST_CASE("beta_gls is invariant to scaling the covariance") {
    Rng rng(63);
    const Dataset data = random_dataset(rng, 9, 2);
    const Matrix sigma_h = oracle::random_spd(rng, 9, 0.5);
    const Vector mu_h = oracle::random_vector(rng, 9);
    const double c = 7.5;
    const GlsResult base = gls_correct(synthetic_fit(data, sigma_h, mu_h, 1.25), data);
    const GlsResult scaled =
        gls_correct(synthetic_fit(data, la::scaled(sigma_h, c), mu_h, 1.25 * c), data);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(std::abs(base.beta_gls[j] - scaled.beta_gls[j]) < 1e-12);
    CHECK(la::frobenius_distance(scaled.cov_gls, la::scaled(base.cov_gls, c)) <
          1e-9 * la::max_abs(base.cov_gls) * c);
}

TEST_CASE("gls_intervals delegate to the wald machinery") {
    GlsResult res;
    res.beta_gls = Vector{0.0};
    res.cov_gls = Matrix::identity(1);
    const auto iv = gls_intervals(res, 0.95);
    CHECK(iv[0].lower == doctest::Approx(-1.96));
    CHECK(iv[0].upper == doctest::Approx(1.96));

    // degenerate covariance collapses to a zero-width interval
    res.cov_gls = Matrix(1, 1);
    const auto tiny = gls_intervals(res, 0.95);
    CHECK(tiny[0].lower == doctest::Approx(0.0));
    CHECK(tiny[0].upper == doctest::Approx(0.0));

    // scaling the covariance by 4 doubles the half-widths
    res.cov_gls = la::scaled(Matrix::identity(1), 4.0);
    const auto wide = gls_intervals(res, 0.95);
    CHECK(wide[0].half_width() == doctest::Approx(2.0 * 1.96));
}

TEST_CASE("gls_correct rejects mismatched fits") {
    Rng rng(64);
    const Dataset data = random_dataset(rng, 8, 2);
    FitResult fr = synthetic_fit(data, Matrix(5, 5), Vector(5, 0.0), 1.0);
    CHECK_THROWS_AS(gls_correct(fr, data), InputError);
    FitResult bad_sigma = synthetic_fit(data, Matrix(8, 8), Vector(8, 0.0), 0.0);
    CHECK_THROWS_AS(gls_correct(bad_sigma, data), InputError);
}
