#include <doctest.h>

#include "bkmr/elicit.hpp"
#include "bkmr/rng.hpp"
#include "support/oracles.hpp"

using namespace bkmr;
using la::Matrix;
using la::Vector;

namespace {

Dataset make_dataset(Rng& rng, std::size_t n, std::size_t p, const Vector& beta,
                     double sigma) {
    const Matrix x = oracle::random_design(rng, n, p);
    Vector y = oracle::naive_matvec(x, beta);
    for (double& v : y) v += sigma * rng.normal();
    const Matrix z = oracle::random_matrix(rng, n, 2);
    return Dataset(std::move(y), x, z);
}

} // namespace

TEST_CASE("ols on a noiseless fit recovers the coefficients exactly") {
    Rng rng(12);
    const Vector beta{2.0, -1.0, 0.5};
    const Dataset data = make_dataset(rng, 15, 3, beta, 0.0);
    const OlsSummary fit = ols(data);
    CHECK(oracle::max_rel_diff(fit.coef, beta) < 1e-10);
    CHECK(fit.sigma2_hat == doctest::Approx(0.0));
    CHECK(fit.resid_df == 12);
}

TEST_CASE("intercept-only ols matches the mean/variance identities") {
    // coef = sample mean, sigma2_hat = RSS/(n-1), vcov = sigma2_hat/n
    Matrix x(3, 1, 1.0);
    Matrix z(3, 1, 0.5);
    const Dataset data(Vector{1.0, 3.0, 2.0}, x, z);
    const OlsSummary fit = ols(data);
    CHECK(fit.coef[0] == doctest::Approx(2.0));
    CHECK(fit.sigma2_hat == doctest::Approx(1.0));
    CHECK(fit.vcov(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(fit.resid_df == 2);
}

TEST_CASE("ols matches the dense normal-equation oracle") {
    Rng rng(14);
    for (int rep = 0; rep < 5; ++rep) {
        const Dataset data = make_dataset(rng, 20, 3, Vector{1.0, 2.0, -0.5}, 1.5);
        const OlsSummary fit = ols(data);

        const Matrix xtx = oracle::naive_matmul(data.x().transposed(), data.x());
        const Matrix xtx_inv = oracle::gj_inverse(xtx);
        const Vector xty = oracle::naive_matvec(data.x().transposed(), data.y());
        const Vector want = oracle::naive_matvec(xtx_inv, xty);
        CHECK(oracle::max_rel_diff(fit.coef, want) < 1e-10);

        double rss = 0.0;
        const Vector fitted = oracle::naive_matvec(data.x(), want);
        for (std::size_t i = 0; i < data.n(); ++i) {
            const double r = data.y()[i] - fitted[i];
            rss += r * r;
        }
        CHECK(fit.sigma2_hat == doctest::Approx(rss / 17.0).epsilon(1e-10));
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                CHECK(fit.vcov(a, b) ==
                      doctest::Approx(fit.sigma2_hat * xtx_inv(a, b)).epsilon(1e-8));
    }
}

TEST_CASE("elicited priors take the OLS estimates verbatim plus the fixed tau prior") {
    Rng rng(16);
    const Dataset data = make_dataset(rng, 25, 4, Vector{1.0, 0.5, -0.5, 2.0}, 2.0);
    const OlsSummary fit = ols(data);
    const PriorSpec prior = elicit_priors(data);

    REQUIRE_FALSE(prior.is_flat());
    for (std::size_t j = 0; j < 4; ++j) CHECK(prior.mu()[j] == fit.coef[j]);
    CHECK(la::frobenius_distance(prior.sigma(), fit.vcov) == doctest::Approx(0.0));
    CHECK(prior.nu_sigma() == doctest::Approx(21.0)); // n - p
    CHECK(prior.sigma0_sq() == doctest::Approx(fit.sigma2_hat));
    CHECK(prior.tau0() == 1.0);
    CHECK(prior.nu_tau() == 10.0);
}

TEST_CASE("intercept-only elicitation composes the ols example") {
    Matrix x(3, 1, 1.0);
    Matrix z(3, 1, 0.25);
    const Dataset data(Vector{1.0, 3.0, 2.0}, x, z);
    const PriorSpec prior = elicit_priors(data);
    CHECK(prior.mu()[0] == doctest::Approx(2.0));
    CHECK(prior.sigma()(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(prior.nu_sigma() == doctest::Approx(2.0));
    CHECK(prior.sigma0_sq() == doctest::Approx(1.0));
    CHECK(prior.tau0() == 1.0);
    CHECK(prior.nu_tau() == 10.0);
}

TEST_CASE("noiseless data raises an elicitation error") {
    Rng rng(18);
    const Dataset data = make_dataset(rng, 12, 2, Vector{1.0, -1.0}, 0.0);
    CHECK_THROWS_AS(elicit_priors(data), ElicitationError);
}
