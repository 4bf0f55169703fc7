#include "bkmr/elicit.hpp"

#include <iostream>

namespace bkmr {

OlsSummary ols(const Dataset& data) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    if (n <= p) throw InputError("ols: need more observations than covariates");

    la::Matrix xtx = la::crossprod(data.x());
    la::Cholesky chol = [&] {
        try {
            return la::Cholesky(xtx);
        } catch (const la::NotPositiveDefinite&) {
            throw InputError("ols: X'X is rank deficient");
        }
    }();

    OlsSummary out;
    out.coef = chol.solve(la::matvec_t(data.x(), data.y()));
    const la::Vector resid = la::sub(data.y(), la::matvec(data.x(), out.coef));
    out.resid_df = n - p;
    out.sigma2_hat = la::norm2_sq(resid) / static_cast<double>(out.resid_df);
    out.vcov = la::scaled(chol.inverse(), out.sigma2_hat);
    return out;
}

PriorSpec elicit_priors(const Dataset& data) {
    OlsSummary fit = ols(data);
    // a residual variance at rounding-noise level relative to the response
    // scale means the regression is an exact fit
    const double y_scale = 1.0 + la::norm2_sq(data.y()) / static_cast<double>(data.n());
    if (!(fit.sigma2_hat > 1e-20 * y_scale))
        throw ElicitationError(
            "elicit_priors: residual variance is zero; fit with flat priors instead");

    la::Matrix sigma = fit.vcov;
    bool jittered = false;
    for (double jitter = 1e-8; jitter <= 1e-4; jitter *= 100.0) {
        try {
            la::Cholesky check(sigma);
            break;
        } catch (const la::NotPositiveDefinite&) {
            la::add_to_diagonal(sigma,
                                jitter * la::trace(fit.vcov) / static_cast<double>(data.p()));
            jittered = true;
        }
    }
    if (jittered)
        std::cerr << "warning: near-singular OLS covariance; prior Sigma diagonal jittered\n";

    return PriorSpec::informative(fit.coef, std::move(sigma),
                                  static_cast<double>(fit.resid_df), fit.sigma2_hat,
                                  /*nu_tau=*/10.0, /*tau0=*/1.0);
}

} // namespace bkmr
