#include "bkmr/gls.hpp"

namespace bkmr {

GlsResult gls_correct(const FitResult& fit, const Dataset& data) {
    const std::size_t n = data.n();
    if (fit.posterior.mu_h.size() != n || fit.posterior.sigma_h.rows() != n)
        throw InputError("gls_correct: fit dimensions do not match the dataset");
    if (!(fit.sigma2_map > 0.0)) throw InputError("gls_correct: sigma2_map must be positive");

    GlsResult out;
    out.sigma_y = fit.posterior.sigma_h;
    la::add_to_diagonal(out.sigma_y, fit.sigma2_map);

    la::Cholesky chol_y = [&] {
        try {
            return la::Cholesky(out.sigma_y);
        } catch (const la::NotPositiveDefinite&) {
            throw InternalError("gls_correct: Sigma_qy is not positive definite");
        }
    }();

    const la::Matrix w = chol_y.solve(data.x()); // Sigma_qy^{-1} X
    la::Matrix xtw = la::matmul_tn(data.x(), w);
    la::symmetrize(xtw);
    const la::Vector z = la::sub(data.y(), fit.posterior.mu_h);

    try {
        la::Cholesky chol_xtw(xtw);
        out.cov_gls = chol_xtw.inverse();
        out.beta_gls = chol_xtw.solve(la::matvec_t(w, z));
    } catch (const la::NotPositiveDefinite&) {
        throw InputError("gls_correct: X is rank deficient");
    }
    return out;
}

std::vector<Interval> gls_intervals(const GlsResult& res, double level) {
    return wald_intervals(res.beta_gls, res.cov_gls, level);
}

} // namespace bkmr
