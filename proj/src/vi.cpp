#include "bkmr/vi.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "bkmr/elicit.hpp"

namespace bkmr {

namespace {

double flat_dof(const Dataset& data) {
    if (data.n() <= 2)
        throw InputError("flat prior: need n > 2 for positive degrees of freedom");
    return static_cast<double>(data.n()) - 2.0;
}

// residual y - mu_qh - X mu_qbeta
la::Vector full_residual(const VariationalPosterior& state, const Dataset& data) {
    la::Vector r = la::sub(data.y(), state.mu_h);
    const la::Vector xb = la::matvec(data.x(), state.mu_beta);
    return la::sub(r, xb);
}

la::Cholesky prior_precision_chol(const PriorSpec& prior) {
    try {
        return la::Cholesky(prior.sigma());
    } catch (const la::NotPositiveDefinite&) {
        throw InputError("prior Sigma is not positive definite");
    }
}

} // namespace

double update_sigma2(const VariationalPosterior& state, const Dataset& data,
                     const PriorSpec& prior) {
    const double n = static_cast<double>(data.n());
    const la::Matrix xtx = la::crossprod(data.x());
    const la::Vector r = full_residual(state, data);
    const double d = la::trace(state.sigma_h) +
                     la::trace_product_sym(xtx, state.sigma_beta) + la::norm2_sq(r);
    if (prior.is_flat()) return d / flat_dof(data);
    return (d + prior.nu_sigma() * prior.sigma0_sq()) / (n + prior.nu_sigma());
}

double update_tau(const VariationalPosterior& state, const Dataset& data,
                  const PriorSpec& prior, const KernelMatrix& kernel) {
    const double n = static_cast<double>(data.n());
    const la::Matrix kinv_sh = kernel_solve(kernel, state.sigma_h);
    const la::Vector kinv_mu = kernel_solve(kernel, state.mu_h);
    const double d = la::trace(kinv_sh) + la::dot(state.mu_h, kinv_mu);
    if (prior.is_flat()) return d / flat_dof(data);
    return (d + prior.nu_tau() * prior.tau0()) / (n + prior.nu_tau());
}

HUpdate update_h(const VariationalPosterior& state, const Dataset& data,
                 const KernelMatrix& kernel) {
    const double s = state.scale_sigma_q;
    const double t = state.scale_tau_q;
    if (!(s > 0.0) || !(t > 0.0))
        throw InputError("update_h: q scales must be positive");

    // (I/s + K^{-1}/t)^{-1} = (K/s + I/t)^{-1} K, which avoids forming K^{-1}
    la::Matrix m = la::scaled(kernel.k(), 1.0 / s);
    la::add_to_diagonal(m, 1.0 / t);
    HUpdate out;
    try {
        la::Cholesky chol(m);
        out.sigma_h = chol.solve(kernel.k());
    } catch (const la::NotPositiveDefinite&) {
        throw InternalError("update_h: precision system lost positive definiteness");
    }
    la::symmetrize(out.sigma_h);

    const la::Vector xb = la::matvec(data.x(), state.mu_beta);
    const la::Vector eps = la::sub(data.y(), xb);
    out.mu_h = la::scaled(la::matvec(out.sigma_h, eps), 1.0 / s);
    return out;
}

BetaUpdate update_beta(const VariationalPosterior& state, const Dataset& data,
                       const PriorSpec& prior) {
    const double s = state.scale_sigma_q;
    if (!(s > 0.0)) throw InputError("update_beta: q scale must be positive");

    const la::Matrix xtx = la::crossprod(data.x());
    const la::Vector d = la::sub(data.y(), state.mu_h);
    const la::Vector xtd = la::matvec_t(data.x(), d);

    BetaUpdate out;
    if (prior.is_flat()) {
        try {
            la::Cholesky chol(xtx);
            out.sigma_beta = la::scaled(chol.inverse(), s);
            out.mu_beta = chol.solve(xtd);
        } catch (const la::NotPositiveDefinite&) {
            throw InputError("update_beta: X'X is rank deficient under flat priors");
        }
        return out;
    }

    const la::Cholesky prior_chol = prior_precision_chol(prior);
    const la::Matrix prior_prec = prior_chol.inverse();
    la::Matrix prec = la::add(la::scaled(xtx, 1.0 / s), prior_prec);
    la::Vector rhs = la::scaled(xtd, 1.0 / s);
    const la::Vector prec_mu = la::matvec(prior_prec, prior.mu());
    for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += prec_mu[j];
    try {
        la::Cholesky chol(prec);
        out.sigma_beta = chol.inverse();
        out.mu_beta = chol.solve(rhs);
    } catch (const la::NotPositiveDefinite&) {
        throw InternalError("update_beta: posterior precision lost positive definiteness");
    }
    return out;
}

double kl_objective(const VariationalPosterior& state, const Dataset& data,
                    const PriorSpec& prior, const KernelMatrix& kernel) {
    const double s = state.scale_sigma_q;
    const double t = state.scale_tau_q;
    if (!(s > 0.0) || !(t > 0.0))
        throw InputError("kl_objective: q scales must be positive");

    double logdet_sb, logdet_sh;
    try {
        logdet_sb = la::Cholesky(state.sigma_beta).log_det();
        logdet_sh = la::Cholesky(state.sigma_h).log_det();
    } catch (const la::NotPositiveDefinite&) {
        throw InternalError("kl_objective: q covariance is not positive definite");
    }

    const la::Matrix xtx = la::crossprod(data.x());
    const la::Vector r = full_residual(state, data);
    const double t_sigma = la::trace(state.sigma_h) +
                           la::trace_product_sym(xtx, state.sigma_beta) + la::norm2_sq(r);

    const la::Matrix kinv_sh = kernel_solve(kernel, state.sigma_h);
    const la::Vector kinv_mu = kernel_solve(kernel, state.mu_h);
    const double t_tau = la::trace(kinv_sh) + la::dot(state.mu_h, kinv_mu);

    double sigma_load = t_sigma;
    double tau_load = t_tau;
    double beta_prior_terms = 0.0;
    if (!prior.is_flat()) {
        sigma_load += prior.nu_sigma() * prior.sigma0_sq();
        tau_load += prior.nu_tau() * prior.tau0();
        const la::Cholesky prior_chol = prior_precision_chol(prior);
        const la::Matrix prior_prec = prior_chol.inverse();
        const la::Vector diff = la::sub(state.mu_beta, prior.mu());
        beta_prior_terms = la::trace_product_sym(prior_prec, state.sigma_beta) +
                           la::dot(diff, la::matvec(prior_prec, diff));
    }

    // KL(q||p) up to an additive constant: entropy terms fold with the
    // E_q[ln p] log terms into (nu_q/2) ln scale coefficients.
    return -0.5 * logdet_sb - 0.5 * logdet_sh + 0.5 * state.nu_sigma_q * std::log(s) +
           0.5 * state.nu_tau_q * std::log(t) +
           0.5 * (sigma_load / s + tau_load / t + beta_prior_terms);
}

VariationalPosterior initial_state(const Dataset& data, const PriorSpec& prior,
                                   InitStrategy init) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();

    VariationalPosterior state;
    state.mu_h.assign(n, 0.0);
    state.sigma_h = la::Matrix::identity(n);
    if (prior.is_flat()) {
        state.nu_sigma_q = flat_dof(data);
        state.nu_tau_q = state.nu_sigma_q;
    } else {
        if (prior.mu().size() != p)
            throw InputError("prior dimension does not match X columns");
        state.nu_sigma_q = static_cast<double>(n) + prior.nu_sigma();
        state.nu_tau_q = static_cast<double>(n) + prior.nu_tau();
    }

    switch (init) {
    case InitStrategy::zeros:
        state.mu_beta.assign(p, 0.0);
        state.sigma_beta = la::Matrix::identity(p);
        break;
    case InitStrategy::ols_start:
        if (prior.is_flat()) {
            const OlsSummary start = ols(data);
            state.mu_beta = start.coef;
            state.sigma_beta = start.vcov;
        } else {
            state.mu_beta = prior.mu();
            state.sigma_beta = prior.sigma();
        }
        break;
    }
    return state;
}

FitResult fit(const Dataset& data, const PriorSpec& prior, const KernelMatrix& kernel,
              const FitConfig& config) {
    if (kernel.n() != data.n())
        throw InputError("fit: kernel dimension " + std::to_string(kernel.n()) +
                         " does not match n = " + std::to_string(data.n()));
    if (config.max_iterations == 0) throw InputError("fit: max_iterations must be positive");
    if (!(config.tolerance > 0.0)) throw InputError("fit: tolerance must be positive");
    if (config.burn_in >= config.max_iterations)
        throw InputError("fit: burn_in must be below max_iterations");

    VariationalPosterior state = initial_state(data, prior, config.init);

    ConvergenceTrace trace;
    trace.criterion = config.tolerance;
    trace.burn_in = config.burn_in;
    trace.objective_values.reserve(config.max_iterations);

    for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
        state.scale_sigma_q = update_sigma2(state, data, prior);
        state.scale_tau_q = update_tau(state, data, prior, kernel);
        if (!std::isfinite(state.scale_sigma_q) || !std::isfinite(state.scale_tau_q)) {
            trace.iterations = iter;
            throw FitError("fit: q scales diverged at iteration " + std::to_string(iter),
                           trace);
        }
        HUpdate h = update_h(state, data, kernel);
        state.mu_h = std::move(h.mu_h);
        state.sigma_h = std::move(h.sigma_h);
        BetaUpdate b = update_beta(state, data, prior);
        state.mu_beta = std::move(b.mu_beta);
        state.sigma_beta = std::move(b.sigma_beta);

        const double objective = kl_objective(state, data, prior, kernel);
        trace.objective_values.push_back(objective);
        trace.iterations = iter;
        if (!std::isfinite(objective))
            throw FitError("fit: objective diverged at iteration " + std::to_string(iter),
                           trace);
        if (iter > config.burn_in && iter >= 2) {
            const double delta =
                std::abs(objective - trace.objective_values[trace.objective_values.size() - 2]);
            if (delta < config.tolerance) {
                trace.converged = true;
                break;
            }
        }
    }

    FitResult result;
    result.sigma2_map = sinvchi2_mode(state.nu_sigma_q, state.scale_sigma_q);
    result.posterior = std::move(state);
    result.trace = std::move(trace);
    result.prior_used = prior;
    return result;
}

} // namespace bkmr
