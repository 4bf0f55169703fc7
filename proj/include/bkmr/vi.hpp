#pragma once

#include "bkmr/kernel.hpp"
#include "bkmr/model.hpp"

// Mean-field coordinate ascent for the kernel machine regression model
//
//   y ~ N(h + X beta, sigma^2 I),   h ~ N(0, tau K)
//
// with a Gaussian prior on beta and scaled-inverse-chi^2 priors on sigma^2
// and tau (informative flavor), or with flat priors. The factored posterior
// q(beta) q(h) q(sigma^2) q(tau) is updated one block at a time in the fixed
// order sigma^2, tau, h, beta; the KL divergence to the true posterior is
// tracked up to an additive constant and never increases.

namespace bkmr {

enum class InitStrategy { zeros, ols_start };

struct FitConfig {
    std::size_t max_iterations = 500;
    // |delta KL| threshold; 1e-2 matches the simulation setting, 1e-6 the
    // timing setting
    double tolerance = 1e-2;
    // convergence is not tested before this many iterations have run
    std::size_t burn_in = 10;
    InitStrategy init = InitStrategy::ols_start;
};

struct FitResult {
    VariationalPosterior posterior;
    ConvergenceTrace trace;
    double sigma2_map = 0.0; // mode of q(sigma^2)
    PriorSpec prior_used = PriorSpec::flat();
};

// The objective diverged (non-finite KL value). Carries the partial trace.
class FitError : public Error {
public:
    FitError(const std::string& msg, ConvergenceTrace trace)
        : Error(msg), trace_(std::move(trace)) {}
    const ConvergenceTrace& trace() const { return trace_; }

private:
    ConvergenceTrace trace_;
};

// One coordinate update each. All of them read the current state and return
// the new block; none of them mutates its arguments.

// scale of q(sigma^2): (D + nu_sigma * sigma0^2) / (n + nu_sigma) informative,
// D / (n - 2) flat, with
// D = tr(Sigma_qh + X Sigma_qbeta X^T) + ||y - mu_qh - X mu_qbeta||^2
double update_sigma2(const VariationalPosterior& state, const Dataset& data,
                     const PriorSpec& prior);

// scale of q(tau), with D = tr(K^{-1} Sigma_qh) + mu_qh^T K^{-1} mu_qh
double update_tau(const VariationalPosterior& state, const Dataset& data,
                  const PriorSpec& prior, const KernelMatrix& kernel);

struct HUpdate {
    la::Vector mu_h;
    la::Matrix sigma_h;
};
// Sigma_qh = (I/s + K^{-1}/t)^{-1}, mu_qh = Sigma_qh (y - X mu_qbeta)/s,
// realized as Cholesky solves of (K/s + I/t) X = K and symmetrized.
HUpdate update_h(const VariationalPosterior& state, const Dataset& data,
                 const KernelMatrix& kernel);

struct BetaUpdate {
    la::Vector mu_beta;
    la::Matrix sigma_beta;
};
// informative: Sigma_qbeta = (X'X/s + Sigma^{-1})^{-1},
//              mu_qbeta    = Sigma_qbeta (X'(y - mu_qh)/s + Sigma^{-1} mu);
// flat:        Sigma_qbeta = (X'X)^{-1} s,
//              mu_qbeta    = Sigma_qbeta X'(y - mu_qh)/s
BetaUpdate update_beta(const VariationalPosterior& state, const Dataset& data,
                       const PriorSpec& prior);

// KL(q || p) up to an additive constant; decreases under every update above.
double kl_objective(const VariationalPosterior& state, const Dataset& data,
                    const PriorSpec& prior, const KernelMatrix& kernel);

// Starting state: degrees of freedom fixed at n+nu (informative) or n-2
// (flat); mu_qh = 0, Sigma_qh = I; beta block from the prior mean/covariance
// (informative) or the OLS fit (flat) under ols_start, or zero mean with unit
// covariance under zeros.
VariationalPosterior initial_state(const Dataset& data, const PriorSpec& prior,
                                   InitStrategy init);

FitResult fit(const Dataset& data, const PriorSpec& prior, const KernelMatrix& kernel,
              const FitConfig& config = {});

} // namespace bkmr
