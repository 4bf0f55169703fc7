#pragma once

#include "bkmr/model.hpp"

// OLS-based prior elicitation: regress y on X, take the estimated
// coefficients and their variance-covariance matrix as the Gaussian prior on
// beta, the residual degrees of freedom and residual variance as the sigma^2
// prior, and a fixed vague prior on tau (tau0 = 1, nu_tau = 10).

namespace bkmr {

struct OlsSummary {
    la::Vector coef;
    la::Matrix vcov;
    std::size_t resid_df = 0;
    double sigma2_hat = 0.0;
};

OlsSummary ols(const Dataset& data);

PriorSpec elicit_priors(const Dataset& data);

} // namespace bkmr
