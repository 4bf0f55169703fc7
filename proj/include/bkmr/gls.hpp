#pragma once

#include "bkmr/model.hpp"
#include "bkmr/vi.hpp"

// Generalized least squares correction of the covariate-effect intervals:
// regress y - mu_qh on X with known covariance Sigma_qy = Sigma_qh +
// sigma2_map * I. Widens the anti-conservative variational intervals.

namespace bkmr {

struct GlsResult {
    la::Vector beta_gls;
    la::Matrix cov_gls; // (X' Sigma_qy^{-1} X)^{-1}
    la::Matrix sigma_y; // Sigma_qh + sigma2_map * I
};

GlsResult gls_correct(const FitResult& fit, const Dataset& data);

std::vector<Interval> gls_intervals(const GlsResult& res, double level);

} // namespace bkmr
