#include "bkmr/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bkmr {

Dataset::Dataset(la::Vector y, la::Matrix x, la::Matrix z)
    : y_(std::move(y)), x_(std::move(x)), z_(std::move(z)) {
    const std::size_t n = y_.size();
    if (n == 0) throw InputError("dataset: empty response vector");
    if (x_.rows() != n)
        throw InputError("dataset: X has " + std::to_string(x_.rows()) + " rows for " +
                         std::to_string(n) + " responses");
    if (z_.rows() != n)
        throw InputError("dataset: Z has " + std::to_string(z_.rows()) + " rows for " +
                         std::to_string(n) + " responses");
    if (x_.cols() == 0) throw InputError("dataset: X has no columns");
    if (z_.cols() == 0) throw InputError("dataset: Z has no columns");
    if (n < x_.cols() + 2)
        throw InputError("dataset: need n >= p + 2 (" + std::to_string(n) + " rows, " +
                         std::to_string(x_.cols()) + " covariate columns)");
    if (!la::all_finite(y_) || !la::all_finite(x_))
        throw InputError("dataset: y or X has non-finite entries");
    if (!la::all_finite(z_)) throw InputError("dataset: Z has non-finite entries");
    if (la::rank_qr(x_) < x_.cols())
        throw InputError("dataset: X is rank deficient");
}

PriorSpec PriorSpec::informative(la::Vector mu, la::Matrix sigma, double nu_sigma,
                                 double sigma0_sq, double nu_tau, double tau0) {
    if (mu.size() == 0 || sigma.rows() != mu.size() || sigma.cols() != mu.size())
        throw InputError("prior: mu/Sigma dimension mismatch");
    if (!la::all_finite(mu) || !la::all_finite(sigma))
        throw InputError("prior: non-finite hyperparameters");
    if (!(nu_sigma > 0.0) || !(sigma0_sq > 0.0) || !(nu_tau > 0.0) || !(tau0 > 0.0))
        throw InputError("prior: nu_sigma, sigma0_sq, nu_tau, tau0 must be positive");
    try {
        la::Cholesky check(sigma);
    } catch (const la::NotPositiveDefinite&) {
        throw InputError("prior: Sigma is not positive definite");
    }
    PriorSpec spec;
    spec.flavor_ = PriorFlavor::informative;
    spec.info_ = Informative{std::move(mu), std::move(sigma), nu_sigma, sigma0_sq,
                             nu_tau, tau0};
    return spec;
}

const PriorSpec::Informative& PriorSpec::checked() const {
    if (!info_) throw InternalError("prior: hyperparameter access on a flat prior");
    return *info_;
}

double sinvchi2_mode(double nu, double scale) {
    if (!(nu > 0.0) || !(scale > 0.0))
        throw InputError("sinvchi2_mode: nu and scale must be positive");
    return nu * scale / (nu + 2.0);
}

double sinvchi2_mean_inverse(double nu, double scale) {
    if (!(nu > 0.0) || !(scale > 0.0))
        throw InputError("sinvchi2_mean_inverse: nu and scale must be positive");
    return 1.0 / scale;
}

// AS 241 algorithm PPND16 (Wichura 1988).
double normal_quantile(double prob) {
    if (!(prob > 0.0) || !(prob < 1.0))
        throw InputError("normal_quantile: probability must lie in (0, 1)");
    const double q = prob - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? prob : 1.0 - prob;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

double wald_z(double level) {
    if (!(level > 0.0) || !(level < 1.0))
        throw InputError("wald_z: level must lie in (0, 1)");
    if (level == 0.95) return 1.96;
    return normal_quantile(0.5 * (1.0 + level));
}

std::vector<Interval> wald_intervals(const la::Vector& mean, const la::Matrix& cov,
                                     double level) {
    const std::size_t d = mean.size();
    if (!cov.square() || cov.rows() != d)
        throw InputError("wald_intervals: covariance dimension mismatch");
    if (!la::all_finite(mean) || !la::all_finite(cov))
        throw InputError("wald_intervals: non-finite input");
    const double scale = std::max(1.0, la::max_abs(cov));
    if (la::max_asymmetry(cov) > 1e-8 * scale)
        throw InputError("wald_intervals: covariance is not symmetric");

    la::SymEig eig = la::sym_eig(cov);
    const double lam_min = *std::min_element(eig.values.begin(), eig.values.end());
    if (lam_min < -1e-10 * scale)
        throw InputError("wald_intervals: covariance is not positive definite");

    const double z = wald_z(level);
    std::vector<Interval> out(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double hw = z * std::sqrt(std::max(cov(j, j), 0.0));
        out[j] = Interval{mean[j] - hw, mean[j] + hw};
    }
    return out;
}

} // namespace bkmr
