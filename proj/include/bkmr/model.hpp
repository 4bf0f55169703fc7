#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bkmr/linalg.hpp"

namespace bkmr {

// One fit's worth of data: response y, covariate design X (by convention the
// caller puts the intercept in the first column), and exposures Z.
class Dataset {
public:
    Dataset(la::Vector y, la::Matrix x, la::Matrix z);

    const la::Vector& y() const { return y_; }
    const la::Matrix& x() const { return x_; }
    const la::Matrix& z() const { return z_; }

    std::size_t n() const { return y_.size(); }
    std::size_t p() const { return x_.cols(); }
    std::size_t m() const { return z_.cols(); }

private:
    la::Vector y_;
    la::Matrix x_;
    la::Matrix z_;
};

enum class PriorFlavor { informative, flat };

// Gaussian prior on beta plus scaled-inverse-chi^2 priors on sigma^2 and tau,
// or the flat variant which carries no hyperparameters at all.
class PriorSpec {
public:
    static PriorSpec informative(la::Vector mu, la::Matrix sigma, double nu_sigma,
                                 double sigma0_sq, double nu_tau, double tau0);
    static PriorSpec flat() { return PriorSpec(); }

    PriorFlavor flavor() const { return flavor_; }
    bool is_flat() const { return flavor_ == PriorFlavor::flat; }

    const la::Vector& mu() const { return checked().mu; }
    const la::Matrix& sigma() const { return checked().sigma; }
    double nu_sigma() const { return checked().nu_sigma; }
    double sigma0_sq() const { return checked().sigma0_sq; }
    double nu_tau() const { return checked().nu_tau; }
    double tau0() const { return checked().tau0; }

private:
    struct Informative {
        la::Vector mu;
        la::Matrix sigma;
        double nu_sigma;
        double sigma0_sq;
        double nu_tau;
        double tau0;
    };

    PriorSpec() : flavor_(PriorFlavor::flat) {}
    const Informative& checked() const;

    PriorFlavor flavor_;
    std::optional<Informative> info_;
};

// All q-density parameters. The engine keeps the covariance blocks symmetric
// positive definite and never mutates the degrees of freedom after
// initialization.
struct VariationalPosterior {
    la::Vector mu_beta;
    la::Matrix sigma_beta;
    la::Vector mu_h;
    la::Matrix sigma_h;
    double nu_sigma_q = 0.0;
    double scale_sigma_q = 1.0;
    double nu_tau_q = 0.0;
    double scale_tau_q = 1.0;
};

struct ConvergenceTrace {
    std::vector<double> objective_values; // KL objective up to an additive constant
    std::size_t iterations = 0;
    bool converged = false;
    double criterion = 0.0;
    std::size_t burn_in = 0;
};

// Mode of Scale-Inv-chi^2(nu, scale): nu * scale / (nu + 2).
double sinvchi2_mode(double nu, double scale);

// E[1/x] for x ~ Scale-Inv-chi^2(nu, scale), which is exactly 1/scale
// (1/x is Gamma(nu/2, rate nu*scale/2), so the nu cancels).
double sinvchi2_mean_inverse(double nu, double scale);

// Standard normal quantile (Wichura's AS 241, double precision).
double normal_quantile(double prob);

// z multiplier for a central interval: exactly 1.96 at level 0.95 by
// convention, the exact quantile otherwise.
double wald_z(double level);

struct Interval {
    double lower;
    double upper;
    double half_width() const { return 0.5 * (upper - lower); }
};

// Per-coordinate mean_j +/- z * sqrt(diag(cov)_j). The covariance must be
// symmetric with no eigenvalue below -1e-10 relative; positive semidefinite
// boundaries (zero-width intervals) are allowed.
std::vector<Interval> wald_intervals(const la::Vector& mean, const la::Matrix& cov,
                                     double level);

} // namespace bkmr
