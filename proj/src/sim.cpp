#include "bkmr/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "bkmr/elicit.hpp"
#include "bkmr/rng.hpp"
#include "bkmr/simd.hpp"

namespace bkmr::sim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// sample quantile, linear interpolation between order statistics (R type 7)
double quantile(la::Vector sorted, double prob) {
    if (sorted.empty()) return 0.0;
    const double idx = prob * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

Moments moments(const la::Vector& values) {
    Moments m;
    if (values.empty()) return m;
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    m.min = *std::min_element(values.begin(), values.end());
    m.max = *std::max_element(values.begin(), values.end());
    return m;
}

std::vector<std::size_t> sample_without_replacement(std::size_t population,
                                                    std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.uniform_below(population - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

bool wants(const ExperimentPlan& plan, Method m) {
    return std::find(plan.methods.begin(), plan.methods.end(), m) != plan.methods.end();
}

void record_beta(MethodRep& rep, const la::Vector& mean, const la::Matrix& cov,
                 const la::Vector& beta_true, double level) {
    const std::vector<Interval> intervals = wald_intervals(mean, cov, level);
    rep.beta_hits = interval_coverage(intervals, beta_true);
    rep.beta_half_widths.resize(intervals.size());
    for (std::size_t j = 0; j < intervals.size(); ++j)
        rep.beta_half_widths[j] = intervals[j].half_width();
}

void record_h(MethodRep& rep, const VariationalPosterior& post, const la::Vector& h_true,
              double level) {
    const double z = wald_z(level);
    rep.h_total = h_true.size();
    for (std::size_t i = 0; i < h_true.size(); ++i) {
        const double hw = z * std::sqrt(std::max(post.sigma_h(i, i), 0.0));
        if (post.mu_h[i] - hw <= h_true[i] && h_true[i] <= post.mu_h[i] + hw) ++rep.h_hits;
    }
}

} // namespace

double pollutant_effect(double se, double cd, double pb, double hg) {
    return se / 100.0 + cd * pb + 1.0 / hg - 3.0;
}

const char* method_name(Method m) {
    switch (m) {
    case Method::vi1: return "vi1";
    case Method::vi2: return "vi2";
    case Method::gls1: return "gls1";
    case Method::gls2: return "gls2";
    }
    throw InternalError("method_name: unknown method");
}

std::size_t method_index(Method m) { return static_cast<std::size_t>(m); }

Population generate_population(const PopulationSpec& spec) {
    const std::size_t n = spec.population_size;
    const std::size_t p = spec.covariate_count + 1;
    if (n < 4) throw InputError("population: need at least 4 subjects");
    if (spec.beta_true.size() != p)
        throw InputError("population: beta_true must have covariate_count + 1 entries");
    if (!(spec.sigma_true > 0.0)) throw InputError("population: sigma_true must be positive");
    if (!(spec.pollutant_log_sd > 0.0))
        throw InputError("population: pollutant_log_sd must be positive");
    for (double m : spec.pollutant_means)
        if (!(m > 0.0)) throw InputError("population: pollutant means must be positive");
    if (spec.histogram_bins == 0) throw InputError("population: histogram_bins must be positive");

    Population pop;
    pop.x_full = la::Matrix(n, p);
    pop.z_full = la::Matrix(n, 4);
    pop.h_full.resize(n);
    pop.y_full.resize(n);

    // locations so that E[exp(N(mu, sd^2))] hits the target means
    std::array<double, 4> mu_log;
    for (std::size_t k = 0; k < 4; ++k)
        mu_log[k] = std::log(spec.pollutant_means[k]) -
                    0.5 * spec.pollutant_log_sd * spec.pollutant_log_sd;

    Rng rng = Rng::substream(spec.seed, 0x506f70, 0);
    for (std::size_t i = 0; i < n; ++i) {
        pop.x_full(i, 0) = 1.0;
        for (std::size_t j = 1; j < p; ++j) pop.x_full(i, j) = rng.normal();
        for (std::size_t k = 0; k < 4; ++k) {
            double draw = 0.0;
            for (int attempt = 0;; ++attempt) {
                draw = rng.lognormal(mu_log[k], spec.pollutant_log_sd);
                if (draw > 0.0 && std::isfinite(1.0 / draw)) break;
                ++pop.regenerated_draws;
                if (attempt >= 100)
                    throw InternalError("population: exposure draw kept degenerating");
            }
            pop.z_full(i, k) = draw;
        }
        pop.h_full[i] = pollutant_effect(pop.z_full(i, 0), pop.z_full(i, 1),
                                         pop.z_full(i, 2), pop.z_full(i, 3));
        const double xb =
            la::simd::active().dot(pop.x_full.row(i), spec.beta_true.data(), p);
        pop.y_full[i] = pop.h_full[i] + xb + rng.normal(0.0, spec.sigma_true);
    }

    // Figure-data histogram of the pollutant effects
    const double h_min = *std::min_element(pop.h_full.begin(), pop.h_full.end());
    double h_max = *std::max_element(pop.h_full.begin(), pop.h_full.end());
    if (h_max <= h_min) h_max = h_min + 1.0;
    const std::size_t bins = spec.histogram_bins;
    pop.h_hist_edges.resize(bins + 1);
    pop.h_hist_counts.assign(bins, 0);
    const double width = (h_max - h_min) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b)
        pop.h_hist_edges[b] = h_min + width * static_cast<double>(b);
    for (double h : pop.h_full) {
        std::size_t b = static_cast<std::size_t>((h - h_min) / width);
        if (b >= bins) b = bins - 1;
        ++pop.h_hist_counts[b];
    }
    return pop;
}

std::vector<int> interval_coverage(const std::vector<Interval>& intervals,
                                   const la::Vector& truth) {
    if (intervals.size() != truth.size())
        throw InputError("interval_coverage: length mismatch");
    std::vector<int> hits(truth.size());
    for (std::size_t j = 0; j < truth.size(); ++j)
        hits[j] = (intervals[j].lower <= truth[j] && truth[j] <= intervals[j].upper) ? 1 : 0;
    return hits;
}

namespace {

// One replication: subsample, build the kernel, elicit, fit, correct.
RepRecord run_replication(const Population& pop, const PopulationSpec& spec,
                          const ExperimentPlan& plan, std::size_t n, std::size_t rep) {
    RepRecord rec;
    rec.n = n;
    rec.rep_index = rep;

    const bool need_vi1 = wants(plan, Method::vi1) || wants(plan, Method::gls1);
    const bool need_vi2 = wants(plan, Method::vi2) || wants(plan, Method::gls2);
    for (Method m : plan.methods) rec.by_method[method_index(m)].attempted = true;

    const std::size_t p = pop.x_full.cols();
    Rng rng = Rng::substream(plan.seed, n, rep);
    const std::vector<std::size_t> idx =
        sample_without_replacement(spec.population_size, n, rng);

    la::Vector y(n), h_true(n);
    la::Matrix x(n, p), z(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = pop.y_full[idx[i]];
        h_true[i] = pop.h_full[idx[i]];
        for (std::size_t j = 0; j < p; ++j) x(i, j) = pop.x_full(idx[i], j);
        for (std::size_t k = 0; k < 4; ++k) z(i, k) = pop.z_full(idx[i], k);
    }

    try {
        const auto t_elicit = Clock::now();
        Dataset data(std::move(y), std::move(x), std::move(z));
        const KernelMatrix kernel = nearest_pd(quadratic_kernel(data.z()));

        // VI1 / GLS1 path
        FitResult fit1;
        bool have_fit1 = false;
        if (need_vi1) {
            try {
                const PriorSpec prior = elicit_priors(data);
                rec.elicit_seconds = seconds_since(t_elicit);
                const auto t_fit = Clock::now();
                fit1 = fit(data, prior, kernel, plan.fit_config);
                rec.vi1_seconds = seconds_since(t_fit);
                have_fit1 = true;
            } catch (const Error& e) {
                if (rec.failure.empty()) rec.failure = e.what();
            }
        } else {
            rec.elicit_seconds = seconds_since(t_elicit);
        }
        if (have_fit1 && wants(plan, Method::vi1)) {
            MethodRep& mr = rec.by_method[method_index(Method::vi1)];
            record_beta(mr, fit1.posterior.mu_beta, fit1.posterior.sigma_beta,
                        spec.beta_true, plan.level);
            record_h(mr, fit1.posterior, h_true, plan.level);
            mr.sigma2_map = fit1.sigma2_map;
            mr.converged = fit1.trace.converged;
            mr.ok = true;
        }

        // VI2 / GLS2 path
        FitResult fit2;
        bool have_fit2 = false;
        if (need_vi2) {
            try {
                const auto t_fit = Clock::now();
                fit2 = fit(data, PriorSpec::flat(), kernel, plan.fit_config);
                rec.vi2_seconds = seconds_since(t_fit);
                have_fit2 = true;
            } catch (const Error& e) {
                if (rec.failure.empty()) rec.failure = e.what();
            }
        }
        if (have_fit2 && wants(plan, Method::vi2)) {
            MethodRep& mr = rec.by_method[method_index(Method::vi2)];
            record_beta(mr, fit2.posterior.mu_beta, fit2.posterior.sigma_beta,
                        spec.beta_true, plan.level);
            record_h(mr, fit2.posterior, h_true, plan.level);
            mr.sigma2_map = fit2.sigma2_map;
            mr.converged = fit2.trace.converged;
            mr.ok = true;
        }

        const auto t_gls = Clock::now();
        bool timed_gls = false;
        if (wants(plan, Method::gls1) && have_fit1) {
            try {
                const GlsResult g = gls_correct(fit1, data);
                MethodRep& mr = rec.by_method[method_index(Method::gls1)];
                record_beta(mr, g.beta_gls, g.cov_gls, spec.beta_true, plan.level);
                mr.converged = fit1.trace.converged;
                mr.ok = true;
                timed_gls = true;
            } catch (const Error& e) {
                if (rec.failure.empty()) rec.failure = e.what();
            }
        }
        if (wants(plan, Method::gls2) && have_fit2) {
            try {
                const GlsResult g = gls_correct(fit2, data);
                MethodRep& mr = rec.by_method[method_index(Method::gls2)];
                record_beta(mr, g.beta_gls, g.cov_gls, spec.beta_true, plan.level);
                mr.converged = fit2.trace.converged;
                mr.ok = true;
                timed_gls = true;
            } catch (const Error& e) {
                if (rec.failure.empty()) rec.failure = e.what();
            }
        }
        if (timed_gls) rec.gls_seconds = seconds_since(t_gls);
    } catch (const Error& e) {
        // dataset/kernel stage: everything requested fails together
        if (rec.failure.empty()) rec.failure = e.what();
    }
    return rec;
}

} // namespace

CoverageReport aggregate(const std::vector<RepRecord>& records, const Population& pop,
                         const PopulationSpec& spec, const ExperimentPlan& plan) {
    CoverageReport report;
    report.population = spec;
    report.plan = plan;
    report.regenerated_draws = pop.regenerated_draws;
    report.h_hist_edges = pop.h_hist_edges;
    report.h_hist_counts = pop.h_hist_counts;

    const double sigma2_true = spec.sigma_true * spec.sigma_true;
    const std::size_t p = spec.beta_true.size();
    std::set<std::string> messages;

    for (std::size_t n : plan.sample_sizes) {
        std::vector<const RepRecord*> recs;
        for (const RepRecord& r : records)
            if (r.n == n) recs.push_back(&r);

        for (Method m : plan.methods) {
            const std::size_t mi = method_index(m);
            CovariateCoverageRow row;
            row.method = m;
            row.n = n;
            row.coverage.assign(p, 0.0);
            row.mean_half_width.assign(p, 0.0);
            row.reps_used = 0;
            std::size_t failures = 0;
            std::uint64_t h_hits = 0;
            std::uint64_t h_total = 0;
            la::Vector ratios;
            la::Vector sq_errors;
            for (const RepRecord* r : recs) {
                const MethodRep& mr = r->by_method[mi];
                if (!mr.attempted) continue;
                if (!mr.ok) {
                    ++failures;
                    if (!r->failure.empty()) messages.insert(r->failure);
                    continue;
                }
                ++row.reps_used;
                for (std::size_t j = 0; j < p; ++j) {
                    row.coverage[j] += mr.beta_hits[j];
                    row.mean_half_width[j] += mr.beta_half_widths[j];
                }
                if (m == Method::vi1 || m == Method::vi2) {
                    h_hits += mr.h_hits;
                    h_total += mr.h_total;
                    ratios.push_back(100.0 * mr.sigma2_map / sigma2_true);
                    const double err = mr.sigma2_map - sigma2_true;
                    sq_errors.push_back(err * err);
                }
            }
            if (row.reps_used > 0)
                for (std::size_t j = 0; j < p; ++j) {
                    row.coverage[j] /= static_cast<double>(row.reps_used);
                    row.mean_half_width[j] /= static_cast<double>(row.reps_used);
                }
            report.covariate.push_back(row);
            report.failures.push_back(FailureRow{m, n, failures});

            if (m == Method::vi1 || m == Method::vi2) {
                PollutantCoverageRow prow;
                prow.method = m;
                prow.n = n;
                prow.hits = h_hits;
                prow.total = h_total;
                prow.coverage =
                    h_total > 0 ? static_cast<double>(h_hits) / static_cast<double>(h_total)
                                : 0.0;
                prow.reps_used = row.reps_used;
                report.pollutant.push_back(prow);

                Sigma2Row srow;
                srow.method = m;
                srow.n = n;
                srow.reps_used = row.reps_used;
                if (!ratios.empty()) {
                    const Moments mm = moments(ratios);
                    la::Vector sorted = ratios;
                    std::sort(sorted.begin(), sorted.end());
                    srow.ratio_mean = mm.mean;
                    srow.ratio_sd = mm.sd;
                    srow.ratio_p025 = quantile(sorted, 0.025);
                    srow.ratio_median = quantile(sorted, 0.5);
                    srow.ratio_p975 = quantile(sorted, 0.975);
                    srow.mse = std::accumulate(sq_errors.begin(), sq_errors.end(), 0.0) /
                               static_cast<double>(sq_errors.size());
                } else {
                    srow.ratio_mean = srow.ratio_sd = srow.ratio_p025 = 0.0;
                    srow.ratio_median = srow.ratio_p975 = srow.mse = 0.0;
                }
                report.sigma2.push_back(srow);
            }
        }

        // stage timings across replications that reached each stage
        const bool need_vi1 = wants(plan, Method::vi1) || wants(plan, Method::gls1);
        const bool need_vi2 = wants(plan, Method::vi2) || wants(plan, Method::gls2);
        const bool need_gls = wants(plan, Method::gls1) || wants(plan, Method::gls2);
        struct Stage {
            const char* name;
            bool enabled;
            double RepRecord::* member;
        };
        const Stage stages[] = {
            {"prior_elicitation", true, &RepRecord::elicit_seconds},
            {"vi1_fit", need_vi1, &RepRecord::vi1_seconds},
            {"vi2_fit", need_vi2, &RepRecord::vi2_seconds},
            {"gls_correction", need_gls, &RepRecord::gls_seconds},
        };
        for (const Stage& st : stages) {
            if (!st.enabled) continue;
            la::Vector values;
            for (const RepRecord* r : recs)
                if (r->*(st.member) > 0.0) values.push_back(r->*(st.member));
            TimingRow trow;
            trow.stage = st.name;
            trow.n = n;
            trow.count = values.size();
            const Moments mm = moments(values);
            trow.mean_seconds = mm.mean;
            trow.sd_seconds = mm.sd;
            trow.min_seconds = mm.min;
            trow.max_seconds = mm.max;
            report.timing.push_back(trow);
        }
    }
    report.failure_messages.assign(messages.begin(), messages.end());
    return report;
}

CoverageReport run_experiment(const Population& pop, const PopulationSpec& spec,
                              const ExperimentPlan& plan) {
    if (pop.x_full.rows() != spec.population_size)
        throw InputError("run_experiment: population does not match its spec");
    for (std::size_t n : plan.sample_sizes) {
        if (n > spec.population_size)
            throw InputError("run_experiment: sample size exceeds population size");
        if (n < 4) throw InputError("run_experiment: sample sizes must be at least 4");
    }
    if (!(plan.level > 0.0) || !(plan.level < 1.0))
        throw InputError("run_experiment: level must lie in (0, 1)");

    struct Job {
        std::size_t n;
        std::size_t rep;
    };
    std::vector<Job> jobs;
    jobs.reserve(plan.sample_sizes.size() * plan.replications);
    for (std::size_t n : plan.sample_sizes)
        for (std::size_t rep = 0; rep < plan.replications; ++rep) jobs.push_back({n, rep});

    std::vector<RepRecord> records(jobs.size());
    std::size_t threads = plan.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(jobs.size(), 1));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) break;
            records[j] = run_replication(pop, spec, plan, jobs[j].n, jobs[j].rep);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    return aggregate(records, pop, spec, plan);
}

// ---- exact joint Gaussian oracle ----

namespace {

// Gauss-Jordan inverse with partial pivoting; deliberately not routed
// through the Cholesky code path.
la::Matrix gauss_jordan_inverse(la::Matrix a) {
    const std::size_t n = a.rows();
    la::Matrix inv = la::Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0 || !std::isfinite(a(piv, col)))
            throw InputError("exact_gaussian_oracle: singular system");
        if (piv != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(col, c), a(piv, c));
                std::swap(inv(col, c), inv(piv, c));
            }
        const double d = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= d;
            inv(col, c) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

} // namespace

OracleResult exact_gaussian_oracle(const Dataset& data, const KernelMatrix& kernel,
                                   double sigma2, double tau) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    if (n > 50) throw InputError("exact_gaussian_oracle: dense path limited to n <= 50");
    if (kernel.n() != n) throw InputError("exact_gaussian_oracle: kernel dimension mismatch");
    if (!(sigma2 > 0.0) || !(tau > 0.0))
        throw InputError("exact_gaussian_oracle: sigma2 and tau must be positive");

    const la::Matrix kinv = gauss_jordan_inverse(kernel.k());
    const std::size_t d = n + p;
    la::Matrix prec(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            prec(i, j) = kinv(i, j) / tau + (i == j ? 1.0 / sigma2 : 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            const double v = data.x()(i, j) / sigma2;
            prec(i, n + j) = v;
            prec(n + j, i) = v;
        }
    const la::Matrix xtx = la::crossprod(data.x());
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) prec(n + i, n + j) = xtx(i, j) / sigma2;

    la::Vector rhs(d);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = data.y()[i] / sigma2;
    const la::Vector xty = la::matvec_t(data.x(), data.y());
    for (std::size_t j = 0; j < p; ++j) rhs[n + j] = xty[j] / sigma2;

    OracleResult out;
    out.covariance = gauss_jordan_inverse(prec);
    const la::Vector mean = la::matvec(out.covariance, rhs);
    out.mean_h.assign(mean.begin(), mean.begin() + static_cast<long>(n));
    out.mean_beta.assign(mean.begin() + static_cast<long>(n), mean.end());
    return out;
}

} // namespace bkmr::sim
