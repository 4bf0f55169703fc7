#include "bkmr/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "bkmr/csv.hpp"
#include "bkmr/elicit.hpp"
#include "bkmr/gls.hpp"
#include "bkmr/kernel.hpp"
#include "bkmr/report.hpp"
#include "bkmr/sim.hpp"
#include "bkmr/vi.hpp"

namespace bkmr::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    try {
        Json j;
        in >> j;
        return j;
    } catch (const std::exception& e) {
        throw InputError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw InputError("write failed for '" + path + "'");
}

std::size_t threads_or_env(std::optional<std::size_t> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("BKMR_VI_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0') return static_cast<std::size_t>(v);
        throw InputError("BKMR_VI_THREADS is not a valid thread count");
    }
    return 0;
}

// ---- fit ----

struct ColumnRoles {
    std::string response;
    std::vector<std::string> covariates;
    std::vector<std::string> exposures;
};

struct LoadedData {
    Dataset dataset;
    ColumnRoles roles;
    csv::NumericTable table;
};

LoadedData load_dataset(const std::string& input, const ColumnRoles& roles) {
    if (roles.response.empty()) throw InputError("a response column must be declared");
    if (roles.exposures.empty()) throw InputError("at least one exposure column is required");

    csv::NumericTable table = csv::read_numeric_csv(input);
    std::vector<std::string> seen;
    auto check_unique = [&seen](const std::string& name) {
        for (const std::string& s : seen)
            if (s == name) throw InputError("column '" + name + "' declared in two roles");
        seen.push_back(name);
    };
    check_unique(roles.response);
    for (const std::string& c : roles.covariates) check_unique(c);
    for (const std::string& e : roles.exposures) check_unique(e);

    const std::size_t n = table.row_count();
    la::Vector y = table.columns[table.column(roles.response)];
    la::Matrix x(n, roles.covariates.size() + 1);
    for (std::size_t i = 0; i < n; ++i) x(i, 0) = 1.0; // intercept
    for (std::size_t j = 0; j < roles.covariates.size(); ++j) {
        const la::Vector& col = table.columns[table.column(roles.covariates[j])];
        for (std::size_t i = 0; i < n; ++i) x(i, j + 1) = col[i];
    }
    la::Matrix z(n, roles.exposures.size());
    for (std::size_t j = 0; j < roles.exposures.size(); ++j) {
        const la::Vector& col = table.columns[table.column(roles.exposures[j])];
        for (std::size_t i = 0; i < n; ++i) z(i, j) = col[i];
    }
    return LoadedData{Dataset(std::move(y), std::move(x), std::move(z)), roles,
                      std::move(table)};
}

std::vector<std::string> coef_names(const ColumnRoles& roles) {
    std::vector<std::string> names{"intercept"};
    names.insert(names.end(), roles.covariates.begin(), roles.covariates.end());
    return names;
}

struct FitOptions {
    std::string input;
    std::string config;
    std::optional<std::string> prior;
    std::optional<std::string> response;
    std::optional<std::string> covariates;
    std::optional<std::string> exposures;
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    std::optional<std::size_t> burn_in;
    std::optional<std::string> init;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string out = ".";
};

struct EffectiveFit {
    ColumnRoles roles;
    PriorFlavor flavor = PriorFlavor::informative;
    FitConfig config;
    std::uint64_t seed = 0;
};

EffectiveFit resolve_fit_options(const FitOptions& opt) {
    Json cfg = Json::object();
    if (!opt.config.empty()) cfg = load_json_file(opt.config);

    EffectiveFit eff;
    eff.roles.response =
        opt.response ? *opt.response : cfg.value("response", std::string{});
    if (opt.covariates) {
        eff.roles.covariates = split_list(*opt.covariates);
    } else if (cfg.contains("covariates")) {
        eff.roles.covariates = cfg["covariates"].get<std::vector<std::string>>();
    }
    if (opt.exposures) {
        eff.roles.exposures = split_list(*opt.exposures);
    } else if (cfg.contains("exposures")) {
        eff.roles.exposures = cfg["exposures"].get<std::vector<std::string>>();
    }

    const std::string flavor =
        opt.prior ? *opt.prior : cfg.value("prior", std::string{"informative"});
    if (flavor == "informative") {
        eff.flavor = PriorFlavor::informative;
    } else if (flavor == "flat") {
        eff.flavor = PriorFlavor::flat;
    } else {
        throw InputError("--prior must be 'informative' or 'flat', got '" + flavor + "'");
    }

    eff.config.tolerance = opt.tol ? *opt.tol : cfg.value("tolerance", 1e-2);
    eff.config.max_iterations =
        opt.max_iter ? *opt.max_iter : cfg.value("max_iterations", std::size_t{500});
    eff.config.burn_in = opt.burn_in ? *opt.burn_in : cfg.value("burn_in", std::size_t{10});
    const std::string init =
        opt.init ? *opt.init : cfg.value("init", std::string{"ols-start"});
    if (init == "zeros") {
        eff.config.init = InitStrategy::zeros;
    } else if (init == "ols-start") {
        eff.config.init = InitStrategy::ols_start;
    } else {
        throw InputError("init must be 'zeros' or 'ols-start', got '" + init + "'");
    }
    eff.seed = opt.seed ? *opt.seed : cfg.value("seed", std::uint64_t{0});
    return eff;
}

void write_fit_outputs(const std::string& out_dir, const LoadedData& loaded,
                       const EffectiveFit& eff, const FitResult& result,
                       const GlsResult& gls, double elicit_s, double fit_s, double gls_s) {
    using csv::format_double;
    using csv::Row;
    fs::create_directories(out_dir);

    const std::vector<std::string> names = coef_names(loaded.roles);
    const VariationalPosterior& post = result.posterior;
    const double z = wald_z(0.95);

    const std::vector<Interval> vi_iv =
        wald_intervals(post.mu_beta, post.sigma_beta, 0.95);
    std::vector<Row> beta_rows;
    for (std::size_t j = 0; j < names.size(); ++j)
        beta_rows.push_back(Row{names[j], format_double(post.mu_beta[j]),
                                format_double(std::sqrt(post.sigma_beta(j, j))),
                                format_double(vi_iv[j].lower),
                                format_double(vi_iv[j].upper)});
    csv::write_csv(out_dir + "/posterior.csv", Row{"coef", "mean", "sd", "lower", "upper"},
                   beta_rows);

    const std::vector<Interval> gls_iv = gls_intervals(gls, 0.95);
    std::vector<Row> gls_rows;
    for (std::size_t j = 0; j < names.size(); ++j)
        gls_rows.push_back(Row{names[j], format_double(gls.beta_gls[j]),
                               format_double(std::sqrt(gls.cov_gls(j, j))),
                               format_double(gls_iv[j].lower),
                               format_double(gls_iv[j].upper),
                               format_double(vi_iv[j].half_width()),
                               format_double(gls_iv[j].half_width())});
    csv::write_csv(out_dir + "/gls.csv",
                   Row{"coef", "estimate", "sd", "lower", "upper", "vi_half_width",
                       "gls_half_width"},
                   gls_rows);

    std::vector<Row> h_rows;
    for (std::size_t i = 0; i < post.mu_h.size(); ++i)
        h_rows.push_back(Row{std::to_string(i), format_double(post.mu_h[i]),
                             format_double(std::sqrt(std::max(post.sigma_h(i, i), 0.0)))});
    csv::write_csv(out_dir + "/h_posterior.csv", Row{"index", "mean", "sd"}, h_rows);
    (void)z;

    std::vector<Row> trace_rows;
    for (std::size_t k = 0; k < result.trace.objective_values.size(); ++k)
        trace_rows.push_back(Row{std::to_string(k + 1),
                                 format_double(result.trace.objective_values[k])});
    csv::write_csv(out_dir + "/trace.csv", Row{"iteration", "objective"}, trace_rows);

    std::vector<std::string> sh_header(post.sigma_h.cols());
    for (std::size_t j = 0; j < sh_header.size(); ++j) sh_header[j] = "h" + std::to_string(j);
    csv::write_numeric_csv(out_dir + "/sigma_qh.csv", sh_header, post.sigma_h);

    // canonical copy of the columns used, role order, original headers
    {
        std::vector<std::string> header{loaded.roles.response};
        std::vector<const la::Vector*> cols{
            &loaded.table.columns[loaded.table.column(loaded.roles.response)]};
        for (const std::string& c : loaded.roles.covariates) {
            header.push_back(c);
            cols.push_back(&loaded.table.columns[loaded.table.column(c)]);
        }
        for (const std::string& e : loaded.roles.exposures) {
            header.push_back(e);
            cols.push_back(&loaded.table.columns[loaded.table.column(e)]);
        }
        std::vector<Row> rows(loaded.dataset.n());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (const la::Vector* col : cols)
                rows[i].push_back(format_double((*col)[i]));
        csv::write_csv(out_dir + "/dataset.csv", header, rows);
    }

    csv::write_csv(out_dir + "/timing.csv", Row{"stage", "seconds"},
                   {Row{"prior_elicitation", format_double(elicit_s)},
                    Row{"vi_fit", format_double(fit_s)},
                    Row{"gls_correction", format_double(gls_s)}});

    Json meta;
    meta["version"] = kVersion;
    meta["prior"] = result.prior_used.is_flat() ? "flat" : "informative";
    meta["columns"] = Json{{"response", loaded.roles.response},
                           {"covariates", loaded.roles.covariates},
                           {"exposures", loaded.roles.exposures}};
    meta["fit_config"] =
        Json{{"tolerance", eff.config.tolerance},
             {"max_iterations", eff.config.max_iterations},
             {"burn_in", eff.config.burn_in},
             {"init", eff.config.init == InitStrategy::zeros ? "zeros" : "ols-start"},
             {"seed", eff.seed}};
    la::Vector beta_sd(names.size());
    for (std::size_t j = 0; j < names.size(); ++j)
        beta_sd[j] = std::sqrt(post.sigma_beta(j, j));
    meta["results"] = Json{{"sigma2_map", result.sigma2_map},
                           {"nu_sigma_q", post.nu_sigma_q},
                           {"scale_sigma_q", post.scale_sigma_q},
                           {"nu_tau_q", post.nu_tau_q},
                           {"scale_tau_q", post.scale_tau_q},
                           {"iterations", result.trace.iterations},
                           {"converged", result.trace.converged},
                           {"mu_beta", post.mu_beta},
                           {"beta_sd", beta_sd}};
    if (!result.prior_used.is_flat()) {
        Json prior_json;
        prior_json["mu"] = result.prior_used.mu();
        Json sigma_rows = Json::array();
        for (std::size_t i = 0; i < result.prior_used.sigma().rows(); ++i) {
            la::Vector row(result.prior_used.sigma().row(i),
                           result.prior_used.sigma().row(i) +
                               result.prior_used.sigma().cols());
            sigma_rows.push_back(row);
        }
        prior_json["sigma"] = sigma_rows;
        prior_json["nu_sigma"] = result.prior_used.nu_sigma();
        prior_json["sigma0_sq"] = result.prior_used.sigma0_sq();
        prior_json["nu_tau"] = result.prior_used.nu_tau();
        prior_json["tau0"] = result.prior_used.tau0();
        meta["prior_hyperparameters"] = prior_json;
    }
    meta["config_hash"] = hex64(fnv1a64(meta.dump()));
    write_json_file(meta, out_dir + "/fit.json");
}

int cmd_fit(const FitOptions& opt) {
    const EffectiveFit eff = resolve_fit_options(opt);
    const LoadedData loaded = load_dataset(opt.input, eff.roles);

    const auto t0 = Clock::now();
    const KernelMatrix kernel = nearest_pd(quadratic_kernel(loaded.dataset.z()));
    const PriorSpec prior = eff.flavor == PriorFlavor::informative
                                ? elicit_priors(loaded.dataset)
                                : PriorSpec::flat();
    const double elicit_s = seconds_since(t0);

    const auto t1 = Clock::now();
    const FitResult result = fit(loaded.dataset, prior, kernel, eff.config);
    const double fit_s = seconds_since(t1);

    const auto t2 = Clock::now();
    const GlsResult gls = gls_correct(result, loaded.dataset);
    const double gls_s = seconds_since(t2);

    write_fit_outputs(opt.out, loaded, eff, result, gls, elicit_s, fit_s, gls_s);

    std::cout << (result.trace.converged ? "converged" : "stopped") << " after "
              << result.trace.iterations << " iterations; sigma2 MAP = "
              << csv::format_double(result.sigma2_map) << "\n"
              << "outputs written to " << opt.out << "\n";
    return 0;
}

// ---- gls ----

struct GlsOptions {
    std::string input; // fit output directory
    std::string out;   // defaults to input
};

int cmd_gls(const GlsOptions& opt) {
    const std::string dir = opt.input;
    const std::string out_dir = opt.out.empty() ? dir : opt.out;
    for (const char* artifact :
         {"/fit.json", "/dataset.csv", "/sigma_qh.csv", "/h_posterior.csv"})
        if (!fs::exists(dir + artifact))
            throw InputError("missing fit artifact '" + dir + artifact +
                             "'; run `fit` first");

    const Json meta = load_json_file(dir + "/fit.json");
    ColumnRoles roles;
    try {
        roles.response = meta.at("columns").at("response").get<std::string>();
        roles.covariates =
            meta.at("columns").at("covariates").get<std::vector<std::string>>();
        roles.exposures =
            meta.at("columns").at("exposures").get<std::vector<std::string>>();
    } catch (const Json::exception& e) {
        throw InputError(std::string{"fit.json is missing column roles: "} + e.what());
    }

    const auto t0 = Clock::now();
    const LoadedData loaded = load_dataset(dir + "/dataset.csv", roles);
    const std::size_t n = loaded.dataset.n();
    const std::size_t p = loaded.dataset.p();

    csv::NumericTable sh = csv::read_numeric_csv(dir + "/sigma_qh.csv");
    if (sh.headers.size() != n || sh.row_count() != n)
        throw InputError("sigma_qh.csv does not match the dataset dimension");
    la::Matrix sigma_h(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) sigma_h(i, j) = sh.columns[j][i];

    csv::NumericTable hp = csv::read_numeric_csv(dir + "/h_posterior.csv");
    if (hp.row_count() != n) throw InputError("h_posterior.csv does not match the dataset");
    la::Vector mu_h = hp.columns[hp.column("mean")];

    la::Vector beta_mean, beta_sd;
    try {
        beta_mean = meta.at("results").at("mu_beta").get<la::Vector>();
        beta_sd = meta.at("results").at("beta_sd").get<la::Vector>();
    } catch (const Json::exception& e) {
        throw InputError(std::string{"fit.json is missing the beta posterior: "} + e.what());
    }
    if (beta_mean.size() != p || beta_sd.size() != p)
        throw InputError("fit.json beta posterior does not match the dataset");

    FitResult fr;
    fr.posterior.mu_h = std::move(mu_h);
    fr.posterior.sigma_h = std::move(sigma_h);
    fr.posterior.mu_beta = beta_mean;
    la::Matrix sigma_beta(p, p);
    for (std::size_t j = 0; j < p; ++j) sigma_beta(j, j) = beta_sd[j] * beta_sd[j];
    fr.posterior.sigma_beta = std::move(sigma_beta);
    try {
        fr.posterior.nu_sigma_q = meta.at("results").at("nu_sigma_q").get<double>();
        fr.posterior.scale_sigma_q = meta.at("results").at("scale_sigma_q").get<double>();
        fr.posterior.nu_tau_q = meta.at("results").at("nu_tau_q").get<double>();
        fr.posterior.scale_tau_q = meta.at("results").at("scale_tau_q").get<double>();
        fr.sigma2_map = meta.at("results").at("sigma2_map").get<double>();
        fr.trace.converged = meta.at("results").at("converged").get<bool>();
        fr.trace.iterations = meta.at("results").at("iterations").get<std::size_t>();
    } catch (const Json::exception& e) {
        throw InputError(std::string{"fit.json is missing results: "} + e.what());
    }

    const GlsResult gls = gls_correct(fr, loaded.dataset);
    const double gls_s = seconds_since(t0);

    using csv::format_double;
    using csv::Row;
    fs::create_directories(out_dir);
    const std::vector<std::string> names = coef_names(roles);
    const std::vector<Interval> gls_iv = gls_intervals(gls, 0.95);
    const double z = wald_z(0.95);
    std::vector<Row> rows;
    for (std::size_t j = 0; j < names.size(); ++j)
        rows.push_back(Row{names[j], format_double(gls.beta_gls[j]),
                           format_double(std::sqrt(gls.cov_gls(j, j))),
                           format_double(gls_iv[j].lower), format_double(gls_iv[j].upper),
                           format_double(z * beta_sd[j]),
                           format_double(gls_iv[j].half_width())});
    csv::write_csv(out_dir + "/gls.csv",
                   Row{"coef", "estimate", "sd", "lower", "upper", "vi_half_width",
                       "gls_half_width"},
                   rows);
    csv::write_csv(out_dir + "/gls_timing.csv", Row{"stage", "seconds"},
                   {Row{"gls_correction", format_double(gls_s)}});
    std::cout << "GLS correction written to " << out_dir << "/gls.csv\n";
    return 0;
}

// ---- simulate ----

struct SimulateOptions {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    std::optional<std::size_t> burn_in;
};

void merge_population(const Json& j, sim::PopulationSpec& spec) {
    spec.population_size = j.value("population_size", spec.population_size);
    spec.covariate_count = j.value("covariate_count", spec.covariate_count);
    if (j.contains("beta_true")) spec.beta_true = j["beta_true"].get<la::Vector>();
    spec.sigma_true = j.value("sigma_true", spec.sigma_true);
    if (j.contains("pollutant_means"))
        spec.pollutant_means = j["pollutant_means"].get<std::array<double, 4>>();
    spec.pollutant_log_sd = j.value("pollutant_log_sd", spec.pollutant_log_sd);
    spec.seed = j.value("seed", spec.seed);
    spec.histogram_bins = j.value("histogram_bins", spec.histogram_bins);
}

void merge_plan(const Json& j, sim::ExperimentPlan& plan) {
    if (j.contains("sample_sizes"))
        plan.sample_sizes = j["sample_sizes"].get<std::vector<std::size_t>>();
    plan.replications = j.value("replications", plan.replications);
    if (j.contains("methods")) {
        plan.methods.clear();
        for (const auto& m : j["methods"])
            plan.methods.push_back(sim::method_from_name(m.get<std::string>()));
    }
    plan.fit_config.tolerance = j.value("tolerance", plan.fit_config.tolerance);
    plan.fit_config.max_iterations =
        j.value("max_iterations", plan.fit_config.max_iterations);
    plan.fit_config.burn_in = j.value("burn_in", plan.fit_config.burn_in);
    if (j.contains("init"))
        plan.fit_config.init = j["init"].get<std::string>() == "zeros"
                                   ? InitStrategy::zeros
                                   : InitStrategy::ols_start;
    plan.level = j.value("level", plan.level);
    plan.seed = j.value("seed", plan.seed);
    plan.threads = j.value("threads", plan.threads);
}

int cmd_simulate(const SimulateOptions& opt) {
    sim::PopulationSpec pop_spec;
    sim::ExperimentPlan plan;
    if (!opt.config.empty()) {
        const Json cfg = load_json_file(opt.config);
        if (cfg.contains("population")) merge_population(cfg["population"], pop_spec);
        if (cfg.contains("plan")) merge_plan(cfg["plan"], plan);
    }
    if (opt.seed) {
        pop_spec.seed = *opt.seed;
        plan.seed = *opt.seed;
    }
    if (opt.tol) plan.fit_config.tolerance = *opt.tol;
    if (opt.max_iter) plan.fit_config.max_iterations = *opt.max_iter;
    if (opt.burn_in) plan.fit_config.burn_in = *opt.burn_in;
    if (opt.threads || std::getenv("BKMR_VI_THREADS"))
        plan.threads = threads_or_env(opt.threads);

    const sim::Population pop = sim::generate_population(pop_spec);
    const sim::CoverageReport report = sim::run_experiment(pop, pop_spec, plan);

    fs::create_directories(opt.out);
    sim::write_report_json(report, opt.out + "/report.json");
    sim::write_report_csvs(report, opt.out);

    // effective config echoed from the report itself, hashed for exact replay
    const Json written = load_json_file(opt.out + "/report.json");
    Json effective;
    effective["population"] = written.at("population");
    effective["plan"] = written.at("plan");

    std::size_t total_failures = 0;
    for (const sim::FailureRow& row : report.failures) total_failures += row.failures;

    Json manifest;
    manifest["version"] = kVersion;
    manifest["seed"] = Json{{"population", pop_spec.seed}, {"plan", plan.seed}};
    manifest["config_hash"] = hex64(fnv1a64(effective.dump()));
    manifest["effective_config"] = effective;
    manifest["failures"] = total_failures;
    manifest["regenerated_draws"] = report.regenerated_draws;
    write_json_file(manifest, opt.out + "/manifest.json");

    std::cout << sim::summary_text(report);
    std::cout << "report written to " << opt.out << "\n";
    return 0;
}

// ---- report ----

struct ReportOptions {
    std::string input;
    std::string out;
};

int cmd_report(const ReportOptions& opt) {
    const sim::CoverageReport report = sim::read_report_json(opt.input);
    if (!opt.out.empty()) {
        fs::create_directories(opt.out);
        sim::write_report_csvs(report, opt.out);
        std::cout << "tables written to " << opt.out << "\n";
    }
    std::cout << sim::summary_text(report);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Variational inference for Bayesian kernel machine regression"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit one dataset from CSV");
    fit_cmd->add_option("--input", fit_opt.input, "input CSV with a header row")
        ->required();
    fit_cmd->add_option("--config", fit_opt.config, "JSON config file");
    fit_cmd->add_option("--prior", fit_opt.prior, "informative or flat");
    fit_cmd->add_option("--response", fit_opt.response, "response column name");
    fit_cmd->add_option("--covariates", fit_opt.covariates,
                        "comma-separated covariate columns (intercept is added)");
    fit_cmd->add_option("--exposures", fit_opt.exposures,
                        "comma-separated exposure columns");
    fit_cmd->add_option("--tol", fit_opt.tol, "convergence tolerance on the objective");
    fit_cmd->add_option("--max-iter", fit_opt.max_iter, "iteration cap");
    fit_cmd->add_option("--burn-in", fit_opt.burn_in, "iterations before testing convergence");
    fit_cmd->add_option("--init", fit_opt.init, "zeros or ols-start");
    fit_cmd->add_option("--seed", fit_opt.seed, "seed recorded in the manifest");
    fit_cmd->add_option("--threads", fit_opt.threads, "accepted for symmetry; fit is serial");
    fit_cmd->add_option("--out", fit_opt.out, "output directory");

    GlsOptions gls_opt;
    CLI::App* gls_cmd = app.add_subcommand("gls", "recompute the GLS correction from fit outputs");
    gls_cmd->add_option("--input", gls_opt.input, "fit output directory")->required();
    gls_cmd->add_option("--out", gls_opt.out, "output directory (defaults to --input)");

    SimulateOptions sim_opt;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "run the coverage experiment");
    sim_cmd->add_option("--config", sim_opt.config, "JSON config with population/plan");
    sim_cmd->add_option("--out", sim_opt.out, "output directory");
    sim_cmd->add_option("--seed", sim_opt.seed, "seed for population and plan");
    sim_cmd->add_option("--threads", sim_opt.threads,
                        "worker threads (default: BKMR_VI_THREADS or all cores)");
    sim_cmd->add_option("--tol", sim_opt.tol, "fit tolerance");
    sim_cmd->add_option("--max-iter", sim_opt.max_iter, "fit iteration cap");
    sim_cmd->add_option("--burn-in", sim_opt.burn_in, "fit burn-in");

    ReportOptions rep_opt;
    CLI::App* rep_cmd = app.add_subcommand("report", "render tables from a report.json");
    rep_cmd->add_option("--input", rep_opt.input, "report.json path")->required();
    rep_cmd->add_option("--out", rep_opt.out, "directory for regenerated CSV tables");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit_opt);
        if (gls_cmd->parsed()) return cmd_gls(gls_opt);
        if (sim_cmd->parsed()) return cmd_simulate(sim_opt);
        if (rep_cmd->parsed()) return cmd_report(rep_opt);
        std::cerr << "no command given\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << " (trace length "
                  << e.trace().objective_values.size() << ")\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace bkmr::cli
