#include "bkmr/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bkmr/csv.hpp"

namespace bkmr::sim {

namespace {

using Json = nlohmann::ordered_json;

Json methods_to_json(const std::vector<Method>& methods) {
    Json arr = Json::array();
    for (Method m : methods) arr.push_back(method_name(m));
    return arr;
}

Json population_to_json(const PopulationSpec& s) {
    return Json{{"population_size", s.population_size},
                {"covariate_count", s.covariate_count},
                {"beta_true", s.beta_true},
                {"sigma_true", s.sigma_true},
                {"pollutant_means", s.pollutant_means},
                {"pollutant_log_sd", s.pollutant_log_sd},
                {"seed", s.seed},
                {"histogram_bins", s.histogram_bins}};
}

PopulationSpec population_from_json(const Json& j) {
    PopulationSpec s;
    s.population_size = j.at("population_size").get<std::size_t>();
    s.covariate_count = j.at("covariate_count").get<std::size_t>();
    s.beta_true = j.at("beta_true").get<la::Vector>();
    s.sigma_true = j.at("sigma_true").get<double>();
    s.pollutant_means = j.at("pollutant_means").get<std::array<double, 4>>();
    s.pollutant_log_sd = j.at("pollutant_log_sd").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.histogram_bins = j.at("histogram_bins").get<std::size_t>();
    return s;
}

Json plan_to_json(const ExperimentPlan& p) {
    return Json{{"sample_sizes", p.sample_sizes},
                {"replications", p.replications},
                {"methods", methods_to_json(p.methods)},
                {"tolerance", p.fit_config.tolerance},
                {"max_iterations", p.fit_config.max_iterations},
                {"burn_in", p.fit_config.burn_in},
                {"init", p.fit_config.init == InitStrategy::zeros ? "zeros" : "ols-start"},
                {"level", p.level},
                {"seed", p.seed},
                {"threads", p.threads}};
}

ExperimentPlan plan_from_json(const Json& j) {
    ExperimentPlan p;
    p.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    p.replications = j.at("replications").get<std::size_t>();
    p.methods.clear();
    for (const auto& m : j.at("methods")) p.methods.push_back(method_from_name(m));
    p.fit_config.tolerance = j.at("tolerance").get<double>();
    p.fit_config.max_iterations = j.at("max_iterations").get<std::size_t>();
    p.fit_config.burn_in = j.at("burn_in").get<std::size_t>();
    p.fit_config.init = j.at("init").get<std::string>() == "zeros" ? InitStrategy::zeros
                                                                   : InitStrategy::ols_start;
    p.level = j.at("level").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.threads = j.at("threads").get<std::size_t>();
    return p;
}

std::string coef_name(std::size_t j) { return "beta" + std::to_string(j); }

} // namespace

Method method_from_name(const std::string& name) {
    for (Method m : kAllMethods)
        if (name == method_name(m)) return m;
    throw InputError("unknown method '" + name + "' (expected vi1, vi2, gls1, gls2)");
}

void write_report_json(const CoverageReport& report, const std::string& path) {
    Json j;
    j["population"] = population_to_json(report.population);
    j["plan"] = plan_to_json(report.plan);

    Json covariate = Json::array();
    for (const CovariateCoverageRow& row : report.covariate)
        covariate.push_back(Json{{"method", method_name(row.method)},
                                 {"n", row.n},
                                 {"coverage", row.coverage},
                                 {"mean_half_width", row.mean_half_width},
                                 {"reps_used", row.reps_used}});
    j["covariate_coverage"] = covariate;

    Json pollutant = Json::array();
    for (const PollutantCoverageRow& row : report.pollutant)
        pollutant.push_back(Json{{"method", method_name(row.method)},
                                 {"n", row.n},
                                 {"coverage", row.coverage},
                                 {"hits", row.hits},
                                 {"total", row.total},
                                 {"reps_used", row.reps_used}});
    j["pollutant_coverage"] = pollutant;

    Json sigma2 = Json::array();
    for (const Sigma2Row& row : report.sigma2)
        sigma2.push_back(Json{{"method", method_name(row.method)},
                              {"n", row.n},
                              {"ratio_mean", row.ratio_mean},
                              {"ratio_sd", row.ratio_sd},
                              {"ratio_p2_5", row.ratio_p025},
                              {"ratio_median", row.ratio_median},
                              {"ratio_p97_5", row.ratio_p975},
                              {"mse", row.mse},
                              {"reps_used", row.reps_used}});
    j["sigma2_map"] = sigma2;

    Json timing = Json::array();
    for (const TimingRow& row : report.timing)
        timing.push_back(Json{{"stage", row.stage},
                              {"n", row.n},
                              {"mean_seconds", row.mean_seconds},
                              {"sd_seconds", row.sd_seconds},
                              {"min_seconds", row.min_seconds},
                              {"max_seconds", row.max_seconds},
                              {"count", row.count}});
    j["timing"] = timing;

    Json failures = Json::array();
    for (const FailureRow& row : report.failures)
        failures.push_back(Json{{"method", method_name(row.method)},
                                {"n", row.n},
                                {"failures", row.failures}});
    j["failures"] = failures;
    j["failure_messages"] = report.failure_messages;
    j["regenerated_draws"] = report.regenerated_draws;
    j["h_histogram"] = Json{{"edges", report.h_hist_edges}, {"counts", report.h_hist_counts}};

    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("report: cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw InputError("report: write failed for '" + path + "'");
}

CoverageReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("report: cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError("report: failed to parse '" + path + "': " + e.what());
    }

    CoverageReport report;
    try {
        report.population = population_from_json(j.at("population"));
        report.plan = plan_from_json(j.at("plan"));
        for (const auto& row : j.at("covariate_coverage"))
            report.covariate.push_back(
                CovariateCoverageRow{method_from_name(row.at("method")),
                                     row.at("n").get<std::size_t>(),
                                     row.at("coverage").get<la::Vector>(),
                                     row.at("mean_half_width").get<la::Vector>(),
                                     row.at("reps_used").get<std::size_t>()});
        for (const auto& row : j.at("pollutant_coverage"))
            report.pollutant.push_back(
                PollutantCoverageRow{method_from_name(row.at("method")),
                                     row.at("n").get<std::size_t>(),
                                     row.at("coverage").get<double>(),
                                     row.at("hits").get<std::uint64_t>(),
                                     row.at("total").get<std::uint64_t>(),
                                     row.at("reps_used").get<std::size_t>()});
        for (const auto& row : j.at("sigma2_map"))
            report.sigma2.push_back(Sigma2Row{method_from_name(row.at("method")),
                                              row.at("n").get<std::size_t>(),
                                              row.at("ratio_mean").get<double>(),
                                              row.at("ratio_sd").get<double>(),
                                              row.at("ratio_p2_5").get<double>(),
                                              row.at("ratio_median").get<double>(),
                                              row.at("ratio_p97_5").get<double>(),
                                              row.at("mse").get<double>(),
                                              row.at("reps_used").get<std::size_t>()});
        for (const auto& row : j.at("timing"))
            report.timing.push_back(TimingRow{row.at("stage").get<std::string>(),
                                              row.at("n").get<std::size_t>(),
                                              row.at("mean_seconds").get<double>(),
                                              row.at("sd_seconds").get<double>(),
                                              row.at("min_seconds").get<double>(),
                                              row.at("max_seconds").get<double>(),
                                              row.at("count").get<std::size_t>()});
        for (const auto& row : j.at("failures"))
            report.failures.push_back(FailureRow{method_from_name(row.at("method")),
                                                 row.at("n").get<std::size_t>(),
                                                 row.at("failures").get<std::size_t>()});
        report.failure_messages =
            j.at("failure_messages").get<std::vector<std::string>>();
        report.regenerated_draws = j.at("regenerated_draws").get<std::uint64_t>();
        report.h_hist_edges = j.at("h_histogram").at("edges").get<la::Vector>();
        report.h_hist_counts =
            j.at("h_histogram").at("counts").get<std::vector<std::uint64_t>>();
    } catch (const Json::exception& e) {
        throw InputError("report: '" + path + "' is not a valid report file: " + e.what());
    }
    return report;
}

void write_report_csvs(const CoverageReport& report, const std::string& dir) {
    using csv::format_double;
    using csv::format_unsigned;
    using csv::Row;

    const std::size_t p = report.population.beta_true.size();

    std::vector<Row> t1;
    for (const CovariateCoverageRow& row : report.covariate)
        for (std::size_t j = 0; j < p; ++j)
            t1.push_back(Row{method_name(row.method), std::to_string(row.n), coef_name(j),
                             format_double(row.reps_used ? row.coverage[j] : 0.0),
                             format_double(row.reps_used ? row.mean_half_width[j] : 0.0),
                             std::to_string(row.reps_used)});
    csv::write_csv(dir + "/table1_covariate_coverage.csv",
                   Row{"method", "n", "coef", "coverage", "mean_half_width", "reps_used"},
                   t1);

    std::vector<Row> t2;
    for (const PollutantCoverageRow& row : report.pollutant)
        t2.push_back(Row{method_name(row.method), std::to_string(row.n),
                         format_double(row.coverage), format_unsigned(row.hits),
                         format_unsigned(row.total), std::to_string(row.reps_used)});
    csv::write_csv(dir + "/table2_pollutant_coverage.csv",
                   Row{"method", "n", "coverage", "hits", "total", "reps_used"}, t2);

    std::vector<Row> t3;
    for (const Sigma2Row& row : report.sigma2)
        t3.push_back(Row{method_name(row.method), std::to_string(row.n),
                         format_double(row.ratio_mean), format_double(row.ratio_sd),
                         format_double(row.ratio_p025), format_double(row.ratio_median),
                         format_double(row.ratio_p975), format_double(row.mse),
                         std::to_string(row.reps_used)});
    csv::write_csv(dir + "/table3_sigma2_map.csv",
                   Row{"method", "n", "ratio_mean", "ratio_sd", "ratio_p2_5", "ratio_median",
                       "ratio_p97_5", "mse", "reps_used"},
                   t3);

    std::vector<Row> t4;
    for (const TimingRow& row : report.timing)
        t4.push_back(Row{row.stage, std::to_string(row.n), format_double(row.mean_seconds),
                         format_double(row.sd_seconds), format_double(row.min_seconds),
                         format_double(row.max_seconds), std::to_string(row.count)});
    csv::write_csv(dir + "/table4_timing.csv",
                   Row{"stage", "n", "mean_seconds", "sd_seconds", "min_seconds",
                       "max_seconds", "count"},
                   t4);

    std::vector<Row> hist;
    for (std::size_t b = 0; b + 1 < report.h_hist_edges.size(); ++b)
        hist.push_back(Row{format_double(report.h_hist_edges[b]),
                           format_double(report.h_hist_edges[b + 1]),
                           format_unsigned(report.h_hist_counts[b])});
    csv::write_csv(dir + "/figure1_h_histogram.csv", Row{"bin_left", "bin_right", "count"},
                   hist);

    std::vector<Row> series;
    for (const CovariateCoverageRow& row : report.covariate)
        for (std::size_t j = 0; j < p; ++j)
            series.push_back(Row{std::to_string(row.n), method_name(row.method),
                                 coef_name(j),
                                 format_double(row.reps_used ? row.coverage[j] : 0.0)});
    csv::write_csv(dir + "/figure2_coverage_series.csv",
                   Row{"n", "method", "coef", "coverage"}, series);

    std::vector<Row> fails;
    for (const FailureRow& row : report.failures)
        fails.push_back(Row{method_name(row.method), std::to_string(row.n),
                            std::to_string(row.failures)});
    csv::write_csv(dir + "/failures.csv", Row{"method", "n", "failures"}, fails);
}

std::string summary_text(const CoverageReport& report) {
    std::ostringstream out;
    out << "replications per cell: " << report.plan.replications << "\n";
    out << "covariate coverage (level " << report.plan.level << "):\n";
    for (const CovariateCoverageRow& row : report.covariate) {
        out << "  " << method_name(row.method) << " n=" << row.n << ":";
        for (double c : row.coverage) {
            out << ' ';
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%.3f", c);
            out << buf;
        }
        out << "  (reps " << row.reps_used << ")\n";
    }
    out << "pollutant-effect coverage (aggregated):\n";
    for (const PollutantCoverageRow& row : report.pollutant) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.3f", row.coverage);
        out << "  " << method_name(row.method) << " n=" << row.n << ": " << buf << "\n";
    }
    out << "sigma2 MAP, 100*estimate/truth:\n";
    for (const Sigma2Row& row : report.sigma2) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "mean %.2f sd %.2f mse %.2f", row.ratio_mean,
                      row.ratio_sd, row.mse);
        out << "  " << method_name(row.method) << " n=" << row.n << ": " << buf << "\n";
    }
    std::size_t total_failures = 0;
    for (const FailureRow& row : report.failures) total_failures += row.failures;
    out << "failed fits: " << total_failures << "\n";
    return out.str();
}

} // namespace bkmr::sim
