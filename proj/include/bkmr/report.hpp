#pragma once

#include <string>

#include "bkmr/sim.hpp"

// Serialization of simulation reports: a JSON document holding every table
// plus flat CSV files for the coverage, bias, and timing tables and the
// figure data (histogram of pollutant effects, coverage-versus-n series).

namespace bkmr::sim {

Method method_from_name(const std::string& name);

void write_report_json(const CoverageReport& report, const std::string& path);
CoverageReport read_report_json(const std::string& path);

// Writes table1_covariate_coverage.csv, table2_pollutant_coverage.csv,
// table3_sigma2_map.csv, table4_timing.csv, figure1_h_histogram.csv,
// figure2_coverage_series.csv, failures.csv into `dir`. Everything except
// table4_timing.csv is deterministic for a fixed seed.
void write_report_csvs(const CoverageReport& report, const std::string& dir);

std::string summary_text(const CoverageReport& report);

} // namespace bkmr::sim
