#pragma once

#include <filesystem>
#include <string_view>

#include "simboot/config.hpp"
#include "simboot/csv.hpp"

namespace simboot {

/// One row per model: center, theta_hat, lower, upper, critical_value, target_theta_star.
CsvTable run_band(const RunConfig& config);

/// One row per alpha: alpha, coverage_frequency, mean_corrected_level_bootstrap.
CsvTable run_coverage(const RunConfig& config);

/// One row per alpha: alpha, mc_corrected_level, bootstrap_corrected_level.
CsvTable run_correction(const RunConfig& config);

/// One row per model: center, bias_norm, band_width_bootstrap, band_width_mc.
CsvTable run_bias(const RunConfig& config);

std::string_view output_name(Command command);

/// Runs the command and writes <out>/<name>.csv; returns the path.
std::filesystem::path run_command(Command command, const RunConfig& config);

}  // namespace simboot
