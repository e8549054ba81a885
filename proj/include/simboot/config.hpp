#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simboot/dataset.hpp"
#include "simboot/dgp.hpp"
#include "simboot/rng.hpp"

namespace simboot {

enum class Command { Band, Coverage, Correction, Bias };

/// Everything a run needs. Defaults reproduce the full-scale experiments.
struct RunConfig {
    Family family = Family::LocalConstant;
    std::size_t n = 400;
    std::size_t k = 71;
    std::vector<double> centers;  // empty: k equidistant centers on [0, 1]
    std::vector<double> taus;     // empty: tau_j = j / (k + 1)
    double h = 0.3;
    std::size_t b = 10000;
    std::optional<std::size_t> m;  // empty: 5000 for coverage, 10000 otherwise
    std::vector<double> alphas = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50};
    WeightScheme scheme = WeightScheme::Gaussian;
    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0: all hardware threads
    std::string out = ".";
    std::string preset = "paper";
    double noise_sd = 1.0;      // 0 gives noiseless samples
    std::string dgp = "bumps";  // bumps | flat | table:PATH
    std::string data;           // optional two-column (x, y) file for the band command
    std::size_t reps = 200;
    double band_alpha = 0.10;

    std::size_t datasets_for(Command command) const;
    unsigned worker_threads() const;
    DgpSpec dgp_spec() const;
    ModelGrid grid() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Defaults, then the preset (an override beats the file), then the file's
/// key=value lines, then the overrides. Throws ConfigError naming the key
/// and, for file entries, the line.
RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      const ConfigOverrides& overrides = {});

RunConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides = {});

/// Emits every key so that parse_config_text(format_config(c)) == c.
std::string format_config(const RunConfig& config);

void validate(const RunConfig& config);

}  // namespace simboot
