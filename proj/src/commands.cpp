#include "simboot/commands.hpp"

#include <cmath>
#include <limits>

#include "simboot/bootstrap.hpp"
#include "simboot/diagnostics.hpp"
#include "simboot/error.hpp"
#include "simboot/model_set.hpp"
#include "simboot/models.hpp"
#include "simboot/oracle.hpp"

namespace simboot {

namespace {

void require_synthetic(const RunConfig& c, std::string_view command) {
    if (!c.data.empty())
        throw ConfigError("data", std::string(command) + " runs on the synthetic design only");
}

Dataset band_dataset(const RunConfig& c, const DgpSpec& dgp, const RngSpec& rng) {
    if (c.data.empty()) return sample_dataset(dgp, rng, 0);
    Dataset data;
    for (const auto& [x, y] : read_two_columns(c.data)) {
        data.x.push_back(x);
        data.y.push_back(y);
    }
    try {
        data.validate();
    } catch (const Error& e) {
        throw ConfigError("data", e.what());
    }
    return data;
}

double target_value(const ModelGrid& grid, std::size_t k, const std::vector<double>& theta) {
    if (grid.family != Family::LocalQuadratic) return theta[0];
    const double x = grid.centers[k];
    return theta[0] + x * (theta[1] + x * theta[2]);
}

}  // namespace

CsvTable run_band(const RunConfig& c) {
    validate(c);
    const auto dgp = c.dgp_spec();
    const auto grid = c.grid();
    const RngSpec rng{c.seed};
    const auto data = band_dataset(c, dgp, rng);

    BootstrapOptions options;
    options.threads = c.worker_threads();
    const auto band = simultaneous_band(data, grid, c.band_alpha, c.b, c.scheme,
                                        rng.substream(kBootstrapStream).substream(0), options);

    std::vector<std::vector<double>> targets;
    if (c.data.empty()) targets = target_params(dgp, grid);

    CsvTable table;
    table.header = {"center", "theta_hat", "lower", "upper", "critical_value", "target_theta_star"};
    for (std::size_t k = 0; k < band.rows.size(); ++k) {
        const auto& r = band.rows[k];
        const double target = targets.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : target_value(grid, k, targets[k]);
        table.add_row({r.center, r.estimate, r.lower, r.upper, r.critical_value, target});
    }
    return table;
}

CsvTable run_coverage(const RunConfig& c) {
    validate(c);
    require_synthetic(c, "coverage");
    const auto report = coverage_experiment(c.dgp_spec(), c.grid(), c.alphas,
                                            c.datasets_for(Command::Coverage), c.b, c.scheme,
                                            RngSpec{c.seed}, c.worker_threads());
    CsvTable table;
    table.header = {"alpha", "coverage_frequency", "mean_corrected_level_bootstrap"};
    for (std::size_t a = 0; a < report.alphas.size(); ++a)
        table.add_row({report.alphas[a], report.coverage_frequency[a],
                       report.mean_corrected_level_bootstrap[a]});
    return table;
}

CsvTable run_correction(const RunConfig& c) {
    validate(c);
    require_synthetic(c, "correction");
    const auto result = correction_experiment(c.dgp_spec(), c.grid(), c.alphas,
                                              c.datasets_for(Command::Correction), c.b, c.reps,
                                              c.scheme, RngSpec{c.seed}, c.worker_threads());
    CsvTable table;
    table.header = {"alpha", "mc_corrected_level", "bootstrap_corrected_level"};
    for (std::size_t a = 0; a < result.alphas.size(); ++a)
        table.add_row({result.alphas[a], result.mc_corrected_level[a],
                       result.bootstrap_corrected_level[a]});
    return table;
}

CsvTable run_bias(const RunConfig& c) {
    validate(c);
    require_synthetic(c, "bias");
    if (c.family == Family::QuantileLocation)
        throw ConfigError("family", "bias curves are defined for lc and lq only");

    const auto dgp = c.dgp_spec();
    const auto grid = c.grid();
    const RngSpec rng{c.seed};
    const unsigned threads = c.worker_threads();

    const auto data = sample_dataset(dgp, rng, 0);
    BootstrapOptions options;
    options.threads = threads;
    const auto band = simultaneous_band(data, grid, c.band_alpha, c.b, c.scheme,
                                        rng.substream(kBootstrapStream).substream(0), options);

    const auto true_lr = true_lr_matrix(dgp, grid, c.datasets_for(Command::Bias), rng, threads);
    const auto mc = mc_correction(true_lr, c.band_alpha);
    const ModelSet models(dgp.design(), grid);

    CsvTable table;
    table.header = {"center", "bias_norm", "band_width_bootstrap", "band_width_mc"};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double bias = grid.family == Family::LocalConstant ? bias_norm_lc(dgp, grid, k)
                                                                 : bias_norm_lq(dgp, grid, k);
        const auto& r = band.rows[k];
        const double mc_width = 2.0 * mc.critical_values[k] * models.halfwidth_per_unit(k);
        table.add_row({grid.centers[k], bias, r.upper - r.lower, mc_width});
    }
    return table;
}

std::string_view output_name(Command command) {
    switch (command) {
        case Command::Band: return "band";
        case Command::Coverage: return "coverage";
        case Command::Correction: return "correction";
        case Command::Bias: return "bias";
    }
    return "output";
}

std::filesystem::path run_command(Command command, const RunConfig& config) {
    CsvTable table;
    switch (command) {
        case Command::Band: table = run_band(config); break;
        case Command::Coverage: table = run_coverage(config); break;
        case Command::Correction: table = run_correction(config); break;
        case Command::Bias: table = run_bias(config); break;
    }
    const std::filesystem::path dir(config.out);
    std::filesystem::create_directories(dir);
    auto path = dir / (std::string(output_name(command)) + ".csv");
    table.write(path);
    return path;
}

}  // namespace simboot
