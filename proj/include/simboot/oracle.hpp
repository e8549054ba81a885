#pragma once

// Monte-Carlo ground truth on the synthetic design: true-world likelihood
// ratios, the true multiplicity correction and the coverage experiment.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simboot/bootstrap.hpp"
#include "simboot/dataset.hpp"
#include "simboot/dgp.hpp"
#include "simboot/rng.hpp"

namespace simboot {

/// Stream tags under the master seed.
inline constexpr std::uint64_t kDataStream = 1;
inline constexpr std::uint64_t kBootstrapStream = 2;
inline constexpr std::uint64_t kRepetitionStream = 3;

/// y_i = f(x_i) + noise_sd * N(0, 1) on the equidistant design, drawn from
/// data substream `index`.
Dataset sample_dataset(const DgpSpec& dgp, const RngSpec& rng, std::uint64_t index);

/// Column m holds sqrt(2 (L_k(fit_k) - L_k(theta*_k))) on dataset m.
LrMatrix true_lr_matrix(const DgpSpec& dgp, const ModelGrid& grid, std::size_t datasets,
                        const RngSpec& rng, unsigned threads = 1);

/// The multiplicity correction applied to true-world statistics.
CorrectionResult mc_correction(const LrMatrix& true_lr, double alpha);

struct CoverageReport {
    std::size_t datasets = 0;
    std::size_t replicates = 0;
    std::vector<double> alphas;
    std::vector<double> coverage_frequency;
    /// Mean corrected confidence level 1 - c over datasets (bootstrap).
    std::vector<double> mean_corrected_level_bootstrap;
    /// 1 - q(alpha) from the true statistics of the same datasets; NaN when
    /// alpha * M < 1.
    std::vector<double> mc_corrected_level;
    std::size_t rejected_replicates = 0;
    std::size_t conservative_floors = 0;
};

/// For every dataset: bootstrap critical values at the corrected level and
/// whether all K true statistics stay within them.
CoverageReport coverage_experiment(const DgpSpec& dgp, const ModelGrid& grid,
                                   std::span<const double> alphas, std::size_t datasets,
                                   std::size_t replicates, WeightScheme scheme, const RngSpec& rng,
                                   unsigned threads = 1);

struct CorrectionComparison {
    std::vector<double> alphas;
    std::vector<double> mc_corrected_level;         // mean of 1 - q(alpha)
    std::vector<double> bootstrap_corrected_level;  // mean of 1 - q*(alpha)
    std::size_t repetitions = 0;
    std::size_t rejected_replicates = 0;
};

/// Repeats, `repetitions` times: q(alpha) from M fresh true-world samples and
/// q*(alpha) from a B-replicate bootstrap on one further sample.
CorrectionComparison correction_experiment(const DgpSpec& dgp, const ModelGrid& grid,
                                           std::span<const double> alphas, std::size_t datasets,
                                           std::size_t replicates, std::size_t repetitions,
                                           WeightScheme scheme, const RngSpec& rng,
                                           unsigned threads = 1);

}  // namespace simboot
