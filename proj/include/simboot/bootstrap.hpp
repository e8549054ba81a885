#pragma once

// Simultaneous multiplier bootstrap: the K x B matrix of square-root
// likelihood-ratio statistics, marginal quantiles and the correction of the
// marginal level for multiplicity.

#include <cstddef>
#include <span>
#include <vector>

#include "simboot/dataset.hpp"
#include "simboot/model_set.hpp"
#include "simboot/rng.hpp"

namespace simboot {

/// Maximum curvature-guard redraws for one replicate index.
inline constexpr std::size_t kMaxRedraws = 100;

/// K x B matrix of nonnegative statistics, one row per model, plus a sorted
/// copy of every row.
class LrMatrix {
public:
    LrMatrix() = default;
    LrMatrix(std::size_t models, std::size_t replicates);

    static LrMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t models() const noexcept { return models_; }
    std::size_t replicates() const noexcept { return replicates_; }

    double& at(std::size_t k, std::size_t b) { return values_[k * replicates_ + b]; }
    double at(std::size_t k, std::size_t b) const { return values_[k * replicates_ + b]; }

    std::span<const double> row(std::size_t k) const {
        return {values_.data() + k * replicates_, replicates_};
    }
    std::span<const double> sorted_row(std::size_t k) const {
        return {sorted_.data() + k * replicates_, replicates_};
    }

    /// Rebuilds the sorted rows; call after the last write.
    void finalize();

    std::size_t rejected_replicates() const noexcept { return rejected_; }
    void set_rejected_replicates(std::size_t count) noexcept { rejected_ = count; }

    friend bool operator==(const LrMatrix&, const LrMatrix&) = default;

private:
    std::size_t models_ = 0;
    std::size_t replicates_ = 0;
    std::vector<double> values_;
    std::vector<double> sorted_;
    std::size_t rejected_ = 0;
};

struct BootstrapOptions {
    unsigned threads = 1;
    /// Test hook: every multiplier equals one, so each bootstrap fit
    /// reproduces the data fit.
    bool unit_multipliers = false;
};

/// Step 1: one multiplier vector per replicate, shared by all K models.
/// Replicate b draws from substream b; a rejected draw is replaced by
/// substream B + b * kMaxRedraws + attempt.
LrMatrix build_lr_matrix(const Dataset& data, const ModelGrid& grid, std::size_t replicates,
                         WeightScheme scheme, const RngSpec& rng, const BootstrapOptions& options = {});

/// Same as above on a prepared model set and data fit.
LrMatrix build_lr_matrix(const ModelSet& models, const ModelSet::Fits& fits, std::size_t replicates,
                         WeightScheme scheme, const RngSpec& rng, const BootstrapOptions& options = {});

/// Largest j with j / B <= alpha (the exceedance budget at level alpha).
std::size_t exceedance_budget(double alpha, std::size_t replicates);

/// Smallest z >= 0 with #{b : s_b > z} / B <= alpha, i.e. the order statistic
/// s_(B - j) for j = exceedance_budget(alpha, B).
double marginal_quantile(std::span<const double> sorted_column, double alpha);

/// Critical values of every row at the grid level j / B.
std::vector<double> critical_values(const LrMatrix& lr, std::size_t budget);

/// Fraction of columns in which at least one row strictly exceeds its critical value.
double union_exceedance(const LrMatrix& lr, std::span<const double> critical);

struct CorrectionResult {
    double alpha = 0.0;
    double level = 0.0;            // corrected marginal level c = j / B
    std::size_t level_count = 0;   // j
    std::vector<double> critical_values;
    double union_frequency = 0.0;
    bool conservative_floor = false;  // no grid level met alpha; c fell back to 1 / B
};

/// Largest grid level c = j / B in (0, alpha] whose simultaneous exceedance
/// frequency stays within alpha, found by binary search over j.
CorrectionResult multiplicity_correction(const LrMatrix& lr, double alpha);

struct BandRow {
    double center = 0.0;    // model center (quantile index for the quantile family)
    double estimate = 0.0;  // fitted value at the center
    double lower = 0.0;
    double upper = 0.0;
    double critical_value = 0.0;
};

struct Band {
    std::vector<BandRow> rows;
    CorrectionResult correction;
    std::size_t rejected_replicates = 0;
};

/// Simultaneous confidence band from one dataset.
Band simultaneous_band(const Dataset& data, const ModelGrid& grid, double alpha,
                       std::size_t replicates, WeightScheme scheme, const RngSpec& rng,
                       const BootstrapOptions& options = {});

/// Band rows for given per-model critical values.
std::vector<BandRow> band_rows(const ModelSet& models, const ModelSet::Fits& fits,
                               std::span<const double> critical);

}  // namespace simboot
