#include "simboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simboot/error.hpp"
#include "simboot/models.hpp"
#include "simboot/parallel.hpp"

namespace simboot {

LrMatrix::LrMatrix(std::size_t models, std::size_t replicates)
    : models_(models), replicates_(replicates), values_(models * replicates, 0.0) {}

LrMatrix LrMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw InvalidArgument("empty statistic matrix");
    LrMatrix lr(rows.size(), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != lr.replicates_) throw DimensionMismatch("ragged statistic matrix");
        std::copy(rows[k].begin(), rows[k].end(), lr.values_.begin() + k * lr.replicates_);
    }
    lr.finalize();
    return lr;
}

void LrMatrix::finalize() {
    sorted_ = values_;
    for (std::size_t k = 0; k < models_; ++k) {
        auto first = sorted_.begin() + static_cast<std::ptrdiff_t>(k * replicates_);
        std::sort(first, first + static_cast<std::ptrdiff_t>(replicates_));
    }
}

LrMatrix build_lr_matrix(const ModelSet& models, const ModelSet::Fits& fits, std::size_t replicates,
                         WeightScheme scheme, const RngSpec& rng, const BootstrapOptions& options) {
    if (replicates == 0) throw InvalidArgument("at least one bootstrap replicate is required");
    if (models.family() == Family::QuantileLocation && !is_nonnegative(scheme))
        throw NegativeMultiplier("the quantile family needs a nonnegative multiplier scheme");

    const std::size_t K = models.size();
    const std::size_t n = models.observations();
    LrMatrix lr(K, replicates);
    std::vector<std::size_t> redraws(replicates, 0);

    const unsigned workers = std::max(1u, options.threads);
    std::vector<ModelSet::Workspace> spaces(workers);
    std::vector<std::vector<double>> u(workers, std::vector<double>(n, 1.0));
    std::vector<std::vector<double>> column(workers, std::vector<double>(K));

    parallel_for(replicates, workers, [&](unsigned worker, std::size_t b) {
        auto& uw = u[worker];
        auto& col = column[worker];
        std::size_t attempt = 0;
        for (;;) {
            if (!options.unit_multipliers) {
                const std::uint64_t stream =
                    attempt == 0 ? b : replicates + b * kMaxRedraws + (attempt - 1);
                draw_weights(scheme, rng, stream, uw);
            }
            if (models.bootstrap_statistics(fits, uw, col, spaces[worker])) break;
            if (++attempt > kMaxRedraws) throw TooManyRejections(b, attempt);
        }
        redraws[b] = attempt;
        for (std::size_t k = 0; k < K; ++k) lr.at(k, b) = col[k];
    });

    std::size_t rejected = 0;
    for (auto r : redraws) rejected += r;
    lr.set_rejected_replicates(rejected);
    lr.finalize();
    return lr;
}

LrMatrix build_lr_matrix(const Dataset& data, const ModelGrid& grid, std::size_t replicates,
                         WeightScheme scheme, const RngSpec& rng, const BootstrapOptions& options) {
    data.validate();
    const ModelSet models(data.x, grid);
    return build_lr_matrix(models, models.fit(data.y), replicates, scheme, rng, options);
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidAlpha("alpha must lie in (0, 1), got " + std::to_string(alpha));
}

}  // namespace

std::size_t exceedance_budget(double alpha, std::size_t replicates) {
    check_alpha(alpha);
    if (replicates == 0) throw InvalidArgument("no replicates");
    const double B = static_cast<double>(replicates);
    auto j = static_cast<std::size_t>(std::floor(alpha * B));
    // settle floating-point edge cases against the comparison j / B <= alpha
    while (j < replicates && static_cast<double>(j + 1) / B <= alpha) ++j;
    while (j > 0 && static_cast<double>(j) / B > alpha) --j;
    return j;
}

double marginal_quantile(std::span<const double> sorted_column, double alpha) {
    const std::size_t B = sorted_column.size();
    const std::size_t j = exceedance_budget(alpha, B);
    return sorted_column[B - j - 1];
}

std::vector<double> critical_values(const LrMatrix& lr, std::size_t budget) {
    const std::size_t B = lr.replicates();
    if (budget >= B) throw InvalidArgument("exceedance budget must be below the replicate count");
    std::vector<double> z(lr.models());
    for (std::size_t k = 0; k < lr.models(); ++k) z[k] = lr.sorted_row(k)[B - budget - 1];
    return z;
}

double union_exceedance(const LrMatrix& lr, std::span<const double> critical) {
    if (critical.size() != lr.models())
        throw DimensionMismatch("one critical value per model is required");
    const std::size_t B = lr.replicates();
    std::vector<char> hit(B, 0);
    for (std::size_t k = 0; k < lr.models(); ++k) {
        const auto row = lr.row(k);
        const double z = critical[k];
        for (std::size_t b = 0; b < B; ++b) hit[b] |= static_cast<char>(row[b] > z);
    }
    std::size_t count = 0;
    for (char h : hit) count += static_cast<std::size_t>(h);
    return static_cast<double>(count) / static_cast<double>(B);
}

CorrectionResult multiplicity_correction(const LrMatrix& lr, double alpha) {
    check_alpha(alpha);
    const std::size_t B = lr.replicates();
    const std::size_t top = exceedance_budget(alpha, B);
    if (top == 0)
        throw InvalidAlpha("alpha * B must be at least one (alpha = " + std::to_string(alpha) +
                           ", B = " + std::to_string(B) + ")");

    auto frequency = [&](std::size_t j) { return union_exceedance(lr, critical_values(lr, j)); };

    CorrectionResult out;
    out.alpha = alpha;
    std::size_t best = 0;
    if (frequency(1) <= alpha) {
        // invariant: frequency(lo) <= alpha; frequency(hi) > alpha or hi = top + 1
        std::size_t lo = 1;
        std::size_t hi = top + 1;
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (frequency(mid) <= alpha) lo = mid;
            else hi = mid;
        }
        best = lo;
    } else {
        best = 1;
        out.conservative_floor = true;
    }
    out.level_count = best;
    out.level = static_cast<double>(best) / static_cast<double>(B);
    out.critical_values = critical_values(lr, best);
    out.union_frequency = union_exceedance(lr, out.critical_values);
    return out;
}

namespace {

// Endpoints of {theta : L(fit) - L(theta) <= z^2 / 2} for the check loss,
// located by bisection on each side of the fit.
std::pair<double, double> quantile_likelihood_set(std::span<const double> y, double tau,
                                                  double fit, double z) {
    const double n = static_cast<double>(y.size());
    const double half = 0.5 * z * z;
    auto loss = [&](double theta) {
        double s = 0.0;
        for (double v : y) s += check_loss(v - theta, tau);
        return s;
    };
    const double base = loss(fit);
    auto excess = [&](double theta) { return loss(theta) - base - half; };
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());

    auto solve = [&](double inside, double outside) {
        for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-13 * (1.0 + std::abs(inside)); ++it) {
            const double mid = 0.5 * (inside + outside);
            if (excess(mid) <= 0.0) inside = mid;
            else outside = mid;
        }
        return inside;
    };
    const double upper = solve(fit, *ymax + half / ((1.0 - tau) * n) + 1.0);
    const double lower = solve(fit, *ymin - half / (tau * n) - 1.0);
    return {lower, upper};
}

}  // namespace

std::vector<BandRow> band_rows(const ModelSet& models, const ModelSet::Fits& fits,
                               std::span<const double> critical) {
    const auto& grid = models.grid();
    std::vector<BandRow> rows(models.size());
    for (std::size_t k = 0; k < models.size(); ++k) {
        auto& row = rows[k];
        row.estimate = fits.value[k];
        row.critical_value = critical[k];
        if (grid.family == Family::QuantileLocation) {
            row.center = grid.taus[k];
            const auto [lo, hi] = quantile_likelihood_set(fits.y, grid.taus[k], fits.value[k], critical[k]);
            row.lower = lo;
            row.upper = hi;
        } else {
            row.center = grid.centers[k];
            const double half = critical[k] * models.halfwidth_per_unit(k);
            row.lower = row.estimate - half;
            row.upper = row.estimate + half;
        }
    }
    return rows;
}

Band simultaneous_band(const Dataset& data, const ModelGrid& grid, double alpha,
                       std::size_t replicates, WeightScheme scheme, const RngSpec& rng,
                       const BootstrapOptions& options) {
    data.validate();
    const ModelSet models(data.x, grid);
    const auto fits = models.fit(data.y);
    const auto lr = build_lr_matrix(models, fits, replicates, scheme, rng, options);
    Band band;
    band.correction = multiplicity_correction(lr, alpha);
    band.rows = band_rows(models, fits, band.correction.critical_values);
    band.rejected_replicates = lr.rejected_replicates();
    return band;
}

}  // namespace simboot
