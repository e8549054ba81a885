#pragma once

#include <span>
#include <vector>

namespace simboot {

enum class KernelFamily { Epanechnikov };

struct KernelSpec {
    KernelFamily family = KernelFamily::Epanechnikov;
    double bandwidth = 0.3;

    void validate() const;
};

/// Relative threshold below which a weight sum counts as degenerate.
inline constexpr double kDegenerateWeightFloor = 1e-12;

/// Epanechnikov kernel 0.75 (1 - u^2) on [-1, 1], zero outside.
constexpr double kernel_value(double u) noexcept {
    const double a = u < 0 ? -u : u;
    return a <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

/// w_i = K((center - x_i) / h) for every design point. Throws DegenerateWeights
/// when the weights sum to (numerically) zero.
std::vector<double> local_weights(double center, const KernelSpec& kernel,
                                  std::span<const double> x);

}  // namespace simboot
