#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "simboot/kernel.hpp"
#include "simboot/linalg.hpp"

namespace simboot {

/// Design points and observations of one sample.
struct Dataset {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const noexcept { return y.size(); }
    void validate() const;
};

enum class Family { LocalConstant, LocalQuadratic, QuantileLocation };

std::string_view to_string(Family family);

constexpr std::size_t parameter_dimension(Family family) noexcept {
    return family == Family::LocalQuadratic ? 3 : 1;
}

constexpr bool is_quadratic(Family family) noexcept {
    return family != Family::QuantileLocation;
}

/// The K models evaluated simultaneously: kernel-regression centers or, for
/// the quantile family, a grid of quantile indices.
struct ModelGrid {
    Family family = Family::LocalConstant;
    std::vector<double> centers;
    KernelSpec kernel;
    std::vector<double> taus;

    std::size_t size() const noexcept {
        return family == Family::QuantileLocation ? taus.size() : centers.size();
    }
    std::size_t dimension() const noexcept { return parameter_dimension(family); }
    void validate() const;

    /// K equidistant centers on [0, 1] with endpoints included (K = 1 gives 0.5).
    static ModelGrid regression(Family family, std::size_t count, double bandwidth);
    /// tau_k = k / (K + 1), k = 1..K.
    static ModelGrid quantiles(std::size_t count);
};

struct FitResult {
    std::vector<double> theta;
    double max_loglik = 0.0;
    /// Negative Hessian of the weighted quadratic loss; empty for the quantile family.
    std::optional<linalg::Matrix> curvature;
};

}  // namespace simboot
