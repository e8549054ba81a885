#pragma once

// The three local likelihood families: local constant (Nadaraya-Watson), local
// quadratic and quantile location. Multiplier and weight spans may be empty,
// which stands for the unit vector.

#include <cstddef>
#include <span>
#include <vector>

#include "simboot/dataset.hpp"
#include "simboot/dgp.hpp"

namespace simboot {

/// Check loss rho_tau(r) = r (tau - 1{r < 0}).
constexpr double check_loss(double r, double tau) noexcept {
    return r * (tau - (r < 0.0 ? 1.0 : 0.0));
}

FitResult lc_fit(const Dataset& data, std::span<const double> w, std::span<const double> u = {});

/// Weighted least squares on (1, x, x^2). Throws NonPositiveCurvature when
/// sum w u Psi Psi^T is not safely positive definite.
FitResult lq_fit(const Dataset& data, std::span<const double> w, std::span<const double> u = {});

/// Smallest minimizer of sum u_i rho_tau(y_i - theta): the smallest order
/// statistic whose cumulative multiplier weight reaches tau * sum u.
FitResult qt_fit(const Dataset& data, double tau, std::span<const double> u = {});

/// L(theta) = sum_i l_i(theta) u_i with the family's per-observation term
/// (kernel weights w enter the quadratic families; for the quantile family w
/// acts as an extra observation weight).
double loglik(Family family, std::span<const double> theta, const Dataset& data,
              std::span<const double> w, std::span<const double> u = {}, double tau = 0.5);

/// L(a) - L(b), accumulated per observation so that nearby arguments do not
/// lose precision to cancellation between two large sums.
double loglik_gap(Family family, std::span<const double> a, std::span<const double> b,
                  const Dataset& data, std::span<const double> w, std::span<const double> u = {},
                  double tau = 0.5);

/// Target parameters theta*_k of every model under a known mean function,
/// in the global (1, x, x^2) coordinates for the quadratic family. The
/// quantile family supports constant means only (theta* = level + sd * Phi^-1(tau)).
std::vector<std::vector<double>> target_params(const DgpSpec& dgp, const ModelGrid& grid);

double standard_normal_quantile(double p);

namespace detail {

/// Position (into `sorted_weights`) of the smallest order statistic whose
/// cumulative weight reaches tau * total.
std::size_t weighted_quantile_index(std::span<const double> sorted_weights, double total,
                                    double tau);

}  // namespace detail

}  // namespace simboot
