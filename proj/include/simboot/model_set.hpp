#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "simboot/dataset.hpp"
#include "simboot/linalg.hpp"
#include "simboot/quadratic_basis.hpp"

namespace simboot {

/// The K models of a grid, precomputed for one design.
///
/// Holds what depends on the design only (kernel supports, weights, the
/// data-world curvature of the quadratic families) so that many datasets and
/// many bootstrap replicates can be evaluated without redoing that work.
/// Quadratic-family parameters are kept in the standardized basis
/// s = (x - x_k) / h of each model; global coefficients are available through
/// global_theta().
class ModelSet {
public:
    ModelSet(std::span<const double> x, const ModelGrid& grid);

    /// Per-dataset fits in the internal coordinates of every model.
    struct Fits {
        std::vector<double> theta;  // K x p
        std::vector<double> value;  // fitted value at the center, or the quantile estimate
        std::vector<double> y;      // observations in internal order
        std::vector<std::size_t> order;  // quantile family: y order of this dataset
    };

    /// Scratch buffers reused across replicates by one worker.
    struct Workspace {
        std::vector<double> u;
        std::vector<double> uy;
        std::vector<double> cumulative;
    };

    const ModelGrid& grid() const noexcept { return grid_; }
    Family family() const noexcept { return grid_.family; }
    std::size_t size() const noexcept { return grid_.size(); }
    std::size_t dimension() const noexcept { return grid_.dimension(); }
    std::size_t observations() const noexcept { return n_; }

    Fits fit(std::span<const double> y) const;

    /// Wraps known target parameters (global coordinates) as fits.
    Fits from_targets(const std::vector<std::vector<double>>& targets) const;

    /// s_k = sqrt(2 (L*_k(theta*_k) - L*_k(theta_k))) for multipliers u given
    /// in original observation order. Returns false, leaving `out`
    /// unspecified, when the bootstrap curvature guard rejects u.
    bool bootstrap_statistics(const Fits& fits, std::span<const double> u, std::span<double> out,
                              Workspace& ws) const;

    /// sqrt(2 (L_k(fit_k) - L_k(target_k))) for every model.
    void true_statistics(const Fits& fits, const Fits& targets, std::span<double> out) const;

    /// Half-width of the likelihood set {L(fit) - L(theta) <= z^2 / 2} for the
    /// fitted value at the center, per unit of z (quadratic families).
    double halfwidth_per_unit(std::size_t k) const;

    double weight_sum(std::size_t k) const { return weight_sum_[k]; }
    std::vector<double> global_theta(const Fits& fits, std::size_t k) const;
    QuadraticBasis basis(std::size_t k) const;

private:
    struct Support {
        std::size_t lo = 0;
        std::size_t hi = 0;
        std::size_t offset = 0;
    };

    void gather(std::span<const double> source, std::span<double> target) const;

    ModelGrid grid_;
    std::size_t n_ = 0;
    std::vector<std::size_t> x_order_;  // empty when the design is already sorted
    std::vector<Support> support_;
    std::vector<double> coef_;  // LC: w; LQ: w s^j for j = 0..4, blocked per model
    std::vector<double> weight_sum_;
    std::vector<linalg::Mat3> curvature_;        // LQ data-world curvature, standardized
    std::vector<linalg::Ldlt<3>> factor_;        // its factorization
};

}  // namespace simboot
