#include "simboot/models.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "simboot/error.hpp"
#include "simboot/kernel.hpp"
#include "simboot/quadratic_basis.hpp"

namespace simboot {

namespace {

double at_or_one(std::span<const double> v, std::size_t i) { return v.empty() ? 1.0 : v[i]; }

void check_lengths(const Dataset& data, std::span<const double> w, std::span<const double> u) {
    data.validate();
    if (!w.empty() && w.size() != data.size())
        throw DimensionMismatch("weight vector length " + std::to_string(w.size()) +
                                " does not match n = " + std::to_string(data.size()));
    if (!u.empty() && u.size() != data.size())
        throw DimensionMismatch("multiplier vector length " + std::to_string(u.size()) +
                                " does not match n = " + std::to_string(data.size()));
}

double weight_total(std::span<const double> w, std::size_t n) {
    const double total = w.empty() ? static_cast<double>(n) : std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= kDegenerateWeightFloor * static_cast<double>(n))
        throw DegenerateWeights("kernel weights sum to zero");
    return total;
}

void check_theta(Family family, std::span<const double> theta) {
    if (theta.size() != parameter_dimension(family))
        throw DimensionMismatch("parameter of family " + std::string(to_string(family)) +
                                " needs dimension " + std::to_string(parameter_dimension(family)) +
                                ", got " + std::to_string(theta.size()));
}

double quadratic_mean(std::span<const double> theta, double x) {
    return theta[0] + x * (theta[1] + x * theta[2]);
}

void check_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw InvalidTau("quantile index must lie in (0, 1), got " + std::to_string(tau));
}

}  // namespace

FitResult lc_fit(const Dataset& data, std::span<const double> w, std::span<const double> u) {
    check_lengths(data, w, u);
    const std::size_t n = data.size();
    const double total = weight_total(w, n);

    double s = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = at_or_one(w, i) * at_or_one(u, i);
        s += c;
        sy += c * data.y[i];
    }
    if (!(s > kDegenerateWeightFloor * total))
        throw NonPositiveCurvature("local constant curvature sum w u is not positive");

    FitResult fit;
    const double theta = sy / s;
    fit.theta = {theta};
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = data.y[i] - theta;
        ll += r * r * at_or_one(w, i) * at_or_one(u, i);
    }
    fit.max_loglik = -0.5 * ll;
    fit.curvature = linalg::Matrix(1, 1, s);
    return fit;
}

FitResult lq_fit(const Dataset& data, std::span<const double> w, std::span<const double> u) {
    check_lengths(data, w, u);
    const std::size_t n = data.size();
    const double total = weight_total(w, n);

    QuadraticBasis basis;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += at_or_one(w, i) * data.x[i];
    mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = data.x[i] - mean;
        var += at_or_one(w, i) * d * d;
    }
    var /= total;
    basis.origin = mean;
    basis.scale = var > 0.0 ? std::sqrt(var) : 1.0;

    QuadraticMoments mom;
    for (std::size_t i = 0; i < n; ++i)
        mom.add((data.x[i] - basis.origin) / basis.scale, at_or_one(w, i) * at_or_one(u, i),
                data.y[i]);
    const auto factor = linalg::Ldlt<3>::factor(mom.curvature());
    if (!factor) throw NonPositiveCurvature("local quadratic curvature is not positive definite");
    const auto local = factor->solve(mom.rhs());

    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto psi = basis.regressor(data.x[i]);
        const double r = data.y[i] - (psi[0] * local[0] + psi[1] * local[1] + psi[2] * local[2]);
        ll += r * r * at_or_one(w, i) * at_or_one(u, i);
    }

    FitResult fit;
    const auto global = basis.to_global(local);
    fit.theta.assign(global.begin(), global.end());
    fit.max_loglik = -0.5 * ll;
    fit.curvature = linalg::Matrix::from(basis.curvature_to_global(mom.curvature()));
    return fit;
}

namespace detail {

std::size_t weighted_quantile_index(std::span<const double> sorted_weights, double total,
                                    double tau) {
    const double target = tau * total;
    double cumulative = 0.0;
    for (std::size_t j = 0; j < sorted_weights.size(); ++j) {
        cumulative += sorted_weights[j];
        if (cumulative >= target) return j;
    }
    return sorted_weights.size() - 1;
}

}  // namespace detail

FitResult qt_fit(const Dataset& data, double tau, std::span<const double> u) {
    check_tau(tau);
    check_lengths(data, {}, u);
    const std::size_t n = data.size();
    for (double ui : u)
        if (ui < 0.0) throw NegativeMultiplier("quantile family needs nonnegative multipliers");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.y[a] < data.y[b]; });
    std::vector<double> sorted_u(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sorted_u[j] = at_or_one(u, order[j]);
        total += sorted_u[j];
    }
    if (!(total > 0.0)) throw DegenerateWeights("multipliers sum to zero");

    const double theta = data.y[order[detail::weighted_quantile_index(sorted_u, total, tau)]];
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += check_loss(data.y[i] - theta, tau) * at_or_one(u, i);

    FitResult fit;
    fit.theta = {theta};
    fit.max_loglik = -loss;
    return fit;
}

double loglik(Family family, std::span<const double> theta, const Dataset& data,
              std::span<const double> w, std::span<const double> u, double tau) {
    check_theta(family, theta);
    check_lengths(data, w, u);
    double sum = 0.0;
    switch (family) {
        case Family::LocalConstant:
            for (std::size_t i = 0; i < data.size(); ++i) {
                const double r = data.y[i] - theta[0];
                sum -= 0.5 * r * r * at_or_one(w, i) * at_or_one(u, i);
            }
            break;
        case Family::LocalQuadratic:
            for (std::size_t i = 0; i < data.size(); ++i) {
                const double r = data.y[i] - quadratic_mean(theta, data.x[i]);
                sum -= 0.5 * r * r * at_or_one(w, i) * at_or_one(u, i);
            }
            break;
        case Family::QuantileLocation:
            check_tau(tau);
            for (std::size_t i = 0; i < data.size(); ++i)
                sum -= check_loss(data.y[i] - theta[0], tau) * at_or_one(w, i) * at_or_one(u, i);
            break;
    }
    return sum;
}

double loglik_gap(Family family, std::span<const double> a, std::span<const double> b,
                  const Dataset& data, std::span<const double> w, std::span<const double> u,
                  double tau) {
    check_theta(family, a);
    check_theta(family, b);
    check_lengths(data, w, u);
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double c = at_or_one(w, i) * at_or_one(u, i);
        double term = 0.0;
        if (family == Family::QuantileLocation) {
            check_tau(tau);
            term = check_loss(data.y[i] - b[0], tau) - check_loss(data.y[i] - a[0], tau);
        } else {
            // (y - ma)^2 - (y - mb)^2 = (mb - ma)(2y - ma - mb)
            const double ma = family == Family::LocalConstant ? a[0] : quadratic_mean(a, data.x[i]);
            const double mb = family == Family::LocalConstant ? b[0] : quadratic_mean(b, data.x[i]);
            term = -0.5 * (mb - ma) * ((data.y[i] - ma) + (data.y[i] - mb));
        }
        sum += c * term;
    }
    return sum;
}

double standard_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::vector<std::vector<double>> target_params(const DgpSpec& dgp, const ModelGrid& grid) {
    dgp.validate();
    grid.validate();
    std::vector<std::vector<double>> targets;
    targets.reserve(grid.size());

    if (grid.family == Family::QuantileLocation) {
        if (!is_constant(dgp.mean))
            throw InvalidArgument("quantile targets are defined for constant mean functions only");
        const double level = dgp.f(0.0);
        for (double tau : grid.taus)
            targets.push_back({level + dgp.noise_sd * standard_normal_quantile(tau)});
        return targets;
    }

    const Dataset truth{dgp.design(), dgp.mean_at_design()};
    for (double center : grid.centers) {
        const auto w = local_weights(center, grid.kernel, truth.x);
        targets.push_back(grid.family == Family::LocalConstant ? lc_fit(truth, w).theta
                                                               : lq_fit(truth, w).theta);
    }
    return targets;
}

}  // namespace simboot
