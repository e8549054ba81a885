#include "simboot/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simboot/error.hpp"
#include "simboot/kernel.hpp"
#include "simboot/models.hpp"
#include "simboot/quadratic_basis.hpp"

namespace simboot {

namespace {

struct LocalInformation {
    linalg::Mat3 d2{};
    linalg::Mat3 g{};   // sum w^2 Psi Psi^T
    linalg::Mat3 b2{};
    linalg::Mat3 h2{};
};

// Residuals f - model below this are rounding noise of the fit and count as zero.
double residual_floor(const std::vector<double>& f, const std::vector<double>& w) {
    double scale = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (w[i] > 0.0) scale = std::max(scale, std::fabs(f[i]));
    return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

double clean(double residual, double floor) { return std::fabs(residual) <= floor ? 0.0 : residual; }

void add_outer(linalg::Mat3& m, const linalg::Vec3& psi, double c) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] += c * psi[i] * psi[j];
}

// Matrices of the local quadratic model k in its standardized basis.
LocalInformation local_quadratic_information(const DgpSpec& dgp, const ModelGrid& grid,
                                             std::size_t k, QuadraticBasis& basis) {
    const auto x = dgp.design();
    const auto f = dgp.mean_at_design();
    const auto w = local_weights(grid.centers[k], grid.kernel, x);
    const auto target = lq_fit(Dataset{x, f}, w).theta;
    basis = QuadraticBasis{grid.centers[k], grid.kernel.bandwidth};
    const auto local = basis.to_local({target[0], target[1], target[2]});
    const double var = dgp.noise_sd * dgp.noise_sd;
    const double floor = residual_floor(f, w);

    LocalInformation info;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (w[i] == 0.0) continue;
        const auto psi = basis.regressor(x[i]);
        const double bias =
            clean(f[i] - (psi[0] * local[0] + psi[1] * local[1] + psi[2] * local[2]), floor);
        const double w2 = w[i] * w[i];
        add_outer(info.d2, psi, w[i]);
        add_outer(info.g, psi, w2);
        add_outer(info.b2, psi, w2 * bias * bias);
        add_outer(info.h2, psi, w2 * (bias * bias + var));
    }
    return info;
}

linalg::Matrix inverse_sqrt(const linalg::Matrix& a) {
    const auto eig = linalg::jacobi_eigen(a);
    const std::size_t n = a.rows();
    const double largest = *std::max_element(eig.values.begin(), eig.values.end());
    if (!(largest > 0.0)) throw SingularH2("information matrix H^2 is not positive definite");
    for (double v : eig.values)
        if (!(v > 1e-14 * largest)) throw SingularH2("information matrix H^2 is singular");
    linalg::Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l)
                out(i, j) += eig.vectors(i, l) * eig.vectors(j, l) / std::sqrt(eig.values[l]);
    return out;
}

struct LcSums {
    double d2 = 0.0;
    double bias2 = 0.0;  // sum w^2 (f - theta*)^2
    double w2 = 0.0;     // sum w^2
};

LcSums local_constant_sums(const DgpSpec& dgp, const ModelGrid& grid, std::size_t k) {
    const auto x = dgp.design();
    const auto f = dgp.mean_at_design();
    const auto w = local_weights(grid.centers[k], grid.kernel, x);
    const double target = lc_fit(Dataset{x, f}, w).theta[0];
    const double floor = residual_floor(f, w);
    LcSums s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = clean(f[i] - target, floor);
        s.d2 += w[i];
        s.bias2 += w[i] * w[i] * d * d;
        s.w2 += w[i] * w[i];
    }
    return s;
}

void check_model(const DgpSpec& dgp, const ModelGrid& grid, std::size_t k, Family expected) {
    dgp.validate();
    grid.validate();
    if (grid.family != expected) throw InvalidArgument("diagnostic does not match the grid family");
    if (k >= grid.size()) throw InvalidArgument("model index out of range");
}

}  // namespace

double bias_norm_lc(const DgpSpec& dgp, const ModelGrid& grid, std::size_t k) {
    check_model(dgp, grid, k, Family::LocalConstant);
    const auto s = local_constant_sums(dgp, grid, k);
    const double var = dgp.noise_sd * dgp.noise_sd;
    const double denom = s.bias2 + var * s.w2;
    if (!(denom > 0.0)) throw SingularH2("H^2 vanishes for a noiseless constant model");
    return s.bias2 / denom;
}

double bias_norm_lq(const DgpSpec& dgp, const ModelGrid& grid, std::size_t k) {
    check_model(dgp, grid, k, Family::LocalQuadratic);
    QuadraticBasis basis;
    const auto info = local_quadratic_information(dgp, grid, k, basis);
    const auto hinv = inverse_sqrt(linalg::Matrix::from(info.h2));
    const double var = dgp.noise_sd * dgp.noise_sd;
    auto m = hinv * linalg::Matrix::from(info.g) * hinv;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - var * m(i, j);
    return linalg::spectral_norm(m);
}

BiasDiagnostics bias_diagnostics(const DgpSpec& dgp, const ModelGrid& grid, std::size_t k) {
    BiasDiagnostics out;
    if (grid.family == Family::LocalConstant) {
        check_model(dgp, grid, k, Family::LocalConstant);
        const auto s = local_constant_sums(dgp, grid, k);
        const double var = dgp.noise_sd * dgp.noise_sd;
        out.d2 = linalg::Matrix(1, 1, s.d2);
        out.h2 = linalg::Matrix(1, 1, s.bias2 + var * s.w2);
        out.b2 = linalg::Matrix(1, 1, s.bias2);
        out.bias_norm = bias_norm_lc(dgp, grid, k);
        return out;
    }
    check_model(dgp, grid, k, Family::LocalQuadratic);
    QuadraticBasis basis;
    const auto info = local_quadratic_information(dgp, grid, k, basis);
    out.d2 = linalg::Matrix::from(basis.curvature_to_global(info.d2));
    out.h2 = linalg::Matrix::from(basis.curvature_to_global(info.h2));
    out.b2 = linalg::Matrix::from(basis.curvature_to_global(info.b2));
    out.bias_norm = bias_norm_lq(dgp, grid, k);
    return out;
}

namespace {

void check_quadratic(Family family) {
    if (!is_quadratic(family))
        throw InvalidArgument("the Wilks identity needs a quadratic family with a curvature");
}

// Score and curvature in the standardized basis of lq_fit, together with the
// target expressed in that basis.
struct LocalScore {
    linalg::Mat3 curvature{};
    linalg::Vec3 score{};
};

}  // namespace

std::vector<double> score_vector(Family family, const Dataset& data, std::span<const double> w,
                                 std::span<const double> theta_star) {
    check_quadratic(family);
    const auto fit = family == Family::LocalConstant ? lc_fit(data, w) : lq_fit(data, w);
    const auto& d2 = *fit.curvature;
    const std::size_t p = d2.rows();
    if (theta_star.size() != p) throw DimensionMismatch("target dimension mismatch");

    // grad L(theta*) = sum w (y - Psi^T theta*) Psi
    std::vector<double> grad(p, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double x = data.x[i];
        const double mean = p == 1 ? theta_star[0] : theta_star[0] + x * (theta_star[1] + x * theta_star[2]);
        const double r = w[i] * (data.y[i] - mean);
        double psi = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            grad[j] += r * psi;
            psi *= x;
        }
    }
    const auto dinv = inverse_sqrt(d2);
    std::vector<double> xi(p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) xi[i] += dinv(i, j) * grad[j];
    return xi;
}

double wilks_residual(Family family, const Dataset& data, std::span<const double> w,
                      std::span<const double> theta_star) {
    check_quadratic(family);
    if (family == Family::LocalConstant) {
        const auto fit = lc_fit(data, w);
        const double gap = loglik_gap(family, fit.theta, theta_star, data, w);
        double total = 0.0;
        double grad = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            total += w[i];
            grad += w[i] * (data.y[i] - theta_star[0]);
        }
        const double xi = std::abs(grad) / std::sqrt(total);
        return std::abs(std::sqrt(2.0 * std::max(0.0, gap)) - xi);
    }

    if (theta_star.size() != 3) throw DimensionMismatch("target dimension mismatch");
    const auto fit = lq_fit(data, w);

    // Both routes are evaluated in the standardized basis around the weighted
    // design mean, where fitted values and the score are well conditioned.
    double total = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        total += w[i];
        mean += w[i] * data.x[i];
    }
    mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) var += w[i] * (data.x[i] - mean) * (data.x[i] - mean);
    const QuadraticBasis basis{mean, var > 0.0 ? std::sqrt(var / total) : 1.0};
    const auto fit_local = basis.to_local({fit.theta[0], fit.theta[1], fit.theta[2]});
    const auto star_local = basis.to_local({theta_star[0], theta_star[1], theta_star[2]});

    LocalScore ls;
    double gap = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto psi = basis.regressor(data.x[i]);
        const double a = psi[0] * fit_local[0] + psi[1] * fit_local[1] + psi[2] * fit_local[2];
        const double b = psi[0] * star_local[0] + psi[1] * star_local[1] + psi[2] * star_local[2];
        // l_i(fit) - l_i(theta*)
        gap += -0.5 * w[i] * (b - a) * ((data.y[i] - a) + (data.y[i] - b));
        add_outer(ls.curvature, psi, w[i]);
        for (int j = 0; j < 3; ++j) ls.score[j] += w[i] * (data.y[i] - b) * psi[j];
    }
    const auto factor = linalg::Ldlt<3>::factor(ls.curvature);
    if (!factor) throw NonPositiveCurvature("local quadratic curvature is not positive definite");
    const auto solved = factor->solve(ls.score);
    const double xi2 = ls.score[0] * solved[0] + ls.score[1] * solved[1] + ls.score[2] * solved[2];
    return std::abs(std::sqrt(2.0 * std::max(0.0, gap)) - std::sqrt(std::max(0.0, xi2)));
}

}  // namespace simboot
