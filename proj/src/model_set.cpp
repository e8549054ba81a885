#include "simboot/model_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "simboot/error.hpp"
#include "simboot/kernel.hpp"
#include "simboot/models.hpp"

namespace simboot {

namespace {

// Two dot products over one support, four-way split to shorten the
// dependency chains. The summation order is fixed, so results are bit-stable.
inline void dot2(const double* w, const double* a, const double* b, std::size_t len, double& sa,
                 double& sb) {
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    double b0 = 0, b1 = 0, b2 = 0, b3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        a0 += w[i] * a[i];
        a1 += w[i + 1] * a[i + 1];
        a2 += w[i + 2] * a[i + 2];
        a3 += w[i + 3] * a[i + 3];
        b0 += w[i] * b[i];
        b1 += w[i + 1] * b[i + 1];
        b2 += w[i + 2] * b[i + 2];
        b3 += w[i + 3] * b[i + 3];
    }
    for (; i < len; ++i) {
        a0 += w[i] * a[i];
        b0 += w[i] * b[i];
    }
    sa = (a0 + a1) + (a2 + a3);
    sb = (b0 + b1) + (b2 + b3);
}

inline double dot1(const double* w, const double* a, std::size_t len) {
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        a0 += w[i] * a[i];
        a1 += w[i + 1] * a[i + 1];
        a2 += w[i + 2] * a[i + 2];
        a3 += w[i + 3] * a[i + 3];
    }
    for (; i < len; ++i) a0 += w[i] * a[i];
    return (a0 + a1) + (a2 + a3);
}

}  // namespace

ModelSet::ModelSet(std::span<const double> x, const ModelGrid& grid) : grid_(grid), n_(x.size()) {
    grid_.validate();
    if (n_ == 0) throw InvalidArgument("empty design");
    const std::size_t K = grid_.size();
    if (grid_.family == Family::QuantileLocation) return;

    std::vector<double> xs(x.begin(), x.end());
    if (!std::is_sorted(xs.begin(), xs.end())) {
        x_order_.resize(n_);
        std::iota(x_order_.begin(), x_order_.end(), 0);
        std::stable_sort(x_order_.begin(), x_order_.end(),
                         [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
        for (std::size_t i = 0; i < n_; ++i) xs[i] = x[x_order_[i]];
    }

    const double h = grid_.kernel.bandwidth;
    const std::size_t planes = grid_.family == Family::LocalQuadratic ? 5 : 1;
    support_.resize(K);
    weight_sum_.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double c = grid_.centers[k];
        auto& sup = support_[k];
        sup.lo = static_cast<std::size_t>(
            std::lower_bound(xs.begin(), xs.end(), c - h) - xs.begin());
        sup.hi = static_cast<std::size_t>(
            std::upper_bound(xs.begin(), xs.end(), c + h) - xs.begin());
        sup.offset = coef_.size();
        const std::size_t len = sup.hi - sup.lo;
        coef_.resize(coef_.size() + planes * len);

        double total = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            const double s = (xs[sup.lo + i] - c) / h;
            const double w = kernel_value(s);
            total += w;
            double p = w;
            for (std::size_t j = 0; j < planes; ++j) {
                coef_[sup.offset + j * len + i] = p;
                p *= s;
            }
        }
        if (total <= kDegenerateWeightFloor * static_cast<double>(n_))
            throw DegenerateWeights("no design points inside the kernel support of center " +
                                    std::to_string(c));
        weight_sum_[k] = total;

        if (grid_.family == Family::LocalQuadratic) {
            const double* cf = coef_.data() + sup.offset;
            double m[5];
            for (std::size_t j = 0; j < 5; ++j) {
                m[j] = 0.0;
                for (std::size_t i = 0; i < len; ++i) m[j] += cf[j * len + i];
            }
            const linalg::Mat3 curv{{{m[0], m[1], m[2]}, {m[1], m[2], m[3]}, {m[2], m[3], m[4]}}};
            const auto f = linalg::Ldlt<3>::factor(curv);
            if (!f)
                throw NonPositiveCurvature("local quadratic curvature is singular at center " +
                                           std::to_string(c));
            curvature_.push_back(curv);
            factor_.push_back(*f);
        }
    }
}

void ModelSet::gather(std::span<const double> source, std::span<double> target) const {
    if (x_order_.empty()) {
        std::copy(source.begin(), source.end(), target.begin());
    } else {
        for (std::size_t i = 0; i < n_; ++i) target[i] = source[x_order_[i]];
    }
}

QuadraticBasis ModelSet::basis(std::size_t k) const {
    return {grid_.centers[k], grid_.kernel.bandwidth};
}

ModelSet::Fits ModelSet::fit(std::span<const double> y) const {
    if (y.size() != n_) throw DimensionMismatch("observation count does not match the design");
    const std::size_t K = size();
    Fits fits;
    fits.theta.resize(K * dimension());
    fits.value.resize(K);

    if (family() == Family::QuantileLocation) {
        fits.order.resize(n_);
        std::iota(fits.order.begin(), fits.order.end(), 0);
        std::stable_sort(fits.order.begin(), fits.order.end(),
                         [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
        fits.y.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) fits.y[j] = y[fits.order[j]];
        const std::vector<double> ones(n_, 1.0);
        for (std::size_t k = 0; k < K; ++k) {
            const auto j = detail::weighted_quantile_index(ones, static_cast<double>(n_), grid_.taus[k]);
            fits.theta[k] = fits.value[k] = fits.y[j];
        }
        return fits;
    }

    fits.y.resize(n_);
    gather(y, fits.y);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& sup = support_[k];
        const std::size_t len = sup.hi - sup.lo;
        const double* yy = fits.y.data() + sup.lo;
        const double* cf = coef_.data() + sup.offset;
        if (family() == Family::LocalConstant) {
            double s = 0.0;
            for (std::size_t i = 0; i < len; ++i) s += cf[i] * yy[i];
            fits.theta[k] = fits.value[k] = s / weight_sum_[k];
        } else {
            linalg::Vec3 g{};
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t i = 0; i < len; ++i) g[j] += cf[j * len + i] * yy[i];
            const auto theta = factor_[k].solve(g);
            std::copy(theta.begin(), theta.end(), fits.theta.begin() + 3 * k);
            fits.value[k] = theta[0];
        }
    }
    return fits;
}

ModelSet::Fits ModelSet::from_targets(const std::vector<std::vector<double>>& targets) const {
    if (targets.size() != size()) throw DimensionMismatch("one target per model is required");
    Fits fits;
    fits.theta.resize(size() * dimension());
    fits.value.resize(size());
    for (std::size_t k = 0; k < size(); ++k) {
        if (targets[k].size() != dimension()) throw DimensionMismatch("target dimension mismatch");
        if (family() == Family::LocalQuadratic) {
            const auto local = basis(k).to_local({targets[k][0], targets[k][1], targets[k][2]});
            std::copy(local.begin(), local.end(), fits.theta.begin() + 3 * k);
            fits.value[k] = local[0];
        } else {
            fits.theta[k] = fits.value[k] = targets[k][0];
        }
    }
    return fits;
}

bool ModelSet::bootstrap_statistics(const Fits& fits, std::span<const double> u,
                                    std::span<double> out, Workspace& ws) const {
    const std::size_t K = size();
    ws.u.resize(n_);

    if (family() == Family::QuantileLocation) {
        ws.cumulative.resize(n_);
        double total = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            ws.u[j] = u[fits.order[j]];
            total += ws.u[j];
            ws.cumulative[j] = total;
        }
        if (!(total > 0.0)) return false;
        for (std::size_t k = 0; k < K; ++k) {
            const double tau = grid_.taus[k];
            const auto it = std::lower_bound(ws.cumulative.begin(), ws.cumulative.end(), tau * total);
            const std::size_t j = it == ws.cumulative.end()
                                      ? n_ - 1
                                      : static_cast<std::size_t>(it - ws.cumulative.begin());
            const double boot = fits.y[j];
            const double data = fits.theta[k];
            double gap = 0.0;
            if (boot != data)
                for (std::size_t i = 0; i < n_; ++i)
                    gap += ws.u[i] * (check_loss(fits.y[i] - data, tau) - check_loss(fits.y[i] - boot, tau));
            out[k] = std::sqrt(2.0 * std::max(0.0, gap));
        }
        return true;
    }

    gather(u, ws.u);
    ws.uy.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) ws.uy[i] = ws.u[i] * fits.y[i];

    for (std::size_t k = 0; k < K; ++k) {
        const auto& sup = support_[k];
        const std::size_t len = sup.hi - sup.lo;
        const double* uu = ws.u.data() + sup.lo;
        const double* vv = ws.uy.data() + sup.lo;
        const double* cf = coef_.data() + sup.offset;

        if (family() == Family::LocalConstant) {
            double s = 0.0;
            double sy = 0.0;
            dot2(cf, uu, vv, len, s, sy);
            if (!(s > kDegenerateWeightFloor * weight_sum_[k])) return false;
            const double d = sy / s - fits.theta[k];
            out[k] = std::sqrt(std::max(0.0, s * d * d));
            continue;
        }

        QuadraticMoments mom;
        dot2(cf, uu, vv, len, mom.m[0], mom.g[0]);
        dot2(cf + len, uu, vv, len, mom.m[1], mom.g[1]);
        dot2(cf + 2 * len, uu, vv, len, mom.m[2], mom.g[2]);
        mom.m[3] = dot1(cf + 3 * len, uu, len);
        mom.m[4] = dot1(cf + 4 * len, uu, len);
        const auto curv = mom.curvature();
        const auto f = linalg::Ldlt<3>::factor(curv);
        if (!f) return false;
        const auto boot = f->solve(mom.rhs());
        const linalg::Vec3 delta{boot[0] - fits.theta[3 * k], boot[1] - fits.theta[3 * k + 1],
                                 boot[2] - fits.theta[3 * k + 2]};
        out[k] = std::sqrt(std::max(0.0, linalg::quadratic_form(curv, delta)));
    }
    return true;
}

void ModelSet::true_statistics(const Fits& fits, const Fits& targets, std::span<double> out) const {
    const std::size_t K = size();
    for (std::size_t k = 0; k < K; ++k) {
        switch (family()) {
            case Family::LocalConstant: {
                const double d = fits.theta[k] - targets.theta[k];
                out[k] = std::sqrt(weight_sum_[k] * d * d);
                break;
            }
            case Family::LocalQuadratic: {
                const linalg::Vec3 delta{fits.theta[3 * k] - targets.theta[3 * k],
                                         fits.theta[3 * k + 1] - targets.theta[3 * k + 1],
                                         fits.theta[3 * k + 2] - targets.theta[3 * k + 2]};
                out[k] = std::sqrt(std::max(0.0, linalg::quadratic_form(curvature_[k], delta)));
                break;
            }
            case Family::QuantileLocation: {
                const double tau = grid_.taus[k];
                double gap = 0.0;
                for (std::size_t i = 0; i < n_; ++i)
                    gap += check_loss(fits.y[i] - targets.theta[k], tau) -
                           check_loss(fits.y[i] - fits.theta[k], tau);
                out[k] = std::sqrt(2.0 * std::max(0.0, gap));
                break;
            }
        }
    }
}

double ModelSet::halfwidth_per_unit(std::size_t k) const {
    switch (family()) {
        case Family::LocalConstant: return 1.0 / std::sqrt(weight_sum_[k]);
        case Family::LocalQuadratic: return std::sqrt(factor_[k].inverse_column(0)[0]);
        case Family::QuantileLocation: break;
    }
    throw InvalidArgument("the quantile family has no quadratic half-width");
}

std::vector<double> ModelSet::global_theta(const Fits& fits, std::size_t k) const {
    if (family() != Family::LocalQuadratic) return {fits.theta[k]};
    const auto g = basis(k).to_global({fits.theta[3 * k], fits.theta[3 * k + 1], fits.theta[3 * k + 2]});
    return {g.begin(), g.end()};
}

}  // namespace simboot
