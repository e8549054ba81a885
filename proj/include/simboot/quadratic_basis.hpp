#pragma once

#include <cmath>

#include "simboot/linalg.hpp"

namespace simboot {

/// Standardized coordinates for the local quadratic family.
///
/// With s = (x - origin) / scale the global regressor (1, x, x^2) equals
/// A (1, s, s^2) for a lower-triangular A, so the local coefficients are
/// A^T theta and the local curvature is A^{-1} M A^{-T}. Likelihood values and
/// fitted values do not depend on the coordinates; the standardized system is
/// far better conditioned when the kernel support is narrow.
struct QuadraticBasis {
    double origin = 0.0;
    double scale = 1.0;

    linalg::Vec3 regressor(double x) const {
        const double s = (x - origin) / scale;
        return {1.0, s, s * s};
    }

    linalg::Vec3 to_local(const linalg::Vec3& theta) const {
        const double o = origin;
        const double c = scale;
        return {theta[0] + o * theta[1] + o * o * theta[2], c * theta[1] + 2.0 * o * c * theta[2],
                c * c * theta[2]};
    }

    linalg::Vec3 to_global(const linalg::Vec3& local) const {
        const double o = origin;
        const double c = scale;
        const double t2 = local[2] / (c * c);
        const double t1 = (local[1] - 2.0 * o * c * t2) / c;
        const double t0 = local[0] - o * t1 - o * o * t2;
        return {t0, t1, t2};
    }

    /// A as a matrix: rows are the global regressor components.
    linalg::Mat3 transform() const {
        const double o = origin;
        const double c = scale;
        return {{{1.0, 0.0, 0.0}, {o, c, 0.0}, {o * o, 2.0 * o * c, c * c}}};
    }

    /// A * local * A^T.
    linalg::Mat3 curvature_to_global(const linalg::Mat3& local) const {
        const auto a = transform();
        linalg::Mat3 tmp{};
        linalg::Mat3 out{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) tmp[i][j] += a[i][k] * local[k][j];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) out[i][j] += tmp[i][k] * a[j][k];
        return out;
    }
};

/// Weighted normal-equation sums of the quadratic family in one basis.
struct QuadraticMoments {
    double m[5] = {0, 0, 0, 0, 0};  // sum c s^j, j = 0..4
    double g[3] = {0, 0, 0};        // sum c y s^j, j = 0..2

    void add(double s, double c, double y) {
        const double s2 = s * s;
        const double cs = c * s;
        const double cs2 = c * s2;
        m[0] += c;
        m[1] += cs;
        m[2] += cs2;
        m[3] += cs2 * s;
        m[4] += cs2 * s2;
        g[0] += c * y;
        g[1] += cs * y;
        g[2] += cs2 * y;
    }

    linalg::Mat3 curvature() const {
        return {{{m[0], m[1], m[2]}, {m[1], m[2], m[3]}, {m[2], m[3], m[4]}}};
    }
    linalg::Vec3 rhs() const { return {g[0], g[1], g[2]}; }
};

}  // namespace simboot
