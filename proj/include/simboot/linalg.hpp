#pragma once

// Small dense symmetric linear algebra: fixed-size pivoted LDL^T solves for the
// hot loops and a cyclic Jacobi eigensolver for spectral norms.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace simboot::linalg {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

using Vec3 = Vec<3>;
using Mat3 = Mat<3>;

/// Row-major dense matrix for reporting and small eigenproblems.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    template <std::size_t N>
    static Matrix from(const Mat<N>& a) {
        Matrix m(N, N);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) m(i, j) = a[i][j];
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Symmetric LDL^T factorization with diagonal pivoting, P A P^T = L D L^T.
///
/// At every step the largest remaining diagonal entry is chosen as pivot. The
/// factorization is accepted only when every pivot is positive and the
/// smallest pivot is at least `relative_pivot_floor` times the largest, which
/// for a symmetric matrix certifies positive definiteness with a conditioning
/// margin.
template <std::size_t N>
class Ldlt {
public:
    static std::optional<Ldlt> factor(const Mat<N>& a, double relative_pivot_floor = 1e-10) {
        Ldlt f;
        Mat<N> work = a;
        for (std::size_t i = 0; i < N; ++i) f.perm_[i] = i;

        double largest = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < N; ++i)
                if (work[i][i] > work[p][p]) p = i;
            if (p != k) {
                std::swap(work[k], work[p]);
                for (auto& row : work) std::swap(row[k], row[p]);
                std::swap(f.perm_[k], f.perm_[p]);
                for (std::size_t j = 0; j < k; ++j) std::swap(f.l_[k][j], f.l_[p][j]);
            }
            const double pivot = work[k][k];
            if (!(pivot > 0.0) || !std::isfinite(pivot)) return std::nullopt;
            if (k == 0) largest = pivot;
            if (pivot < relative_pivot_floor * largest) return std::nullopt;
            f.d_[k] = pivot;
            f.l_[k][k] = 1.0;
            for (std::size_t i = k + 1; i < N; ++i) f.l_[i][k] = work[i][k] / pivot;
            for (std::size_t i = k + 1; i < N; ++i)
                for (std::size_t j = k + 1; j <= i; ++j) {
                    work[i][j] -= f.l_[i][k] * work[j][k];
                    work[j][i] = work[i][j];
                }
        }
        return f;
    }

    Vec<N> solve(const Vec<N>& b) const {
        Vec<N> y{};
        for (std::size_t i = 0; i < N; ++i) {
            double s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) s -= l_[i][j] * y[j];
            y[i] = s;
        }
        for (std::size_t i = 0; i < N; ++i) y[i] /= d_[i];
        for (std::size_t i = N; i-- > 0;) {
            for (std::size_t j = i + 1; j < N; ++j) y[i] -= l_[j][i] * y[j];
        }
        Vec<N> x{};
        for (std::size_t i = 0; i < N; ++i) x[perm_[i]] = y[i];
        return x;
    }

    /// Column `j` of the inverse.
    Vec<N> inverse_column(std::size_t j) const {
        Vec<N> e{};
        e[j] = 1.0;
        return solve(e);
    }

    const Vec<N>& pivots() const noexcept { return d_; }

private:
    Ldlt() = default;

    std::array<std::size_t, N> perm_{};
    Mat<N> l_{};
    Vec<N> d_{};
};

template <std::size_t N>
double quadratic_form(const Mat<N>& a, const Vec<N>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < N; ++j) row += a[i][j] * x[j];
        s += x[i] * row;
    }
    return s;
}

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j pairs with values[j]
    int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Stops once the
/// off-diagonal Frobenius norm drops below `tolerance` times the full norm or
/// after `max_sweeps` sweeps.
SymmetricEigen jacobi_eigen(const Matrix& a, double tolerance = 1e-12, int max_sweeps = 30);

/// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm(const Matrix& a);

}  // namespace simboot::linalg
