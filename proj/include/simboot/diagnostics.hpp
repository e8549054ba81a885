#pragma once

// Modeling-bias and information-matrix diagnostics for the quadratic families.

#include <cstddef>
#include <span>
#include <vector>

#include "simboot/dataset.hpp"
#include "simboot/dgp.hpp"
#include "simboot/linalg.hpp"

namespace simboot {

/// Information matrices of one model under the synthetic truth, in global
/// (1, x, x^2) coordinates.
///
///  - d2: curvature, sum w Psi Psi^T
///  - h2: sum E[grad l_i grad l_i^T] = sum w^2 Psi Psi^T ((f - Psi^T theta*)^2 + sd^2)
///  - b2: sum E[grad l_i] E[grad l_i]^T = sum w^2 Psi Psi^T (f - Psi^T theta*)^2
///  - bias_norm: spectral norm of H^-1 B^2 H^-1
struct BiasDiagnostics {
    linalg::Matrix d2;
    linalg::Matrix h2;
    linalg::Matrix b2;
    double bias_norm = 0.0;
};

BiasDiagnostics bias_diagnostics(const DgpSpec& dgp, const ModelGrid& grid, std::size_t k);

/// Local constant: sum w^2 (f - theta*)^2 / sum w^2 ((f - theta*)^2 + sd^2).
double bias_norm_lc(const DgpSpec& dgp, const ModelGrid& grid, std::size_t k);

/// Local quadratic: || I - sd^2 H^-1 (sum Psi Psi^T w^2) H^-1 ||, eigenvalues by
/// cyclic Jacobi. Throws SingularH2 if H^2 is not positive definite.
double bias_norm_lq(const DgpSpec& dgp, const ModelGrid& grid, std::size_t k);

/// xi = D^-1 grad L(theta*) with D the symmetric square root of the curvature.
std::vector<double> score_vector(Family family, const Dataset& data, std::span<const double> w,
                                 std::span<const double> theta_star);

/// | sqrt(2 (L(fit) - L(theta*))) - ||xi|| |, which vanishes up to rounding
/// for the quadratic families.
double wilks_residual(Family family, const Dataset& data, std::span<const double> w,
                      std::span<const double> theta_star);

}  // namespace simboot
