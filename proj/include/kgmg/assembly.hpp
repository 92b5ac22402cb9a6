// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "kgmg/elliptic_operator.hpp"
#include "kgmg/kernel.hpp"
#include "kgmg/matrix.hpp"

namespace kgmg {

/// Galerkin system of one level. Row xi holds a(chi_zeta, chi_xi), so that
/// A u = b is the Galerkin equation a(u, chi_xi) = <f, chi_xi>.
struct LevelSystem {
  int level = 0;
  DenseMatrix A;
  Eigen::VectorXd B;  // diag(A)
  double theta = 0.0;
  bool damping_warning = false;
  Eigen::VectorXd b;  // empty unless a load was assembled
};

/// Prolongation P(eta, xi) = chi^coarse_xi(eta) and R = P^T.
struct TransferPair {
  DenseMatrix P;
  DenseMatrix R;
};

using ScalarField = std::function<double(const Point&)>;

/// Uses grid_stiffness on complete torus grids and dense_stiffness otherwise.
LevelSystem assemble_stiffness(const LagrangeBasis& basis, const EllipticOperator& op);

/// A = C^T G^T C from the kernel-basis energy Gram (symmetrized when the
/// operator is symmetric).
DenseMatrix dense_stiffness(const LagrangeBasis& basis, const EllipticOperator& op);

/// n when the points are exactly the n x n torus grid with spacing 2pi/n.
std::optional<int> torus_grid_side(const PointSet& points);

/// The same matrix for a complete torus grid, where K, G and A are all
/// block circulant: A is assembled from its Fourier symbol mu_G^T / mu_K^2.
/// Forming C = K^-1 explicitly loses about kappa(K) eps in every entry, which
/// swamps the far field of A; the symbol route keeps it.
DenseMatrix grid_stiffness(const SpectralKernel& kernel, const PointSet& points, const EllipticOperator& op);

/// b_xi = sum_q w_q chi_xi(x_q) f(x_q).
Eigen::VectorXd assemble_load(const LagrangeBasis& basis, const ScalarField& f,
                              const QuadratureRule& quad);

struct Damping {
  double theta = 0.0;
  double lambda_max = 0.0;  // estimate of lambda_max(B^-1/2 A_sym B^-1/2)
  int iterations = 0;
  bool warning = false;  // power iteration did not settle
};

inline constexpr std::uint64_t kDampingSeed = 0x7468657461ull;

/// 100 power-iteration steps on B^-1/2 A_sym B^-1/2, theta = 0.9 / lambda,
/// clamped into (0, 1). Falls back to a 0.8 factor with a warning when the
/// estimate has not settled to 1e-6.
Damping select_damping(const LevelMatrix& A, const Eigen::VectorXd& B, bool symmetric = true,
                       std::uint64_t seed = kDampingSeed);

TransferPair build_prolongation(const LagrangeBasis& coarse, const PointSet& fine);

/// Regression of log|A(xi, eta)| on dist(xi, eta)/h over off-diagonal entries.
DecayFit stiffness_decay(const DenseMatrix& A, const PointSet& points, double h);

}  // namespace kgmg
