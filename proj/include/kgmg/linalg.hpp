// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>

#include <Eigen/Dense>

#include "kgmg/matrix.hpp"

namespace kgmg {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// Ordinary least squares y ~ slope x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

using Rng = std::mt19937_64;

Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng);
/// n x k matrix with orthonormal columns (QR of a Gaussian block).
Eigen::MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index k, Rng& rng);

/// Largest singular value of a dense matrix from the symmetric eigenproblem
/// of the smaller Gram product.
double spectral_norm(const Eigen::MatrixXd& M);

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct PowerEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on M^T M. Stops when the estimate changes by less than
/// `tolerance` relative.
PowerEstimate power_norm(const LinearMap& apply, const LinearMap& apply_transpose, Eigen::Index n,
                         int max_iterations, double tolerance, std::uint64_t seed);

struct ConditionEstimate {
  double kappa = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool singular = false;
  bool dense_eigensolve = false;
};

/// Dense symmetric eigensolve up to N = 2048; above that power iteration
/// for lambda_max and CG-driven inverse iteration for lambda_min.
ConditionEstimate condition_estimate(const LevelMatrix& A);

struct CgResult {
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
};

/// Unpreconditioned conjugate gradients from x0 = 0, capped at 10 N steps.
CgResult cg_baseline(const LevelMatrix& A, const Eigen::VectorXd& b, double tolerance,
                     Eigen::VectorXd* solution = nullptr);

/// max |A - A^T| / max |A|.
double asymmetry(const LevelMatrix& A);

}  // namespace kgmg
