// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "kgmg/assembly.hpp"
#include "kgmg/elliptic_operator.hpp"
#include "kgmg/geometry.hpp"
#include "kgmg/kernel.hpp"
#include "kgmg/multigrid.hpp"

namespace kgmg {

struct ProblemSpec {
  Manifold manifold = Manifold::torus();
  int m = 3;
  EllipticOperator op;
  int levels = 2;  // finest level index L
  int base = 4;    // torus n0, sphere subdivision depth of level 0
  double rho_max = 3.0;
  std::optional<std::filesystem::path> basis_cache;  // directory for LAGB files
};

/// Everything needed to run the cycle on levels 0..L.
struct Discretization {
  ProblemSpec spec;
  PointHierarchy hierarchy;
  std::shared_ptr<const SpectralKernel> kernel;
  std::vector<LagrangeBasis> bases;
  std::vector<LevelSystem> systems;
  std::vector<TransferPair> transfers;  // transfers[0] is empty

  std::size_t level_count() const noexcept { return systems.size(); }
  std::vector<double> fill_distances() const;
  LevelStack dense_stack() const;
};

/// File name used for a level inside the basis cache directory.
std::filesystem::path basis_cache_file(const ProblemSpec& spec, int level, std::size_t n);

Discretization discretize(const ProblemSpec& spec);

/// Smooth exact solution with a closed-form right-hand side. Torus:
/// cos(x1) cos(2 x2), an eigenfunction of -Laplace with eigenvalue 5. Sphere:
/// the l = 1 harmonic z, eigenvalue 2.
struct ManufacturedSolution {
  ScalarField u;
  ScalarField f;
};

ManufacturedSolution manufactured_solution(const Manifold& manifold, const EllipticOperator& op);

/// ||sum_xi u_xi chi_xi - exact||_L2 by quadrature.
double l2_error(const LagrangeBasis& basis, const Eigen::VectorXd& u, const ScalarField& exact,
                const QuadratureRule& quad);

/// Default load quadrature for a basis of n points: comfortably finer than
/// the point set.
QuadratureRule default_quadrature(const Manifold& manifold, std::size_t n, int refine = 0);

}  // namespace kgmg
