// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/problem.hpp"

#include <cmath>
#include <string>

#include "kgmg/errors.hpp"

namespace kgmg {

std::vector<double> Discretization::fill_distances() const {
  std::vector<double> h;
  h.reserve(hierarchy.stats.size());
  for (const auto& s : hierarchy.stats) h.push_back(s.h);
  return h;
}

LevelStack Discretization::dense_stack() const {
  return make_dense_stack(systems, transfers, fill_distances(), spec.op.symmetric());
}

std::filesystem::path basis_cache_file(const ProblemSpec& spec, int level, std::size_t n) {
  require(spec.basis_cache.has_value(), ErrorCode::InvalidArgument, "no basis cache directory configured");
  return *spec.basis_cache / ("lagb_" + std::string(spec.manifold.name()) + "_m" + std::to_string(spec.m) +
                              "_b" + std::to_string(spec.base) + "_l" + std::to_string(level) + "_n" +
                              std::to_string(n) + ".bin");
}

namespace {

LagrangeBasis basis_for_level(const ProblemSpec& spec, const std::shared_ptr<const SpectralKernel>& kernel,
                              const PointSet& points, int level) {
  if (!spec.basis_cache) return compute_lagrange(kernel, points, level);
  const auto path = basis_cache_file(spec, level, points.size());
  if (std::filesystem::exists(path)) {
    LagrangeBasis cached = lagrange_from_coefficients(
        kernel, points, read_basis_cache(path, spec.manifold, points.size(), spec.m), level);
    // A stale or foreign cache is rebuilt rather than trusted.
    if (cached.cardinality_error <= 1e-8) return cached;
  }
  LagrangeBasis basis = compute_lagrange(kernel, points, level);
  std::filesystem::create_directories(*spec.basis_cache);
  write_basis_cache(path, basis);
  return basis;
}

}  // namespace

Discretization discretize(const ProblemSpec& spec) {
  spec.op.validate(spec.manifold);
  require(spec.levels >= 0, ErrorCode::InvalidArgument, "discretize: level count must be >= 0");
  Discretization d;
  d.spec = spec;
  d.hierarchy = build_hierarchy(spec.manifold, spec.levels, spec.base, spec.rho_max);
  d.kernel = std::make_shared<const SpectralKernel>(spec.manifold, spec.m);
  const std::size_t n_levels = d.hierarchy.level_count();
  d.bases.reserve(n_levels);
  d.systems.reserve(n_levels);
  d.transfers.resize(n_levels);
  for (std::size_t l = 0; l < n_levels; ++l) {
    const int level = static_cast<int>(l);
    d.bases.push_back(basis_for_level(spec, d.kernel, d.hierarchy.levels[l], level));
    LevelSystem sys = assemble_stiffness(d.bases.back(), spec.op);
    const Damping damp = select_damping(LevelMatrix(sys.A), sys.B, spec.op.symmetric());
    sys.theta = damp.theta;
    sys.damping_warning = damp.warning;
    d.systems.push_back(std::move(sys));
    if (l > 0) d.transfers[l] = build_prolongation(d.bases[l - 1], d.hierarchy.levels[l]);
  }
  return d;
}

ManufacturedSolution manufactured_solution(const Manifold& manifold, const EllipticOperator& op) {
  op.validate(manifold);
  ManufacturedSolution s;
  const double c = op.c;
  if (manifold.is_torus()) {
    s.u = [](const Point& x) { return std::cos(x[0]) * std::cos(2.0 * x[1]); };
    const std::array<double, 2> a = op.advection.value_or(std::array<double, 2>{0.0, 0.0});
    s.f = [c, a](const Point& x) {
      const double u = std::cos(x[0]) * std::cos(2.0 * x[1]);
      const double u1 = -std::sin(x[0]) * std::cos(2.0 * x[1]);
      const double u2 = -2.0 * std::cos(x[0]) * std::sin(2.0 * x[1]);
      return (5.0 + c) * u + a[0] * u1 + a[1] * u2;
    };
  } else {
    s.u = [](const Point& x) { return x[2]; };
    s.f = [c](const Point& x) { return (2.0 + c) * x[2]; };
  }
  return s;
}

double l2_error(const LagrangeBasis& basis, const Eigen::VectorXd& u, const ScalarField& exact,
                const QuadratureRule& quad) {
  const Eigen::VectorXd uh = lagrange_combination(basis, quad.nodes.points(), u);
  double acc = 0.0;
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double e = uh[static_cast<Eigen::Index>(q)] - exact(quad.nodes[q]);
    acc += quad.weights[q] * e * e;
  }
  return std::sqrt(acc);
}

QuadratureRule default_quadrature(const Manifold& manifold, std::size_t n, int refine) {
  require(n > 0 && refine >= 0, ErrorCode::InvalidArgument, "default_quadrature: bad arguments");
  if (manifold.is_torus()) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    return build_quadrature(manifold, std::max(16, 4 * side) << refine);
  }
  // Icosphere depth d carries 10 * 4^d + 2 vertices and 20 * 4^d faces.
  int depth = 0;
  while (10 * (std::size_t{1} << (2 * depth)) + 2 < n) ++depth;
  return build_quadrature(manifold, std::min(depth + 1 + refine, 7), SphereRule::SevenPoint);
}

}  // namespace kgmg
