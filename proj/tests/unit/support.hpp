// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "kgmg/assembly.hpp"
#include "kgmg/errors.hpp"
#include "kgmg/geometry.hpp"
#include "kgmg/kernel.hpp"
#include "kgmg/linalg.hpp"
#include "kgmg/multigrid.hpp"
#include "kgmg/problem.hpp"

namespace kgmg::test {

inline constexpr double kPi = std::numbers::pi;

// n x n torus grid with spacing 2pi/n, row-major in (x1, x2).
inline PointSet torus_grid(int n) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) pts.push_back({2 * kPi * i / n, 2 * kPi * j / n, 0.0});
  }
  return PointSet(Manifold::torus(), std::move(pts));
}

inline std::shared_ptr<const SpectralKernel> torus_kernel(int m = 3) {
  return std::make_shared<const SpectralKernel>(Manifold::torus(), m);
}

inline Point random_torus_point(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  return {u(rng), u(rng), 0.0};
}

inline Point random_sphere_point(Rng& rng) {
  std::normal_distribution<double> g;
  Point p{g(rng), g(rng), g(rng)};
  const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  return {p[0] / n, p[1] / n, p[2] / n};
}

// Torus discretization with n0 = 4 up to the given level, built once per level count.
inline const Discretization& torus_problem(int levels) {
  static std::vector<std::unique_ptr<Discretization>> cache(6);
  auto& slot = cache.at(static_cast<std::size_t>(levels));
  if (!slot) {
    ProblemSpec spec;
    spec.levels = levels;
    slot = std::make_unique<Discretization>(discretize(spec));
  }
  return *slot;
}

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace kgmg::test
