// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <optional>

#include "kgmg/geometry.hpp"

namespace kgmg {

/// L u = -Laplace u + a . grad u + c u with constant a and c.
struct EllipticOperator {
  double c = 1.0;
  std::optional<std::array<double, 2>> advection;  // torus only
  double c0 = 1.0;                                  // ellipticity floor
  // Spatially varying reaction coefficient. Accepted by the type so callers
  // get a clear error instead of a silent constant approximation.
  std::function<double(const Point&)> variable_reaction;

  bool symmetric() const noexcept { return !advection.has_value(); }

  /// Throws Domain if c < c0 or c0 <= 0, Unsupported for variable
  /// coefficients or advection on the sphere.
  void validate(const Manifold& manifold) const;
};

}  // namespace kgmg
