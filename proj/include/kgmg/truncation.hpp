// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "kgmg/geometry.hpp"
#include "kgmg/matrix.hpp"
#include "kgmg/multigrid.hpp"

namespace kgmg {

/// r = K h |log h|; requires 0 < h < 1 and K > 0.
double truncation_radius(double h, double K);

/// Keeps entry (i, j) iff dist(row_i, col_j) <= r. Values are copied unchanged.
SparseMatrix truncate(const DenseMatrix& M, const PointSet& row_points, const PointSet& col_points,
                      double r);

struct TruncationError {
  double spectral_norm_diff = 0.0;  // ||M - M_r||_2 by power iteration
  double max_row_sum_diff = 0.0;    // max over rows of sum |dropped|
  double max_col_sum_diff = 0.0;    // same over columns
};

inline constexpr std::size_t kTruncationErrorGuard = 4096;

TruncationError truncation_error_report(const DenseMatrix& M, const SparseMatrix& M_r);

/// beta/alpha for mu(B(x, r)) within [alpha r^2, beta r^2] over 0 < r <= diameter.
double volume_ratio_proxy(const Manifold& manifold);

/// (beta/alpha) (r/q)^d e^(-c r) sum_j (j+2)^d e^(-c j q), series to 1e-12 relative.
double tail_bound(const Manifold& manifold, double q, double r, double c);

struct TruncatedLevel {
  double radius = 0.0;         // stiffness radius; infinity when not truncated
  double transfer_radius = 0;  // radius used for P_l and R_l (coarse-level convention)
  std::size_t nnz_A = 0;
  std::size_t nnz_P = 0;
};

struct TruncatedStack {
  LevelStack stack;
  std::vector<TruncatedLevel> info;
};

/// Truncates A_l with r_l = truncation_radius(h_l, K) and P_l, R_l with the
/// coarse radius r_(l-1). Levels with h >= 1 keep every entry. B and theta are
/// recomputed from the truncated A; the coarsest solve stays dense.
TruncatedStack build_truncated_stack(const LevelStack& dense, const std::vector<PointSet>& points, double K);

}  // namespace kgmg
