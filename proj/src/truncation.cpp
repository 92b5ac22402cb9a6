// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/truncation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kgmg/assembly.hpp"
#include "kgmg/errors.hpp"
#include "kgmg/linalg.hpp"

namespace kgmg {

double truncation_radius(double h, double K) {
  require(h > 0.0 && h < 1.0, ErrorCode::Domain, "truncation_radius: h must lie in (0, 1)");
  require(K > 0.0, ErrorCode::InvalidArgument, "truncation_radius: K must be positive");
  return K * h * std::fabs(std::log(h));
}

SparseMatrix truncate(const DenseMatrix& M, const PointSet& row_points, const PointSet& col_points,
                      double r) {
  require(static_cast<std::size_t>(M.rows()) == row_points.size() &&
              static_cast<std::size_t>(M.cols()) == col_points.size(),
          ErrorCode::InvalidArgument, "truncate: matrix and point sets differ in size");
  require(row_points.manifold() == col_points.manifold(), ErrorCode::InvalidArgument,
          "truncate: point sets live on different manifolds");
  const bool sphere = row_points.manifold().is_sphere();
  std::vector<std::size_t> off(row_points.size() + 1, 0);
  std::vector<std::uint32_t> col;
  std::vector<double> val;
  for (std::size_t i = 0; i < row_points.size(); ++i) {
    for (std::size_t j = 0; j < col_points.size(); ++j) {
      if (detail::distance(sphere, row_points[i], col_points[j]) <= r) {
        col.push_back(static_cast<std::uint32_t>(j));
        val.push_back(M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
    off[i + 1] = col.size();
  }
  return SparseMatrix(row_points.size(), col_points.size(), std::move(off), std::move(col), std::move(val));
}

TruncationError truncation_error_report(const DenseMatrix& M, const SparseMatrix& M_r) {
  require(static_cast<std::size_t>(M.rows()) == M_r.rows() && static_cast<std::size_t>(M.cols()) == M_r.cols(),
          ErrorCode::InvalidArgument, "truncation_error_report: dimension mismatch");
  require(M_r.rows() <= kTruncationErrorGuard && M_r.cols() <= kTruncationErrorGuard, ErrorCode::SizeGuard,
          "truncation_error_report: matrix too large for dense norms");
  const Eigen::MatrixXd D = M - M_r.to_dense();
  TruncationError out;
  out.max_row_sum_diff = D.cwiseAbs().rowwise().sum().maxCoeff();
  out.max_col_sum_diff = D.cwiseAbs().colwise().sum().maxCoeff();
  if (out.max_row_sum_diff == 0.0) return out;
  const PowerEstimate p = power_norm([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(D * x); },
                                     [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(D.transpose() * x); },
                                     D.cols(), 2000, 1e-12, 0x7472756e63ull);
  out.spectral_norm_diff = p.value;
  return out;
}

double volume_ratio_proxy(const Manifold& manifold) {
  constexpr double pi = std::numbers::pi;
  // Sphere: mu(B) = 2 pi (1 - cos r), ratio to r^2 runs from pi (r -> 0) down to 4/pi (r = pi).
  // Torus: pi r^2 for r <= pi, saturating at 4 pi^2 by r = pi sqrt 2, where the ratio is 2.
  return manifold.is_sphere() ? pi * pi / 4.0 : pi / 2.0;
}

double tail_bound(const Manifold& manifold, double q, double r, double c) {
  require(q > 0.0 && c > 0.0, ErrorCode::InvalidArgument, "tail_bound: q and c must be positive");
  require(r >= 2.0 * q, ErrorCode::InvalidArgument, "tail_bound: requires r >= 2q");
  const double d = manifold.dim;
  double series = 0.0;
  for (int j = 0;; ++j) {
    const double term = std::pow(j + 2.0, d) * std::exp(-c * j * q);
    series += term;
    // Terms decrease once (j+2)^d growth is beaten by the exponential; stop
    // when the remaining geometric-like tail is negligible.
    const double ratio = std::pow((j + 3.0) / (j + 2.0), d) * std::exp(-c * q);
    if (ratio < 1.0 && term * ratio / (1.0 - ratio) <= 1e-12 * series) break;
    require(j < 100000000, ErrorCode::Internal, "tail_bound: series did not converge");
  }
  return volume_ratio_proxy(manifold) * std::pow(r / q, d) * std::exp(-c * r) * series;
}

TruncatedStack build_truncated_stack(const LevelStack& dense, const std::vector<PointSet>& points, double K) {
  require(K > 0.0, ErrorCode::InvalidArgument, "build_truncated_stack: K must be positive");
  require(points.size() == dense.levels().size(), ErrorCode::InvalidArgument,
          "build_truncated_stack: one point set per level is required");
  const double inf = std::numeric_limits<double>::infinity();
  auto radius = [&](double h) { return h >= 1.0 ? inf : truncation_radius(h, K); };
  TruncatedStack out;
  std::vector<StackLevel> levels = dense.levels();
  out.info.resize(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    StackLevel& L = levels[l];
    require(points[l].size() == L.size(), ErrorCode::InvalidArgument,
            "build_truncated_stack: point set size does not match level");
    TruncatedLevel& info = out.info[l];
    info.radius = radius(L.h);
    const DenseMatrix A = L.A.to_dense();
    // A truncated matrix that keeps every entry takes the same arithmetic path
    // as the dense one; the coarsest level is solved directly either way.
    L.A = LevelMatrix(truncate(A, points[l], points[l], info.radius));
    L.B = L.A.diagonal();
    require((L.B.array() > 0.0).all(), ErrorCode::Domain,
            "build_truncated_stack: truncated diagonal is not positive (K too small)");
    const Damping d = select_damping(L.A, L.B, dense.symmetric());
    L.theta = d.theta;
    L.damping_warning = d.warning;
    info.nnz_A = L.A.nnz();
    if (l > 0) {
      info.transfer_radius = radius(levels[l - 1].h);
      const SparseMatrix P = truncate(L.P.to_dense(), points[l], points[l - 1], info.transfer_radius);
      L.R = LevelMatrix(P.transpose());
      L.P = LevelMatrix(P);
      info.nnz_P = P.nnz();
    }
  }
  out.stack = LevelStack(std::move(levels), StackMode::Truncated, dense.symmetric());
  return out;
}

}  // namespace kgmg
