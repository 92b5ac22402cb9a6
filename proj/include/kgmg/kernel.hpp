// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "kgmg/elliptic_operator.hpp"
#include "kgmg/geometry.hpp"

namespace kgmg {

/// Sobolev kernel of order m with eigen-coefficients (1 + lambda)^-m over an
/// orthonormal Laplace-Beltrami eigenbasis.
///
/// Torus values are computed from the lattice-summed closed form of the
/// Fourier series (the periodized Matern function), which equals the full
/// series; series_cutoff() reports the frequency beyond which the dropped
/// tail is below 1e-12 relative. Sphere values use the Legendre series up to
/// series_cutoff().
class SpectralKernel {
 public:
  SpectralKernel(Manifold manifold, int m);

  const Manifold& manifold() const noexcept { return manifold_; }
  int m() const noexcept { return m_; }
  int series_cutoff() const noexcept { return cutoff_; }
  /// Upper estimate of the dropped tail of phi(x, x), relative to phi(x, x).
  double tail_estimate() const noexcept { return tail_; }

  double operator()(const Point& x, const Point& y) const;
  double energy_gram(const EllipticOperator& op, const Point& x, const Point& y) const;

  /// Truncated eigen-series evaluated term by term. Slow; meant for checks.
  double series_partial_sum(const Point& x, const Point& y, int cutoff) const;

  /// (phi(r_i, c_j)).
  Eigen::MatrixXd matrix(std::span<const Point> rows, std::span<const Point> cols) const;
  /// G(i, j) = a(phi(., x_i), phi(., x_j)).
  Eigen::MatrixXd energy_gram_matrix(const EllipticOperator& op, std::span<const Point> pts) const;
  /// out_i = sum_j phi(t_i, s_j) w_j, without storing the matrix.
  Eigen::VectorXd apply(std::span<const Point> targets, std::span<const Point> sources,
                        const Eigen::VectorXd& weights) const;

 private:
  struct Table {
    int lattice = 0;
    int half = 0;
    std::vector<double> values;  // (half+1)^2, indexed by the reduced offsets
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * (half + 1) + j]; }
  };
  enum class Profile { Value, Gradient };

  double torus_value(int s, const Point& x, const Point& y) const;
  std::shared_ptr<const Table> table(int s, int lattice, Profile profile) const;
  std::vector<double> sphere_gram_weights(const EllipticOperator& op) const;

  Manifold manifold_;
  int m_;
  int cutoff_ = 0;
  double tail_ = 0.0;
  std::vector<double> sphere_weights_;  // coef_l (2l+1) / 4pi

  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<int, int, int>, std::shared_ptr<const Table>> tables_;
};

/// Periodized Matern profile psi_s(d) = (1/4pi^2) sum_k (1+|k|^2)^-s cos(k.d).
double torus_profile(int s, double a, double b);
/// d psi_s / d a at offset (a, b).
double torus_profile_da(int s, double a, double b);
/// sum_l w_l P_l(t) by the three-term recurrence.
double legendre_series(std::span<const double> weights, double t);

struct LagrangeBasis {
  int level = 0;
  Eigen::MatrixXd coefficients;  // K C = I
  std::shared_ptr<const SpectralKernel> kernel;
  PointSet points;
  double cardinality_error = 0.0;  // max |K C - I|

  std::size_t size() const noexcept { return points.size(); }
};

LagrangeBasis compute_lagrange(std::shared_ptr<const SpectralKernel> kernel, const PointSet& points,
                               int level = 0);

/// Builds a basis from cached coefficients, re-verifying cardinality.
LagrangeBasis lagrange_from_coefficients(std::shared_ptr<const SpectralKernel> kernel,
                                         const PointSet& points, Eigen::MatrixXd coefficients,
                                         int level = 0);

double eval_lagrange(const LagrangeBasis& basis, std::size_t index, const Point& x);

/// (chi_j(t_i)) for all basis functions at the targets.
Eigen::MatrixXd lagrange_values(const LagrangeBasis& basis, std::span<const Point> targets);

/// sum_j c_j chi_j at the targets.
Eigen::VectorXd lagrange_combination(const LagrangeBasis& basis, std::span<const Point> targets,
                                     const Eigen::VectorXd& c);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double range_min = 0.0;  // distance window, in units of h
  double range_max = 0.0;
  std::size_t samples = 0;
};

DecayFit decay_profile(const LagrangeBasis& basis, std::size_t index, const MeshStats& stats);

void write_basis_cache(const std::filesystem::path& path, const LagrangeBasis& basis);
/// Throws Io on a missing/short file, Parse on a header mismatch.
Eigen::MatrixXd read_basis_cache(const std::filesystem::path& path, const Manifold& manifold,
                                 std::size_t n, int m);

}  // namespace kgmg
