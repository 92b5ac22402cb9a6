// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kgmg/errors.hpp"
#include "kgmg/linalg.hpp"

namespace kgmg {

std::optional<int> torus_grid_side(const PointSet& points) {
  if (!points.manifold().is_torus() || points.empty()) return std::nullopt;
  const auto M = torus_lattice(points.points(), points.points());
  if (!M || static_cast<std::size_t>(*M) * static_cast<std::size_t>(*M) != points.size()) return std::nullopt;
  return M;
}

DenseMatrix grid_stiffness(const SpectralKernel& kernel, const PointSet& points, const EllipticOperator& op) {
  const auto side = torus_grid_side(points);
  require(side.has_value(), ErrorCode::InvalidArgument, "grid_stiffness: points are not a complete torus grid");
  op.validate(points.manifold());
  const int n = *side;
  const int m = kernel.m();
  const double c = op.c;
  const std::array<double, 2> adv = op.advection.value_or(std::array<double, 2>{0.0, 0.0});
  constexpr double pi = std::numbers::pi;
  // Aliased sums S_K(k) = sum_j coef(k + n j) and S_G(k) likewise, summed over
  // |k + n j| <= R with the remainder replaced by its integral.
  const int J = std::max(8, (2048 + n - 1) / n);
  const double R = static_cast<double>(n) * J;
  const double R2 = R * R;
  const double n2 = static_cast<double>(n) * n;
  const double tail_K = pi / n2 * std::pow(1.0 + R2, 1.0 - m) / (m - 1.0);
  const double tail_G = pi / n2 *
                        (std::pow(1.0 + R2, 2.0 - 2.0 * m) / (2.0 * m - 2.0) +
                         (c - 1.0) * std::pow(1.0 + R2, 1.0 - 2.0 * m) / (2.0 * m - 1.0));
  const std::size_t N = points.size();
  std::vector<double> mu_re(N);
  std::vector<double> mu_im(N);
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      double sk = 0.0;
      double sg = 0.0;
      double sa = 0.0;
      for (int j1 = -J - 1; j1 <= J + 1; ++j1) {
        const double a = k1 + static_cast<double>(n) * j1;
        for (int j2 = -J - 1; j2 <= J + 1; ++j2) {
          const double b = k2 + static_cast<double>(n) * j2;
          const double lam = a * a + b * b;
          if (lam > R2) continue;
          const double t = 1.0 / (1.0 + lam);
          double coef = t;
          for (int p = 1; p < m; ++p) coef *= t;
          sk += coef;
          sg += (lam + c) * coef * coef;
          sa += (adv[0] * a + adv[1] * b) * coef * coef;
        }
      }
      sk += tail_K;
      sg += tail_G;
      // mu_A = mu_(G^T) / mu_K^2 with mu_K = N S_K / 4pi^2, mu_(G^T) = N (S_G + i S_a) / 4pi^2.
      const double scale = 4.0 * pi * pi / (static_cast<double>(N) * sk * sk);
      const std::size_t idx = static_cast<std::size_t>(k1) * n + k2;
      mu_re[idx] = scale * sg;
      mu_im[idx] = scale * sa;
    }
  }
  std::vector<double> cos_t(static_cast<std::size_t>(n));
  std::vector<double> sin_t(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    cos_t[static_cast<std::size_t>(t)] = std::cos(2.0 * pi * t / n);
    sin_t[static_cast<std::size_t>(t)] = std::sin(2.0 * pi * t / n);
  }
  // A(o) = (1/N) sum_k Re(mu_A(k) e^(2 pi i k.o / n)). Phases are reduced to
  // [0, n/2] so that A(o) and A(-o) share every rounding step.
  std::vector<double> row(N);
  for (int o1 = 0; o1 < n; ++o1) {
    for (int o2 = 0; o2 < n; ++o2) {
      double acc = 0.0;
      for (int k1 = 0; k1 < n; ++k1) {
        for (int k2 = 0; k2 < n; ++k2) {
          int t = (k1 * o1 + k2 * o2) % n;
          double s = 1.0;
          if (2 * t > n) {
            t = n - t;
            s = -1.0;
          }
          const std::size_t idx = static_cast<std::size_t>(k1) * n + k2;
          acc += mu_re[idx] * cos_t[static_cast<std::size_t>(t)] - s * mu_im[idx] * sin_t[static_cast<std::size_t>(t)];
        }
      }
      row[static_cast<std::size_t>(o1) * n + o2] = acc / static_cast<double>(N);
    }
  }
  std::vector<std::array<int, 2>> idx(N);
  for (std::size_t i = 0; i < N; ++i) idx[i] = {lattice_index(points[i][0], n), lattice_index(points[i][1], n)};
  DenseMatrix A(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const int o1 = (idx[i][0] - idx[j][0] + n) % n;
      const int o2 = (idx[i][1] - idx[j][1] + n) % n;
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[static_cast<std::size_t>(o1) * n + o2];
    }
  }
  return A;
}

LevelSystem assemble_stiffness(const LagrangeBasis& basis, const EllipticOperator& op) {
  const Manifold& mf = basis.points.manifold();
  op.validate(mf);
  LevelSystem sys;
  sys.level = basis.level;
  if (torus_grid_side(basis.points)) {
    sys.A = grid_stiffness(*basis.kernel, basis.points, op);
  } else {
    sys.A = dense_stiffness(basis, op);
  }
  sys.B = sys.A.diagonal();
  for (Eigen::Index i = 0; i < sys.B.size(); ++i) {
    require(sys.B[i] > 0.0, ErrorCode::Conditioning,
            "assemble_stiffness: nonpositive diagonal entry at index " + std::to_string(i));
  }
  return sys;
}

DenseMatrix dense_stiffness(const LagrangeBasis& basis, const EllipticOperator& op) {
  op.validate(basis.points.manifold());
  const Eigen::MatrixXd G = basis.kernel->energy_gram_matrix(op, basis.points.points());
  const Eigen::MatrixXd& C = basis.coefficients;
  if (op.symmetric()) {
    const Eigen::MatrixXd A = C.transpose() * G * C;
    return 0.5 * (A + A.transpose());
  }
  return C.transpose() * G.transpose() * C;
}

Eigen::VectorXd assemble_load(const LagrangeBasis& basis, const ScalarField& f,
                              const QuadratureRule& quad) {
  require(static_cast<bool>(f), ErrorCode::InvalidArgument, "assemble_load: empty right-hand side");
  require(quad.nodes.size() == quad.weights.size(), ErrorCode::InvalidArgument,
          "assemble_load: quadrature nodes and weights differ in length");
  Eigen::VectorXd wf(static_cast<Eigen::Index>(quad.nodes.size()));
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    wf[static_cast<Eigen::Index>(q)] = quad.weights[q] * f(quad.nodes[q]);
  }
  if (wf.isZero(0.0)) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  // g_zeta = <phi(., zeta), f>, then b = C^T g.
  const Eigen::VectorXd g = basis.kernel->apply(basis.points.points(), quad.nodes.points(), wf);
  return basis.coefficients.transpose() * g;
}

Damping select_damping(const LevelMatrix& A, const Eigen::VectorXd& B, bool symmetric,
                       std::uint64_t seed) {
  const std::size_t n = A.rows();
  require(A.cols() == n && static_cast<std::size_t>(B.size()) == n, ErrorCode::InvalidArgument,
          "select_damping: dimension mismatch");
  require(n > 0, ErrorCode::InsufficientData, "select_damping: empty system");
  require((B.array() > 0.0).all(), ErrorCode::Domain, "select_damping: diagonal must be positive");
  const Eigen::VectorXd s = B.cwiseSqrt().cwiseInverse();
  Rng rng(seed);
  // A random start avoids landing on an eigenvector; the constant vector is one
  // on uniform grids.
  Eigen::VectorXd v = gaussian_vector(static_cast<Eigen::Index>(n), rng).normalized();
  Eigen::VectorXd Av;
  Damping d;
  double prev = 0.0;
  double change = 1.0;
  for (int it = 1; it <= 100; ++it) {
    const Eigen::VectorXd x = s.cwiseProduct(v);
    A.apply(x, Av);
    Eigen::VectorXd w = symmetric ? Eigen::VectorXd(Av)
                                  : Eigen::VectorXd(0.5 * (Av + A.apply_transpose(x)));
    w = s.cwiseProduct(w);
    d.lambda_max = v.dot(w);
    d.iterations = it;
    if (it > 1) change = std::fabs(d.lambda_max - prev) / std::fabs(d.lambda_max);
    prev = d.lambda_max;
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
    if (it > 1 && change < 1e-6) break;
  }
  require(d.lambda_max > 0.0, ErrorCode::Domain, "select_damping: nonpositive spectral estimate");
  d.warning = !(change < 1e-6);
  const double factor = d.warning ? 0.8 : 0.9;
  d.theta = std::clamp(factor / d.lambda_max, 1e-12, 0.999);
  return d;
}

TransferPair build_prolongation(const LagrangeBasis& coarse, const PointSet& fine) {
  require(fine.size() >= coarse.size(), ErrorCode::Domain,
          "build_prolongation: fine level is smaller than the coarse level");
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    require(fine[i] == coarse.points[i], ErrorCode::Domain,
            "build_prolongation: point sets are not prefix-nested");
  }
  TransferPair t;
  t.P = lagrange_values(coarse, fine.points());
  t.R = t.P.transpose();
  return t;
}

DecayFit stiffness_decay(const DenseMatrix& A, const PointSet& points, double h) {
  require(static_cast<std::size_t>(A.rows()) == points.size() && A.rows() == A.cols(),
          ErrorCode::InvalidArgument, "stiffness_decay: dimension mismatch");
  const double floor = 1e-12 * A.cwiseAbs().maxCoeff();
  const bool sphere = points.manifold().is_sphere();
  std::vector<double> x;
  std::vector<double> y;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (i == j) continue;
      const double v = std::fabs(A(i, j));
      if (!(v > floor)) continue;
      x.push_back(detail::distance(sphere, points[static_cast<std::size_t>(i)],
                                   points[static_cast<std::size_t>(j)]) / h);
      y.push_back(std::log(v));
    }
  }
  require(x.size() >= 8, ErrorCode::InsufficientData, "stiffness_decay: fewer than 8 usable entries");
  const LineFit f = fit_line(x, y);
  DecayFit out;
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.r_squared = f.r_squared;
  out.range_min = *std::min_element(x.begin(), x.end());
  out.range_max = *std::max_element(x.begin(), x.end());
  out.samples = x.size();
  return out;
}

}  // namespace kgmg
