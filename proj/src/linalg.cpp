// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/linalg.hpp"

#include <cmath>
#include <limits>

#include "kgmg/errors.hpp"

namespace kgmg {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "fit_line: length mismatch");
  require(x.size() >= 2, ErrorCode::InsufficientData, "fit_line: need at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::InsufficientData, "fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.samples = x.size();
  return f;
}

Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Eigen::MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index k, Rng& rng) {
  require(k <= n, ErrorCode::InvalidArgument, "random_orthonormal: k > n");
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd G(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = g(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
}

double spectral_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  const Eigen::MatrixXd G = M.rows() < M.cols() ? Eigen::MatrixXd(M * M.transpose())
                                                : Eigen::MatrixXd(M.transpose() * M);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

PowerEstimate power_norm(const LinearMap& apply, const LinearMap& apply_transpose, Eigen::Index n,
                         int max_iterations, double tolerance, std::uint64_t seed) {
  PowerEstimate out;
  if (n == 0) {
    out.converged = true;
    return out;
  }
  Rng rng(seed);
  Eigen::VectorXd v = gaussian_vector(n, rng);
  v.normalize();
  double prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd w = apply_transpose(apply(v));
    const double lam = v.dot(w);
    out.value = std::sqrt(std::max(0.0, lam));
    out.iterations = it;
    const double nw = w.norm();
    if (nw == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    v = w / nw;
    if (it > 1 && std::fabs(out.value - prev) <= tolerance * out.value) {
      out.converged = true;
      return out;
    }
    prev = out.value;
  }
  return out;
}

double asymmetry(const LevelMatrix& A) {
  require(A.rows() == A.cols(), ErrorCode::InvalidArgument, "asymmetry: matrix is not square");
  const DenseMatrix D = A.to_dense();
  const double scale = D.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (D - D.transpose()).cwiseAbs().maxCoeff() / scale;
}

CgResult cg_baseline(const LevelMatrix& A, const Eigen::VectorXd& b, double tolerance,
                     Eigen::VectorXd* solution) {
  require(A.rows() == A.cols() && static_cast<std::size_t>(b.size()) == A.rows(),
          ErrorCode::InvalidArgument, "cg: dimension mismatch");
  require(asymmetry(A) <= 1e-10, ErrorCode::Domain, "cg: matrix is not symmetric");
  CgResult res;
  const Eigen::Index n = b.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    if (solution) *solution = x;
    return res;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  Eigen::VectorXd Ap;
  double rr = r.squaredNorm();
  const int cap = static_cast<int>(10 * n);
  while (res.iterations < cap) {
    A.apply(p, Ap);
    const double pAp = p.dot(Ap);
    require(pAp > 0.0, ErrorCode::Domain, "cg: matrix is not positive definite");
    const double alpha = rr / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    ++res.iterations;
    const double rr_new = r.squaredNorm();
    res.relative_residual = std::sqrt(rr_new) / bnorm;
    if (res.relative_residual <= tolerance) {
      res.converged = true;
      break;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  if (solution) *solution = x;
  return res;
}

ConditionEstimate condition_estimate(const LevelMatrix& A) {
  require(A.rows() == A.cols(), ErrorCode::InvalidArgument, "condition_estimate: matrix is not square");
  ConditionEstimate out;
  const std::size_t n = A.rows();
  if (n == 0) return out;
  auto finish = [&] {
    if (!(out.lambda_min > 0.0) || out.lambda_min <= 1e-15 * out.lambda_max) {
      out.singular = true;
      out.kappa = std::numeric_limits<double>::infinity();
    } else {
      out.kappa = out.lambda_max / out.lambda_min;
    }
    return out;
  };
  if (n <= 2048) {
    const DenseMatrix D = A.to_dense();
    const Eigen::MatrixXd S = 0.5 * (D + D.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    out.lambda_min = es.eigenvalues().minCoeff();
    out.lambda_max = es.eigenvalues().maxCoeff();
    out.dense_eigensolve = true;
    return finish();
  }
  require(asymmetry(A) <= 1e-10, ErrorCode::Domain,
          "condition_estimate: iterative path needs a symmetric matrix");
  const auto ni = static_cast<Eigen::Index>(n);
  Rng rng(0x6b61707061ull);
  // Largest eigenvalue: power iteration with Rayleigh quotients.
  Eigen::VectorXd v = gaussian_vector(ni, rng).normalized();
  Eigen::VectorXd w;
  double prev = 0.0;
  for (int it = 0; it < 5000; ++it) {
    A.apply(v, w);
    out.lambda_max = v.dot(w);
    v = w.normalized();
    if (it > 0 && std::fabs(out.lambda_max - prev) <= 1e-4 * 1e-2 * out.lambda_max) break;
    prev = out.lambda_max;
  }
  // Smallest eigenvalue: inverse iteration, each solve by CG.
  v = gaussian_vector(ni, rng).normalized();
  prev = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd y;
    cg_baseline(A, v, 1e-10, &y);
    const double mu = v.dot(y);  // Rayleigh quotient of A^-1
    if (!(mu > 0.0)) {
      out.lambda_min = 0.0;
      return finish();
    }
    out.lambda_min = 1.0 / mu;
    v = y.normalized();
    if (it > 0 && std::fabs(out.lambda_min - prev) <= 1e-4 * 1e-2 * out.lambda_min) break;
    prev = out.lambda_min;
  }
  return finish();
}

}  // namespace kgmg
