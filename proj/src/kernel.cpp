// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/kernel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "kgmg/errors.hpp"
#include "kgmg/linalg.hpp"

namespace kgmg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Matern terms beyond this radius are below 1e-20 relative for s <= 12.
constexpr double kImageRadius = 60.0;

// Free-space Matern function r^(s-1) K_(s-1)(r) / (2^(s-1) Gamma(s)): the
// 2-D Fourier transform of (1 + |xi|^2)^-s, divided by 2 pi.
double matern(int s, double r) {
  const double nu = s - 1;
  const double scale = std::ldexp(std::tgamma(static_cast<double>(s)), s - 1);
  if (r == 0.0) return 0.5 / nu;
  return std::pow(r, nu) * std::cyl_bessel_k(nu, r) / scale;
}

// d/dr of matern(s, r), using d/dr [r^nu K_nu(r)] = -r^nu K_(nu-1)(r).
double matern_dr(int s, double r) {
  if (r == 0.0) return 0.0;
  const double nu = s - 1;
  const double scale = std::ldexp(std::tgamma(static_cast<double>(s)), s - 1);
  return -std::pow(r, nu) * std::cyl_bessel_k(nu - 1.0, r) / scale;
}

// Reduced torus offset: both components in [0, pi], larger one first.
std::array<double, 2> reduced_offset(const Point& x, const Point& y) noexcept {
  double a = std::fabs(x[0] - y[0]);
  double b = std::fabs(x[1] - y[1]);
  a = std::min(a, kTwoPi - a);
  b = std::min(b, kTwoPi - b);
  if (a < b) std::swap(a, b);
  return {a, b};
}

// Signed wrapped component of x - y in (-pi, pi].
double signed_wrap(double d) noexcept {
  if (d > kPi) return d - kTwoPi;
  if (d <= -kPi) return d + kTwoPi;
  return d;
}

int reduced_index(int i, int M) noexcept { return std::min(i, M - i); }

double sign_of(double v) noexcept { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Sum of (2l+1)(1+l(l+1))^-e beyond T, bounded by the integral from T.
double sphere_tail(int T, double e) {
  const double t = static_cast<double>(T) * (T + 1);
  return std::pow(t, 1.0 - e) / (e - 1.0);
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

}  // namespace

void EllipticOperator::validate(const Manifold& manifold) const {
  require(!variable_reaction, ErrorCode::Unsupported,
          "operator: variable coefficients are not supported");
  require(c0 > 0.0, ErrorCode::Domain, "operator: ellipticity constant c0 must be positive");
  require(c >= c0, ErrorCode::Domain, "operator: c must be >= c0");
  require(!(advection && manifold.is_sphere()), ErrorCode::Unsupported,
          "operator: advection is only supported on the torus");
  if (advection) {
    require(std::isfinite((*advection)[0]) && std::isfinite((*advection)[1]),
            ErrorCode::Domain, "operator: advection must be finite");
  }
}

double torus_profile(int s, double a, double b) {
  const int reach = static_cast<int>(std::ceil(kImageRadius / kTwoPi)) + 1;
  double sum = 0.0;
  for (int n1 = -reach; n1 <= reach; ++n1) {
    for (int n2 = -reach; n2 <= reach; ++n2) {
      const double r = std::hypot(a + kTwoPi * n1, b + kTwoPi * n2);
      if (r <= kImageRadius) sum += matern(s, r);
    }
  }
  return sum / kTwoPi;
}

double torus_profile_da(int s, double a, double b) {
  const int reach = static_cast<int>(std::ceil(kImageRadius / kTwoPi)) + 1;
  double sum = 0.0;
  for (int n1 = -reach; n1 <= reach; ++n1) {
    for (int n2 = -reach; n2 <= reach; ++n2) {
      const double u = a + kTwoPi * n1;
      const double r = std::hypot(u, b + kTwoPi * n2);
      if (r > 0.0 && r <= kImageRadius) sum += matern_dr(s, r) * u / r;
    }
  }
  return sum / kTwoPi;
}

double legendre_series(std::span<const double> weights, double t) {
  t = std::clamp(t, -1.0, 1.0);
  if (weights.empty()) return 0.0;
  double p_prev = 1.0;
  double sum = weights[0];
  if (weights.size() == 1) return sum;
  double p = t;
  sum += weights[1] * p;
  for (std::size_t l = 1; l + 1 < weights.size(); ++l) {
    const double dl = static_cast<double>(l);
    const double p_next = ((2.0 * dl + 1.0) * t * p - dl * p_prev) / (dl + 1.0);
    p_prev = p;
    p = p_next;
    sum += weights[l + 1] * p;
  }
  return sum;
}

SpectralKernel::SpectralKernel(Manifold manifold, int m) : manifold_(manifold), m_(m) {
  require(m >= 3, ErrorCode::InvalidArgument, "kernel: smoothness order m must be >= 3");
  require(m <= 6, ErrorCode::InvalidArgument, "kernel: smoothness order m must be <= 6");
  if (manifold_.is_torus()) {
    // Tail of sum_k (1+|k|^2)^-m over |k|_inf > T, bounded by the planar
    // integral over |k| > T - 1.
    const double diag = 4.0 * kPi * kPi * torus_profile(m_, 0.0, 0.0);
    int T = 32;
    auto tail = [&](int t) { return kPi * std::pow(t - 1.0, 2.0 - 2.0 * m_) / (m_ - 1.0) / diag; };
    while (tail(T) >= 1e-12) ++T;
    cutoff_ = T;
    tail_ = tail(T);
  } else {
    double diag = 0.0;
    for (int l = 0; l <= 64; ++l) {
      diag += (2.0 * l + 1.0) * std::pow(1.0 + l * (l + 1.0), -m_);
    }
    int T = 64;
    while (sphere_tail(T, m_) / diag >= 1e-12) ++T;
    cutoff_ = T;
    tail_ = sphere_tail(T, m_) / diag;
    sphere_weights_.resize(static_cast<std::size_t>(T) + 1);
    for (int l = 0; l <= T; ++l) {
      sphere_weights_[static_cast<std::size_t>(l)] =
          std::pow(1.0 + l * (l + 1.0), -m_) * (2.0 * l + 1.0) / (4.0 * kPi);
    }
  }
}

double SpectralKernel::torus_value(int s, const Point& x, const Point& y) const {
  const auto d = reduced_offset(x, y);
  return torus_profile(s, d[0], d[1]);
}

double SpectralKernel::operator()(const Point& x, const Point& y) const {
  if (manifold_.is_torus()) return torus_value(m_, x, y);
  return legendre_series(sphere_weights_, x[0] * y[0] + x[1] * y[1] + x[2] * y[2]);
}

std::vector<double> SpectralKernel::sphere_gram_weights(const EllipticOperator& op) const {
  // (l(l+1)+c) coef_l^2 decays like l^(2-4m); its tail needs far fewer terms.
  double diag = 0.0;
  for (int l = 0; l <= 64; ++l) {
    const double lam = l * (l + 1.0);
    diag += (2.0 * l + 1.0) * (lam + op.c) * std::pow(1.0 + lam, -2 * m_);
  }
  int T = 64;
  while ((1.0 + op.c) * sphere_tail(T, 2 * m_ - 1) / diag >= 1e-14 && T < cutoff_) ++T;
  std::vector<double> w(static_cast<std::size_t>(T) + 1);
  for (int l = 0; l <= T; ++l) {
    const double lam = l * (l + 1.0);
    w[static_cast<std::size_t>(l)] = (lam + op.c) * std::pow(1.0 + lam, -2 * m_) * (2.0 * l + 1.0) / (4.0 * kPi);
  }
  return w;
}

double SpectralKernel::energy_gram(const EllipticOperator& op, const Point& x, const Point& y) const {
  op.validate(manifold_);
  if (manifold_.is_sphere()) {
    return legendre_series(sphere_gram_weights(op), x[0] * y[0] + x[1] * y[1] + x[2] * y[2]);
  }
  // (|k|^2 + c)(1+|k|^2)^-2m = (1+|k|^2)^-(2m-1) + (c-1)(1+|k|^2)^-2m.
  double g = torus_value(2 * m_ - 1, x, y);
  if (op.c != 1.0) g += (op.c - 1.0) * torus_value(2 * m_, x, y);
  if (op.advection) {
    // sum (a.k) coef_k^2 sin(k.d) / 4pi^2 = -a . grad psi_2m(d), d = x - y.
    const double d1 = signed_wrap(x[0] - y[0]);
    const double d2 = signed_wrap(x[1] - y[1]);
    const double g1 = sign_of(d1) * torus_profile_da(2 * m_, std::fabs(d1), std::fabs(d2));
    const double g2 = sign_of(d2) * torus_profile_da(2 * m_, std::fabs(d2), std::fabs(d1));
    g -= (*op.advection)[0] * g1 + (*op.advection)[1] * g2;
  }
  return g;
}

double SpectralKernel::series_partial_sum(const Point& x, const Point& y, int cutoff) const {
  require(cutoff >= 0, ErrorCode::InvalidArgument, "series cutoff must be >= 0");
  if (manifold_.is_sphere()) {
    std::vector<double> w(static_cast<std::size_t>(cutoff) + 1);
    for (int l = 0; l <= cutoff; ++l) {
      w[static_cast<std::size_t>(l)] = std::pow(1.0 + l * (l + 1.0), -m_) * (2.0 * l + 1.0) / (4.0 * kPi);
    }
    return legendre_series(w, x[0] * y[0] + x[1] * y[1] + x[2] * y[2]);
  }
  const double d1 = x[0] - y[0];
  const double d2 = x[1] - y[1];
  double sum = 0.0;
  for (int k1 = -cutoff; k1 <= cutoff; ++k1) {
    for (int k2 = -cutoff; k2 <= cutoff; ++k2) {
      const double lam = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      sum += std::pow(1.0 + lam, -m_) * std::cos(k1 * d1 + k2 * d2);
    }
  }
  return sum / (4.0 * kPi * kPi);
}

std::shared_ptr<const SpectralKernel::Table> SpectralKernel::table(int s, int lattice,
                                                                  Profile profile) const {
  const auto key = std::make_tuple(s, lattice, static_cast<int>(profile));
  {
    std::lock_guard lock(cache_mutex_);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;
  }
  auto t = std::make_shared<Table>();
  t->lattice = lattice;
  t->half = lattice / 2;
  const int n = t->half + 1;
  t->values.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double step = kTwoPi / lattice;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      if (profile == Profile::Value) {
        if (j > i) continue;
        const double v = torus_profile(s, i * step, j * step);
        t->values[idx] = v;
        t->values[static_cast<std::size_t>(j) * n + i] = v;
      } else {
        t->values[idx] = torus_profile_da(s, i * step, j * step);
      }
    }
  }
  std::lock_guard lock(cache_mutex_);
  auto [it, inserted] = tables_.emplace(key, std::move(t));
  return it->second;
}

Eigen::MatrixXd SpectralKernel::matrix(std::span<const Point> rows, std::span<const Point> cols) const {
  Eigen::MatrixXd K(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  const bool same = rows.data() == cols.data() && rows.size() == cols.size();
  if (manifold_.is_torus()) {
    if (auto M = torus_lattice(rows, cols)) {
      const auto t = table(m_, *M, Profile::Value);
      std::vector<std::array<int, 2>> ci(cols.size());
      for (std::size_t j = 0; j < cols.size(); ++j) {
        ci[j] = {lattice_index(cols[j][0], *M), lattice_index(cols[j][1], *M)};
      }
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r0 = lattice_index(rows[i][0], *M);
        const int r1 = lattice_index(rows[i][1], *M);
        for (std::size_t j = 0; j < cols.size(); ++j) {
          const int a = reduced_index((r0 - ci[j][0] + *M) % *M, *M);
          const int b = reduced_index((r1 - ci[j][1] + *M) % *M, *M);
          K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t->at(a, b);
        }
      }
      return K;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (same && j < i) {
        K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      } else {
        K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(rows[i], cols[j]);
      }
    }
  }
  return K;
}

Eigen::MatrixXd SpectralKernel::energy_gram_matrix(const EllipticOperator& op,
                                                   std::span<const Point> pts) const {
  op.validate(manifold_);
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd G(n, n);
  if (manifold_.is_sphere()) {
    const auto w = sphere_gram_weights(op);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const Point& x = pts[static_cast<std::size_t>(i)];
        const Point& y = pts[static_cast<std::size_t>(j)];
        G(i, j) = G(j, i) = legendre_series(w, x[0] * y[0] + x[1] * y[1] + x[2] * y[2]);
      }
    }
    return G;
  }
  const auto M = torus_lattice(pts, pts);
  if (!M) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        G(i, j) = energy_gram(op, pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
      }
    }
    return G;
  }
  const auto t_main = table(2 * m_ - 1, *M, Profile::Value);
  std::shared_ptr<const Table> t_shift;
  if (op.c != 1.0) t_shift = table(2 * m_, *M, Profile::Value);
  std::shared_ptr<const Table> t_grad;
  if (op.advection) t_grad = table(2 * m_, *M, Profile::Gradient);
  std::vector<std::array<int, 2>> idx(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    idx[j] = {lattice_index(pts[j][0], *M), lattice_index(pts[j][1], *M)};
  }
  const int L = *M;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const int o1 = (idx[static_cast<std::size_t>(i)][0] - idx[static_cast<std::size_t>(j)][0] + L) % L;
      const int o2 = (idx[static_cast<std::size_t>(i)][1] - idx[static_cast<std::size_t>(j)][1] + L) % L;
      const int a = reduced_index(o1, L);
      const int b = reduced_index(o2, L);
      double g = t_main->at(a, b);
      if (t_shift) g += (op.c - 1.0) * t_shift->at(a, b);
      if (t_grad) {
        // Offset index o in (L/2, L) is the negative offset o - L.
        const double s1 = (o1 == 0 || 2 * o1 == L) ? 0.0 : (2 * o1 < L ? 1.0 : -1.0);
        const double s2 = (o2 == 0 || 2 * o2 == L) ? 0.0 : (2 * o2 < L ? 1.0 : -1.0);
        const double g1 = s1 * t_grad->at(a, b);
        const double g2 = s2 * t_grad->at(b, a);
        g -= (*op.advection)[0] * g1 + (*op.advection)[1] * g2;
      }
      G(i, j) = g;
    }
  }
  return G;
}

Eigen::VectorXd SpectralKernel::apply(std::span<const Point> targets, std::span<const Point> sources,
                                      const Eigen::VectorXd& weights) const {
  require(static_cast<std::size_t>(weights.size()) == sources.size(), ErrorCode::InvalidArgument,
          "kernel apply: weight count does not match sources");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(targets.size()));
  if (manifold_.is_torus()) {
    if (auto M = torus_lattice(targets, sources)) {
      const auto t = table(m_, *M, Profile::Value);
      const int L = *M;
      std::vector<std::array<int, 2>> si(sources.size());
      for (std::size_t j = 0; j < sources.size(); ++j) {
        si[j] = {lattice_index(sources[j][0], L), lattice_index(sources[j][1], L)};
      }
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const int r0 = lattice_index(targets[i][0], L);
        const int r1 = lattice_index(targets[i][1], L);
        double acc = 0.0;
        for (std::size_t j = 0; j < sources.size(); ++j) {
          const int a = reduced_index((r0 - si[j][0] + L) % L, L);
          const int b = reduced_index((r1 - si[j][1] + L) % L, L);
          acc += t->at(a, b) * weights[static_cast<Eigen::Index>(j)];
        }
        out[static_cast<Eigen::Index>(i)] = acc;
      }
      return out;
    }
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      acc += (*this)(targets[i], sources[j]) * weights[static_cast<Eigen::Index>(j)];
    }
    out[static_cast<Eigen::Index>(i)] = acc;
  }
  return out;
}

LagrangeBasis lagrange_from_coefficients(std::shared_ptr<const SpectralKernel> kernel,
                                         const PointSet& points, Eigen::MatrixXd coefficients,
                                         int level) {
  require(kernel != nullptr, ErrorCode::InvalidArgument, "lagrange: null kernel");
  const auto n = static_cast<Eigen::Index>(points.size());
  require(coefficients.rows() == n && coefficients.cols() == n, ErrorCode::InvalidArgument,
          "lagrange: coefficient matrix has the wrong shape");
  const Eigen::MatrixXd K = kernel->matrix(points.points(), points.points());
  LagrangeBasis basis;
  basis.level = level;
  basis.kernel = std::move(kernel);
  basis.points = points;
  basis.coefficients = std::move(coefficients);
  Eigen::MatrixXd R = K * basis.coefficients;
  R.diagonal().array() -= 1.0;
  basis.cardinality_error = R.cwiseAbs().maxCoeff();
  return basis;
}

LagrangeBasis compute_lagrange(std::shared_ptr<const SpectralKernel> kernel, const PointSet& points,
                               int level) {
  require(kernel != nullptr, ErrorCode::InvalidArgument, "lagrange: null kernel");
  require(!points.empty(), ErrorCode::InsufficientData, "lagrange: empty point set");
  require(points.manifold() == kernel->manifold(), ErrorCode::InvalidArgument,
          "lagrange: kernel and points live on different manifolds");
  const auto n = static_cast<Eigen::Index>(points.size());
  const Eigen::MatrixXd K = kernel->matrix(points.points(), points.points());
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    fail(ErrorCode::Conditioning, "lagrange: collocation matrix is not numerically positive "
                                  "definite (smallest pivot " +
                                      std::to_string(ldlt.vectorD().minCoeff()) + ")");
  }
  Eigen::MatrixXd C = llt.solve(Eigen::MatrixXd::Identity(n, n));
  LagrangeBasis basis;
  basis.level = level;
  basis.kernel = std::move(kernel);
  basis.points = points;
  Eigen::MatrixXd R = K * C;
  R.diagonal().array() -= 1.0;
  basis.cardinality_error = R.cwiseAbs().maxCoeff();
  basis.coefficients = std::move(C);
  return basis;
}

double eval_lagrange(const LagrangeBasis& basis, std::size_t index, const Point& x) {
  require(index < basis.size(), ErrorCode::InvalidArgument, "eval_lagrange: index out of range");
  const auto col = basis.coefficients.col(static_cast<Eigen::Index>(index));
  double acc = 0.0;
  for (std::size_t z = 0; z < basis.size(); ++z) {
    acc += col[static_cast<Eigen::Index>(z)] * (*basis.kernel)(x, basis.points[z]);
  }
  return acc;
}

Eigen::MatrixXd lagrange_values(const LagrangeBasis& basis, std::span<const Point> targets) {
  return basis.kernel->matrix(targets, basis.points.points()) * basis.coefficients;
}

Eigen::VectorXd lagrange_combination(const LagrangeBasis& basis, std::span<const Point> targets,
                                     const Eigen::VectorXd& c) {
  require(static_cast<std::size_t>(c.size()) == basis.size(), ErrorCode::InvalidArgument,
          "lagrange_combination: coefficient length mismatch");
  const Eigen::VectorXd w = basis.coefficients * c;
  return basis.kernel->apply(targets, basis.points.points(), w);
}

DecayFit decay_profile(const LagrangeBasis& basis, std::size_t index, const MeshStats& stats) {
  require(basis.size() >= 2, ErrorCode::InsufficientData,
          "decay_profile: a single-point basis has no decay range");
  require(index < basis.size(), ErrorCode::InvalidArgument, "decay_profile: index out of range");
  require(stats.h > 0.0, ErrorCode::InvalidArgument, "decay_profile: fill distance must be positive");
  const Manifold& mf = basis.points.manifold();
  std::vector<Point> probes;
  if (mf.is_torus()) {
    const int P = default_probe_density(mf, basis.size(), -1);
    probes.reserve(static_cast<std::size_t>(P) * P);
    for (int i = 0; i < P; ++i) {
      for (int j = 0; j < P; ++j) probes.push_back({kTwoPi * i / P, kTwoPi * j / P, 0.0});
    }
  } else {
    probes = icosphere(default_probe_density(mf, basis.size(), -1)).vertices;
  }
  const Eigen::VectorXd values = basis.kernel->apply(
      probes, basis.points.points(), basis.coefficients.col(static_cast<Eigen::Index>(index)));
  const Point& center = basis.points[index];
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const double v = std::fabs(values[static_cast<Eigen::Index>(p)]);
    if (v < 1e-12 || v > 1.0) continue;
    x.push_back(detail::distance(mf.is_sphere(), probes[p], center) / stats.h);
    y.push_back(std::log(v));
  }
  require(x.size() >= 8, ErrorCode::InsufficientData, "decay_profile: fewer than 8 usable samples");
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

void write_basis_cache(const std::filesystem::path& path, const LagrangeBasis& basis) {
  const auto n = static_cast<std::uint32_t>(basis.size());
  std::string buf;
  buf.reserve(17 + static_cast<std::size_t>(n) * n * 8);
  buf.append("LAGB", 4);
  put_u32(buf, 1);
  put_u32(buf, n);
  put_u32(buf, static_cast<std::uint32_t>(basis.kernel->m()));
  buf.push_back(static_cast<char>(basis.points.manifold().kind));
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      const double v = basis.coefficients(i, j);
      std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
      for (int k = 0; k < 8; ++k) buf.push_back(static_cast<char>((bits >> (8 * k)) & 0xffu));
    }
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "basis cache: cannot open " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    require(static_cast<bool>(out), ErrorCode::Io, "basis cache: write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::Io, "basis cache: cannot rename to " + path.string());
}

Eigen::MatrixXd read_basis_cache(const std::filesystem::path& path, const Manifold& manifold,
                                 std::size_t n, int m) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "basis cache: cannot open " + path.string());
  unsigned char head[17];
  in.read(reinterpret_cast<char*>(head), sizeof head);
  require(in.gcount() == sizeof head, ErrorCode::Io, "basis cache: truncated header");
  require(std::memcmp(head, "LAGB", 4) == 0, ErrorCode::Parse, "basis cache: bad magic");
  require(read_u32(head + 4) == 1, ErrorCode::Parse, "basis cache: unsupported version");
  require(read_u32(head + 8) == n, ErrorCode::Parse, "basis cache: size mismatch");
  require(read_u32(head + 12) == static_cast<std::uint32_t>(m), ErrorCode::Parse,
          "basis cache: smoothness order mismatch");
  require(head[16] == static_cast<unsigned char>(manifold.kind), ErrorCode::Parse,
          "basis cache: manifold mismatch");
  std::vector<unsigned char> body(n * n * 8);
  in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
  require(static_cast<std::size_t>(in.gcount()) == body.size(), ErrorCode::Io,
          "basis cache: truncated body");
  Eigen::MatrixXd C(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t bits = 0;
      const unsigned char* p = body.data() + (i * n + j) * 8;
      for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(p[k]) << (8 * k);
      C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::bit_cast<double>(bits);
    }
  }
  return C;
}

}  // namespace kgmg
