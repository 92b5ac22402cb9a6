// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/multigrid.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "kgmg/errors.hpp"
#include "kgmg/linalg.hpp"

namespace kgmg {

namespace {

Eigen::VectorXd mul(const LevelMatrix& M, const Eigen::VectorXd& x, FlopLedger* ledger) {
  Eigen::VectorXd y;
  M.apply(x, y, ledger);
  return y;
}

Eigen::MatrixXd mul(const LevelMatrix& M, const Eigen::MatrixXd& X, FlopLedger* ledger) {
  if (ledger) ledger->add(2 * M.nnz() * static_cast<std::uint64_t>(X.cols()));
  return M.apply_block(X);
}

template <class V>
std::uint64_t entries(const V& v) {
  return static_cast<std::uint64_t>(v.size());
}

template <class V>
V smooth(const StackLevel& L, V u, const V& b, int steps, FlopLedger* ledger) {
  for (int s = 0; s < steps; ++s) {
    const V r = b - mul(L.A, u, ledger);
    u.array() += L.theta * (r.array().colwise() / L.B.array());
    if (ledger) ledger->add(3 * entries(u));
  }
  return u;
}

template <class V>
V direct(const LevelStack& stack, int level, const V& b, FlopLedger* ledger) {
  const auto& lu = stack.direct_solver(level);
  if (ledger) {
    const auto n = static_cast<std::uint64_t>(b.rows());
    ledger->add(2 * n * n * static_cast<std::uint64_t>(b.cols()));
  }
  return lu.solve(b);
}

template <class V>
V cycle(const LevelStack& stack, int level, const V& u_old, const V& b, const MgConfig& cfg,
        bool two_grid, FlopLedger* ledger) {
  if (level == 0) return direct(stack, 0, b, ledger);
  const StackLevel& L = stack[static_cast<std::size_t>(level)];
  V u = smooth(L, u_old, b, cfg.nu1, ledger);
  const V r = b - mul(L.A, u, ledger);
  if (ledger) ledger->add(entries(r));
  const V d = mul(L.R, r, ledger);
  V e;
  if (two_grid) {
    e = direct(stack, level - 1, d, ledger);
  } else {
    e = V::Zero(d.rows(), d.cols());
    for (int t = 0; t < cfg.tau; ++t) e = cycle(stack, level - 1, e, d, cfg, false, ledger);
  }
  u += mul(L.P, e, ledger);
  if (ledger) ledger->add(entries(u));
  return smooth(L, u, b, cfg.nu2, ledger);
}

void check_level(const LevelStack& stack, int level, std::size_t u_size, std::size_t b_size) {
  require(level >= 0 && level <= stack.finest(), ErrorCode::InvalidArgument, "multigrid: level out of range");
  const std::size_t n = stack[static_cast<std::size_t>(level)].size();
  require(u_size == n && b_size == n, ErrorCode::InvalidArgument, "multigrid: dimension mismatch");
}

Eigen::MatrixXd power(const Eigen::MatrixXd& W, int k) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(W.rows(), W.cols());
  for (int i = 0; i < k; ++i) out = out * W;
  return out;
}

DenseMatrix low_rank(Eigen::Index rows, Eigen::Index cols, double eps, bool symmetric, Rng& rng) {
  const Eigen::Index k = std::min<Eigen::Index>(16, std::min(rows, cols));
  std::uniform_real_distribution<double> unif(0.0, 0.5);
  Eigen::VectorXd s(k);
  s[0] = 1.0;
  for (Eigen::Index i = 1; i < k; ++i) s[i] = unif(rng);
  const Eigen::MatrixXd U = random_orthonormal(rows, k, rng);
  const Eigen::MatrixXd V = symmetric ? U : random_orthonormal(cols, k, rng);
  return eps * (U * s.asDiagonal() * V.transpose());
}

}  // namespace

void MgConfig::validate() const {
  require(tau >= 1, ErrorCode::InvalidArgument, "mg: tau must be >= 1");
  require(nu1 >= 1, ErrorCode::InvalidArgument, "mg: nu1 must be >= 1");
  require(nu2 >= 0, ErrorCode::InvalidArgument, "mg: nu2 must be >= 0");
  require(gamma_target > 0.0 && gamma_target < 1.0, ErrorCode::InvalidArgument,
          "mg: gamma_target must lie in (0, 1)");
  require(eps_max > 0.0, ErrorCode::InvalidArgument, "mg: eps_max must be positive");
  require(max_iters >= 0, ErrorCode::InvalidArgument, "mg: max_iters must be >= 0");
  require(!truncation || *truncation > 0.0, ErrorCode::InvalidArgument, "mg: truncation K must be positive");
}

const char* to_string(StackMode mode) noexcept {
  switch (mode) {
    case StackMode::Dense: return "dense";
    case StackMode::Truncated: return "truncated";
    case StackMode::Perturbed: return "perturbed";
  }
  return "dense";
}

LevelStack::LevelStack(std::vector<StackLevel> levels, StackMode mode, bool symmetric)
    : levels_(std::move(levels)), mode_(mode), symmetric_(symmetric) {
  require(!levels_.empty(), ErrorCode::InvalidArgument, "level stack: no levels");
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const StackLevel& L = levels_[l];
    require(L.A.rows() == L.A.cols() && static_cast<std::size_t>(L.B.size()) == L.A.rows(),
            ErrorCode::InvalidArgument, "level stack: inconsistent stiffness dimensions");
    if (l == 0) continue;
    const std::size_t nc = levels_[l - 1].size();
    require(L.P.rows() == L.size() && L.P.cols() == nc && L.R.rows() == nc && L.R.cols() == L.size(),
            ErrorCode::InvalidArgument, "level stack: transfer dimensions do not match levels");
  }
}

LevelStack::LevelStack(const LevelStack& other)
    : levels_(other.levels_), mode_(other.mode_), symmetric_(other.symmetric_) {}

LevelStack& LevelStack::operator=(const LevelStack& other) {
  if (this != &other) {
    levels_ = other.levels_;
    mode_ = other.mode_;
    symmetric_ = other.symmetric_;
    cache_ = std::make_unique<SolverCache>();
  }
  return *this;
}

const Eigen::PartialPivLU<Eigen::MatrixXd>& LevelStack::direct_solver(int level) const {
  require(level >= 0 && level <= finest(), ErrorCode::InvalidArgument, "direct_solver: level out of range");
  std::lock_guard lock(cache_->mutex);
  if (cache_->lu.size() < levels_.size()) cache_->lu.resize(levels_.size());
  auto& slot = cache_->lu[static_cast<std::size_t>(level)];
  if (!slot) {
    const Eigen::MatrixXd A = levels_[static_cast<std::size_t>(level)].A.to_dense();
    auto lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(A);
    const double pivot = lu->matrixLU().diagonal().cwiseAbs().minCoeff();
    require(pivot > 1e-14 * A.cwiseAbs().maxCoeff(), ErrorCode::Conditioning,
            "direct solve: level " + std::to_string(level) + " matrix is numerically singular");
    slot = std::move(lu);
  }
  return *slot;
}

void LevelStack::reset_solvers() { cache_ = std::make_unique<SolverCache>(); }

LevelStack make_dense_stack(const std::vector<LevelSystem>& systems,
                            const std::vector<TransferPair>& transfers,
                            const std::vector<double>& fill_distances, bool symmetric) {
  require(!systems.empty() && transfers.size() == systems.size() &&
              fill_distances.size() == systems.size(),
          ErrorCode::InvalidArgument, "make_dense_stack: level counts differ");
  std::vector<StackLevel> levels(systems.size());
  for (std::size_t l = 0; l < systems.size(); ++l) {
    StackLevel& L = levels[l];
    L.A = LevelMatrix(systems[l].A);
    L.B = systems[l].B;
    L.h = fill_distances[l];
    if (systems[l].theta > 0.0) {
      L.theta = systems[l].theta;
      L.damping_warning = systems[l].damping_warning;
    } else {
      const Damping d = select_damping(L.A, L.B, symmetric);
      L.theta = d.theta;
      L.damping_warning = d.warning;
    }
    if (l > 0) {
      L.P = LevelMatrix(transfers[l].P);
      L.R = LevelMatrix(transfers[l].R);
    }
  }
  return LevelStack(std::move(levels), StackMode::Dense, symmetric);
}

Eigen::VectorXd jacobi_step(const StackLevel& level, const Eigen::VectorXd& u, const Eigen::VectorXd& b,
                            FlopLedger* ledger) {
  require(static_cast<std::size_t>(u.size()) == level.size() && u.size() == b.size(),
          ErrorCode::InvalidArgument, "jacobi_step: dimension mismatch");
  return smooth(level, u, b, 1, ledger);
}

Eigen::VectorXd tgm(const LevelStack& stack, int level, const Eigen::VectorXd& u_old,
                    const Eigen::VectorXd& b, const MgConfig& cfg, FlopLedger* ledger) {
  cfg.validate();
  check_level(stack, level, static_cast<std::size_t>(u_old.size()), static_cast<std::size_t>(b.size()));
  return cycle(stack, level, u_old, b, cfg, true, ledger);
}

Eigen::VectorXd mgm(const LevelStack& stack, int level, const Eigen::VectorXd& u_old,
                    const Eigen::VectorXd& b, const MgConfig& cfg, FlopLedger* ledger) {
  cfg.validate();
  check_level(stack, level, static_cast<std::size_t>(u_old.size()), static_cast<std::size_t>(b.size()));
  return cycle(stack, level, u_old, b, cfg, false, ledger);
}

SolveResult solve(const LevelStack& stack, const Eigen::VectorXd& b, const MgConfig& cfg,
                  const Eigen::VectorXd& u0) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int L = stack.finest();
  const StackLevel& fine = stack[static_cast<std::size_t>(L)];
  SolveResult out;
  out.u = u0.size() == 0 ? Eigen::VectorXd::Zero(b.size()) : u0;
  check_level(stack, L, static_cast<std::size_t>(out.u.size()), static_cast<std::size_t>(b.size()));
  SolveReport& rep = out.report;
  rep.outside_theory = cfg.outside_theory();
  rep.level = L;
  rep.unknowns = fine.size();
  rep.mode = to_string(stack.mode());
  FlopLedger ledger;
  auto residual_norm = [&] {
    Eigen::VectorXd r = b - mul(fine.A, out.u, &ledger);
    ledger.add(entries(r));
    return r.norm();
  };
  double rn = residual_norm();
  rep.residual_history.push_back(rn);
  const double bn = b.norm();
  const double ref = bn > 0.0 ? bn : rn;
  rep.converged = ref == 0.0 || rn / ref <= cfg.eps_max;
  while (!rep.converged && rep.iterations < cfg.max_iters) {
    out.u = cycle(stack, L, out.u, b, cfg, cfg.two_grid, &ledger);
    ++rep.iterations;
    const double prev = rn;
    rn = residual_norm();
    rep.residual_history.push_back(rn);
    rep.contraction_history.push_back(prev > 0.0 ? rn / prev : 0.0);
    rep.converged = rn / ref <= cfg.eps_max;
  }
  if (!rep.contraction_history.empty()) {
    const std::size_t k = std::min<std::size_t>(5, rep.contraction_history.size());
    double logsum = 0.0;
    bool zero = false;
    for (std::size_t i = rep.contraction_history.size() - k; i < rep.contraction_history.size(); ++i) {
      if (rep.contraction_history[i] <= 0.0) zero = true;
      else logsum += std::log(rep.contraction_history[i]);
    }
    rep.asymptotic_contraction = zero ? 0.0 : std::exp(logsum / static_cast<double>(k));
  }
  rep.flops = ledger.multiply_adds;
  rep.flops_per_iteration =
      rep.iterations > 0 ? static_cast<double>(rep.flops) / rep.iterations : 0.0;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string to_json(const SolveReport& report) {
  nlohmann::ordered_json j;
  j["level"] = report.level;
  j["unknowns"] = report.unknowns;
  j["mode"] = report.mode;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["residual_history"] = report.residual_history;
  j["contraction_history"] = report.contraction_history;
  j["asymptotic_contraction"] = report.asymptotic_contraction;
  j["flops"] = report.flops;
  j["flops_per_iteration"] = report.flops_per_iteration;
  j["outside_theory"] = report.outside_theory;
  j["wall_seconds"] = report.wall_seconds;
  return j.dump(2);
}

Eigen::MatrixXd smoothing_matrix(const StackLevel& level) {
  const Eigen::MatrixXd A = level.A.to_dense();
  Eigen::MatrixXd W = -level.theta * (level.B.cwiseInverse().asDiagonal() * A);
  W.diagonal().array() += 1.0;
  return W;
}

Eigen::MatrixXd error_propagation_matrix(const LevelStack& stack, int level, const MgConfig& cfg) {
  cfg.validate();
  require(level >= 0 && level <= stack.finest(), ErrorCode::InvalidArgument,
          "error_propagation_matrix: level out of range");
  const auto n = static_cast<Eigen::Index>(stack[static_cast<std::size_t>(level)].size());
  require(static_cast<std::size_t>(n) <= kDenseIterationGuard, ErrorCode::SizeGuard,
          "error_propagation_matrix: level too large for a dense iteration matrix");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, n);
  return cycle<Eigen::MatrixXd>(stack, level, I, Z, cfg, cfg.two_grid, nullptr);
}

Eigen::MatrixXd iteration_matrix_recursive(const LevelStack& stack, int level, const MgConfig& cfg) {
  cfg.validate();
  require(level >= 0 && level <= stack.finest(), ErrorCode::InvalidArgument,
          "iteration_matrix_recursive: level out of range");
  const StackLevel& L = stack[static_cast<std::size_t>(level)];
  const auto n = static_cast<Eigen::Index>(L.size());
  require(static_cast<std::size_t>(n) <= kDenseIterationGuard, ErrorCode::SizeGuard,
          "iteration_matrix_recursive: level too large for a dense iteration matrix");
  if (level == 0) return Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd W = smoothing_matrix(L);
  const Eigen::MatrixXd W1 = power(W, cfg.nu1);
  const Eigen::MatrixXd W2 = power(W, cfg.nu2);
  const Eigen::MatrixXd A = L.A.to_dense();
  const Eigen::MatrixXd P = L.P.to_dense();
  const Eigen::MatrixXd R = L.R.to_dense();
  const Eigen::MatrixXd RA = R * A;
  const Eigen::MatrixXd CGC = stack.direct_solver(level - 1).solve(RA);
  Eigen::MatrixXd inner = -P * CGC;
  inner.diagonal().array() += 1.0;
  Eigen::MatrixXd M = W2 * inner * W1;
  if (cfg.two_grid) return M;
  const Eigen::MatrixXd Mc = iteration_matrix_recursive(stack, level - 1, cfg);
  M += W2 * P * power(Mc, cfg.tau) * CGC * W1;
  return M;
}

LevelStack perturb_stack(const LevelStack& stack, const std::vector<double>& eps, std::uint64_t seed) {
  require(eps.size() == stack.levels().size(), ErrorCode::InvalidArgument,
          "perturb_stack: one epsilon per level is required");
  for (double e : eps) {
    require(e >= 0.0 && std::isfinite(e), ErrorCode::InvalidArgument, "perturb_stack: epsilon must be >= 0");
  }
  LevelStack out = stack;
  bool changed = false;
  for (std::size_t l = 0; l < eps.size(); ++l) {
    if (eps[l] == 0.0) continue;
    changed = true;
    Rng rng(seed ^ (0x9e3779b97f4a7c15ull * (l + 1)));
    StackLevel& L = out.levels()[l];
    const auto n = static_cast<Eigen::Index>(L.size());
    DenseMatrix A = L.A.to_dense() + low_rank(n, n, eps[l], stack.symmetric(), rng);
    Eigen::VectorXd B = A.diagonal();
    require((B.array() > 0.0).all(), ErrorCode::Domain,
            "perturb_stack: perturbation made a diagonal entry nonpositive on level " + std::to_string(l));
    L.A = LevelMatrix(std::move(A));
    L.B = std::move(B);
    const Damping d = select_damping(L.A, L.B, stack.symmetric());
    L.theta = d.theta;
    L.damping_warning = d.warning;
    if (l > 0) {
      const auto nc = static_cast<Eigen::Index>(L.P.cols());
      L.P = LevelMatrix(DenseMatrix(L.P.to_dense() + low_rank(n, nc, eps[l], false, rng)));
      L.R = LevelMatrix(DenseMatrix(L.R.to_dense() + low_rank(nc, n, eps[l], false, rng)));
    }
  }
  if (changed) out.set_mode(StackMode::Perturbed);
  out.reset_solvers();
  return out;
}

RecursionCheck recursive_bound_check(double alpha, double beta, double tau, double gamma, int n_steps) {
  RecursionCheck out;
  if (!(gamma > 0.0 && gamma < 1.0)) out.violations.push_back("gamma must lie in (0, 1)");
  if (!(tau >= 2.0)) out.violations.push_back("tau must be >= 2");
  if (!(beta > 1.0 / tau)) out.violations.push_back("beta must exceed 1/tau");
  if (tau > 1.0 && beta > 0.0) {
    const double f = (tau - 1.0) / tau;
    const double bound = std::min(f * std::pow(beta * tau, -1.0 / (tau - 1.0)), f * gamma);
    if (!(alpha < bound)) out.violations.push_back("alpha must be below min{(tau-1)/tau (beta tau)^(-1/(tau-1)), (tau-1)/tau gamma}");
  } else {
    out.violations.push_back("alpha bound undefined for tau <= 1 or beta <= 0");
  }
  out.hypotheses_hold = out.violations.empty();
  double x = 0.0;
  double mx = 0.0;
  for (int n = 0; n < n_steps; ++n) {
    x = alpha + beta * std::pow(x, tau);
    if (!std::isfinite(x) || x > 1e300) {
      mx = std::numeric_limits<double>::infinity();
      break;
    }
    mx = std::max(mx, x);
  }
  out.trajectory_max = mx;
  out.holds = mx <= gamma;
  return out;
}

}  // namespace kgmg
