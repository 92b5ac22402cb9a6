// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kgmg/assembly.hpp"
#include "kgmg/matrix.hpp"

namespace kgmg {

struct MgConfig {
  int tau = 2;
  int nu1 = 2;
  int nu2 = 2;
  double eps_max = 1e-8;
  int max_iters = 100;
  double gamma_target = 0.5;
  std::optional<double> truncation;  // K in r = K h |log h|
  bool two_grid = false;             // use Algorithm 1 instead of the tau-cycle

  void validate() const;
  /// The convergence theory covers tau >= 2 only.
  bool outside_theory() const noexcept { return tau < 2; }
};

enum class StackMode { Dense, Truncated, Perturbed };
const char* to_string(StackMode mode) noexcept;

struct StackLevel {
  LevelMatrix A;
  Eigen::VectorXd B;
  double theta = 0.0;
  bool damping_warning = false;
  LevelMatrix P;  // n_l x n_(l-1); empty on level 0
  LevelMatrix R;  // n_(l-1) x n_l
  double h = 0.0;

  std::size_t size() const noexcept { return A.rows(); }
};

class LevelStack {
 public:
  LevelStack() = default;
  LevelStack(std::vector<StackLevel> levels, StackMode mode, bool symmetric);
  LevelStack(const LevelStack& other);
  LevelStack& operator=(const LevelStack& other);
  LevelStack(LevelStack&&) noexcept = default;
  LevelStack& operator=(LevelStack&&) noexcept = default;

  std::vector<StackLevel>& levels() noexcept { return levels_; }
  const std::vector<StackLevel>& levels() const noexcept { return levels_; }
  const StackLevel& operator[](std::size_t l) const { return levels_.at(l); }
  int finest() const noexcept { return static_cast<int>(levels_.size()) - 1; }
  StackMode mode() const noexcept { return mode_; }
  void set_mode(StackMode mode) noexcept { mode_ = mode; }
  bool symmetric() const noexcept { return symmetric_; }

  /// LU factorization of A_l, built on first use.
  const Eigen::PartialPivLU<Eigen::MatrixXd>& direct_solver(int level) const;
  /// Drops cached factorizations after the level matrices were replaced.
  void reset_solvers();

 private:
  struct SolverCache {
    std::mutex mutex;
    std::vector<std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXd>>> lu;
  };

  std::vector<StackLevel> levels_;
  StackMode mode_ = StackMode::Dense;
  bool symmetric_ = true;
  std::unique_ptr<SolverCache> cache_ = std::make_unique<SolverCache>();
};

/// Builds a dense-mode stack from assembled systems and transfers
/// (transfers[l] couples level l-1 and l; transfers[0] is unused).
LevelStack make_dense_stack(const std::vector<LevelSystem>& systems,
                            const std::vector<TransferPair>& transfers,
                            const std::vector<double>& fill_distances, bool symmetric);

/// (id - theta B^-1 A) u + theta B^-1 b.
Eigen::VectorXd jacobi_step(const StackLevel& level, const Eigen::VectorXd& u, const Eigen::VectorXd& b,
                            FlopLedger* ledger = nullptr);

Eigen::VectorXd tgm(const LevelStack& stack, int level, const Eigen::VectorXd& u_old,
                    const Eigen::VectorXd& b, const MgConfig& cfg, FlopLedger* ledger = nullptr);

Eigen::VectorXd mgm(const LevelStack& stack, int level, const Eigen::VectorXd& u_old,
                    const Eigen::VectorXd& b, const MgConfig& cfg, FlopLedger* ledger = nullptr);

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;     // ||b - A u^(k)||_2, k = 0..iterations
  std::vector<double> contraction_history;  // successive residual ratios
  double asymptotic_contraction = 0.0;      // geometric mean of the last five ratios
  std::uint64_t flops = 0;
  double flops_per_iteration = 0.0;
  bool converged = false;
  bool outside_theory = false;
  double wall_seconds = 0.0;
  int level = 0;
  std::size_t unknowns = 0;
  std::string mode;
};

struct SolveResult {
  Eigen::VectorXd u;
  SolveReport report;
};

/// u^(k+1) = MGM_L(u^(k), b) until ||b - A u||/||b|| <= eps_max (relative to
/// the initial residual when b = 0) or max_iters.
SolveResult solve(const LevelStack& stack, const Eigen::VectorXd& b, const MgConfig& cfg,
                  const Eigen::VectorXd& u0);

std::string to_json(const SolveReport& report);

/// Dense W = id - theta B^-1 A.
Eigen::MatrixXd smoothing_matrix(const StackLevel& level);

/// Applies the b = 0 cycle (two-grid if cfg.two_grid) to every canonical basis
/// vector. Limited to n_l <= 3000.
Eigen::MatrixXd error_propagation_matrix(const LevelStack& stack, int level, const MgConfig& cfg);

/// T_l or M_l from the closed recursion
/// M_l = T_l + W^nu2 P M_(l-1)^tau A_(l-1)^-1 R A W^nu1, M_0 = 0.
Eigen::MatrixXd iteration_matrix_recursive(const LevelStack& stack, int level, const MgConfig& cfg);

inline constexpr std::size_t kDenseIterationGuard = 3000;

/// Adds seeded low-rank perturbations of spectral norm eps[l] to A_l, P_l and
/// R_l, then recomputes B and theta. Levels with eps[l] == 0 are untouched.
LevelStack perturb_stack(const LevelStack& stack, const std::vector<double>& eps, std::uint64_t seed);

struct RecursionCheck {
  bool holds = false;
  double trajectory_max = 0.0;
  bool hypotheses_hold = false;
  std::vector<std::string> violations;
};

/// Iterates x_0 = 0, x_(n+1) = alpha + beta x_n^tau and compares the maximum
/// with gamma. Hypothesis violations are reported, never thrown.
RecursionCheck recursive_bound_check(double alpha, double beta, double tau, double gamma, int n_steps);

}  // namespace kgmg
