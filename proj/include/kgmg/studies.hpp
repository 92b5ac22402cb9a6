// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgmg/config.hpp"
#include "kgmg/problem.hpp"
#include "kgmg/report.hpp"
#include "kgmg/truncation.hpp"

namespace kgmg {

/// Levels 0..level of a stack, sharing dense storage with the original.
LevelStack stack_prefix(const LevelStack& stack, int level);

struct ContractionMeasurement {
  double value = 0.0;
  std::string method;  // "norm" (||M_l||_2) or "residual" (ratio geometric mean)
  int iterations = 0;  // cycles run for the residual method
};

/// ||M_l||_2 from the explicit iteration matrix when n_l <= explicit_max_n,
/// otherwise the geometric mean of the last five residual ratios of b = 0
/// cycles from a seeded random start (stopped at 1e-12 relative, 60 cycles).
ContractionMeasurement measure_contraction(const LevelStack& stack, int level, const MgConfig& cfg,
                                           std::size_t explicit_max_n, std::uint64_t seed);

struct NuSweep {
  std::vector<int> nu;
  std::vector<std::vector<ContractionMeasurement>> by_nu;  // [nu index][level - 1]
  std::optional<int> nu_star;
};

/// nu1 = nu2 = nu over the sweep; nu* is the first value with every level
/// at or below gamma_target and a spread of at most spread_max.
NuSweep sweep_nu(const LevelStack& stack, const MgConfig& base, const Thresholds& th, std::uint64_t seed);

struct SmoothingProfile {
  double nonexpansive_norm = 0.0;  // ||B^1/2 W B^-1/2||_2 (symmetric case)
  std::vector<double> norms;       // ||A W^n||_2, n = 1..n_max
  double scaled_band = 0.0;        // max_n (n+1) ||A W^n||_2 / (2 ||A W||_2)
  double decay_exponent = 0.0;     // slope of log ||A W^n|| against log n
};

/// Symmetric case: diagonalizes S = B^-1/2 A B^-1/2 once and evaluates every
/// power through its eigenvalues. Otherwise dense powers of W.
SmoothingProfile smoothing_profile(const StackLevel& level, bool symmetric, int n_max = 64);

struct RieszBand {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

/// ||sum a_xi chi_xi||_L2 / (q^(d/2) ||a||_2) over `samples` seeded random a.
RieszBand riesz_ratios(const LagrangeBasis& basis, const QuadratureRule& quad, double q, int samples,
                       std::uint64_t seed);

/// Right-hand side for the finest level of `d` according to the config.
Eigen::VectorXd study_rhs(const Discretization& d, int level, RhsKind kind, std::uint64_t seed,
                          int quadrature_refine = 0);

struct KSweep {
  std::vector<double> K;
  std::vector<std::vector<ContractionMeasurement>> by_k;  // [K index][level - 1]
  std::vector<std::string> errors;                         // non-empty when K was rejected
  std::optional<double> k_star;
};

/// Smallest K of the sweep whose truncated cycle keeps the level-independent
/// contraction of the dense one: every level at or below gamma_target with a
/// spread of at most spread_max. Stops at the first such K.
KSweep sweep_truncation(const Discretization& d, const LevelStack& dense, const MgConfig& cfg,
                        const Thresholds& th, std::uint64_t seed);

/// Relative spread of values around their mean: max |v / mean - 1|.
double relative_spread(const std::vector<double>& values);

StudyReport contraction_study(const StudyConfig& cfg, const Discretization* prebuilt = nullptr);
StudyReport convergence_study(const StudyConfig& cfg, const Discretization* prebuilt = nullptr);
StudyReport complexity_study(const StudyConfig& cfg, const Discretization* prebuilt = nullptr);
StudyReport conditioning_study(const StudyConfig& cfg, const Discretization* prebuilt = nullptr);

StudyReport run_study(const StudyConfig& cfg, const Discretization* prebuilt = nullptr);

}  // namespace kgmg
