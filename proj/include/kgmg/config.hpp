// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgmg/multigrid.hpp"
#include "kgmg/problem.hpp"

namespace kgmg {

enum class StudyKind { Contraction, Convergence, Complexity, Conditioning };
const char* to_string(StudyKind kind) noexcept;
StudyKind study_kind_from_name(std::string_view name);

enum class RhsKind { Zero, Manufactured, Random };
const char* to_string(RhsKind kind) noexcept;

/// Pass/fail settings. Every threshold a study applies lives here.
struct Thresholds {
  std::vector<int> nu_sweep{1, 2, 4, 8, 16, 32};
  double spread_max = 0.15;              // contraction spread across levels
  std::size_t explicit_max_n = 1100;     // largest N measured through ||M_L||_2
  double order_min = 2.0;                // median observed L2 order
  std::vector<double> k_sweep{1, 2, 3, 4, 6, 8, 10, 12, 16};
  int iteration_spread_max = 2;          // MGM iteration counts across levels
  double cg_growth_min = 1.5;            // per-level CG iteration growth
  double complexity_band = 0.5;          // +-50% around the fitted constant
  int complexity_min_level = 2;          // first level used in complexity fits
  std::array<double, 2> kappa_ratio{2.5, 6.0};
  double riesz_band = 4.0;
  double diag_ratio_max = 2.0;
  double decay_r2_min = 0.7;
  double norm_band = 4.0;                // scaled ||A|| and ||A^-1|| across levels
  double smoothing_band = 3.0;           // (n+1) ||A W^n|| against its n = 1 value
  double smoothing_decay_max = -0.2;     // ||A W^n|| exponent, non-symmetric case
  int quadrature_refine = 0;
};

struct OutputPaths {
  std::filesystem::path dir = ".";
  std::string csv;   // file name inside dir; empty picks "<kind>.csv"
  std::string json;  // empty picks "<kind>.json"
};

struct StudyConfig {
  ProblemSpec problem;
  MgConfig mg;
  StudyKind kind = StudyKind::Contraction;
  // Empty picks the study default: random for complexity (a manufactured
  // right-hand side is a single Fourier mode on torus grids), else manufactured.
  std::optional<RhsKind> rhs;
  Thresholds thresholds;
  OutputPaths output;
  std::uint64_t seed = 1;
};

/// Parses one JSON document. Unknown keys and type errors raise Parse with the
/// line of the offending key ("config:12: ...").
StudyConfig parse_study_config(std::string_view text, std::string_view source = "config");
StudyConfig load_study_config(const std::filesystem::path& path);
std::string to_json(const StudyConfig& cfg);

}  // namespace kgmg
