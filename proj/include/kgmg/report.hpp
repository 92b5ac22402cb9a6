// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgmg/config.hpp"

namespace kgmg {

/// One table row. Cells a study does not measure stay empty.
struct LevelRow {
  int level = 0;
  std::size_t N = 0;
  std::optional<int> nu1, nu2, tau;
  std::optional<double> contraction;
  std::optional<int> iterations;
  std::optional<double> flops;  // per iteration
  std::string method;           // how the contraction was measured
  bool outside_theory = false;
  std::optional<double> h, q, rho, kappa, theta;
  std::optional<std::size_t> nnz;
  std::optional<double> truncation_K;
  std::optional<int> cg_iterations;
  std::optional<double> l2_error, order;
};

/// A measured quantity compared with a configured threshold.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "in"
  double threshold = 0.0;
  double threshold_high = 0.0;  // upper end for "in"
  bool pass = false;
  std::string note;
};

struct StudyReport {
  StudyKind kind = StudyKind::Contraction;
  std::vector<LevelRow> rows;
  std::vector<Check> checks;
  std::optional<int> nu_star;
  std::optional<double> k_star;
  std::vector<std::string> notes;
  bool pass = false;
  double wall_seconds = 0.0;

  Check& check(std::string name, double value, std::string relation, double threshold,
               double threshold_high = 0.0, std::string note = {});
  /// pass = every check passed (and at least one was made).
  void finalize();
};

/// Fixed column set; numbers use %.10g so reruns produce identical bytes.
std::string to_csv(const StudyReport& report);
std::string to_json(const StudyReport& report, const StudyConfig* config = nullptr);

struct WrittenFiles {
  std::filesystem::path csv;
  std::filesystem::path json;
};

WrittenFiles write_report(const StudyReport& report, const StudyConfig& config);

}  // namespace kgmg
