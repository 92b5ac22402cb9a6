// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "kgmg/config.hpp"
#include "kgmg/report.hpp"
#include "kgmg/studies.hpp"
#include "support.hpp"

using namespace kgmg;

namespace {

std::string parse_message(std::string_view text) {
  try {
    parse_study_config(text, "cfg.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config parsing") {
  const StudyConfig c = parse_study_config(R"({
    "manifold": "sphere",
    "hierarchy": {"levels": 1, "base": 0},
    "mg": {"nu1": 3, "nu2": 1, "truncation": 4},
    "study": "convergence",
    "rhs": "random",
    "seed": 9
  })");
  CHECK(c.problem.manifold.is_sphere());
  CHECK(c.problem.levels == 1);
  CHECK(c.mg.nu1 == 3);
  CHECK(c.mg.nu2 == 1);
  CHECK(c.mg.truncation == 4.0);
  CHECK(c.kind == StudyKind::Convergence);
  CHECK(c.rhs == RhsKind::Random);
  CHECK(c.seed == 9u);
  CHECK_FALSE(parse_study_config("{}").rhs.has_value());
  const StudyConfig back = parse_study_config(to_json(c));
  CHECK(back.mg.nu1 == 3);
  CHECK(back.rhs == RhsKind::Random);
}

TEST_CASE("config diagnostics name the line") {
  CHECK(parse_message("{\n  \"study\": \"contraction\",\n  \"bogus\": 1\n}").find("cfg.json:3") !=
        std::string::npos);
  CHECK(parse_message("{\n\n  \"mg\": {\"tau\": \"two\"}\n}").find("cfg.json:3") != std::string::npos);
  CHECK(parse_message("{\"rhs\": \"sine\"}").find("rhs") != std::string::npos);
  CHECK(parse_message("{\"study\": ").find("cfg.json") != std::string::npos);
  CHECK(parse_message("{\"hierarchy\": {\"levels\": 99}}").find("levels") != std::string::npos);
  CHECK(test::error_code_of([] { load_study_config("/nonexistent/kgmg.json"); }) == ErrorCode::Io);
}

TEST_CASE("relative spread") {
  CHECK(relative_spread({1.0, 1.0, 1.0}) == 0.0);
  CHECK(relative_spread({1.0, 3.0}) == doctest::Approx(0.5));
  CHECK(test::error_code_of([] { relative_spread({}); }) == ErrorCode::InsufficientData);
}

TEST_CASE("conjugate gradients and condition estimates") {
  DenseMatrix A = DenseMatrix::Zero(4, 4);
  A.diagonal() << 1.0, 2.0, 4.0, 8.0;
  const ConditionEstimate c = condition_estimate(LevelMatrix(A));
  CHECK(c.kappa == doctest::Approx(8.0).epsilon(1e-10));
  Eigen::VectorXd x;
  const CgResult r = cg_baseline(LevelMatrix(A), Eigen::Vector4d(1, 1, 1, 1), 1e-12, &x);
  CHECK(r.converged);
  CHECK(r.iterations <= 4);
  CHECK((x - Eigen::Vector4d(1, 0.5, 0.25, 0.125)).norm() <= 1e-10);
  CHECK(cg_baseline(LevelMatrix(A), Eigen::Vector4d::Zero(), 1e-12).iterations == 0);
}

TEST_CASE("report CSV is stable") {
  StudyReport r;
  r.kind = StudyKind::Contraction;
  LevelRow row;
  row.level = 1;
  row.N = 64;
  row.contraction = 0.123456789012345;
  r.rows.push_back(row);
  r.check("max contraction", 0.12, "<=", 0.5);
  r.finalize();
  CHECK(r.pass);
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("level,N,", 0) == 0);
  CHECK(csv == to_csv(r));
  CHECK(csv.find("0.123456789") != std::string::npos);
  StudyReport empty;
  empty.finalize();
  CHECK_FALSE(empty.pass);
  r.check("failing", 2.0, "<=", 1.0);
  r.finalize();
  CHECK_FALSE(r.pass);
}

TEST_CASE("contraction study on a small torus") {
  StudyConfig cfg;
  cfg.problem.levels = 2;
  cfg.thresholds.nu_sweep = {1, 2, 4};
  const StudyReport r = run_study(cfg, &test::torus_problem(2));
  CHECK(r.pass);
  REQUIRE(r.nu_star.has_value());
  for (const LevelRow& row : r.rows) {
    if (row.level > 0 && row.nu1 == *r.nu_star) CHECK(*row.contraction <= cfg.mg.gamma_target);
  }
  const StudyReport again = run_study(cfg, &test::torus_problem(2));
  CHECK(to_csv(again) == to_csv(r));
}

TEST_CASE("zero right-hand side solves in no iterations") {
  const LevelStack stack = test::torus_problem(1).dense_stack();
  const SolveResult s = solve(stack, Eigen::VectorXd::Zero(64), MgConfig{}, Eigen::VectorXd());
  CHECK(s.report.iterations == 0);
  CHECK(s.report.converged);
  CHECK(to_json(s.report).find("\"iterations\"") != std::string::npos);
}

TEST_CASE("report files are written atomically into the output directory") {
  StudyConfig cfg;
  cfg.output.dir = std::filesystem::temp_directory_path() / "kgmg_unit_report";
  StudyReport r;
  r.check("x", 0.0, "<=", 1.0);
  r.finalize();
  const WrittenFiles w = write_report(r, cfg);
  CHECK(std::filesystem::exists(w.csv));
  CHECK(std::filesystem::exists(w.json));
  CHECK(w.csv.filename() == "contraction.csv");
  std::filesystem::remove_all(cfg.output.dir);
}
