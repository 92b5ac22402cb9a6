// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

// mgm: command-line front end over the kgmg C API.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include "kgmg/kgmg.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitStudyFail = 2;

struct Options {
  std::string config;
  std::string out;
  std::string basis_cache;
  std::string kind;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct ConfigDeleter {
  void operator()(kgmg_config* c) const { kgmg_config_free(c); }
};
struct ProblemDeleter {
  void operator()(kgmg_problem* p) const { kgmg_problem_free(p); }
};
struct ReportDeleter {
  void operator()(kgmg_report* r) const { kgmg_report_free(r); }
};
using ConfigPtr = std::unique_ptr<kgmg_config, ConfigDeleter>;
using ProblemPtr = std::unique_ptr<kgmg_problem, ProblemDeleter>;
using ReportPtr = std::unique_ptr<kgmg_report, ReportDeleter>;

// Thrown after a failed API call; the message is already formatted.
struct Failure {
  std::string message;
};

void check(kgmg_status s, const char* what) {
  if (s != KGMG_OK) throw Failure{std::string(what) + ": " + kgmg_status_name(s) + ": " + kgmg_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  kgmg_string_free(s);
  return out;
}

ConfigPtr load(const Options& o) {
  kgmg_config* raw = nullptr;
  check(kgmg_config_load(o.config.c_str(), &raw), "config");
  ConfigPtr cfg(raw);
  if (o.seed_set) check(kgmg_config_set_seed(cfg.get(), o.seed), "--seed");
  if (!o.out.empty()) check(kgmg_config_set_output_dir(cfg.get(), o.out.c_str()), "--out");
  if (!o.basis_cache.empty()) check(kgmg_config_set_basis_cache(cfg.get(), o.basis_cache.c_str()), "--basis-cache");
  if (!o.kind.empty()) check(kgmg_config_set_study(cfg.get(), o.kind.c_str()), "--kind");
  return cfg;
}

ProblemPtr discretize(const kgmg_config* cfg) {
  kgmg_problem* raw = nullptr;
  check(kgmg_problem_create(cfg, &raw), "discretize");
  return ProblemPtr(raw);
}

std::filesystem::path out_dir(const Options& o) { return o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out); }

int run_hierarchy(const Options& o) {
  const ConfigPtr cfg = load(o);
  const auto dir = out_dir(o);
  std::filesystem::create_directories(dir);
  const auto path = dir / "hierarchy.json";
  check(kgmg_hierarchy_write(cfg.get(), path.c_str()), "hierarchy");
  std::cout << path.string() << "\n";
  return kExitPass;
}

int run_assemble(const Options& o) {
  const ConfigPtr cfg = load(o);
  const auto dir = out_dir(o);
  if (o.basis_cache.empty()) {
    const auto cache = dir / "basis";
    check(kgmg_config_set_basis_cache(cfg.get(), cache.c_str()), "basis cache");
  }
  const ProblemPtr problem = discretize(cfg.get());
  check(kgmg_problem_export(problem.get(), cfg.get(), dir.c_str()), "assemble");
  std::cout << (dir / "assemble.json").string() << "\n";
  return kExitPass;
}

int run_solve(const Options& o) {
  const ConfigPtr cfg = load(o);
  const ProblemPtr problem = discretize(cfg.get());
  char* json = nullptr;
  check(kgmg_solve(problem.get(), cfg.get(), nullptr, 0, nullptr, &json), "solve");
  std::cout << take(json);
  return kExitPass;
}

int run_study(const Options& o) {
  const ConfigPtr cfg = load(o);
  kgmg_report* raw = nullptr;
  check(kgmg_study_run(cfg.get(), nullptr, &raw), "study");
  const ReportPtr report(raw);
  check(kgmg_report_write(report.get(), cfg.get()), "write report");
  char* summary = nullptr;
  check(kgmg_report_summary(report.get(), &summary), "summary");
  std::cout << take(summary);
  const bool pass = kgmg_report_pass(report.get()) != 0;
  std::cout << (pass ? "study passed" : "study failed") << "\n";
  return pass ? kExitPass : kExitStudyFail;
}

void common_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option_function<std::uint64_t>(
      "--seed", [&o](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "random seed");
  sub->add_option("--basis-cache", o.basis_cache, "directory for Lagrange basis caches");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel Galerkin multigrid on the sphere and the flat torus"};
  app.name("mgm");
  app.require_subcommand(1);
  Options o;
  CLI::App* hierarchy = app.add_subcommand("hierarchy", "write the point hierarchy as JSON");
  CLI::App* assemble = app.add_subcommand("assemble", "write level matrices and basis caches");
  CLI::App* solve = app.add_subcommand("solve", "run one multigrid solve and print its report");
  CLI::App* study = app.add_subcommand("study", "run a study and write CSV and JSON reports");
  for (CLI::App* sub : {hierarchy, assemble, solve, study}) common_options(sub, o);
  study->add_option("--kind", o.kind, "contraction, convergence, complexity or conditioning");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "mgm: " << e.what() << "\n\n" << app.help();
    return kExitError;
  }

  try {
    if (*hierarchy) return run_hierarchy(o);
    if (*assemble) return run_assemble(o);
    if (*solve) return run_solve(o);
    return run_study(o);
  } catch (const Failure& f) {
    std::cerr << "mgm: " << f.message << "\n";
  } catch (const std::exception& e) {
    std::cerr << "mgm: " << e.what() << "\n";
  }
  return kExitError;
}
