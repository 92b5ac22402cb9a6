// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/kgmg.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kgmg/config.hpp"
#include "kgmg/errors.hpp"
#include "kgmg/problem.hpp"
#include "kgmg/report.hpp"
#include "kgmg/studies.hpp"
#include "kgmg/truncation.hpp"

struct kgmg_config {
  kgmg::StudyConfig cfg;
};

struct kgmg_problem {
  kgmg::Discretization d;
};

struct kgmg_report {
  kgmg::StudyReport rep;
};

namespace {

thread_local std::string g_last_error;

kgmg_status status_of(kgmg::ErrorCode code) {
  switch (code) {
    case kgmg::ErrorCode::InvalidArgument: return KGMG_ERR_INVALID_ARGUMENT;
    case kgmg::ErrorCode::Parse: return KGMG_ERR_PARSE;
    case kgmg::ErrorCode::Domain: return KGMG_ERR_DOMAIN;
    case kgmg::ErrorCode::Conditioning: return KGMG_ERR_CONDITIONING;
    case kgmg::ErrorCode::Capacity: return KGMG_ERR_CAPACITY;
    case kgmg::ErrorCode::Unsupported: return KGMG_ERR_UNSUPPORTED;
    case kgmg::ErrorCode::InsufficientData: return KGMG_ERR_INSUFFICIENT_DATA;
    case kgmg::ErrorCode::Io: return KGMG_ERR_IO;
    case kgmg::ErrorCode::SizeGuard: return KGMG_ERR_SIZE_GUARD;
    case kgmg::ErrorCode::Internal: return KGMG_ERR_INTERNAL;
  }
  return KGMG_ERR_INTERNAL;
}

// Runs f, translating exceptions into status codes and the thread's message.
template <class F>
kgmg_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return KGMG_OK;
  } catch (const kgmg::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return KGMG_ERR_CAPACITY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KGMG_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  kgmg::require(p != nullptr, kgmg::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const kgmg::StackLevel& checked_level(const kgmg::LevelStack& stack, int level) {
  kgmg::require(level >= 0 && level <= stack.finest(), kgmg::ErrorCode::InvalidArgument, "level out of range");
  return stack[static_cast<std::size_t>(level)];
}

kgmg::SparseMatrix full_sparse(const kgmg::DenseMatrix& M, const kgmg::PointSet& rows, const kgmg::PointSet& cols) {
  return kgmg::truncate(M, rows, cols, std::numeric_limits<double>::infinity());
}

}  // namespace

extern "C" {

const char* kgmg_version(void) { return "0.1.0"; }

const char* kgmg_status_name(kgmg_status status) {
  switch (status) {
    case KGMG_OK: return "ok";
    case KGMG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case KGMG_ERR_PARSE: return "parse";
    case KGMG_ERR_DOMAIN: return "domain";
    case KGMG_ERR_CONDITIONING: return "conditioning";
    case KGMG_ERR_CAPACITY: return "capacity";
    case KGMG_ERR_UNSUPPORTED: return "unsupported";
    case KGMG_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case KGMG_ERR_IO: return "io";
    case KGMG_ERR_SIZE_GUARD: return "size_guard";
    case KGMG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* kgmg_last_error(void) { return g_last_error.c_str(); }

void kgmg_string_free(char* s) { std::free(s); }

kgmg_status kgmg_config_default(kgmg_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new kgmg_config{};
  });
}

kgmg_status kgmg_config_load(const char* path, kgmg_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto* c = new kgmg_config{kgmg::load_study_config(path)};
    *out = c;
  });
}

kgmg_status kgmg_config_parse(const char* text, const char* source, kgmg_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = nullptr;
    auto* c = new kgmg_config{kgmg::parse_study_config(text, source ? source : "config")};
    *out = c;
  });
}

void kgmg_config_free(kgmg_config* cfg) { delete cfg; }

kgmg_status kgmg_config_set_seed(kgmg_config* cfg, uint64_t seed) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.seed = seed;
  });
}

kgmg_status kgmg_config_set_output_dir(kgmg_config* cfg, const char* dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(dir, "dir");
    cfg->cfg.output.dir = dir;
  });
}

kgmg_status kgmg_config_set_study(kgmg_config* cfg, const char* kind) {
  return guarded([&] {
    need(cfg, "cfg");
    need(kind, "kind");
    cfg->cfg.kind = kgmg::study_kind_from_name(kind);
  });
}

kgmg_status kgmg_config_set_basis_cache(kgmg_config* cfg, const char* dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(dir, "dir");
    cfg->cfg.problem.basis_cache = std::filesystem::path(dir);
  });
}

kgmg_status kgmg_config_set_levels(kgmg_config* cfg, int levels) {
  return guarded([&] {
    need(cfg, "cfg");
    kgmg::require(levels >= 0, kgmg::ErrorCode::InvalidArgument, "levels must be >= 0");
    cfg->cfg.problem.levels = levels;
  });
}

kgmg_status kgmg_config_json(const kgmg_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup_string(kgmg::to_json(cfg->cfg));
  });
}

kgmg_status kgmg_hierarchy_write(const kgmg_config* cfg, const char* path) {
  return guarded([&] {
    need(cfg, "cfg");
    need(path, "path");
    const auto& p = cfg->cfg.problem;
    const auto h = kgmg::build_hierarchy(p.manifold, p.levels, p.base, p.rho_max);
    std::ostringstream os;
    kgmg::write_hierarchy_json(h, os);
    kgmg::write_file_atomic(path, os.str());
  });
}

kgmg_status kgmg_problem_create(const kgmg_config* cfg, kgmg_problem** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = nullptr;
    auto* p = new kgmg_problem{kgmg::discretize(cfg->cfg.problem)};
    *out = p;
  });
}

void kgmg_problem_free(kgmg_problem* problem) { delete problem; }

kgmg_status kgmg_problem_level_count(const kgmg_problem* problem, int* count) {
  return guarded([&] {
    need(problem, "problem");
    need(count, "count");
    *count = static_cast<int>(problem->d.level_count());
  });
}

kgmg_status kgmg_problem_size(const kgmg_problem* problem, int level, size_t* n) {
  return guarded([&] {
    need(problem, "problem");
    need(n, "n");
    kgmg::require(level >= 0 && static_cast<std::size_t>(level) < problem->d.level_count(),
                  kgmg::ErrorCode::InvalidArgument, "level out of range");
    *n = problem->d.systems[static_cast<std::size_t>(level)].A.rows();
  });
}

kgmg_status kgmg_problem_stiffness(const kgmg_problem* problem, int level, double* out, size_t capacity) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    kgmg::require(level >= 0 && static_cast<std::size_t>(level) < problem->d.level_count(),
                  kgmg::ErrorCode::InvalidArgument, "level out of range");
    const auto& A = problem->d.systems[static_cast<std::size_t>(level)].A;
    const auto count = static_cast<std::size_t>(A.size());
    kgmg::require(capacity >= count, kgmg::ErrorCode::Capacity, "stiffness: buffer too small");
    std::memcpy(out, A.data(), count * sizeof(double));
  });
}

kgmg_status kgmg_problem_export(const kgmg_problem* problem, const kgmg_config* cfg, const char* dir) {
  return guarded([&] {
    need(problem, "problem");
    need(cfg, "cfg");
    need(dir, "dir");
    const auto& d = problem->d;
    const std::filesystem::path out(dir);
    std::filesystem::create_directories(out);
    const auto& pts = d.hierarchy.levels;
    std::optional<kgmg::TruncatedStack> ts;
    if (cfg->cfg.mg.truncation) ts = kgmg::build_truncated_stack(d.dense_stack(), pts, *cfg->cfg.mg.truncation);
    nlohmann::ordered_json j;
    j["manifold"] = std::string(d.spec.manifold.name());
    j["truncation"] = cfg->cfg.mg.truncation ? nlohmann::ordered_json(*cfg->cfg.mg.truncation) : nullptr;
    auto& levels = j["levels"] = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < d.level_count(); ++l) {
      const std::string tag = std::to_string(l);
      const kgmg::SparseMatrix A =
          ts ? ts->stack[l].A.sparse() : full_sparse(d.systems[l].A, pts[l], pts[l]);
      kgmg::write_matrix_market(out / ("A_" + tag + ".mtx"), A);
      nlohmann::ordered_json e;
      e["level"] = l;
      e["N"] = d.systems[l].A.rows();
      e["theta"] = ts ? ts->stack[l].theta : d.systems[l].theta;
      e["damping_warning"] = ts ? ts->stack[l].damping_warning : d.systems[l].damping_warning;
      e["cardinality_error"] = d.bases[l].cardinality_error;
      e["nnz_A"] = A.nnz();
      if (l > 0) {
        const kgmg::SparseMatrix P =
            ts ? ts->stack[l].P.sparse() : full_sparse(d.transfers[l].P, pts[l], pts[l - 1]);
        kgmg::write_matrix_market(out / ("P_" + tag + ".mtx"), P);
        e["nnz_P"] = P.nnz();
      }
      levels.push_back(std::move(e));
    }
    kgmg::write_file_atomic(out / "assemble.json", j.dump(2) + "\n");
  });
}

kgmg_status kgmg_solve(const kgmg_problem* problem, const kgmg_config* cfg, const double* b, size_t n, double* u,
                       char** report_json) {
  return guarded([&] {
    need(problem, "problem");
    need(cfg, "cfg");
    const auto& d = problem->d;
    const auto& c = cfg->cfg;
    c.mg.validate();
    kgmg::LevelStack stack = d.dense_stack();
    if (c.mg.truncation) stack = kgmg::build_truncated_stack(stack, d.hierarchy.levels, *c.mg.truncation).stack;
    const int L = stack.finest();
    const std::size_t N = checked_level(stack, L).size();
    Eigen::VectorXd rhs;
    if (b) {
      kgmg::require(n == N, kgmg::ErrorCode::InvalidArgument, "solve: b has the wrong length");
      rhs = Eigen::Map<const Eigen::VectorXd>(b, static_cast<Eigen::Index>(n));
    } else {
      rhs = kgmg::study_rhs(d, L, c.rhs.value_or(kgmg::RhsKind::Manufactured), c.seed,
                            c.thresholds.quadrature_refine);
    }
    const kgmg::SolveResult res = kgmg::solve(stack, rhs, c.mg, Eigen::VectorXd());
    if (u) {
      kgmg::require(n == N, kgmg::ErrorCode::InvalidArgument, "solve: u has the wrong length");
      std::memcpy(u, res.u.data(), N * sizeof(double));
    }
    if (report_json) *report_json = dup_string(kgmg::to_json(res.report));
  });
}

kgmg_status kgmg_study_run(const kgmg_config* cfg, const kgmg_problem* problem, kgmg_report** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = nullptr;
    auto* r = new kgmg_report{kgmg::run_study(cfg->cfg, problem ? &problem->d : nullptr)};
    *out = r;
  });
}

void kgmg_report_free(kgmg_report* report) { delete report; }

int kgmg_report_pass(const kgmg_report* report) { return report && report->rep.pass ? 1 : 0; }

kgmg_status kgmg_report_csv(const kgmg_report* report, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(kgmg::to_csv(report->rep));
  });
}

kgmg_status kgmg_report_json(const kgmg_report* report, const kgmg_config* cfg, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(kgmg::to_json(report->rep, cfg ? &cfg->cfg : nullptr));
  });
}

kgmg_status kgmg_report_summary(const kgmg_report* report, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    std::string s;
    char buf[64];
    for (const auto& c : report->rep.checks) {
      s += c.pass ? "PASS " : "FAIL ";
      s += c.name + ": ";
      std::snprintf(buf, sizeof buf, "%.6g %s %.6g", c.value, c.relation.c_str(), c.threshold);
      s += buf;
      if (c.relation == "in") {
        std::snprintf(buf, sizeof buf, "..%.6g", c.threshold_high);
        s += buf;
      }
      s += "\n";
    }
    for (const auto& note : report->rep.notes) s += "note: " + note + "\n";
    *out = dup_string(s);
  });
}

kgmg_status kgmg_report_write(const kgmg_report* report, const kgmg_config* cfg) {
  return guarded([&] {
    need(report, "report");
    need(cfg, "cfg");
    kgmg::write_report(report->rep, cfg->cfg);
  });
}

}  // extern "C"
