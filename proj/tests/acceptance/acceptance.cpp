// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

// Batch acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
// any criterion fails. Torus runs use levels 0..4 (N = 16..4096).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kgmg/assembly.hpp"
#include "kgmg/config.hpp"
#include "kgmg/errors.hpp"
#include "kgmg/geometry.hpp"
#include "kgmg/kernel.hpp"
#include "kgmg/linalg.hpp"
#include "kgmg/multigrid.hpp"
#include "kgmg/problem.hpp"
#include "kgmg/report.hpp"
#include "kgmg/studies.hpp"
#include "kgmg/truncation.hpp"

using namespace kgmg;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kTorusLevels = 4;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const Check* find_check(const StudyReport& r, const std::string& name) {
  for (const Check& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// Appends "name=value" for each named check and folds their pass flags.
bool collect(const StudyReport& r, const std::vector<std::string>& names, std::string& detail) {
  bool ok = true;
  for (const auto& n : names) {
    const Check* c = find_check(r, n);
    if (!detail.empty()) detail += "; ";
    if (!c) {
      detail += n + " missing";
      ok = false;
      continue;
    }
    detail += n + " = " + fmt("%.4g", c->value);
    ok = ok && c->pass;
  }
  return ok;
}

std::size_t nearest_to_center(const PointSet& p) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dd = geodesic_distance(p.manifold(), p[i], {kPi, kPi, 0.0});
    if (dd < bd) {
      bd = dd;
      best = i;
    }
  }
  return best;
}

}  // namespace

int main() {
  StudyConfig base;
  base.problem.levels = kTorusLevels;
  base.seed = 1;
  std::printf("building torus hierarchy, levels 0..%d\n", kTorusLevels);
  std::fflush(stdout);
  const Discretization torus = discretize(base.problem);
  const LevelStack dense = torus.dense_stack();
  int nu_star = base.mg.nu1;

  run(1, "cardinality", [&] {
    ProblemSpec sp;
    sp.manifold = Manifold::sphere();
    sp.base = 0;
    sp.levels = 3;
    const Discretization sphere = discretize(sp);
    double worst = 0.0;
    for (const auto* d : {&torus, &sphere}) {
      for (const auto& b : d->bases) worst = std::max(worst, b.cardinality_error);
    }
    return Outcome{worst <= 1e-8, "max |chi(zeta) - delta| = " + fmt("%.3g", worst) +
                                       " over torus N <= 4096 and sphere N <= 642"};
  });

  run(2, "algorithm-matrix equivalence", [&] {
    Rng rng(17);
    double worst = 0.0;
    int levels = 0;
    for (int l = 1; l <= kTorusLevels; ++l) {
      const std::size_t n = dense[static_cast<std::size_t>(l)].size();
      if (n > 1024) break;
      ++levels;
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (bool two_grid : {true, false}) {
        MgConfig cfg = base.mg;
        cfg.two_grid = two_grid;
        const Eigen::MatrixXd M = iteration_matrix_recursive(dense, l, cfg);
        for (int t = 0; t < 3; ++t) {
          const Eigen::VectorXd u = gaussian_vector(static_cast<Eigen::Index>(n), rng);
          const Eigen::VectorXd y = two_grid ? tgm(dense, l, u, zero, cfg) : mgm(dense, l, u, zero, cfg);
          worst = std::max(worst, (y - M * u).norm() / u.norm());
        }
      }
    }
    return Outcome{worst <= 1e-10 && levels >= 3,
                   "max relative difference = " + fmt("%.3g", worst) + " on " + std::to_string(levels) +
                       " levels (two-grid and W-cycle)"};
  });

  run(3, "smoother contracts and smooths", [&] {
    // ||B^1/2 W B^-1/2|| = max |1 - theta lambda(S)| with S = B^-1/2 A B^-1/2, on every level.
    double nonexp = 0.0, band = 0.0;
    int band_levels = 0;
    bool spd = true;
    for (int l = 0; l <= kTorusLevels; ++l) {
      const StackLevel& L = dense[static_cast<std::size_t>(l)];
      if (L.size() <= base.thresholds.explicit_max_n) {
        const SmoothingProfile p = smoothing_profile(L, true, 64);
        nonexp = std::max(nonexp, p.nonexpansive_norm);
        band = std::max(band, p.scaled_band);
        ++band_levels;
        continue;
      }
      const Eigen::VectorXd s = L.B.cwiseSqrt().cwiseInverse();
      const Eigen::MatrixXd S = s.asDiagonal() * L.A.to_dense() * s.asDiagonal();
      spd = spd && Eigen::LLT<Eigen::MatrixXd>(S).info() == Eigen::Success;
      const LinearMap apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return S * x; };
      const double lmax = power_norm(apply, apply, S.rows(), 5000, 1e-13, 3).value;
      nonexp = std::max(nonexp, std::fabs(1.0 - L.theta * lmax));
    }
    return Outcome{spd && nonexp <= 1.0 + 1e-10 && band <= 3.0,
                   "||B^1/2 W B^-1/2|| = " + fmt("%.12f", nonexp) + " on levels 0.." +
                       std::to_string(kTorusLevels) + ", max (n+1)||AW^n||/(2||AW||) = " + fmt("%.3f", band) +
                       " on levels 0.." + std::to_string(band_levels - 1)};
  });

  run(4, "level-independent W-cycle contraction", [&] {
    StudyConfig cfg = base;
    cfg.kind = StudyKind::Contraction;
    const StudyReport r = contraction_study(cfg, &torus);
    std::string detail;
    bool ok = collect(r, {"max contraction at nu*", "contraction spread at nu*"}, detail);
    if (r.nu_star) {
      nu_star = *r.nu_star;
      detail = "nu* = " + std::to_string(nu_star) + "; " + detail;
    } else {
      ok = false;
    }
    return Outcome{ok, detail};
  });

  run(5, "conditioning growth", [&] {
    std::vector<double> kappa;
    for (const auto& s : torus.systems) kappa.push_back(condition_estimate(LevelMatrix(s.A)).kappa);
    double lo = 1e300, hi = 0.0;
    std::string ratios;
    for (std::size_t l = 1; l < kappa.size(); ++l) {
      const double q = kappa[l] / kappa[l - 1];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      ratios += (ratios.empty() ? "" : ", ") + fmt("%.3f", q);
    }
    return Outcome{lo >= 2.5 && hi <= 6.0, "kappa ratios " + ratios};
  });

  StudyReport complexity;
  bool complexity_ok = false;
  std::string complexity_error;
  try {
    StudyConfig cfg = base;
    cfg.kind = StudyKind::Complexity;
    cfg.mg.nu1 = cfg.mg.nu2 = nu_star;
    const auto t0 = std::chrono::steady_clock::now();
    complexity = complexity_study(cfg, &torus);
    complexity_ok = true;
    std::printf("complexity study for criteria 6 and 7: %.1f s\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  } catch (const std::exception& e) {
    complexity_error = e.what();
  }

  run(6, "MGM iteration flatness vs CG growth", [&] {
    if (!complexity_ok) return Outcome{false, "complexity study failed: " + complexity_error};
    std::string detail;
    const bool ok = collect(complexity, {"dense MGM iteration spread", "smallest CG iteration growth per level"}, detail);
    std::string its;
    for (const LevelRow& row : complexity.rows) {
      if (row.level < 2) continue;
      its += " N=" + std::to_string(row.N) + ": MGM " + std::to_string(*row.iterations) + ", CG " +
             std::to_string(*row.cg_iterations) + ";";
    }
    return Outcome{ok, detail + ";" + its};
  });

  run(7, "truncation", [&] {
    // (a) a radius above the diameter reproduces the dense solve bit for bit.
    const TruncatedStack full = build_truncated_stack(dense, torus.hierarchy.levels, 1e9);
    Rng rng(23);
    const Eigen::VectorXd b = gaussian_vector(static_cast<Eigen::Index>(dense[kTorusLevels].size()), rng);
    MgConfig mg = base.mg;
    mg.nu1 = mg.nu2 = nu_star;
    const SolveResult x = solve(dense, b, mg, Eigen::VectorXd());
    const SolveResult y = solve(full.stack, b, mg, Eigen::VectorXd());
    const bool bitwise = x.u == y.u && x.report.iterations == y.report.iterations;
    std::string detail = std::string("(a) ") + (bitwise ? "bitwise identical" : "differs");
    if (!complexity_ok) return Outcome{false, detail + "; complexity study failed: " + complexity_error};
    detail += "; K* = " + (complexity.k_star ? fmt("%g", *complexity.k_star) : std::string("none"));
    std::string rest;
    const bool ok = collect(complexity,
                            {"nnz / (N (K log N)^d) spread around mean", "truncated contraction at K*",
                             "flops per cycle / (N (log N)^d) spread around mean"},
                            rest);
    return Outcome{bitwise && ok, detail + "; " + rest};
  });

  run(8, "perturbation robustness", [&] {
    std::vector<double> eps;
    for (double h : torus.fill_distances()) eps.push_back(std::pow(h, 4.0));
    const LevelStack p = perturb_stack(dense, eps, 99);
    MgConfig mg = base.mg;
    mg.nu1 = mg.nu2 = nu_star;
    double worst = 0.0;
    std::string vals;
    for (int l = 1; l <= kTorusLevels; ++l) {
      const ContractionMeasurement m =
          measure_contraction(stack_prefix(p, l), l, mg, base.thresholds.explicit_max_n, 5);
      worst = std::max(worst, m.value);
      vals += (vals.empty() ? "" : ", ") + fmt("%.3f", m.value);
    }
    return Outcome{worst < 1.0, "eps_l = h_l^4; contractions " + vals};
  });

  run(9, "recursion lemma oracle", [&] {
    int samples = 0, held = 0;
    for (double tau : {2.0, 3.0}) {
      for (double beta_scale : {1.1, 1.5, 2.0, 5.0, 20.0}) {
        const double beta = beta_scale / tau;
        for (double gamma : {0.1, 0.3, 0.5, 0.8}) {
          const double f = (tau - 1.0) / tau;
          const double bound = std::min(f * std::pow(beta * tau, -1.0 / (tau - 1.0)), f * gamma);
          for (double frac : {0.0, 0.25, 0.5, 0.9, 0.999}) {
            const RecursionCheck c = recursive_bound_check(frac * bound, beta, tau, gamma, 10000);
            ++samples;
            held += c.hypotheses_hold && c.holds;
          }
        }
      }
    }
    // Beyond the hypotheses the trajectory can escape.
    int escaped = 0;
    for (double a : {0.3, 0.5, 0.9}) {
      const RecursionCheck c = recursive_bound_check(a, 1.0, 2.0, 0.5, 10000);
      escaped += !c.hypotheses_hold && !c.holds;
    }
    return Outcome{held == samples && samples == 200 && escaped > 0,
                   std::to_string(held) + "/" + std::to_string(samples) + " admissible samples bounded; " +
                       std::to_string(escaped) + "/3 violating samples exceed gamma"};
  });

  run(10, "Galerkin convergence order", [&] {
    StudyConfig cfg = base;
    cfg.kind = StudyKind::Convergence;
    cfg.mg.nu1 = cfg.mg.nu2 = nu_star;
    const StudyReport r = convergence_study(cfg, &torus);
    std::string detail;
    const bool ok = collect(r, {"median observed L2 order"}, detail);
    std::string orders;
    for (const LevelRow& row : r.rows) {
      if (row.order) orders += (orders.empty() ? "" : ", ") + fmt("%.2f", *row.order);
    }
    return Outcome{ok, detail + " (orders " + orders + ")"};
  });

  run(11, "decay fits", [&] {
    const int l = 2;
    const auto lu = static_cast<std::size_t>(l);
    const DecayFit a = stiffness_decay(torus.systems[lu].A, torus.hierarchy.levels[lu], torus.hierarchy.stats[lu].h);
    const DecayFit c =
        decay_profile(torus.bases[lu], nearest_to_center(torus.hierarchy.levels[lu]), torus.hierarchy.stats[lu]);
    const bool ok = a.slope < 0.0 && a.r_squared >= 0.7 && c.slope < 0.0 && c.r_squared >= 0.7;
    return Outcome{ok, "stiffness slope " + fmt("%.3f", a.slope) + " R^2 " + fmt("%.3f", a.r_squared) +
                           "; Lagrange slope " + fmt("%.3f", c.slope) + " R^2 " + fmt("%.3f", c.r_squared)};
  });

  run(12, "tail bound soundness", [&] {
    int cases = 0, sound = 0;
    double tightest = 0.0;
    auto probe = [&](const PointSet& pts, double q) {
      const Manifold& M = pts.manifold();
      for (double c : {0.5, 1.0, 2.0, 4.0}) {
        for (double rq : {2.0, 3.0, 4.0, 6.0, 8.0}) {
          const double r = rq * q;
          const double bound = tail_bound(M, q, r, c);
          double worst = 0.0;
          const std::size_t stride = std::max<std::size_t>(1, pts.size() / 32);
          for (std::size_t i = 0; i < pts.size(); i += stride) {
            double s = 0.0;
            for (std::size_t j = 0; j < pts.size(); ++j) {
              const double dd = geodesic_distance(M, pts[i], pts[j]);
              if (dd >= r) s += std::exp(-c * dd);
            }
            worst = std::max(worst, s);
          }
          ++cases;
          sound += worst <= bound;
          tightest = std::max(tightest, worst / bound);
        }
      }
    };
    for (int l = 2; l <= kTorusLevels; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      probe(torus.hierarchy.levels[lu], torus.hierarchy.stats[lu].q);
    }
    const PointHierarchy sh = build_hierarchy(Manifold::sphere(), 3, 0);
    for (std::size_t l = 2; l < sh.level_count(); ++l) probe(sh.levels[l], sh.stats[l].q);
    return Outcome{sound == cases, std::to_string(sound) + "/" + std::to_string(cases) +
                                       " (c, r) cases bounded; largest sum/bound = " + fmt("%.3g", tightest)};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
  return failures == 0 ? 0 : 1;
}
