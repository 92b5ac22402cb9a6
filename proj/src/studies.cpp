// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "kgmg/errors.hpp"
#include "kgmg/linalg.hpp"

namespace kgmg {

LevelStack stack_prefix(const LevelStack& stack, int level) {
  require(level >= 0 && level <= stack.finest(), ErrorCode::InvalidArgument, "stack_prefix: level out of range");
  std::vector<StackLevel> levels(stack.levels().begin(), stack.levels().begin() + level + 1);
  return LevelStack(std::move(levels), stack.mode(), stack.symmetric());
}

ContractionMeasurement measure_contraction(const LevelStack& stack, int level, const MgConfig& cfg,
                                           std::size_t explicit_max_n, std::uint64_t seed) {
  ContractionMeasurement out;
  if (level == 0) {
    out.method = "direct";
    return out;
  }
  const LevelStack sub = stack_prefix(stack, level);
  const std::size_t n = sub[static_cast<std::size_t>(level)].size();
  if (n <= explicit_max_n && n <= kDenseIterationGuard) {
    out.value = spectral_norm(error_propagation_matrix(sub, level, cfg));
    out.method = "norm";
    return out;
  }
  MgConfig c = cfg;
  c.eps_max = 1e-12;
  c.max_iters = 60;
  Rng rng(seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(level + 1)));
  const Eigen::VectorXd u0 = gaussian_vector(static_cast<Eigen::Index>(n), rng);
  const SolveResult r = solve(sub, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), c, u0);
  out.value = std::isfinite(r.report.asymptotic_contraction) ? r.report.asymptotic_contraction
                                                             : std::numeric_limits<double>::infinity();
  out.iterations = r.report.iterations;
  out.method = "residual";
  return out;
}

namespace {

double spread_of(const std::vector<ContractionMeasurement>& row) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& m : row) {
    lo = std::min(lo, m.value);
    hi = std::max(hi, m.value);
  }
  return row.empty() ? 0.0 : hi - lo;
}

double max_of(const std::vector<ContractionMeasurement>& row) {
  double hi = 0.0;
  for (const auto& m : row) hi = std::max(hi, m.value);
  return hi;
}

}  // namespace

NuSweep sweep_nu(const LevelStack& stack, const MgConfig& base, const Thresholds& th, std::uint64_t seed) {
  require(stack.finest() >= 1, ErrorCode::InsufficientData, "sweep_nu: needs at least two levels");
  NuSweep out;
  out.nu = th.nu_sweep;
  for (int nu : th.nu_sweep) {
    MgConfig cfg = base;
    cfg.nu1 = nu;
    cfg.nu2 = nu;
    std::vector<ContractionMeasurement> row;
    for (int l = 1; l <= stack.finest(); ++l) {
      row.push_back(measure_contraction(stack, l, cfg, th.explicit_max_n, seed));
    }
    if (!out.nu_star && max_of(row) <= base.gamma_target && spread_of(row) <= th.spread_max) out.nu_star = nu;
    out.by_nu.push_back(std::move(row));
  }
  return out;
}

SmoothingProfile smoothing_profile(const StackLevel& level, bool symmetric, int n_max) {
  require(n_max >= 1, ErrorCode::InvalidArgument, "smoothing_profile: n_max must be >= 1");
  const std::size_t n = level.size();
  require(n <= kDenseIterationGuard, ErrorCode::SizeGuard, "smoothing_profile: level too large for dense powers");
  const Eigen::MatrixXd A = level.A.to_dense();
  const Eigen::VectorXd& B = level.B;
  const double theta = level.theta;
  SmoothingProfile out;
  out.norms.reserve(static_cast<std::size_t>(n_max));
  if (symmetric) {
    const Eigen::VectorXd s = B.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd S = s.asDiagonal() * A * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
    const Eigen::VectorXd lam = es.eigenvalues();
    out.nonexpansive_norm = (1.0 - theta * lam.array()).abs().maxCoeff();
    // A W^n = B^1/2 Q D_n Q^T B^1/2 with D_n = Lambda (1 - theta Lambda)^n, whose
    // spectrum equals that of F^1/2 D_n F^1/2, F = Q^T B Q.
    const Eigen::MatrixXd F = es.eigenvectors().transpose() * B.asDiagonal() * es.eigenvectors();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fs(F);
    const Eigen::MatrixXd Fh =
        fs.eigenvectors() * fs.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * fs.eigenvectors().transpose();
    for (int p = 1; p <= n_max; ++p) {
      const Eigen::VectorXd d = lam.array() * (1.0 - theta * lam.array()).pow(p);
      const Eigen::MatrixXd H = Fh * d.asDiagonal() * Fh;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hs(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
      out.norms.push_back(hs.eigenvalues().cwiseAbs().maxCoeff());
    }
  } else {
    const Eigen::MatrixXd W =
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) -
        theta * B.cwiseInverse().asDiagonal() * A;
    const Eigen::VectorXd s = B.cwiseSqrt();
    out.nonexpansive_norm = spectral_norm(s.asDiagonal() * W * s.cwiseInverse().asDiagonal());
    Eigen::MatrixXd P = A;
    for (int p = 1; p <= n_max; ++p) {
      P = P * W;
      out.norms.push_back(spectral_norm(P));
    }
  }
  const double first = 2.0 * out.norms.front();
  double worst = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  for (int p = 1; p <= n_max; ++p) {
    const double v = out.norms[static_cast<std::size_t>(p - 1)];
    worst = std::max(worst, (p + 1.0) * v / first);
    if (v > 0.0) {
      x.push_back(std::log(static_cast<double>(p)));
      y.push_back(std::log(v));
    }
  }
  out.scaled_band = worst;
  if (x.size() >= 2) out.decay_exponent = fit_line(x, y).slope;
  return out;
}

RieszBand riesz_ratios(const LagrangeBasis& basis, const QuadratureRule& quad, double q, int samples,
                       std::uint64_t seed) {
  require(samples >= 1 && q > 0.0, ErrorCode::InvalidArgument, "riesz_ratios: bad arguments");
  Rng rng(seed);
  RieszBand band{std::numeric_limits<double>::infinity(), 0.0};
  const double scale = std::pow(q, basis.points.manifold().dim / 2.0);
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd a = gaussian_vector(static_cast<Eigen::Index>(basis.size()), rng);
    const Eigen::VectorXd v = lagrange_combination(basis, quad.nodes.points(), a);
    double acc = 0.0;
    for (std::size_t k = 0; k < quad.weights.size(); ++k) acc += quad.weights[k] * v[static_cast<Eigen::Index>(k)] * v[static_cast<Eigen::Index>(k)];
    const double ratio = std::sqrt(acc) / (scale * a.norm());
    band.min_ratio = std::min(band.min_ratio, ratio);
    band.max_ratio = std::max(band.max_ratio, ratio);
  }
  return band;
}

Eigen::VectorXd study_rhs(const Discretization& d, int level, RhsKind kind, std::uint64_t seed,
                          int quadrature_refine) {
  require(level >= 0 && static_cast<std::size_t>(level) < d.level_count(), ErrorCode::InvalidArgument,
          "study_rhs: level out of range");
  const LagrangeBasis& basis = d.bases[static_cast<std::size_t>(level)];
  const auto n = static_cast<Eigen::Index>(basis.size());
  switch (kind) {
    case RhsKind::Zero: return Eigen::VectorXd::Zero(n);
    case RhsKind::Random: {
      Rng rng(seed + static_cast<std::uint64_t>(level));
      return gaussian_vector(n, rng);
    }
    case RhsKind::Manufactured: {
      const auto ms = manufactured_solution(d.spec.manifold, d.spec.op);
      return assemble_load(basis, ms.f, default_quadrature(d.spec.manifold, basis.size(), quadrature_refine));
    }
  }
  fail(ErrorCode::Internal, "study_rhs: unknown kind");
}

KSweep sweep_truncation(const Discretization& d, const LevelStack& dense, const MgConfig& cfg,
                        const Thresholds& th, std::uint64_t seed) {
  KSweep out;
  std::vector<double> ks = th.k_sweep;
  if (cfg.truncation) ks = {*cfg.truncation};
  std::sort(ks.begin(), ks.end());
  for (double K : ks) {
    out.K.push_back(K);
    out.by_k.emplace_back();
    out.errors.emplace_back();
    try {
      const TruncatedStack ts = build_truncated_stack(dense, d.hierarchy.levels, K);
      bool ok = true;
      for (int l = 1; l <= ts.stack.finest() && ok; ++l) {
        out.by_k.back().push_back(measure_contraction(ts.stack, l, cfg, th.explicit_max_n, seed));
        ok = out.by_k.back().back().value < 1.0;
      }
      const auto& row = out.by_k.back();
      if (ok && max_of(row) <= cfg.gamma_target && spread_of(row) <= th.spread_max) {
        out.k_star = K;
        break;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Domain) throw;
      out.errors.back() = e.what();
    }
  }
  return out;
}

double relative_spread(const std::vector<double>& values) {
  require(!values.empty(), ErrorCode::InsufficientData, "relative_spread: no values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double spread = 0.0;
  for (double v : values) spread = std::max(spread, std::fabs(v / mean - 1.0));
  return spread;
}

namespace {

const Discretization& obtain(const StudyConfig& cfg, const Discretization* prebuilt, Discretization& local) {
  if (prebuilt) return *prebuilt;
  local = discretize(cfg.problem);
  return local;
}

LevelRow base_row(const Discretization& d, int level) {
  LevelRow r;
  r.level = level;
  const auto& st = d.hierarchy.stats[static_cast<std::size_t>(level)];
  r.N = st.count;
  r.h = st.h;
  r.q = st.q;
  r.rho = st.rho;
  r.theta = d.systems[static_cast<std::size_t>(level)].theta;
  return r;
}

std::size_t central_index(const PointSet& pts) {
  if (pts.manifold().is_sphere()) return 0;
  const Point center{std::numbers::pi, std::numbers::pi, 0.0};
  std::size_t best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double g = geodesic_distance(pts.manifold(), pts[i], center);
    if (g < dist) {
      dist = g;
      best = i;
    }
  }
  return best;
}

double median(std::vector<double> v) {
  require(!v.empty(), ErrorCode::InsufficientData, "median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

LevelStack working_stack(const StudyConfig& cfg, const Discretization& d) {
  LevelStack stack = d.dense_stack();
  if (cfg.mg.truncation) return build_truncated_stack(stack, d.hierarchy.levels, *cfg.mg.truncation).stack;
  return stack;
}

}  // namespace

StudyReport contraction_study(const StudyConfig& cfg, const Discretization* prebuilt) {
  cfg.mg.validate();
  Discretization local;
  const Discretization& d = obtain(cfg, prebuilt, local);
  StudyReport rep;
  rep.kind = StudyKind::Contraction;
  const LevelStack stack = working_stack(cfg, d);
  const NuSweep sw = sweep_nu(stack, cfg.mg, cfg.thresholds, cfg.seed);
  for (std::size_t i = 0; i < sw.nu.size(); ++i) {
    for (int l = 1; l <= stack.finest(); ++l) {
      LevelRow r = base_row(d, l);
      const auto& m = sw.by_nu[i][static_cast<std::size_t>(l - 1)];
      r.nu1 = r.nu2 = sw.nu[i];
      r.tau = cfg.mg.tau;
      r.contraction = m.value;
      r.method = m.method;
      if (m.method == "residual") r.iterations = m.iterations;
      r.outside_theory = cfg.mg.outside_theory();
      if (cfg.mg.truncation) r.truncation_K = *cfg.mg.truncation;
      rep.rows.push_back(std::move(r));
    }
  }
  rep.nu_star = sw.nu_star;
  if (sw.nu_star) {
    const auto idx = static_cast<std::size_t>(std::find(sw.nu.begin(), sw.nu.end(), *sw.nu_star) - sw.nu.begin());
    rep.check("max contraction at nu*", max_of(sw.by_nu[idx]), "<=", cfg.mg.gamma_target);
    rep.check("contraction spread at nu*", spread_of(sw.by_nu[idx]), "<=", cfg.thresholds.spread_max);
  } else {
    rep.check("nu* found in sweep", 0.0, ">=", 1.0, 0.0, "no swept nu met gamma_target and the spread limit");
  }
  if (sw.nu.size() >= 2) {
    // Largest over smallest nu, worst level.
    double worst = 0.0;
    const std::size_t lo = static_cast<std::size_t>(std::min_element(sw.nu.begin(), sw.nu.end()) - sw.nu.begin());
    const std::size_t hi = static_cast<std::size_t>(std::max_element(sw.nu.begin(), sw.nu.end()) - sw.nu.begin());
    for (std::size_t l = 0; l < sw.by_nu[lo].size(); ++l) {
      const double a = sw.by_nu[lo][l].value;
      worst = std::max(worst, a > 0.0 ? sw.by_nu[hi][l].value / a : 0.0);
    }
    rep.check("contraction ratio largest/smallest nu", worst, "<", 1.0);
  }
  if (cfg.mg.outside_theory()) rep.notes.push_back("tau < 2 lies outside the convergence theory");
  rep.finalize();
  return rep;
}

StudyReport convergence_study(const StudyConfig& cfg, const Discretization* prebuilt) {
  cfg.mg.validate();
  require(cfg.problem.levels >= 2, ErrorCode::InsufficientData,
          "convergence study: needs levels >= 2 for an observed order");
  Discretization local;
  const Discretization& d = obtain(cfg, prebuilt, local);
  StudyReport rep;
  rep.kind = StudyKind::Convergence;
  if (cfg.rhs && *cfg.rhs != RhsKind::Manufactured) rep.notes.push_back("rhs forced to the manufactured solution");
  const LevelStack stack = working_stack(cfg, d);
  const auto ms = manufactured_solution(d.spec.manifold, d.spec.op);
  MgConfig mg = cfg.mg;
  mg.eps_max = std::min(mg.eps_max, 1e-10);
  mg.max_iters = std::max(mg.max_iters, 200);
  std::vector<double> err;
  std::vector<double> h;
  std::vector<Eigen::VectorXd> solutions;
  const int refine = cfg.thresholds.quadrature_refine;
  for (int l = 1; l <= stack.finest(); ++l) {
    const LevelStack sub = stack_prefix(stack, l);
    const Eigen::VectorXd b = study_rhs(d, l, RhsKind::Manufactured, cfg.seed, refine);
    const SolveResult res = solve(sub, b, mg, Eigen::VectorXd());
    const auto& basis = d.bases[static_cast<std::size_t>(l)];
    const double e = l2_error(basis, res.u, ms.u, default_quadrature(d.spec.manifold, basis.size(), refine + 1));
    LevelRow r = base_row(d, l);
    r.nu1 = mg.nu1;
    r.nu2 = mg.nu2;
    r.tau = mg.tau;
    r.iterations = res.report.iterations;
    r.contraction = res.report.asymptotic_contraction;
    r.method = "residual";
    r.outside_theory = mg.outside_theory();
    r.l2_error = e;
    if (!err.empty()) r.order = std::log(err.back() / e) / std::log(h.back() / *r.h);
    err.push_back(e);
    h.push_back(*r.h);
    solutions.push_back(res.u);
    if (!res.report.converged) rep.notes.push_back("level " + std::to_string(l) + " did not reach eps_max");
    rep.rows.push_back(std::move(r));
  }
  std::vector<double> orders;
  double worst_ratio = 0.0;
  for (std::size_t i = 1; i < err.size(); ++i) {
    orders.push_back(*rep.rows[i].order);
    worst_ratio = std::max(worst_ratio, err[i] / err[i - 1]);
  }
  rep.check("median observed L2 order", median(orders), ">=", cfg.thresholds.order_min);
  rep.check("largest error ratio between consecutive levels", worst_ratio, "<", 1.0);
  // Quadrature sensitivity on the finest level up to N = 1024.
  std::size_t probe = 0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    if (d.bases[i + 1].size() <= 1024) probe = i;
  }
  const auto& basis = d.bases[probe + 1];
  const double e2 = l2_error(basis, solutions[probe], ms.u, default_quadrature(d.spec.manifold, basis.size(), refine + 2));
  rep.check("relative change of the L2 error under doubled quadrature", std::fabs(e2 - err[probe]) / err[probe], "<=",
            0.01, 0.0, "level " + std::to_string(probe + 1));
  rep.finalize();
  return rep;
}

StudyReport complexity_study(const StudyConfig& cfg, const Discretization* prebuilt) {
  cfg.mg.validate();
  Discretization local;
  const Discretization& d = obtain(cfg, prebuilt, local);
  require(d.spec.op.symmetric(), ErrorCode::Unsupported, "complexity study: the CG baseline needs a symmetric operator");
  StudyReport rep;
  rep.kind = StudyKind::Complexity;
  const Thresholds& th = cfg.thresholds;
  const LevelStack dense = d.dense_stack();
  const KSweep ks = sweep_truncation(d, dense, cfg.mg, th, cfg.seed);
  for (std::size_t i = 0; i < ks.K.size(); ++i) {
    if (!ks.errors[i].empty()) rep.notes.push_back("K = " + std::to_string(ks.K[i]) + " rejected: " + ks.errors[i]);
  }
  if (!ks.k_star) {
    rep.check("K* found in sweep", 0.0, ">=", 1.0, 0.0, "no swept K gave a contracting truncated cycle");
    rep.finalize();
    return rep;
  }
  rep.k_star = *ks.k_star;
  const double K = *ks.k_star;
  const TruncatedStack ts = build_truncated_stack(dense, d.hierarchy.levels, K);
  RhsKind rhs = cfg.rhs.value_or(RhsKind::Random);
  if (rhs == RhsKind::Zero) {
    rhs = RhsKind::Random;
    rep.notes.push_back("zero rhs replaced by a random one for iteration counts");
  }
  const auto& contractions = ks.by_k.back();
  const int d_dim = d.spec.manifold.dim;
  std::vector<double> nnz_ratio, flop_ratio, ledger_ratio;
  std::vector<int> mg_iters, trunc_iters, cg_iters;
  for (int l = 1; l <= ts.stack.finest(); ++l) {
    const LevelStack sub = stack_prefix(ts.stack, l);
    const LevelStack dsub = stack_prefix(dense, l);
    const Eigen::VectorXd b = study_rhs(d, l, rhs, cfg.seed, th.quadrature_refine);
    const SolveResult res = solve(sub, b, cfg.mg, Eigen::VectorXd());
    const SolveResult dres = solve(dsub, b, cfg.mg, Eigen::VectorXd());
    FlopLedger one, one_dense;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(b.size());
    (void)mgm(sub, l, zero, b, cfg.mg, &one);
    (void)mgm(dsub, l, zero, b, cfg.mg, &one_dense);
    const CgResult cg = cg_baseline(dense[static_cast<std::size_t>(l)].A, b, cfg.mg.eps_max);
    LevelRow r = base_row(d, l);
    r.theta = ts.stack[static_cast<std::size_t>(l)].theta;
    r.nu1 = cfg.mg.nu1;
    r.nu2 = cfg.mg.nu2;
    r.tau = cfg.mg.tau;
    r.contraction = contractions[static_cast<std::size_t>(l - 1)].value;
    r.method = contractions[static_cast<std::size_t>(l - 1)].method;
    r.iterations = dres.report.iterations;
    r.flops = static_cast<double>(one.multiply_adds);
    r.nnz = ts.info[static_cast<std::size_t>(l)].nnz_A;
    r.truncation_K = K;
    r.cg_iterations = cg.iterations;
    r.outside_theory = cfg.mg.outside_theory();
    rep.notes.push_back("level " + std::to_string(l) + ": truncated MGM took " +
                        std::to_string(res.report.iterations) + " iterations" +
                        (res.report.converged ? "" : " without reaching eps_max"));
    if (!dres.report.converged) rep.notes.push_back("level " + std::to_string(l) + " MGM did not reach eps_max");
    if (!cg.converged) rep.notes.push_back("level " + std::to_string(l) + " CG hit its iteration cap");
    if (l >= th.complexity_min_level) {
      const double N = static_cast<double>(r.N);
      const double logN = std::log(N);
      nnz_ratio.push_back(static_cast<double>(*r.nnz) / (N * std::pow(K * logN, d_dim)));
      flop_ratio.push_back(*r.flops / (N * std::pow(logN, d_dim)));
      ledger_ratio.push_back(*r.flops / static_cast<double>(one_dense.multiply_adds));
      mg_iters.push_back(*r.iterations);
      trunc_iters.push_back(res.report.iterations);
      cg_iters.push_back(cg.iterations);
    }
    rep.rows.push_back(std::move(r));
  }
  require(mg_iters.size() >= 2, ErrorCode::InsufficientData,
          "complexity study: needs at least two levels at or above complexity_min_level");
  double max_c = 0.0;
  for (const auto& m : contractions) max_c = std::max(max_c, m.value);
  rep.check("truncated contraction at K*", max_c, "<", 1.0);
  rep.check("dense MGM iteration spread", static_cast<double>(*std::max_element(mg_iters.begin(), mg_iters.end()) -
                                                         *std::min_element(mg_iters.begin(), mg_iters.end())),
            "<=", th.iteration_spread_max);
  rep.check("truncated MGM iteration spread",
            static_cast<double>(*std::max_element(trunc_iters.begin(), trunc_iters.end()) -
                                *std::min_element(trunc_iters.begin(), trunc_iters.end())),
            "<=", th.iteration_spread_max);
  double growth = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < cg_iters.size(); ++i) {
    growth = std::min(growth, static_cast<double>(cg_iters[i]) / std::max(1, cg_iters[i - 1]));
  }
  rep.check("smallest CG iteration growth per level", growth, ">=", th.cg_growth_min);
  rep.check("nnz / (N (K log N)^d) spread around mean", relative_spread(nnz_ratio), "<=", th.complexity_band);
  rep.check("flops per cycle / (N (log N)^d) spread around mean", relative_spread(flop_ratio), "<=",
            th.complexity_band);
  double worst = 0.0;
  for (std::size_t i = 1; i < ledger_ratio.size(); ++i) worst = std::max(worst, ledger_ratio[i] / ledger_ratio[i - 1]);
  rep.check("truncated/dense ledger ratio growth per level", worst, "<", 1.0);
  rep.finalize();
  return rep;
}

StudyReport conditioning_study(const StudyConfig& cfg, const Discretization* prebuilt) {
  Discretization local;
  const Discretization& d = obtain(cfg, prebuilt, local);
  const Thresholds& th = cfg.thresholds;
  StudyReport rep;
  rep.kind = StudyKind::Conditioning;
  const int dim = d.spec.manifold.dim;
  std::vector<double> kappa, diag_ratio, norm_a, norm_inv;
  double riesz_lo = std::numeric_limits<double>::infinity();
  double riesz_hi = 0.0;
  for (std::size_t l = 0; l < d.level_count(); ++l) {
    const LevelMatrix A(d.systems[l].A);
    const ConditionEstimate ce = condition_estimate(A);
    LevelRow r = base_row(d, static_cast<int>(l));
    r.kappa = ce.kappa;
    r.method = ce.dense_eigensolve ? "eigensolve" : "iterative";
    const double h = *r.h;
    kappa.push_back(ce.kappa);
    const Eigen::VectorXd& B = d.systems[l].B;
    diag_ratio.push_back(B.maxCoeff() / B.minCoeff());
    norm_a.push_back(ce.lambda_max * std::pow(h, 2 - dim));
    norm_inv.push_back(std::pow(h, dim) / ce.lambda_min);
    if (l <= 3) {
      const auto band = riesz_ratios(d.bases[l], default_quadrature(d.spec.manifold, d.bases[l].size(), th.quadrature_refine),
                                     *r.q, 20, cfg.seed + l);
      riesz_lo = std::min(riesz_lo, band.min_ratio);
      riesz_hi = std::max(riesz_hi, band.max_ratio);
    }
    rep.rows.push_back(std::move(r));
  }
  if (!d.spec.op.symmetric()) rep.notes.push_back("kappa and norms use the symmetric part of A");
  if (kappa.size() >= 2) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 1; i < kappa.size(); ++i) {
      lo = std::min(lo, kappa[i] / kappa[i - 1]);
      hi = std::max(hi, kappa[i] / kappa[i - 1]);
    }
    rep.check("smallest kappa ratio between levels", lo, "in", th.kappa_ratio[0], th.kappa_ratio[1]);
    rep.check("largest kappa ratio between levels", hi, "in", th.kappa_ratio[0], th.kappa_ratio[1]);
  }
  auto band = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  };
  rep.check("diagonal max/min ratio variation across levels", band(diag_ratio), "<=", th.diag_ratio_max);
  rep.check("||A|| h^(2-d) variation across levels", band(norm_a), "<=", th.norm_band);
  rep.check("||A^-1|| h^d variation across levels", band(norm_inv), "<=", th.norm_band);
  rep.check("Riesz ratio band (levels 0..3)", riesz_hi / riesz_lo, "<=", th.riesz_band);
  // Smoothing property on every level small enough for dense powers.
  const LevelStack stack = d.dense_stack();
  double worst_nonexp = 0.0;
  double worst_band = 0.0;
  double worst_decay = -std::numeric_limits<double>::infinity();
  for (int l = 0; l <= stack.finest(); ++l) {
    if (stack[static_cast<std::size_t>(l)].size() > th.explicit_max_n) break;
    const SmoothingProfile sp = smoothing_profile(stack[static_cast<std::size_t>(l)], stack.symmetric());
    worst_nonexp = std::max(worst_nonexp, sp.nonexpansive_norm);
    worst_band = std::max(worst_band, sp.scaled_band);
    worst_decay = std::max(worst_decay, sp.decay_exponent);
  }
  if (stack.symmetric()) {
    rep.check("||B^1/2 W B^-1/2||_2, worst level", worst_nonexp, "<=", 1.0 + 1e-10);
    rep.check("(n+1) ||A W^n|| / (2 ||A W||), worst n and level", worst_band, "<=", th.smoothing_band);
  } else {
    rep.check("log-log decay exponent of ||A W^n||, worst level", worst_decay, "<=", th.smoothing_decay_max);
  }
  const std::size_t dl = std::min<std::size_t>(2, d.level_count() - 1);
  const auto& stats = d.hierarchy.stats[dl];
  const DecayFit af = stiffness_decay(d.systems[dl].A, d.hierarchy.levels[dl], stats.h);
  rep.check("stiffness decay slope, level " + std::to_string(dl), af.slope, "<", 0.0);
  rep.check("stiffness decay R^2, level " + std::to_string(dl), af.r_squared, ">=", th.decay_r2_min);
  const DecayFit lf = decay_profile(d.bases[dl], central_index(d.hierarchy.levels[dl]), stats);
  rep.check("Lagrange decay slope, level " + std::to_string(dl), lf.slope, "<", 0.0);
  rep.check("Lagrange decay R^2, level " + std::to_string(dl), lf.r_squared, ">=", th.decay_r2_min);
  rep.finalize();
  return rep;
}

StudyReport run_study(const StudyConfig& cfg, const Discretization* prebuilt) {
  const auto t0 = std::chrono::steady_clock::now();
  StudyReport rep;
  switch (cfg.kind) {
    case StudyKind::Contraction: rep = contraction_study(cfg, prebuilt); break;
    case StudyKind::Convergence: rep = convergence_study(cfg, prebuilt); break;
    case StudyKind::Complexity: rep = complexity_study(cfg, prebuilt); break;
    case StudyKind::Conditioning: rep = conditioning_study(cfg, prebuilt); break;
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace kgmg
