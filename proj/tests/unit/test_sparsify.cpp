// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "kgmg/truncation.hpp"
#include "support.hpp"

using namespace kgmg;
using kgmg::test::kPi;

TEST_CASE("truncation radius") {
  CHECK(truncation_radius(0.5, 1.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(truncation_radius(std::exp(-1.0), 2.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(test::error_code_of([] { truncation_radius(1.0, 1.0); }) == ErrorCode::Domain);
  CHECK(test::error_code_of([] { truncation_radius(0.5, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("truncate keeps entries by distance") {
  const PointSet g = test::torus_grid(8);
  Rng rng(31);
  DenseMatrix M(64, 64);
  for (Eigen::Index j = 0; j < 64; ++j) M.col(j) = gaussian_vector(64, rng);
  const SparseMatrix all = truncate(M, g, g, 2 * kPi * std::sqrt(2.0));
  CHECK(all.nnz() == 64u * 64u);
  CHECK(all.to_dense() == M);
  const SparseMatrix diag = truncate(M, g, g, 0.0);
  CHECK(diag.nnz() == 64u);
  CHECK(diag.to_dense() == DenseMatrix(M.diagonal().asDiagonal()));
  const double r = 1.0;
  const SparseMatrix mid = truncate(M, g, g, r);
  std::size_t expect = 0;
  for (std::size_t i = 0; i < 64; ++i) {
    for (std::size_t j = 0; j < 64; ++j) {
      const bool keep = geodesic_distance(Manifold::torus(), g[i], g[j]) <= r;
      expect += keep;
      const auto ei = static_cast<Eigen::Index>(i), ej = static_cast<Eigen::Index>(j);
      CHECK(mid.coeff(i, j) == (keep ? M(ei, ej) : 0.0));
    }
  }
  CHECK(mid.nnz() == expect);
  CHECK(test::error_code_of([&] { truncate(M, test::torus_grid(4), g, r); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sparse matrix-vector products and their operation count") {
  const SparseMatrix I = SparseMatrix::identity(5);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
  FlopLedger ledger;
  CHECK(sparse_matvec(I, x, &ledger) == x);
  CHECK(ledger.multiply_adds == 10u);
  const PointSet g = test::torus_grid(4);
  Rng rng(2);
  DenseMatrix M(16, 16);
  for (Eigen::Index j = 0; j < 16; ++j) M.col(j) = gaussian_vector(16, rng);
  const SparseMatrix S = truncate(M, g, g, 2.0);
  const Eigen::VectorXd v = gaussian_vector(16, rng);
  CHECK((sparse_matvec(S, v) - S.to_dense() * v).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(S.transpose().to_dense() == S.to_dense().transpose());
  CHECK(test::error_code_of([&] { sparse_matvec(S, x); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("truncation error falls as the radius grows") {
  const auto& d = test::torus_problem(2);
  const DenseMatrix& A = d.systems[2].A;
  const PointSet& g = d.hierarchy.levels[2];
  double prev = std::numeric_limits<double>::infinity();
  for (double r : {0.3, 0.6, 1.2, 2.4, 10.0}) {
    const TruncationError e = truncation_error_report(A, truncate(A, g, g, r));
    CHECK(e.spectral_norm_diff <= prev * (1 + 1e-6));
    CHECK(e.spectral_norm_diff <= e.max_row_sum_diff + 1e-12);
    prev = e.spectral_norm_diff;
  }
  CHECK(prev == 0.0);
}

TEST_CASE("exponential tail bound dominates the lattice sum") {
  const PointSet g = test::torus_grid(16);
  const double q = mesh_norms(g, 16).q;
  for (double c : {1.0, 2.0}) {
    for (double r : {3 * q, 6 * q}) {
      double worst = 0.0;
      for (std::size_t i = 0; i < g.size(); i += 17) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
          const double dist = geodesic_distance(Manifold::torus(), g[i], g[j]);
          if (dist > r) s += std::exp(-c * dist);
        }
        worst = std::max(worst, s);
      }
      CHECK(worst <= tail_bound(Manifold::torus(), q, r, c));
    }
    // r^d e^(-c r) falls once r > d / c.
    CHECK(tail_bound(Manifold::torus(), q, 6 / c, c) < tail_bound(Manifold::torus(), q, 3 / c, c));
  }
  CHECK(test::error_code_of([&] { tail_bound(Manifold::torus(), q, q, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("a truncated stack with a huge radius reproduces the dense cycle") {
  const auto& d = test::torus_problem(2);
  const LevelStack dense = d.dense_stack();
  const TruncatedStack t = build_truncated_stack(dense, d.hierarchy.levels, 1e6);
  CHECK(t.stack.mode() == StackMode::Truncated);
  MgConfig cfg;
  Rng rng(8);
  const Eigen::VectorXd u = gaussian_vector(256, rng);
  const Eigen::VectorXd b = gaussian_vector(256, rng);
  const Eigen::VectorXd x = mgm(dense, 2, u, b, cfg);
  const Eigen::VectorXd y = mgm(t.stack, 2, u, b, cfg);
  CHECK((x - y).norm() <= 1e-12 * x.norm());
  for (std::size_t l = 1; l < t.info.size(); ++l) CHECK(t.info[l].nnz_A == d.systems[l].A.size());
  const TruncatedStack s = build_truncated_stack(dense, d.hierarchy.levels, 2.0);
  CHECK(s.info[2].nnz_A < 256u * 256u);
}

TEST_CASE("Matrix Market round trip") {
  const PointSet g = test::torus_grid(4);
  Rng rng(12);
  DenseMatrix M(16, 16);
  for (Eigen::Index j = 0; j < 16; ++j) M.col(j) = gaussian_vector(16, rng);
  const SparseMatrix S = truncate(M, g, g, 2.0);
  const auto dir = std::filesystem::temp_directory_path() / "kgmg_unit_mtx";
  std::filesystem::create_directories(dir);
  write_matrix_market(dir / "s.mtx", S);
  const SparseMatrix R = read_matrix_market(dir / "s.mtx");
  CHECK(R.nnz() == S.nnz());
  CHECK(R.to_dense() == S.to_dense());
  {
    std::ofstream bad(dir / "bad.mtx");
    bad << "%%MatrixMarket matrix array real general\n2 2\n";
  }
  CHECK(test::error_code_of([&] { read_matrix_market(dir / "bad.mtx"); }) == ErrorCode::Parse);
  std::filesystem::remove_all(dir);
}
