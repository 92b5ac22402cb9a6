// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>

#include "support.hpp"

using namespace kgmg;
using kgmg::test::kPi;

TEST_CASE("one-point stiffness") {
  auto k = test::torus_kernel();
  const PointSet p(Manifold::torus(), {{2.0, 1.0, 0}});
  const auto b = compute_lagrange(k, p);
  const EllipticOperator op;
  const LevelSystem s = assemble_stiffness(b, op);
  const double phi = (*k)(p[0], p[0]);
  CHECK(s.A(0, 0) == doctest::Approx(k->energy_gram(op, p[0], p[0]) / (phi * phi)).epsilon(1e-12));
  CHECK(s.A(0, 0) > 0.0);
}

TEST_CASE("stiffness on the 8 x 8 grid is symmetric positive definite") {
  auto k = test::torus_kernel();
  const auto b = compute_lagrange(k, test::torus_grid(8));
  const LevelSystem s = assemble_stiffness(b, EllipticOperator{});
  CHECK((s.A - s.A.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * s.A.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(s.A));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(s.B == s.A.diagonal());
}

TEST_CASE("grid symbol assembly matches the Gram route") {
  auto k = test::torus_kernel();
  const PointSet g = test::torus_grid(8);
  const auto b = compute_lagrange(k, g);
  REQUIRE(torus_grid_side(g) == 8);
  EllipticOperator adv;
  adv.c = 2.0;
  adv.advection = std::array<double, 2>{1.0, -0.5};
  for (const EllipticOperator& op : {EllipticOperator{}, adv}) {
    const DenseMatrix G = grid_stiffness(*k, g, op);
    const DenseMatrix D = dense_stiffness(b, op);
    CHECK((G - D).cwiseAbs().maxCoeff() <= 1e-9 * D.cwiseAbs().maxCoeff());
  }
  CHECK_FALSE(torus_grid_side(PointSet(Manifold::torus(), {{0, 0, 0}, {1, 0, 0}})).has_value());
}

TEST_CASE("advection stiffness rows hold a(chi_zeta, chi_xi)") {
  auto k = test::torus_kernel();
  const PointSet g = test::torus_grid(4);
  const auto b = compute_lagrange(k, g);
  EllipticOperator adv;
  adv.advection = std::array<double, 2>{1.0, 0.0};
  const DenseMatrix A = assemble_stiffness(b, adv).A;
  const DenseMatrix S = assemble_stiffness(b, EllipticOperator{}).A;
  // The skew part flips sign under transposition.
  const DenseMatrix K = A - S;
  CHECK((K + K.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * S.cwiseAbs().maxCoeff());
  CHECK(K.cwiseAbs().maxCoeff() > 1e-6 * S.cwiseAbs().maxCoeff());
}

TEST_CASE("stiffness entries decay with distance") {
  const auto& d = test::torus_problem(2);
  const DecayFit f = stiffness_decay(d.systems[2].A, d.hierarchy.levels[2], d.hierarchy.stats[2].h);
  CHECK(f.slope < 0.0);
  CHECK(f.r_squared >= 0.7);
}

TEST_CASE("load vectors") {
  auto k = test::torus_kernel();
  const auto b = compute_lagrange(k, test::torus_grid(8));
  const auto q = build_quadrature(Manifold::torus(), 32);
  const auto q2 = build_quadrature(Manifold::torus(), 64);
  CHECK(assemble_load(b, [](const Point&) { return 0.0; }, q) == Eigen::VectorXd::Zero(64));
  const ScalarField f = [](const Point& x) { return std::cos(x[0]); };
  const ScalarField g = [](const Point& x) { return std::sin(2 * x[1]) + 0.5; };
  const Eigen::VectorXd bf = assemble_load(b, f, q);
  CHECK((bf - assemble_load(b, f, q2)).norm() <= 1e-6 * bf.norm());
  const Eigen::VectorXd sum = assemble_load(b, [&](const Point& x) { return f(x) + g(x); }, q);
  CHECK((sum - bf - assemble_load(b, g, q)).norm() <= 1e-10 * sum.norm());
}

TEST_CASE("damping from the Jacobi spectrum") {
  DenseMatrix D = DenseMatrix::Zero(3, 3);
  D.diagonal() << 1.0, 2.0, 3.0;
  const Damping dd = select_damping(LevelMatrix(D), D.diagonal());
  CHECK(dd.theta == doctest::Approx(0.9).epsilon(1e-8));
  DenseMatrix A(2, 2);
  A << 2, 1, 1, 2;
  const Damping d2 = select_damping(LevelMatrix(A), A.diagonal());
  CHECK(d2.lambda_max == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(d2.theta == doctest::Approx(0.6).epsilon(1e-8));
  const auto& prob = test::torus_problem(2);
  for (const auto& s : prob.systems) {
    CHECK(s.theta > 0.0);
    CHECK(s.theta < 1.0);
  }
}

TEST_CASE("prolongation structure and bounds") {
  const auto& d = test::torus_problem(1);
  const DenseMatrix& P = d.transfers[1].P;
  const std::size_t nc = d.bases[0].size();
  REQUIRE(P.rows() == 64);
  REQUIRE(P.cols() == 16);
  CHECK((P.topRows(static_cast<Eigen::Index>(nc)) - DenseMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(d.transfers[1].R == P.transpose());
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd c = gaussian_vector(16, rng);
    CHECK((P * c).norm() >= c.norm() - 1e-12);
  }
  CHECK(spectral_norm(P) <= 10.0);
  // sum_eta (P c)_eta chi_eta^fine = sum_xi c_xi chi_xi^coarse.
  std::vector<Point> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(test::random_torus_point(rng));
  const Eigen::VectorXd c = gaussian_vector(16, rng);
  const Eigen::VectorXd fine = lagrange_combination(d.bases[1], xs, P * c);
  const Eigen::VectorXd coarse = lagrange_combination(d.bases[0], xs, c);
  CHECK((fine - coarse).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("diagonal comparability and conditioning growth") {
  const auto& d = test::torus_problem(3);
  double lo = 1e300, hi = 0.0;
  std::vector<double> kappa;
  for (const auto& s : d.systems) {
    const double r = s.B.maxCoeff() / s.B.minCoeff();
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    kappa.push_back(condition_estimate(LevelMatrix(s.A)).kappa);
  }
  CHECK(hi / lo <= 2.0);
  for (std::size_t l = 1; l < kappa.size(); ++l) {
    CHECK(kappa[l] / kappa[l - 1] >= 2.5);
    CHECK(kappa[l] / kappa[l - 1] <= 6.0);
  }
}

TEST_CASE("dense matrix binary and CSV export") {
  DenseMatrix M(2, 3);
  M << 1, 2, 3, 4, 5, 6.5;
  const auto dir = std::filesystem::temp_directory_path() / "kgmg_unit_dmat";
  std::filesystem::create_directories(dir);
  write_dense_binary(dir / "m.bin", M);
  CHECK(read_dense_binary(dir / "m.bin") == M);
  write_dense_csv(dir / "m.csv", M);
  CHECK(std::filesystem::file_size(dir / "m.csv") > 0);
  CHECK(test::error_code_of([&] { read_dense_binary(dir / "missing.bin"); }) == ErrorCode::Io);
  std::filesystem::remove_all(dir);
}
