// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace kgmg;
using kgmg::test::kPi;

TEST_CASE("kernel is exactly symmetric") {
  Rng rng(11);
  const SpectralKernel T(Manifold::torus(), 3);
  const SpectralKernel S(Manifold::sphere(), 3);
  for (int i = 0; i < 100; ++i) {
    const Point a = test::random_torus_point(rng), b = test::random_torus_point(rng);
    CHECK(T(a, b) == T(b, a));
    const Point x = test::random_sphere_point(rng), y = test::random_sphere_point(rng);
    CHECK(S(x, y) == S(y, x));
  }
}

TEST_CASE("torus kernel matches a brute-force double loop") {
  const SpectralKernel T(Manifold::torus(), 3);
  const int cutoff = 400;
  double diag = 0.0;
  for (int k1 = -cutoff; k1 <= cutoff; ++k1) {
    for (int k2 = -cutoff; k2 <= cutoff; ++k2) diag += std::pow(1.0 + k1 * k1 + k2 * k2, -3.0);
  }
  diag /= 4 * kPi * kPi;
  CHECK(T({1, 1, 0}, {1, 1, 0}) == doctest::Approx(diag).epsilon(1e-10));
  const Point x{0.3, 2.0, 0}, y{5.9, 0.1, 0};
  CHECK(T(x, y) == doctest::Approx(T.series_partial_sum(x, y, 300)).epsilon(1e-9));
}

TEST_CASE("sphere kernel is zonal") {
  const SpectralKernel S(Manifold::sphere(), 3);
  Rng rng(3);
  const double ref = S({0, 0, 1}, {0, 0, 1});
  for (int i = 0; i < 20; ++i) {
    const Point x = test::random_sphere_point(rng);
    CHECK(S(x, x) == doctest::Approx(ref).epsilon(1e-14));
  }
  CHECK(S({0, 0, 1}, {1, 0, 0}) == doctest::Approx(S.series_partial_sum({0, 0, 1}, {1, 0, 0}, 400)).epsilon(1e-10));
}

TEST_CASE("kernel rejects unsupported smoothness") {
  CHECK(test::error_code_of([] { SpectralKernel(Manifold::torus(), 2); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("energy Gram identities") {
  const SpectralKernel k3(Manifold::torus(), 3);
  const SpectralKernel k5(Manifold::torus(), 5);
  EllipticOperator op;
  const Point x{0.4, 1.1, 0}, y{3.0, 5.5, 0};
  // (|k|^2 + 1)(1 + |k|^2)^-6 = (1 + |k|^2)^-5.
  CHECK(k3.energy_gram(op, x, y) == doctest::Approx(k5(x, y)).epsilon(1e-12));
  for (double c : {1.0, 2.0, 10.0}) {
    op.c = c;
    CHECK(k3.energy_gram(op, x, x) > 0.0);
  }
  EllipticOperator adv;
  adv.advection = std::array<double, 2>{1.0, 0.0};
  CHECK(k3.energy_gram(adv, x, x) == doctest::Approx(k3.energy_gram(EllipticOperator{}, x, x)).epsilon(1e-15));
  // The advection part is antisymmetric in (x, y).
  const double sym = k3.energy_gram(EllipticOperator{}, x, y);
  CHECK(k3.energy_gram(adv, x, y) - sym == doctest::Approx(-(k3.energy_gram(adv, y, x) - sym)).epsilon(1e-12));
}

TEST_CASE("operator validation") {
  EllipticOperator op;
  op.c = 0.5;
  CHECK(test::error_code_of([&] { op.validate(Manifold::torus()); }) == ErrorCode::Domain);
  EllipticOperator adv;
  adv.advection = std::array<double, 2>{1.0, 0.0};
  CHECK(test::error_code_of([&] { adv.validate(Manifold::sphere()); }) == ErrorCode::Unsupported);
  EllipticOperator var;
  var.variable_reaction = [](const Point&) { return 1.0; };
  CHECK(test::error_code_of([&] { var.validate(Manifold::torus()); }) == ErrorCode::Unsupported);
}

TEST_CASE("single-point Lagrange basis") {
  auto k = test::torus_kernel();
  const PointSet p(Manifold::torus(), {{1.0, 2.0, 0}});
  const auto b = compute_lagrange(k, p);
  CHECK(b.coefficients(0, 0) == doctest::Approx(1.0 / (*k)(p[0], p[0])).epsilon(1e-14));
  CHECK(test::error_code_of([&] { decay_profile(b, 0, MeshStats{1.0, 1.0, 1.0, 1, 0.1}); }) ==
        ErrorCode::InsufficientData);
}

TEST_CASE("cardinality and collocation positivity") {
  auto k = test::torus_kernel();
  const auto b4 = compute_lagrange(k, test::torus_grid(4));
  CHECK(b4.cardinality_error <= 1e-8);
  const PointSet g8 = test::torus_grid(8);
  const Eigen::MatrixXd K = k->matrix(g8.points(), g8.points());
  CHECK(K == K.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  const auto b8 = compute_lagrange(k, g8);
  for (std::size_t i = 0; i < b8.size(); i += 7) {
    for (std::size_t j = 0; j < b8.size(); j += 5) {
      CHECK(std::fabs(eval_lagrange(b8, i, g8[j]) - (i == j ? 1.0 : 0.0)) <= 1e-8);
    }
  }
}

TEST_CASE("Lagrange functions nearly reproduce constants") {
  auto k = test::torus_kernel();
  const auto b = compute_lagrange(k, test::torus_grid(8));
  Rng rng(5);
  std::vector<Point> xs;
  for (int i = 0; i < 30; ++i) xs.push_back(test::random_torus_point(rng));
  const Eigen::VectorXd s = lagrange_combination(b, xs, Eigen::VectorXd::Ones(64));
  CHECK((s.array() - 1.0).abs().maxCoeff() <= 0.1);
  const Eigen::MatrixXd V = lagrange_values(b, xs);
  CHECK((V.rowwise().sum() - s).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Lagrange functions are translation invariant on the grid") {
  auto k = test::torus_kernel();
  const PointSet g = test::torus_grid(8);
  const auto b = compute_lagrange(k, g);
  // Index 9 is (1,1); index 27 is (3,3): shift by 2 grid steps in both coordinates.
  const double s = 2 * 2 * kPi / 8;
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const Point x = test::random_torus_point(rng);
    const Point y = wrap_torus(x[0] + s, x[1] + s);
    CHECK(eval_lagrange(b, 27, y) == doctest::Approx(eval_lagrange(b, 9, x)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("Lagrange decay on the 16 x 16 grid") {
  auto k = test::torus_kernel();
  const PointSet g = test::torus_grid(16);
  const auto b = compute_lagrange(k, g);
  const MeshStats st = mesh_norms(g, 64);
  const std::size_t center = 8 * 16 + 8;
  const DecayFit f = decay_profile(b, center, st);
  CHECK(f.slope < -0.5);
  CHECK(f.r_squared >= 0.8);
  const DecayFit g2 = decay_profile(b, 3 * 16 + 5, st);
  CHECK(g2.slope == doctest::Approx(f.slope).epsilon(0.1));
}

TEST_CASE("basis cache round trip and corruption") {
  auto k = test::torus_kernel();
  const PointSet g = test::torus_grid(4);
  const auto b = compute_lagrange(k, g);
  const auto dir = std::filesystem::temp_directory_path() / "kgmg_unit_cache";
  std::filesystem::create_directories(dir);
  const auto path = dir / "b.bin";
  write_basis_cache(path, b);
  const Eigen::MatrixXd C = read_basis_cache(path, Manifold::torus(), g.size(), 3);
  CHECK(C == b.coefficients);
  CHECK(test::error_code_of([&] { read_basis_cache(path, Manifold::torus(), g.size(), 4); }) == ErrorCode::Parse);
  CHECK(test::error_code_of([&] { read_basis_cache(path, Manifold::torus(), 9, 3); }) == ErrorCode::Parse);
  {
    std::ofstream bad(dir / "bad.bin", std::ios::binary);
    bad << "NOPE0000000000000000";
  }
  CHECK(test::error_code_of([&] { read_basis_cache(dir / "bad.bin", Manifold::torus(), g.size(), 3); }) ==
        ErrorCode::Parse);
  const auto re = lagrange_from_coefficients(k, g, C);
  CHECK(re.cardinality_error <= 1e-8);
  std::filesystem::remove_all(dir);
}
