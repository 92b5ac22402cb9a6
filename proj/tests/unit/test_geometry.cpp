// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "support.hpp"

using namespace kgmg;
using kgmg::test::kPi;

TEST_CASE("geodesic distance closed forms") {
  CHECK(geodesic_distance(Manifold::sphere(), {0, 0, 1}, {0, 0, -1}) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(geodesic_distance(Manifold::torus(), {0, 0, 0}, {kPi, kPi, 0}) ==
        doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(geodesic_distance(Manifold::sphere(), {0.6, 0.8, 0}, {0.6, 0.8, 0}) == 0.0);
  CHECK(geodesic_distance(Manifold::torus(), {1, 2, 0}, {1, 2, 0}) == 0.0);
  // Wraparound: 0.1 and 2pi - 0.1 are 0.2 apart.
  CHECK(geodesic_distance(Manifold::torus(), {0.1, 0, 0}, {2 * kPi - 0.1, 0, 0}) ==
        doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("geodesic distance is symmetric and satisfies the triangle inequality") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const Point a = test::random_sphere_point(rng), b = test::random_sphere_point(rng),
                c = test::random_sphere_point(rng);
    const auto S = Manifold::sphere();
    CHECK(geodesic_distance(S, a, b) == geodesic_distance(S, b, a));
    CHECK(geodesic_distance(S, a, c) <= geodesic_distance(S, a, b) + geodesic_distance(S, b, c) + 1e-12);
    const Point x = test::random_torus_point(rng), y = test::random_torus_point(rng),
                z = test::random_torus_point(rng);
    const auto T = Manifold::torus();
    CHECK(geodesic_distance(T, x, y) == geodesic_distance(T, y, x));
    CHECK(geodesic_distance(T, x, z) <= geodesic_distance(T, x, y) + geodesic_distance(T, y, z) + 1e-12);
  }
}

TEST_CASE("point sets reject off-surface points and duplicates") {
  CHECK(test::error_code_of([] { PointSet(Manifold::sphere(), {{0, 0, 2}}); }) == ErrorCode::Domain);
  CHECK(test::error_code_of([] { PointSet(Manifold::torus(), {{7.0, 0, 0}}); }) == ErrorCode::Domain);
  CHECK(test::error_code_of([] { PointSet(Manifold::torus(), {{1, 1, 0}, {1, 1, 0}}); }) == ErrorCode::Domain);
}

TEST_CASE("torus hierarchy nests dyadic grids") {
  const auto H = build_hierarchy(Manifold::torus(), 1, 2);
  REQUIRE(H.level_count() == 2);
  CHECK(H.levels[0].size() == 4);
  CHECK(H.levels[1].size() == 16);
  for (std::size_t i = 0; i < 4; ++i) CHECK(H.levels[1][i] == H.levels[0][i]);
}

TEST_CASE("sphere level 0 is the icosahedron") {
  const auto H = build_hierarchy(Manifold::sphere(), 0, 0);
  REQUIRE(H.levels[0].size() == 12);
  for (const Point& p : H.levels[0].points()) {
    CHECK(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("hierarchies nest exactly and stay quasi-uniform") {
  for (const auto& H : {build_hierarchy(Manifold::torus(), 3, 4), build_hierarchy(Manifold::sphere(), 2, 0)}) {
    double lo = 1e300, hi = 0.0;
    for (std::size_t l = 0; l < H.level_count(); ++l) {
      if (l > 0) {
        for (std::size_t i = 0; i < H.levels[l - 1].size(); ++i) CHECK(H.levels[l][i] == H.levels[l - 1][i]);
      }
      const double v = static_cast<double>(H.stats[l].count) * H.stats[l].h * H.stats[l].h;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi / lo <= 4.0);
  }
}

TEST_CASE("torus fill distance halves per level") {
  const auto H = build_hierarchy(Manifold::torus(), 2, 4);
  for (std::size_t l = 1; l < H.level_count(); ++l) {
    const double ratio = H.stats[l].h / H.stats[l - 1].h;
    CHECK(ratio >= 0.45);
    CHECK(ratio <= 0.55);
    CHECK(H.stats[l].rho == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
  }
}

TEST_CASE("mesh norms of the 8 x 8 torus grid") {
  const PointSet g = test::torus_grid(8);
  const double s = 2 * kPi / 8;
  const MeshStats st = mesh_norms(g, 64);
  CHECK(st.q == doctest::Approx(s / 2).epsilon(0.02));
  CHECK(st.h == doctest::Approx(s * std::sqrt(2.0) / 2).epsilon(0.02));
  CHECK(st.rho == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
  CHECK(st.q > 0.0);
}

TEST_CASE("mesh norms of two antipodal sphere points") {
  const PointSet p(Manifold::sphere(), {{0, 0, 1}, {0, 0, -1}});
  CHECK(mesh_norms(p, 3).q == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(test::error_code_of([] { mesh_norms(PointSet(Manifold::sphere(), {{0, 0, 1}}), 3); }) ==
        ErrorCode::InsufficientData);
}

TEST_CASE("quadrature weight sums and exact integrals") {
  const auto t = build_quadrature(Manifold::torus(), 16);
  CHECK(t.weight_sum() == doctest::Approx(4 * kPi * kPi).epsilon(1e-13));
  double acc = 0.0;
  for (std::size_t i = 0; i < t.weights.size(); ++i) acc += t.weights[i] * std::cos(t.nodes[i][0]);
  CHECK(std::fabs(acc) <= 1e-14);
  for (auto rule : {SphereRule::Centroid, SphereRule::SevenPoint}) {
    const auto s = build_quadrature(Manifold::sphere(), 3, rule);
    CHECK(std::fabs(s.weight_sum() - 4 * kPi) <= 1e-12 * 4 * kPi);
  }
}

TEST_CASE("seven-point sphere rule integrates smooth functions to high order") {
  // Exact: int z^2 = 4pi/3, int exp(x) = 4pi sinh(1).
  const auto q = build_quadrature(Manifold::sphere(), 3, SphereRule::SevenPoint);
  double z2 = 0.0, ex = 0.0;
  for (std::size_t i = 0; i < q.weights.size(); ++i) {
    z2 += q.weights[i] * q.nodes[i][2] * q.nodes[i][2];
    ex += q.weights[i] * std::exp(q.nodes[i][0]);
  }
  CHECK(z2 == doctest::Approx(4 * kPi / 3).epsilon(1e-8));
  CHECK(ex == doctest::Approx(4 * kPi * std::sinh(1.0)).epsilon(1e-8));
  const auto c = build_quadrature(Manifold::sphere(), 3, SphereRule::Centroid);
  double cex = 0.0;
  for (std::size_t i = 0; i < c.weights.size(); ++i) cex += c.weights[i] * std::exp(c.nodes[i][0]);
  CHECK(std::fabs(ex - 4 * kPi * std::sinh(1.0)) < std::fabs(cex - 4 * kPi * std::sinh(1.0)));
}

TEST_CASE("hierarchy JSON round trip is exact") {
  const auto H = build_hierarchy(Manifold::sphere(), 1, 0);
  std::stringstream ss;
  write_hierarchy_json(H, ss);
  const auto R = read_hierarchy_json(ss);
  REQUIRE(R.level_count() == H.level_count());
  CHECK(R.manifold == H.manifold);
  for (std::size_t l = 0; l < H.level_count(); ++l) {
    REQUIRE(R.levels[l].size() == H.levels[l].size());
    for (std::size_t i = 0; i < H.levels[l].size(); ++i) CHECK(R.levels[l][i] == H.levels[l][i]);
  }
  std::stringstream bad("{\"manifold\": \"klein\"}");
  CHECK_THROWS_AS(read_hierarchy_json(bad), Error);
}
