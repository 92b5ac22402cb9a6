// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "kgmg/errors.hpp"

namespace kgmg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(const Point& a, const Point& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Point cross(const Point& a, const Point& b) noexcept {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double norm(const Point& a) noexcept { return std::sqrt(dot(a, a)); }

Point normalized(const Point& a) noexcept {
  const double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

double wrapped_delta(double a, double b) noexcept {
  const double d = std::fabs(a - b);
  return std::min(d, kTwoPi - d);
}

double torus_distance_sq(const Point& x, const Point& y) noexcept {
  const double d1 = wrapped_delta(x[0], y[0]);
  const double d2 = wrapped_delta(x[1], y[1]);
  return d1 * d1 + d2 * d2;
}

// Uniform bucket grid over the torus for nearest-point queries.
class TorusCells {
 public:
  explicit TorusCells(std::span<const Point> pts) : pts_(pts) {
    cells_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(pts.size()))));
    width_ = kTwoPi / cells_;
    buckets_.assign(static_cast<std::size_t>(cells_) * cells_, {});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      buckets_[bucket_of(pts[i])].push_back(static_cast<std::uint32_t>(i));
    }
  }

  // Squared distance to the nearest point other than `exclude`.
  double nearest_sq(const Point& p, std::size_t exclude = static_cast<std::size_t>(-1)) const {
    const int ci = cell_coord(p[0]);
    const int cj = cell_coord(p[1]);
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = cells_ / 2 + 1;
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int di = -ring; di <= ring; ++di) {
        for (int dj = -ring; dj <= ring; ++dj) {
          if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
          const int bi = ((ci + di) % cells_ + cells_) % cells_;
          const int bj = ((cj + dj) % cells_ + cells_) % cells_;
          for (std::uint32_t idx : buckets_[static_cast<std::size_t>(bi) * cells_ + bj]) {
            if (idx == exclude) continue;
            best = std::min(best, torus_distance_sq(p, pts_[idx]));
          }
        }
      }
      // Every cell in ring r+1 is at least r cell widths away.
      const double reach = ring * width_;
      if (best <= reach * reach) break;
    }
    return best;
  }

 private:
  int cell_coord(double a) const noexcept {
    return std::clamp(static_cast<int>(a / width_), 0, cells_ - 1);
  }
  std::size_t bucket_of(const Point& p) const noexcept {
    return static_cast<std::size_t>(cell_coord(p[0])) * cells_ + cell_coord(p[1]);
  }

  std::span<const Point> pts_;
  int cells_ = 1;
  double width_ = kTwoPi;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

double spherical_circumradius(const Point& a, const Point& b, const Point& c) noexcept {
  Point n = cross({b[0] - a[0], b[1] - a[1], b[2] - a[2]},
                  {c[0] - a[0], c[1] - a[1], c[2] - a[2]});
  n = normalized(n);
  if (dot(n, a) < 0) n = {-n[0], -n[1], -n[2]};
  return detail::sphere_distance(n, a);
}

std::vector<Point> torus_grid(int n) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      pts.push_back({kTwoPi * i / n, kTwoPi * j / n, 0.0});
    }
  }
  return pts;
}

int sphere_depth_for_count(std::size_t count) {
  int depth = 0;
  while (10 * (std::size_t{1} << (2 * depth)) + 2 < count) ++depth;
  return depth;
}

}  // namespace

Manifold Manifold::sphere() {
  return {ManifoldKind::UnitSphere, 2, kPi, 4.0 * kPi};
}

Manifold Manifold::torus() {
  return {ManifoldKind::FlatTorus, 2, kPi * std::numbers::sqrt2, 4.0 * kPi * kPi};
}

Manifold Manifold::from_name(std::string_view name) {
  if (name == "sphere") return sphere();
  if (name == "torus") return torus();
  fail(ErrorCode::InvalidArgument, "unknown manifold '" + std::string(name) + "'");
}

std::string_view Manifold::name() const noexcept {
  return is_sphere() ? "sphere" : "torus";
}

bool on_surface(const Manifold& manifold, const Point& x) noexcept {
  if (manifold.is_sphere()) {
    return std::fabs(norm(x) - 1.0) <= kOnSurfaceTolerance;
  }
  return x[0] >= 0.0 && x[0] < kTwoPi && x[1] >= 0.0 && x[1] < kTwoPi && x[2] == 0.0;
}

Point wrap_torus(double a, double b) noexcept {
  auto wrap = [](double t) {
    double r = std::fmod(t, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
  };
  return {wrap(a), wrap(b), 0.0};
}

double detail::sphere_distance(const Point& x, const Point& y) noexcept {
  // atan2 form: same value as arccos(x.y) but accurate for nearby points.
  // Ordering the arguments keeps the result exactly symmetric under contraction.
  if (x == y) return 0.0;
  const bool swap = y < x;
  const Point& a = swap ? y : x;
  const Point& b = swap ? x : y;
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

double detail::torus_distance(const Point& x, const Point& y) noexcept {
  return std::sqrt(torus_distance_sq(x, y));
}

double geodesic_distance(const Manifold& manifold, const Point& x, const Point& y) {
  require(on_surface(manifold, x) && on_surface(manifold, y), ErrorCode::Domain,
          "geodesic_distance: point is not on the surface");
  return detail::distance(manifold.is_sphere(), x, y);
}

PointSet::PointSet(Manifold manifold, std::vector<Point> points)
    : manifold_(manifold), points_(std::move(points)) {
  for (const Point& p : points_) {
    require(on_surface(manifold_, p), ErrorCode::Domain, "point set: point is not on the surface");
  }
  std::vector<Point> sorted = points_;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorCode::Domain,
          "point set: duplicate points");
}

PointSet PointSet::prefix(std::size_t count) const {
  require(count <= points_.size(), ErrorCode::InvalidArgument, "prefix longer than point set");
  PointSet out;
  out.manifold_ = manifold_;
  out.points_.assign(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

double QuadratureRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

Icosphere icosahedron() {
  const double t = std::numbers::phi;
  Icosphere m;
  const std::array<Point, 12> raw = {{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                                       {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                                       {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}}};
  for (const Point& p : raw) m.vertices.push_back(normalized(p));
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

Icosphere subdivide(const Icosphere& mesh) {
  Icosphere out;
  out.vertices = mesh.vertices;
  out.faces.reserve(mesh.faces.size() * 4);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
  auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
    const auto key = std::minmax(a, b);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    const Point& pa = out.vertices[a];
    const Point& pb = out.vertices[b];
    out.vertices.push_back(normalized({pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]}));
    const auto idx = static_cast<std::uint32_t>(out.vertices.size() - 1);
    midpoints.emplace(key, idx);
    return idx;
  };
  for (const auto& f : mesh.faces) {
    const std::uint32_t ab = midpoint(f[0], f[1]);
    const std::uint32_t bc = midpoint(f[1], f[2]);
    const std::uint32_t ca = midpoint(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

Icosphere icosphere(int depth) {
  require(depth >= 0, ErrorCode::InvalidArgument, "icosphere depth must be >= 0");
  require(depth <= 9, ErrorCode::Capacity, "icosphere depth too large");
  Icosphere m = icosahedron();
  for (int i = 0; i < depth; ++i) m = subdivide(m);
  return m;
}

double spherical_triangle_area(const Point& a, const Point& b, const Point& c) noexcept {
  const double triple = std::fabs(dot(a, cross(b, c)));
  const double denom = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  return 2.0 * std::atan2(triple, denom);
}

int default_probe_density(const Manifold& manifold, std::size_t count, int depth) {
  if (manifold.is_torus()) {
    return 4 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)) - 1e-9));
  }
  if (depth < 0) depth = sphere_depth_for_count(count);
  return depth + 2;
}

MeshStats mesh_norms(const PointSet& set, int probe_density) {
  require(set.size() >= 2, ErrorCode::InsufficientData,
          "mesh_norms: separation distance undefined for fewer than two points");
  require(probe_density >= 1, ErrorCode::InvalidArgument, "mesh_norms: probe_density must be >= 1");
  const auto pts = set.points();
  MeshStats s;
  s.count = set.size();

  if (set.manifold().is_torus()) {
    TorusCells cells(pts);
    double min_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      min_sq = std::min(min_sq, cells.nearest_sq(pts[i], i));
    }
    s.q = 0.5 * std::sqrt(min_sq);
    const int P = probe_density;
    double max_sq = 0.0;
    for (int i = 0; i < P; ++i) {
      for (int j = 0; j < P; ++j) {
        const Point probe{kTwoPi * i / P, kTwoPi * j / P, 0.0};
        max_sq = std::max(max_sq, cells.nearest_sq(probe));
      }
    }
    s.h = std::sqrt(max_sq);
    s.probe_spacing = kTwoPi / P * std::numbers::sqrt2 / 2.0;
  } else {
    double max_dot = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        max_dot = std::max(max_dot, dot(pts[i], pts[j]));
      }
    }
    // Recover the angle accurately from the closest pair.
    double min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        if (dot(pts[i], pts[j]) >= max_dot - 1e-12) {
          min_dist = std::min(min_dist, detail::sphere_distance(pts[i], pts[j]));
        }
      }
    }
    s.q = 0.5 * min_dist;
    const Icosphere probes = icosphere(probe_density);
    double worst = 1.0;
    for (const Point& p : probes.vertices) {
      double best = -1.0;
      for (const Point& x : pts) best = std::max(best, dot(p, x));
      worst = std::min(worst, best);
    }
    // Evaluate the worst probe's distance with the accurate formula.
    double h = 0.0;
    for (const Point& p : probes.vertices) {
      double best = -1.0;
      for (const Point& x : pts) best = std::max(best, dot(p, x));
      if (best <= worst + 1e-12) {
        double d = std::numeric_limits<double>::infinity();
        for (const Point& x : pts) d = std::min(d, detail::sphere_distance(p, x));
        h = std::max(h, d);
      }
    }
    s.h = h;
    double spacing = 0.0;
    for (const auto& f : probes.faces) {
      spacing = std::max(spacing, spherical_circumradius(probes.vertices[f[0]],
                                                         probes.vertices[f[1]],
                                                         probes.vertices[f[2]]));
    }
    s.probe_spacing = spacing;
  }
  // A probe estimate can undershoot the exact separation-based lower bound.
  s.h = std::max(s.h, s.q);
  s.rho = s.h / s.q;
  return s;
}

PointHierarchy build_hierarchy(const Manifold& manifold, int levels, int base, double rho_max) {
  require(levels >= 0, ErrorCode::InvalidArgument, "build_hierarchy: level count must be >= 0");
  PointHierarchy H;
  H.manifold = manifold;
  H.base = base;

  std::vector<int> depths;
  if (manifold.is_torus()) {
    require(base >= 2, ErrorCode::InvalidArgument, "build_hierarchy: torus base grid needs n0 >= 2");
    std::size_t total = 0;
    for (int l = 0; l <= levels; ++l) {
      const double n = static_cast<double>(base) * std::ldexp(1.0, l);
      total += static_cast<std::size_t>(n * n);
      require(n * n <= static_cast<double>(kMaxHierarchyPoints) && total <= 2 * kMaxHierarchyPoints,
              ErrorCode::Capacity, "build_hierarchy: hierarchy exceeds the point budget");
    }
    std::vector<Point> current;
    for (int l = 0; l <= levels; ++l) {
      const int n = base << l;
      std::vector<Point> next = current;
      std::vector<Point> sorted = current;
      std::sort(sorted.begin(), sorted.end());
      for (const Point& p : torus_grid(n)) {
        if (!std::binary_search(sorted.begin(), sorted.end(), p)) next.push_back(p);
      }
      require(next.size() == static_cast<std::size_t>(n) * n, ErrorCode::Internal,
              "build_hierarchy: dyadic refinement lost nesting");
      current = std::move(next);
      H.levels.emplace_back(manifold, current);
      depths.push_back(-1);
    }
  } else {
    require(base >= 0, ErrorCode::InvalidArgument, "build_hierarchy: sphere base depth must be >= 0");
    const int deepest = base + levels;
    require(deepest <= 6, ErrorCode::Capacity, "build_hierarchy: hierarchy exceeds the point budget");
    Icosphere mesh = icosphere(base);
    for (int l = 0; l <= levels; ++l) {
      if (l > 0) mesh = subdivide(mesh);
      H.levels.emplace_back(manifold, mesh.vertices);
      depths.push_back(base + l);
    }
  }

  for (std::size_t l = 0; l < H.levels.size(); ++l) {
    const PointSet& set = H.levels[l];
    H.stats.push_back(mesh_norms(set, default_probe_density(manifold, set.size(), depths[l])));
    require(H.stats.back().rho <= rho_max, ErrorCode::Domain,
            "build_hierarchy: mesh ratio exceeds rho_max at level " + std::to_string(l));
  }
  H.gamma_min = 1.0;
  H.gamma_max = 0.0;
  for (std::size_t l = 1; l < H.stats.size(); ++l) {
    const double g = H.stats[l].h / H.stats[l - 1].h;
    H.gamma_min = std::min(H.gamma_min, g);
    H.gamma_max = std::max(H.gamma_max, g);
  }
  if (H.stats.size() < 2) H.gamma_min = H.gamma_max = 0.0;
  require(H.gamma_max < 1.0, ErrorCode::Domain, "build_hierarchy: fill distance did not shrink");
  return H;
}

QuadratureRule build_quadrature(const Manifold& manifold, int accuracy_level, SphereRule scheme) {
  require(accuracy_level >= 1, ErrorCode::InvalidArgument, "build_quadrature: accuracy_level must be >= 1");
  QuadratureRule rule;
  if (manifold.is_torus()) {
    const int M = accuracy_level;
    require(static_cast<std::size_t>(M) * M <= (std::size_t{1} << 22), ErrorCode::Capacity,
            "build_quadrature: grid too large");
    rule.nodes = PointSet(manifold, torus_grid(M));
    const double w = (kTwoPi / M) * (kTwoPi / M);
    rule.weights.assign(static_cast<std::size_t>(M) * M, w);
    return rule;
  }
  // Barycentric nodes and weights of the 7-point degree-5 rule.
  const double r15 = std::sqrt(15.0);
  const double a1 = (6.0 - r15) / 21.0;
  const double a2 = (6.0 + r15) / 21.0;
  const double w1 = (155.0 - r15) / 1200.0;
  const double w2 = (155.0 + r15) / 1200.0;
  const std::array<std::array<double, 4>, 7> seven{{{1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40},
                                                    {a1, a1, 1 - 2 * a1, w1},
                                                    {a1, 1 - 2 * a1, a1, w1},
                                                    {1 - 2 * a1, a1, a1, w1},
                                                    {a2, a2, 1 - 2 * a2, w2},
                                                    {a2, 1 - 2 * a2, a2, w2},
                                                    {1 - 2 * a2, a2, a2, w2}}};
  const std::array<std::array<double, 4>, 1> centroid{{{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0}}};
  const std::span<const std::array<double, 4>> pattern =
      scheme == SphereRule::SevenPoint ? std::span<const std::array<double, 4>>(seven)
                                       : std::span<const std::array<double, 4>>(centroid);
  const Icosphere mesh = icosphere(accuracy_level);
  std::vector<Point> nodes;
  nodes.reserve(mesh.faces.size() * pattern.size());
  rule.weights.reserve(mesh.faces.size() * pattern.size());
  std::vector<double> local(pattern.size());
  for (const auto& f : mesh.faces) {
    const Point& a = mesh.vertices[f[0]];
    const Point& b = mesh.vertices[f[1]];
    const Point& c = mesh.vertices[f[2]];
    // Radial projection of the flat face: dS = (n . p) / |p|^3 dA.
    const Point u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Point v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const Point cr{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    const double twice_area = std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
    const double plane = std::fabs(cr[0] * a[0] + cr[1] * a[1] + cr[2] * a[2]) / twice_area;
    double sum = 0.0;
    for (std::size_t k = 0; k < pattern.size(); ++k) {
      const auto& q = pattern[k];
      const Point p{q[0] * a[0] + q[1] * b[0] + q[2] * c[0], q[0] * a[1] + q[1] * b[1] + q[2] * c[1],
                    q[0] * a[2] + q[1] * b[2] + q[2] * c[2]};
      const double len = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      local[k] = q[3] * 0.5 * twice_area * plane / (len * len * len);
      sum += local[k];
      nodes.push_back(normalized(p));
    }
    const double scale = spherical_triangle_area(a, b, c) / sum;
    for (double w : local) rule.weights.push_back(w * scale);
  }
  rule.nodes = PointSet(manifold, std::move(nodes));
  return rule;
}

int lattice_index(double coordinate, int lattice) noexcept {
  const long long k = std::llround(coordinate * lattice / kTwoPi);
  return static_cast<int>(((k % lattice) + lattice) % lattice);
}

std::optional<int> torus_lattice(std::span<const Point> a, std::span<const Point> b) {
  static const std::vector<int> candidates = [] {
    std::vector<int> c;
    for (long long p2 = 1; p2 <= 16384; p2 *= 2)
      for (long long p3 = p2; p3 <= 16384; p3 *= 3)
        for (long long p5 = p3; p5 <= 16384; p5 *= 5) c.push_back(static_cast<int>(p5));
    std::sort(c.begin(), c.end());
    return c;
  }();
  auto fits = [](std::span<const Point> pts, int M) {
    for (const Point& p : pts) {
      for (int k = 0; k < 2; ++k) {
        const double t = p[k] * M / kTwoPi;
        if (std::fabs(t - std::round(t)) > 1e-9 * std::max(1.0, t)) return false;
      }
    }
    return true;
  };
  for (int M : candidates) {
    if (fits(a, M) && fits(b, M)) return M;
  }
  return std::nullopt;
}

void write_hierarchy_json(const PointHierarchy& H, std::ostream& out) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const int ncoord = H.manifold.is_sphere() ? 3 : 2;
  out << "{\n  \"manifold\": \"" << H.manifold.name() << "\",\n";
  out << "  \"base\": " << H.base << ",\n";
  out << "  \"levels\": [\n";
  for (std::size_t l = 0; l < H.levels.size(); ++l) {
    out << "    [";
    const auto pts = H.levels[l].points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out << (i ? "," : "") << "[";
      for (int k = 0; k < ncoord; ++k) out << (k ? "," : "") << num(pts[i][static_cast<std::size_t>(k)]);
      out << "]";
    }
    out << "]" << (l + 1 < H.levels.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"stats\": [\n";
  for (std::size_t l = 0; l < H.stats.size(); ++l) {
    const MeshStats& s = H.stats[l];
    out << "    {\"level\": " << l << ", \"count\": " << s.count << ", \"h\": " << num(s.h)
        << ", \"q\": " << num(s.q) << ", \"rho\": " << num(s.rho)
        << ", \"probe_spacing\": " << num(s.probe_spacing) << "}"
        << (l + 1 < H.stats.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"gamma_bounds\": [" << num(H.gamma_min) << ", " << num(H.gamma_max) << "]\n}\n";
}

PointHierarchy read_hierarchy_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("hierarchy json: ") + e.what());
  }
  try {
    PointHierarchy H;
    H.manifold = Manifold::from_name(doc.at("manifold").get<std::string>());
    H.base = doc.value("base", 0);
    for (const auto& level : doc.at("levels")) {
      std::vector<Point> pts;
      for (const auto& c : level) {
        Point p{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < c.size() && k < 3; ++k) p[k] = c[k].get<double>();
        pts.push_back(p);
      }
      H.levels.emplace_back(H.manifold, std::move(pts));
    }
    for (const auto& s : doc.at("stats")) {
      MeshStats m;
      m.count = s.at("count").get<std::size_t>();
      m.h = s.at("h").get<double>();
      m.q = s.at("q").get<double>();
      m.rho = s.at("rho").get<double>();
      m.probe_spacing = s.value("probe_spacing", 0.0);
      H.stats.push_back(m);
    }
    const auto& g = doc.at("gamma_bounds");
    H.gamma_min = g.at(0).get<double>();
    H.gamma_max = g.at(1).get<double>();
    return H;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("hierarchy json: ") + e.what());
  }
}

}  // namespace kgmg
