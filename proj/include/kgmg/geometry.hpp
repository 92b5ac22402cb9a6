// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace kgmg {

enum class ManifoldKind : std::uint8_t { UnitSphere = 0, FlatTorus = 1 };

/// Closed surface the problem lives on. Only the unit sphere and the flat
/// torus [0, 2pi)^2 are supported.
struct Manifold {
  ManifoldKind kind = ManifoldKind::FlatTorus;
  int dim = 2;
  double diameter = 0.0;
  double volume = 0.0;

  static Manifold sphere();
  static Manifold torus();
  static Manifold from_name(std::string_view name);

  std::string_view name() const noexcept;
  bool is_sphere() const noexcept { return kind == ManifoldKind::UnitSphere; }
  bool is_torus() const noexcept { return kind == ManifoldKind::FlatTorus; }

  friend bool operator==(const Manifold& a, const Manifold& b) {
    return a.kind == b.kind;
  }
};

/// Sphere points are unit 3-vectors. Torus points store the two angles in
/// [0, 2pi) in the first two slots and 0 in the third.
using Point = std::array<double, 3>;

inline constexpr double kOnSurfaceTolerance = 1e-12;

bool on_surface(const Manifold& manifold, const Point& x) noexcept;

/// Wraps arbitrary torus angles into [0, 2pi).
Point wrap_torus(double a, double b) noexcept;

double geodesic_distance(const Manifold& manifold, const Point& x, const Point& y);

namespace detail {
// Unchecked inner-loop versions.
double sphere_distance(const Point& x, const Point& y) noexcept;
double torus_distance(const Point& x, const Point& y) noexcept;
inline double distance(bool sphere, const Point& x, const Point& y) noexcept {
  return sphere ? sphere_distance(x, y) : torus_distance(x, y);
}
}  // namespace detail

class PointSet {
 public:
  PointSet() = default;
  /// Validates surface membership and rejects exact duplicates.
  PointSet(Manifold manifold, std::vector<Point> points);

  const Manifold& manifold() const noexcept { return manifold_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const noexcept { return points_; }

  /// First `count` points; no revalidation needed.
  PointSet prefix(std::size_t count) const;

 private:
  Manifold manifold_{};
  std::vector<Point> points_;
};

struct MeshStats {
  double h = 0.0;              // fill distance, probe estimate
  double q = 0.0;              // separation distance (exact)
  double rho = 0.0;            // h / q
  std::size_t count = 0;
  double probe_spacing = 0.0;  // fill distance of the probe set itself
};

struct PointHierarchy {
  Manifold manifold{};
  std::vector<PointSet> levels;
  std::vector<MeshStats> stats;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  int base = 0;

  std::size_t level_count() const noexcept { return levels.size(); }
  const PointSet& finest() const { return levels.back(); }
};

struct QuadratureRule {
  PointSet nodes;
  std::vector<double> weights;

  double weight_sum() const;
};

/// Upper limit on the total number of points a hierarchy may hold.
inline constexpr std::size_t kMaxHierarchyPoints = std::size_t{1} << 16;

/// Builds levels 0..levels. Torus: dyadic n0 * 2^l grids. Sphere: the
/// icosahedron subdivided (base + l) times. Coarse points always come first.
PointHierarchy build_hierarchy(const Manifold& manifold, int levels, int base,
                               double rho_max = 3.0);

/// Torus: probe_density is the probe grid resolution per axis. Sphere: it is
/// the subdivision depth of the icosahedral probe set.
MeshStats mesh_norms(const PointSet& set, int probe_density);

/// Probe density used by build_hierarchy for a level with the given size.
int default_probe_density(const Manifold& manifold, std::size_t count, int depth);

/// Sphere rule on each icosphere face: the centroid, or the 7-point degree-5
/// triangle rule mapped radially onto the face. Both scale their weights to
/// the exact spherical face area.
enum class SphereRule { Centroid, SevenPoint };

/// Torus: accuracy_level is the trapezoidal grid size M per axis. Sphere: it is
/// the subdivision depth of the icosahedron.
QuadratureRule build_quadrature(const Manifold& manifold, int accuracy_level,
                                SphereRule rule = SphereRule::Centroid);

struct Icosphere {
  std::vector<Point> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
};

Icosphere icosahedron();
/// Midpoint subdivision; new vertices are appended after the existing ones.
Icosphere subdivide(const Icosphere& mesh);
Icosphere icosphere(int depth);

/// Area of the geodesic triangle spanned by three unit vectors.
double spherical_triangle_area(const Point& a, const Point& b, const Point& c) noexcept;

/// Smallest M such that every torus coordinate is an integer multiple of 2pi/M
/// (M of the form 2^a 3^b 5^c, up to 16384). Used for stationary lookup tables.
std::optional<int> torus_lattice(std::span<const Point> a, std::span<const Point> b);

/// Index of a torus coordinate on the lattice 2pi/M (assumes it lies on it).
int lattice_index(double coordinate, int lattice) noexcept;

void write_hierarchy_json(const PointHierarchy& hierarchy, std::ostream& out);
PointHierarchy read_hierarchy_json(std::istream& in);

}  // namespace kgmg
