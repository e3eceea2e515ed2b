#ifndef KERNELSKEL_GEOMETRY_HPP
#define KERNELSKEL_GEOMETRY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace kernelskel {

struct Point {
  std::vector<double> coords;
  int dim() const { return static_cast<int>(coords.size()); }
};

// Axis-aligned box, lo[k] < hi[k] on every axis, d in {1,2,3}.
struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> lo_, std::vector<double> hi_);
  // cube [-h, h]^d
  static Box centered_cube(int dim, double half_edge);

  int dim() const { return static_cast<int>(lo.size()); }
  double edge(int k) const { return hi[k] - lo[k]; }
  double volume() const;
  double max_edge() const;
  // Euclidean diagonal length
  double diameter() const;
  Point center() const;
  bool contains(const double* p, double tol = 0.0) const;
  bool strictly_inside(const double* p, double tol = 0.0) const;
  Box translated(const double* shift) const;
  // box grown by pad on every side
  Box inflated(double pad) const;
};

// Euclidean distance between two boxes (0 if they touch or overlap)
double box_distance(const Box& a, const Box& b);

// outer \ interior(inner); membership keeps the inner boundary.
struct ShellRegion {
  Box outer, inner;

  ShellRegion() = default;
  ShellRegion(Box outer_, Box inner_);

  int dim() const { return outer.dim(); }
  double volume() const { return outer.volume() - inner.volume(); }
  bool empty() const;
  bool contains(const double* p, double tol = 0.0) const;
  ShellRegion translated(const double* shift) const;
};

enum class Admissibility { Strong, Weak };

std::string to_string(Admissibility a);

// Canonical source/target pair: source box X, target shell Y.
struct DomainPair {
  Box source;
  ShellRegion target;
  Admissibility admissibility = Admissibility::Strong;
  double eta = 1.0;
  // set when the construction yields no target region (e.g. the whole shell
  // collapses); such pairs carry no admissible interactions
  bool empty_target = false;

  int dim() const { return source.dim(); }
  void validate() const;
  DomainPair translated(const double* shift) const;
};

enum class Provenance { RandomUniform, Grid, SurfaceGrid, File };

// Ordered point list; index identity matters, skeleton indices refer to
// positions here. Coordinates stored flat, point i at coords[i*dim ...].
struct PointSet {
  int dim = 0;
  std::vector<double> coords;
  Provenance provenance = Provenance::File;
  uint64_t seed = 0;

  long size() const { return dim ? static_cast<long>(coords.size()) / dim : 0; }
  const double* point(long i) const { return coords.data() + static_cast<size_t>(i) * dim; }
  double* point(long i) { return coords.data() + static_cast<size_t>(i) * dim; }
  void push(const double* p) { coords.insert(coords.end(), p, p + dim); }
  Point get(long i) const;
  PointSet select(const std::vector<long>& idx) const;
};

using Region = std::variant<Box, ShellRegion>;

struct ModeRandomUniform {
  long n;
  uint64_t seed;
};
struct ModeGridApprox {
  long n;
};
struct ModeSurfaceGrid {
  long n;
};
struct ModeAdaptiveGrid {
  long n;
  double near_fraction;
  Box near_band;
};
using GenMode = std::variant<ModeRandomUniform, ModeGridApprox, ModeSurfaceGrid, ModeAdaptiveGrid>;

// Deterministic point generation; every returned point passes the region
// membership test. GridApprox may return more than n (smallest product grid
// whose filtered count reaches n); the other modes return exactly n.
PointSet generate_points(const Region& region, const GenMode& mode);

PointSet random_uniform_points(const Region& region, long n, uint64_t seed);
PointSet grid_points(const Region& region, long n);
PointSet surface_grid_points(const ShellRegion& region, long n);
PointSet adaptive_grid_points(const ShellRegion& region, long n, double near_fraction,
                              const Box& near_band);

bool region_contains(const Region& region, const double* p, double tol = 0.0);

// Tree predicate: Strong = non-adjacent equal-size boxes, Weak = disjoint
// interiors. Same dimension and equal edge lengths required.
bool admissible(const Box& a, const Box& b, Admissibility kind, double eta = 1.0);

// Generic strong-admissibility form min(diam) <= eta * dist.
bool eta_admissible(const Box& a, const Box& b, double eta);

PointSet translate(const PointSet& ps, const Point& shift);

// Plain-text point-set files: "# dim=<d> count=<n>" then one point per line.
void write_pointset(const std::string& path, const PointSet& ps);
PointSet read_pointset(const std::string& path);

}  // namespace kernelskel

#endif
