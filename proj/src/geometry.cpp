#include "kernelskel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kernelskel/util.hpp"

namespace kernelskel {

namespace {

void check_dim(int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
}

}  // namespace

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw std::invalid_argument("Box: lo/hi dimension mismatch");
  check_dim(dim());
  for (int k = 0; k < dim(); ++k) {
    if (!(lo[k] < hi[k])) throw std::invalid_argument("Box: lo must be < hi on every axis");
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]))
      throw std::invalid_argument("Box: non-finite endpoint");
  }
}

Box Box::centered_cube(int dim, double half_edge) {
  return Box(std::vector<double>(dim, -half_edge), std::vector<double>(dim, half_edge));
}

double Box::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim(); ++k) v *= edge(k);
  return v;
}

double Box::max_edge() const {
  double e = 0.0;
  for (int k = 0; k < dim(); ++k) e = std::max(e, edge(k));
  return e;
}

double Box::diameter() const {
  double s = 0.0;
  for (int k = 0; k < dim(); ++k) s += edge(k) * edge(k);
  return std::sqrt(s);
}

Point Box::center() const {
  Point c;
  c.coords.resize(dim());
  for (int k = 0; k < dim(); ++k) c.coords[k] = 0.5 * (lo[k] + hi[k]);
  return c;
}

bool Box::contains(const double* p, double tol) const {
  for (int k = 0; k < dim(); ++k)
    if (p[k] < lo[k] - tol || p[k] > hi[k] + tol) return false;
  return true;
}

bool Box::strictly_inside(const double* p, double tol) const {
  for (int k = 0; k < dim(); ++k)
    if (p[k] <= lo[k] + tol || p[k] >= hi[k] - tol) return false;
  return true;
}

Box Box::translated(const double* shift) const {
  Box b = *this;
  for (int k = 0; k < dim(); ++k) {
    b.lo[k] += shift[k];
    b.hi[k] += shift[k];
  }
  return b;
}

Box Box::inflated(double pad) const {
  Box b = *this;
  for (int k = 0; k < dim(); ++k) {
    b.lo[k] -= pad;
    b.hi[k] += pad;
  }
  return b;
}

double box_distance(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("box_distance: dimension mismatch");
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) {
    const double gap = std::max({0.0, a.lo[k] - b.hi[k], b.lo[k] - a.hi[k]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

ShellRegion::ShellRegion(Box outer_, Box inner_) : outer(std::move(outer_)), inner(std::move(inner_)) {
  if (outer.dim() != inner.dim()) throw std::invalid_argument("ShellRegion: dimension mismatch");
  for (int k = 0; k < outer.dim(); ++k)
    if (inner.lo[k] < outer.lo[k] || inner.hi[k] > outer.hi[k])
      throw std::invalid_argument("ShellRegion: inner box not contained in outer box");
}

bool ShellRegion::empty() const {
  const double tol = 1e-12 * outer.max_edge();
  for (int k = 0; k < dim(); ++k)
    if (inner.lo[k] - outer.lo[k] > tol || outer.hi[k] - inner.hi[k] > tol) return false;
  return true;
}

bool ShellRegion::contains(const double* p, double tol) const {
  return outer.contains(p, tol) && !inner.strictly_inside(p, tol);
}

ShellRegion ShellRegion::translated(const double* shift) const {
  ShellRegion s = *this;
  s.outer = outer.translated(shift);
  s.inner = inner.translated(shift);
  return s;
}

std::string to_string(Admissibility a) { return a == Admissibility::Strong ? "strong" : "weak"; }

void DomainPair::validate() const {
  if (source.dim() != target.dim()) throw std::invalid_argument("DomainPair: dimension mismatch");
  if (empty_target) return;
  // source must sit inside the target's hole, so their interiors are disjoint
  const double tol = 1e-12 * target.outer.max_edge();
  for (int k = 0; k < dim(); ++k)
    if (source.lo[k] < target.inner.lo[k] - tol || source.hi[k] > target.inner.hi[k] + tol)
      throw std::invalid_argument("DomainPair: source box must lie inside the target hole");
  if (admissibility == Admissibility::Strong) {
    // gap from source to the nearest shell point, measured face to face
    double gap = std::numeric_limits<double>::max();
    for (int k = 0; k < dim(); ++k)
      gap = std::min({gap, target.inner.hi[k] - source.hi[k], source.lo[k] - target.inner.lo[k]});
    if (source.max_edge() > eta * gap + tol)
      throw std::invalid_argument("DomainPair: strong admissibility violated (edge > eta * dist)");
  }
}

DomainPair DomainPair::translated(const double* shift) const {
  DomainPair p = *this;
  p.source = source.translated(shift);
  p.target = target.translated(shift);
  return p;
}

Point PointSet::get(long i) const {
  Point p;
  p.coords.assign(point(i), point(i) + dim);
  return p;
}

PointSet PointSet::select(const std::vector<long>& idx) const {
  PointSet out;
  out.dim = dim;
  out.provenance = provenance;
  out.seed = seed;
  out.coords.reserve(idx.size() * dim);
  for (long i : idx) out.push(point(i));
  return out;
}

bool region_contains(const Region& region, const double* p, double tol) {
  if (std::holds_alternative<Box>(region)) return std::get<Box>(region).contains(p, tol);
  return std::get<ShellRegion>(region).contains(p, tol);
}

namespace {

const Box& outer_box(const Region& region) {
  if (std::holds_alternative<Box>(region)) return std::get<Box>(region);
  return std::get<ShellRegion>(region).outer;
}

double region_volume(const Region& region) {
  if (std::holds_alternative<Box>(region)) return std::get<Box>(region).volume();
  return std::get<ShellRegion>(region).volume();
}

void check_region(const Region& region, long n) {
  if (n < 1) throw std::invalid_argument("generate_points: n must be >= 1");
  if (std::holds_alternative<ShellRegion>(region) && std::get<ShellRegion>(region).empty())
    throw std::invalid_argument("generate_points: empty shell region");
}

}  // namespace

PointSet random_uniform_points(const Region& region, long n, uint64_t seed) {
  check_region(region, n);
  const Box& ob = outer_box(region);
  const int d = ob.dim();
  PointSet ps;
  ps.dim = d;
  ps.provenance = Provenance::RandomUniform;
  ps.seed = seed;
  ps.coords.reserve(static_cast<size_t>(n) * d);
  Xoshiro256ss rng(seed);
  double p[3];
  long produced = 0;
  // rejection from the outer box; acceptance ratio is the volume fraction
  long guard = 0;
  const long max_draws = 1000 * n + 1000000;
  while (produced < n) {
    for (int k = 0; k < d; ++k) p[k] = rng.uniform(ob.lo[k], ob.hi[k]);
    if (region_contains(region, p)) {
      ps.push(p);
      ++produced;
    }
    if (++guard > max_draws)
      throw std::runtime_error("random_uniform_points: region acceptance ratio too small");
  }
  return ps;
}

PointSet grid_points(const Region& region, long n) {
  check_region(region, n);
  const Box& ob = outer_box(region);
  const int d = ob.dim();
  const double fraction = std::max(1e-12, region_volume(region) / ob.volume());
  long m = static_cast<long>(std::ceil(std::pow(static_cast<double>(n) / fraction, 1.0 / d)));
  m = std::max<long>(m, 1);
  PointSet ps;
  ps.dim = d;
  ps.provenance = Provenance::Grid;
  // cell-centered product grid on the outer box, filtered to the region;
  // grow the per-axis count until enough points survive the filter
  for (int attempt = 0; attempt < 64; ++attempt, ++m) {
    ps.coords.clear();
    double p[3];
    long idx[3] = {0, 0, 0};
    const long total = static_cast<long>(std::pow(static_cast<double>(m), d));
    for (long flat = 0; flat < total; ++flat) {
      long rem = flat;
      for (int k = 0; k < d; ++k) {
        idx[k] = rem % m;
        rem /= m;
      }
      for (int k = 0; k < d; ++k) p[k] = ob.lo[k] + (idx[k] + 0.5) * ob.edge(k) / m;
      if (region_contains(region, p)) ps.push(p);
    }
    if (ps.size() >= n) return ps;
  }
  throw std::runtime_error("grid_points: could not reach requested count");
}

PointSet surface_grid_points(const ShellRegion& region, long n) {
  check_region(region, n);
  const Box& ib = region.inner;
  const int d = ib.dim();
  const int nfaces = 2 * d;
  PointSet ps;
  ps.dim = d;
  ps.provenance = Provenance::SurfaceGrid;
  // split n across the 2d faces of the inner boundary, first faces take the
  // remainder; each face carries a cell-centered grid of its exact share
  for (int face = 0; face < nfaces; ++face) {
    long share = n / nfaces + (face < n % nfaces ? 1 : 0);
    if (share == 0) continue;
    const int axis = face / 2;
    const double plane = (face % 2 == 0) ? ib.lo[axis] : ib.hi[axis];
    std::vector<int> tangent;
    for (int k = 0; k < d; ++k)
      if (k != axis) tangent.push_back(k);
    double p[3];
    p[axis] = plane;
    if (tangent.empty()) {
      ps.push(p);
      continue;
    }
    long m0 = 1, m1 = 1;
    if (tangent.size() == 1) {
      m0 = share;
    } else {
      m0 = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(share))));
      m1 = (share + m0 - 1) / m0;
    }
    long emitted = 0;
    for (long i = 0; i < m0 && emitted < share; ++i) {
      p[tangent[0]] = ib.lo[tangent[0]] + (i + 0.5) * ib.edge(tangent[0]) / m0;
      if (tangent.size() == 1) {
        ps.push(p);
        ++emitted;
        continue;
      }
      for (long j = 0; j < m1 && emitted < share; ++j) {
        p[tangent[1]] = ib.lo[tangent[1]] + (j + 0.5) * ib.edge(tangent[1]) / m1;
        ps.push(p);
        ++emitted;
      }
    }
  }
  return ps;
}

PointSet adaptive_grid_points(const ShellRegion& region, long n, double near_fraction,
                              const Box& near_band) {
  check_region(region, n);
  if (near_fraction <= 0.0 || near_fraction >= 1.0)
    throw std::invalid_argument("adaptive_grid_points: near_fraction must be in (0,1)");
  if (near_band.dim() != region.dim())
    throw std::invalid_argument("adaptive_grid_points: band dimension mismatch");
  const long n_near = std::max<long>(1, static_cast<long>(std::llround(n * near_fraction)));
  const long n_far = std::max<long>(1, n - n_near);
  ShellRegion near_shell(near_band, region.inner);
  ShellRegion far_shell(region.outer, near_band);
  PointSet near_pts = grid_points(near_shell, n_near);
  PointSet far_pts = grid_points(far_shell, n_far);
  PointSet ps;
  ps.dim = region.dim();
  ps.provenance = Provenance::Grid;
  ps.coords = near_pts.coords;
  ps.coords.insert(ps.coords.end(), far_pts.coords.begin(), far_pts.coords.end());
  return ps;
}

PointSet generate_points(const Region& region, const GenMode& mode) {
  if (std::holds_alternative<ModeRandomUniform>(mode)) {
    const auto& m = std::get<ModeRandomUniform>(mode);
    return random_uniform_points(region, m.n, m.seed);
  }
  if (std::holds_alternative<ModeGridApprox>(mode))
    return grid_points(region, std::get<ModeGridApprox>(mode).n);
  if (std::holds_alternative<ModeSurfaceGrid>(mode)) {
    if (!std::holds_alternative<ShellRegion>(region))
      throw std::invalid_argument("generate_points: SurfaceGrid needs a shell region");
    return surface_grid_points(std::get<ShellRegion>(region), std::get<ModeSurfaceGrid>(mode).n);
  }
  const auto& m = std::get<ModeAdaptiveGrid>(mode);
  if (!std::holds_alternative<ShellRegion>(region))
    throw std::invalid_argument("generate_points: AdaptiveGrid needs a shell region");
  return adaptive_grid_points(std::get<ShellRegion>(region), m.n, m.near_fraction, m.near_band);
}

bool admissible(const Box& a, const Box& b, Admissibility kind, double eta) {
  if (a.dim() != b.dim()) throw std::invalid_argument("admissible: dimension mismatch");
  for (int k = 0; k < a.dim(); ++k) {
    const double tol = 1e-9 * a.edge(k);
    if (std::fabs(a.edge(k) - b.edge(k)) > tol)
      throw std::invalid_argument("admissible: boxes must have equal edge lengths");
  }
  (void)eta;
  if (kind == Admissibility::Strong) {
    // non-adjacent: a gap on some axis
    for (int k = 0; k < a.dim(); ++k) {
      const double tol = 1e-9 * a.edge(k);
      const double gap = std::max(a.lo[k] - b.hi[k], b.lo[k] - a.hi[k]);
      if (gap > tol) return true;
    }
    return false;
  }
  // weak: interiors disjoint
  for (int k = 0; k < a.dim(); ++k) {
    const double tol = 1e-9 * a.edge(k);
    if (a.lo[k] >= b.hi[k] - tol || b.lo[k] >= a.hi[k] - tol) return true;
  }
  return false;
}

bool eta_admissible(const Box& a, const Box& b, double eta) {
  if (a.dim() != b.dim()) throw std::invalid_argument("eta_admissible: dimension mismatch");
  // edge-length diameter measure: with eta = 1 this makes exactly the
  // non-adjacent equal-size boxes admissible
  const double diam = std::min(a.max_edge(), b.max_edge());
  const double dist = box_distance(a, b);
  return diam <= eta * dist;
}

PointSet translate(const PointSet& ps, const Point& shift) {
  if (shift.dim() != ps.dim) throw std::invalid_argument("translate: dimension mismatch");
  PointSet out = ps;
  for (long i = 0; i < out.size(); ++i) {
    double* p = out.point(i);
    for (int k = 0; k < out.dim; ++k) p[k] += shift.coords[k];
  }
  return out;
}

void write_pointset(const std::string& path, const PointSet& ps) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_pointset: cannot open " + path);
  f << "# dim=" << ps.dim << " count=" << ps.size() << "\n";
  f.precision(17);
  for (long i = 0; i < ps.size(); ++i) {
    const double* p = ps.point(i);
    for (int k = 0; k < ps.dim; ++k) f << (k ? " " : "") << p[k];
    f << "\n";
  }
}

PointSet read_pointset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_pointset: cannot open " + path);
  std::string header;
  std::getline(f, header);
  int d = 0;
  long n = 0;
  if (std::sscanf(header.c_str(), "# dim=%d count=%ld", &d, &n) != 2)
    throw std::runtime_error("read_pointset: bad header in " + path);
  check_dim(d);
  PointSet ps;
  ps.dim = d;
  ps.provenance = Provenance::File;
  ps.coords.reserve(static_cast<size_t>(n) * d);
  double p[3];
  for (long i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k)
      if (!(f >> p[k])) throw std::runtime_error("read_pointset: truncated file " + path);
    ps.push(p);
  }
  return ps;
}

}  // namespace kernelskel
