#include "kernelskel/proxy.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kernelskel/linalg.hpp"

namespace kernelskel {

namespace {

void check_pair(const DomainPair& pair) {
  pair.validate();
  if (pair.empty_target || pair.target.empty())
    throw std::invalid_argument("select_proxy: pair has an empty target region");
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// face gap between the source box and the target hole
double source_gap(const DomainPair& pair) {
  double gap = std::numeric_limits<double>::max();
  for (int k = 0; k < pair.dim(); ++k)
    gap = std::min({gap, pair.target.inner.hi[k] - pair.source.hi[k],
                    pair.source.lo[k] - pair.target.inner.lo[k]});
  return gap;
}

}  // namespace

ProxySet select_proxy(const Kernel& k, const DomainPair& pair, const SchemeRandom& scheme) {
  check_pair(pair);
  if (scheme.n < 1) throw std::invalid_argument("select_proxy: n must be >= 1");
  (void)k;
  ProxySet out;
  out.points = random_uniform_points(pair.target, scheme.n, scheme.seed);
  std::ostringstream os;
  os << "random:" << scheme.n << ":seed=" << scheme.seed;
  out.scheme = os.str();
  out.pair = pair;
  out.selection_rank = out.points.size();
  return out;
}

ProxySet select_proxy(const Kernel& k, const DomainPair& pair, const SchemeSurface& scheme) {
  check_pair(pair);
  if (scheme.n < 1) throw std::invalid_argument("select_proxy: n must be >= 1");
  (void)k;
  ProxySet out;
  out.points = surface_grid_points(pair.target, scheme.n);
  std::ostringstream os;
  os << "surface:" << scheme.n;
  out.scheme = os.str();
  out.pair = pair;
  out.selection_rank = out.points.size();
  return out;
}

ProxySet select_proxy_id(const Kernel& k, const DomainPair& pair, const IdSelectParams& params) {
  check_pair(pair);
  if (params.xd_count < 1 || params.yd_count < params.xd_count)
    throw std::invalid_argument("select_proxy_id: need yd_count >= xd_count >= 1");
  if (params.refine_factor <= 1.0)
    throw std::invalid_argument("select_proxy_id: refine_factor must be > 1");
  const double t0 = now_seconds();
  const int d = pair.dim();

  // candidate region: keep Y_d off a touching singularity by a small gap
  ShellRegion region = pair.target;
  if (k.singular_on_diagonal() && source_gap(pair) <= 1e-12 * pair.source.max_edge()) {
    if (params.gap_fraction <= 0.0)
      throw std::invalid_argument(
          "select_proxy_id: singular kernel on a weak pair needs a candidate gap");
    region.inner = region.inner.inflated(params.gap_fraction * pair.source.max_edge());
  }

  long xd_n = params.xd_count;
  long yd_n = params.yd_count;
  ProxyDiag diag;
  for (int round = 1; round <= params.max_rounds; ++round) {
    PointSet xd = grid_points(pair.source, xd_n);
    PointSet yd;
    if (params.adaptive_near_fraction) {
      Box band = params.adaptive_band
                     ? *params.adaptive_band
                     : region.inner.inflated(pair.source.max_edge());
      yd = adaptive_grid_points(region, yd_n, *params.adaptive_near_fraction, band);
    } else {
      yd = grid_points(region, yd_n);
    }
    Matrix a = assemble(k, xd, yd);
    const double scale = max_abs(a);
    const double floor_abs = params.threshold_floor < 0.0 ? 1e-13 * scale : params.threshold_floor;
    const double eps = std::max(std::sqrt(static_cast<double>(xd.size())) *
                                    std::numeric_limits<double>::epsilon() * scale,
                                floor_abs);
    const long cap = std::min(xd.size(), yd.size());
    auto res = srrqr(std::move(a), params.entry_bound, Stop::threshold(eps));
    diag.rounds = round;
    diag.xd_used = xd.size();
    diag.yd_used = yd.size();
    diag.threshold = eps;
    if (res.rank < cap) {
      std::vector<long> keep(res.perm.begin(), res.perm.begin() + res.rank);
      ProxySet out;
      out.points = yd.select(keep);
      out.scheme = "id";
      out.pair = pair;
      out.selection_rank = res.rank;
      diag.seconds = now_seconds() - t0;
      out.diag = diag;
      return out;
    }
    // saturated: densify both grids and retry
    const double mult = std::pow(params.refine_factor, d);
    xd_n = static_cast<long>(std::ceil(xd_n * mult));
    yd_n = static_cast<long>(std::ceil(yd_n * mult));
  }
  throw std::runtime_error(
      "select_proxy_id: rank saturated after max_rounds; use denser candidate grids or "
      "adaptive candidates");
}

ProxySet select_proxy_any(const Kernel& k, const DomainPair& pair, const ProxySchemeSpec& spec) {
  if (std::holds_alternative<SchemeRandom>(spec))
    return select_proxy(k, pair, std::get<SchemeRandom>(spec));
  if (std::holds_alternative<SchemeSurface>(spec))
    return select_proxy(k, pair, std::get<SchemeSurface>(spec));
  return select_proxy_id(k, pair, std::get<IdSelectParams>(spec));
}

namespace {

std::string pair_key(const DomainPair& pair, bool include_center) {
  // relative geometry quantized well above float jitter, so translated
  // copies of one canonical pair collapse onto the same key
  std::ostringstream os;
  const Point c = pair.source.center();
  const double unit = 1e-9 * pair.source.max_edge();
  auto q = [&](double v) { return static_cast<long long>(std::llround(v / unit)); };
  os << to_string(pair.admissibility);
  for (int k = 0; k < pair.dim(); ++k) {
    os << "|" << q(pair.source.lo[k] - c.coords[k]) << "," << q(pair.source.hi[k] - c.coords[k]);
    os << ";" << q(pair.target.outer.lo[k] - c.coords[k]) << ","
       << q(pair.target.outer.hi[k] - c.coords[k]);
    os << ";" << q(pair.target.inner.lo[k] - c.coords[k]) << ","
       << q(pair.target.inner.hi[k] - c.coords[k]);
    if (include_center) {
      os.precision(17);
      os << ";c=" << c.coords[k];
    }
  }
  return os.str();
}

std::string scheme_key(const ProxySchemeSpec& spec) {
  std::ostringstream os;
  if (std::holds_alternative<SchemeRandom>(spec)) {
    const auto& s = std::get<SchemeRandom>(spec);
    os << "random:" << s.n << ":" << s.seed;
  } else if (std::holds_alternative<SchemeSurface>(spec)) {
    os << "surface:" << std::get<SchemeSurface>(spec).n;
  } else {
    const auto& p = std::get<IdSelectParams>(spec);
    os << "id:" << p.xd_count << ":" << p.yd_count << ":" << p.threshold_floor << ":"
       << p.max_rounds << ":" << p.entry_bound << ":" << p.gap_fraction;
    if (p.adaptive_near_fraction) os << ":a=" << *p.adaptive_near_fraction;
  }
  return os.str();
}

}  // namespace

ProxySet ProxyCache::get(const Kernel& k, const DomainPair& pair, const ProxySchemeSpec& spec) {
  // degenerate kernels are bound to their boxes, so their entries may not be
  // shared across translated pairs
  const bool shareable = k.translation_invariant();
  const std::string key = k.name() + "#" + scheme_key(spec) + "#" + pair_key(pair, !shareable);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      const ProxySet& canon = it->second;
      ProxySet out = canon;
      if (shareable) {
        const Point from = canon.pair.source.center();
        const Point to = pair.source.center();
        Point shift;
        shift.coords.resize(pair.dim());
        for (int a = 0; a < pair.dim(); ++a) shift.coords[a] = to.coords[a] - from.coords[a];
        out.points = translate(canon.points, shift);
        out.pair = pair;
      }
      return out;
    }
  }
  ProxySet fresh = select_proxy_any(k, pair, spec);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.emplace(key, fresh);
    ++computations_;
  }
  return fresh;
}

void ProxyCache::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.clear();
  computations_ = 0;
}

}  // namespace kernelskel
