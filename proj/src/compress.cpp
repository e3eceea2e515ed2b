#include "kernelskel/compress.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kernelskel {

namespace {

void check_x0_in_source(const PointSet& x0, const Box& source) {
  const double tol = 1e-9 * source.max_edge();
  for (long i = 0; i < x0.size(); ++i)
    if (!source.contains(x0.point(i), tol)) {
      std::ostringstream os;
      os << "compress: X0[" << i << "] lies outside the source box";
      throw std::invalid_argument(os.str());
    }
}

CompressionResult from_id(IdResult id, const ProxySet& proxy, double entry_bound) {
  CompressionResult out;
  out.rank = static_cast<long>(id.skeleton.size());
  out.x_rep = std::move(id.skeleton);
  out.w = std::move(id.u);
  out.epsilon = id.epsilon;
  out.entry_bound = entry_bound;
  out.proxy = proxy;
  return out;
}

}  // namespace

CompressionResult compress_proxy(const Kernel& k, const PointSet& x0, const ProxySet& proxy,
                                 Stop stop, double entry_bound) {
  if (x0.size() == 0) throw std::invalid_argument("compress_proxy: empty X0");
  if (proxy.points.size() == 0) throw std::invalid_argument("compress_proxy: empty proxy set");
  check_x0_in_source(x0, proxy.pair.source);
  Matrix a = assemble(k, x0, proxy.points);
  return from_id(id_rows(a, entry_bound, stop), proxy, entry_bound);
}

CompressionResult compress_proxy_rel(const Kernel& k, const PointSet& x0, const ProxySet& proxy,
                                     double tau, double entry_bound) {
  if (x0.size() == 0) throw std::invalid_argument("compress_proxy: empty X0");
  if (proxy.points.size() == 0) throw std::invalid_argument("compress_proxy: empty proxy set");
  check_x0_in_source(x0, proxy.pair.source);
  Matrix a = assemble(k, x0, proxy.points);
  const double eps = tau * std::sqrt(static_cast<double>(a.cols())) * max_abs(a);
  CompressionResult out = from_id(id_rows(a, entry_bound, Stop::threshold(eps)), proxy, entry_bound);
  out.epsilon = eps;
  return out;
}

Matrix evaluate_approx(const CompressionResult& res, const Kernel& k, const PointSet& x0,
                       const PointSet& y0, bool* membership_warning) {
  if (membership_warning) {
    *membership_warning = false;
    const double tol = 1e-9 * res.proxy.pair.target.outer.max_edge();
    for (long i = 0; i < y0.size(); ++i)
      if (!res.proxy.pair.target.contains(y0.point(i), tol)) {
        *membership_warning = true;
        break;
      }
  }
  Matrix rep_block = assemble(k, x0.select(res.x_rep), y0);
  return matmul(res.w, rep_block);
}

CompressionResult refine_weights(const CompressionResult& res, const Kernel& k,
                                 const PointSet& x0, const PointSet& y0) {
  if (y0.size() < res.rank)
    throw std::invalid_argument("refine_weights: need |Y0| >= rank");
  Matrix basis = assemble(k, x0.select(res.x_rep), y0);
  Matrix a = assemble(k, x0, y0);
  bool deficient = false;
  Matrix w = ls_project(basis, a, &deficient);
  CompressionResult out = res;
  out.w = std::move(w);
  out.ls_refined = true;
  out.refine_rank_deficient = deficient;
  return out;
}

namespace {

HybridResult hybrid_core(const Kernel& k, const PointSet& x0, const PointSet& y0,
                         const ShellRegion& near_region, const ProxySet& proxy_far, double eps,
                         double tau, double entry_bound) {
  if (x0.size() == 0) throw std::invalid_argument("compress_hybrid: empty X0");
  check_x0_in_source(x0, proxy_far.pair.source);
  HybridResult out;
  const double tol = 1e-9 * near_region.outer.max_edge();
  for (long i = 0; i < y0.size(); ++i) {
    if (near_region.contains(y0.point(i), tol))
      out.y0_near.push_back(i);
    else
      out.y0_far.push_back(i);
  }
  // columns: literal near targets then the far proxies
  PointSet cols = y0.select(out.y0_near);
  cols.coords.insert(cols.coords.end(), proxy_far.points.coords.begin(),
                     proxy_far.points.coords.end());
  if (cols.size() == 0) throw std::invalid_argument("compress_hybrid: no columns to compress");
  Matrix a = assemble(k, x0, cols);
  // rms entry scale: near-singular entries in the literal columns would
  // inflate a max-based scale and loosen the threshold for everything else
  if (tau > 0.0)
    eps = tau * std::sqrt(static_cast<double>(a.cols())) * frobenius_norm(a) /
          std::sqrt(static_cast<double>(a.rows()) * a.cols());
  out.result = from_id(id_rows(a, entry_bound, Stop::threshold(eps)), proxy_far, entry_bound);
  out.result.epsilon = eps;
  return out;
}

}  // namespace

HybridResult compress_hybrid(const Kernel& k, const PointSet& x0, const PointSet& y0,
                             const ShellRegion& near_region, const ProxySet& proxy_far,
                             double eps, double entry_bound) {
  return hybrid_core(k, x0, y0, near_region, proxy_far, eps, 0.0, entry_bound);
}

HybridResult compress_hybrid_rel(const Kernel& k, const PointSet& x0, const PointSet& y0,
                                 const ShellRegion& near_region, const ProxySet& proxy_far,
                                 double tau, double entry_bound) {
  return hybrid_core(k, x0, y0, near_region, proxy_far, 0.0, tau, entry_bound);
}

double ErrorReport::max_ratio() const {
  double m = 0.0;
  for (size_t i = 0; i < ratio_max.size(); ++i)
    if (!is_skeleton[i]) m = std::max(m, ratio_max[i]);
  return m;
}

double ErrorReport::mean_ratio() const {
  double s = 0.0;
  long n = 0;
  for (size_t i = 0; i < ratio_avg.size(); ++i)
    if (!is_skeleton[i]) {
      s += ratio_avg[i];
      ++n;
    }
  return n ? s / n : 0.0;
}

ErrorReport diagnostics(const Kernel& k, const PointSet& x0, const CompressionResult& res,
                        const PointSet& probe, const PointSet& xp) {
  if (xp.size() < res.proxy.points.size())
    throw std::invalid_argument("diagnostics: need |X_p| >= |Y_p|");
  const long n = x0.size();
  const long np = probe.size();
  const long nyp = res.proxy.points.size();

  PointSet xrep_pts = x0.select(res.x_rep);

  // residuals at the proxies and at the probe set
  Matrix e_yp(n, nyp);
  {
    Matrix rep = assemble(k, xrep_pts, res.proxy.points);
    Matrix approx = matmul(res.w, rep);
    Matrix exact = assemble(k, x0, res.proxy.points);
    for (long j = 0; j < nyp; ++j)
      for (long i = 0; i < n; ++i) e_yp(i, j) = exact(i, j) - approx(i, j);
  }
  Matrix e_probe(n, np);
  {
    Matrix rep = assemble(k, xrep_pts, probe);
    Matrix approx = matmul(res.w, rep);
    Matrix exact = assemble(k, x0, probe);
    for (long j = 0; j < np; ++j)
      for (long i = 0; i < n; ++i) e_probe(i, j) = exact(i, j) - approx(i, j);
  }

  // S(y) estimated against a dense X_p sample; no rank truncation, the
  // residual functions live in the weakest directions of K(X_p, Y_p)
  Matrix s = ls_solve(assemble(k, xp, res.proxy.points), assemble(k, xp, probe), nullptr, 0.0);

  ErrorReport rep;
  rep.err_yp.resize(n);
  rep.err_probe.resize(n);
  rep.max_abs_probe.resize(n);
  rep.ratio_max.assign(n, 0.0);
  rep.ratio_avg.assign(n, 0.0);
  rep.is_skeleton.assign(n, 0);
  for (long l : res.x_rep) rep.is_skeleton[l] = 1;

  for (long i = 0; i < n; ++i) {
    double syp = 0.0, sprobe = 0.0, mx = 0.0;
    for (long j = 0; j < nyp; ++j) syp += e_yp(i, j) * e_yp(i, j);
    for (long j = 0; j < np; ++j) {
      const double v = e_probe(i, j);
      sprobe += v * v;
      mx = std::max(mx, std::fabs(v));
    }
    rep.err_yp[i] = std::sqrt(syp);
    rep.err_probe[i] = std::sqrt(sprobe);
    rep.max_abs_probe[i] = mx;
    if (!rep.is_skeleton[i]) {
      const double denom =
          std::max(rep.err_yp[i] / std::sqrt(static_cast<double>(nyp)), 1e-300);
      rep.ratio_max[i] = mx / denom;
      rep.ratio_avg[i] = (rep.err_probe[i] / std::sqrt(static_cast<double>(np))) / denom;
    }
  }

  // deviation of the probe residuals from their proxy-residual representation
  Matrix predicted = matmul(e_yp, s);
  double dev = 0.0;
  for (long j = 0; j < np; ++j)
    for (long i = 0; i < n; ++i) dev = std::max(dev, std::fabs(e_probe(i, j) - predicted(i, j)));
  rep.representation_deviation = dev;
  return rep;
}

}  // namespace kernelskel
