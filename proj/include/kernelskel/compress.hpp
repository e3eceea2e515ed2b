#ifndef KERNELSKEL_COMPRESS_HPP
#define KERNELSKEL_COMPRESS_HPP

#include <vector>

#include "kernelskel/linalg.hpp"
#include "kernelskel/proxy.hpp"

namespace kernelskel {

// Proxy-point compression of K(X0, .) over the pair's target domain:
// K(X0, Y0) ~= W K(X_rep, Y0) for any Y0 in the target, with X_rep and W
// computed from K(X0, Y_p) only. Rank and skeleton never depend on a Y0.
struct CompressionResult {
  std::vector<long> x_rep;  // indices into X0
  Matrix w;                 // |X0| x rank, identity rows at x_rep
  double epsilon;
  double entry_bound;
  long rank = 0;
  ProxySet proxy;
  bool ls_refined = false;
  bool refine_rank_deficient = false;
};

CompressionResult compress_proxy(const Kernel& k, const PointSet& x0, const ProxySet& proxy,
                                 Stop stop, double entry_bound = 2.0);

// Same, with the absolute threshold derived from the assembled block:
// eps = tau * sqrt(#cols) * max|K(X0, cols)|.
CompressionResult compress_proxy_rel(const Kernel& k, const PointSet& x0, const ProxySet& proxy,
                                     double tau, double entry_bound = 2.0);

// W * K(X_rep, Y0). Sets *membership_warning when Y0 leaves the target
// domain (the error bound no longer transfers).
Matrix evaluate_approx(const CompressionResult& res, const Kernel& k, const PointSet& x0,
                       const PointSet& y0, bool* membership_warning = nullptr);

// Replace W by the Frobenius-optimal projection onto the rows K(X_rep, Y0).
CompressionResult refine_weights(const CompressionResult& res, const Kernel& k,
                                 const PointSet& x0, const PointSet& y0);

// Near/far hybrid: ID over the literal near-field targets plus the far-field
// proxies, usable when the kernel is singular toward the near boundary.
struct HybridResult {
  CompressionResult result;
  std::vector<long> y0_near;  // indices into Y0
  std::vector<long> y0_far;
};

HybridResult compress_hybrid(const Kernel& k, const PointSet& x0, const PointSet& y0,
                             const ShellRegion& near_region, const ProxySet& proxy_far,
                             double eps, double entry_bound = 2.0);

HybridResult compress_hybrid_rel(const Kernel& k, const PointSet& x0, const PointSet& y0,
                                 const ShellRegion& near_region, const ProxySet& proxy_far,
                                 double tau, double entry_bound = 2.0);

// Per-row error report over a probe set: residuals at the proxies, residuals
// and max pointwise errors at the probe points, the entry-wise error ratios,
// and the deviation of e_i(y) from e_i(Y_p) S(y) where S is estimated by
// least squares against K(X_p, Y_p).
struct ErrorReport {
  std::vector<double> err_yp;
  std::vector<double> err_probe;
  std::vector<double> max_abs_probe;
  std::vector<double> ratio_max;  // max_y |e_i(y)| / (||e_i(Yp)|| / sqrt|Yp|)
  std::vector<double> ratio_avg;  // (||e_i(Y0)|| / sqrt|Y0|) / (||e_i(Yp)|| / sqrt|Yp|)
  std::vector<char> is_skeleton;
  double representation_deviation = 0.0;

  // aggregates over non-skeleton rows
  double max_ratio() const;
  double mean_ratio() const;
};

ErrorReport diagnostics(const Kernel& k, const PointSet& x0, const CompressionResult& res,
                        const PointSet& probe, const PointSet& xp);

}  // namespace kernelskel

#endif
