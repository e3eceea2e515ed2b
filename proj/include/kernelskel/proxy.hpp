#ifndef KERNELSKEL_PROXY_HPP
#define KERNELSKEL_PROXY_HPP

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>

#include "kernelskel/geometry.hpp"
#include "kernelskel/kernels.hpp"

namespace kernelskel {

struct SchemeRandom {
  long n = 2000;
  uint64_t seed = 0;
};

struct SchemeSurface {
  long n = 2000;
};

// Candidate-grid driven selection. Grid sizes follow the usual working
// defaults (~1500 x ~15000); refine_factor is a per-axis density multiplier
// applied when the selection saturates.
struct IdSelectParams {
  long xd_count = 1500;
  long yd_count = 15000;
  // absolute residual floor for the selection threshold; negative means
  // 1e-13 * max|K(X_d, Y_d)|
  double threshold_floor = -1.0;
  double refine_factor = 2.0;
  int max_rounds = 3;
  double entry_bound = 2.0;
  // gap between the source box and the candidate region when the kernel is
  // singular on a touching boundary, in units of the source edge
  double gap_fraction = 0.05;
  // when set, Y_d places this fraction of candidates in a band near the
  // source box (band defaults to a collar one source-edge wide)
  std::optional<double> adaptive_near_fraction;
  std::optional<Box> adaptive_band;
};

using ProxySchemeSpec = std::variant<SchemeRandom, SchemeSurface, IdSelectParams>;

struct ProxyDiag {
  long xd_used = 0;
  long yd_used = 0;
  int rounds = 0;
  double threshold = 0.0;
  double seconds = 0.0;
};

struct ProxySet {
  PointSet points;
  std::string scheme;  // "random:<n>", "surface:<n>", "id"
  DomainPair pair;
  long selection_rank = 0;
  ProxyDiag diag;
};

ProxySet select_proxy(const Kernel& k, const DomainPair& pair, const SchemeRandom& scheme);
ProxySet select_proxy(const Kernel& k, const DomainPair& pair, const SchemeSurface& scheme);

// Candidate-grid selection: assemble K(X_d, Y_d), take the column skeleton at
// threshold max(sqrt(|X_d|) eps_machine, floor) * scale, refine the grids and
// retry while the rank saturates at min(|X_d|, |Y_d|).
ProxySet select_proxy_id(const Kernel& k, const DomainPair& pair,
                         const IdSelectParams& params = {});

ProxySet select_proxy_any(const Kernel& k, const DomainPair& pair, const ProxySchemeSpec& spec);

// Cache keyed by kernel, scheme and pair geometry; pairs of a
// translation-invariant kernel that differ only by translation share one
// entry and cached points are translated into the query frame.
class ProxyCache {
 public:
  ProxySet get(const Kernel& k, const DomainPair& pair, const ProxySchemeSpec& spec);
  long computations() const { return computations_; }
  void clear();

 private:
  std::map<std::string, ProxySet> entries_;
  std::mutex mutex_;
  long computations_ = 0;
};

}  // namespace kernelskel

#endif
