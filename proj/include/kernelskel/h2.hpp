#ifndef KERNELSKEL_H2_HPP
#define KERNELSKEL_H2_HPP

#include <utility>
#include <vector>

#include "kernelskel/compress.hpp"
#include "kernelskel/proxy.hpp"

namespace kernelskel {

struct TreeNode {
  Box box;
  int level = 0;
  long parent = -1;
  std::vector<long> children;
  long begin = 0, end = 0;  // owned range in tree-ordered points

  bool leaf() const { return children.empty(); }
  long count() const { return end - begin; }
};

// Uniform 2^d subdivision of the bounding cube; a box splits while it holds
// more than leaf_cap points, empty children are pruned. Points are permuted
// so every node owns a contiguous range.
struct PartitionTree {
  std::vector<TreeNode> nodes;            // nodes[0] is the root
  std::vector<std::vector<long>> levels;  // node ids per level
  std::vector<long> perm;                 // tree position -> original index
  PointSet points;                        // tree order
  int dim = 0;
  int depth = 0;
  double root_edge = 0.0;
};

PartitionTree build_tree(const PointSet& points, long leaf_cap);

// Canonical source/target pair shared by all clusters of one level (root
// edge L): X = [-L/2^{k+1}, L/2^{k+1}]^d, target outer [-(L - L/2^{k+1}), ..]^d,
// target hole 3X (strong) or X (weak). Strong level 1 has no far field; the
// returned pair carries empty_target.
DomainPair level_domain_pair(int level, double root_edge, int dim, Admissibility kind);

enum class BuildMode { Proxy, Hybrid, DirectSrrqr };

struct H2NodeData {
  std::vector<long> skel;  // tree-order point ids
  Matrix w;                // leaf: own-points x k, internal: child-skels x k
  bool identity = false;   // pass-through at levels without a far field
};

struct CouplingBlock {
  long a, b;  // node ids, a < b
  Matrix m;   // K(skel_a, skel_b)
};

struct DenseBlock {
  long a, b;  // leaf ids, a <= b
  Matrix m;   // K(points_a, points_b)
};

struct BuildStats {
  long n_points = 0;
  int tree_depth = 0;
  double storage_total_mb = 0.0;
  double storage_dense_mb = 0.0;
  double storage_basis_mb = 0.0;
  double storage_coupling_mb = 0.0;
  std::vector<long> level_rank_max;
  std::vector<long> level_proxy_size;
  long proxy_selections = 0;
  double seconds_total = 0.0;
  double seconds_proxy = 0.0;
  double seconds_compress = 0.0;
  double seconds_assemble = 0.0;
  double audited_error = -1.0;
  bool audit_subsampled = false;
};

// Symmetric nested-basis representation of K(X, X).
struct H2Matrix {
  PartitionTree tree;
  Admissibility kind = Admissibility::Strong;
  BuildMode mode = BuildMode::Proxy;
  double tau = 0.0;
  std::vector<H2NodeData> node_data;
  std::vector<CouplingBlock> coupling;
  std::vector<DenseBlock> dense;
};

// Bottom-up construction: leaves compress their own points, parents the
// union of child skeletons, all against the per-level proxy sets (one
// selection per level through the cache). Coupling blocks connect admissible
// same-level pairs, dense blocks the adjacent leaves.
std::pair<H2Matrix, BuildStats> build_h2(const Kernel& k, PartitionTree tree, Admissibility kind,
                                         const ProxySchemeSpec& scheme, double tau,
                                         double entry_bound, BuildMode mode,
                                         ProxyCache* cache = nullptr);

// y = H2 * v, input and output in the original point order.
std::vector<double> matvec(const H2Matrix& h2, const std::vector<double>& v);

// Relative error over all compressed (coupling) blocks plus storage
// accounting; blocks above sample_budget entries are subsampled and flagged.
BuildStats audit(const H2Matrix& h2, const Kernel& k, long sample_budget, uint64_t seed = 7);

double dense_storage_mb(long n);

// K(pts, pts) with the self-interaction convention used throughout the H2
// representation: diagonal entries of kernels singular at zero are 0.
Matrix kernel_self_matrix(const Kernel& k, const PointSet& pts);

}  // namespace kernelskel

#endif
