#include "kernelskel/h2.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kernelskel/util.hpp"

namespace kernelskel {

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool boxes_adjacent(const Box& a, const Box& b) {
  for (int k = 0; k < a.dim(); ++k) {
    const double tol = 1e-9 * a.edge(k);
    const double gap = std::max(a.lo[k] - b.hi[k], b.lo[k] - a.hi[k]);
    if (gap > tol) return false;
  }
  return true;
}

constexpr int kMaxDepth = 30;

}  // namespace

PartitionTree build_tree(const PointSet& points, long leaf_cap) {
  if (points.size() == 0) throw std::invalid_argument("build_tree: empty point set");
  if (leaf_cap < 1) throw std::invalid_argument("build_tree: leaf_cap must be >= 1");
  const int d = points.dim;
  const long n = points.size();

  std::vector<double> lo(d, std::numeric_limits<double>::max());
  std::vector<double> hi(d, std::numeric_limits<double>::lowest());
  for (long i = 0; i < n; ++i) {
    const double* p = points.point(i);
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  double edge = 0.0;
  for (int k = 0; k < d; ++k) edge = std::max(edge, hi[k] - lo[k]);
  if (edge == 0.0) edge = 1.0;  // all points coincide
  std::vector<double> blo(d), bhi(d);
  for (int k = 0; k < d; ++k) {
    const double c = 0.5 * (lo[k] + hi[k]);
    blo[k] = c - 0.5 * edge;
    bhi[k] = c + 0.5 * edge;
  }

  PartitionTree t;
  t.dim = d;
  t.root_edge = edge;
  t.perm.resize(n);
  std::iota(t.perm.begin(), t.perm.end(), 0);

  TreeNode root;
  root.box = Box(blo, bhi);
  root.level = 0;
  root.begin = 0;
  root.end = n;
  t.nodes.push_back(root);
  t.levels.push_back({0});

  // split every box of the current level while any of them is overfull, so
  // all leaves end up on one level and same-level logic tiles the matrix
  const int nch = 1 << d;
  std::vector<long> scratch(n);
  int level = 0;
  while (true) {
    long worst = 0;
    for (long id : t.levels[level]) worst = std::max(worst, t.nodes[id].count());
    if (worst <= leaf_cap) break;
    if (level >= kMaxDepth)
      throw std::runtime_error("build_tree: max depth exceeded (coincident points?)");
    std::vector<long> next;
    for (long id : t.levels[level]) {
      const Box box = t.nodes[id].box;
      const long begin = t.nodes[id].begin;
      const long end = t.nodes[id].end;
      const Point c = box.center();
      // bucket the owned range by child octant, stable
      std::vector<std::vector<long>> buckets(nch);
      for (long pos = begin; pos < end; ++pos) {
        const double* p = points.point(t.perm[pos]);
        int child = 0;
        for (int k = 0; k < d; ++k)
          if (p[k] >= c.coords[k]) child |= 1 << k;
        buckets[child].push_back(t.perm[pos]);
      }
      long cursor = begin;
      for (int ch = 0; ch < nch; ++ch) {
        if (buckets[ch].empty()) continue;
        std::vector<double> clo(d), chi(d);
        for (int k = 0; k < d; ++k) {
          clo[k] = (ch & (1 << k)) ? c.coords[k] : box.lo[k];
          chi[k] = (ch & (1 << k)) ? box.hi[k] : c.coords[k];
        }
        TreeNode node;
        node.box = Box(clo, chi);
        node.level = level + 1;
        node.parent = id;
        node.begin = cursor;
        node.end = cursor + static_cast<long>(buckets[ch].size());
        for (long v : buckets[ch]) scratch[cursor++] = v;
        t.nodes.push_back(node);
        t.nodes[id].children.push_back(static_cast<long>(t.nodes.size()) - 1);
        next.push_back(static_cast<long>(t.nodes.size()) - 1);
      }
      std::memcpy(t.perm.data() + begin, scratch.data() + begin,
                  sizeof(long) * (end - begin));
    }
    t.levels.push_back(std::move(next));
    ++level;
  }
  t.depth = level;
  t.points = points.select(t.perm);
  return t;
}

DomainPair level_domain_pair(int level, double root_edge, int dim, Admissibility kind) {
  if (level < 1) throw std::invalid_argument("level_domain_pair: no admissible pairs at the root");
  const double xh = root_edge / std::pow(2.0, level + 1);
  const double outer_h = root_edge - xh;
  double inner_h = kind == Admissibility::Strong ? 3.0 * xh : xh;
  DomainPair pair;
  pair.admissibility = kind;
  pair.source = Box::centered_cube(dim, xh);
  if (inner_h >= outer_h - 1e-12 * root_edge) {
    pair.empty_target = true;
    inner_h = outer_h;
  }
  pair.target = ShellRegion(Box::centered_cube(dim, outer_h), Box::centered_cube(dim, inner_h));
  return pair;
}

Matrix kernel_self_matrix(const Kernel& k, const PointSet& pts) {
  const long n = pts.size();
  Matrix a(n, n);
  const bool singular = k.singular_on_diagonal();
  for (long j = 0; j < n; ++j) {
    const double* pj = pts.point(j);
    double* col = a.col(j);
    for (long i = 0; i < n; ++i)
      col[i] = (singular && i == j) ? 0.0 : k(pts.point(i), pj);
  }
  return a;
}

namespace {

PointSet points_at(const PointSet& pts, const std::vector<long>& ids) { return pts.select(ids); }

struct LevelContext {
  DomainPair canon;
  bool compress = false;
};

}  // namespace

std::pair<H2Matrix, BuildStats> build_h2(const Kernel& k, PartitionTree tree, Admissibility kind,
                                         const ProxySchemeSpec& scheme, double tau,
                                         double entry_bound, BuildMode mode, ProxyCache* cache) {
  if (k.family() == Kernel::Family::Degenerate)
    throw std::invalid_argument("build_h2: needs a symmetric translation-invariant kernel");
  if (tau <= 0.0 || tau >= 1.0) throw std::invalid_argument("build_h2: tau must be in (0,1)");
  if (kind == Admissibility::Weak && mode == BuildMode::Proxy && k.singular_on_diagonal())
    throw std::invalid_argument(
        "build_h2: kernel is singular on the boundary under weak admissibility; use the hybrid "
        "mode");
  if (kind == Admissibility::Strong && mode == BuildMode::Hybrid)
    throw std::invalid_argument("build_h2: hybrid mode applies to weak admissibility");

  ProxyCache local_cache;
  if (!cache) cache = &local_cache;
  const long base_selections = cache->computations();
  const double t_start = now_s();

  H2Matrix h2;
  h2.tree = std::move(tree);
  h2.kind = kind;
  h2.mode = mode;
  h2.tau = tau;
  PartitionTree& t = h2.tree;
  const int d = t.dim;
  h2.node_data.resize(t.nodes.size());

  BuildStats st;
  st.n_points = t.points.size();
  st.tree_depth = t.depth;
  st.level_rank_max.assign(t.depth + 1, 0);
  st.level_proxy_size.assign(t.depth + 1, 0);

  // weak-proxy candidate grids concentrate near the source by default
  ProxySchemeSpec level_scheme = scheme;
  if (kind == Admissibility::Weak && mode == BuildMode::Proxy &&
      std::holds_alternative<IdSelectParams>(level_scheme)) {
    auto& p = std::get<IdSelectParams>(level_scheme);
    if (!p.adaptive_near_fraction) p.adaptive_near_fraction = 0.5;
  }

  // bottom-up cluster compression
  for (int lev = t.depth; lev >= 1; --lev) {
    const Admissibility proxy_kind = mode == BuildMode::Hybrid ? Admissibility::Strong : kind;
    const DomainPair canon = level_domain_pair(lev, t.root_edge, d, proxy_kind);
    const bool have_far = !canon.empty_target;

    for (long id : t.levels[lev]) {
      const TreeNode& node = t.nodes[id];
      H2NodeData& data = h2.node_data[id];
      std::vector<long> xi_ids;
      if (node.leaf()) {
        xi_ids.resize(node.count());
        std::iota(xi_ids.begin(), xi_ids.end(), node.begin);
      } else {
        for (long ch : node.children) {
          const auto& cs = h2.node_data[ch].skel;
          xi_ids.insert(xi_ids.end(), cs.begin(), cs.end());
        }
      }
      const bool weak_coupling_here = kind == Admissibility::Weak;
      if (!have_far && !weak_coupling_here) {
        // no far field at this level (strong level 1): pass points upward
        data.skel = std::move(xi_ids);
        data.identity = true;
        continue;
      }
      PointSet xi = points_at(t.points, xi_ids);
      const Point c = node.box.center();
      DomainPair pair_i = canon.translated(c.coords.data());

      CompressionResult res;
      if (mode == BuildMode::Proxy) {
        const double tp = now_s();
        ProxySet proxy = cache->get(k, pair_i, level_scheme);
        st.seconds_proxy += now_s() - tp;
        st.level_proxy_size[lev] = proxy.points.size();
        const double tc = now_s();
        res = compress_proxy_rel(k, xi, proxy, tau, entry_bound);
        st.seconds_compress += now_s() - tc;
      } else if (mode == BuildMode::Hybrid) {
        // literal targets in the adjacent collar, proxies beyond it
        std::vector<long> near_ids;
        for (long other : t.levels[lev]) {
          if (other == id || !boxes_adjacent(node.box, t.nodes[other].box)) continue;
          for (long pos = t.nodes[other].begin; pos < t.nodes[other].end; ++pos)
            near_ids.push_back(pos);
        }
        PointSet near_pts = points_at(t.points, near_ids);
        ShellRegion near_region(Box::centered_cube(d, 1.5 * node.box.max_edge())
                                    .translated(c.coords.data()),
                                node.box);
        const double tc = now_s();
        if (have_far) {
          const double tp = now_s();
          ProxySet proxy = cache->get(k, pair_i, level_scheme);
          st.seconds_proxy += now_s() - tp;
          st.level_proxy_size[lev] = proxy.points.size();
          auto hyb = compress_hybrid_rel(k, xi, near_pts, near_region, proxy, tau, entry_bound);
          res = std::move(hyb.result);
        } else {
          // empty far field: plain ID over the literal collar, rms scale as
          // in the hybrid threshold
          Matrix a = assemble(k, xi, near_pts);
          const double eps = tau * std::sqrt(static_cast<double>(a.cols())) *
                             frobenius_norm(a) /
                             std::sqrt(static_cast<double>(a.rows()) * a.cols());
          IdResult idr = id_rows(a, entry_bound, Stop::threshold(eps));
          res.rank = static_cast<long>(idr.skeleton.size());
          res.x_rep = std::move(idr.skeleton);
          res.w = std::move(idr.u);
        }
        st.seconds_compress += now_s() - tc;
      } else {
        // DirectSrrqr: the literal far field of this cluster at this level
        std::vector<long> far_ids;
        for (long other : t.levels[lev]) {
          if (other == id) continue;
          if (!admissible(node.box, t.nodes[other].box, kind)) continue;
          for (long pos = t.nodes[other].begin; pos < t.nodes[other].end; ++pos)
            far_ids.push_back(pos);
        }
        if (far_ids.empty()) {
          data.skel = std::move(xi_ids);
          data.identity = true;
          continue;
        }
        const double tc = now_s();
        Matrix a = assemble(k, xi, points_at(t.points, far_ids));
        const double eps = tau * std::sqrt(static_cast<double>(a.cols())) * max_abs(a);
        IdResult idr = id_rows(a, entry_bound, Stop::threshold(eps));
        res.rank = static_cast<long>(idr.skeleton.size());
        res.x_rep = std::move(idr.skeleton);
        res.w = std::move(idr.u);
        st.seconds_compress += now_s() - tc;
      }

      data.skel.resize(res.x_rep.size());
      for (size_t l = 0; l < res.x_rep.size(); ++l) data.skel[l] = xi_ids[res.x_rep[l]];
      data.w = std::move(res.w);
      data.identity = false;
      st.level_rank_max[lev] =
          std::max(st.level_rank_max[lev], static_cast<long>(data.skel.size()));
    }
  }

  // coupling blocks: same-level admissible pairs not covered by an ancestor
  const double ta = now_s();
  for (int lev = 1; lev <= t.depth; ++lev) {
    const auto& ids = t.levels[lev];
    for (size_t ii = 0; ii < ids.size(); ++ii) {
      for (size_t jj = ii + 1; jj < ids.size(); ++jj) {
        const long a = ids[ii], b = ids[jj];
        if (kind == Admissibility::Strong) {
          if (boxes_adjacent(t.nodes[a].box, t.nodes[b].box)) continue;
          const long pa = t.nodes[a].parent, pb = t.nodes[b].parent;
          if (pa != pb && !boxes_adjacent(t.nodes[pa].box, t.nodes[pb].box)) continue;
        } else {
          if (t.nodes[a].parent != t.nodes[b].parent) continue;
        }
        CouplingBlock blk;
        blk.a = a;
        blk.b = b;
        blk.m = assemble(k, points_at(t.points, h2.node_data[a].skel),
                         points_at(t.points, h2.node_data[b].skel));
        h2.coupling.push_back(std::move(blk));
      }
    }
  }

  // dense blocks between adjacent leaves
  const auto& leaves = t.levels[t.depth];
  for (size_t ii = 0; ii < leaves.size(); ++ii) {
    for (size_t jj = ii; jj < leaves.size(); ++jj) {
      const long a = leaves[ii], b = leaves[jj];
      if (kind == Admissibility::Strong) {
        if (!boxes_adjacent(t.nodes[a].box, t.nodes[b].box)) continue;
      } else {
        if (a != b) continue;
      }
      std::vector<long> ida(t.nodes[a].count()), idb(t.nodes[b].count());
      std::iota(ida.begin(), ida.end(), t.nodes[a].begin);
      std::iota(idb.begin(), idb.end(), t.nodes[b].begin);
      DenseBlock blk;
      blk.a = a;
      blk.b = b;
      blk.m = a == b ? kernel_self_matrix(k, points_at(t.points, ida))
                     : assemble(k, points_at(t.points, ida), points_at(t.points, idb));
      h2.dense.push_back(std::move(blk));
    }
  }
  st.seconds_assemble = now_s() - ta;

  // storage accounting, 8 bytes per stored real
  const double mb = 1.0 / (1024.0 * 1024.0);
  for (size_t id = 0; id < h2.node_data.size(); ++id) {
    const auto& nd = h2.node_data[id];
    if (!nd.identity) st.storage_basis_mb += 8.0 * nd.w.rows() * nd.w.cols() * mb;
  }
  for (const auto& blk : h2.coupling)
    st.storage_coupling_mb += 8.0 * blk.m.rows() * blk.m.cols() * mb;
  for (const auto& blk : h2.dense) st.storage_dense_mb += 8.0 * blk.m.rows() * blk.m.cols() * mb;
  st.storage_total_mb = st.storage_basis_mb + st.storage_coupling_mb + st.storage_dense_mb;
  st.proxy_selections = cache->computations() - base_selections;
  st.seconds_total = now_s() - t_start;
  return {std::move(h2), st};
}

std::vector<double> matvec(const H2Matrix& h2, const std::vector<double>& v) {
  const PartitionTree& t = h2.tree;
  const long n = t.points.size();
  if (static_cast<long>(v.size()) != n) throw std::invalid_argument("matvec: length mismatch");

  // into tree order
  std::vector<double> vt(n), out_t(n, 0.0);
  for (long pos = 0; pos < n; ++pos) vt[pos] = v[t.perm[pos]];

  // upward: equivalent charges at skeleton points
  std::vector<std::vector<double>> q(t.nodes.size());
  for (int lev = t.depth; lev >= 1; --lev) {
    for (long id : t.levels[lev]) {
      const TreeNode& node = t.nodes[id];
      const H2NodeData& nd = h2.node_data[id];
      std::vector<double> in;
      if (node.leaf()) {
        in.assign(vt.begin() + node.begin, vt.begin() + node.end);
      } else {
        for (long ch : node.children)
          in.insert(in.end(), q[ch].begin(), q[ch].end());
      }
      if (nd.identity) {
        q[id] = std::move(in);
      } else {
        q[id].assign(nd.skel.size(), 0.0);
        gemv(nd.w, in.data(), q[id].data(), true);
      }
    }
  }

  // coupling, both directions of each stored pair
  std::vector<std::vector<double>> p(t.nodes.size());
  for (size_t id = 0; id < t.nodes.size(); ++id)
    p[id].assign(h2.node_data[id].skel.size(), 0.0);
  for (const auto& blk : h2.coupling) {
    gemv(blk.m, q[blk.b].data(), p[blk.a].data(), false, 1.0, 1.0);
    gemv(blk.m, q[blk.a].data(), p[blk.b].data(), true, 1.0, 1.0);
  }

  // downward: scatter skeleton potentials
  for (int lev = 1; lev <= t.depth; ++lev) {
    for (long id : t.levels[lev]) {
      const TreeNode& node = t.nodes[id];
      const H2NodeData& nd = h2.node_data[id];
      std::vector<double> full;
      if (nd.identity) {
        full = p[id];
      } else {
        full.assign(nd.w.rows(), 0.0);
        gemv(nd.w, p[id].data(), full.data(), false);
      }
      if (node.leaf()) {
        for (long i = 0; i < node.count(); ++i) out_t[node.begin + i] += full[i];
      } else {
        long off = 0;
        for (long ch : node.children) {
          const long sz = static_cast<long>(h2.node_data[ch].skel.size());
          for (long i = 0; i < sz; ++i) p[ch][i] += full[off + i];
          off += sz;
        }
      }
    }
  }

  // dense near field
  for (const auto& blk : h2.dense) {
    const TreeNode& na = t.nodes[blk.a];
    const TreeNode& nb = t.nodes[blk.b];
    gemv(blk.m, vt.data() + nb.begin, out_t.data() + na.begin, false, 1.0, 1.0);
    if (blk.a != blk.b)
      gemv(blk.m, vt.data() + na.begin, out_t.data() + nb.begin, true, 1.0, 1.0);
  }

  std::vector<double> out(n);
  for (long pos = 0; pos < n; ++pos) out[t.perm[pos]] = out_t[pos];
  return out;
}

namespace {

// accumulated basis of a node over all points it owns
const Matrix& ubig(const H2Matrix& h2, long id, std::vector<Matrix>& memo,
                   std::vector<char>& have) {
  if (have[id]) return memo[id];
  const TreeNode& node = h2.tree.nodes[id];
  const H2NodeData& nd = h2.node_data[id];
  Matrix out;
  if (node.leaf()) {
    out = nd.identity ? Matrix::identity(node.count()) : nd.w;
  } else {
    const long k = nd.identity ? static_cast<long>(nd.skel.size()) : nd.w.cols();
    out = Matrix(node.count(), k);
    long row_off = 0;  // rows grouped by child, in child order
    long skel_off = 0;
    for (long ch : node.children) {
      const Matrix& ub = ubig(h2, ch, memo, have);
      const long ck = static_cast<long>(h2.node_data[ch].skel.size());
      // child block of the transfer matrix
      Matrix part(ub.rows(), k);
      if (nd.identity) {
        for (long j = 0; j < ck; ++j)
          for (long i = 0; i < ub.rows(); ++i) part(i, skel_off + j) = ub(i, j);
      } else {
        Matrix slice(ck, k);
        for (long j = 0; j < k; ++j)
          for (long i = 0; i < ck; ++i) slice(i, j) = nd.w(skel_off + i, j);
        gemm(ub, slice, part);
      }
      for (long j = 0; j < k; ++j)
        for (long i = 0; i < ub.rows(); ++i) out(row_off + i, j) = part(i, j);
      row_off += ub.rows();
      skel_off += ck;
    }
  }
  memo[id] = std::move(out);
  have[id] = 1;
  return memo[id];
}

std::vector<long> sample_indices(long n, long want, Xoshiro256ss& rng) {
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (want >= n) return idx;
  for (long i = 0; i < want; ++i) {
    const long j = i + static_cast<long>(rng.below(static_cast<uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(want);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

double dense_storage_mb(long n) {
  return 8.0 * static_cast<double>(n) * static_cast<double>(n) / (1024.0 * 1024.0);
}

BuildStats audit(const H2Matrix& h2, const Kernel& k, long sample_budget, uint64_t seed) {
  const PartitionTree& t = h2.tree;
  BuildStats st;
  st.n_points = t.points.size();
  st.tree_depth = t.depth;

  std::vector<Matrix> memo(t.nodes.size());
  std::vector<char> have(t.nodes.size(), 0);
  Xoshiro256ss rng(seed);

  double num = 0.0, den = 0.0;
  for (const auto& blk : h2.coupling) {
    const TreeNode& na = t.nodes[blk.a];
    const TreeNode& nb = t.nodes[blk.b];
    const Matrix& ua = ubig(h2, blk.a, memo, have);
    const Matrix& ub = ubig(h2, blk.b, memo, have);
    std::vector<long> rows(na.count()), cols(nb.count());
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    double scale = 1.0;
    if (na.count() * nb.count() > sample_budget) {
      const long side = std::max<long>(32, static_cast<long>(std::sqrt((double)sample_budget)));
      rows = sample_indices(na.count(), std::min<long>(side, na.count()), rng);
      cols = sample_indices(nb.count(), std::min<long>(side, nb.count()), rng);
      scale = (static_cast<double>(na.count()) / rows.size()) *
              (static_cast<double>(nb.count()) / cols.size());
      st.audit_subsampled = true;
    }
    std::vector<long> rid(rows.size()), cid(cols.size());
    for (size_t i = 0; i < rows.size(); ++i) rid[i] = na.begin + rows[i];
    for (size_t j = 0; j < cols.size(); ++j) cid[j] = nb.begin + cols[j];
    Matrix exact = assemble(k, t.points.select(rid), t.points.select(cid));
    Matrix approx = matmul(matmul(ua.select_rows(rows), blk.m), ub.select_rows(cols), false, true);
    for (long j = 0; j < exact.cols(); ++j)
      for (long i = 0; i < exact.rows(); ++i) {
        const double e = exact(i, j);
        const double diff = e - approx(i, j);
        num += scale * diff * diff;
        den += scale * e * e;
      }
  }
  st.audited_error = den > 0.0 ? std::sqrt(num / den) : 0.0;

  const double mb = 1.0 / (1024.0 * 1024.0);
  for (const auto& nd : h2.node_data)
    if (!nd.identity) st.storage_basis_mb += 8.0 * nd.w.rows() * nd.w.cols() * mb;
  for (const auto& blk : h2.coupling)
    st.storage_coupling_mb += 8.0 * blk.m.rows() * blk.m.cols() * mb;
  for (const auto& blk : h2.dense) st.storage_dense_mb += 8.0 * blk.m.rows() * blk.m.cols() * mb;
  st.storage_total_mb = st.storage_basis_mb + st.storage_coupling_mb + st.storage_dense_mb;
  return st;
}

}  // namespace kernelskel
