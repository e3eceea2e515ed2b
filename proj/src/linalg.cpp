#include "kernelskel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "kernelskel/util.hpp"

namespace kernelskel {

namespace {

constexpr double kEntrySlack = 1e-9;  // swap while rho > C * (1 + kEntrySlack)
constexpr double kRankTol = 1e-12;    // relative rank cutoff in the LS solvers

// Householder reflector for x of length len: fills v (unscaled) and returns
// {alpha, beta} with (I - beta v v^T) x = alpha e1.
struct Reflector {
  double alpha, beta;
};

Reflector make_reflector(const double* x, long len, std::vector<double>& v) {
  v.assign(x, x + len);
  const double nx = norm2(x, len);
  if (nx == 0.0) return {0.0, 0.0};
  const double alpha = x[0] >= 0.0 ? -nx : nx;
  v[0] -= alpha;
  const double vn2 = dot(v.data(), v.data(), len);
  return {alpha, vn2 > 0.0 ? 2.0 / vn2 : 0.0};
}

inline void apply_reflector(const std::vector<double>& v, double beta, double* col, long len) {
  if (beta == 0.0) return;
  const double s = beta * dot(v.data(), col, len);
  for (long i = 0; i < len; ++i) col[i] -= s * v[i];
}

// back-substitution with the upper triangle stored in the leading k columns
// of w: solves R x = b in place
void solve_upper(const Matrix& w, long k, double* b) {
  for (long j = k - 1; j >= 0; --j) {
    b[j] /= w(j, j);
    const double xj = b[j];
    const double* cj = w.col(j);
    for (long i = 0; i < j; ++i) b[i] -= cj[i] * xj;
  }
}

void one_sided_jacobi(Matrix& g, Matrix* v) {
  const long p = g.rows();
  const long q = g.cols();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (long i = 0; i < q - 1; ++i) {
      for (long j = i + 1; j < q; ++j) {
        double* gi = g.col(i);
        double* gj = g.col(j);
        const double aii = dot(gi, gi, p);
        const double ajj = dot(gj, gj, p);
        const double aij = dot(gi, gj, p);
        if (aii == 0.0 || ajj == 0.0) continue;
        if (std::fabs(aij) <= 1e-15 * std::sqrt(aii * ajj)) continue;
        rotated = true;
        const double tau = (ajj - aii) / (2.0 * aij);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * cs;
        for (long r = 0; r < p; ++r) {
          const double a = gi[r], b = gj[r];
          gi[r] = cs * a - sn * b;
          gj[r] = sn * a + cs * b;
        }
        if (v) {
          double* vi = v->col(i);
          double* vj = v->col(j);
          for (long r = 0; r < v->rows(); ++r) {
            const double a = vi[r], b = vj[r];
            vi[r] = cs * a - sn * b;
            vj[r] = sn * a + cs * b;
          }
        }
      }
    }
    if (!rotated) break;
  }
}

// plain Householder QR; returns the reflector set so Q^T can be applied to
// right-hand sides, and optionally forms the thin Q
struct PlainQr {
  std::vector<std::vector<double>> vs;
  std::vector<double> betas;

  // factors w in place (upper triangle = R)
  void factor(Matrix& w) {
    const long n = w.rows();
    const long q = std::min(n, w.cols());
    vs.resize(q);
    betas.resize(q);
    std::vector<double> v;
    for (long t = 0; t < q; ++t) {
      double* wt = w.col(t);
      const long len = n - t;
      Reflector h = make_reflector(wt + t, len, v);
      vs[t] = v;
      betas[t] = h.beta;
      wt[t] = h.alpha;
      std::fill(wt + t + 1, wt + n, 0.0);
      for (long c = t + 1; c < w.cols(); ++c) apply_reflector(v, h.beta, w.col(c) + t, len);
    }
  }

  void apply_qt(Matrix& f) const {
    for (size_t t = 0; t < vs.size(); ++t)
      for (long c = 0; c < f.cols(); ++c)
        apply_reflector(vs[t], betas[t], f.col(c) + t, static_cast<long>(vs[t].size()));
  }

  Matrix thin_q(long n) const {
    const long q = static_cast<long>(vs.size());
    Matrix out(n, q);
    for (long j = 0; j < q; ++j) out(j, j) = 1.0;
    for (long t = q - 1; t >= 0; --t)
      for (long c = 0; c < q; ++c)
        apply_reflector(vs[t], betas[t], out.col(c) + t, static_cast<long>(vs[t].size()));
    return out;
  }
};

}  // namespace

SrrqrResult srrqr(Matrix a, double entry_bound, Stop stop, bool want_q) {
  if (a.empty()) throw std::invalid_argument("srrqr: empty matrix");
  if (!a.all_finite()) throw std::invalid_argument("srrqr: non-finite entries");
  if (entry_bound < 1.0) throw std::invalid_argument("srrqr: entry bound must be >= 1");
  const long n = a.rows();
  const long m = a.cols();
  const long kcap = std::min(n, m);
  long target = kcap;
  if (stop.kind == Stop::Kind::FixedRank) {
    if (stop.rank < 1) throw std::invalid_argument("srrqr: fixed rank must be >= 1");
    target = std::min(stop.rank, kcap);
  } else if (stop.eps < 0.0 || !std::isfinite(stop.eps)) {
    throw std::invalid_argument("srrqr: threshold must be finite and >= 0");
  }
  const bool threshold_mode = stop.kind == Stop::Kind::Threshold;

  Matrix& w = a;
  std::vector<long> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> norms2(m), norms_ref(m);
  Matrix q;
  if (want_q) q = Matrix::identity(n);

  long k = 0;
  std::vector<double> v;

  auto recompute_norms = [&]() {
    const int nt = num_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (long c = k; c < m; ++c) {
      const double* wc = w.col(c);
      double s = 0.0;
      for (long i = k; i < n; ++i) s += wc[i] * wc[i];
      norms2[c] = s;
      norms_ref[c] = s;
    }
  };

  auto apply_q_update = [&](long t, const std::vector<double>& refl, double beta) {
    if (!want_q || beta == 0.0) return;
    // Q := Q * H with H acting on rows t.. of the transformed space
    const long len = static_cast<long>(refl.size());
    for (long r = 0; r < n; ++r) {
      double s = 0.0;
      for (long i = 0; i < len; ++i) s += q(r, t + i) * refl[i];
      s *= beta;
      for (long i = 0; i < len; ++i) q(r, t + i) -= s * refl[i];
    }
  };

  auto swap_entries = [&](long c1, long c2) {
    w.swap_cols(c1, c2);
    std::swap(perm[c1], perm[c2]);
    std::swap(norms2[c1], norms2[c2]);
    std::swap(norms_ref[c1], norms_ref[c2]);
  };

  // one pivoted elimination step on column `piv`
  auto householder_step = [&](long piv) {
    swap_entries(k, piv);
    double* wk = w.col(k);
    const long len = n - k;
    Reflector h = make_reflector(wk + k, len, v);
    wk[k] = h.alpha;
    std::fill(wk + k + 1, wk + n, 0.0);
    const int nt = num_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (long c = k + 1; c < m; ++c) {
      double* wc = w.col(c);
      apply_reflector(v, h.beta, wc + k, len);
      const double r = wc[k];
      double s = norms2[c] - r * r;
      if (s < 0.0) s = 0.0;
      if (s <= 1e-12 * norms_ref[c]) {
        s = 0.0;
        for (long i = k + 1; i < n; ++i) s += wc[i] * wc[i];
        norms_ref[c] = s;
      }
      norms2[c] = s;
    }
    apply_q_update(k, v, h.beta);
    ++k;
  };

  auto argmax_norm = [&]() {
    long best = k;
    double bn = norms2[k];
    for (long c = k + 1; c < m; ++c)
      if (norms2[c] > bn) {
        bn = norms2[c];
        best = c;
      }
    return best;
  };

  // greedy pivoted QR until the stop condition
  auto run_phase1 = [&]() {
    recompute_norms();
    while (k < target) {
      long piv = argmax_norm();
      if (threshold_mode && std::sqrt(std::max(0.0, norms2[piv])) <= stop.eps) {
        // candidate stop: confirm against exactly recomputed norms
        recompute_norms();
        piv = argmax_norm();
        if (std::sqrt(std::max(0.0, norms2[piv])) <= stop.eps) break;
      }
      if (norms2[piv] == 0.0) break;  // exact rank exhausted
      householder_step(piv);
    }
  };

  run_phase1();

  // swap phase + (in threshold mode) rank extension until both bounds hold
  Matrix t_mat;
  std::vector<double> gammas;
  int swap_count = 0;
  double max_t = 0.0;
  const int max_swaps = static_cast<int>(3 * kcap + 30);

  std::vector<double> rowinv_norm;
  auto compute_swap_state = [&]() {
    const long mk = m - k;
    t_mat = Matrix(k, mk);
    const int nt = num_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (long c = 0; c < mk; ++c) {
      double* tc = t_mat.col(c);
      const double* wc = w.col(k + c);
      std::memcpy(tc, wc, sizeof(double) * k);
      solve_upper(w, k, tc);
    }
    gammas.assign(mk, 0.0);
    for (long c = 0; c < mk; ++c) {
      const double* wc = w.col(k + c);
      gammas[c] = norm2(wc + k, n - k);
    }
    // row norms of R11^{-1}
    rowinv_norm.assign(k, 0.0);
    std::vector<double> e(k);
    for (long j = 0; j < k; ++j) {
      std::fill(e.begin(), e.end(), 0.0);
      e[j] = 1.0;
      solve_upper(w, k, e.data());
      for (long i = 0; i < k; ++i) rowinv_norm[i] += e[i] * e[i];
    }
    for (long i = 0; i < k; ++i) rowinv_norm[i] = std::sqrt(rowinv_norm[i]);
  };

  auto retriangularize = [&](long from) {
    std::vector<double> refl;
    for (long t = from; t < k; ++t) {
      double* wt = w.col(t);
      const long len = n - t;
      Reflector h = make_reflector(wt + t, len, refl);
      wt[t] = h.alpha;
      std::fill(wt + t + 1, wt + n, 0.0);
      const int nt = num_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
      for (long c = t + 1; c < m; ++c) apply_reflector(refl, h.beta, w.col(c) + t, len);
      apply_q_update(t, refl, h.beta);
    }
  };

  while (true) {
    if (k == 0 || k == m) break;
    compute_swap_state();
    max_t = max_abs(t_mat);
    // largest determinant gain among all (selected, rejected) exchanges
    double best_rho2 = 0.0;
    long best_i = -1, best_c = -1;
    for (long c = 0; c < m - k; ++c) {
      const double* tc = t_mat.col(c);
      for (long i = 0; i < k; ++i) {
        const double gw = gammas[c] * rowinv_norm[i];
        const double rho2 = tc[i] * tc[i] + gw * gw;
        if (rho2 > best_rho2) {
          best_rho2 = rho2;
          best_i = i;
          best_c = c;
        }
      }
    }
    const double bound = entry_bound * (1.0 + kEntrySlack);
    if (best_rho2 > bound * bound && swap_count < max_swaps) {
      swap_entries(best_i, k + best_c);
      retriangularize(best_i);
      ++swap_count;
      continue;
    }
    if (threshold_mode && k < target) {
      // swaps may have pushed rejected columns above the threshold
      double worst = 0.0;
      for (double g : gammas) worst = std::max(worst, g);
      if (worst > stop.eps) {
        run_phase1();
        continue;
      }
    }
    break;
  }

  if (k > 0 && k == m) {
    // nothing rejected: no T, no residuals
    t_mat = Matrix(k, 0);
    gammas.clear();
    max_t = 0.0;
  } else if (k == 0) {
    t_mat = Matrix(0, m);
    gammas.resize(m);
    for (long c = 0; c < m; ++c) gammas[c] = column_norm(w, c);
  }

  SrrqrResult res;
  res.perm = std::move(perm);
  res.rank = k;
  res.swap_count = swap_count;
  res.max_t = max_t;
  res.residual_col_norms = std::move(gammas);
  res.r11 = Matrix(k, k);
  for (long j = 0; j < k; ++j)
    for (long i = 0; i <= j; ++i) res.r11(i, j) = w(i, j);
  res.r12 = Matrix(k, m - k);
  for (long j = k; j < m; ++j)
    for (long i = 0; i < k; ++i) res.r12(i, j - k) = w(i, j);
  res.t = std::move(t_mat);
  if (want_q) {
    res.q = Matrix(n, k);
    for (long j = 0; j < k; ++j) std::memcpy(res.q.col(j), q.col(j), sizeof(double) * n);
  }
  return res;
}

IdResult id_rows(const Matrix& a, double entry_bound, Stop stop) {
  SrrqrResult r = srrqr(a.transpose(), entry_bound, stop, false);
  const long n = a.rows();
  const long k = r.rank;
  IdResult out;
  out.skeleton.assign(r.perm.begin(), r.perm.begin() + k);
  out.u = Matrix(n, k);
  for (long l = 0; l < k; ++l) out.u(r.perm[l], l) = 1.0;
  for (long j = 0; j + k < n; ++j) {
    const long row = r.perm[k + j];
    for (long l = 0; l < k; ++l) out.u(row, l) = r.t(l, j);
  }
  out.entry_bound = entry_bound;
  if (stop.kind == Stop::Kind::Threshold) {
    out.epsilon = stop.eps;
  } else {
    double worst = 0.0;
    for (double g : r.residual_col_norms) worst = std::max(worst, g);
    out.epsilon = worst;
  }
  return out;
}

Matrix ls_solve(const Matrix& m, const Matrix& f, bool* rank_deficient, double rank_tol) {
  if (m.rows() != f.rows()) throw std::invalid_argument("ls_solve: row mismatch");
  if (m.rows() < m.cols()) throw std::invalid_argument("ls_solve: system is underdetermined");
  const long p = m.rows();
  const long q = m.cols();
  Matrix w = m;
  Matrix g = f;
  std::vector<long> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> norms2(q);
  for (long c = 0; c < q; ++c) norms2[c] = dot(w.col(c), w.col(c), p);
  const double scale0 = std::sqrt(*std::max_element(norms2.begin(), norms2.end()));

  // pivoted QR of m, Q^T applied to the right-hand sides as it forms
  long rank = 0;
  std::vector<double> v;
  for (long t = 0; t < q; ++t) {
    long piv = t;
    for (long c = t + 1; c < q; ++c)
      if (norms2[c] > norms2[piv]) piv = c;
    if (std::sqrt(std::max(0.0, norms2[piv])) <= rank_tol * scale0) break;
    if (norms2[piv] == 0.0) break;
    w.swap_cols(t, piv);
    std::swap(perm[t], perm[piv]);
    std::swap(norms2[t], norms2[piv]);
    double* wt = w.col(t);
    const long len = p - t;
    Reflector h = make_reflector(wt + t, len, v);
    wt[t] = h.alpha;
    std::fill(wt + t + 1, wt + p, 0.0);
    for (long c = t + 1; c < q; ++c) {
      double* wc = w.col(c);
      apply_reflector(v, h.beta, wc + t, len);
      norms2[c] = std::max(0.0, norms2[c] - wc[t] * wc[t]);
    }
    for (long c = 0; c < g.cols(); ++c) apply_reflector(v, h.beta, g.col(c) + t, len);
    ++rank;
  }

  const bool deficient = rank < q;
  if (rank_deficient) *rank_deficient = deficient;
  Matrix sol(q, f.cols());
  if (!deficient) {
    for (long c = 0; c < g.cols(); ++c) {
      std::vector<double> b(g.col(c), g.col(c) + q);
      solve_upper(w, q, b.data());
      for (long i = 0; i < q; ++i) sol(perm[i], c) = b[i];
    }
    return sol;
  }

  // minimum-norm solution on the revealed rank via a small Jacobi SVD of the
  // leading trapezoid [R11 R12]
  Matrix trap(rank, q);
  for (long j = 0; j < q; ++j)
    for (long i = 0; i < std::min(rank, j + 1); ++i) trap(i, j) = w(i, j);
  Matrix gt = trap.transpose();  // q x rank
  Matrix vv = Matrix::identity(rank);
  one_sided_jacobi(gt, &vv);
  std::vector<double> sig(rank);
  for (long j = 0; j < rank; ++j) sig[j] = column_norm(gt, j);
  const double smax = *std::max_element(sig.begin(), sig.end());
  for (long c = 0; c < g.cols(); ++c) {
    // z = V_t Sigma^+ U_t^T g ; here trap^T = gt * diag-normalized, so
    // trap = sum sig_j (vv col j) (gt col j / sig_j)^T
    std::vector<double> z(q, 0.0);
    for (long j = 0; j < rank; ++j) {
      if (sig[j] <= kRankTol * smax) continue;
      const double coef = dot(vv.col(j), g.col(c), rank) / sig[j];
      const double* uj = gt.col(j);
      for (long i = 0; i < q; ++i) z[i] += coef * uj[i] / sig[j];
    }
    for (long i = 0; i < q; ++i) sol(perm[i], c) = z[i];
  }
  return sol;
}

Matrix ls_project(const Matrix& basis_rows, const Matrix& a, bool* rank_deficient) {
  if (basis_rows.cols() != a.cols()) throw std::invalid_argument("ls_project: column mismatch");
  if (basis_rows.rows() > basis_rows.cols())
    throw std::invalid_argument("ls_project: more basis rows than columns");
  return ls_solve(basis_rows.transpose(), a.transpose(), rank_deficient).transpose();
}

namespace {

// shared SVD core: returns full decomposition of a
SvdResult svd_all(const Matrix& a) {
  const bool transposed = a.rows() < a.cols();
  Matrix g = transposed ? a.transpose() : a;
  const long p = g.rows();
  const long q = g.cols();
  PlainQr qr;
  Matrix q1;
  if (p > q) {
    qr.factor(g);
    q1 = qr.thin_q(p);
    Matrix r(q, q);
    for (long j = 0; j < q; ++j)
      for (long i = 0; i <= j; ++i) r(i, j) = g(i, j);
    g = std::move(r);
  }
  Matrix vmat = Matrix::identity(q);
  one_sided_jacobi(g, &vmat);
  std::vector<long> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sig(q);
  for (long j = 0; j < q; ++j) sig[j] = column_norm(g, j);
  std::stable_sort(order.begin(), order.end(), [&](long x, long y) { return sig[x] > sig[y]; });

  Matrix usmall(g.rows(), q);
  std::vector<double> sorted_sig(q);
  Matrix vsorted(q, q);
  for (long j = 0; j < q; ++j) {
    const long src = order[j];
    sorted_sig[j] = sig[src];
    const double* gc = g.col(src);
    double* uc = usmall.col(j);
    if (sig[src] > 0.0)
      for (long i = 0; i < g.rows(); ++i) uc[i] = gc[i] / sig[src];
    std::memcpy(vsorted.col(j), vmat.col(src), sizeof(double) * q);
  }
  Matrix ufull = (p > q) ? matmul(q1, usmall) : std::move(usmall);

  SvdResult out;
  out.sigma = std::move(sorted_sig);
  if (!transposed) {
    out.u = std::move(ufull);
    out.v = std::move(vsorted);
  } else {
    out.u = std::move(vsorted);
    out.v = std::move(ufull);
  }
  return out;
}

}  // namespace

SvdResult truncated_svd(const Matrix& a, long r) {
  if (a.empty()) throw std::invalid_argument("truncated_svd: empty matrix");
  if (r < 1 || r > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("truncated_svd: rank out of range");
  SvdResult all = svd_all(a);
  SvdResult out;
  out.sigma.assign(all.sigma.begin(), all.sigma.begin() + r);
  out.u = Matrix(a.rows(), r);
  out.v = Matrix(a.cols(), r);
  for (long j = 0; j < r; ++j) {
    std::memcpy(out.u.col(j), all.u.col(j), sizeof(double) * a.rows());
    std::memcpy(out.v.col(j), all.v.col(j), sizeof(double) * a.cols());
  }
  return out;
}

std::vector<double> singular_values(const Matrix& a) {
  const bool transposed = a.rows() < a.cols();
  Matrix g = transposed ? a.transpose() : a;
  const long p = g.rows();
  const long q = g.cols();
  if (p > q) {
    PlainQr qr;
    qr.factor(g);
    Matrix r(q, q);
    for (long j = 0; j < q; ++j)
      for (long i = 0; i <= j; ++i) r(i, j) = g(i, j);
    g = std::move(r);
  }
  one_sided_jacobi(g, nullptr);
  std::vector<double> sig(q);
  for (long j = 0; j < q; ++j) sig[j] = column_norm(g, j);
  std::sort(sig.begin(), sig.end(), std::greater<double>());
  return sig;
}

AcaResult aca(const EntryOracle& row_oracle, const EntryOracle& col_oracle, long nrows,
              long ncols, Stop stop) {
  if (nrows < 1 || ncols < 1) throw std::invalid_argument("aca: empty matrix");
  long target = std::min(nrows, ncols);
  if (stop.kind == Stop::Kind::FixedRank) {
    if (stop.rank < 1 || stop.rank > target) throw std::invalid_argument("aca: bad fixed rank");
    target = stop.rank;
  }
  std::vector<std::vector<double>> us, vs;
  std::vector<long> row_piv, col_piv;
  std::vector<char> row_used(nrows, 0), col_used(ncols, 0);
  std::vector<double> row(ncols), col(nrows);
  bool zero_stop = false;
  double pivot_scale = 0.0;
  double fro2 = 0.0;  // running ||S_k||_F^2

  long i = 0;  // lowest index first
  while (static_cast<long>(us.size()) < target) {
    row_oracle(i, row.data());
    for (size_t l = 0; l < us.size(); ++l) {
      const double w = us[l][i];
      if (w == 0.0) continue;
      const double* vl = vs[l].data();
      for (long c = 0; c < ncols; ++c) row[c] -= w * vl[c];
    }
    long j = -1;
    double best = -1.0;
    for (long c = 0; c < ncols; ++c)
      if (!col_used[c] && std::fabs(row[c]) > best) {
        best = std::fabs(row[c]);
        j = c;
      }
    if (j < 0) break;
    const double pivot = row[j];
    if (pivot_scale == 0.0) pivot_scale = std::fabs(pivot);
    if (std::fabs(pivot) <= 1e-14 * pivot_scale) {
      zero_stop = true;
      break;
    }
    pivot_scale = std::max(pivot_scale, std::fabs(pivot));

    std::vector<double> vk(ncols);
    for (long c = 0; c < ncols; ++c) vk[c] = row[c] / pivot;
    col_oracle(j, col.data());
    for (size_t l = 0; l < us.size(); ++l) {
      const double w = vs[l][j];
      if (w == 0.0) continue;
      const double* ul = us[l].data();
      for (long r = 0; r < nrows; ++r) col[r] -= w * ul[r];
    }
    std::vector<double> uk = col;

    row_used[i] = 1;
    col_used[j] = 1;
    row_piv.push_back(i);
    col_piv.push_back(j);

    if (stop.kind == Stop::Kind::Threshold) {
      const double nu = norm2(uk.data(), nrows);
      const double nv = norm2(vk.data(), ncols);
      double cross = 0.0;
      for (size_t l = 0; l < us.size(); ++l)
        cross += dot(us[l].data(), uk.data(), nrows) * dot(vs[l].data(), vk.data(), ncols);
      fro2 += nu * nu * nv * nv + 2.0 * cross;
      us.push_back(std::move(uk));
      vs.push_back(std::move(vk));
      if (nu * nv <= stop.eps * std::sqrt(std::max(fro2, 1e-300))) break;
    } else {
      us.push_back(std::move(uk));
      vs.push_back(std::move(vk));
    }

    // next pivot row: largest entry of the residual column among unused rows
    long next = -1;
    double bu = -1.0;
    const std::vector<double>& lastu = us.back();
    for (long r = 0; r < nrows; ++r)
      if (!row_used[r] && std::fabs(lastu[r]) > bu) {
        bu = std::fabs(lastu[r]);
        next = r;
      }
    if (next < 0) break;
    i = next;
  }

  AcaResult res;
  res.rank = static_cast<long>(us.size());
  res.row_pivots = std::move(row_piv);
  res.col_pivots = std::move(col_piv);
  res.zero_pivot_stop = zero_stop;
  res.u = Matrix(nrows, res.rank);
  res.v = Matrix(res.rank, ncols);
  for (long l = 0; l < res.rank; ++l) {
    std::memcpy(res.u.col(l), us[l].data(), sizeof(double) * nrows);
    for (long c = 0; c < ncols; ++c) res.v(l, c) = vs[l][c];
  }
  return res;
}

}  // namespace kernelskel
