#include "kernelskel/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "kernelskel/util.hpp"

namespace kernelskel {

namespace {

constexpr double kCoincidentTol = 1e-14;

inline double dist(const double* x, const double* y, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    const double t = x[k] - y[k];
    s += t * t;
  }
  return std::sqrt(s);
}

// T_0..T_deg at t via the three-term recurrence
inline void cheb_values(double t, int deg, double* out) {
  out[0] = 1.0;
  if (deg >= 1) out[1] = t;
  for (int i = 2; i <= deg; ++i) out[i] = 2.0 * t * out[i - 1] - out[i - 2];
}

inline double to_unit(const Box& b, int axis, double v) {
  return (2.0 * v - b.lo[axis] - b.hi[axis]) / b.edge(axis);
}

// graded enumeration of multi-indices: total degree 0, 1, 2, ...
std::vector<std::vector<int>> graded_multi_indices(int dim, long count) {
  std::vector<std::vector<int>> out;
  for (int total = 0; static_cast<long>(out.size()) < count; ++total) {
    std::vector<int> idx(dim, 0);
    // enumerate all idx with sum == total, lexicographic
    std::function<void(int, int)> rec = [&](int axis, int remaining) {
      if (static_cast<long>(out.size()) >= count) return;
      if (axis == dim - 1) {
        idx[axis] = remaining;
        out.push_back(idx);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        idx[axis] = v;
        rec(axis + 1, remaining - v);
      }
    };
    rec(0, total);
    if (total > 4096) throw std::runtime_error("graded_multi_indices: runaway enumeration");
  }
  return out;
}

// rank x n evaluation of tensor Chebyshev terms on a box
Matrix eval_tensor_cheb(const Box& box, const std::vector<std::vector<int>>& exps,
                        const PointSet& pts) {
  const int d = box.dim();
  int max_deg = 0;
  for (const auto& e : exps)
    for (int k = 0; k < d; ++k) max_deg = std::max(max_deg, e[k]);
  Matrix out(static_cast<long>(exps.size()), pts.size());
  std::vector<double> tv(static_cast<size_t>(d) * (max_deg + 1));
  for (long j = 0; j < pts.size(); ++j) {
    const double* p = pts.point(j);
    for (int k = 0; k < d; ++k) cheb_values(to_unit(box, k, p[k]), max_deg, &tv[k * (max_deg + 1)]);
    double* col = out.col(j);
    for (size_t i = 0; i < exps.size(); ++i) {
      double v = 1.0;
      for (int k = 0; k < d; ++k) v *= tv[k * (max_deg + 1) + exps[i][k]];
      col[i] = v;
    }
  }
  return out;
}

}  // namespace

Kernel Kernel::inverse_distance(int dim) { return Kernel(Family::InverseDistance, dim); }

Kernel Kernel::multiquadric(int dim) { return Kernel(Family::Multiquadric, dim); }

Kernel Kernel::degenerate(int dim, std::shared_ptr<const DegenerateData> data) {
  Kernel k(Family::Degenerate, dim);
  k.degenerate_ = std::move(data);
  return k;
}

double Kernel::operator()(const double* x, const double* y) const {
  switch (family_) {
    case Family::InverseDistance:
      return 1.0 / dist(x, y, dim_);
    case Family::Multiquadric: {
      const double r = dist(x, y, dim_);
      return std::sqrt(1.0 + r * r);
    }
    case Family::Degenerate: {
      const auto& dd = *degenerate_;
      const int d = dim_;
      int max_deg = 0;
      for (const auto& e : dd.exponents)
        for (int k = 0; k < d; ++k) max_deg = std::max(max_deg, e[k]);
      double tx[3][64], ty[3][64];
      for (int k = 0; k < d; ++k) {
        cheb_values(to_unit(dd.source_box, k, x[k]), max_deg, tx[k]);
        cheb_values(to_unit(dd.target_box, k, y[k]), max_deg, ty[k]);
      }
      double s = 0.0;
      for (long i = 0; i < dd.rank; ++i) {
        double term = dd.weight[i];
        for (int k = 0; k < d; ++k)
          term *= tx[k][dd.exponents[i][k]] * ty[k][dd.exponents[i][k]];
        s += term;
      }
      return s;
    }
  }
  return 0.0;
}

std::string Kernel::name() const {
  switch (family_) {
    case Family::InverseDistance:
      return "inv-dist";
    case Family::Multiquadric:
      return "multiquadric";
    case Family::Degenerate: {
      std::ostringstream os;
      os << "degenerate:r=" << degenerate_->rank << ":seed=" << degenerate_->seed;
      return os.str();
    }
  }
  return "?";
}

Matrix assemble(const Kernel& k, const PointSet& x, const PointSet& y) {
  if (x.dim != k.dim() || y.dim != k.dim())
    throw std::invalid_argument("assemble: kernel/point dimension mismatch");
  const long n = x.size();
  const long m = y.size();
  if (n == 0 || m == 0) throw std::invalid_argument("assemble: empty point set");

  if (k.family() == Kernel::Family::Degenerate) {
    // rank-r product form, assembled as Psi^T * (weighted Phi)
    Matrix psi = degenerate_psi(k, x);
    Matrix phi = degenerate_phi_weighted(k, y);
    return matmul(psi, phi, true, false);
  }

  Matrix a(n, m);
  const int d = k.dim();
  const bool singular = k.singular_on_diagonal();
  const bool inv = k.family() == Kernel::Family::InverseDistance;
  long bad_i = -1, bad_j = -1;
  const int nt = num_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (long j = 0; j < m; ++j) {
    const double* py = y.point(j);
    double* col = a.col(j);
    for (long i = 0; i < n; ++i) {
      const double r = dist(x.point(i), py, d);
      if (singular && r < kCoincidentTol) {
        bad_i = i;
        bad_j = j;
        col[i] = 0.0;
        continue;
      }
      col[i] = inv ? 1.0 / r : std::sqrt(1.0 + r * r);
    }
  }
  if (bad_i >= 0) {
    std::ostringstream os;
    os << "assemble: coincident points for a singular kernel at X[" << bad_i << "], Y[" << bad_j
       << "]";
    throw std::invalid_argument(os.str());
  }
  return a;
}

Kernel make_degenerate(const DomainPair& pair, long r, uint64_t seed) {
  if (r < 1) throw std::invalid_argument("make_degenerate: rank must be >= 1");
  auto data = std::make_shared<DegenerateData>();
  data->rank = r;
  data->seed = seed;
  data->source_box = pair.source;
  data->target_box = pair.target.outer;
  data->exponents = graded_multi_indices(pair.dim(), r);
  data->weight.resize(r);
  Xoshiro256ss rng(seed);
  for (long i = 0; i < r; ++i) {
    const double sign = (rng.next() & 1) ? 1.0 : -1.0;
    data->weight[i] = sign * std::ldexp(1.0, -static_cast<int>(i + 1));  // 2^-(i+1)
  }
  return Kernel::degenerate(pair.dim(), std::move(data));
}

Matrix degenerate_psi(const Kernel& k, const PointSet& pts) {
  if (k.family() != Kernel::Family::Degenerate)
    throw std::invalid_argument("degenerate_psi: not a degenerate kernel");
  const auto& dd = k.degenerate_data();
  return eval_tensor_cheb(dd.source_box, dd.exponents, pts);
}

Matrix degenerate_phi_weighted(const Kernel& k, const PointSet& pts) {
  if (k.family() != Kernel::Family::Degenerate)
    throw std::invalid_argument("degenerate_phi_weighted: not a degenerate kernel");
  const auto& dd = k.degenerate_data();
  Matrix phi = eval_tensor_cheb(dd.target_box, dd.exponents, pts);
  for (long j = 0; j < phi.cols(); ++j) {
    double* col = phi.col(j);
    for (long i = 0; i < phi.rows(); ++i) col[i] *= dd.weight[i];
  }
  return phi;
}

Kernel parse_kernel(const std::string& name, int dim, const DomainPair* pair) {
  if (name == "inv-dist") return Kernel::inverse_distance(dim);
  if (name == "multiquadric") return Kernel::multiquadric(dim);
  if (name.rfind("degenerate:", 0) == 0) {
    long r = 0;
    unsigned long long seed = 0;
    if (std::sscanf(name.c_str(), "degenerate:r=%ld:seed=%llu", &r, &seed) != 2)
      throw std::invalid_argument("parse_kernel: expected degenerate:r=<r>:seed=<s>");
    if (!pair) throw std::invalid_argument("parse_kernel: degenerate kernel needs a domain pair");
    return make_degenerate(*pair, r, seed);
  }
  throw std::invalid_argument("parse_kernel: unknown kernel '" + name + "'");
}

}  // namespace kernelskel
