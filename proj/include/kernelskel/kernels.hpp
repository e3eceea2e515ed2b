#ifndef KERNELSKEL_KERNELS_HPP
#define KERNELSKEL_KERNELS_HPP

#include <memory>
#include <string>
#include <vector>

#include "kernelskel/geometry.hpp"
#include "kernelskel/matrix.hpp"

namespace kernelskel {

using KernelMatrix = Matrix;

// Rank-limited test kernel K(x,y) = sum_i sign_i 2^-i psi_i(x) phi_i(y) with
// tensor-product Chebyshev factors mapped onto fixed source/target boxes.
// Every assembled block has exact rank <= rank.
struct DegenerateData {
  long rank;
  uint64_t seed;
  Box source_box, target_box;
  std::vector<std::vector<int>> exponents;  // graded multi-indices, one per term
  std::vector<double> weight;               // sign_i * 2^-i
};

class Kernel {
 public:
  enum class Family { InverseDistance, Multiquadric, Degenerate };

  static Kernel inverse_distance(int dim);
  static Kernel multiquadric(int dim);
  static Kernel degenerate(int dim, std::shared_ptr<const DegenerateData> data);

  Family family() const { return family_; }
  int dim() const { return dim_; }
  bool singular_on_diagonal() const { return family_ == Family::InverseDistance; }
  bool translation_invariant() const { return family_ != Family::Degenerate; }
  const DegenerateData& degenerate_data() const { return *degenerate_; }

  double operator()(const double* x, const double* y) const;

  // stable identity string, also the CLI spelling and the cache key part
  std::string name() const;

 private:
  Kernel(Family f, int dim) : family_(f), dim_(dim) {}
  Family family_;
  int dim_;
  std::shared_ptr<const DegenerateData> degenerate_;
};

// Dense block K(X, Y), row order follows X, column order follows Y.
// Coincident points are rejected for kernels singular on the diagonal.
Matrix assemble(const Kernel& k, const PointSet& x, const PointSet& y);

// Degenerate oracle kernel on a domain pair: psi_i live on pair.source,
// phi_i on pair.target.outer, weights 2^-i with seeded random signs.
Kernel make_degenerate(const DomainPair& pair, long r, uint64_t seed);

// Chebyshev factor matrices of a degenerate kernel: psi_at returns the
// rank x |pts| evaluation of the source factors, phi_at of the target ones
// (weights folded into phi). Used by tests as an exact low-rank oracle.
Matrix degenerate_psi(const Kernel& k, const PointSet& pts);
Matrix degenerate_phi_weighted(const Kernel& k, const PointSet& pts);

// CLI spellings: "inv-dist", "multiquadric", "degenerate:r=<r>:seed=<s>".
// Degenerate kernels need the domain pair they are built on.
Kernel parse_kernel(const std::string& name, int dim, const DomainPair* pair = nullptr);

}  // namespace kernelskel

#endif
