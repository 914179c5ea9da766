#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirac/lie_algebra.hpp"

namespace dirac {

/// Λ²g in the basis {e_j ∧ e_k : j < k}, ordered lexicographically.
std::size_t wedge_dim(std::size_t n);
std::size_t wedge_index(std::size_t n, std::size_t j, std::size_t k);  // requires j < k
std::vector<std::pair<std::size_t, std::size_t>> wedge_pairs(std::size_t n);

/// Antisymmetric n×n matrix with entry (j,k) = coefficient of e_j ∧ e_k.
RationalMatrix wedge_to_matrix(std::size_t n, const RationalVector& w);
RationalVector matrix_to_wedge(const RationalMatrix& m);

/// ad_x acting on Λ²g as a derivation: [x,u]∧v + u∧[x,v].
RationalVector ad_on_wedge(const LieAlgebra& g, const RationalVector& x, const RationalVector& w);

/// Linear map δ : g -> Λ²g, row i holding δ(e_i).
class Cobracket {
 public:
  Cobracket() = default;
  explicit Cobracket(LieAlgebra algebra);
  Cobracket(LieAlgebra algebra, RationalMatrix coefficients);

  const LieAlgebra& algebra() const { return algebra_; }
  std::size_t dim() const { return algebra_.dim(); }
  const RationalMatrix& coefficients() const { return coefficients_; }

  void set(std::size_t i, std::size_t j, std::size_t k, const Rational& value);  // j < k
  const Rational& get(std::size_t i, std::size_t j, std::size_t k) const;
  RationalVector of_basis(std::size_t i) const { return coefficients_.row(i); }
  RationalVector apply(const RationalVector& x) const;

  friend bool operator==(const Cobracket& a, const Cobracket& b) {
    return a.algebra_ == b.algebra_ && a.coefficients_ == b.coefficients_;
  }

 private:
  LieAlgebra algebra_;
  RationalMatrix coefficients_;
};

/// Lie bracket on g* transposed from δ: [f^j, f^k] = sum_i d^{jk}_i f^i.
LieAlgebra dual_bracket(const Cobracket& cb);

/// (g*, δ*) where δ* is the transpose of the bracket of g.
Cobracket dual_bialgebra(const Cobracket& cb);

struct CocycleReport {
  bool pass = true;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // i < j
  RationalVector residual;                                     // δ[e_i,e_j] - (ad_i δe_j - ad_j δe_i)
};

/// δ([x,y]) = ad_x δ(y) - ad_y δ(x) on all basis pairs.
CocycleReport cocycle_check(const Cobracket& cb);

struct BialgebraReport {
  bool pass = true;
  JacobiReport algebra_jacobi;
  JacobiReport dual_jacobi;
  CocycleReport cocycle;
};

BialgebraReport bialgebra_check(const Cobracket& cb);

struct InfinitesimalDataReport {
  bool pass = true;
  IdealReport ideal;
  bool quotient_matches = false;
  BialgebraReport bialgebra;
  std::string failure;  // first failing conjunct, empty on pass
};

/// k is an ideal, g/k equals the cobracket's algebra in the canonical quotient
/// basis, and the cobracket is a bialgebra. Throws DimensionError when
/// dim cb != dim g - dim k.
InfinitesimalDataReport infinitesimal_data_check(const LieAlgebra& g, const RationalSubspace& k, const Cobracket& cb);

/// δ(x) = ad_x r.
Cobracket coboundary(const LieAlgebra& g, const RationalVector& r);

/// Dense tensor T^{abc} of [r12,r13] + [r12,r23] + [r13,r23] (the Schouten
/// square of r up to a constant), index (a*n + b)*n + c.
std::vector<Rational> schouten_square(const LieAlgebra& g, const RationalVector& r);

/// ad_x T = 0 for every basis x, with ad acting on g⊗g⊗g as a derivation.
bool is_ad_invariant_trivector(const LieAlgebra& g, const std::vector<Rational>& t);

/// δ_h given δ on an isomorphic algebra: δ_h(M u) = (M∧M) δ(u), for an
/// invertible M : source -> target. `target` provides the algebra of the result.
Cobracket transport(const Cobracket& cb, const RationalMatrix& m, const LieAlgebra& target);

namespace catalog {
/// abelian2 with δ(e0) = e0∧e1, whose dual bracket [f0,f1] = f0 is a copy of aff1.
Cobracket abelian2_aff1_dual();
/// aff1 with δ(e1) = e0∧e1.
Cobracket aff1_standard();
/// sl2 with δ(x) = ad_x (e∧f).
Cobracket sl2_standard();
/// heis3 with δ(e2) = e0∧e1; fails the cocycle condition.
Cobracket heis3_broken();

Cobracket bialgebra_by_name(const std::string& name);
std::vector<std::string> bialgebra_names();
}  // namespace catalog

}  // namespace dirac
