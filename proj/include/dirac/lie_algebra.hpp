#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dirac/linalg.hpp"
#include "dirac/rational.hpp"

namespace dirac {

using RationalMatrix = linalg::Matrix<Rational>;
using RationalVector = linalg::Vector<Rational>;
using RationalSubspace = linalg::Subspace<Rational>;

/// A finite-dimensional Lie algebra over Q given by structure constants
/// [e_i, e_j] = sum_k c^k_ij e_k. Antisymmetry is enforced on write.
class LieAlgebra {
 public:
  LieAlgebra() = default;
  LieAlgebra(std::string name, std::size_t dim);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }

  /// Sets [e_i, e_j] = value (and [e_j, e_i] = -value). i == j is rejected.
  void set_bracket(std::size_t i, std::size_t j, const RationalVector& value);

  const Rational& constant(std::size_t i, std::size_t j, std::size_t k) const {
    return constants_[(i * dim_ + j) * dim_ + k];
  }
  RationalVector basis_bracket(std::size_t i, std::size_t j) const;

  bool is_abelian() const;

  friend bool operator==(const LieAlgebra& a, const LieAlgebra& b) {
    return a.dim_ == b.dim_ && a.constants_ == b.constants_;
  }

 private:
  std::string name_;
  std::size_t dim_ = 0;
  std::vector<Rational> constants_;
};

/// Bilinear extension of the structure constants.
RationalVector bracket(const LieAlgebra& g, const RationalVector& x, const RationalVector& y);

struct JacobiReport {
  bool pass = true;
  std::optional<std::array<std::size_t, 3>> witness;  // i < j < k
  RationalVector residual;                           // Jacobiator at the witness
};

/// Evaluates [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] on all i<j<k.
JacobiReport jacobi_check(const LieAlgebra& g);

struct IdealReport {
  bool pass = true;
  std::size_t algebra_index = 0;  // e_i of the failing bracket
  RationalVector element;         // basis element v of the subspace
  RationalVector bracket_value;   // [e_i, v], not in the subspace
};

/// [e_i, v] in k for every basis e_i and basis vector v of k.
IdealReport is_ideal(const LieAlgebra& g, const RationalSubspace& k);

/// Matrix of ad_x = [x, .] in the standard basis.
RationalMatrix ad_matrix(const LieAlgebra& g, const RationalVector& x);

template <class T>
linalg::Matrix<T> ad_basis_matrix(const LieAlgebra& g, std::size_t i) {
  linalg::Matrix<T> m(g.dim(), g.dim());
  for (std::size_t j = 0; j < g.dim(); ++j)
    for (std::size_t k = 0; k < g.dim(); ++k) m(k, j) = ScalarTraits<T>::from_rational(g.constant(i, j, k));
  return m;
}

/// ad_{e_i}(A) contained in A for all i, tested through image dimensions.
/// This is the infinitesimal normality criterion and deliberately does not
/// share code with is_ideal.
template <class T>
bool is_ad_invariant(const LieAlgebra& g, const linalg::Subspace<T>& a, double tol = ScalarTraits<T>::default_tolerance) {
  if (a.ambient_dim() != g.dim()) throw DimensionError("is_ad_invariant: ambient mismatch");
  for (std::size_t i = 0; i < g.dim(); ++i) {
    const auto moved = linalg::image(ad_basis_matrix<T>(g, i), a);
    for (std::size_t r = 0; r < moved.dim(); ++r)
      if (linalg::max_abs(a.reduce(moved.basis_vector(r))) > tol) return false;
  }
  return true;
}

struct LieQuotient {
  LieAlgebra algebra;
  RationalMatrix projection;  // g -> g/k
  RationalMatrix section;     // g/k -> g, right inverse of projection
};

/// Lie algebra structure on g/k in the canonical complement basis of k.
/// Throws StructureError (with the ideal witness) when k is not an ideal.
LieQuotient quotient(const LieAlgebra& g, const RationalSubspace& k);

namespace catalog {
LieAlgebra abelian(std::size_t n);
LieAlgebra heis3();  // [e0,e1] = e2
LieAlgebra aff1();   // [e0,e1] = e1
LieAlgebra sl2();    // basis (h,e,f): [h,e] = 2e, [h,f] = -2f, [e,f] = h
LieAlgebra so3();    // [e0,e1] = e2 and cyclic

/// "heis3", "aff1", "sl2", "so3", "abelianN" / "abelian_N". Throws InputError.
LieAlgebra by_name(const std::string& name);
std::vector<std::string> names();
}  // namespace catalog

}  // namespace dirac
