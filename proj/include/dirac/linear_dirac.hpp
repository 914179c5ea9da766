#pragma once

// Linear Dirac structures on V = T^n: maximal isotropic subspaces of V ⊕ V*.
// Coordinates 0..n-1 are tangent, n..2n-1 cotangent. The pairing is
// <(X,a),(Y,b)> = a(Y) + b(X), without the factor 1/2.

#include <cstddef>
#include <string>
#include <vector>

#include "dirac/linalg.hpp"

namespace dirac {

template <class T>
T pairing(const linalg::Vector<T>& u, const linalg::Vector<T>& v, std::size_t n) {
  T s(0);
  for (std::size_t i = 0; i < n; ++i) s += u[n + i] * v[i] + v[n + i] * u[i];
  return s;
}

/// Largest |pairing| over basis pairs of a subspace of V ⊕ V*.
template <class T>
double isotropy_residual(const linalg::Subspace<T>& s, std::size_t n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = i; j < s.dim(); ++j)
      worst = std::max(worst, ScalarTraits<T>::magnitude(pairing(s.basis_vector(i), s.basis_vector(j), n)));
  return worst;
}

template <class T>
bool is_antisymmetric(const linalg::Matrix<T>& m, double tol = ScalarTraits<T>::default_tolerance) {
  if (m.rows() != m.cols()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      T s = m(i, j) + m(j, i);
      if (!ScalarTraits<T>::near(s, T(0), tol)) return false;
    }
  return true;
}

/// A Dirac structure on T^n. Construction validates maximality (dim = n) and
/// isotropy; both are exact for Rational.
template <class T>
class DiracSubspace {
 public:
  DiracSubspace() = default;

  DiracSubspace(std::size_t n, linalg::Subspace<T> space, double tol = ScalarTraits<T>::default_tolerance)
      : n_(n), space_(std::move(space)) {
    if (space_.ambient_dim() != 2 * n_) throw DimensionError("DiracSubspace: ambient dimension must be 2n");
    if (space_.dim() != n_)
      throw StructureError("DiracSubspace: dimension " + std::to_string(space_.dim()) + " is not n = " +
                           std::to_string(n_));
    if (isotropy_residual(space_, n_) > tol) throw StructureError("DiracSubspace: subspace is not isotropic");
  }

  std::size_t n() const { return n_; }
  const linalg::Subspace<T>& space() const { return space_; }

  friend bool operator==(const DiracSubspace& a, const DiracSubspace& b) {
    return a.n_ == b.n_ && a.space_ == b.space_;
  }

 private:
  std::size_t n_ = 0;
  linalg::Subspace<T> space_;
};

/// Result of a forward or backward image: always isotropic, Dirac only when
/// the dimension comes out right.
template <class T>
struct DiracImage {
  std::size_t n = 0;
  linalg::Subspace<T> space;
  bool is_dirac = false;

  DiracSubspace<T> as_dirac(double tol = ScalarTraits<T>::default_tolerance) const {
    return DiracSubspace<T>(n, space, tol);
  }
};

namespace detail {

template <class T>
linalg::Vector<T> concat(const linalg::Vector<T>& a, const linalg::Vector<T>& b) {
  linalg::Vector<T> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

template <class T>
linalg::Matrix<T> block2x2(const linalg::Matrix<T>& a, const linalg::Matrix<T>& b, const linalg::Matrix<T>& c,
                           const linalg::Matrix<T>& d) {
  linalg::Matrix<T> out(a.rows() + c.rows(), a.cols() + b.cols());
  auto put = [&out](const linalg::Matrix<T>& m, std::size_t r0, std::size_t c0) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out(r0 + i, c0 + j) = m(i, j);
  };
  put(a, 0, 0);
  put(b, 0, a.cols());
  put(c, a.rows(), 0);
  put(d, a.rows(), a.cols());
  return out;
}

}  // namespace detail

/// L = {(P a, a) : a in V*}, the graph of the bivector P.
template <class T>
DiracSubspace<T> from_bivector(const linalg::Matrix<T>& p) {
  if (!is_antisymmetric(p)) throw StructureError("from_bivector: matrix is not antisymmetric");
  const std::size_t n = p.rows();
  std::vector<linalg::Vector<T>> rows;
  for (std::size_t j = 0; j < n; ++j) rows.push_back(detail::concat(p.column(j), linalg::unit_vector<T>(n, j)));
  return DiracSubspace<T>(n, linalg::Subspace<T>::span(2 * n, rows));
}

/// L = {(X, W X) : X in V}, the graph of the 2-form W.
template <class T>
DiracSubspace<T> from_two_form(const linalg::Matrix<T>& w) {
  if (!is_antisymmetric(w)) throw StructureError("from_two_form: matrix is not antisymmetric");
  const std::size_t n = w.rows();
  std::vector<linalg::Vector<T>> rows;
  for (std::size_t j = 0; j < n; ++j) rows.push_back(detail::concat(linalg::unit_vector<T>(n, j), w.column(j)));
  return DiracSubspace<T>(n, linalg::Subspace<T>::span(2 * n, rows));
}

/// L = F ⊕ Ann(F).
template <class T>
DiracSubspace<T> from_distribution(const linalg::Subspace<T>& f) {
  const std::size_t n = f.ambient_dim();
  return DiracSubspace<T>(n, linalg::direct_sum(f, linalg::annihilator(f)));
}

/// ker L = {X : (X, 0) in L}.
template <class T>
linalg::Subspace<T> dirac_kernel(const DiracSubspace<T>& l) {
  const std::size_t n = l.n();
  // (X, a) in L with a = 0: preimage of L under X -> (X, 0).
  linalg::Matrix<T> embed(2 * n, n);
  for (std::size_t i = 0; i < n; ++i) embed(i, i) = T(1);
  return linalg::preimage(embed, l.space());
}

/// pr_T(L).
template <class T>
linalg::Subspace<T> dirac_range(const DiracSubspace<T>& l) {
  const std::size_t n = l.n();
  linalg::Matrix<T> project(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) project(i, i) = T(1);
  return linalg::image(project, l.space());
}

/// {(phi X, b) : (X, phi^T b) in L1}, with phi : V1 -> V2.
template <class T>
DiracImage<T> forward_image(const linalg::Matrix<T>& phi, const linalg::Subspace<T>& l1) {
  const std::size_t n1 = phi.cols();
  const std::size_t n2 = phi.rows();
  if (l1.ambient_dim() != 2 * n1) throw DimensionError("forward_image: L1 lives on the wrong space");
  // (X, b) -> (X, phi^T b) and (X, b) -> (phi X, b).
  const auto lift = detail::block2x2(linalg::Matrix<T>::identity(n1), linalg::Matrix<T>(n1, n2),
                                     linalg::Matrix<T>(n1, n1), phi.transpose());
  const auto push = detail::block2x2(phi, linalg::Matrix<T>(n2, n2), linalg::Matrix<T>(n2, n1),
                                     linalg::Matrix<T>::identity(n2));
  auto related = linalg::preimage(lift, l1);
  DiracImage<T> out{n2, linalg::image(push, related), false};
  out.is_dirac = out.space.dim() == n2 && isotropy_residual(out.space, n2) <= ScalarTraits<T>::default_tolerance;
  return out;
}

template <class T>
DiracImage<T> forward_image(const linalg::Matrix<T>& phi, const DiracSubspace<T>& l1) {
  return forward_image(phi, l1.space());
}

/// {(X, phi^T b) : (phi X, b) in L2}, with phi : V1 -> V2.
template <class T>
DiracImage<T> backward_image(const linalg::Matrix<T>& phi, const linalg::Subspace<T>& l2) {
  const std::size_t n1 = phi.cols();
  const std::size_t n2 = phi.rows();
  if (l2.ambient_dim() != 2 * n2) throw DimensionError("backward_image: L2 lives on the wrong space");
  const auto push = detail::block2x2(phi, linalg::Matrix<T>(n2, n2), linalg::Matrix<T>(n2, n1),
                                     linalg::Matrix<T>::identity(n2));
  const auto lift = detail::block2x2(linalg::Matrix<T>::identity(n1), linalg::Matrix<T>(n1, n2),
                                     linalg::Matrix<T>(n1, n1), phi.transpose());
  auto related = linalg::preimage(push, l2);
  DiracImage<T> out{n1, linalg::image(lift, related), false};
  out.is_dirac = out.space.dim() == n1 && isotropy_residual(out.space, n1) <= ScalarTraits<T>::default_tolerance;
  return out;
}

template <class T>
DiracImage<T> backward_image(const linalg::Matrix<T>& phi, const DiracSubspace<T>& l2) {
  return backward_image(phi, l2.space());
}

/// The bivector P with L = graph(P), when ker L = 0 (equivalently the cotangent
/// projection of L is onto).
template <class T>
std::optional<linalg::Matrix<T>> bivector_of(const DiracSubspace<T>& l) {
  const std::size_t n = l.n();
  linalg::Matrix<T> tangent(n, n), covector(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      tangent(r, c) = l.space().basis()(r, c);
      covector(r, c) = l.space().basis()(r, n + c);
    }
  if (linalg::rank(covector) < n) return std::nullopt;
  // Rows are (x_r, a_r) with x_r = P a_r, so X^T = P C^T.
  return tangent.transpose() * linalg::inverse(covector.transpose());
}

}  // namespace dirac
