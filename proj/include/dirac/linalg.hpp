#pragma once

// Dense linear algebra over a field. The exact instantiation (Rational) is the
// workhorse; the double instantiation only serves transcendental charts.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirac/error.hpp"
#include "dirac/scalar.hpp"

namespace dirac::linalg {

template <class T>
using Vector = std::vector<T>;

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw DimensionError("ragged matrix literal");
      for (const auto& v : row) data_.push_back(v);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix from_rows(std::size_t cols, const std::vector<Vector<T>>& rows) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw DimensionError("row length mismatch");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix from_columns(std::size_t rows, const std::vector<Vector<T>>& cols) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw DimensionError("column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vector<T> row(std::size_t r) const {
    return Vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                     data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }
  Vector<T> column(std::size_t c) const {
    Vector<T> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return ScalarTraits<T>::is_zero(x); });
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product: inner dimensions differ");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (ScalarTraits<T>::is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend Vector<T> operator*(const Matrix& a, const Vector<T>& v) {
    if (a.cols_ != v.size()) throw DimensionError("matrix-vector product: size mismatch");
    Vector<T> out(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) out[i] += a(i, k) * v[k];
    return out;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix sum: shape mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix difference: shape mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Vector<T> unit_vector(std::size_t n, std::size_t i) {
  Vector<T> v(n, T(0));
  v.at(i) = T(1);
  return v;
}

template <class T>
bool is_zero_vector(const Vector<T>& v) {
  return std::all_of(v.begin(), v.end(), [](const T& x) { return ScalarTraits<T>::is_zero(x); });
}

template <class T>
Vector<T> add(Vector<T> a, const Vector<T>& b) {
  if (a.size() != b.size()) throw DimensionError("vector sum: size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

template <class T>
Vector<T> subtract(Vector<T> a, const Vector<T>& b) {
  if (a.size() != b.size()) throw DimensionError("vector difference: size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

template <class T>
Vector<T> scale(const T& s, Vector<T> a) {
  for (auto& x : a) x *= s;
  return a;
}

template <class T>
T dot(const Vector<T>& a, const Vector<T>& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
double max_abs(const Vector<T>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, ScalarTraits<T>::magnitude(x));
  return m;
}

template <class T>
double max_abs(const Matrix<T>& m) {
  return max_abs(m.data());
}

template <class T>
Matrix<T> convert(const Matrix<Rational>& m) {
  Matrix<T> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = ScalarTraits<T>::from_rational(m(i, j));
  return out;
}

template <class T>
Vector<T> convert(const Vector<Rational>& v) {
  Vector<T> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(ScalarTraits<T>::from_rational(x));
  return out;
}

/// Reduced row-echelon form. Zero rows are kept at the bottom; `pivots` lists
/// the pivot column of each nonzero row in order.
template <class T>
struct Echelon {
  Matrix<T> reduced;
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
};

template <class T>
Echelon<T> echelon(Matrix<T> m) {
  using S = ScalarTraits<T>;
  Echelon<T> out;
  std::size_t lead = 0;
  for (std::size_t col = 0; col < m.cols() && lead < m.rows(); ++col) {
    std::size_t best = m.rows();
    for (std::size_t r = lead; r < m.rows(); ++r) {
      if (S::is_zero(m(r, col))) continue;
      if (best == m.rows() || S::better_pivot(m(r, col), m(best, col))) best = r;
      if constexpr (S::exact) break;
    }
    if (best == m.rows()) {
      for (std::size_t r = lead; r < m.rows(); ++r) m(r, col) = T(0);
      continue;
    }
    if (best != lead)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(best, c), m(lead, c));
    const T inv = T(1) / m(lead, col);
    for (std::size_t c = col; c < m.cols(); ++c) {
      m(lead, c) *= inv;
      S::clean(m(lead, c));
    }
    m(lead, col) = T(1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == lead || S::is_zero(m(r, col))) {
        if (r != lead) m(r, col) = T(0);
        continue;
      }
      const T factor = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) {
        m(r, c) -= factor * m(lead, c);
        S::clean(m(r, c));
      }
      m(r, col) = T(0);
    }
    out.pivots.push_back(col);
    ++lead;
  }
  out.rank = lead;
  out.reduced = std::move(m);
  return out;
}

/// (rref, rank) pair as exposed in the public contract.
template <class T>
std::pair<Matrix<T>, std::size_t> rref(const Matrix<T>& m) {
  auto e = echelon(m);
  return {std::move(e.reduced), e.rank};
}

template <class T>
std::size_t rank(const Matrix<T>& m) {
  return echelon(m).rank;
}

/// A subspace of T^m held as the nonzero rows of its reduced echelon basis.
/// Equal subspaces have identical bases (exactly for Rational).
template <class T>
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::size_t ambient) : ambient_(ambient), basis_(0, ambient) {}

  static Subspace zero(std::size_t ambient) { return Subspace(ambient); }
  static Subspace full(std::size_t ambient) { return from_rows(Matrix<T>::identity(ambient)); }

  /// Row space of `generators`.
  static Subspace from_rows(const Matrix<T>& generators) {
    auto e = echelon(generators);
    Subspace s(generators.cols());
    s.basis_ = Matrix<T>(e.rank, generators.cols());
    for (std::size_t r = 0; r < e.rank; ++r)
      for (std::size_t c = 0; c < generators.cols(); ++c) s.basis_(r, c) = e.reduced(r, c);
    s.pivots_ = std::move(e.pivots);
    return s;
  }

  static Subspace span(std::size_t ambient, const std::vector<Vector<T>>& vectors) {
    return from_rows(Matrix<T>::from_rows(ambient, vectors));
  }

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.rows(); }
  const Matrix<T>& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  Vector<T> basis_vector(std::size_t i) const { return basis_.row(i); }
  std::vector<Vector<T>> basis_vectors() const {
    std::vector<Vector<T>> out;
    for (std::size_t i = 0; i < dim(); ++i) out.push_back(basis_.row(i));
    return out;
  }

  bool contains(const Vector<T>& v) const {
    if (v.size() != ambient_) throw DimensionError("contains: ambient mismatch");
    return is_zero_vector(reduce(v));
  }

  bool contains(const Subspace& other) const {
    if (other.ambient_ != ambient_) throw DimensionError("contains: ambient mismatch");
    for (std::size_t i = 0; i < other.dim(); ++i)
      if (!contains(other.basis_.row(i))) return false;
    return true;
  }

  /// v minus its component along the pivot rows; zero exactly when v lies in
  /// the subspace. Coordinates at pivot columns are always zero afterwards.
  Vector<T> reduce(Vector<T> v) const {
    for (std::size_t r = 0; r < pivots_.size(); ++r) {
      const T factor = v[pivots_[r]];
      if (ScalarTraits<T>::is_zero(factor)) continue;
      for (std::size_t c = 0; c < ambient_; ++c) {
        v[c] -= factor * basis_(r, c);
        ScalarTraits<T>::clean(v[c]);
      }
      v[pivots_[r]] = T(0);
    }
    return v;
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  std::size_t ambient_ = 0;
  Matrix<T> basis_;
  std::vector<std::size_t> pivots_;
};

/// Equality of subspaces: basis identity for exact fields, mutual containment
/// within `tol` otherwise.
template <class T>
bool same_subspace(const Subspace<T>& a, const Subspace<T>& b,
                   double tol = ScalarTraits<T>::default_tolerance) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return false;
  if constexpr (ScalarTraits<T>::exact) {
    return a == b;
  } else {
    for (std::size_t i = 0; i < a.dim(); ++i)
      if (max_abs(b.reduce(a.basis_vector(i))) > tol) return false;
    for (std::size_t i = 0; i < b.dim(); ++i)
      if (max_abs(a.reduce(b.basis_vector(i))) > tol) return false;
    return true;
  }
}

/// Largest residual of a basis vector of either space against the other; 0 for
/// equal spaces, +inf when dimensions differ.
template <class T>
double subspace_residual(const Subspace<T>& a, const Subspace<T>& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) worst = std::max(worst, max_abs(b.reduce(a.basis_vector(i))));
  for (std::size_t i = 0; i < b.dim(); ++i) worst = std::max(worst, max_abs(a.reduce(b.basis_vector(i))));
  return worst;
}

/// {v : M v = 0}.
template <class T>
Subspace<T> kernel(const Matrix<T>& m) {
  auto e = echelon(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<Vector<T>> vectors;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vector<T> v(m.cols(), T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < e.rank; ++r) v[e.pivots[r]] = -e.reduced(r, free);
    vectors.push_back(std::move(v));
  }
  return Subspace<T>::span(m.cols(), vectors);
}

template <class T>
Subspace<T> sum(const Subspace<T>& a, const Subspace<T>& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("sum: ambient mismatch");
  auto rows = a.basis_vectors();
  auto more = b.basis_vectors();
  rows.insert(rows.end(), more.begin(), more.end());
  return Subspace<T>::span(a.ambient_dim(), rows);
}

/// A ∩ B from the kernel of [A^T | -B^T]: coefficient pairs with equal images.
template <class T>
Subspace<T> intersect(const Subspace<T>& a, const Subspace<T>& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("intersect: ambient mismatch");
  const std::size_t m = a.ambient_dim();
  if (a.dim() == 0 || b.dim() == 0) return Subspace<T>::zero(m);
  Matrix<T> stacked(m, a.dim() + b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t c = 0; c < m; ++c) stacked(c, i) = a.basis()(i, c);
  for (std::size_t j = 0; j < b.dim(); ++j)
    for (std::size_t c = 0; c < m; ++c) stacked(c, a.dim() + j) = -b.basis()(j, c);
  auto coeffs = kernel(stacked);
  std::vector<Vector<T>> vectors;
  for (std::size_t k = 0; k < coeffs.dim(); ++k) {
    Vector<T> v(m, T(0));
    for (std::size_t i = 0; i < a.dim(); ++i) {
      const T& w = coeffs.basis()(k, i);
      if (ScalarTraits<T>::is_zero(w)) continue;
      for (std::size_t c = 0; c < m; ++c) v[c] += w * a.basis()(i, c);
    }
    vectors.push_back(std::move(v));
  }
  return Subspace<T>::span(m, vectors);
}

/// {M v : v in A}.
template <class T>
Subspace<T> image(const Matrix<T>& m, const Subspace<T>& a) {
  if (m.cols() != a.ambient_dim()) throw DimensionError("image: matrix columns differ from ambient dim");
  std::vector<Vector<T>> vectors;
  for (std::size_t i = 0; i < a.dim(); ++i) vectors.push_back(m * a.basis_vector(i));
  return Subspace<T>::span(m.rows(), vectors);
}

template <class T>
Subspace<T> column_space(const Matrix<T>& m) {
  return image(m, Subspace<T>::full(m.cols()));
}

/// Covectors vanishing on A, with the dual identified to T^m by the standard basis.
template <class T>
Subspace<T> annihilator(const Subspace<T>& a) {
  if (a.dim() == 0) return Subspace<T>::full(a.ambient_dim());
  return kernel(a.basis());
}

/// {v : M v in B}.
template <class T>
Subspace<T> preimage(const Matrix<T>& m, const Subspace<T>& b) {
  if (m.rows() != b.ambient_dim()) throw DimensionError("preimage: matrix rows differ from ambient dim");
  const auto ann = annihilator(b);
  if (ann.dim() == 0) return Subspace<T>::full(m.cols());
  return kernel(ann.basis() * m);
}

/// Projection T^m -> T^(m - dim A) with kernel exactly A, and a right inverse.
/// The complement is spanned by the non-pivot standard basis vectors of A.
template <class T>
struct QuotientMap {
  Matrix<T> projection;
  Matrix<T> section;
};

template <class T>
QuotientMap<T> quotient_map(const Subspace<T>& a) {
  const std::size_t m = a.ambient_dim();
  std::vector<bool> is_pivot(m, false);
  for (auto p : a.pivots()) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < m; ++j)
    if (!is_pivot[j]) free.push_back(j);
  QuotientMap<T> q{Matrix<T>(free.size(), m), Matrix<T>(m, free.size())};
  for (std::size_t t = 0; t < free.size(); ++t) {
    const std::size_t j = free[t];
    q.section(j, t) = T(1);
    q.projection(t, j) = T(1);
    for (std::size_t r = 0; r < a.pivots().size(); ++r) q.projection(t, a.pivots()[r]) = -a.basis()(r, j);
  }
  return q;
}

/// Inverse of a square matrix; throws StructureError when singular.
template <class T>
Matrix<T> inverse(const Matrix<T>& m) {
  if (m.rows() != m.cols()) throw DimensionError("inverse: matrix not square");
  const std::size_t n = m.rows();
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  auto e = echelon(aug);
  if (e.rank < n || (n > 0 && e.pivots[n - 1] != n - 1)) throw StructureError("inverse: matrix is singular");
  Matrix<T> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = e.reduced(i, n + j);
  return out;
}

/// Some x with M x = b, or nothing when the system is inconsistent.
template <class T>
std::optional<Vector<T>> solve(const Matrix<T>& m, const Vector<T>& b) {
  if (m.rows() != b.size()) throw DimensionError("solve: rhs size mismatch");
  Matrix<T> aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto e = echelon(aug);
  if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
  Vector<T> x(m.cols(), T(0));
  for (std::size_t r = 0; r < e.rank; ++r) x[e.pivots[r]] = e.reduced(r, m.cols());
  return x;
}

/// Block-diagonal direct sum of two maps.
template <class T>
Matrix<T> direct_sum(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

/// Direct sum of subspaces, A ⊕ B inside T^(a+b).
template <class T>
Subspace<T> direct_sum(const Subspace<T>& a, const Subspace<T>& b) {
  std::vector<Vector<T>> rows;
  const std::size_t m = a.ambient_dim() + b.ambient_dim();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    Vector<T> v(m, T(0));
    for (std::size_t c = 0; c < a.ambient_dim(); ++c) v[c] = a.basis()(i, c);
    rows.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < b.dim(); ++i) {
    Vector<T> v(m, T(0));
    for (std::size_t c = 0; c < b.ambient_dim(); ++c) v[a.ambient_dim() + c] = b.basis()(i, c);
    rows.push_back(std::move(v));
  }
  return Subspace<T>::span(m, rows);
}

}  // namespace dirac::linalg
