#include "dirac/lie_algebra.hpp"

#include <algorithm>
#include <cctype>

namespace dirac {

LieAlgebra::LieAlgebra(std::string name, std::size_t dim)
    : name_(std::move(name)), dim_(dim), constants_(dim * dim * dim, Rational(0)) {}

void LieAlgebra::set_bracket(std::size_t i, std::size_t j, const RationalVector& value) {
  if (i >= dim_ || j >= dim_ || value.size() != dim_) throw DimensionError("set_bracket: index or length out of range");
  if (i == j) throw InputError("set_bracket: [e_i, e_i] is zero by convention");
  for (std::size_t k = 0; k < dim_; ++k) {
    constants_[(i * dim_ + j) * dim_ + k] = value[k];
    constants_[(j * dim_ + i) * dim_ + k] = -value[k];
  }
}

RationalVector LieAlgebra::basis_bracket(std::size_t i, std::size_t j) const {
  RationalVector v(dim_);
  for (std::size_t k = 0; k < dim_; ++k) v[k] = constant(i, j, k);
  return v;
}

bool LieAlgebra::is_abelian() const {
  return std::all_of(constants_.begin(), constants_.end(), [](const Rational& c) { return sgn(c) == 0; });
}

RationalVector bracket(const LieAlgebra& g, const RationalVector& x, const RationalVector& y) {
  const std::size_t n = g.dim();
  if (x.size() != n || y.size() != n) throw DimensionError("bracket: vector length differs from algebra dimension");
  RationalVector out(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(x[i]) == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || sgn(y[j]) == 0) continue;
      const Rational w = x[i] * y[j];
      for (std::size_t k = 0; k < n; ++k) out[k] += w * g.constant(i, j, k);
    }
  }
  return out;
}

JacobiReport jacobi_check(const LieAlgebra& g) {
  const std::size_t n = g.dim();
  JacobiReport report;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const auto ei = linalg::unit_vector<Rational>(n, i);
        const auto ej = linalg::unit_vector<Rational>(n, j);
        const auto ek = linalg::unit_vector<Rational>(n, k);
        auto r = bracket(g, g.basis_bracket(i, j), ek);
        r = linalg::add(r, bracket(g, g.basis_bracket(j, k), ei));
        r = linalg::add(r, bracket(g, g.basis_bracket(k, i), ej));
        if (!linalg::is_zero_vector(r)) {
          report.pass = false;
          report.witness = std::array<std::size_t, 3>{i, j, k};
          report.residual = std::move(r);
          return report;
        }
      }
  return report;
}

IdealReport is_ideal(const LieAlgebra& g, const RationalSubspace& k) {
  if (k.ambient_dim() != g.dim()) throw DimensionError("is_ideal: ambient mismatch");
  IdealReport report;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    const auto ei = linalg::unit_vector<Rational>(g.dim(), i);
    for (std::size_t r = 0; r < k.dim(); ++r) {
      auto v = k.basis_vector(r);
      auto b = bracket(g, ei, v);
      if (!k.contains(b)) {
        report.pass = false;
        report.algebra_index = i;
        report.element = std::move(v);
        report.bracket_value = std::move(b);
        return report;
      }
    }
  }
  return report;
}

RationalMatrix ad_matrix(const LieAlgebra& g, const RationalVector& x) {
  const std::size_t n = g.dim();
  RationalMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = bracket(g, x, linalg::unit_vector<Rational>(n, j));
    for (std::size_t k = 0; k < n; ++k) m(k, j) = col[k];
  }
  return m;
}

LieQuotient quotient(const LieAlgebra& g, const RationalSubspace& k) {
  const auto ideal = is_ideal(g, k);
  if (!ideal.pass)
    throw StructureError("quotient: subspace is not an ideal; [e_" + std::to_string(ideal.algebra_index) +
                         ", v] leaves the subspace");
  auto q = linalg::quotient_map(k);
  const std::size_t m = q.projection.rows();
  LieQuotient out{LieAlgebra(g.name() + "/k", m), q.projection, q.section};
  for (std::size_t t = 0; t < m; ++t)
    for (std::size_t u = t + 1; u < m; ++u) {
      const auto b = bracket(g, q.section.column(t), q.section.column(u));
      out.algebra.set_bracket(t, u, q.projection * b);
    }
  // The projection must intertwine the brackets on every basis pair.
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = i + 1; j < g.dim(); ++j) {
      const auto lhs = q.projection * g.basis_bracket(i, j);
      const auto rhs = bracket(out.algebra, q.projection.column(i), q.projection.column(j));
      if (lhs != rhs) throw StructureError("quotient: projection is not a homomorphism");
    }
  return out;
}

namespace catalog {

namespace {

RationalVector vec(std::initializer_list<int> entries) {
  RationalVector v;
  for (int e : entries) v.emplace_back(e);
  return v;
}

}  // namespace

LieAlgebra abelian(std::size_t n) { return LieAlgebra("abelian" + std::to_string(n), n); }

LieAlgebra heis3() {
  LieAlgebra g("heis3", 3);
  g.set_bracket(0, 1, vec({0, 0, 1}));
  return g;
}

LieAlgebra aff1() {
  LieAlgebra g("aff1", 2);
  g.set_bracket(0, 1, vec({0, 1}));
  return g;
}

LieAlgebra sl2() {
  LieAlgebra g("sl2", 3);
  g.set_bracket(0, 1, vec({0, 2, 0}));
  g.set_bracket(0, 2, vec({0, 0, -2}));
  g.set_bracket(1, 2, vec({1, 0, 0}));
  return g;
}

LieAlgebra so3() {
  LieAlgebra g("so3", 3);
  g.set_bracket(0, 1, vec({0, 0, 1}));
  g.set_bracket(1, 2, vec({1, 0, 0}));
  g.set_bracket(2, 0, vec({0, 1, 0}));
  return g;
}

LieAlgebra by_name(const std::string& name) {
  if (name == "heis3") return heis3();
  if (name == "aff1") return aff1();
  if (name == "sl2") return sl2();
  if (name == "so3") return so3();
  for (std::string prefix : {"abelian_", "abelian"}) {
    if (name.rfind(prefix, 0) != 0) continue;
    const auto digits = name.substr(prefix.size());
    if (!digits.empty() && digits.size() <= 2 &&
        std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return abelian(static_cast<std::size_t>(std::stoul(digits)));
  }
  throw InputError("unknown Lie algebra '" + name + "'");
}

std::vector<std::string> names() { return {"abelian1", "abelian2", "abelian3", "heis3", "aff1", "sl2", "so3"}; }

}  // namespace catalog

}  // namespace dirac
