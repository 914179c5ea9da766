#include "dirac/lie_bialgebra.hpp"

namespace dirac {

std::size_t wedge_dim(std::size_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; }

std::size_t wedge_index(std::size_t n, std::size_t j, std::size_t k) {
  if (!(j < k && k < n)) throw DimensionError("wedge_index: need j < k < n");
  // Pairs (0,1),(0,2),...,(0,n-1),(1,2),...
  return j * n - j * (j + 1) / 2 + (k - j - 1);
}

std::vector<std::pair<std::size_t, std::size_t>> wedge_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) out.emplace_back(j, k);
  return out;
}

RationalMatrix wedge_to_matrix(std::size_t n, const RationalVector& w) {
  if (w.size() != wedge_dim(n)) throw DimensionError("wedge_to_matrix: length mismatch");
  RationalMatrix m(n, n);
  std::size_t idx = 0;
  for (auto [j, k] : wedge_pairs(n)) {
    m(j, k) = w[idx];
    m(k, j) = -w[idx];
    ++idx;
  }
  return m;
}

RationalVector matrix_to_wedge(const RationalMatrix& m) {
  RationalVector w;
  for (auto [j, k] : wedge_pairs(m.rows())) w.push_back(m(j, k));
  return w;
}

RationalVector ad_on_wedge(const LieAlgebra& g, const RationalVector& x, const RationalVector& w) {
  // With W the antisymmetric matrix of w, ad_x acts as A W + W A^T, A = ad_x.
  const auto a = ad_matrix(g, x);
  const auto wm = wedge_to_matrix(g.dim(), w);
  return matrix_to_wedge(a * wm + wm * a.transpose());
}

Cobracket::Cobracket(LieAlgebra algebra)
    : algebra_(std::move(algebra)), coefficients_(algebra_.dim(), wedge_dim(algebra_.dim())) {}

Cobracket::Cobracket(LieAlgebra algebra, RationalMatrix coefficients)
    : algebra_(std::move(algebra)), coefficients_(std::move(coefficients)) {
  if (coefficients_.rows() != algebra_.dim() || coefficients_.cols() != wedge_dim(algebra_.dim()))
    throw DimensionError("Cobracket: coefficient matrix must be dim × dim(Λ²)");
}

void Cobracket::set(std::size_t i, std::size_t j, std::size_t k, const Rational& value) {
  if (i >= dim()) throw DimensionError("Cobracket::set: index out of range");
  coefficients_(i, wedge_index(dim(), j, k)) = value;
}

const Rational& Cobracket::get(std::size_t i, std::size_t j, std::size_t k) const {
  return coefficients_(i, wedge_index(dim(), j, k));
}

RationalVector Cobracket::apply(const RationalVector& x) const {
  if (x.size() != dim()) throw DimensionError("Cobracket::apply: length mismatch");
  return coefficients_.transpose() * x;
}

LieAlgebra dual_bracket(const Cobracket& cb) {
  const std::size_t n = cb.dim();
  LieAlgebra dual(cb.algebra().name() + "*", n);
  for (auto [j, k] : wedge_pairs(n)) {
    RationalVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = cb.get(i, j, k);
    dual.set_bracket(j, k, v);
  }
  return dual;
}

Cobracket dual_bialgebra(const Cobracket& cb) {
  const std::size_t n = cb.dim();
  Cobracket out(dual_bracket(cb));
  for (std::size_t k = 0; k < n; ++k)
    for (auto [i, j] : wedge_pairs(n)) out.set(k, i, j, cb.algebra().constant(i, j, k));
  return out;
}

CocycleReport cocycle_check(const Cobracket& cb) {
  const auto& g = cb.algebra();
  const std::size_t n = g.dim();
  CocycleReport report;
  for (auto [i, j] : wedge_pairs(n)) {
    const auto ei = linalg::unit_vector<Rational>(n, i);
    const auto ej = linalg::unit_vector<Rational>(n, j);
    const auto lhs = cb.apply(g.basis_bracket(i, j));
    const auto rhs = linalg::subtract(ad_on_wedge(g, ei, cb.of_basis(j)), ad_on_wedge(g, ej, cb.of_basis(i)));
    auto residual = linalg::subtract(lhs, rhs);
    if (!linalg::is_zero_vector(residual)) {
      report.pass = false;
      report.witness = std::make_pair(i, j);
      report.residual = std::move(residual);
      return report;
    }
  }
  return report;
}

BialgebraReport bialgebra_check(const Cobracket& cb) {
  BialgebraReport r;
  r.algebra_jacobi = jacobi_check(cb.algebra());
  r.dual_jacobi = jacobi_check(dual_bracket(cb));
  r.cocycle = cocycle_check(cb);
  r.pass = r.algebra_jacobi.pass && r.dual_jacobi.pass && r.cocycle.pass;
  return r;
}

InfinitesimalDataReport infinitesimal_data_check(const LieAlgebra& g, const RationalSubspace& k, const Cobracket& cb) {
  if (k.ambient_dim() != g.dim()) throw DimensionError("infinitesimal_data_check: ideal lives in the wrong space");
  if (cb.dim() + k.dim() != g.dim())
    throw DimensionError("infinitesimal_data_check: cobracket dimension must equal dim g - dim k");
  InfinitesimalDataReport r;
  r.ideal = is_ideal(g, k);
  if (!r.ideal.pass) {
    r.pass = false;
    r.failure = "ideal";
    return r;
  }
  r.quotient_matches = quotient(g, k).algebra == cb.algebra();
  if (!r.quotient_matches) {
    r.pass = false;
    r.failure = "quotient";
    return r;
  }
  r.bialgebra = bialgebra_check(cb);
  if (!r.bialgebra.pass) {
    r.pass = false;
    r.failure = "bialgebra";
  }
  return r;
}

Cobracket coboundary(const LieAlgebra& g, const RationalVector& r) {
  const std::size_t n = g.dim();
  if (r.size() != wedge_dim(n)) throw DimensionError("coboundary: r must lie in Λ²g");
  RationalMatrix coeffs(n, wedge_dim(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = ad_on_wedge(g, linalg::unit_vector<Rational>(n, i), r);
    for (std::size_t c = 0; c < d.size(); ++c) coeffs(i, c) = d[c];
  }
  return Cobracket(g, std::move(coeffs));
}

std::vector<Rational> schouten_square(const LieAlgebra& g, const RationalVector& r) {
  const std::size_t n = g.dim();
  const auto rm = wedge_to_matrix(n, r);
  std::vector<Rational> t(n * n * n, Rational(0));
  auto at = [n](std::size_t a, std::size_t b, std::size_t c) { return (a * n + b) * n + c; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        Rational s(0);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            s += g.constant(a, b, i) * rm(a, j) * rm(b, k);  // [r12, r13]
            s += rm(i, a) * g.constant(a, b, j) * rm(b, k);  // [r12, r23]
            s += rm(i, a) * rm(j, b) * g.constant(a, b, k);  // [r13, r23]
          }
        t[at(i, j, k)] = s;
      }
  return t;
}

bool is_ad_invariant_trivector(const LieAlgebra& g, const std::vector<Rational>& t) {
  const std::size_t n = g.dim();
  if (t.size() != n * n * n) throw DimensionError("is_ad_invariant_trivector: tensor size mismatch");
  auto at = [n](std::size_t a, std::size_t b, std::size_t c) { return (a * n + b) * n + c; };
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          Rational s(0);
          for (std::size_t u = 0; u < n; ++u) {
            s += g.constant(x, u, i) * t[at(u, j, k)];
            s += g.constant(x, u, j) * t[at(i, u, k)];
            s += g.constant(x, u, k) * t[at(i, j, u)];
          }
          if (sgn(s) != 0) return false;
        }
  return true;
}

Cobracket transport(const Cobracket& cb, const RationalMatrix& m, const LieAlgebra& target) {
  const std::size_t n = cb.dim();
  if (m.rows() != n || m.cols() != n || target.dim() != n) throw DimensionError("transport: shape mismatch");
  const auto inv = linalg::inverse(m);
  Cobracket out(target);
  for (std::size_t v = 0; v < n; ++v) {
    // δ_h(e_v) = (M∧M) δ(M^{-1} e_v).
    const auto w = cb.apply(inv.column(v));
    const auto moved = m * wedge_to_matrix(n, w) * m.transpose();
    const auto coeffs = matrix_to_wedge(moved);
    std::size_t idx = 0;
    for (auto [j, k] : wedge_pairs(n)) out.set(v, j, k, coeffs[idx++]);
  }
  return out;
}

namespace catalog {

Cobracket abelian2_aff1_dual() {
  Cobracket cb(abelian(2));
  cb.set(0, 0, 1, Rational(1));
  return cb;
}

Cobracket aff1_standard() {
  Cobracket cb(aff1());
  cb.set(1, 0, 1, Rational(1));
  return cb;
}

Cobracket sl2_standard() {
  const auto g = sl2();
  RationalVector r(wedge_dim(3), Rational(0));
  r[wedge_index(3, 1, 2)] = 1;  // e ∧ f
  return coboundary(g, r);
}

Cobracket heis3_broken() {
  Cobracket cb(heis3());
  cb.set(2, 0, 1, Rational(1));
  return cb;
}

Cobracket bialgebra_by_name(const std::string& name) {
  if (name == "abelian2_aff1dual") return abelian2_aff1_dual();
  if (name == "aff1_standard") return aff1_standard();
  if (name == "sl2_standard") return sl2_standard();
  if (name == "heis3_broken") return heis3_broken();
  throw InputError("unknown bialgebra '" + name + "'");
}

std::vector<std::string> bialgebra_names() {
  return {"abelian2_aff1dual", "aff1_standard", "sl2_standard", "heis3_broken"};
}

}  // namespace catalog

}  // namespace dirac
