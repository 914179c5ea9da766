#include "dirac/group_catalog.hpp"

#include <cmath>
#include <numbers>

namespace dirac {

using linalg::Matrix;
using linalg::Vector;

Rational random_rational(Rng& rng) {
  const long num = static_cast<long>(rng() % 13) - 6;
  const long den = static_cast<long>(rng() % 4) + 1;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational random_positive_rational(Rng& rng) {
  const long num = static_cast<long>(rng() % 6) + 1;
  const long den = static_cast<long>(rng() % 4) + 1;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

double random_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::string> format_params(const Params<Rational>& p) {
  std::vector<std::string> out;
  for (const auto& x : p) out.push_back(format_rational(x));
  return out;
}

std::vector<std::string> format_params(const Params<double>& p) {
  std::vector<std::string> out;
  for (double x : p) out.push_back(ScalarTraits<double>::to_string(x));
  return out;
}

namespace {

template <class T>
T sample_scalar(Rng& rng) {
  if constexpr (ScalarTraits<T>::exact) {
    return random_rational(rng);
  } else {
    return 4.0 * random_unit(rng) - 2.0;
  }
}

template <class T>
T sample_positive(Rng& rng) {
  if constexpr (ScalarTraits<T>::exact) {
    return random_positive_rational(rng);
  } else {
    return 0.25 + 3.0 * random_unit(rng);
  }
}

// 0, 1, -1, 2, -2, ...
template <class T>
std::vector<T> signed_grid(std::size_t count) {
  std::vector<T> out;
  for (std::size_t i = 0; out.size() < count; ++i) {
    const long m = static_cast<long>((i + 1) / 2);
    out.push_back(i % 2 == 1 ? T(m) : T(-m));
  }
  return out;
}

// 1, 2, 1/2, 3, 1/3, ...
template <class T>
std::vector<T> positive_grid(std::size_t count) {
  std::vector<T> out{T(1)};
  for (long m = 2; out.size() < count; ++m) {
    out.push_back(T(m));
    if (out.size() < count) out.push_back(T(1) / T(m));
  }
  out.resize(count);
  return out;
}

template <class T>
Vector<T> flatten(const Matrix<T>& m) {
  return m.data();
}

template <class T>
T frobenius(const Matrix<T>& a, const Matrix<T>& b) {
  T s(0);
  for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

template <class T>
bool near_matrix(const Matrix<T>& a, const Matrix<T>& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    if (!ScalarTraits<T>::near(a.data()[i], b.data()[i], tol)) return false;
  return true;
}

template <class T>
bool near_vector(const Vector<T>& a, const Vector<T>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!ScalarTraits<T>::near(a[i], b[i], tol)) return false;
  return true;
}

template <class T>
std::string format_vector(const Vector<T>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + ScalarTraits<T>::to_string(v[i]);
  return s + ")";
}

template <class T>
Matrix<T> unit_matrix(std::size_t size, std::size_t r, std::size_t c) {
  Matrix<T> m(size, size);
  m(r, c) = T(1);
  return m;
}

// Coordinates of y in the chart basis E_i; empty when y is not in span(E).
template <class T>
std::optional<Vector<T>> basis_coords(const GroupChart<T>& chart, const Matrix<T>& y) {
  const std::size_t n = chart.basis.size();
  const std::size_t entries = chart.matrix_size * chart.matrix_size;
  Matrix<T> system(entries, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t e = 0; e < entries; ++e) system(e, i) = chart.basis[i].data()[e];
  auto x = linalg::solve(system, flatten(y));
  if (!x) return std::nullopt;
  if constexpr (!ScalarTraits<T>::exact) {
    Matrix<T> back(chart.matrix_size, chart.matrix_size);
    for (std::size_t i = 0; i < n; ++i) back = back + (*x)[i] * chart.basis[i];
    if (!near_matrix(back, y, chart.tolerance)) return std::nullopt;
  }
  return x;
}

double chart_tol(const GroupChart<Rational>&) { return 0.0; }
double chart_tol(const GroupChart<double>& c) { return c.tolerance; }

}  // namespace

template <class T>
GroupPoint<T>::GroupPoint(ChartPtr<T> c, Params<T> p) : chart(std::move(c)), params(std::move(p)) {
  if (!chart) throw InputError("GroupPoint: missing chart");
  if (params.size() != chart->param_dim)
    throw DimensionError("GroupPoint: " + chart->name + " expects " + std::to_string(chart->param_dim) +
                         " parameters");
}

template <class T>
GroupPoint<T> identity_point(const ChartPtr<T>& chart) {
  return GroupPoint<T>(chart, chart->identity);
}

template <class T>
GroupPoint<T> multiply(const GroupPoint<T>& g, const GroupPoint<T>& h) {
  if (g.chart != h.chart) throw InputError("multiply: points on different charts");
  return GroupPoint<T>(g.chart, g.chart->multiply(g.params, h.params));
}

template <class T>
GroupPoint<T> inverse(const GroupPoint<T>& g) {
  return GroupPoint<T>(g.chart, g.chart->inverse(g.params));
}

template <class T>
Matrix<T> embed(const GroupPoint<T>& g) {
  return g.chart->embed(g.params);
}

template <class T>
bool same_point(const GroupPoint<T>& a, const GroupPoint<T>& b) {
  return a.chart == b.chart && near_vector(a.params, b.params, chart_tol(*a.chart));
}

template <class T>
std::vector<Matrix<T>> tangent_basis(const GroupPoint<T>& g) {
  const auto m = embed(g);
  std::vector<Matrix<T>> out;
  for (const auto& e : g.chart->basis) out.push_back(m * e);
  return out;
}

template <class T>
Vector<T> left_coords(const GroupPoint<T>& g, const Matrix<T>& x) {
  const auto coords = basis_coords(*g.chart, embed(inverse(g)) * x);
  if (!coords) throw StructureError("matrix is not tangent to " + g.chart->name + " at the given point");
  return *coords;
}

template <class T>
Matrix<T> from_left(const GroupPoint<T>& g, const Vector<T>& coords) {
  if (coords.size() != g.chart->basis.size()) throw DimensionError("from_left: coordinate count mismatch");
  const std::size_t s = g.chart->matrix_size;
  Matrix<T> x(s, s);
  for (std::size_t i = 0; i < coords.size(); ++i) x = x + coords[i] * g.chart->basis[i];
  return embed(g) * x;
}

template <class T>
Matrix<T> adjoint(const GroupPoint<T>& g) {
  const auto m = embed(g);
  const auto minv = embed(inverse(g));
  const std::size_t n = g.chart->basis.size();
  Matrix<T> ad(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = basis_coords(*g.chart, m * g.chart->basis[i] * minv);
    if (!c) throw StructureError("adjoint: conjugate leaves the Lie algebra of " + g.chart->name);
    for (std::size_t k = 0; k < n; ++k) ad(k, i) = (*c)[k];
  }
  return ad;
}

template <class T>
TangentVector<T> make_tangent(const GroupPoint<T>& base, Matrix<T> value) {
  (void)left_coords(base, value);
  return TangentVector<T>{base, std::move(value)};
}

template <class T>
TangentVector<T> dL(const GroupPoint<T>& g, const TangentVector<T>& x_h) {
  (void)left_coords(x_h.base, x_h.value);
  return TangentVector<T>{multiply(g, x_h.base), embed(g) * x_h.value};
}

template <class T>
TangentVector<T> dR(const GroupPoint<T>& h, const TangentVector<T>& x_g) {
  (void)left_coords(x_g.base, x_g.value);
  return TangentVector<T>{multiply(x_g.base, h), x_g.value * embed(h)};
}

template <class T>
TangentVector<T> tangent_group_product(const TangentVector<T>& x_g, const TangentVector<T>& y_h) {
  auto a = dR(y_h.base, x_g);
  auto b = dL(x_g.base, y_h);
  return TangentVector<T>{a.base, a.value + b.value};
}

template <class T>
Covector<T> covector_from_values(const GroupPoint<T>& g, const Vector<T>& values) {
  const auto basis = tangent_basis(g);
  const std::size_t n = basis.size();
  if (values.size() != n) throw DimensionError("covector_from_values: value count mismatch");
  Matrix<T> gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram(i, j) = frobenius(basis[i], basis[j]);
  const auto coeffs = linalg::inverse(gram) * values;
  Matrix<T> rep(g.chart->matrix_size, g.chart->matrix_size);
  for (std::size_t i = 0; i < n; ++i) rep = rep + coeffs[i] * basis[i];
  for (std::size_t r = 0; r < rep.rows(); ++r)
    for (std::size_t c = 0; c < rep.cols(); ++c) ScalarTraits<T>::clean(rep(r, c));
  return Covector<T>{g, std::move(rep)};
}

template <class T>
Covector<T> covector_from_matrix(const GroupPoint<T>& g, const Matrix<T>& a) {
  Vector<T> values;
  for (const auto& b : tangent_basis(g)) values.push_back(frobenius(a, b));
  return covector_from_values(g, values);
}

template <class T>
T evaluate(const Covector<T>& alpha, const Matrix<T>& x) {
  return frobenius(alpha.rep, x);
}

template <class T>
Vector<T> cotangent_source(const Covector<T>& alpha) {
  Vector<T> out;
  for (const auto& b : tangent_basis(alpha.base)) out.push_back(evaluate(alpha, b));
  return out;
}

template <class T>
Vector<T> cotangent_target(const Covector<T>& alpha) {
  const auto m = embed(alpha.base);
  Vector<T> out;
  for (const auto& e : alpha.base.chart->basis) out.push_back(evaluate(alpha, e * m));
  return out;
}

template <class T>
GeneralizedTangent<T> make_generalized(const GroupPoint<T>& base, const Matrix<T>& tangent, const Matrix<T>& covector) {
  (void)left_coords(base, tangent);
  return GeneralizedTangent<T>{base, tangent, covector_from_matrix(base, covector).rep};
}

template <class T>
GeneralizedTangent<T> generalized_from_left(const GroupPoint<T>& base, const Vector<T>& x, const Vector<T>& a) {
  return GeneralizedTangent<T>{base, from_left(base, x), covector_from_values(base, a).rep};
}

template <class T>
bool gt_composable(const GeneralizedTangent<T>& xi, const GeneralizedTangent<T>& eta) {
  const auto s = cotangent_source(Covector<T>{xi.base, xi.covector});
  const auto t = cotangent_target(Covector<T>{eta.base, eta.covector});
  return near_vector(s, t, chart_tol(*xi.base.chart));
}

template <class T>
GeneralizedTangent<T> gt_product(const GeneralizedTangent<T>& xi, const GeneralizedTangent<T>& eta) {
  if (xi.base.chart != eta.base.chart) throw InputError("gt_product: elements on different charts");
  if (!gt_composable(xi, eta)) {
    const auto s = cotangent_source(Covector<T>{xi.base, xi.covector});
    const auto t = cotangent_target(Covector<T>{eta.base, eta.covector});
    throw StructureError("gt_product: not composable, s(alpha) = " + format_vector(s) +
                         " but t(beta) = " + format_vector(t));
  }
  const auto& g = xi.base;
  const auto& h = eta.base;
  const auto gh = multiply(g, h);
  const auto tangent = tangent_group_product(TangentVector<T>{g, xi.tangent}, TangentVector<T>{h, eta.tangent});

  // Unknowns: γ on the left basis gh E_k. Constraints γ(dR_h u) = α(u) for
  // u = g E_i and γ(dL_g v) = β(v) for v = h E_j.
  const std::size_t n = g.chart->basis.size();
  Matrix<T> system(2 * n, n);
  Vector<T> rhs(2 * n, T(0));
  const Covector<T> alpha{g, xi.covector};
  const Covector<T> beta{h, eta.covector};
  const auto hm = embed(h);
  const auto g_basis = tangent_basis(g);
  const auto h_basis = tangent_basis(h);
  for (std::size_t i = 0; i < n; ++i) {
    const auto coords = left_coords(gh, g_basis[i] * hm);
    for (std::size_t k = 0; k < n; ++k) system(i, k) = coords[k];
    rhs[i] = evaluate(alpha, g_basis[i]);
  }
  const auto gm = embed(g);
  for (std::size_t j = 0; j < n; ++j) {
    const auto coords = left_coords(gh, gm * h_basis[j]);
    for (std::size_t k = 0; k < n; ++k) system(n + j, k) = coords[k];
    rhs[n + j] = evaluate(beta, h_basis[j]);
  }
  const auto values = linalg::solve(system, rhs);
  if (!values) throw StructureError("gt_product: covector system is inconsistent");
  if constexpr (!ScalarTraits<T>::exact) {
    if (!near_vector(system * *values, rhs, chart_tol(*g.chart)))
      throw StructureError("gt_product: covector system residual above tolerance");
  }
  return GeneralizedTangent<T>{gh, tangent.value, covector_from_values(gh, *values).rep};
}

template <class T>
bool same_generalized(const GeneralizedTangent<T>& a, const GeneralizedTangent<T>& b) {
  const double tol = chart_tol(*a.base.chart);
  return same_point(a.base, b.base) && near_matrix(a.tangent, b.tangent, tol) &&
         near_matrix(a.covector, b.covector, tol);
}

template <class T>
GroupPoint<T> apply(const Homomorphism<T>& phi, const GroupPoint<T>& g) {
  if (g.chart != phi.source) throw InputError("apply: point is not on the source chart of " + phi.name);
  return GroupPoint<T>(phi.target, phi.map(g.params));
}

template <class T>
Matrix<T> left_differential(const Homomorphism<T>& phi, const GroupPoint<T>& g) {
  const auto y = apply(phi, g);
  const auto basis = tangent_basis(g);
  Matrix<T> out(phi.target->basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto c = left_coords(y, phi.differential(g.params, basis[i]));
    for (std::size_t k = 0; k < c.size(); ++k) out(k, i) = c[k];
  }
  return out;
}

template <class T>
bool is_submersion(const Homomorphism<T>& phi) {
  return linalg::rank(left_differential(phi, identity_point(phi.source))) == phi.target->basis.size();
}

template <class T>
bool phi_related(const Homomorphism<T>& phi, const GeneralizedTangent<T>& eta, const GeneralizedTangent<T>& xi) {
  if (!same_point(apply(phi, eta.base), xi.base))
    throw StructureError("phi_related: base of xi is not phi(base of eta)");
  const double tol = chart_tol(*xi.base.chart);
  if (!near_matrix(phi.differential(eta.base.params, eta.tangent), xi.tangent, tol)) return false;
  const Covector<T> alpha{eta.base, eta.covector};
  const Covector<T> beta{xi.base, xi.covector};
  for (const auto& u : tangent_basis(eta.base)) {
    T lhs = evaluate(alpha, u);
    T rhs = evaluate(beta, phi.differential(eta.base.params, u));
    if (!ScalarTraits<T>::near(lhs, rhs, tol)) return false;
  }
  return true;
}

template <class T>
void validate_chart(const GroupChart<T>& chart, std::uint64_t seed, std::size_t samples) {
  const double tol = chart_tol(chart);
  const std::size_t s = chart.matrix_size;
  auto fail = [&chart](const std::string& what) { throw StructureError("chart " + chart.name + ": " + what); };
  if (chart.identity.size() != chart.param_dim || chart.basis.size() != chart.algebra.dim())
    fail("dimension bookkeeping is inconsistent");
  if (!near_matrix(chart.embed(chart.identity), Matrix<T>::identity(s), tol)) fail("identity does not embed to I");
  Rng rng(seed);
  for (std::size_t k = 0; k < samples; ++k) {
    const auto g = chart.sample(rng);
    const auto h = chart.sample(rng);
    if (!near_matrix(chart.embed(chart.multiply(g, h)), chart.embed(g) * chart.embed(h), tol))
      fail("multiply disagrees with matrix product");
    if (!near_matrix(chart.embed(chart.inverse(g)) * chart.embed(g), Matrix<T>::identity(s), tol))
      fail("inverse disagrees with matrix inverse");
  }
  for (std::size_t i = 0; i < chart.basis.size(); ++i)
    for (std::size_t j = 0; j < chart.basis.size(); ++j) {
      const auto comm = chart.basis[i] * chart.basis[j] - chart.basis[j] * chart.basis[i];
      Matrix<T> expected(s, s);
      for (std::size_t k = 0; k < chart.basis.size(); ++k)
        expected = expected + ScalarTraits<T>::from_rational(chart.algebra.constant(i, j, k)) * chart.basis[k];
      if (!near_matrix(comm, expected, tol)) fail("basis commutators do not match the structure constants");
    }
}

template <class T>
void Registry<T>::add_chart(ChartPtr<T> chart) {
  validate_chart(*chart);
  charts_[chart->name] = std::move(chart);
}

template <class T>
void Registry<T>::add_hom(HomPtr<T> hom) {
  // Sampled check that the map is a homomorphism and that lift is a section.
  Rng rng(0);
  const double tol = chart_tol(*hom->target);
  for (int k = 0; k < 8; ++k) {
    const auto g = hom->source->sample(rng);
    const auto h = hom->source->sample(rng);
    const auto lhs = hom->map(hom->source->multiply(g, h));
    const auto rhs = hom->target->multiply(hom->map(g), hom->map(h));
    if (!near_vector(lhs, rhs, tol)) throw StructureError("hom " + hom->name + ": map is not multiplicative");
    const auto y = hom->map(g);
    if (!near_vector(hom->map(hom->lift(y)), y, tol)) throw StructureError("hom " + hom->name + ": lift is not a section");
  }
  homs_[hom->name] = std::move(hom);
}

template <class T>
ChartPtr<T> Registry<T>::chart(const std::string& name) const {
  auto it = charts_.find(name);
  if (it == charts_.end()) throw InputError("unknown group '" + name + "'");
  return it->second;
}

template <class T>
HomPtr<T> Registry<T>::hom(const std::string& name) const {
  auto it = homs_.find(name);
  if (it == homs_.end()) throw InputError("unknown homomorphism '" + name + "'");
  return it->second;
}

template <class T>
std::vector<std::string> Registry<T>::chart_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : charts_) out.push_back(name);
  return out;
}

template <class T>
std::vector<HomPtr<T>> Registry<T>::homs_from(const std::string& source) const {
  std::vector<HomPtr<T>> out;
  for (const auto& [name, hom] : homs_)
    if (hom->source->name == source) out.push_back(hom);
  return out;
}

namespace charts {

template <class T>
ChartPtr<T> heisenberg3() {
  auto c = std::make_shared<GroupChart<T>>();
  c->name = "heisenberg3";
  c->matrix_size = 3;
  c->param_dim = 3;
  c->algebra = catalog::heis3();
  c->basis = {unit_matrix<T>(3, 0, 1), unit_matrix<T>(3, 1, 2), unit_matrix<T>(3, 0, 2)};
  c->identity = {T(0), T(0), T(0)};
  // (a, b, c) -> [[1, a, c], [0, 1, b], [0, 0, 1]]
  c->embed = [](const Params<T>& p) {
    Matrix<T> m = Matrix<T>::identity(3);
    m(0, 1) = p[0];
    m(1, 2) = p[1];
    m(0, 2) = p[2];
    return m;
  };
  c->multiply = [](const Params<T>& p, const Params<T>& q) {
    return Params<T>{T(p[0] + q[0]), T(p[1] + q[1]), T(p[2] + q[2] + p[0] * q[1])};
  };
  c->inverse = [](const Params<T>& p) { return Params<T>{T(-p[0]), T(-p[1]), T(p[0] * p[1] - p[2])}; };
  c->sample = [](Rng& rng) {
    Params<T> p;
    for (int i = 0; i < 3; ++i) p.push_back(sample_scalar<T>(rng));
    return p;
  };
  c->grid_values = [](std::size_t, std::size_t count) { return signed_grid<T>(count); };
  c->exp = [](const Vector<T>& x) { return Params<T>{x[0], x[1], T(x[2] + x[0] * x[1] / T(2))}; };
  c->ad_degree = 1;
  if constexpr (!ScalarTraits<T>::exact) {
    c->mode = ArithmeticMode::floating;
    c->tolerance = ScalarTraits<double>::default_tolerance;
  }
  return c;
}

template <class T>
ChartPtr<T> aff1() {
  auto c = std::make_shared<GroupChart<T>>();
  c->name = "aff1";
  c->matrix_size = 2;
  c->param_dim = 2;
  c->algebra = catalog::aff1();
  c->basis = {unit_matrix<T>(2, 0, 0), unit_matrix<T>(2, 0, 1)};
  c->identity = {T(1), T(0)};
  // (a, b) -> [[a, b], [0, 1]], a > 0
  c->embed = [](const Params<T>& p) {
    Matrix<T> m(2, 2);
    m(0, 0) = p[0];
    m(0, 1) = p[1];
    m(1, 1) = T(1);
    return m;
  };
  c->multiply = [](const Params<T>& p, const Params<T>& q) {
    return Params<T>{T(p[0] * q[0]), T(p[0] * q[1] + p[1])};
  };
  c->inverse = [](const Params<T>& p) { return Params<T>{T(T(1) / p[0]), T(-p[1] / p[0])}; };
  c->sample = [](Rng& rng) { return Params<T>{sample_positive<T>(rng), sample_scalar<T>(rng)}; };
  c->grid_values = [](std::size_t coord, std::size_t count) {
    return coord == 0 ? positive_grid<T>(count) : signed_grid<T>(count);
  };
  if constexpr (!ScalarTraits<T>::exact) {
    c->exp = [](const Vector<T>& x) {
      const double s = x[0];
      const double scale = std::abs(s) < 1e-12 ? 1.0 + s / 2.0 : std::expm1(s) / s;
      return Params<T>{std::exp(s), x[1] * scale};
    };
    c->mode = ArithmeticMode::floating;
    c->tolerance = ScalarTraits<double>::default_tolerance;
  }
  return c;
}

template <class T>
ChartPtr<T> gl1plus() {
  auto c = std::make_shared<GroupChart<T>>();
  c->name = "gl1plus";
  c->matrix_size = 1;
  c->param_dim = 1;
  c->algebra = catalog::abelian(1);
  c->basis = {unit_matrix<T>(1, 0, 0)};
  c->identity = {T(1)};
  c->embed = [](const Params<T>& p) { return Matrix<T>{{p[0]}}; };
  c->multiply = [](const Params<T>& p, const Params<T>& q) { return Params<T>{T(p[0] * q[0])}; };
  c->inverse = [](const Params<T>& p) { return Params<T>{T(T(1) / p[0])}; };
  c->sample = [](Rng& rng) { return Params<T>{sample_positive<T>(rng)}; };
  c->grid_values = [](std::size_t, std::size_t count) { return positive_grid<T>(count); };
  c->ad_degree = 0;
  if constexpr (!ScalarTraits<T>::exact) {
    c->exp = [](const Vector<T>& x) { return Params<T>{std::exp(x[0])}; };
    c->mode = ArithmeticMode::floating;
    c->tolerance = ScalarTraits<double>::default_tolerance;
  }
  return c;
}

template <class T>
ChartPtr<T> abelian(std::size_t n) {
  auto c = std::make_shared<GroupChart<T>>();
  c->name = "abelian" + std::to_string(n);
  c->matrix_size = n + 1;
  c->param_dim = n;
  c->algebra = catalog::abelian(n);
  for (std::size_t j = 0; j < n; ++j) c->basis.push_back(unit_matrix<T>(n + 1, 0, j + 1));
  c->identity = Params<T>(n, T(0));
  // x -> I + sum_j x_j E_{0, j+1}
  c->embed = [n](const Params<T>& p) {
    Matrix<T> m = Matrix<T>::identity(n + 1);
    for (std::size_t j = 0; j < n; ++j) m(0, j + 1) = p[j];
    return m;
  };
  c->multiply = [](const Params<T>& p, const Params<T>& q) { return linalg::add(p, q); };
  c->inverse = [](const Params<T>& p) { return linalg::scale(T(-1), p); };
  c->sample = [n](Rng& rng) {
    Params<T> p;
    for (std::size_t j = 0; j < n; ++j) p.push_back(sample_scalar<T>(rng));
    return p;
  };
  c->grid_values = [](std::size_t, std::size_t count) { return signed_grid<T>(count); };
  c->exp = [](const Vector<T>& x) { return x; };
  c->ad_degree = 0;
  c->vector_group = true;
  if constexpr (!ScalarTraits<T>::exact) {
    c->mode = ArithmeticMode::floating;
    c->tolerance = ScalarTraits<double>::default_tolerance;
  }
  return c;
}

template <class T>
ChartPtr<T> trivial() {
  auto c = std::make_shared<GroupChart<T>>();
  c->name = "trivial";
  c->matrix_size = 1;
  c->param_dim = 0;
  c->algebra = LieAlgebra("trivial", 0);
  c->embed = [](const Params<T>&) { return Matrix<T>::identity(1); };
  c->multiply = [](const Params<T>&, const Params<T>&) { return Params<T>{}; };
  c->inverse = [](const Params<T>&) { return Params<T>{}; };
  c->sample = [](Rng&) { return Params<T>{}; };
  c->grid_values = [](std::size_t, std::size_t) { return std::vector<T>{}; };
  c->exp = [](const Vector<T>&) { return Params<T>{}; };
  c->ad_degree = 0;
  c->vector_group = true;
  if constexpr (!ScalarTraits<T>::exact) {
    c->mode = ArithmeticMode::floating;
    c->tolerance = ScalarTraits<double>::default_tolerance;
  }
  return c;
}

ChartPtr<double> torus2() {
  auto c = std::make_shared<GroupChart<double>>();
  c->name = "torus2";
  c->matrix_size = 4;
  c->param_dim = 2;
  c->algebra = catalog::abelian(2);
  Matrix<double> j1(4, 4), j2(4, 4);
  j1(0, 1) = -1.0;
  j1(1, 0) = 1.0;
  j2(2, 3) = -1.0;
  j2(3, 2) = 1.0;
  c->basis = {j1, j2};
  c->identity = {0.0, 0.0};
  // (θ1, θ2) -> R(θ1) ⊕ R(θ2)
  c->embed = [](const Params<double>& p) {
    Matrix<double> m(4, 4);
    for (std::size_t b = 0; b < 2; ++b) {
      const double co = std::cos(p[b]);
      const double si = std::sin(p[b]);
      m(2 * b, 2 * b) = co;
      m(2 * b, 2 * b + 1) = -si;
      m(2 * b + 1, 2 * b) = si;
      m(2 * b + 1, 2 * b + 1) = co;
    }
    return m;
  };
  c->multiply = [](const Params<double>& p, const Params<double>& q) { return linalg::add(p, q); };
  c->inverse = [](const Params<double>& p) { return linalg::scale(-1.0, p); };
  c->sample = [](Rng& rng) {
    return Params<double>{2.0 * std::numbers::pi * random_unit(rng), 2.0 * std::numbers::pi * random_unit(rng)};
  };
  c->grid_values = [](std::size_t, std::size_t count) {
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(0.5 * static_cast<double>(i));
    return out;
  };
  c->exp = [](const Vector<double>& x) { return x; };
  c->connected_subgroups_closed = false;
  c->mode = ArithmeticMode::floating;
  c->tolerance = ScalarTraits<double>::default_tolerance;
  return c;
}

}  // namespace charts

namespace {

template <class T>
HomPtr<T> identity_hom(const ChartPtr<T>& c) {
  auto h = std::make_shared<Homomorphism<T>>();
  h->name = c->name + "->" + c->name;
  h->source = c;
  h->target = c;
  h->map = [](const Params<T>& p) { return p; };
  h->differential = [](const Params<T>&, const Matrix<T>& x) { return x; };
  h->lift = [](const Params<T>& y) { return y; };
  return h;
}

template <class T>
HomPtr<T> collapse_hom(const ChartPtr<T>& c, const ChartPtr<T>& trivial) {
  auto h = std::make_shared<Homomorphism<T>>();
  h->name = c->name + "->trivial";
  h->source = c;
  h->target = trivial;
  h->map = [](const Params<T>&) { return Params<T>{}; };
  h->differential = [](const Params<T>&, const Matrix<T>&) { return Matrix<T>(1, 1); };
  h->lift = [c](const Params<T>&) { return c->identity; };
  h->map_degree = 0;
  return h;
}

template <class T>
Registry<T> build_registry() {
  Registry<T> reg;
  const auto heis = charts::heisenberg3<T>();
  const auto aff = charts::aff1<T>();
  const auto gl1 = charts::gl1plus<T>();
  const auto triv = charts::trivial<T>();
  std::vector<ChartPtr<T>> all{heis, aff, gl1, triv};
  for (std::size_t n = 1; n <= 4; ++n) all.push_back(charts::abelian<T>(n));
  if constexpr (!ScalarTraits<T>::exact) all.push_back(charts::torus2());
  for (const auto& c : all) reg.add_chart(c);
  for (const auto& c : all) {
    reg.add_hom(identity_hom(c));
    if (c != triv) reg.add_hom(collapse_hom(c, triv));
  }
  const auto ab2 = reg.chart("abelian2");
  const auto ab3 = reg.chart("abelian3");

  {
    // (a, b, c) -> (a, b); the kernel is the center.
    auto h = std::make_shared<Homomorphism<T>>();
    h->name = "heisenberg3->abelian2";
    h->source = heis;
    h->target = ab2;
    h->map = [](const Params<T>& p) { return Params<T>{p[0], p[1]}; };
    h->differential = [](const Params<T>&, const Matrix<T>& x) {
      Matrix<T> y(3, 3);
      y(0, 1) = x(0, 1);
      y(0, 2) = x(1, 2);
      return y;
    };
    h->lift = [](const Params<T>& y) { return Params<T>{y[0], y[1], T(0)}; };
    reg.add_hom(h);
  }
  {
    auto h = std::make_shared<Homomorphism<T>>();
    h->name = "aff1->gl1plus";
    h->source = aff;
    h->target = gl1;
    h->map = [](const Params<T>& p) { return Params<T>{p[0]}; };
    h->differential = [](const Params<T>&, const Matrix<T>& x) { return Matrix<T>{{x(0, 0)}}; };
    h->lift = [](const Params<T>& y) { return Params<T>{y[0], T(0)}; };
    reg.add_hom(h);
  }
  {
    auto h = std::make_shared<Homomorphism<T>>();
    h->name = "abelian3->abelian2";
    h->source = ab3;
    h->target = ab2;
    h->map = [](const Params<T>& p) { return Params<T>{p[0], p[1]}; };
    h->differential = [](const Params<T>&, const Matrix<T>& x) {
      Matrix<T> y(3, 3);
      y(0, 1) = x(0, 1);
      y(0, 2) = x(0, 2);
      return y;
    };
    h->lift = [](const Params<T>& y) { return Params<T>{y[0], y[1], T(0)}; };
    reg.add_hom(h);
  }
  return reg;
}

}  // namespace

template <class T>
const Registry<T>& catalog_registry() {
  static const Registry<T> reg = build_registry<T>();
  return reg;
}

#define DIRAC_INSTANTIATE_GROUP(T)                                                                         \
  template struct GroupPoint<T>;                                                                           \
  template GroupPoint<T> identity_point(const ChartPtr<T>&);                                               \
  template GroupPoint<T> multiply(const GroupPoint<T>&, const GroupPoint<T>&);                             \
  template GroupPoint<T> inverse(const GroupPoint<T>&);                                                    \
  template Matrix<T> embed(const GroupPoint<T>&);                                                          \
  template bool same_point(const GroupPoint<T>&, const GroupPoint<T>&);                                    \
  template std::vector<Matrix<T>> tangent_basis(const GroupPoint<T>&);                                     \
  template Vector<T> left_coords(const GroupPoint<T>&, const Matrix<T>&);                                  \
  template Matrix<T> from_left(const GroupPoint<T>&, const Vector<T>&);                                    \
  template Matrix<T> adjoint(const GroupPoint<T>&);                                                        \
  template TangentVector<T> make_tangent(const GroupPoint<T>&, Matrix<T>);                                 \
  template TangentVector<T> dL(const GroupPoint<T>&, const TangentVector<T>&);                             \
  template TangentVector<T> dR(const GroupPoint<T>&, const TangentVector<T>&);                             \
  template TangentVector<T> tangent_group_product(const TangentVector<T>&, const TangentVector<T>&);       \
  template Covector<T> covector_from_values(const GroupPoint<T>&, const Vector<T>&);                       \
  template Covector<T> covector_from_matrix(const GroupPoint<T>&, const Matrix<T>&);                       \
  template T evaluate(const Covector<T>&, const Matrix<T>&);                                               \
  template Vector<T> cotangent_source(const Covector<T>&);                                                 \
  template Vector<T> cotangent_target(const Covector<T>&);                                                 \
  template GeneralizedTangent<T> make_generalized(const GroupPoint<T>&, const Matrix<T>&, const Matrix<T>&); \
  template GeneralizedTangent<T> generalized_from_left(const GroupPoint<T>&, const Vector<T>&, const Vector<T>&); \
  template bool gt_composable(const GeneralizedTangent<T>&, const GeneralizedTangent<T>&);                 \
  template GeneralizedTangent<T> gt_product(const GeneralizedTangent<T>&, const GeneralizedTangent<T>&);   \
  template bool same_generalized(const GeneralizedTangent<T>&, const GeneralizedTangent<T>&);              \
  template GroupPoint<T> apply(const Homomorphism<T>&, const GroupPoint<T>&);                              \
  template Matrix<T> left_differential(const Homomorphism<T>&, const GroupPoint<T>&);                      \
  template bool is_submersion(const Homomorphism<T>&);                                                     \
  template bool phi_related(const Homomorphism<T>&, const GeneralizedTangent<T>&, const GeneralizedTangent<T>&); \
  template void validate_chart(const GroupChart<T>&, std::uint64_t, std::size_t);                          \
  template class Registry<T>;                                                                              \
  template const Registry<T>& catalog_registry();                                                          \
  template ChartPtr<T> charts::heisenberg3();                                                              \
  template ChartPtr<T> charts::aff1();                                                                     \
  template ChartPtr<T> charts::gl1plus();                                                                  \
  template ChartPtr<T> charts::abelian(std::size_t);                                                       \
  template ChartPtr<T> charts::trivial();

DIRAC_INSTANTIATE_GROUP(Rational)
DIRAC_INSTANTIATE_GROUP(double)

#undef DIRAC_INSTANTIATE_GROUP

}  // namespace dirac
