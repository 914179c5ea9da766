#include "dirac/multiplicative_dirac.hpp"

#include <algorithm>
#include <cmath>

namespace dirac {

using linalg::Matrix;
using linalg::Subspace;
using linalg::Vector;

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::foliation: return "foliation";
    case FieldKind::poisson_linear: return "poisson_linear";
    case FieldKind::poisson_coboundary: return "poisson_coboundary";
    case FieldKind::two_form_graph: return "two_form_graph";
    case FieldKind::pullback: return "pullback";
    case FieldKind::quotient: return "quotient";
  }
  return "unknown";
}

FieldKind field_kind_from_string(const std::string& name) {
  for (auto k : {FieldKind::foliation, FieldKind::poisson_linear, FieldKind::poisson_coboundary,
                 FieldKind::two_form_graph, FieldKind::pullback})
    if (to_string(k) == name) return k;
  throw InputError("unknown field kind '" + name + "'");
}

namespace {

template <class T>
double tolerance_for(const GroupChart<T>& chart, const SamplingOptions& options) {
  if constexpr (ScalarTraits<T>::exact) {
    (void)chart;
    (void)options;
    return 0.0;
  } else {
    return options.tolerance.value_or(chart.tolerance);
  }
}

template <class T>
Matrix<T> wedge_matrix(std::size_t n, const RationalVector& w) {
  return linalg::convert<T>(wedge_to_matrix(n, w));
}

template <class T>
Vector<T> matrix_wedge(const Matrix<T>& m) {
  Vector<T> w;
  for (auto [j, k] : wedge_pairs(m.rows())) w.push_back(m(j, k));
  return w;
}

template <class T>
std::string format_vector(const Vector<T>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + ScalarTraits<T>::to_string(v[i]);
  return s + ")";
}

template <class T>
Vector<T> slice(const Vector<T>& v, std::size_t from, std::size_t count) {
  return Vector<T>(v.begin() + static_cast<std::ptrdiff_t>(from),
                   v.begin() + static_cast<std::ptrdiff_t>(from + count));
}

template <class T>
Vector<T> concat(const Vector<T>& a, const Vector<T>& b) {
  Vector<T> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Comparison of two subspaces under the field's arithmetic, with a short
// description of the first disagreement.
template <class T>
bool compare_spaces(const Subspace<T>& got, const Subspace<T>& want, double tol, double& residual,
                    std::string& detail, const std::string& got_name, const std::string& want_name) {
  if (got.dim() != want.dim()) {
    residual = std::numeric_limits<double>::infinity();
    detail = got_name + " has dimension " + std::to_string(got.dim()) + " but " + want_name + " has dimension " +
             std::to_string(want.dim());
    return false;
  }
  if constexpr (ScalarTraits<T>::exact) {
    (void)tol;
    residual = 0.0;
    if (got == want) return true;
  } else {
    residual = linalg::subspace_residual(got, want);
    if (residual <= tol) return true;
  }
  for (std::size_t i = 0; i < got.dim(); ++i) {
    const auto v = got.basis_vector(i);
    const auto rem = want.reduce(v);
    if (linalg::max_abs(rem) > tol) {
      if constexpr (ScalarTraits<T>::exact) residual = linalg::max_abs(rem);
      detail = "vector " + format_vector(v) + " of " + got_name + " is not in " + want_name;
      return false;
    }
  }
  detail = got_name + " differs from " + want_name;
  return false;
}

template <class T>
Vector<T> covector_values(const GroupPoint<T>& g, const Matrix<T>& rep) {
  Vector<T> out;
  const Covector<T> alpha{g, rep};
  for (const auto& b : tangent_basis(g)) out.push_back(evaluate(alpha, b));
  return out;
}

template <class T>
Vector<T> split_params(const Params<T>& all, std::size_t index, std::size_t p) {
  return slice(all, index * p, p);
}

template <class T>
DiracSubspace<T> quotient_value(const DiracField<T>& q, const GroupPoint<T>& source_point) {
  const auto img = forward_image(left_differential(*q.hom, source_point), evaluate(*q.base, source_point));
  if (!img.is_dirac) throw StructureError("quotient: forward image is not a Dirac structure");
  return img.as_dirac(q.chart->tolerance > 0 ? q.chart->tolerance : ScalarTraits<T>::default_tolerance);
}

}  // namespace

template <class T>
DiracField<T> make_foliation(ChartPtr<T> chart, Subspace<T> f_e, std::optional<bool> closed_leaf) {
  if (f_e.ambient_dim() != chart->algebra.dim()) throw DimensionError("foliation: F_e must be a subspace of g");
  DiracField<T> f;
  f.chart = std::move(chart);
  f.kind = FieldKind::foliation;
  f.distribution = std::move(f_e);
  f.closed_leaf = closed_leaf;
  return f;
}

template <class T>
DiracField<T> make_linear_poisson(ChartPtr<T> chart, LieAlgebra dual) {
  if (!chart->vector_group) throw InputError("poisson_linear needs an abelian vector group, not " + chart->name);
  if (dual.dim() != chart->algebra.dim()) throw DimensionError("poisson_linear: dual bracket has the wrong dimension");
  const auto jac = jacobi_check(dual);
  if (!jac.pass) throw StructureError("poisson_linear: dual bracket fails the Jacobi identity");
  DiracField<T> f;
  f.chart = std::move(chart);
  f.kind = FieldKind::poisson_linear;
  f.dual = std::move(dual);
  return f;
}

template <class T>
DiracField<T> make_coboundary_poisson(ChartPtr<T> chart, RationalVector r) {
  const auto& g = chart->algebra;
  if (r.size() != wedge_dim(g.dim())) throw DimensionError("poisson_coboundary: r must lie in Λ²g");
  if (!is_ad_invariant_trivector(g, schouten_square(g, r)))
    throw StructureError("poisson_coboundary: [r, r] is not ad-invariant");
  DiracField<T> f;
  f.chart = std::move(chart);
  f.kind = FieldKind::poisson_coboundary;
  f.r = std::move(r);
  return f;
}

template <class T>
DiracField<T> make_two_form_graph(ChartPtr<T> chart, RationalVector w) {
  if (w.size() != wedge_dim(chart->algebra.dim())) throw DimensionError("two_form_graph: W must lie in Λ²g*");
  DiracField<T> f;
  f.chart = std::move(chart);
  f.kind = FieldKind::two_form_graph;
  f.w = std::move(w);
  return f;
}

template <class T>
DiracField<T> make_pullback(HomPtr<T> hom, const DiracField<T>& base) {
  DiracField<T> f;
  f.chart = hom->source;
  f.kind = FieldKind::pullback;
  f.hom = std::move(hom);
  f.base = std::make_shared<const DiracField<T>>(base);
  return f;
}

template <class T>
DiracSubspace<T> evaluate(const DiracField<T>& f, const GroupPoint<T>& g) {
  if (g.chart != f.chart) throw InputError("evaluate: point is not on the group of the field");
  const std::size_t n = f.chart->algebra.dim();
  switch (f.kind) {
    case FieldKind::foliation:
      return from_distribution(f.distribution);
    case FieldKind::poisson_linear: {
      Matrix<T> p(n, n);
      for (auto [j, k] : wedge_pairs(n)) {
        T s(0);
        for (std::size_t i = 0; i < n; ++i) s += ScalarTraits<T>::from_rational(f.dual.constant(j, k, i)) * g.params[i];
        p(j, k) = s;
        p(k, j) = -s;
      }
      return from_bivector(p);
    }
    case FieldKind::poisson_coboundary: {
      const auto a = adjoint(inverse(g));
      const auto rm = wedge_matrix<T>(n, f.r);
      return from_bivector(a * rm * a.transpose() - rm);
    }
    case FieldKind::two_form_graph:
      return from_two_form(wedge_matrix<T>(n, f.w));
    case FieldKind::pullback: {
      const auto y = apply(*f.hom, g);
      const auto img = backward_image(left_differential(*f.hom, g), evaluate(*f.base, y));
      if (!img.is_dirac) throw StructureError("pullback: backward image is not a Dirac structure");
      return img.as_dirac();
    }
    case FieldKind::quotient:
      return quotient_value(f, GroupPoint<T>(f.hom->source, f.hom->lift(g.params)));
  }
  throw StructureError("evaluate: unknown field kind");
}

template <class T>
std::optional<unsigned> degree_bound(const DiracField<T>& f) {
  const auto ad = f.chart->ad_degree;
  switch (f.kind) {
    case FieldKind::foliation:
      return ad;
    case FieldKind::poisson_linear:
      if (!ad) return std::nullopt;
      return std::max(1u, *ad);
    case FieldKind::poisson_coboundary:
    case FieldKind::two_form_graph:
      if (!ad) return std::nullopt;
      return 2 * *ad;
    case FieldKind::pullback: {
      const auto inner = degree_bound(*f.base);
      if (!ad || !inner) return std::nullopt;
      return std::max(*ad, *inner * f.hom->map_degree);
    }
    case FieldKind::quotient:
      return std::nullopt;
  }
  return std::nullopt;
}

template <class T>
std::optional<bool> declared_closed_kernel(const DiracField<T>& f) {
  if (f.chart->connected_subgroups_closed) return true;
  if (f.kind == FieldKind::foliation) return f.closed_leaf;
  return std::nullopt;
}

template <class T>
std::vector<Params<T>> sample_points(const GroupChart<T>& chart, std::size_t copies, std::optional<unsigned> degree,
                                     const SamplingOptions& options, SamplingSummary& summary) {
  summary = SamplingSummary{};
  summary.seed = options.seed;
  summary.degree_bound = degree;
  summary.exact = ScalarTraits<T>::exact;
  summary.tolerance = tolerance_for(chart, options);
  std::vector<Params<T>> out;
  const std::size_t p = chart.param_dim;
  const std::size_t coords = copies * p;

  if (ScalarTraits<T>::exact && degree && options.grid) {
    const std::size_t count = *degree + 1;
    std::size_t total = 1;
    bool fits = true;
    for (std::size_t c = 0; c < coords; ++c) {
      if (total > options.grid_cap / count) {
        fits = false;
        break;
      }
      total *= count;
    }
    if (fits && total <= options.grid_cap) {
      std::vector<std::vector<T>> values;
      for (std::size_t c = 0; c < coords; ++c) values.push_back(chart.grid_values(c % p, count));
      std::vector<std::size_t> digit(coords, 0);
      for (std::size_t idx = 0; idx < total; ++idx) {
        Params<T> pt;
        for (std::size_t c = 0; c < coords; ++c) pt.push_back(values[c][digit[c]]);
        out.push_back(std::move(pt));
        for (std::size_t c = coords; c-- > 0;) {
          if (++digit[c] < count) break;
          digit[c] = 0;
        }
      }
      summary.grid_points = total;
      summary.conclusive = true;
    }
  }

  Rng rng(options.seed);
  for (std::size_t s = 0; s < options.samples; ++s) {
    Params<T> pt;
    for (std::size_t c = 0; c < copies; ++c) {
      const auto one = chart.sample(rng);
      pt.insert(pt.end(), one.begin(), one.end());
    }
    out.push_back(std::move(pt));
  }
  summary.random_samples = options.samples;
  return out;
}

template <class T>
Subspace<T> product_space(const DiracField<T>& f, const GroupPoint<T>& g, const GroupPoint<T>& h) {
  const std::size_t n = f.chart->algebra.dim();
  const auto lg = evaluate(f, g).space();
  const auto lh = evaluate(f, h).space();
  const auto at = adjoint(inverse(h)).transpose();

  // Coefficients (c, d) with s(sum c_i ξ_i) = t(sum d_j η_j).
  Matrix<T> constraint(n, lg.dim() + lh.dim());
  for (std::size_t i = 0; i < lg.dim(); ++i)
    for (std::size_t k = 0; k < n; ++k) constraint(k, i) = lg.basis()(i, n + k);
  for (std::size_t j = 0; j < lh.dim(); ++j) {
    const auto tb = at * slice(lh.basis_vector(j), n, n);
    for (std::size_t k = 0; k < n; ++k) constraint(k, lg.dim() + j) = -tb[k];
  }
  const auto pairs = linalg::kernel(constraint);

  std::vector<Vector<T>> rows;
  for (std::size_t p = 0; p < pairs.dim(); ++p) {
    Vector<T> xi(2 * n, T(0)), eta(2 * n, T(0));
    for (std::size_t i = 0; i < lg.dim(); ++i)
      xi = linalg::add(xi, linalg::scale(pairs.basis()(p, i), lg.basis_vector(i)));
    for (std::size_t j = 0; j < lh.dim(); ++j)
      eta = linalg::add(eta, linalg::scale(pairs.basis()(p, lg.dim() + j), lh.basis_vector(j)));
    const auto a = generalized_from_left(g, slice(xi, 0, n), slice(xi, n, n));
    const auto b = generalized_from_left(h, slice(eta, 0, n), slice(eta, n, n));
    const auto z = gt_product(a, b);
    rows.push_back(concat(left_coords(z.base, z.tangent), covector_values(z.base, z.covector)));
  }
  return Subspace<T>::span(2 * n, rows);
}

template <class T>
MultiplicativityReport check_multiplicative(const DiracField<T>& f, const SamplingOptions& options) {
  MultiplicativityReport report;
  const auto& chart = *f.chart;
  const auto points = sample_points(chart, 2, degree_bound(f), options, report.sampling);
  const double tol = report.sampling.tolerance;
  const std::size_t p = chart.param_dim;
  for (const auto& pt : points) {
    const GroupPoint<T> g(f.chart, split_params(pt, 0, p));
    const GroupPoint<T> h(f.chart, split_params(pt, 1, p));
    const auto products = product_space(f, g, h);
    const auto target = evaluate(f, multiply(g, h)).space();
    double residual = 0.0;
    std::string detail;
    const bool ok = compare_spaces(products, target, tol, residual, detail, "the product space", "L_gh");
    if (std::isfinite(residual)) report.sampling.max_residual = std::max(report.sampling.max_residual, residual);
    if (!ok) {
      report.pass = false;
      if (!report.witness) report.witness = PointWitness{format_params(g.params), format_params(h.params), detail, residual};
      if (!std::isfinite(residual)) report.sampling.max_residual = residual;
    }
  }
  return report;
}

template <class T>
DistributionReport check_multiplicative_distribution(const ChartPtr<T>& chart, const Subspace<T>& f_e,
                                                     const SamplingOptions& options) {
  if (f_e.ambient_dim() != chart->algebra.dim()) throw DimensionError("check_distribution: F_e must lie in g");
  DistributionReport report;
  const auto points = sample_points(*chart, 1, chart->ad_degree, options, report.sampling);
  const double tol = report.sampling.tolerance;
  const auto e = identity_point(chart);
  for (const auto& pt : points) {
    const GroupPoint<T> g(chart, pt);
    std::vector<Vector<T>> left, right;
    for (std::size_t i = 0; i < f_e.dim(); ++i) {
      const TangentVector<T> x{e, from_left(e, f_e.basis_vector(i))};
      left.push_back(left_coords(g, dL(g, x).value));
      right.push_back(left_coords(g, dR(g, x).value));
    }
    const auto lspace = Subspace<T>::span(f_e.ambient_dim(), left);
    const auto rspace = Subspace<T>::span(f_e.ambient_dim(), right);
    double residual = 0.0;
    std::string detail;
    const bool ok = compare_spaces(rspace, lspace, tol, residual, detail, "dR_g F_e", "dL_g F_e");
    if (std::isfinite(residual)) report.sampling.max_residual = std::max(report.sampling.max_residual, residual);
    if (!ok) {
      report.bi_invariant = false;
      if (!report.witness) report.witness = PointWitness{format_params(g.params), {}, detail, residual};
    }
  }
  report.ad_invariant = is_ad_invariant<T>(chart->algebra, f_e, std::max(tol, ScalarTraits<T>::default_tolerance));
  report.agree = report.bi_invariant == report.ad_invariant;
  report.pass = report.bi_invariant && report.ad_invariant;
  return report;
}

template <class T>
DiracField<T> pullback_field(const HomPtr<T>& hom, const DiracField<T>& base, const SamplingOptions& options) {
  if (hom->target != base.chart)
    throw InputError("pullback: " + hom->name + " does not map into the group of the base field (" +
                     base.chart->name + ")");
  if (!is_submersion(*hom)) throw StructureError("pullback: " + hom->name + " is not a submersion");
  auto report = check_multiplicative(base, options);
  if (!report.pass) throw MultiplicativityError("pullback: the base field is not multiplicative", std::move(report));
  return make_pullback(hom, base);
}

template <class T>
CharacteristicReport<T> characteristic_distribution(const DiracField<T>& f, const SamplingOptions& options) {
  CharacteristicReport<T> report;
  const auto& chart = f.chart;
  const auto e = identity_point(chart);
  report.k_e = dirac_kernel(evaluate(f, e));
  report.rank = report.k_e.dim();
  const auto points = sample_points(*chart, 1, degree_bound(f), options, report.sampling);
  const double tol = report.sampling.tolerance;
  const std::size_t n = chart->algebra.dim();

  for (const auto& pt : points) {
    const GroupPoint<T> g(chart, pt);
    const auto ker = dirac_kernel(evaluate(f, g));
    if (ker.dim() != report.rank) {
      report.constant_rank = false;
      throw RankJumpError("characteristic distribution: kernel rank " + std::to_string(report.rank) +
                          " at e but " + std::to_string(ker.dim()) + " at g = " + format_vector(g.params));
    }
    std::vector<Vector<T>> left, right;
    for (std::size_t i = 0; i < report.k_e.dim(); ++i) {
      const TangentVector<T> x{e, from_left(e, report.k_e.basis_vector(i))};
      left.push_back(left_coords(g, dL(g, x).value));
      right.push_back(left_coords(g, dR(g, x).value));
    }
    const auto lspace = Subspace<T>::span(n, left);
    const auto rspace = Subspace<T>::span(n, right);
    for (auto [space, flag, name] : {std::tuple{&lspace, &report.left_coset, "dL_g k_e"},
                                     std::tuple{&rspace, &report.right_coset, "dR_g k_e"}}) {
      double residual = 0.0;
      std::string detail;
      const bool ok = compare_spaces(*space, ker, tol, residual, detail, name, "ker L_g");
      if (std::isfinite(residual)) report.sampling.max_residual = std::max(report.sampling.max_residual, residual);
      if (!ok) {
        *flag = false;
        if (!report.witness) report.witness = PointWitness{format_params(g.params), {}, detail, residual};
      }
    }
  }
  if constexpr (ScalarTraits<T>::exact) {
    const auto ideal = is_ideal(chart->algebra, report.k_e);
    report.ideal = ideal.pass;
    if (!ideal.pass && !report.witness)
      report.witness = PointWitness{{}, {}, "[e_" + std::to_string(ideal.algebra_index) + ", " +
                                                format_vector(ideal.element) + "] = " +
                                                format_vector(ideal.bracket_value) + " is not in k_e", 0.0};
  } else {
    report.ideal = is_ad_invariant<T>(chart->algebra, report.k_e, std::max(tol, ScalarTraits<T>::default_tolerance));
    if (!report.ideal && !report.witness) report.witness = PointWitness{{}, {}, "k_e is not ad-invariant", 0.0};
  }
  report.pass = report.constant_rank && report.left_coset && report.right_coset && report.ideal;
  return report;
}

template <class T>
Subspace<T> hom_kernel(const Homomorphism<T>& hom) {
  return linalg::kernel(left_differential(hom, identity_point(hom.source)));
}

namespace {

template <class T>
bool same_values(const Subspace<T>& a, const Subspace<T>& b, double tol) {
  if constexpr (ScalarTraits<T>::exact) {
    (void)tol;
    return a == b;
  } else {
    return linalg::same_subspace(a, b, std::max(tol, ScalarTraits<T>::default_tolerance));
  }
}

template <class T>
T to_scalar_rational(const T& x, Rational& out) {
  if constexpr (ScalarTraits<T>::exact) {
    out = x;
  } else {
    out = rationalize(x);
  }
  return x;
}

template <class T>
RationalMatrix as_rational(const Matrix<T>& m) {
  if constexpr (ScalarTraits<T>::exact) {
    return m;
  } else {
    return rationalize(m);
  }
}

template <class T>
RationalSubspace as_rational(const Subspace<T>& s) {
  if constexpr (ScalarTraits<T>::exact) {
    return s;
  } else {
    return RationalSubspace::from_rows(rationalize(s.basis()));
  }
}

// A closed-form Poisson field on the target agreeing with q at every point
// of `ys`, or q itself when no closed form fits.
template <class T>
DiracField<T> recognize(const DiracField<T>& q, const std::vector<GroupPoint<T>>& ys, double tol) {
  const auto& chart = q.chart;
  const std::size_t n = chart->algebra.dim();
  std::optional<DiracField<T>> candidate;
  auto bivector_at = [&q](const GroupPoint<T>& y) {
    auto p = bivector_of(evaluate(q, y));
    if (!p) throw StructureError("quotient: forward image is not the graph of a bivector");
    return *p;
  };
  try {
    if (wedge_dim(n) == 0) {
      candidate = chart->vector_group ? make_linear_poisson(chart, catalog::abelian(n))
                                      : make_coboundary_poisson(chart, RationalVector{});
    } else if (chart->vector_group) {
      LieAlgebra dual("quotient*", n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto p = bivector_at(GroupPoint<T>(chart, linalg::unit_vector<T>(n, i)));
        for (auto [j, k] : wedge_pairs(n)) {
          Rational c;
          to_scalar_rational(p(j, k), c);
          if (sgn(c) == 0) continue;
          auto v = dual.basis_bracket(j, k);
          v[i] = c;
          dual.set_bracket(j, k, v);
        }
      }
      candidate = make_linear_poisson(chart, std::move(dual));
    } else {
      // π^L(y) = Ad_{y⁻¹} r Ad_{y⁻¹}ᵀ - r is linear in r.
      const std::size_t c = wedge_dim(n);
      Matrix<T> system(c * ys.size(), c);
      Vector<T> rhs;
      for (std::size_t s = 0; s < ys.size(); ++s) {
        const auto a = adjoint(inverse(ys[s]));
        for (std::size_t col = 0; col < c; ++col) {
          RationalVector unit(c, Rational(0));
          unit[col] = 1;
          const auto rm = wedge_matrix<T>(n, unit);
          const auto moved = matrix_wedge(Matrix<T>(a * rm * a.transpose() - rm));
          for (std::size_t row = 0; row < c; ++row) system(s * c + row, col) = moved[row];
        }
        const auto w = matrix_wedge(bivector_at(ys[s]));
        rhs.insert(rhs.end(), w.begin(), w.end());
      }
      const auto r = linalg::solve(system, rhs);
      if (r) {
        RationalVector rr;
        for (const auto& x : *r) {
          Rational v;
          to_scalar_rational(x, v);
          rr.push_back(v);
        }
        candidate = make_coboundary_poisson(chart, std::move(rr));
      }
    }
  } catch (const StructureError&) {
    candidate.reset();
  }
  if (!candidate) return q;
  for (const auto& y : ys)
    if (!same_values(evaluate(*candidate, y).space(), evaluate(q, y).space(), tol)) return q;
  return *candidate;
}

template <class T>
HomPtr<T> find_quotient_hom(const ChartPtr<T>& chart, const Subspace<T>& k_e, double tol) {
  for (const auto& h : catalog_registry<T>().homs_from(chart->name)) {
    if (h->source != chart) continue;
    if (same_values(hom_kernel(*h), k_e, tol) && is_submersion(*h)) return h;
  }
  return nullptr;
}

}  // namespace

template <class T>
QuotientResult<T> quotient_poisson(const DiracField<T>& f, HomPtr<T> hom, const SamplingOptions& options) {
  QuotientResult<T> out;
  out.characteristic = characteristic_distribution(f, options);
  const auto& ch = out.characteristic;
  if (!ch.pass)
    throw StructureError("quotient: characteristic distribution check failed" +
                         (ch.witness ? ": " + ch.witness->detail : std::string()));
  const auto& chart = f.chart;
  const std::size_t n = chart->algebra.dim();
  const double tol = tolerance_for(*chart, options);

  if (ch.k_e.dim() > 0 && ch.k_e.dim() < n) {
    const auto closed = declared_closed_kernel(f);
    if (!closed)
      throw InputError("quotient: group " + chart->name +
                       " requires the closedness of the characteristic subgroup to be declared");
    if (!*closed)
      throw NonClosedSubgroupError("non-closed characteristic subgroup: the characteristic leaf through e is not closed, "
                                   "so the leaf space is not a manifold");
  }

  if (hom) {
    if (hom->source != chart) throw InputError("quotient: " + hom->name + " does not start at " + chart->name);
    if (!same_values(hom_kernel(*hom), ch.k_e, tol))
      throw LeafSpaceError("leaf space not realized: ker d" + hom->name + "(e) differs from k_e");
    if (!is_submersion(*hom)) throw LeafSpaceError("leaf space not realized: " + hom->name + " is not a submersion");
  } else {
    hom = find_quotient_hom(chart, ch.k_e, tol);
    if (!hom)
      throw LeafSpaceError("leaf space not realized: no registered homomorphism from " + chart->name +
                           " has kernel k_e");
  }
  out.hom = hom;
  out.report.hom = hom->name;

  DiracField<T> q;
  q.chart = hom->target;
  q.kind = FieldKind::quotient;
  q.hom = hom;
  q.base = std::make_shared<const DiracField<T>>(f);

  SamplingSummary summary;
  const auto points = sample_points(*chart, 1, degree_bound(f), options, summary);
  out.report.points = points.size();
  std::vector<GroupPoint<T>> ys;
  for (const auto& pt : points) {
    const GroupPoint<T> g(chart, pt);
    const auto y = apply(*hom, g);
    ys.push_back(y);
    const auto img = forward_image(left_differential(*hom, g), evaluate(f, g));
    std::string problem;
    if (!img.is_dirac) {
      out.report.graph_of_bivector = false;
      problem = "forward image is not a Dirac structure";
    } else if (dirac_kernel(img.as_dirac()).dim() != 0) {
      out.report.graph_of_bivector = false;
      problem = "forward image has a nonzero kernel";
    } else if (!same_values(img.space, evaluate(q, y).space(), tol)) {
      out.report.well_defined = false;
      problem = "forward image differs from the value at the lifted point of the same fibre";
    }
    if (!problem.empty() && !out.report.witness)
      out.report.witness = PointWitness{format_params(g.params), {}, problem, 0.0};
  }
  if (!out.report.graph_of_bivector || !out.report.well_defined) {
    out.report.pass = false;
    out.poisson = q;
    out.report.recognized = to_string(q.kind);
    return out;
  }

  out.poisson = recognize(q, ys, tol);
  out.report.recognized = to_string(out.poisson.kind);
  out.report.multiplicativity = check_multiplicative(out.poisson, options);
  out.report.multiplicative = out.report.multiplicativity.pass;

  const auto back = make_pullback(hom, out.poisson);
  for (const auto& pt : points) {
    const GroupPoint<T> g(chart, pt);
    if (!same_values(evaluate(back, g).space(), evaluate(f, g).space(), tol)) {
      out.report.round_trip = false;
      if (!out.report.witness)
        out.report.witness = PointWitness{format_params(g.params), {}, "pullback of the quotient differs from L_g", 0.0};
    }
  }
  out.report.pass = out.report.multiplicative && out.report.round_trip;
  return out;
}

linalg::Matrix<double> finite_difference_cobracket(const DiracField<double>& poisson, double step, double* residual) {
  const auto& chart = poisson.chart;
  if (!chart->exp) throw StructureError("linearize: chart " + chart->name + " has no exponential");
  const std::size_t n = chart->algebra.dim();
  auto right_bivector = [&](const Vector<double>& x) {
    const GroupPoint<double> y(chart, chart->exp(x));
    const auto p = bivector_of(evaluate(poisson, y));
    if (!p) throw StructureError("linearize: field is not the graph of a bivector near e");
    const auto a = adjoint(y);
    return Matrix<double>(a * *p * a.transpose());
  };
  auto central = [&](std::size_t i, double t) {
    const auto plus = right_bivector(linalg::scale(t, linalg::unit_vector<double>(n, i)));
    const auto minus = right_bivector(linalg::scale(-t, linalg::unit_vector<double>(n, i)));
    return (1.0 / (2.0 * t)) * (plus - minus);
  };
  Matrix<double> out(n, wedge_dim(n));
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto coarse = central(i, step);
    const auto fine = central(i, step / 2.0);
    const auto refined = (1.0 / 3.0) * (4.0 * fine - coarse);
    worst = std::max(worst, linalg::max_abs(refined - fine));
    const auto w = matrix_wedge(refined);
    for (std::size_t c = 0; c < w.size(); ++c) out(i, c) = w[c];
  }
  if (residual) *residual = worst;
  return out;
}

template <class T>
Cobracket linearize(const DiracField<T>& poisson, double* residual) {
  const auto& g = poisson.chart->algebra;
  const std::size_t n = g.dim();
  if (residual) *residual = 0.0;
  if (wedge_dim(n) == 0) return Cobracket(g);
  switch (poisson.kind) {
    case FieldKind::poisson_linear: {
      Cobracket cb(g);
      for (std::size_t i = 0; i < n; ++i)
        for (auto [j, k] : wedge_pairs(n)) cb.set(i, j, k, poisson.dual.constant(j, k, i));
      return cb;
    }
    case FieldKind::poisson_coboundary: {
      // d/dt (r - Ad_exp(tx) r) = -ad_x r
      const auto d = coboundary(g, poisson.r);
      return Cobracket(g, Rational(-1) * d.coefficients());
    }
    default:
      break;
  }
  if constexpr (ScalarTraits<T>::exact) {
    throw StructureError("linearize: no exact linearization for a " + to_string(poisson.kind) + " field");
  } else {
    return Cobracket(g, rationalize(finite_difference_cobracket(poisson, 1e-5, residual), 1e-6));
  }
}

template <class T>
InfinitesimalData extract_infinitesimal_data(const DiracField<T>& f, const SamplingOptions& options) {
  const auto q = quotient_poisson(f, HomPtr<T>{}, options);
  if (!q.report.pass)
    throw StructureError("extract: the quotient Poisson structure failed its checks" +
                         (q.report.witness ? ": " + q.report.witness->detail : std::string()));
  InfinitesimalData out;
  out.algebra = f.chart->algebra;
  out.k = as_rational(q.characteristic.k_e);
  const bool closed_form =
      q.poisson.kind == FieldKind::poisson_linear || q.poisson.kind == FieldKind::poisson_coboundary;
  out.method = closed_form ? "exact" : "finite-difference";
  const auto delta_h = linearize(q.poisson, &out.linearization_residual);

  const auto quot = quotient(out.algebra, out.k);
  const auto dphi = as_rational(left_differential(*q.hom, identity_point(f.chart)));
  const auto m = dphi * quot.section;  // g/k -> h
  out.cobracket = transport(delta_h, linalg::inverse(m), quot.algebra);
  out.check = infinitesimal_data_check(out.algebra, out.k, out.cobracket);
  return out;
}

DiracField<Rational> integrate_infinitesimal_data(const ChartPtr<Rational>& chart, const RationalSubspace& k,
                                                  const Cobracket& cb, const SamplingOptions& options) {
  const auto& g = chart->algebra;
  const auto check = infinitesimal_data_check(g, k, cb);
  if (!check.pass) throw StructureError("integrate: infinitesimal data check failed at the " + check.failure + " step");
  const auto hom = find_quotient_hom(chart, k, 0.0);
  if (!hom)
    throw IntegrationUnavailableError("integration not available in catalog: no registered homomorphism from " +
                                      chart->name + " has kernel k");
  const auto quot = quotient(g, k);
  const auto m = left_differential(*hom, identity_point(chart)) * quot.section;
  const auto& target = hom->target;
  const auto delta_h = transport(cb, m, target->algebra);
  const std::size_t n = target->algebra.dim();

  DiracField<Rational> poisson;
  if (target->vector_group) {
    poisson = make_linear_poisson(target, dual_bracket(delta_h));
  } else {
    // δ_h(e_i) = -ad_{e_i} r, linear in r.
    const std::size_t c = wedge_dim(n);
    RationalMatrix system(n * c, c);
    RationalVector rhs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t col = 0; col < c; ++col) {
        const auto d = ad_on_wedge(target->algebra, linalg::unit_vector<Rational>(n, i),
                                   linalg::unit_vector<Rational>(c, col));
        for (std::size_t row = 0; row < c; ++row) system(i * c + row, col) = -d[row];
      }
      const auto v = delta_h.of_basis(i);
      rhs.insert(rhs.end(), v.begin(), v.end());
    }
    const auto r = linalg::solve(system, rhs);
    if (!r)
      throw IntegrationUnavailableError("integration not available in catalog: the cobracket on " + target->name +
                                        " is not a coboundary");
    try {
      poisson = make_coboundary_poisson(target, *r);
    } catch (const StructureError& e) {
      throw IntegrationUnavailableError(std::string("integration not available in catalog: ") + e.what());
    }
  }
  return pullback_field(hom, poisson, options);
}

TwoFormSolution solve_multiplicative_two_forms(const ChartPtr<Rational>& chart, const SamplingOptions& options) {
  if (chart->mode != ArithmeticMode::exact) throw InputError("solve-two-forms needs an exact chart");
  TwoFormSolution out;
  const std::size_t n = chart->algebra.dim();
  const std::size_t p = chart->param_dim;
  const std::size_t c = wedge_dim(n);
  SamplingOptions local = options;
  local.grid = false;
  const auto pairs = sample_points(*chart, 2, std::nullopt, local, out.sampling);
  out.pairs = pairs.size();

  std::vector<Params<Rational>> points;
  auto index_of = [&points](const Params<Rational>& q) {
    for (std::size_t i = 0; i < points.size(); ++i)
      if (points[i] == q) return i;
    points.push_back(q);
    return points.size() - 1;
  };

  struct Term {
    std::size_t point;
    Vector<Rational> u, v;
    Rational sign;
  };
  std::vector<std::vector<Term>> equations;
  for (const auto& pt : pairs) {
    const GroupPoint<Rational> g(chart, split_params(pt, 0, p));
    const GroupPoint<Rational> h(chart, split_params(pt, 1, p));
    const auto gh = multiply(g, h);
    const std::size_t ig = index_of(g.params), ih = index_of(h.params), igh = index_of(gh.params);
    // Basis of T_g ⊕ T_h in left coordinates and its image under dm.
    std::vector<Vector<Rational>> xs, ys, zs;
    for (std::size_t b = 0; b < 2 * n; ++b) {
      Vector<Rational> x(n, Rational(0)), y(n, Rational(0));
      (b < n ? x[b] : y[b - n]) = 1;
      const auto prod = tangent_group_product(TangentVector<Rational>{g, from_left(g, x)},
                                              TangentVector<Rational>{h, from_left(h, y)});
      xs.push_back(x);
      ys.push_back(y);
      zs.push_back(left_coords(prod.base, prod.value));
    }
    for (std::size_t a = 0; a < 2 * n; ++a)
      for (std::size_t b = a + 1; b < 2 * n; ++b)
        equations.push_back({Term{igh, zs[a], zs[b], Rational(1)}, Term{ig, xs[a], xs[b], Rational(-1)},
                             Term{ih, ys[a], ys[b], Rational(-1)}});
  }
  out.points = points.size();
  out.unknowns = points.size() * c;
  out.equations = equations.size();
  RationalMatrix system(equations.size(), out.unknowns);
  for (std::size_t e = 0; e < equations.size(); ++e)
    for (const auto& t : equations[e]) {
      std::size_t idx = 0;
      for (auto [j, k] : wedge_pairs(n)) {
        // uᵀ W v with W antisymmetric
        system(e, t.point * c + idx) += t.sign * (t.u[j] * t.v[k] - t.u[k] * t.v[j]);
        ++idx;
      }
    }
  out.solutions = linalg::kernel(system);
  out.solution_dim = out.solutions.dim();
  return out;
}

Rational rationalize(double x, double tol) {
  if (!std::isfinite(x)) throw StructureError("rationalize: value is not finite");
  mpz_class h_prev(1), h_prev2(0), k_prev(0), k_prev2(1);
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_d = std::floor(r);
    const mpz_class a(a_d);
    const mpz_class h = a * h_prev + h_prev2;
    const mpz_class k = a * k_prev + k_prev2;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    Rational q(h, k);
    q.canonicalize();
    if (std::abs(q.get_d() - x) <= tol) return q;
    const double frac = r - a_d;
    if (frac == 0.0) return q;
    r = 1.0 / frac;
  }
  throw StructureError("rationalize: no rational approximation within tolerance");
}

RationalMatrix rationalize(const Matrix<double>& m, double tol) {
  RationalMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = rationalize(m(i, j), tol);
  return out;
}

#define DIRAC_INSTANTIATE_FIELD(T)                                                                              \
  template DiracField<T> make_foliation(ChartPtr<T>, Subspace<T>, std::optional<bool>);                         \
  template DiracField<T> make_linear_poisson(ChartPtr<T>, LieAlgebra);                                          \
  template DiracField<T> make_coboundary_poisson(ChartPtr<T>, RationalVector);                                  \
  template DiracField<T> make_two_form_graph(ChartPtr<T>, RationalVector);                                      \
  template DiracField<T> make_pullback(HomPtr<T>, const DiracField<T>&);                                        \
  template DiracSubspace<T> evaluate(const DiracField<T>&, const GroupPoint<T>&);                               \
  template std::optional<unsigned> degree_bound(const DiracField<T>&);                                          \
  template std::optional<bool> declared_closed_kernel(const DiracField<T>&);                                    \
  template std::vector<Params<T>> sample_points(const GroupChart<T>&, std::size_t, std::optional<unsigned>,     \
                                                const SamplingOptions&, SamplingSummary&);                      \
  template Subspace<T> product_space(const DiracField<T>&, const GroupPoint<T>&, const GroupPoint<T>&);         \
  template MultiplicativityReport check_multiplicative(const DiracField<T>&, const SamplingOptions&);           \
  template DistributionReport check_multiplicative_distribution(const ChartPtr<T>&, const Subspace<T>&,         \
                                                                const SamplingOptions&);                        \
  template DiracField<T> pullback_field(const HomPtr<T>&, const DiracField<T>&, const SamplingOptions&);        \
  template CharacteristicReport<T> characteristic_distribution(const DiracField<T>&, const SamplingOptions&);   \
  template Subspace<T> hom_kernel(const Homomorphism<T>&);                                                      \
  template QuotientResult<T> quotient_poisson(const DiracField<T>&, HomPtr<T>, const SamplingOptions&);         \
  template Cobracket linearize(const DiracField<T>&, double*);                                                  \
  template InfinitesimalData extract_infinitesimal_data(const DiracField<T>&, const SamplingOptions&);

DIRAC_INSTANTIATE_FIELD(Rational)
DIRAC_INSTANTIATE_FIELD(double)

#undef DIRAC_INSTANTIATE_FIELD

}  // namespace dirac
