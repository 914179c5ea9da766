#pragma once

// Matrix Lie groups given by closed-form charts, their tangent and cotangent
// translations, and the groupoid TG ⊕ T*G. Exact charts compute over Q;
// transcendental charts (torus2) compute in double with a per-chart tolerance.
//
// Conventions:
//   dL_g X = g X,  dR_h X = X h
//   covectors α on T_gG are matrices A with α(X) = tr(AᵀX), canonicalized to
//   lie in T_gG itself
//   source s(α_g) = (dL_g)*α_g, target t(α_g) = (dR_g)*α_g, both in g*
//   (α_g, β_h) composable iff s(α_g) = t(β_h)

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dirac/lie_algebra.hpp"
#include "dirac/linalg.hpp"

namespace dirac {

enum class ArithmeticMode { exact, floating };

using Rng = std::mt19937_64;

template <class T>
using Params = std::vector<T>;

template <class T>
struct GroupChart {
  std::string name;
  std::size_t matrix_size = 0;
  std::size_t param_dim = 0;
  LieAlgebra algebra;
  std::vector<linalg::Matrix<T>> basis;  // spans T_eG; commutators reproduce `algebra`
  Params<T> identity;

  std::function<linalg::Matrix<T>(const Params<T>&)> embed;
  std::function<Params<T>(const Params<T>&, const Params<T>&)> multiply;
  std::function<Params<T>(const Params<T>&)> inverse;
  std::function<Params<T>(Rng&)> sample;
  /// `count` distinct admissible values for coordinate `coord`, small integers
  /// (or small positive rationals for multiplicative coordinates).
  std::function<std::vector<T>(std::size_t coord, std::size_t count)> grid_values;
  /// Closed-form exponential in parameters, when available in this arithmetic.
  std::function<Params<T>(const linalg::Vector<T>&)> exp;

  /// Per-variable degree of the entries of Ad_g as polynomials in the
  /// parameters; empty when Ad is not polynomial.
  std::optional<unsigned> ad_degree;
  /// Parameters add and T_gG ≅ g by the parameter frame (abelian vector groups).
  bool vector_group = false;
  /// Every connected subgroup is closed (true for the simply connected
  /// solvable charts). When false, closedness must be declared per input.
  bool connected_subgroups_closed = true;

  ArithmeticMode mode = ArithmeticMode::exact;
  double tolerance = 0.0;
};

template <class T>
using ChartPtr = std::shared_ptr<const GroupChart<T>>;

template <class T>
struct GroupPoint {
  ChartPtr<T> chart;
  Params<T> params;

  GroupPoint() = default;
  GroupPoint(ChartPtr<T> c, Params<T> p);
};

template <class T>
GroupPoint<T> identity_point(const ChartPtr<T>& chart);
template <class T>
GroupPoint<T> multiply(const GroupPoint<T>& g, const GroupPoint<T>& h);
template <class T>
GroupPoint<T> inverse(const GroupPoint<T>& g);
template <class T>
linalg::Matrix<T> embed(const GroupPoint<T>& g);
template <class T>
bool same_point(const GroupPoint<T>& a, const GroupPoint<T>& b);

/// g E_i for the chart basis E_i.
template <class T>
std::vector<linalg::Matrix<T>> tangent_basis(const GroupPoint<T>& g);

/// Left-frame coordinates x with X = g·sum x_i E_i. Throws StructureError
/// when X is not tangent at g.
template <class T>
linalg::Vector<T> left_coords(const GroupPoint<T>& g, const linalg::Matrix<T>& x);

template <class T>
linalg::Matrix<T> from_left(const GroupPoint<T>& g, const linalg::Vector<T>& coords);

/// Matrix of Ad_g on g in the chart basis.
template <class T>
linalg::Matrix<T> adjoint(const GroupPoint<T>& g);

template <class T>
struct TangentVector {
  GroupPoint<T> base;
  linalg::Matrix<T> value;
};

/// Validates that `value` is tangent at `base`.
template <class T>
TangentVector<T> make_tangent(const GroupPoint<T>& base, linalg::Matrix<T> value);

template <class T>
TangentVector<T> dL(const GroupPoint<T>& g, const TangentVector<T>& x_h);
template <class T>
TangentVector<T> dR(const GroupPoint<T>& h, const TangentVector<T>& x_g);

/// dm(g,h)(X_g, Y_h) = dR_h X_g + dL_g Y_h.
template <class T>
TangentVector<T> tangent_group_product(const TangentVector<T>& x_g, const TangentVector<T>& y_h);

template <class T>
struct Covector {
  GroupPoint<T> base;
  linalg::Matrix<T> rep;  // canonical representative in T_gG
};

/// The covector at g taking `values[i]` on g E_i.
template <class T>
Covector<T> covector_from_values(const GroupPoint<T>& g, const linalg::Vector<T>& values);
/// Canonicalizes an arbitrary representing matrix.
template <class T>
Covector<T> covector_from_matrix(const GroupPoint<T>& g, const linalg::Matrix<T>& a);
template <class T>
T evaluate(const Covector<T>& alpha, const linalg::Matrix<T>& x);

template <class T>
linalg::Vector<T> cotangent_source(const Covector<T>& alpha);
template <class T>
linalg::Vector<T> cotangent_target(const Covector<T>& alpha);

template <class T>
struct GeneralizedTangent {
  GroupPoint<T> base;
  linalg::Matrix<T> tangent;
  linalg::Matrix<T> covector;  // canonical representative
};

template <class T>
GeneralizedTangent<T> make_generalized(const GroupPoint<T>& base, const linalg::Matrix<T>& tangent,
                                       const linalg::Matrix<T>& covector);
template <class T>
GeneralizedTangent<T> generalized_from_left(const GroupPoint<T>& base, const linalg::Vector<T>& x,
                                            const linalg::Vector<T>& a);

template <class T>
bool gt_composable(const GeneralizedTangent<T>& xi, const GeneralizedTangent<T>& eta);

/// ξ*ξ′: tangent part dm(X, Y), covector γ with γ(dR_h X + dL_g Y) = α(X) + β(Y).
/// Throws StructureError carrying s(α) and t(β) when not composable.
template <class T>
GeneralizedTangent<T> gt_product(const GeneralizedTangent<T>& xi, const GeneralizedTangent<T>& eta);

template <class T>
bool same_generalized(const GeneralizedTangent<T>& a, const GeneralizedTangent<T>& b);

template <class T>
struct Homomorphism {
  std::string name;
  ChartPtr<T> source;
  ChartPtr<T> target;
  std::function<Params<T>(const Params<T>&)> map;
  /// dφ(g) applied to a tangent matrix at g, in closed form.
  std::function<linalg::Matrix<T>(const Params<T>&, const linalg::Matrix<T>&)> differential;
  /// A parameter section: map(lift(y)) = y.
  std::function<Params<T>(const Params<T>&)> lift;
  /// Per-variable degree of `map` (1 for linear maps, 0 for constant maps).
  unsigned map_degree = 1;
};

template <class T>
using HomPtr = std::shared_ptr<const Homomorphism<T>>;

template <class T>
GroupPoint<T> apply(const Homomorphism<T>& phi, const GroupPoint<T>& g);

/// dφ(g) in the left frames of g and φ(g).
template <class T>
linalg::Matrix<T> left_differential(const Homomorphism<T>& phi, const GroupPoint<T>& g);

/// dφ(e) has full row rank (a homomorphism that is a submersion at e is one
/// everywhere; surjectivity follows for connected targets).
template <class T>
bool is_submersion(const Homomorphism<T>& phi);

/// Y = dφ(X) and α = dφ*β. Throws StructureError when ξ is not based at φ(g).
template <class T>
bool phi_related(const Homomorphism<T>& phi, const GeneralizedTangent<T>& eta, const GeneralizedTangent<T>& xi);

/// Registration-time checks: identity embeds to I, multiply/inverse agree with
/// matrix arithmetic on sampled points, basis commutators reproduce the algebra.
template <class T>
void validate_chart(const GroupChart<T>& chart, std::uint64_t seed = 0, std::size_t samples = 8);

template <class T>
class Registry {
 public:
  void add_chart(ChartPtr<T> chart);
  void add_hom(HomPtr<T> hom);

  ChartPtr<T> chart(const std::string& name) const;  // throws InputError
  HomPtr<T> hom(const std::string& name) const;      // throws InputError
  bool has_chart(const std::string& name) const { return charts_.count(name) != 0; }
  std::vector<std::string> chart_names() const;
  std::vector<HomPtr<T>> homs_from(const std::string& source) const;

 private:
  std::map<std::string, ChartPtr<T>> charts_;
  std::map<std::string, HomPtr<T>> homs_;
};

/// The built-in catalog. Exact: heisenberg3, aff1, gl1plus, abelian1..4,
/// trivial. Float: the same charts evaluated in double, plus torus2.
template <class T>
const Registry<T>& catalog_registry();

namespace charts {
template <class T>
ChartPtr<T> heisenberg3();
template <class T>
ChartPtr<T> aff1();
template <class T>
ChartPtr<T> gl1plus();
template <class T>
ChartPtr<T> abelian(std::size_t n);
template <class T>
ChartPtr<T> trivial();
ChartPtr<double> torus2();
}  // namespace charts

/// A small random rational: numerator in [-6, 6], denominator in [1, 4].
Rational random_rational(Rng& rng);
Rational random_positive_rational(Rng& rng);
double random_unit(Rng& rng);  // uniform in [0, 1)

std::vector<std::string> format_params(const Params<Rational>& p);
std::vector<std::string> format_params(const Params<double>& p);

}  // namespace dirac
