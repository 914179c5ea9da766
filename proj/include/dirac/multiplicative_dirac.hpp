#pragma once

// Dirac structures on catalog groups, stored pointwise in the left-translated
// frame: T_gG ≅ g by dL_g and T*_gG ≅ g* by (dL_g)*. In that frame the groupoid
// product of (x, a) at g and (y, b) at h is (Ad_{h⁻¹}x + y, b), defined when
// a = Ad_{h⁻¹}ᵀ b.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dirac/group_catalog.hpp"
#include "dirac/lie_bialgebra.hpp"
#include "dirac/linear_dirac.hpp"

namespace dirac {

enum class FieldKind { foliation, poisson_linear, poisson_coboundary, two_form_graph, pullback, quotient };

std::string to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& name);  // throws InputError

template <class T>
struct DiracField {
  ChartPtr<T> chart;
  FieldKind kind = FieldKind::foliation;

  linalg::Subspace<T> distribution;  // foliation: F_e
  std::optional<bool> closed_leaf;   // foliation: declared closedness of the leaf through e
  LieAlgebra dual;                   // poisson_linear: bracket on g*, π^{jk}(x) = sum_i c^{jk}_i x_i
  RationalVector r;                  // poisson_coboundary: r in Λ²g
  RationalVector w;                  // two_form_graph: left-invariant W in Λ²g*
  HomPtr<T> hom;                     // pullback: G -> base group; quotient: source group -> G
  std::shared_ptr<const DiracField<T>> base;  // pullback: field on the target; quotient: field on the source
};

template <class T>
DiracField<T> make_foliation(ChartPtr<T> chart, linalg::Subspace<T> f_e, std::optional<bool> closed_leaf = {});
/// Requires an abelian vector-group chart and a dual bracket passing Jacobi.
template <class T>
DiracField<T> make_linear_poisson(ChartPtr<T> chart, LieAlgebra dual);
/// π^L(g) = Ad_{g⁻¹} r - r. Requires [r, r] to be ad-invariant.
template <class T>
DiracField<T> make_coboundary_poisson(ChartPtr<T> chart, RationalVector r);
template <class T>
DiracField<T> make_two_form_graph(ChartPtr<T> chart, RationalVector w);
/// Unchecked; pullback_field is the checked construction.
template <class T>
DiracField<T> make_pullback(HomPtr<T> hom, const DiracField<T>& base);

/// L_g in the left frame. Throws StructureError when the value is not Dirac.
template <class T>
DiracSubspace<T> evaluate(const DiracField<T>& field, const GroupPoint<T>& g);

/// Per-variable degree of the multiplicativity defect as a polynomial in the
/// parameters of (g, h); empty when the field is not polynomial in the chart.
template <class T>
std::optional<unsigned> degree_bound(const DiracField<T>& field);

/// Whether the characteristic leaf through e is known to be a closed subgroup.
template <class T>
std::optional<bool> declared_closed_kernel(const DiracField<T>& field);

struct SamplingOptions {
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  bool grid = true;            // evaluate the conclusive grid when it fits
  std::size_t grid_cap = 4096;
  std::optional<double> tolerance;  // float charts only; defaults to the chart tolerance
};

struct PointWitness {
  std::vector<std::string> g;
  std::vector<std::string> h;  // empty for single-point checks
  std::string detail;
  double residual = 0.0;
};

struct SamplingSummary {
  std::uint64_t seed = 0;
  std::size_t random_samples = 0;
  std::size_t grid_points = 0;
  std::optional<unsigned> degree_bound;
  bool conclusive = false;
  bool exact = true;
  double tolerance = 0.0;
  double max_residual = 0.0;
};

struct MultiplicativityReport {
  bool pass = true;
  SamplingSummary sampling;
  std::optional<PointWitness> witness;
};

/// L_gh equals the set of products of composable elements of L_g × L_h for
/// every grid or sampled pair (g, h). Products are formed with gt_product.
template <class T>
MultiplicativityReport check_multiplicative(const DiracField<T>& field, const SamplingOptions& options = {});

/// The product space at one pair, in the left frame at gh.
template <class T>
linalg::Subspace<T> product_space(const DiracField<T>& field, const GroupPoint<T>& g, const GroupPoint<T>& h);

struct DistributionReport {
  bool pass = true;
  bool bi_invariant = true;  // dL_g F_e = dR_g F_e at every point
  bool ad_invariant = true;  // exact infinitesimal criterion
  bool agree = true;
  SamplingSummary sampling;
  std::optional<PointWitness> witness;
};

template <class T>
DistributionReport check_multiplicative_distribution(const ChartPtr<T>& chart, const linalg::Subspace<T>& f_e,
                                                     const SamplingOptions& options = {});

class MultiplicativityError : public StructureError {
 public:
  MultiplicativityError(const std::string& what, MultiplicativityReport report)
      : StructureError(what), report_(std::move(report)) {}
  const MultiplicativityReport& report() const { return report_; }

 private:
  MultiplicativityReport report_;
};

class RankJumpError : public StructureError {
 public:
  using StructureError::StructureError;
};

class LeafSpaceError : public StructureError {
 public:
  using StructureError::StructureError;
};

class NonClosedSubgroupError : public StructureError {
 public:
  using StructureError::StructureError;
};

class IntegrationUnavailableError : public StructureError {
 public:
  using StructureError::StructureError;
};

/// g ↦ backward_image(dφ(g), base(φ(g))). Throws InputError when φ does not
/// go from `base`'s group, StructureError when φ is not a submersion, and
/// MultiplicativityError when the base fails check_multiplicative.
template <class T>
DiracField<T> pullback_field(const HomPtr<T>& hom, const DiracField<T>& base, const SamplingOptions& options = {});

template <class T>
struct CharacteristicReport {
  bool pass = true;
  linalg::Subspace<T> k_e;
  std::size_t rank = 0;
  bool constant_rank = true;
  bool left_coset = true;   // ker L_g = dL_g k_e
  bool right_coset = true;  // ker L_g = dR_g k_e
  bool ideal = true;
  SamplingSummary sampling;
  std::optional<PointWitness> witness;
};

/// Throws RankJumpError when the kernel rank is not constant over the points.
template <class T>
CharacteristicReport<T> characteristic_distribution(const DiracField<T>& field, const SamplingOptions& options = {});

struct QuotientReport {
  bool pass = true;
  std::string hom;
  std::string recognized;  // kind of the assembled Poisson field
  bool graph_of_bivector = true;
  bool well_defined = true;  // same image along each fibre of φ
  bool multiplicative = true;
  bool round_trip = true;    // pullback of the quotient equals L
  std::size_t points = 0;
  MultiplicativityReport multiplicativity;
  std::optional<PointWitness> witness;
};

template <class T>
struct QuotientResult {
  DiracField<T> poisson;
  HomPtr<T> hom;
  CharacteristicReport<T> characteristic;
  QuotientReport report;
};

/// The Poisson structure on the leaf space, realized on the target of a
/// registered submersion φ with ker dφ(e) = k_e (searched when `hom` is null).
/// Throws NonClosedSubgroupError, LeafSpaceError, or StructureError when the
/// characteristic distribution check fails.
template <class T>
QuotientResult<T> quotient_poisson(const DiracField<T>& field, HomPtr<T> hom = nullptr,
                                   const SamplingOptions& options = {});

/// ker dφ(e) as a subspace of g.
template <class T>
linalg::Subspace<T> hom_kernel(const Homomorphism<T>& hom);

struct InfinitesimalData {
  LieAlgebra algebra;
  RationalSubspace k;
  Cobracket cobracket;  // on g/k in the canonical quotient basis
  std::string method;   // "exact" or "finite-difference"
  double linearization_residual = 0.0;
  InfinitesimalDataReport check;
};

/// (g, k_e, δ) with δ the linearization at e of the quotient Poisson in its
/// right-translated form, transported to g/k.
template <class T>
InfinitesimalData extract_infinitesimal_data(const DiracField<T>& field, const SamplingOptions& options = {});

/// δ on the Lie algebra of the Poisson field's group, δ(x) = d/dt π^R(exp tx) at t = 0.
/// Exact for the closed-form kinds; central differences with one Richardson
/// step otherwise (float only).
template <class T>
Cobracket linearize(const DiracField<T>& poisson, double* residual = nullptr);

/// Central-difference linearization regardless of kind; needs a float chart with exp.
linalg::Matrix<double> finite_difference_cobracket(const DiracField<double>& poisson, double step = 1e-5,
                                                   double* residual = nullptr);

/// The multiplicative Dirac structure on `chart` integrating (g, k, δ), as the
/// pullback of a catalog Poisson structure along a registered submersion.
DiracField<Rational> integrate_infinitesimal_data(const ChartPtr<Rational>& chart, const RationalSubspace& k,
                                                  const Cobracket& cb, const SamplingOptions& options = {});

struct TwoFormSolution {
  std::size_t pairs = 0;
  std::size_t points = 0;
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  std::size_t solution_dim = 0;
  RationalSubspace solutions;  // in the stacked unknowns
  SamplingSummary sampling;
};

/// Left-frame values W(p) at the sampled points p ∈ {g, h, gh}, constrained by
/// (Ad_{h⁻¹}x + y)ᵀ W(gh) (Ad_{h⁻¹}x' + y') = xᵀ W(g) x' + yᵀ W(h) y'. This is
/// closure of graph(W) under the groupoid product.
TwoFormSolution solve_multiplicative_two_forms(const ChartPtr<Rational>& chart, const SamplingOptions& options = {});

/// Continued-fraction approximation within `tol`.
Rational rationalize(double x, double tol = 1e-9);
RationalMatrix rationalize(const linalg::Matrix<double>& m, double tol = 1e-9);

/// Points used by the sampled checks: the tensor grid when it fits under the
/// cap, then `options.samples` seeded random draws.
template <class T>
std::vector<Params<T>> sample_points(const GroupChart<T>& chart, std::size_t copies, std::optional<unsigned> degree,
                                     const SamplingOptions& options, SamplingSummary& summary);

}  // namespace dirac
