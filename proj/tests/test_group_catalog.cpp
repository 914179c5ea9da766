#include <doctest.h>

#include <random>

#include "dirac/group_catalog.hpp"

using namespace dirac;
using Q = Rational;
using MQ = linalg::Matrix<Q>;
using VQ = linalg::Vector<Q>;

namespace {

template <class T>
linalg::Vector<T> random_vec(Rng& rng, std::size_t n) {
  linalg::Vector<T> v(n);
  for (auto& x : v) {
    if constexpr (std::is_same_v<T, Q>) {
      x = random_rational(rng);
    } else {
      x = 4.0 * random_unit(rng) - 2.0;
    }
  }
  return v;
}

template <class T>
GroupPoint<T> random_point(const ChartPtr<T>& chart, Rng& rng) {
  return GroupPoint<T>(chart, chart->sample(rng));
}

// Σ_k c_k E_k.
template <class T>
linalg::Matrix<T> combine(const GroupChart<T>& chart, const linalg::Vector<T>& c) {
  linalg::Matrix<T> out(chart.matrix_size, chart.matrix_size);
  for (std::size_t k = 0; k < c.size(); ++k) {
    linalg::Matrix<T> term = chart.basis[k];
    for (std::size_t i = 0; i < term.rows(); ++i)
      for (std::size_t j = 0; j < term.cols(); ++j) out(i, j) += c[k] * term(i, j);
  }
  return out;
}

template <class T>
linalg::Matrix<T> matrix_inverse(const GroupPoint<T>& g) {
  return embed(inverse(g));
}

template <class T>
linalg::Vector<T> transpose_apply(const linalg::Matrix<T>& m, const linalg::Vector<T>& v) {
  return m.transpose() * v;
}

const std::vector<std::string> kExact = {"heisenberg3", "aff1", "gl1plus", "abelian1", "abelian2", "abelian3", "abelian4"};

}  // namespace

TEST_CASE("registry contents") {
  const auto& reg = catalog_registry<Q>();
  for (const auto& name : kExact) CHECK(reg.has_chart(name));
  CHECK(reg.has_chart("trivial"));
  CHECK_FALSE(reg.has_chart("torus2"));
  CHECK(catalog_registry<double>().has_chart("torus2"));
  CHECK_THROWS_AS(reg.chart("sl2"), InputError);
  CHECK_THROWS_AS(reg.hom("nope"), InputError);
  CHECK(reg.hom("heisenberg3->abelian2")->target->name == "abelian2");
}

TEST_CASE("charts validate") {
  for (const auto& name : kExact) CHECK_NOTHROW(validate_chart(*catalog_registry<Q>().chart(name), 3, 16));
  for (const auto& name : catalog_registry<double>().chart_names())
    CHECK_NOTHROW(validate_chart(*catalog_registry<double>().chart(name), 3, 16));
}

TEST_CASE("heisenberg3 multiplication, frozen") {
  const auto h = charts::heisenberg3<Q>();
  const GroupPoint<Q> g(h, {1, 2, 3});
  const GroupPoint<Q> k(h, {4, 5, 6});
  CHECK(multiply(g, k).params == VQ{5, 7, 14});
  CHECK(inverse(g).params == VQ{-1, -2, -1});
  const auto ad = adjoint(g);
  // Ad_g on (E01, E12, E02): E01 -> E01 - b E02, E12 -> E12 + a E02.
  const MQ expected{{1, 0, 0}, {0, 1, 0}, {-2, 1, 1}};
  CHECK(ad == expected);
}

TEST_CASE("Ad agrees with matrix conjugation") {
  Rng rng(8);
  for (const auto& name : kExact) {
    const auto chart = catalog_registry<Q>().chart(name);
    for (int t = 0; t < 10; ++t) {
      const auto g = random_point(chart, rng);
      const auto ad = adjoint(g);
      for (std::size_t i = 0; i < chart->basis.size(); ++i) {
        const auto conj = embed(g) * chart->basis[i] * matrix_inverse(g);
        CHECK(combine(*chart, ad.column(i)) == conj);
      }
    }
  }
}

TEST_CASE("left coordinates round trip and reject non-tangent input") {
  const auto h = charts::heisenberg3<Q>();
  Rng rng(1);
  const auto g = random_point(h, rng);
  const VQ x{1, -2, Q(1, 3)};
  CHECK(left_coords(g, from_left(g, x)) == x);
  MQ bad(3, 3);
  bad(2, 0) = 1;
  CHECK_THROWS_AS(left_coords(g, bad), StructureError);
}

TEST_CASE("groupoid axioms on exact charts") {
  Rng rng(42);
  for (const auto& name : kExact) {
    const auto chart = catalog_registry<Q>().chart(name);
    const std::size_t n = chart->algebra.dim();
    for (int t = 0; t < 15; ++t) {
      const auto g = random_point(chart, rng);
      const auto h = random_point(chart, rng);
      const auto k = random_point(chart, rng);
      // Build a composable triple from the right.
      const auto c = random_vec<Q>(rng, n);
      const auto zeta = generalized_from_left(k, random_vec<Q>(rng, n), c);
      const auto b = cotangent_target(Covector<Q>{zeta.base, zeta.covector});
      const auto eta = generalized_from_left(h, random_vec<Q>(rng, n), b);
      const auto a = cotangent_target(Covector<Q>{eta.base, eta.covector});
      const auto xi = generalized_from_left(g, random_vec<Q>(rng, n), a);
      REQUIRE(gt_composable(xi, eta));
      REQUIRE(gt_composable(eta, zeta));

      const auto xe = gt_product(xi, eta);
      const auto ez = gt_product(eta, zeta);
      CHECK(same_point(xe.base, multiply(g, h)));
      // s(ξη) = s(η), t(ξη) = t(ξ).
      CHECK(cotangent_source(Covector<Q>{xe.base, xe.covector}) == cotangent_source(Covector<Q>{eta.base, eta.covector}));
      CHECK(cotangent_target(Covector<Q>{xe.base, xe.covector}) == cotangent_target(Covector<Q>{xi.base, xi.covector}));
      CHECK(same_generalized(gt_product(xe, zeta), gt_product(xi, ez)));

      // Units (0_e, t(ξ)) and (0_e, s(ξ)).
      const auto e = identity_point(chart);
      const VQ zero(n, Q(0));
      const auto left_unit = generalized_from_left(e, zero, cotangent_target(Covector<Q>{xi.base, xi.covector}));
      const auto right_unit = generalized_from_left(e, zero, cotangent_source(Covector<Q>{xi.base, xi.covector}));
      CHECK(same_generalized(gt_product(left_unit, xi), xi));
      CHECK(same_generalized(gt_product(xi, right_unit), xi));

      // Tangent part is dm: dR_h X + dL_g Y.
      const auto dm = tangent_group_product(TangentVector<Q>{g, xi.tangent}, TangentVector<Q>{h, eta.tangent});
      CHECK(dm.value == xe.tangent);
    }
  }
}

TEST_CASE("left-frame product formula matches gt_product") {
  Rng rng(5);
  for (const auto& name : kExact) {
    const auto chart = catalog_registry<Q>().chart(name);
    const std::size_t n = chart->algebra.dim();
    for (int t = 0; t < 25; ++t) {
      const auto g = random_point(chart, rng);
      const auto h = random_point(chart, rng);
      const auto x = random_vec<Q>(rng, n);
      const auto y = random_vec<Q>(rng, n);
      const auto b = random_vec<Q>(rng, n);
      const auto ad_hinv = adjoint(inverse(h));
      const auto a = transpose_apply(ad_hinv, b);
      const auto prod = gt_product(generalized_from_left(g, x, a), generalized_from_left(h, y, b));
      auto xy = ad_hinv * x;
      for (std::size_t i = 0; i < n; ++i) xy[i] += y[i];
      CHECK(same_generalized(prod, generalized_from_left(multiply(g, h), xy, b)));
    }
  }
}

TEST_CASE("incomposable pairs are rejected") {
  const auto chart = charts::aff1<Q>();
  const GroupPoint<Q> g(chart, {2, 1});
  const GroupPoint<Q> h(chart, {3, -1});
  const auto xi = generalized_from_left(g, VQ{0, 0}, VQ{0, 1});
  const auto eta = generalized_from_left(h, VQ{0, 0}, VQ{0, 1});
  // t(eta) = Ad_{h⁻¹}ᵀ (0, 1) differs from (0, 1) on aff1.
  CHECK_FALSE(gt_composable(xi, eta));
  CHECK_THROWS_AS(gt_product(xi, eta), StructureError);
}

TEST_CASE("float charts: groupoid axioms within tolerance") {
  Rng rng(3);
  const auto chart = charts::torus2();
  for (int t = 0; t < 20; ++t) {
    const auto g = random_point(chart, rng);
    const auto h = random_point(chart, rng);
    const auto b = random_vec<double>(rng, 2);
    const auto x = random_vec<double>(rng, 2);
    const auto y = random_vec<double>(rng, 2);
    const auto prod = gt_product(generalized_from_left(g, x, b), generalized_from_left(h, y, b));
    auto xy = x;
    for (std::size_t i = 0; i < 2; ++i) xy[i] += y[i];
    CHECK(same_generalized(prod, generalized_from_left(multiply(g, h), xy, b)));
  }
}

TEST_CASE("phi-related pairs along heisenberg3 -> abelian2") {
  const auto& reg = catalog_registry<Q>();
  const auto phi = reg.hom("heisenberg3->abelian2");
  Rng rng(12);
  const auto g = random_point(phi->source, rng);
  const auto x = random_vec<Q>(rng, 3);
  const auto beta = random_vec<Q>(rng, 2);
  const auto pg = apply(*phi, g);
  const auto dphi = left_differential(*phi, g);
  const auto xi = generalized_from_left(pg, dphi * x, beta);
  const auto eta = generalized_from_left(g, x, transpose_apply(dphi, beta));
  CHECK(phi_related(*phi, eta, xi));
  auto x2 = x;
  x2[0] += 1;
  CHECK_FALSE(phi_related(*phi, generalized_from_left(g, x2, transpose_apply(dphi, beta)), xi));
  CHECK(is_submersion(*phi));
  CHECK(is_submersion(*reg.hom("abelian2->abelian2")));
}

TEST_CASE("homomorphisms respect multiplication and their lifts") {
  Rng rng(6);
  for (const auto& name : kExact) {
    for (const auto& hom : catalog_registry<Q>().homs_from(name)) {
      for (int t = 0; t < 10; ++t) {
        const auto g = random_point(hom->source, rng);
        const auto h = random_point(hom->source, rng);
        CHECK(same_point(apply(*hom, multiply(g, h)), multiply(apply(*hom, g), apply(*hom, h))));
        const auto y = random_point(hom->target, rng);
        CHECK(hom->map(hom->lift(y.params)) == y.params);
      }
    }
  }
}

TEST_CASE("normal subgroups are preserved along one-parameter paths") {
  // For an ideal k, Ad_{exp(tY)} k = k for every t; for a non-ideal it moves.
  const auto chart = charts::heisenberg3<Q>();
  const auto centre = RationalSubspace::span(3, {{0, 0, 1}});
  const auto line = RationalSubspace::span(3, {{1, 0, 0}});
  bool moved = false;
  for (int t = -3; t <= 3; ++t) {
    const GroupPoint<Q> g(chart, chart->exp(VQ{0, Q(t), 0}));
    CHECK(linalg::image(adjoint(g), centre) == centre);
    moved = moved || !(linalg::image(adjoint(g), line) == line);
  }
  CHECK(moved);
}

TEST_CASE("grid values are distinct") {
  const auto chart = charts::aff1<Q>();
  const auto a = chart->grid_values(0, 4);
  const auto b = chart->grid_values(1, 4);
  CHECK(a == VQ{1, 2, Q(1, 2), 3});
  CHECK(b == VQ{0, 1, -1, 2});
}
