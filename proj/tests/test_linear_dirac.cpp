#include <doctest.h>

#include <random>

#include "dirac/linear_dirac.hpp"
#include "dirac/rational.hpp"
#include "oracle_bridge.hpp"

using namespace dirac;
using M = linalg::Matrix<Rational>;
using S = linalg::Subspace<Rational>;
using V = linalg::Vector<Rational>;

using bridge::kPrime;
using bridge::random_antisymmetric;
using bridge::random_matrix;
using bridge::reduce_space;
using bridge::to_int;

namespace {

// {(P a, a)} over F_p.
oracle::Space graph_oracle(const M& p, bool two_form) {
  const std::size_t n = p.rows();
  const auto pi = to_int(p);
  oracle::Space out;
  for (std::uint64_t c = 0; c < oracle::power(kPrime, n); ++c) {
    const auto a = oracle::decode(c, n, kPrime);
    const auto pa = oracle::apply(pi, a, kPrime);
    oracle::IntVec v = two_form ? a : pa;
    const auto& rest = two_form ? pa : a;
    v.insert(v.end(), rest.begin(), rest.end());
    out.insert(oracle::encode(v, kPrime));
  }
  return out;
}

// {(φX, b) : (X, φᵀb) ∈ L1} by enumeration of (X, b).
// `related` receives the number of related pairs (X, b) found.
oracle::Space forward_oracle(const M& phi, const oracle::Space& l1, std::size_t& related) {
  const std::size_t n1 = phi.cols();
  const std::size_t n2 = phi.rows();
  const auto f = to_int(phi);
  const auto ft = to_int(phi.transpose());
  oracle::Space out;
  related = 0;
  for (std::uint64_t c = 0; c < oracle::power(kPrime, n1 + n2); ++c) {
    const auto xb = oracle::decode(c, n1 + n2, kPrime);
    const oracle::IntVec x(xb.begin(), xb.begin() + static_cast<long>(n1));
    const oracle::IntVec b(xb.begin() + static_cast<long>(n1), xb.end());
    auto lifted = x;
    const auto ftb = oracle::apply(ft, b, kPrime);
    lifted.insert(lifted.end(), ftb.begin(), ftb.end());
    if (!l1.count(oracle::encode(lifted, kPrime))) continue;
    ++related;
    auto pushed = oracle::apply(f, x, kPrime);
    pushed.insert(pushed.end(), b.begin(), b.end());
    out.insert(oracle::encode(pushed, kPrime));
  }
  return out;
}

// {(X, φᵀb) : (φX, b) ∈ L2}.
oracle::Space backward_oracle(const M& phi, const oracle::Space& l2, std::size_t& related) {
  const std::size_t n1 = phi.cols();
  const std::size_t n2 = phi.rows();
  const auto f = to_int(phi);
  const auto ft = to_int(phi.transpose());
  oracle::Space out;
  related = 0;
  for (std::uint64_t c = 0; c < oracle::power(kPrime, n1 + n2); ++c) {
    const auto xb = oracle::decode(c, n1 + n2, kPrime);
    const oracle::IntVec x(xb.begin(), xb.begin() + static_cast<long>(n1));
    const oracle::IntVec b(xb.begin() + static_cast<long>(n1), xb.end());
    auto pushed = oracle::apply(f, x, kPrime);
    pushed.insert(pushed.end(), b.begin(), b.end());
    if (!l2.count(oracle::encode(pushed, kPrime))) continue;
    ++related;
    auto lifted = x;
    const auto ftb = oracle::apply(ft, b, kPrime);
    lifted.insert(lifted.end(), ftb.begin(), ftb.end());
    out.insert(oracle::encode(lifted, kPrime));
  }
  return out;
}

// Rational dimension of the related space, from its defining equations.
std::size_t related_dim(const M& constraints) { return constraints.cols() - linalg::rank(constraints); }

// (X, φᵀb) ∈ graph: W X = φᵀ b for a two-form, X = P φᵀ b for a bivector.
M forward_constraints(const M& p, const M& phi, bool two_form) {
  const std::size_t n1 = phi.cols();
  const std::size_t n2 = phi.rows();
  const M pt = two_form ? phi.transpose() : p * phi.transpose();
  M c(n1, n1 + n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n1; ++j) c(i, j) = two_form ? p(i, j) : Rational(i == j ? 1 : 0);
    for (std::size_t j = 0; j < n2; ++j) c(i, n1 + j) = -pt(i, j);
  }
  return c;
}

// (φX, b) ∈ graph(Q): φ X = Q b.
M backward_constraints(const M& q, const M& phi) {
  const std::size_t n1 = phi.cols();
  const std::size_t n2 = phi.rows();
  M c(n2, n1 + n2);
  for (std::size_t i = 0; i < n2; ++i) {
    for (std::size_t j = 0; j < n1; ++j) c(i, j) = phi(i, j);
    for (std::size_t j = 0; j < n2; ++j) c(i, n1 + j) = -q(i, j);
  }
  return c;
}

}  // namespace

TEST_CASE("graph of a bivector, frozen") {
  const M p{{0, 1}, {-1, 0}};
  const auto l = from_bivector(p);
  CHECK(l.n() == 2);
  CHECK(l.space() == S::span(4, {V{0, -1, 1, 0}, V{1, 0, 0, 1}}));
  CHECK(dirac_kernel(l).dim() == 0);
  CHECK(dirac_range(l) == S::full(2));
  const auto back = bivector_of(l);
  REQUIRE(back);
  CHECK(*back == p);
}

TEST_CASE("foliation Dirac structure") {
  const auto f = S::span(3, {V{0, 0, 1}});
  const auto l = from_distribution(f);
  CHECK(dirac_kernel(l) == f);
  CHECK(dirac_range(l) == f);
  CHECK_FALSE(bivector_of(l));
}

TEST_CASE("construction rejects bad input") {
  CHECK_THROWS_AS(from_bivector(M{{0, 1}, {1, 0}}), StructureError);
  CHECK_THROWS_AS(from_two_form(M{{1, 0}, {0, 0}}), StructureError);
  CHECK_THROWS_AS(DiracSubspace<Rational>(2, S::span(4, {V{1, 0, 0, 0}})), StructureError);
  CHECK_THROWS_AS(DiracSubspace<Rational>(2, S::span(4, {V{1, 0, 1, 0}, V{0, 1, 0, 0}})), StructureError);
  CHECK_THROWS_AS(DiracSubspace<Rational>(2, S::span(3, {V{1, 0, 0}})), DimensionError);
}

TEST_CASE("pairing convention") {
  // <(X,a),(Y,b)> = a(Y) + b(X).
  const V u{1, 2, 3, 4};
  const V v{5, 6, 7, 8};
  CHECK(pairing(u, v, 2) == Rational(3 * 5 + 4 * 6 + 7 * 1 + 8 * 2));
}

TEST_CASE("constructors and images agree with F_5 enumeration (n <= 3)") {
  std::mt19937_64 rng(23);
  std::size_t compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n1 = 1 + static_cast<std::size_t>(trial) % 3;
    const std::size_t n2 = 1 + static_cast<std::size_t>(trial / 3) % 3;
    const bool two_form = trial % 2 == 1;
    const M p = random_antisymmetric(rng, n1);
    const auto l1 = two_form ? from_two_form(p) : from_bivector(p);
    CHECK(l1.space().dim() == n1);
    CHECK(isotropy_residual(l1.space(), n1) == 0.0);
    const auto set1 = reduce_space(l1.space());
    REQUIRE(set1);
    CHECK(*set1 == graph_oracle(p, two_form));
    CHECK(oracle::isotropic(*set1, n1, kPrime));

    const M phi = random_matrix(rng, n2, n1);
    const auto fwd = forward_image(phi, l1);
    CHECK(fwd.is_dirac);
    CHECK(fwd.space.dim() == n2);
    CHECK(isotropy_residual(fwd.space, n2) == 0.0);
    // The comparison means something only when p does not change the
    // dimension of the related space {(X, b)}.
    std::size_t related = 0;
    const auto expect = forward_oracle(phi, *set1, related);
    const auto r = reduce_space(fwd.space);
    if (r && related == oracle::power(kPrime, related_dim(forward_constraints(p, phi, two_form)))) {
      CHECK(*r == expect);
      CHECK(oracle::log_size(expect, kPrime) == n2);
      ++compared;
    }

    const M q = random_antisymmetric(rng, n2);
    const auto l2 = from_bivector(q);
    const auto bwd = backward_image(phi, l2);
    CHECK(bwd.is_dirac);
    CHECK(isotropy_residual(bwd.space, n1) == 0.0);
    const auto expect2 = backward_oracle(phi, *reduce_space(l2.space()), related);
    const auto r2 = reduce_space(bwd.space);
    if (r2 && related == oracle::power(kPrime, related_dim(backward_constraints(q, phi)))) {
      CHECK(*r2 == expect2);
      ++compared;
    }
  }
  CHECK(compared >= 200);
}

TEST_CASE("forward then backward along an iso is the identity") {
  std::mt19937_64 rng(2);
  const M phi{{1, 1, 0}, {0, 1, 0}, {0, 2, 1}};
  for (int t = 0; t < 50; ++t) {
    const auto l = from_bivector(random_antisymmetric(rng, 3));
    const auto pushed = forward_image(phi, l).as_dirac();
    CHECK(backward_image(phi, pushed).space == l.space());
  }
}

TEST_CASE("float structures use the tolerance") {
  linalg::Matrix<double> p(2, 2);
  p(0, 1) = 0.5;
  p(1, 0) = -0.5;
  const auto l = from_bivector(p);
  CHECK(isotropy_residual(l.space(), 2) < 1e-12);
}
