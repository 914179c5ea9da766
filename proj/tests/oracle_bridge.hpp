#pragma once

// Conversions between library types and the reference implementations in
// oracles.hpp, plus the random inputs the suites share.

#include <optional>
#include <random>

#include "dirac/lie_bialgebra.hpp"
#include "dirac/linalg.hpp"
#include "oracles.hpp"

namespace bridge {

using dirac::Rational;
using M = dirac::linalg::Matrix<Rational>;
using S = dirac::linalg::Subspace<Rational>;

inline constexpr long kPrime = 5;

inline M random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<int> d(-2, 2);
  M m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = d(rng);
  return m;
}

inline M random_antisymmetric(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-2, 2);
  M m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = d(rng);
      m(j, i) = -m(i, j);
    }
  return m;
}

// Integer (or p-integral) matrix reduced mod p.
inline oracle::IntMat to_int(const M& m) {
  oracle::IntMat out(m.rows(), oracle::IntVec(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = *oracle::reduce(m(i, j), kPrime);
  return out;
}

// The F_p span of a rational subspace basis, or nothing when the basis does
// not reduce to an independent set mod p (then the instance says nothing).
inline std::optional<oracle::Space> reduce_space(const S& s) {
  oracle::IntMat rows;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    auto r = oracle::reduce(s.basis_vector(i), kPrime);
    if (!r) return std::nullopt;
    rows.push_back(*r);
  }
  auto sp = oracle::span(rows, s.ambient_dim(), kPrime);
  if (oracle::log_size(sp, kPrime) != s.dim()) return std::nullopt;
  return sp;
}

inline bool rank_preserved(const M& m) {
  return oracle::log_size(oracle::span(to_int(m), m.cols(), kPrime), kPrime) == dirac::linalg::rank(m);
}

inline M stack(const M& a, const M& b) {
  M out(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(a.rows() + i, j) = b(i, j);
  return out;
}

inline oracle::Tensors tensors(const dirac::Cobracket& cb) {
  const auto& g = cb.algebra();
  const std::size_t n = g.dim();
  oracle::Tensors t;
  t.n = n;
  t.c.assign(n, std::vector<std::vector<oracle::Q>>(n, std::vector<oracle::Q>(n, 0)));
  t.d = t.c;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) t.c[i][j][k] = g.constant(i, j, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        t.d[i][a][b] = cb.get(i, a, b);
        t.d[i][b][a] = -cb.get(i, a, b);
      }
  return t;
}

// One random cobracket on a catalog algebra: a coboundary or zero, then
// sometimes a sparse perturbation, so that both verdicts come up.
inline dirac::Cobracket random_cobracket(std::mt19937_64& rng, const dirac::LieAlgebra& g, int t) {
  dirac::Cobracket cb(g);
  const std::size_t n = g.dim();
  if (n < 2) return cb;
  if (t % 2 == 0) {
    dirac::RationalVector r(dirac::wedge_dim(n));
    for (auto& x : r) x = static_cast<long>(rng() % 5) - 2;
    cb = dirac::coboundary(g, r);
  }
  if (t % 3 != 0) {
    const auto i = static_cast<std::size_t>(rng() % n);
    const auto pairs = dirac::wedge_pairs(n);
    const auto [j, k] = pairs[static_cast<std::size_t>(rng() % pairs.size())];
    cb.set(i, j, k, cb.get(i, j, k) + static_cast<long>(rng() % 3) - 1);
  }
  return cb;
}

}  // namespace bridge
