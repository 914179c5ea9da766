#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "dirac/rational.hpp"

namespace dirac {

/// Per-field policy for elimination. Exact fields compare to zero exactly;
/// the floating field uses an absolute threshold and partial pivoting.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr double default_tolerance = 0.0;

  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static bool near(const Rational& a, const Rational& b, double /*tol*/) { return a == b; }
  static double magnitude(const Rational& x) { return std::abs(x.get_d()); }
  // First nonzero entry wins, which keeps rref deterministic and small.
  static bool better_pivot(const Rational&, const Rational&) { return false; }
  static void clean(Rational&) {}
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_rational(const Rational& x) { return x; }
  static std::string to_string(const Rational& x) { return format_rational(x); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr double default_tolerance = 1e-9;
  static constexpr double elimination_epsilon = 1e-11;

  static bool is_zero(double x) { return std::abs(x) <= elimination_epsilon; }
  static bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }
  static double magnitude(double x) { return std::abs(x); }
  static bool better_pivot(double candidate, double best) {
    return std::abs(candidate) > std::abs(best);
  }
  static void clean(double& x) {
    if (is_zero(x)) x = 0.0;
  }
  static double to_double(double x) { return x; }
  static double from_rational(const Rational& x) { return x.get_d(); }
  static std::string to_string(double x);
};

}  // namespace dirac
