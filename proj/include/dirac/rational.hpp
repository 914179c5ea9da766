#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace dirac {

/// Exact rational number, always in lowest terms with positive denominator.
using Rational = mpq_class;

/// Parses "p/q" or "p" (optional sign, decimal digits). Throws InputError on
/// anything else, including a zero denominator.
Rational parse_rational(std::string_view text);

/// Serializes as "p" when the denominator is 1, otherwise "p/q".
std::string format_rational(const Rational& value);

}  // namespace dirac
