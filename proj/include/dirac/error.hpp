#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input: bad file, bad rational literal, unknown catalog name.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition failed (not an ideal, not antisymmetric, not
/// composable, rank jump, ...). `what()` carries the witness.
class StructureError : public Error {
 public:
  using Error::Error;
};

}  // namespace dirac
