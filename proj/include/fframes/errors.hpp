#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fframes {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteInput : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NotSelfAdjoint : Error {
  using Error::Error;
};

struct NotPositiveSemidefinite : Error {
  using Error::Error;
};

struct SpaceMismatch : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct NotASubspace : Error {
  using Error::Error;
};

struct NotInSubspace : Error {
  using Error::Error;
};

/// A block of a block-diagonal operator is singular (or not square).
struct NotInvertible : Error {
  NotInvertible(std::size_t block, double smallest_sv, const std::string& what)
      : Error(what), block_index(block), smallest_singular_value(smallest_sv) {}
  std::size_t block_index;
  double smallest_singular_value;
};

struct NotAFrame : Error {
  using Error::Error;
};

struct NotAFusionFrame : Error {
  using Error::Error;
};

struct NotFusionRiesz : Error {
  using Error::Error;
};

/// A local frame of a fusion frame system fails to span its subspace.
struct LocalNotAFrame : Error {
  LocalNotAFrame(std::size_t i, const std::string& what) : Error(what), index(i) {}
  std::size_t index;
};

/// Two routes that must agree at the working tolerance disagreed; signals a
/// tolerance pathology in the input, not a math error.
struct InternalInconsistency : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

}  // namespace fframes
