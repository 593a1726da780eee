#pragma once

#include <stdexcept>
#include <string>

namespace homdisp {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition (range, sign, finiteness).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Frequency grid too narrow to hold the requested spectrum without truncation.
class GridTooNarrow : public Error {
 public:
  using Error::Error;
};

/// Two spectra that must share a frequency grid (and carrier) do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A dip width below the dispersion-free minimum.
class InfeasibleWidth : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// The fitted dip is not statistically distinguishable from a flat curve.
class DipNotFound : public Error {
 public:
  using Error::Error;
};

/// Malformed input file: bad syntax, unknown keys, out-of-range fields.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace homdisp
