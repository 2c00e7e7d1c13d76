#pragma once

#include <stdexcept>
#include <string>

namespace agecoda {

/// Base class for all library errors. Data and domain failures derive from
/// this; the CLI maps them to exit code 1. Usage/configuration mistakes are
/// ConfigError and map to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// -- simplex / composition errors -------------------------------------------

class NonPositivePart : public Error {
 public:
  using Error::Error;
};

class EmptyVector : public Error {
 public:
  using Error::Error;
};

class AllZero : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotCentered : public Error {
 public:
  using Error::Error;
};

// -- ingestion errors --------------------------------------------------------

/// Parent of parse failures; messages carry row numbers or key descriptions.
class ParseError : public Error {
 public:
  using Error::Error;
};

class MissingBin : public ParseError {
 public:
  using ParseError::ParseError;
};

class DuplicateRow : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnparsableValue : public ParseError {
 public:
  using ParseError::ParseError;
};

// -- analysis errors ---------------------------------------------------------

class MissingWorldPyramid : public Error {
 public:
  using Error::Error;
};

class EmptySection : public Error {
 public:
  using Error::Error;
};

// -- clustering errors -------------------------------------------------------

class DegenerateMatrix : public Error {
 public:
  using Error::Error;
};

class InvalidK : public Error {
 public:
  using Error::Error;
};

class EmptyCluster : public Error {
 public:
  using Error::Error;
};

}  // namespace agecoda
