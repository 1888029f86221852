#pragma once

#include <stdexcept>
#include <string>

namespace csbss {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside its documented domain (rates, counts, budgets).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A binary or text input could not be decoded.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A separation oracle was queried outside its finite domain.
class SeparationDomainError : public Error {
 public:
  using Error::Error;
};

/// A composition theorem check failed; always an implementation bug.
class TheoremViolation : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite or exploding loss (CLI exit code 4).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_finite_loss)
      : Error(what), last_finite_loss_(last_finite_loss) {}

  double last_finite_loss() const noexcept { return last_finite_loss_; }

 private:
  double last_finite_loss_;
};

}  // namespace csbss
