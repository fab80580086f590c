#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lindblad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid Lindbladian or density matrix (non-Hermitian H, norm above its
/// declared normalizing factor, inconsistent dimensions).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a scalar or structural argument failed.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the desk-scale guardrails.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// No truncation configuration within the search caps reaches the requested
/// precision.
class InfeasiblePrecisionError : public Error {
 public:
  using Error::Error;
};

/// A lemma premise did not hold on the supplied instance.
class ContractError : public Error {
 public:
  ContractError(const std::string& what, double measured)
      : Error(what), measured_(measured) {}

  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace lindblad
