#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amgm {

enum class ErrorKind {
  NonSquare,
  NotSymmetric,
  NonFinite,
  NoConvergence,
  DimensionMismatch,
  TooManyMatrices,
  IndexOutOfRange,
  OutOfRange,
  WindowViolation,
  NotPsd,
  SingularQ,
  NotUnitVector,
  ParseError,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every precondition failure in the library is reported through this type.
class LabError : public std::runtime_error {
 public:
  LabError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace amgm
