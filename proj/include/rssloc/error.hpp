#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rssloc {

enum class ErrorKind {
  InvalidInput,
  InsufficientSensors,
  DegenerateGeometry,
  SingularGram,
  SingularPoint,
  DegenerateJacobian,
  Numeric,
  InfiniteInformation,
  Schema,
  UnknownScenario,
};

/// Stable lower-case name used in machine-readable error output.
std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rssloc
