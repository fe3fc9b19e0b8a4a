#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

enum class ErrorKind {
  InvalidArgument,
  NonPowerOfTwo,
  MemoryCap,
  RepresentationMismatch,
  NonFinite,
  NearCharacteristicSingularity,
  PositivityViolation,
  Divergence,
  MaxIterExceeded,
  SupportViolation,
  ResolutionLoss,
  DomainViolation,
  ZeroDenominator,
  RegimeViolation,
  InsufficientLevels,
  SeparationViolation,
  EmptyClass,
  ConfigParse,
  Unwritable,
  EmptyTable,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Throws Error(kind, message) unless cond holds.
inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) throw Error(kind, message);
}

}  // namespace rlab
