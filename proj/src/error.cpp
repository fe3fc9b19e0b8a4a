#include "rlab/error.hpp"

namespace rlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPowerOfTwo: return "NonPowerOfTwo";
    case ErrorKind::MemoryCap: return "MemoryCap";
    case ErrorKind::RepresentationMismatch: return "RepresentationMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NearCharacteristicSingularity: return "NearCharacteristicSingularity";
    case ErrorKind::PositivityViolation: return "PositivityViolation";
    case ErrorKind::Divergence: return "Divergence";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::ResolutionLoss: return "ResolutionLoss";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::InsufficientLevels: return "InsufficientLevels";
    case ErrorKind::SeparationViolation: return "SeparationViolation";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::Unwritable: return "Unwritable";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace rlab
