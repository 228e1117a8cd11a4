#include "optdesign/error.hpp"

namespace optdesign {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::OutOfRegion: return "OutOfRegion";
    case ErrorKind::NonpositiveLinearComponent: return "NonpositiveLinearComponent";
    case ErrorKind::SingularInformation: return "SingularInformation";
    case ErrorKind::NotEquivariant: return "NotEquivariant";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::RescaleUndefined: return "RescaleUndefined";
    case ErrorKind::NonAxisAlignedImage: return "NonAxisAlignedImage";
    case ErrorKind::GroupTooLarge: return "GroupTooLarge";
    case ErrorKind::NotRegionPreserving: return "NotRegionPreserving";
    case ErrorKind::CandidateSetNotClosed: return "CandidateSetNotClosed";
    case ErrorKind::WeightSumViolation: return "WeightSumViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EquivalenceCheckFailed: return "EquivalenceCheckFailed";
    case ErrorKind::WrongModelShape: return "WrongModelShape";
    case ErrorKind::OutOfParameterRegion: return "OutOfParameterRegion";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
  }
  return "Unknown";
}

DesignError::DesignError(ErrorKind kind, const std::string& message,
                         std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      index_(index) {}

}  // namespace optdesign
