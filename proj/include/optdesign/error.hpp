#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace optdesign {

enum class ErrorKind {
  InvalidInput,
  OutOfRegion,
  NonpositiveLinearComponent,
  SingularInformation,
  NotEquivariant,
  DegenerateSample,
  RescaleUndefined,
  NonAxisAlignedImage,
  GroupTooLarge,
  NotRegionPreserving,
  CandidateSetNotClosed,
  WeightSumViolation,
  NoConvergence,
  EquivalenceCheckFailed,
  WrongModelShape,
  OutOfParameterRegion,
  EmptyGrid,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `index` carries the offending support
/// point / candidate / grid index where one exists.
class DesignError : public std::runtime_error {
 public:
  DesignError(ErrorKind kind, const std::string& message,
              std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace optdesign
