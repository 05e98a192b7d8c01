#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fano {

enum class ErrorKind {
  NonPositiveRate,
  InvalidSiteIndex,
  DomainError,
  BandEdgeSingularity,
  BandEdge,
  OnBranchCut,
  NoConvergence,
  NonFiniteIntegrand,
  PoleAtEndpoint,
  RootFindFailure,
  IndexOutOfRange,
  ResonanceMismatch,
  StepSizeUnderflow,
  ConfigError,
  NoBic,
  OutsideBoundStatePresent,
  GridMismatch,
  EmptySweep,
  IOError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Configuration and I/O failures, as opposed to failures of the numerics
// or of the model domain.
bool is_config_error(ErrorKind kind) noexcept;

class FanoError : public std::runtime_error {
 public:
  FanoError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fano
