#include "fano/error.hpp"

namespace fano {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonPositiveRate: return "NonPositiveRate";
    case ErrorKind::InvalidSiteIndex: return "InvalidSiteIndex";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::BandEdgeSingularity: return "BandEdgeSingularity";
    case ErrorKind::BandEdge: return "BandEdge";
    case ErrorKind::OnBranchCut: return "OnBranchCut";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorKind::PoleAtEndpoint: return "PoleAtEndpoint";
    case ErrorKind::RootFindFailure: return "RootFindFailure";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ResonanceMismatch: return "ResonanceMismatch";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::NoBic: return "NoBic";
    case ErrorKind::OutsideBoundStatePresent: return "OutsideBoundStatePresent";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::EmptySweep: return "EmptySweep";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

bool is_config_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::IOError:
    case ErrorKind::EmptySweep:
    case ErrorKind::GridMismatch:
      return true;
    default:
      return false;
  }
}

}  // namespace fano
