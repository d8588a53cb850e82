#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace itelab {

enum class ErrorCode {
  ambiguous_boundary,
  nonpositive_profile,
  quadrature_failure,
  pole_hit,
  integration_failure,
  step_collision,
  backend_unavailable,
  on_eigenvalue,
  grid_too_coarse,
  degenerate_medium,
  truncation_unsafe,
  window_too_wide,
  shared_pole_detected,
  on_branch_singularity,
  degenerate_fit,
  config_error,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ambiguous_boundary: return "AmbiguousBoundary";
    case ErrorCode::nonpositive_profile: return "NonpositiveProfile";
    case ErrorCode::quadrature_failure: return "QuadratureFailure";
    case ErrorCode::pole_hit: return "PoleHit";
    case ErrorCode::integration_failure: return "IntegrationFailure";
    case ErrorCode::step_collision: return "StepCollision";
    case ErrorCode::backend_unavailable: return "BackendUnavailable";
    case ErrorCode::on_eigenvalue: return "OnEigenvalue";
    case ErrorCode::grid_too_coarse: return "GridTooCoarse";
    case ErrorCode::degenerate_medium: return "DegenerateMedium";
    case ErrorCode::truncation_unsafe: return "TruncationUnsafe";
    case ErrorCode::window_too_wide: return "WindowTooWide";
    case ErrorCode::shared_pole_detected: return "SharedPoleDetected";
    case ErrorCode::on_branch_singularity: return "OnBranchSingularity";
    case ErrorCode::degenerate_fit: return "DegenerateFit";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// CLI maps them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace itelab
