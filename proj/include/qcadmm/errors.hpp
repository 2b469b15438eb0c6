#pragma once

#include <stdexcept>
#include <string>

namespace qcadmm {

/// Raised when an iterative or spectral routine fails to reach its tolerance.
/// Carries the last residual so callers can report how far off it was.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace qcadmm
