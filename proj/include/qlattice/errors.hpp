#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qlattice {

enum class errc {
  invalid_params,
  invalid_grid,
  zero_vector,
  wrong_regime,
  ambiguous_branch,
  on_branch_cut,
  quadrature_failure,
  no_discrete_eigenvalue,
  bracket_failure,
  not_an_eigenvalue,
  ill_conditioned,
  no_convergence,
  io_error,
};

inline const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_params: return "InvalidParams";
    case errc::invalid_grid: return "InvalidGrid";
    case errc::zero_vector: return "ZeroVector";
    case errc::wrong_regime: return "WrongRegime";
    case errc::ambiguous_branch: return "AmbiguousBranch";
    case errc::on_branch_cut: return "OnBranchCut";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::no_discrete_eigenvalue: return "NoDiscreteEigenvalue";
    case errc::bracket_failure: return "BracketFailure";
    case errc::not_an_eigenvalue: return "NotAnEigenvalue";
    case errc::ill_conditioned: return "IllConditioned";
    case errc::no_convergence: return "NoConvergence";
    case errc::io_error: return "IoError";
  }
  return "Unknown";
}

/// Library-wide exception. `value()` carries the diagnostic number attached
/// to the failure (achieved quadrature error, condition estimate, best
/// residual), or NaN when there is none.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what,
        double value = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        value_(value) {}

  errc code() const noexcept { return code_; }
  double value() const noexcept { return value_; }

 private:
  errc code_;
  double value_;
};

}  // namespace qlattice
