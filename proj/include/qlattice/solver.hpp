#pragma once

// Eigenvalue equation for the corner bound state.
//
// Outside the band the bound state exists iff
//
//     I(nu) = (1/pi) \int_{-pi}^{pi} d(phi, nu) sin^2(phi) dphi = -lambda/mu
//
// has a root with |nu| > 4. I is odd, increasing on each half-line, and
// sweeps (0, c] on nu <= -4 where c = I(-4) = 2 - 16/(3 pi).

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "qlattice/curve.hpp"
#include "qlattice/errors.hpp"
#include "qlattice/model.hpp"
#include "qlattice/quadrature.hpp"

namespace qlattice {

constexpr double threshold_constant() noexcept {
  return 2.0 - 16.0 / (3.0 * std::numbers::pi);
}

/// I(nu) for |nu| >= 4, with the quadrature error estimate.
inline QuadratureResult integral_I_detailed(double nu,
                                            const QuadratureSpec& spec = {}) {
  if (!(std::abs(nu) >= 4.0))
    throw error(errc::wrong_regime, "I(nu) is defined for |nu| >= 4");
  constexpr double pi = std::numbers::pi;
  auto h = [nu](double phi) {
    const double s = std::sin(phi);
    return curve::d_eval(phi, nu) * s * s;
  };
  // The band-edge singularity sits at phi = 0 for nu < 0 and at pi for nu > 0.
  QuadratureResult r =
      nu < 0.0 ? integrate_sqrt_end(h, 0.0, pi / 2, true, spec) +
                     integrate(h, pi / 2, pi, spec)
               : integrate(h, 0.0, pi / 2, spec) +
                     integrate_sqrt_end(h, pi / 2, pi, false, spec);
  r.value *= 2.0 / pi;
  r.error *= 2.0 / pi;
  return r;
}

inline double integral_I(double nu, const QuadratureSpec& spec = {}) {
  return integral_I_detailed(nu, spec).value;
}

enum class Regime {
  unique_discrete_eigenvalue,
  empty_point_spectrum,
  threshold_eigenvalue,
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::unique_discrete_eigenvalue: return "UniqueDiscreteEigenvalue";
    case Regime::empty_point_spectrum: return "EmptyPointSpectrum";
    case Regime::threshold_eigenvalue: return "ThresholdEigenvalue";
  }
  return "?";
}

struct RegimeClassification {
  Regime regime = Regime::empty_point_spectrum;
  int eigenvalue_sign = 0;  // +1, -1, or 0 when there is no eigenvalue
  double threshold_ratio = std::numeric_limits<double>::infinity();  // |lambda/mu|
  double threshold_constant = qlattice::threshold_constant();
};

/// `eps` is the relative half-width of the band around |lambda/mu| = c that
/// counts as the threshold case.
inline RegimeClassification classify(const ModelParams& params,
                                     double eps = 1e-12) {
  RegimeClassification out;
  if (params.mu() == 0.0) return out;
  const double c = threshold_constant();
  out.threshold_ratio = std::abs(params.lambda() / params.mu());
  const int sign = params.mu() > 0.0 ? 1 : -1;
  if (std::abs(out.threshold_ratio - c) <= eps * c) {
    out.regime = Regime::threshold_eigenvalue;
    out.eigenvalue_sign = sign;
  } else if (out.threshold_ratio < c) {
    out.regime = Regime::unique_discrete_eigenvalue;
    out.eigenvalue_sign = sign;
  }
  return out;
}

struct EigenvalueSolution {
  RenormalizedEnergy nu;
  double energy = 0.0;
  double residual = 0.0;  // |I(nu) + lambda/mu|
  unsigned evaluations = 0;
  bool threshold = false;
};

/// Root of I(nu) = -lambda/mu by a bracketed Illinois (safeguarded secant)
/// iteration. The bracket is [-B, -4] for mu < 0 and [4, B] for mu > 0 with
/// B doubled from 8. Whether a root exists is decided from the quadrature
/// value I(+-4), not from the closed form, except inside the threshold band.
inline EigenvalueSolution solve_eigenvalue(const ModelParams& params,
                                           const QuadratureSpec& spec = {},
                                           double tol = 1e-10,
                                           double eps = 1e-12) {
  if (params.mu() == 0.0)
    throw error(errc::no_discrete_eigenvalue, "mu = 0: empty point spectrum");
  const double target = -params.lambda() / params.mu();
  const double side = params.mu() > 0.0 ? 1.0 : -1.0;
  const double edge = 4.0 * side;

  EigenvalueSolution sol;
  auto g = [&](double nu) {
    ++sol.evaluations;
    return integral_I(nu, spec) - target;
  };
  auto finish = [&](double nu, double gval) {
    sol.nu = {nu};
    sol.energy = nu * params.lambda();
    sol.residual = std::abs(gval);
    return sol;
  };

  if (classify(params, eps).regime == Regime::threshold_eigenvalue) {
    sol.threshold = true;
    return finish(edge, g(edge));
  }

  // g is increasing in nu on both half-lines.
  const double g_edge = g(edge);
  if (side < 0 ? g_edge <= 0.0 : g_edge >= 0.0)
    throw error(errc::no_discrete_eigenvalue,
                "|lambda/mu| = " + std::to_string(std::abs(1.0 / params.alpha())) +
                    " is not below the threshold ratio");

  double far = 8.0;
  double g_far = g(side * far);
  while (side < 0 ? g_far >= 0.0 : g_far <= 0.0) {
    far *= 2.0;
    if (far > 1e15)
      throw error(errc::bracket_failure, "no sign change up to |nu| = 1e15");
    g_far = g(side * far);
  }

  double lo = side < 0 ? -far : edge;
  double hi = side < 0 ? edge : far;
  double glo = side < 0 ? g_far : g_edge;
  double ghi = side < 0 ? g_edge : g_far;
  int retained = 0;  // -1: lo kept twice in a row, +1: hi kept twice
  double best = lo, gbest = glo;
  for (int iter = 0; iter < 300; ++iter) {
    double x = lo - glo * (hi - lo) / (ghi - glo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double gx = g(x);
    if (std::abs(gx) < std::abs(gbest)) {
      best = x;
      gbest = gx;
    }
    // I' is small far from the band, so stop well inside the tolerance.
    if (std::abs(gx) <= 1e-2 * tol) return finish(x, gx);
    if (gx < 0.0) {
      lo = x;
      glo = gx;
      if (retained == 1) ghi *= 0.5;
      retained = 1;
    } else {
      hi = x;
      ghi = gx;
      if (retained == -1) glo *= 0.5;
      retained = -1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x))
      break;
  }
  if (std::abs(gbest) <= tol) return finish(best, gbest);
  throw error(errc::bracket_failure,
              "root bracket collapsed above tolerance", std::abs(gbest));
}

/// (1/2 pi i) \oint x1(t) (t - 1/t) t^{-2} dt inside the band, 0 < |nu| < 4,
/// with the even branch x1_on_circle. Reduces to
/// (2/pi) \int_0^pi x1(e^{i phi}) sin^2(phi) dphi; the panels are split at
/// the end of the unit-modulus arc where x1 has a square-root branch point.
inline std::complex<double> offband_integral(
    double nu, const QuadratureSpec& spec = {},
    curve::ArcSide side = curve::ArcSide::upper) {
  if (nu == 0.0)
    throw error(errc::ambiguous_branch, "nu = 0 has no distinguished branch");
  if (!(std::abs(nu) < 4.0))
    throw error(errc::wrong_regime, "offband_integral needs 0 < |nu| < 4");
  constexpr double pi = std::numbers::pi;
  const double split =
      nu < 0.0 ? std::acos(-1.0 - 0.5 * nu) : std::acos(1.0 - 0.5 * nu);
  auto part = [&](auto proj) {
    auto h = [&](double phi) {
      const double s = std::sin(phi);
      return proj(curve::x1_on_circle(phi, nu, side)) * s * s;
    };
    return integrate_sqrt_end(h, 0.0, split, false, spec).value +
           integrate_sqrt_end(h, split, pi, true, spec).value;
  };
  const double re = part([](std::complex<double> z) { return z.real(); });
  const double im = part([](std::complex<double> z) { return z.imag(); });
  return {2.0 / pi * re, 2.0 / pi * im};
}

}  // namespace qlattice
