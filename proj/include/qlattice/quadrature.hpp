#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "qlattice/errors.hpp"

namespace qlattice {

struct QuadratureSpec {
  enum class Method { gauss_kronrod, trapezoid_fft };

  Method method = Method::gauss_kronrod;
  /// Kronrod points per panel (21..61 in steps of 10) or FFT sample count.
  unsigned nodes = 31;
  double tolerance = 1e-12;
  unsigned max_refinements = 24;

  void validate() const {
    if (!(tolerance > 0.0))
      throw error(errc::invalid_params, "quadrature tolerance must be > 0");
    if (nodes < 16)
      throw error(errc::invalid_params, "quadrature needs at least 16 nodes");
  }

  /// Same method with every accuracy knob tightened by `factor`.
  QuadratureSpec refined(unsigned factor) const {
    QuadratureSpec s = *this;
    s.tolerance /= factor;
    s.nodes *= factor;
    if (method == Method::gauss_kronrod) s.nodes = 61;
    s.max_refinements += 4;
    return s;
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

namespace detail {

template <unsigned Points, class F>
QuadratureResult gk(F&& f, double a, double b, const QuadratureSpec& spec) {
  QuadratureResult r;
  r.value = boost::math::quadrature::gauss_kronrod<double, Points>::integrate(
      f, a, b, spec.max_refinements, spec.tolerance, &r.error, &r.l1);
  return r;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod on [a, b]. Throws QuadratureFailure when the
/// estimated error exceeds tolerance * max(1, L1).
template <class F>
QuadratureResult integrate(F&& f, double a, double b,
                           const QuadratureSpec& spec) {
  spec.validate();
  QuadratureResult r;
  if (spec.nodes <= 21)
    r = detail::gk<21>(f, a, b, spec);
  else if (spec.nodes <= 31)
    r = detail::gk<31>(f, a, b, spec);
  else if (spec.nodes <= 41)
    r = detail::gk<41>(f, a, b, spec);
  else if (spec.nodes <= 51)
    r = detail::gk<51>(f, a, b, spec);
  else
    r = detail::gk<61>(f, a, b, spec);
  if (!(r.error <= spec.tolerance * std::max(1.0, r.l1)) || !std::isfinite(r.value))
    throw error(errc::quadrature_failure,
                "estimated error " + std::to_string(r.error) +
                    " above tolerance",
                r.error);
  return r;
}

/// Integral over [a, b] when the integrand may have a square-root type
/// singularity in its derivative at one end (`singular_at_a` chooses which).
/// The substitution x = end +- s^2 absorbs it.
template <class F>
QuadratureResult integrate_sqrt_end(F&& f, double a, double b,
                                    bool singular_at_a,
                                    const QuadratureSpec& spec) {
  const double len = b - a;
  const double smax = std::sqrt(std::abs(len));
  if (singular_at_a) {
    return integrate(
        [&](double s) { return 2.0 * s * f(a + s * s); }, 0.0, smax, spec);
  }
  return integrate([&](double s) { return 2.0 * s * f(b - s * s); }, 0.0,
                   smax, spec);
}

inline QuadratureResult operator+(QuadratureResult x, const QuadratureResult& y) {
  x.value += y.value;
  x.error += y.error;
  x.l1 += y.l1;
  return x;
}

}  // namespace qlattice
