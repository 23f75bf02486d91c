#pragma once

// The algebraic curve Q(x,y) = y^2 x + x^2 y + nu x y + x + y = 0 attached to
// the bulk stencil, its branch points, and the branches x1(y), y1(x) of
// modulus below one.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "qlattice/errors.hpp"

namespace qlattice::curve {

using cd = std::complex<double>;

inline cd eval_Q(cd x, cd y, double nu) {
  return y * y * x + x * x * y + nu * x * y + x + y;
}

/// q(x,y) = x^2 + xy + nu x + 1. The coefficient of F(x) is q(x,y), the
/// coefficient of G(y) is q(y,x).
inline cd eval_q(cd x, cd y, double nu) { return x * x + x * y + nu * x + 1.0; }

inline cd eval_q0(cd x, cd y, double nu, double alpha) {
  return x + y + nu - alpha;
}

/// Roots of a quadratic ordered by modulus, |inner| <= |outer|.
struct QuadraticRoots {
  cd inner;
  cd outer;
};

/// Roots of z^2 + b z + 1 = 0. The larger root is formed without
/// cancellation and the smaller one from the product identity.
inline QuadraticRoots unit_product_roots(cd b) {
  cd disc = std::sqrt((b - 2.0) * (b + 2.0));
  if (std::real(std::conj(b) * disc) < 0.0) disc = -disc;
  const cd big = -(b + disc) / 2.0;
  const cd small = 1.0 / big;
  if (std::abs(small) <= std::abs(big)) return {small, big};
  return {big, small};
}

inline QuadraticRoots unit_product_roots(double b) {
  if (std::abs(b) >= 2.0) {
    const double disc = std::sqrt((std::abs(b) - 2.0) * (std::abs(b) + 2.0));
    const double big = -std::copysign(0.5 * (std::abs(b) + disc), b);
    return {cd(1.0 / big, 0.0), cd(big, 0.0)};
  }
  const double im = std::sqrt((2.0 - b) * (2.0 + b)) / 2.0;
  return {cd(-b / 2.0, im), cd(-b / 2.0, -im)};
}

enum class BranchGeometry {
  all_real,                   // |nu| > 4
  two_real_two_unit_circle,   // 0 < |nu| < 4
  degenerate_edge,            // |nu| == 4, double root at -sign(nu)
  factorized,                 // nu == 0, Q = (x+y)(xy+1)
};

inline const char* to_string(BranchGeometry g) {
  switch (g) {
    case BranchGeometry::all_real: return "AllReal";
    case BranchGeometry::two_real_two_unit_circle: return "TwoRealTwoUnitCircle";
    case BranchGeometry::degenerate_edge: return "DegenerateEdge";
    case BranchGeometry::factorized: return "Factorized";
  }
  return "?";
}

/// Zeros of the discriminant D(x) = (x^2+(nu+2)x+1)(x^2+(nu-2)x+1).
struct BranchPointSet {
  double nu = 0.0;
  std::array<cd, 2> roots_plus;   // x^2 + (nu+2) x + 1
  std::array<cd, 2> roots_minus;  // x^2 + (nu-2) x + 1
  BranchGeometry geometry = BranchGeometry::all_real;

  std::array<cd, 4> all() const {
    return {roots_plus[0], roots_plus[1], roots_minus[0], roots_minus[1]};
  }

  /// Real parts of the four points sorted ascending; meaningful for all_real.
  std::array<double, 4> ordered() const {
    std::array<double, 4> r{};
    auto a = all();
    for (int i = 0; i < 4; ++i) r[i] = a[i].real();
    std::sort(r.begin(), r.end());
    return r;
  }

  /// Largest modulus among the branch points in the closed unit disk. For
  /// |nu| > 4 this is the decay ratio of boundary coefficients.
  double inner_modulus() const {
    double best = 0.0;
    for (const cd& z : all())
      if (std::abs(z) <= 1.0 + 1e-15) best = std::max(best, std::abs(z));
    return std::min(best, 1.0);
  }
};

inline BranchPointSet branch_points(double nu) {
  BranchPointSet set;
  set.nu = nu;
  const auto plus = unit_product_roots(nu + 2.0);
  const auto minus = unit_product_roots(nu - 2.0);
  set.roots_plus = {plus.inner, plus.outer};
  set.roots_minus = {minus.inner, minus.outer};
  const double a = std::abs(nu);
  if (a > 4.0)
    set.geometry = BranchGeometry::all_real;
  else if (a == 4.0)
    set.geometry = BranchGeometry::degenerate_edge;
  else if (nu == 0.0)
    set.geometry = BranchGeometry::factorized;
  else
    set.geometry = BranchGeometry::two_real_two_unit_circle;
  return set;
}

/// d(phi, nu) = x1(e^{i phi}) for |nu| >= 4, the real boundary value of the
/// inner branch. Evaluated as -sign(u) / (|u| + sqrt(u^2 - 1)) with
/// u = cos(phi) + nu/2, which has no cancellation for large |nu|.
inline double d_eval(double phi, double nu) {
  if (!(std::abs(nu) >= 4.0))
    throw error(errc::wrong_regime, "d(phi, nu) needs |nu| >= 4");
  const double u = std::cos(phi) + 0.5 * nu;
  double near_one;  // |u| - 1, formed from half-angle terms
  if (nu < 0.0) {
    const double s = std::sin(0.5 * phi);
    near_one = -0.5 * (nu + 4.0) + 2.0 * s * s;
  } else {
    const double c = std::cos(0.5 * phi);
    near_one = 0.5 * (nu - 4.0) + 2.0 * c * c;
  }
  near_one = std::max(near_one, 0.0);
  const double au = std::abs(u);
  const double root = std::sqrt(near_one * (au + 1.0));
  return (nu < 0.0 ? 1.0 : -1.0) / (au + root);
}

/// Which root to use on the arc of the circle where both roots of the
/// x-quadratic have modulus one.
enum class ArcSide { upper, lower };

/// The branch x1(e^{i phi}) with |x1| <= 1 for |nu| <= 4. Off the arc it is
/// the unique root inside the disk; on the arc |cos(phi) + nu/2| <= 1 it is
/// the root with Im >= 0 (upper) or Im <= 0 (lower). The result is even in
/// phi, matching continuity tracking from the real part of the circle.
inline cd x1_on_circle(double phi, double nu, ArcSide side = ArcSide::upper) {
  if (std::abs(nu) > 4.0)
    throw error(errc::wrong_regime, "x1_on_circle needs |nu| <= 4");
  if (nu == 0.0)
    throw error(errc::ambiguous_branch,
                "nu = 0: both roots have modulus one on the whole circle");
  const double s = 2.0 * std::cos(phi) + nu;
  const auto roots = unit_product_roots(s);
  if (std::abs(s) > 2.0) return roots.inner;
  const cd up = roots.inner.imag() >= 0.0 ? roots.inner : roots.outer;
  return side == ArcSide::upper ? up : std::conj(up);
}

/// Small-step continuation of the x-branch along an ascending phi grid,
/// seeded where |2 cos(phi) + nu| is largest (roots of distinct moduli) and
/// extended by nearest-root matching. Exact ties, which happen where the
/// path enters the unit-modulus arc through a double root, go to `side`.
inline std::vector<cd> track_x1_on_circle(double nu, std::span<const double> phis,
                                          ArcSide side = ArcSide::upper) {
  if (std::abs(nu) > 4.0)
    throw error(errc::wrong_regime, "track_x1_on_circle needs |nu| <= 4");
  if (nu == 0.0)
    throw error(errc::ambiguous_branch, "nu = 0 has no distinguished branch");
  std::vector<cd> out(phis.size());
  if (phis.empty()) return out;

  auto candidates = [nu](double phi) {
    return unit_product_roots(2.0 * std::cos(phi) + nu);
  };
  auto pick = [side](const QuadraticRoots& r, cd prev) {
    const double da = std::abs(r.inner - prev);
    const double db = std::abs(r.outer - prev);
    if (std::abs(da - db) <= 1e-12 * (1.0 + da + db)) {
      const bool inner_up = r.inner.imag() >= 0.0;
      const bool want_up = side == ArcSide::upper;
      return inner_up == want_up ? r.inner : r.outer;
    }
    return da < db ? r.inner : r.outer;
  };

  std::size_t seed = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const double s = std::abs(2.0 * std::cos(phis[i]) + nu);
    if (s > best) {
      best = s;
      seed = i;
    }
  }
  {
    const auto r = candidates(phis[seed]);
    if (best > 2.0) {
      out[seed] = r.inner;
    } else {
      const cd up = r.inner.imag() >= 0.0 ? r.inner : r.outer;
      out[seed] = side == ArcSide::upper ? up : std::conj(up);
    }
  }
  for (std::size_t i = seed + 1; i < phis.size(); ++i)
    out[i] = pick(candidates(phis[i]), out[i - 1]);
  for (std::size_t i = seed; i-- > 0;)
    out[i] = pick(candidates(phis[i]), out[i + 1]);
  return out;
}

/// Both roots in y of Q(x, y) = 0 at fixed x != 0, i.e. of
/// y^2 + (x + 1/x + nu) y + 1 = 0.
inline QuadraticRoots roots_y_of_x(cd x, double nu) {
  return unit_product_roots(x + 1.0 / x + nu);
}

/// y1(x) for |nu| > 4: the branch with |y1| < 1 on the plane cut along
/// the real segments between branch points.
inline cd y1_of_x(cd x, double nu) {
  if (!(std::abs(nu) > 4.0))
    throw error(errc::wrong_regime, "y1_of_x needs |nu| > 4");
  if (x == 0.0) return 0.0;
  const cd s = x + 1.0 / x + nu;
  if (std::abs(s.imag()) <= 1e-14 * (1.0 + std::abs(s)) &&
      std::abs(s.real()) <= 2.0)
    throw error(errc::on_branch_cut, "x lies on a branch cut");
  return unit_product_roots(s).inner;
}

/// x1(y) for |nu| > 4, solved from the quadratic in x,
/// y x^2 + (y^2 + nu y + 1) x + y = 0, without normalizing it.
inline cd x1_of_y(cd y, double nu) {
  if (!(std::abs(nu) > 4.0))
    throw error(errc::wrong_regime, "x1_of_y needs |nu| > 4");
  if (y == 0.0) return 0.0;
  const cd a = y;
  const cd b = y * y + nu * y + 1.0;
  const cd c = y;
  cd disc = std::sqrt(b * b - 4.0 * a * c);
  if (std::real(std::conj(b) * disc) < 0.0) disc = -disc;
  const cd q = -(b + disc) / 2.0;
  const cd r1 = q / a;
  const cd r2 = c / q;
  const double m1 = std::abs(r1);
  const double m2 = std::abs(r2);
  if (std::abs(m1 - m2) <= 1e-13 * std::max(m1, m2))
    throw error(errc::on_branch_cut, "y lies on a branch cut");
  return m1 < m2 ? r1 : r2;
}

}  // namespace qlattice::curve
