#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qlattice/curve.hpp"

using namespace qlattice;
using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  return errc::io_error;  // sentinel: nothing thrown
}

}  // namespace

TEST(Polynomials, Identities) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (double nu : {-6.0, -1.0, 2.5}) {
    EXPECT_EQ(curve::eval_Q(0.0, 0.0, nu), cd(0.0));
    EXPECT_NEAR(std::abs(curve::eval_Q(1.0, 1.0, nu) - (nu + 4.0)), 0.0, 1e-15);
    for (int k = 0; k < 20; ++k) {
      const cd x(u(rng), u(rng)), y(u(rng), u(rng));
      EXPECT_NEAR(std::abs(curve::eval_Q(x, y, nu) - curve::eval_Q(y, x, nu)), 0.0, 1e-14);
      const cd Q = y * y * x + x * x * y + nu * x * y + x + y;
      EXPECT_NEAR(std::abs(curve::eval_Q(x, y, nu) - Q), 0.0, 1e-13);
    }
  }
}

TEST(Polynomials, FactorizesAtZero) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const cd x(u(rng), u(rng)), y(u(rng), u(rng));
    EXPECT_NEAR(std::abs(curve::eval_Q(x, y, 0.0) - (x + y) * (x * y + 1.0)), 0.0, 1e-14);
  }
}

TEST(BranchPoints, MinusFiveClosedForm) {
  const auto bp = curve::branch_points(-5.0);
  const double s5 = std::sqrt(5.0);
  EXPECT_NEAR(bp.roots_plus[0].real(), (3.0 - s5) / 2.0, 1e-15);
  EXPECT_NEAR(bp.roots_plus[1].real(), (3.0 + s5) / 2.0, 1e-14);
  EXPECT_NEAR(bp.roots_minus[0].real(), (7.0 - 3.0 * s5) / 2.0, 1e-15);
  EXPECT_NEAR(bp.roots_minus[1].real(), (7.0 + 3.0 * s5) / 2.0, 1e-14);
  const auto o = bp.ordered();
  EXPECT_NEAR(o[0], 0.1458980337503155, 1e-15);
  EXPECT_NEAR(o[1], 0.3819660112501051, 1e-15);
  EXPECT_GT(o[2], 1.0);
  EXPECT_EQ(bp.geometry, curve::BranchGeometry::all_real);
  EXPECT_NEAR(bp.inner_modulus(), 0.3819660112501051, 1e-15);
}

TEST(BranchPoints, DoubleRootAtEdges) {
  const auto m4 = curve::branch_points(-4.0);
  EXPECT_EQ(m4.geometry, curve::BranchGeometry::degenerate_edge);
  EXPECT_NEAR(std::abs(m4.roots_plus[0] - 1.0), 0.0, 1e-7);
  EXPECT_NEAR(std::abs(m4.roots_plus[1] - 1.0), 0.0, 1e-7);
  const auto p4 = curve::branch_points(4.0);
  EXPECT_NEAR(std::abs(p4.roots_minus[0] + 1.0), 0.0, 1e-7);
  EXPECT_NEAR(std::abs(p4.roots_minus[1] + 1.0), 0.0, 1e-7);
}

TEST(BranchPoints, VietaAndClassification) {
  for (double nu = -6.0; nu <= 6.0; nu += 0.25) {
    const auto bp = curve::branch_points(nu);
    EXPECT_NEAR(std::abs(bp.roots_plus[0] * bp.roots_plus[1] - 1.0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(bp.roots_minus[0] * bp.roots_minus[1] - 1.0), 0.0, 1e-13);
    const double a = std::abs(nu);
    if (a > 4.0) {
      EXPECT_EQ(bp.geometry, curve::BranchGeometry::all_real);
      for (const cd& z : bp.all()) EXPECT_EQ(z.imag(), 0.0);
      EXPECT_LT(bp.inner_modulus(), 1.0);
    } else if (a == 4.0) {
      EXPECT_EQ(bp.geometry, curve::BranchGeometry::degenerate_edge);
    } else if (nu == 0.0) {
      EXPECT_EQ(bp.geometry, curve::BranchGeometry::factorized);
    } else {
      EXPECT_EQ(bp.geometry, curve::BranchGeometry::two_real_two_unit_circle);
      int on_circle = 0, real_inside = 0;
      for (const cd& z : bp.all()) {
        if (std::abs(std::abs(z) - 1.0) < 1e-12 && z.imag() != 0.0) ++on_circle;
        if (z.imag() == 0.0 && std::abs(z) < 1.0) ++real_inside;
      }
      EXPECT_EQ(on_circle, 2);
      EXPECT_EQ(real_inside, 1);
    }
  }
  for (double nu : {-10.0, -4.5, 3.0, 6.0}) {
    const auto bp = curve::branch_points(nu);
    EXPECT_NEAR(std::abs(bp.roots_plus[0] * bp.roots_plus[1] - 1.0), 0.0, 1e-13);
  }
}

TEST(DEval, ClosedFormValues) {
  EXPECT_NEAR(curve::d_eval(pi / 2, -5.0), 2.5 - std::sqrt(5.25), 1e-15);
  EXPECT_NEAR(curve::d_eval(pi / 2, -5.0), 0.2087121525220800, 1e-15);
  EXPECT_EQ(curve::d_eval(0.0, -4.0), 1.0);
  EXPECT_EQ(code_of([] { curve::d_eval(0.0, 3.0); }), errc::wrong_regime);
}

TEST(DEval, Symmetries) {
  for (double nu : {-4.0, -5.0, -9.0, 4.5}) {
    for (int k = 0; k < 100; ++k) {
      const double phi = pi * k / 99.0;
      EXPECT_EQ(curve::d_eval(phi, nu), curve::d_eval(-phi, nu));
      EXPECT_NEAR(curve::d_eval(phi, nu), -curve::d_eval(pi - phi, -nu), 1e-15);
    }
  }
}

TEST(InBandBranch, StaysInClosedDisk) {
  for (double nu : {-3.9, -2.0, 1.0, 3.9})
    for (int k = 0; k <= 720; ++k) {
      const double phi = -pi + 2.0 * pi * k / 720.0;
      EXPECT_LE(std::abs(curve::x1_on_circle(phi, nu)), 1.0 + 1e-12);
    }
  // nu = 2, y = -1: -x^2 + 0 x - 1 = 0 gives x = +-i.
  const cd x = curve::x1_on_circle(pi, 2.0);
  EXPECT_LE(std::abs(x), 1.0 + 1e-15);
  EXPECT_NEAR(std::abs(curve::eval_Q(x, -1.0, 2.0)), 0.0, 1e-15);
}

TEST(InBandBranch, SolvesCurveAndIsEven) {
  for (double nu : {-3.5, -2.0, 1.0, 2.0, 3.5})
    for (int k = 0; k <= 200; ++k) {
      const double phi = pi * k / 200.0;
      const cd y = std::polar(1.0, phi);
      const cd x = curve::x1_on_circle(phi, nu);
      EXPECT_NEAR(std::abs(curve::eval_Q(x, y, nu)), 0.0, 1e-14);
      EXPECT_EQ(curve::x1_on_circle(-phi, nu), x);
    }
}

TEST(InBandBranch, ConjugateSymmetry) {
  // The two arc sides are complex conjugates; off the arc the branch is real,
  // so x1(conj y) = conj x1(y) there.
  for (double nu : {-3.5, -2.0, 1.0, 2.0, 3.5})
    for (int k = 0; k <= 200; ++k) {
      const double phi = pi * k / 200.0;
      const cd up = curve::x1_on_circle(phi, nu, curve::ArcSide::upper);
      const cd dn = curve::x1_on_circle(phi, nu, curve::ArcSide::lower);
      EXPECT_EQ(dn, std::conj(up));
      if (std::abs(2.0 * std::cos(phi) + nu) > 2.0) {
        EXPECT_EQ(up.imag(), 0.0);
        EXPECT_EQ(curve::x1_on_circle(-phi, nu), std::conj(up));
      }
    }
}

TEST(InBandBranch, TrackingAgreesWithClosedChoice) {
  for (double nu : {-3.5, -2.0, -0.5, 1.0, 2.0, 3.5}) {
    for (auto side : {curve::ArcSide::upper, curve::ArcSide::lower}) {
      std::vector<double> phis;
      for (int k = 0; k <= 1000; ++k) phis.push_back(pi * k / 1000.0);
      const auto tracked = curve::track_x1_on_circle(nu, phis, side);
      for (std::size_t k = 0; k < phis.size(); ++k)
        EXPECT_NEAR(std::abs(tracked[k] - curve::x1_on_circle(phis[k], nu, side)), 0.0, 1e-9)
            << "nu=" << nu << " phi=" << phis[k];
    }
  }
}

TEST(InBandBranch, Errors) {
  EXPECT_EQ(code_of([] { curve::x1_on_circle(0.3, 0.0); }), errc::ambiguous_branch);
  EXPECT_EQ(code_of([] { curve::x1_on_circle(0.3, 4.5); }), errc::wrong_regime);
  std::vector<double> phis{0.0, 1.0};
  EXPECT_EQ(code_of([&] { curve::track_x1_on_circle(0.0, phis); }), errc::ambiguous_branch);
}

TEST(OffBandBranch, RootsOfCurveInsideDisk) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const cd x = std::polar(std::sqrt(u(rng)), 2.0 * pi * u(rng));
    if (std::abs(x.imag()) < 1e-3) continue;  // keep clear of the real cuts
    const cd y = curve::y1_of_x(x, -6.0);
    EXPECT_NEAR(std::abs(curve::eval_Q(x, y, -6.0)), 0.0, 1e-12);
    EXPECT_LT(std::abs(y), 1.0);
  }
}

TEST(OffBandBranch, RealOnUnitCircleAndMatchesD) {
  for (double nu : {-10.0, -5.0, -4.2, 4.2, 7.0})
    for (int k = 0; k < 64; ++k) {
      const double phi = 2.0 * pi * k / 64.0;
      const cd y = curve::y1_of_x(std::polar(1.0, phi), nu);
      EXPECT_NEAR(y.imag(), 0.0, 1e-12);
      EXPECT_NEAR(y.real(), curve::d_eval(phi, nu), 1e-12);
    }
}

TEST(OffBandBranch, SmallArgumentLimit) {
  EXPECT_EQ(curve::y1_of_x(0.0, -6.0), cd(0.0));
  const cd r = curve::y1_of_x(1e-6, -6.0) / 1e-6;
  EXPECT_NEAR(std::abs(r + 1.0), 0.0, 1e-5);
}

TEST(OffBandBranch, XAndYBranchesAreTheSameFunction) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double nu : {-10.2, -4.5, 6.3}) {
    for (int k = 0; k < 50; ++k) {
      const cd t = std::polar(0.2 + 0.75 * u(rng), 2.0 * pi * u(rng));
      if (std::abs(t.imag()) < 1e-3) continue;
      EXPECT_NEAR(std::abs(curve::x1_of_y(t, nu) - curve::y1_of_x(t, nu)), 0.0, 1e-13);
    }
  }
}

TEST(OffBandBranch, VietaForBothQuadratics) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double nu : {-7.0, -4.5, 5.0}) {
    for (int k = 0; k < 30; ++k) {
      const cd x(u(rng), u(rng));
      const auto r = curve::roots_y_of_x(x, nu);
      EXPECT_NEAR(std::abs(r.inner * r.outer - 1.0), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(r.inner + r.outer + (x * x + nu * x + 1.0) / x), 0.0,
                  1e-12 * (1.0 + std::abs((x * x + nu * x + 1.0) / x)));
      EXPECT_LE(std::abs(r.inner), std::abs(r.outer));
    }
  }
}

TEST(OffBandBranch, CutsAndRegimeErrors) {
  // For nu = -5 the inner cut is [0.1459, 0.3820] on the real axis.
  EXPECT_EQ(code_of([] { curve::y1_of_x(0.25, -5.0); }), errc::on_branch_cut);
  EXPECT_EQ(code_of([] { curve::x1_of_y(0.25, -5.0); }), errc::on_branch_cut);
  EXPECT_EQ(code_of([] { curve::y1_of_x(0.5, -3.0); }), errc::wrong_regime);
  EXPECT_EQ(code_of([] { curve::x1_of_y(0.5, 3.0); }), errc::wrong_regime);
  EXPECT_NO_THROW(curve::y1_of_x(0.05, -5.0));
  EXPECT_NO_THROW(curve::y1_of_x(0.6, -5.0));
}

TEST(QuadraticRoots, StableNearDoubleRoot) {
  const auto r = curve::unit_product_roots(-2.0 - 1e-12);
  EXPECT_NEAR(std::abs(r.inner * r.outer - 1.0), 0.0, 1e-15);
  const auto big = curve::unit_product_roots(-1e9);
  EXPECT_NEAR(big.inner.real(), 1e-9, 1e-24);
}
