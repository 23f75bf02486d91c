#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "qlattice/oracle.hpp"

using namespace qlattice;

namespace {

// Frozen from an independent sparse eigensolve (scipy eigsh) at N = 80.
constexpr double theta_mu_m10 = -10.202062971148605;

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  return errc::io_error;
}

}  // namespace

TEST(Assemble, StencilAndStructure) {
  const auto op = assemble(ModelParams(1.0, 7.0), 3);
  EXPECT_EQ(op.dim(), 9u);
  EXPECT_EQ(op.matrix.coeff(0, 0), 7.0);
  for (Eigen::Index i = 1; i < 9; ++i) EXPECT_EQ(op.matrix.coeff(i, i), 0.0);
  for (Eigen::Index r = 0; r < op.matrix.outerSize(); ++r) {
    int nnz = 0;
    for (decltype(op.matrix)::InnerIterator it(op.matrix, r); it; ++it) {
      ++nnz;
      EXPECT_EQ(it.value(), op.matrix.coeff(it.col(), it.row()));
    }
    EXPECT_LE(nnz, 5);
  }
  EXPECT_EQ(op.norm_bound(), 7.0 + 2.0);
  EXPECT_EQ(code_of([] { assemble(ModelParams(1, 0), 1); }), errc::invalid_grid);
}

TEST(Assemble, MatvecMatchesGridHamiltonian) {
  const ModelParams p(1.7, -3.2);
  const std::size_t N = 11;
  const auto op = assemble(p, N);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    WaveGrid f(N, N);
    for (double& v : f.values()) v = g(rng);
    const Eigen::Map<const Eigen::VectorXd> v(f.values().data(), Eigen::Index(f.size()));
    const Eigen::VectorXd a = op.apply(v);
    const WaveGrid b = apply_hamiltonian(p, f);
    for (std::size_t i = 0; i < f.size(); ++i)
      EXPECT_NEAR(a[Eigen::Index(i)], b.values()[i], 1e-14 * (1.0 + std::abs(b.values()[i])));
  }
}

TEST(FreeSpectrum, SmallestCase) {
  const auto s = truncated_free_spectrum(1.0, 2);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_NEAR(s[0], -2.0, 1e-15);
  EXPECT_NEAR(s[1], 0.0, 1e-15);
  EXPECT_NEAR(s[2], 0.0, 1e-15);
  EXPECT_NEAR(s[3], 2.0, 1e-15);
  const auto d = dense_spectrum(assemble(ModelParams(1.0, 0.0), 2));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(d[i], s[i], 1e-14);
}

TEST(FreeSpectrum, DenseMatchesClosedForm) {
  const auto d = dense_spectrum(assemble(ModelParams(1.0, 0.0), 12));
  const auto s = truncated_free_spectrum(1.0, 12);
  ASSERT_EQ(d.size(), 144u);
  for (std::size_t i = 0; i < 144; ++i) EXPECT_NEAR(d[i], s[i], 1e-10);
}

TEST(FreeSpectrum, StrictlyInsideBandAndApproachingEdges) {
  double prev_gap = INFINITY;
  for (std::size_t N : {4, 8, 16, 32, 64, 128}) {
    const auto s = truncated_free_spectrum(2.0, N);
    EXPECT_GT(s.front(), -8.0);
    EXPECT_LT(s.back(), 8.0);
    const double gap = 8.0 + s.front();
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-2);
}

TEST(Lanczos, FreeExtremesAtForty) {
  const auto op = assemble(ModelParams(1.0, 0.0), 40);
  const auto s = truncated_free_spectrum(1.0, 40);
  EXPECT_NEAR(extremal_eigenpair(op, SpectrumSide::min).value, s.front(), 1e-10);
  EXPECT_NEAR(extremal_eigenpair(op, SpectrumSide::max).value, s.back(), 1e-10);
}

TEST(Lanczos, AgreesWithDenseOnSmallOperators) {
  for (double mu : {-10.0, -1.0, 3.0}) {
    const auto op = assemble(ModelParams(1.0, mu), 10);
    const auto d = dense_spectrum(op);
    LanczosOptions opt;
    opt.dense_limit = 0;  // compare here, not inside
    opt.max_basis = 30;
    opt.keep = 10;
    EXPECT_NEAR(extremal_eigenpair(op, SpectrumSide::min, opt).value, d.front(), 1e-10);
    EXPECT_NEAR(extremal_eigenpair(op, SpectrumSide::max, opt).value, d.back(), 1e-10);
  }
}

TEST(Lanczos, BoundStateAndStability) {
  const ModelParams p(1.0, -10.0);
  const auto a = extremal_eigenpair(assemble(p, 80), SpectrumSide::min);
  const auto b = extremal_eigenpair(assemble(p, 60), SpectrumSide::min);
  EXPECT_NEAR(a.value, theta_mu_m10, 1e-10);
  EXPECT_LT(std::abs(a.value - b.value), 1e-8);
  EXPECT_LT(a.residual, 1e-9);
  EXPECT_GT(a.vector[0], 0.0);
  EXPECT_NEAR(a.vector.norm(), 1.0, 1e-14);
  // Rayleigh quotient through the grid Hamiltonian
  EXPECT_NEAR(rayleigh_quotient(p, to_grid(a.vector, 80)), a.value, 1e-10);
}

TEST(Lanczos, RayleighQuotientAtForty) {
  const ModelParams p(1.0, -6.0);
  const auto a = extremal_eigenpair(assemble(p, 40), SpectrumSide::min);
  EXPECT_NEAR(rayleigh_quotient(p, to_grid(a.vector, 40)), a.value, 1e-10);
}

TEST(Lanczos, GaugeMirror) {
  for (std::size_t N : {20, 40}) {
    const auto lo = extremal_eigenpair(assemble(ModelParams(1.0, -10.0), N), SpectrumSide::min);
    const auto hi = extremal_eigenpair(assemble(ModelParams(1.0, 10.0), N), SpectrumSide::max);
    EXPECT_NEAR(hi.value, -lo.value, 1e-10);
  }
  const auto a = dense_spectrum(assemble(ModelParams(1.0, -2.5), 8));
  const auto b = dense_spectrum(assemble(ModelParams(1.0, 2.5), 8));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], -b[a.size() - 1 - i], 1e-12);
}

TEST(Lanczos, SeedDeterminismAndVerification) {
  const auto op = assemble(ModelParams(1.0, -6.0), 30);
  LanczosOptions opt;
  opt.seed = 5;
  const auto a = extremal_eigenpair(op, SpectrumSide::min, opt);
  const auto b = extremal_eigenpair(op, SpectrumSide::min, opt);
  EXPECT_EQ(a.value, b.value);
  EXPECT_TRUE(a.vector == b.vector);
  opt.verify = true;
  const auto c = extremal_eigenpair(op, SpectrumSide::min, opt);
  EXPECT_TRUE(c.verified);
  opt.seed = 6;
  opt.verify = false;
  const auto d = extremal_eigenpair(op, SpectrumSide::min, opt);
  EXPECT_NEAR(d.value, a.value, 1e-10);
  EXPECT_GT(a.vector.dot(d.vector), 1.0 - 1e-10);  // same sign convention
}

TEST(Lanczos, ReportsNonConvergence) {
  const auto op = assemble(ModelParams(1.0, 0.0), 40);
  LanczosOptions opt;
  opt.max_basis = 8;
  opt.keep = 2;
  opt.max_restarts = 1;
  opt.tol = 1e-14;
  EXPECT_EQ(code_of([&] { extremal_eigenpair(op, SpectrumSide::min, opt); }), errc::no_convergence);
}

TEST(BandCheck, ThreeSites) {
  const auto r = one_d_band_check(1.0, 3);
  EXPECT_NEAR(r.closed_form[0], -std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.closed_form[1], 0.0, 1e-15);
  EXPECT_NEAR(r.closed_form[2], std::sqrt(2.0), 1e-15);
  EXPECT_LT(r.max_deviation, 1e-14);
}

TEST(BandCheck, EdgeAndContainment) {
  EXPECT_LT(one_d_band_check(1.0, 100).edge_gap, 5e-3);
  for (std::size_t N = 2; N <= 200; ++N) {
    const auto r = one_d_band_check(1.5, N);
    EXPECT_TRUE(r.inside_band) << N;
    EXPECT_LT(r.max_deviation, 1e-12) << N;
  }
}

TEST(NoPollution, FreeOperatorHasNoStableOutlier) {
  // Free extremes move with N like 2 pi^2 / (N+1)^2; a bound state would not.
  const ModelParams free_params(1.0, 0.0);
  const double g40 = 4.0 + extremal_eigenpair(assemble(free_params, 40), SpectrumSide::min).value;
  const double g80 = 4.0 + extremal_eigenpair(assemble(free_params, 80), SpectrumSide::min).value;
  EXPECT_GT(g40, 0.0);
  EXPECT_NEAR(g40 / g80, std::pow(81.0 / 41.0, 2), 0.01);
}

TEST(NoBoundState, AboveThresholdRatio) {
  const ModelParams p(1.0, -2.0);
  for (std::size_t N : {40, 80}) {
    const double t = extremal_eigenpair(assemble(p, N), SpectrumSide::min).value;
    const double h = std::numbers::pi / (N + 1.0);
    EXPECT_LE(std::abs(t + 4.0), 3.0 * h * h * 2.0);
  }
}

TEST(Export, CoordinateText) {
  const auto op = assemble(ModelParams(1.0, 7.0), 2);
  std::ostringstream os;
  write_coordinate(os, op);
  EXPECT_EQ(os.str(),
            "0 0 7\n0 1 -1\n0 2 -1\n1 0 -1\n1 3 -1\n2 0 -1\n2 3 -1\n3 1 -1\n3 2 -1\n");
}
