#pragma once

// Bound-state wavefunction from the Carleman boundary problem on the unit
// circle.
//
// With f00 = 1 the boundary generating function G1(y) = y (f00 + y G(y)) has
// coefficients c_{n+1} = -alpha * M_n where
//
//     M_n = (1/2 pi i) \oint x1(t) (t - 1/t) t^{-(n+2)} dt
//         = (2/pi) \int_0^pi d(phi, nu) sin(phi) sin((n+1) phi) dphi.
//
// The eigenvalue condition is exactly c_1 = f00, i.e. -M_0 = 1/alpha. The
// interior f_{m,n}, m,n >= 1 is then fixed by the bulk equations with the
// boundary rows as Dirichlet data.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qlattice/curve.hpp"
#include "qlattice/errors.hpp"
#include "qlattice/model.hpp"
#include "qlattice/quadrature.hpp"
#include "qlattice/solver.hpp"

namespace qlattice {

/// Which side of the x <-> y symmetric pair the moments are taken from:
/// `y` uses x1(y) (the G / column data), `x` uses y1(x) (the F / row data).
enum class BranchVariable { y, x };

struct MomentTable {
  double nu = 0.0;
  std::vector<double> values;  // M_0 .. M_K
  double max_imag = 0.0;       // largest discarded imaginary part
  QuadratureSpec::Method method = QuadratureSpec::Method::trapezoid_fft;
  double radius = 1.0;  // contour radius used by the FFT route
  std::size_t samples = 0;
};

/// Smallest K with rho^K < 1e-12, rho the inner branch-point modulus.
/// At the band edge (rho = 1) the coefficients decay algebraically and
/// `edge_order` is used instead.
inline std::size_t auto_order(double nu, std::size_t edge_order = 400) {
  const double rho = curve::branch_points(nu).inner_modulus();
  if (!(rho < 1.0)) return edge_order;
  if (rho == 0.0) return 1;
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::log(1e-12) / std::log(rho))));
}

namespace detail {

inline MomentTable moments_by_quadrature(double nu, std::size_t K,
                                         const QuadratureSpec& spec) {
  constexpr double pi = std::numbers::pi;
  MomentTable table;
  table.nu = nu;
  table.method = QuadratureSpec::Method::gauss_kronrod;
  table.values.resize(K + 1);
  for (std::size_t n = 0; n <= K; ++n) {
    const double freq = static_cast<double>(n + 1);
    auto h = [nu, freq](double phi) {
      return curve::d_eval(phi, nu) * std::sin(phi) * std::sin(freq * phi);
    };
    const QuadratureResult r =
        nu < 0.0 ? integrate_sqrt_end(h, 0.0, pi / 2, true, spec) +
                       integrate(h, pi / 2, pi, spec)
                 : integrate(h, 0.0, pi / 2, spec) +
                       integrate_sqrt_end(h, pi / 2, pi, false, spec);
    table.values[n] = 2.0 / pi * r.value;
  }
  return table;
}

inline std::size_t next_pow2(double x) {
  std::size_t p = 1;
  while (static_cast<double>(p) < x && p < (std::size_t{1} << 24)) p <<= 1;
  return p;
}

// Trapezoidal rule on the circle |t| = R, all coefficients from one FFT.
// For |nu| > 4 the integrand is analytic in rho < |t| < 1/rho, so the
// contour is pushed out to R = rho^{-3/4}; the Laurent coefficient a_j is
// then recovered with relative (not just absolute) accuracy for large j.
inline MomentTable moments_by_fft(double nu, std::size_t K,
                                  const QuadratureSpec& spec,
                                  BranchVariable var) {
  using cd = std::complex<double>;
  constexpr double pi = std::numbers::pi;
  const double rho = curve::branch_points(nu).inner_modulus();

  MomentTable table;
  table.nu = nu;
  table.method = QuadratureSpec::Method::trapezoid_fft;
  double R = 1.0;
  std::size_t L = next_pow2(std::max<double>(spec.nodes, 4.0 * (K + 2)));
  if (rho < 1.0) {
    R = std::pow(rho, -0.75);
    // aliasing decays like (R rho)^L = rho^{L/4}
    L = std::max(L, next_pow2(4.0 * 39.2 / -std::log(rho)));
  } else {
    L = std::max<std::size_t>(L, std::size_t{1} << 16);
  }
  table.radius = R;
  table.samples = L;

  std::vector<cd> samples(L);
  for (std::size_t k = 0; k < L; ++k) {
    const double theta = 2.0 * pi * static_cast<double>(k) / static_cast<double>(L);
    if (R == 1.0) {
      samples[k] = cd(0.0, 2.0 * std::sin(theta)) * curve::d_eval(theta, nu);
    } else {
      const cd t = std::polar(R, theta);
      const cd branch = var == BranchVariable::y ? curve::x1_of_y(t, nu)
                                                 : curve::y1_of_x(t, nu);
      samples[k] = branch * (t - 1.0 / t);
    }
  }
  Eigen::FFT<double> fft;
  std::vector<cd> spectrum;
  fft.fwd(spectrum, samples);

  table.values.resize(K + 1);
  for (std::size_t n = 0; n <= K; ++n) {
    const std::size_t j = n + 1;
    const cd a = spectrum[j] / static_cast<double>(L) *
                 std::pow(R, -static_cast<double>(j));
    table.values[n] = a.real();
    table.max_imag = std::max(table.max_imag, std::abs(a.imag()));
  }
  return table;
}

}  // namespace detail

/// Moments M_0..M_K for |nu| >= 4 by the method named in `spec`.
inline MomentTable compute_moments(double nu, std::size_t K,
                                   const QuadratureSpec& spec,
                                   BranchVariable var = BranchVariable::y) {
  if (!(std::abs(nu) >= 4.0))
    throw error(errc::wrong_regime, "moments need |nu| >= 4");
  spec.validate();
  if (spec.method == QuadratureSpec::Method::gauss_kronrod)
    return detail::moments_by_quadrature(nu, K, spec);
  return detail::moments_by_fft(nu, K, spec, var);
}

inline QuadratureSpec default_moment_spec() {
  QuadratureSpec s;
  s.method = QuadratureSpec::Method::trapezoid_fft;
  s.nodes = 4096;
  return s;
}

struct BoundaryData {
  double f00 = 1.0;
  double c1 = 1.0;                  // -alpha * M_0, equals f00 at an eigenvalue
  std::vector<double> row;          // f_{m,0}, m = 1..K
  std::vector<double> col;          // f_{0,n}, n = 1..K
  MomentTable row_moments;
  MomentTable col_moments;
};

/// Boundary coefficients at an eigenvalue nu (or the band edge).
/// Throws NotAnEigenvalue when |c_1 - f00| > tol.
inline BoundaryData boundary_coeffs(const ModelParams& params,
                                    RenormalizedEnergy nu, std::size_t K,
                                    const QuadratureSpec& spec = default_moment_spec(),
                                    double tol = 1e-8) {
  BoundaryData out;
  out.col_moments = compute_moments(nu.nu, K, spec, BranchVariable::y);
  out.row_moments = compute_moments(nu.nu, K, spec, BranchVariable::x);
  const double alpha = params.alpha();
  out.c1 = -alpha * out.f00 * out.col_moments.values[0];
  if (!(std::abs(out.c1 - out.f00) <= tol))
    throw error(errc::not_an_eigenvalue,
                "c1 = " + std::to_string(out.c1) + " differs from f00",
                std::abs(out.c1 - out.f00));
  out.row.resize(K);
  out.col.resize(K);
  for (std::size_t q = 1; q <= K; ++q) {
    out.col[q - 1] = -alpha * out.f00 * out.col_moments.values[q];
    out.row[q - 1] = -alpha * out.f00 * out.row_moments.values[q];
  }
  return out;
}

/// Solves the bulk equations (H f)_{m,n} = E f_{m,n}, 1 <= m,n < N, for the
/// interior of an N x N grid, given f00 and the m = 0 / n = 0 edges. Edge
/// data beyond the supplied coefficients is zero, as is everything past the
/// far edge.
inline WaveGrid reconstruct_interior(const ModelParams& params, double energy,
                                     double f00, const std::vector<double>& row,
                                     const std::vector<double>& col,
                                     std::size_t N) {
  if (N < 2) throw error(errc::invalid_grid, "truncation must be >= 2");
  const double lambda = params.lambda();
  const double edge = 4.0 * lambda * std::cos(std::numbers::pi / static_cast<double>(N));
  const double gap = std::abs(energy) - edge;
  const double cond = (std::abs(energy) + edge) / gap;
  if (!(gap > 0.0) || cond > 1e12)
    throw error(errc::ill_conditioned,
                "energy too close to the interior block spectrum",
                gap > 0.0 ? cond : std::numeric_limits<double>::infinity());

  WaveGrid f(N, N);
  f(0, 0) = f00;
  for (std::size_t m = 1; m < N && m - 1 < row.size(); ++m) f(m, 0) = row[m - 1];
  for (std::size_t n = 1; n < N && n - 1 < col.size(); ++n) f(0, n) = col[n - 1];

  const std::size_t M = N - 1;
  const auto idx = [M](std::size_t m, std::size_t n) {
    return static_cast<int>((m - 1) + M * (n - 1));
  };
  // Sign flip keeps the matrix positive definite on both sides of the band.
  const double s = energy < 0.0 ? 1.0 : -1.0;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * M * M);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M * M));
  for (std::size_t n = 1; n < N; ++n) {
    for (std::size_t m = 1; m < N; ++m) {
      const int i = idx(m, n);
      trips.emplace_back(i, i, -s * energy);
      const std::size_t nb[4][2] = {{m + 1, n}, {m - 1, n}, {m, n + 1}, {m, n - 1}};
      for (const auto& p : nb) {
        const std::size_t pm = p[0], pn = p[1];
        if (pm >= N || pn >= N) continue;
        if (pm == 0 || pn == 0)
          rhs[i] += s * lambda * f(pm, pn);
        else
          trips.emplace_back(i, idx(pm, pn), -s * lambda);
      }
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(M * M),
                                static_cast<Eigen::Index>(M * M));
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw error(errc::ill_conditioned, "factorization failed", cond);
  const Eigen::VectorXd x = ldlt.solve(rhs);
  const double bnorm = rhs.norm();
  if (bnorm > 0.0 && (A * x - rhs).norm() > 1e-10 * bnorm)
    throw error(errc::ill_conditioned, "interior solve residual too large", cond);

  for (std::size_t n = 1; n < N; ++n)
    for (std::size_t m = 1; m < N; ++m) f(m, n) = x[idx(m, n)];
  return f;
}

struct BoundState {
  ModelParams params;
  RenormalizedEnergy nu;
  double energy = 0.0;
  double f00 = 1.0;
  std::vector<double> boundary_row{};  // f_{m,0}, m = 1..K
  std::vector<double> boundary_col{};  // f_{0,n}, n = 1..K
  WaveGrid grid{};                   // N x N, f00 = 1 normalization
  double residual_norm = 0.0;        // ||(H - E) f|| / ||f||
  double symmetry_deviation = 0.0;   // relative transpose asymmetry
  double moment_lock = 0.0;          // |-M_0 - 1/alpha|
  double integral_residual = 0.0;    // |I(nu) + lambda/mu|
  std::size_t order = 0;             // K
  std::size_t truncation = 0;        // N
  bool threshold = false;
};

struct BoundStateOptions {
  std::size_t order = 0;        // 0 picks auto_order
  std::size_t truncation = 80;
  QuadratureSpec integral{};
  QuadratureSpec moments = default_moment_spec();
  double root_tol = 1e-10;
  double lock_tol = 1e-8;
};

/// Full pipeline: eigenvalue, boundary coefficients, interior, certificates.
inline BoundState build_bound_state(const ModelParams& params,
                                    const BoundStateOptions& opt = {}) {
  const EigenvalueSolution sol = solve_eigenvalue(params, opt.integral, opt.root_tol);
  const std::size_t K = opt.order ? opt.order : auto_order(sol.nu.nu);
  // At the band edge only l1-type convergence holds, so the lock is looser.
  const double lock_tol = sol.threshold ? std::max(opt.lock_tol, 1e-6) : opt.lock_tol;
  BoundaryData bd = boundary_coeffs(params, sol.nu, K, opt.moments, lock_tol);

  BoundState st{.params = params, .nu = sol.nu};
  st.energy = sol.energy;
  st.f00 = bd.f00;
  st.boundary_row = std::move(bd.row);
  st.boundary_col = std::move(bd.col);
  st.grid = reconstruct_interior(params, sol.energy, st.f00, st.boundary_row,
                                 st.boundary_col, opt.truncation);
  st.residual_norm = relative_residual(params, st.grid, st.energy);
  st.symmetry_deviation = transpose_asymmetry(st.grid);
  st.moment_lock = std::abs(-bd.col_moments.values[0] - 1.0 / params.alpha());
  st.integral_residual = sol.residual;
  st.order = K;
  st.truncation = opt.truncation;
  st.threshold = sol.threshold;
  return st;
}

/// f scaled to unit l2 norm.
inline WaveGrid l2_normalized(const WaveGrid& f) {
  const double n = norm(f);
  if (n == 0.0) throw error(errc::zero_vector, "cannot normalize zero grid");
  WaveGrid g = f;
  for (double& v : g.values()) v /= n;
  return g;
}

namespace detail {

using cd = std::complex<double>;

// sum_{k>=0} coeffs[k] z^k
inline cd horner(const std::vector<double>& coeffs, std::size_t count, cd z) {
  cd acc = 0.0;
  for (std::size_t k = std::min(count, coeffs.size()); k-- > 0;) acc = acc * z + coeffs[k];
  return acc;
}

struct SeriesView {
  std::vector<double> row;   // f_{p,0}, p >= 1  -> F(x)
  std::vector<double> col;   // f_{0,q}, q >= 1  -> G(y)
  std::vector<std::vector<double>> inner;  // inner[p-1][q-1] = f_{p,q}
};

inline SeriesView series_view(const BoundState& st, std::size_t order) {
  SeriesView v;
  const std::size_t N = st.grid.rows();
  const std::size_t P = std::min(order, N - 1);
  v.row.assign(st.boundary_row.begin(),
               st.boundary_row.begin() + std::min(order, st.boundary_row.size()));
  v.col.assign(st.boundary_col.begin(),
               st.boundary_col.begin() + std::min(order, st.boundary_col.size()));
  v.inner.assign(P, std::vector<double>(P, 0.0));
  for (std::size_t p = 1; p <= P; ++p)
    for (std::size_t q = 1; q <= P; ++q) v.inner[p - 1][q - 1] = st.grid(p, q);
  return v;
}

inline cd eval_inner(const SeriesView& v, cd x, cd y) {
  cd acc = 0.0;
  for (std::size_t p = v.inner.size(); p-- > 0;)
    acc = acc * x + horner(v.inner[p], v.inner[p].size(), y);
  return acc;
}

}  // namespace detail

/// Max over random (x, y) in the bidisk |x|, |y| <= radius of
///   |Q F(x,y) + q(x,y) F(x) + q(y,x) G(y) + q0 f00| / (sum of term moduli)
/// with all generating functions truncated at `order` terms.
inline double functional_equation_residual(const BoundState& st,
                                           std::size_t sample_count = 100,
                                           std::size_t order = 60,
                                           double radius = 0.5,
                                           std::uint64_t seed = 20240601) {
  using cd = std::complex<double>;
  const auto v = detail::series_view(st, order);
  const double nu = st.nu.nu;
  const double alpha = st.params.alpha();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    const double r = radius * std::sqrt(unit(rng));
    return std::polar(r, 2.0 * std::numbers::pi * unit(rng));
  };
  double worst = 0.0;
  for (std::size_t s = 0; s < sample_count; ++s) {
    const cd x = draw();
    const cd y = draw();
    const cd t1 = curve::eval_Q(x, y, nu) * detail::eval_inner(v, x, y);
    const cd t2 = curve::eval_q(x, y, nu) * detail::horner(v.row, v.row.size(), x);
    const cd t3 = curve::eval_q(y, x, nu) * detail::horner(v.col, v.col.size(), y);
    const cd t4 = curve::eval_q0(x, y, nu, alpha) * st.f00;
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
    worst = std::max(worst, std::abs(t1 + t2 + t3 + t4) / scale);
  }
  return worst;
}

struct CurveResiduals {
  double projected = 0.0;   // q(x,y) F(x) + q(y,x) G(y) + q0 f00
  double final_form = 0.0;  // F1(x) + G1(y) + alpha x y f00
};

/// Residuals of the boundary data on the curve, at (x, y1(x)) for
/// |x| = radius; |nu| > 4 only.
inline CurveResiduals curve_equation_residuals(const BoundState& st,
                                               std::size_t samples = 64,
                                               double radius = 0.3) {
  using cd = std::complex<double>;
  const double nu = st.nu.nu;
  const double alpha = st.params.alpha();
  CurveResiduals out;
  for (std::size_t k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * (k + 0.5) / static_cast<double>(samples);
    const cd x = std::polar(radius, theta);
    const cd y = curve::y1_of_x(x, nu);
    const cd F = detail::horner(st.boundary_row, st.boundary_row.size(), x);
    const cd G = detail::horner(st.boundary_col, st.boundary_col.size(), y);
    const cd a = curve::eval_q(x, y, nu) * F;
    const cd b = curve::eval_q(y, x, nu) * G;
    const cd c = curve::eval_q0(x, y, nu, alpha) * st.f00;
    out.projected = std::max(
        out.projected, std::abs(a + b + c) / (std::abs(a) + std::abs(b) + std::abs(c)));
    const cd F1 = x * (st.f00 + x * F);
    const cd G1 = y * (st.f00 + y * G);
    const cd e = alpha * x * y * st.f00;
    out.final_form = std::max(
        out.final_form, std::abs(F1 + G1 + e) / (std::abs(F1) + std::abs(G1) + std::abs(e)));
  }
  return out;
}

}  // namespace qlattice
