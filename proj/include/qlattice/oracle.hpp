#pragma once

// Finite-section ground truth: the N^2 x N^2 truncation of H with the exact
// corner/edge stencils and a Dirichlet cutoff at the far edge, plus the
// closed-form spectrum of the free (mu = 0) truncation.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <vector>

#include "qlattice/errors.hpp"
#include "qlattice/grid_io.hpp"
#include "qlattice/model.hpp"

namespace qlattice {

struct TruncatedOperator {
  std::size_t N = 0;
  double lambda = 1.0;
  double mu = 0.0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

  std::size_t dim() const noexcept { return N * N; }
  /// Same layout as WaveGrid: m fastest.
  std::size_t index(std::size_t m, std::size_t n) const noexcept { return m + N * n; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return matrix * v; }

  /// Max absolute row sum, an upper bound for the operator norm.
  double norm_bound() const {
    double best = 0.0;
    for (Eigen::Index r = 0; r < matrix.outerSize(); ++r) {
      double s = 0.0;
      for (decltype(matrix)::InnerIterator it(matrix, r); it; ++it) s += std::abs(it.value());
      best = std::max(best, s);
    }
    return best;
  }
};

inline TruncatedOperator assemble(const ModelParams& params, std::size_t N) {
  if (N < 2) throw error(errc::invalid_grid, "truncation must be >= 2");
  TruncatedOperator op;
  op.N = N;
  op.lambda = params.lambda();
  op.mu = params.mu();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * N * N);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t m = 0; m < N; ++m) {
      const auto i = static_cast<int>(op.index(m, n));
      if (m + 1 < N) trips.emplace_back(i, static_cast<int>(op.index(m + 1, n)), -op.lambda);
      if (m > 0) trips.emplace_back(i, static_cast<int>(op.index(m - 1, n)), -op.lambda);
      if (n + 1 < N) trips.emplace_back(i, static_cast<int>(op.index(m, n + 1)), -op.lambda);
      if (n > 0) trips.emplace_back(i, static_cast<int>(op.index(m, n - 1)), -op.lambda);
    }
  }
  if (op.mu != 0.0) trips.emplace_back(0, 0, op.mu);
  const auto d = static_cast<Eigen::Index>(N * N);
  op.matrix.resize(d, d);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

/// Exact spectrum of the mu = 0 truncation, sorted ascending:
/// -2 lambda (cos(j pi/(N+1)) + cos(k pi/(N+1))), 1 <= j,k <= N.
inline std::vector<double> truncated_free_spectrum(double lambda, std::size_t N) {
  std::vector<double> one(N);
  for (std::size_t j = 1; j <= N; ++j)
    one[j - 1] = -2.0 * lambda * std::cos(j * std::numbers::pi / static_cast<double>(N + 1));
  std::vector<double> out;
  out.reserve(N * N);
  for (double a : one)
    for (double b : one) out.push_back(a + b);
  std::sort(out.begin(), out.end());
  return out;
}

/// All eigenvalues by dense diagonalization; small N only.
inline std::vector<double> dense_spectrum(const TruncatedOperator& op) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

enum class SpectrumSide { min, max };

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;  // ||A v - value v||, v unit
  unsigned matvecs = 0;
  unsigned restarts = 0;
  bool verified = false;
};

struct LanczosOptions {
  double tol = 1e-11;          // relative to the norm bound of A
  unsigned max_basis = 120;
  unsigned keep = 40;          // Ritz vectors retained on restart
  unsigned max_restarts = 2000;
  std::uint64_t seed = 1;
  bool verify = false;         // rerun from a second start vector
  std::size_t dense_limit = 24;  // N up to which a dense solve cross-checks
};

namespace detail {

inline EigenPair thick_restart_lanczos(const TruncatedOperator& op, SpectrumSide side,
                                       const LanczosOptions& opt, std::uint64_t seed) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const auto dim = static_cast<Eigen::Index>(op.dim());
  const Eigen::Index m = std::min<Eigen::Index>(opt.max_basis, dim);
  const Eigen::Index keep = std::clamp<Eigen::Index>(opt.keep, 1, std::max<Eigen::Index>(1, m - 2));
  const double norm_a = std::max(op.norm_bound(), 1e-300);

  MatrixXd V(dim, m + 1);
  MatrixXd H = MatrixXd::Zero(m, m);
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    VectorXd v0(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v0[i] = gauss(rng);
    V.col(0) = v0.normalized();
  }

  EigenPair out;
  Eigen::Index k = 0;
  double best_residual = std::numeric_limits<double>::infinity();
  for (unsigned restart = 0; restart <= opt.max_restarts; ++restart) {
    Eigen::Index filled = m;
    double beta = 0.0;
    bool exhausted = false;
    for (Eigen::Index j = k; j < m; ++j) {
      VectorXd w = op.apply(V.col(j));
      ++out.matvecs;
      // classical Gram-Schmidt, applied twice
      VectorXd h = V.leftCols(j + 1).transpose() * w;
      w.noalias() -= V.leftCols(j + 1) * h;
      const VectorXd h2 = V.leftCols(j + 1).transpose() * w;
      w.noalias() -= V.leftCols(j + 1) * h2;
      h += h2;
      for (Eigen::Index i = 0; i <= j; ++i) H(i, j) = H(j, i) = h[i];
      beta = w.norm();
      if (beta <= 1e-13 * norm_a) {
        filled = j + 1;
        exhausted = true;
        break;
      }
      V.col(j + 1) = w / beta;
      if (j + 1 < m) H(j + 1, j) = H(j, j + 1) = beta;
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H.topLeftCorner(filled, filled));
    const VectorXd& theta = es.eigenvalues();
    const MatrixXd& S = es.eigenvectors();
    const Eigen::Index t = side == SpectrumSide::min ? 0 : filled - 1;
    const double ritz_residual = exhausted ? 0.0 : std::abs(beta * S(filled - 1, t));
    best_residual = std::min(best_residual, ritz_residual);

    if (ritz_residual <= opt.tol * norm_a || exhausted || filled < m) {
      VectorXd x = V.leftCols(filled) * S.col(t);
      x.normalize();
      Eigen::Index pivot = 0;
      x.cwiseAbs().maxCoeff(&pivot);
      if (x[0] != 0.0) pivot = 0;
      if (x[pivot] < 0.0) x = -x;
      out.value = theta[t];
      out.residual = (op.apply(x) - out.value * x).norm();
      out.vector = std::move(x);
      out.restarts = restart;
      return out;
    }

    // thick restart: keep the `keep` Ritz pairs at the wanted end
    const Eigen::Index first = side == SpectrumSide::min ? 0 : filled - keep;
    const MatrixXd Y = V.leftCols(filled) * S.middleCols(first, keep);
    const VectorXd next = V.col(filled);
    V.leftCols(keep) = Y;
    V.col(keep) = next;
    H.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) {
      H(i, i) = theta[first + i];
      H(i, keep) = H(keep, i) = beta * S(filled - 1, first + i);
    }
    k = keep;
  }
  throw error(errc::no_convergence, "Lanczos did not converge", best_residual);
}

}  // namespace detail

/// Extreme eigenpair of the truncated operator by thick-restart Lanczos with
/// full reorthogonalization. The eigenvector sign is fixed so that the corner
/// component (or else the largest one) is positive.
inline EigenPair extremal_eigenpair(const TruncatedOperator& op, SpectrumSide side,
                                    const LanczosOptions& opt = {}) {
  EigenPair pair = detail::thick_restart_lanczos(op, side, opt, opt.seed);
  const double scale = std::max(op.norm_bound(), 1e-300);
  if (opt.verify) {
    const EigenPair again =
        detail::thick_restart_lanczos(op, side, opt, opt.seed * 6364136223846793005ULL + 1442695040888963407ULL);
    if (std::abs(again.value - pair.value) > 10.0 * opt.tol * scale)
      throw error(errc::no_convergence, "second start vector disagrees",
                  std::abs(again.value - pair.value));
    pair.verified = true;
  }
  if (op.N <= opt.dense_limit) {
    const auto all = dense_spectrum(op);
    const double ref = side == SpectrumSide::min ? all.front() : all.back();
    if (std::abs(ref - pair.value) > 1e3 * opt.tol * scale)
      throw error(errc::no_convergence, "Lanczos disagrees with dense solve",
                  std::abs(ref - pair.value));
  }
  return pair;
}

inline WaveGrid to_grid(const Eigen::VectorXd& v, std::size_t N) {
  return WaveGrid(N, N, std::vector<double>(v.data(), v.data() + v.size()));
}

/// Half-line operator (A f)(n) = -lambda (f(n+1) + f(n-1)), (A f)(0) =
/// -lambda f(1), truncated to N sites.
struct BandCheck {
  std::size_t N = 0;
  double lambda = 1.0;
  std::vector<double> closed_form;  // -2 lambda cos(k pi/(N+1)), ascending
  std::vector<double> dense;        // tridiagonal eigensolve
  double max_deviation = 0.0;
  bool inside_band = true;          // all in (-2 lambda, 2 lambda)
  double edge_gap = 0.0;            // 2 lambda - max eigenvalue
};

inline BandCheck one_d_band_check(double lambda, std::size_t N) {
  if (N < 2) throw error(errc::invalid_grid, "truncation must be >= 2");
  BandCheck r;
  r.N = N;
  r.lambda = lambda;
  r.closed_form.resize(N);
  for (std::size_t k = 1; k <= N; ++k)
    r.closed_form[k - 1] = -2.0 * lambda * std::cos(k * std::numbers::pi / static_cast<double>(N + 1));
  std::sort(r.closed_form.begin(), r.closed_form.end());

  const auto n = static_cast<Eigen::Index>(N);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -lambda);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  r.dense.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);

  for (std::size_t i = 0; i < N; ++i) {
    r.max_deviation = std::max(r.max_deviation, std::abs(r.closed_form[i] - r.dense[i]));
    if (!(std::abs(r.dense[i]) < 2.0 * lambda)) r.inside_band = false;
  }
  r.edge_gap = 2.0 * lambda - r.dense.back();
  return r;
}

/// Coordinate text export, one "row col value" line per stored entry.
inline void write_coordinate(std::ostream& os, const TruncatedOperator& op) {
  for (Eigen::Index r = 0; r < op.matrix.outerSize(); ++r)
    for (decltype(op.matrix)::InnerIterator it(op.matrix, r); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << detail::shortest(it.value()) << '\n';
}

}  // namespace qlattice
