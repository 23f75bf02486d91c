#pragma once

// Hamiltonian H = H0 + V on the quarter lattice Z+ x Z+ with a contact
// interaction at the corner site (0,0).
//
//   (Hf)_{m,n} = -lambda (f_{m+1,n} + f_{m-1,n} + f_{m,n+1} + f_{m,n-1})
//   (Hf)_{0,0} = -lambda (f_{1,0} + f_{0,1}) + mu f_{0,0}
//
// Terms with a negative index do not exist on the lattice; terms beyond a
// finite grid are treated as zero (Dirichlet cutoff at the far edge).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlattice/errors.hpp"

namespace qlattice {

/// Physical inputs. `alpha` is the dimensionless coupling mu / lambda.
class ModelParams {
 public:
  ModelParams(double lambda, double mu) : lambda_(lambda), mu_(mu) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw error(errc::invalid_params, "lambda must be finite and > 0, got " +
                                            std::to_string(lambda));
    if (!std::isfinite(mu))
      throw error(errc::invalid_params, "mu must be finite");
    alpha_ = mu / lambda;
  }

  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }
  double alpha() const noexcept { return alpha_; }

 private:
  double lambda_;
  double mu_;
  double alpha_;
};

/// Dimensionless energy nu = E / lambda. The essential band is [-4, 4].
struct RenormalizedEnergy {
  double nu = 0.0;

  static RenormalizedEnergy from_energy(double energy, double lambda) {
    return {energy / lambda};
  }
  double energy(double lambda) const noexcept { return nu * lambda; }

  bool in_band() const noexcept { return std::abs(nu) < 4.0; }
  bool at_threshold() const noexcept { return std::abs(nu) == 4.0; }
  bool discrete() const noexcept { return std::abs(nu) > 4.0; }
};

/// Real coefficient array f_{m,n}, m in [0, rows), n in [0, cols).
/// Storage is m-fastest: index = m + rows * n.
class WaveGrid {
 public:
  WaveGrid() = default;
  WaveGrid(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  WaveGrid(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_)
      throw error(errc::invalid_grid, "value count does not match dimensions");
  }

  static WaveGrid unit(std::size_t rows, std::size_t cols, std::size_t m,
                       std::size_t n) {
    WaveGrid g(rows, cols);
    g(m, n) = 1.0;
    return g;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t m, std::size_t n) {
    return values_[m + rows_ * n];
  }
  double operator()(std::size_t m, std::size_t n) const {
    return values_[m + rows_ * n];
  }
  /// Out-of-range indices read as zero.
  double at_or_zero(std::ptrdiff_t m, std::ptrdiff_t n) const {
    if (m < 0 || n < 0 || m >= static_cast<std::ptrdiff_t>(rows_) ||
        n >= static_cast<std::ptrdiff_t>(cols_))
      return 0.0;
    return (*this)(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  WaveGrid transposed() const {
    WaveGrid t(cols_, rows_);
    for (std::size_t n = 0; n < cols_; ++n)
      for (std::size_t m = 0; m < rows_; ++m) t(n, m) = (*this)(m, n);
    return t;
  }

  bool same_shape(const WaveGrid& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline double inner(const WaveGrid& f, const WaveGrid& g) {
  if (!f.same_shape(g))
    throw error(errc::invalid_grid, "inner product of mismatched grids");
  double s = 0.0;
  auto a = f.values();
  auto b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const WaveGrid& f) { return std::sqrt(inner(f, f)); }

inline WaveGrid apply_hamiltonian(const ModelParams& params,
                                  const WaveGrid& f) {
  if (f.rows() < 2 || f.cols() < 2)
    throw error(errc::invalid_grid, "grid must be at least 2x2");
  const auto rows = static_cast<std::ptrdiff_t>(f.rows());
  const auto cols = static_cast<std::ptrdiff_t>(f.cols());
  WaveGrid g(f.rows(), f.cols());
  for (std::ptrdiff_t n = 0; n < cols; ++n) {
    for (std::ptrdiff_t m = 0; m < rows; ++m) {
      const double s = f.at_or_zero(m + 1, n) + f.at_or_zero(m - 1, n) +
                       f.at_or_zero(m, n + 1) + f.at_or_zero(m, n - 1);
      g(static_cast<std::size_t>(m), static_cast<std::size_t>(n)) =
          -params.lambda() * s;
    }
  }
  g(0, 0) += params.mu() * f(0, 0);
  return g;
}

inline double rayleigh_quotient(const ModelParams& params, const WaveGrid& f) {
  const double ff = inner(f, f);
  if (ff == 0.0) throw error(errc::zero_vector, "Rayleigh quotient of zero");
  return inner(f, apply_hamiltonian(params, f)) / ff;
}

/// ||(H - E) f|| / ||f|| on the grid.
inline double relative_residual(const ModelParams& params, const WaveGrid& f,
                                double energy) {
  const WaveGrid hf = apply_hamiltonian(params, f);
  double r2 = 0.0;
  auto h = hf.values();
  auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = h[i] - energy * v[i];
    r2 += d * d;
  }
  const double nf = norm(f);
  if (nf == 0.0) throw error(errc::zero_vector, "residual of zero vector");
  return std::sqrt(r2) / nf;
}

/// max |f_{m,n} - f_{n,m}| / max |f|, for square grids.
inline double transpose_asymmetry(const WaveGrid& f) {
  if (f.rows() != f.cols())
    throw error(errc::invalid_grid, "transpose symmetry needs a square grid");
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t n = 0; n < f.cols(); ++n)
    for (std::size_t m = 0; m < f.rows(); ++m) {
      worst = std::max(worst, std::abs(f(m, n) - f(n, m)));
      scale = std::max(scale, std::abs(f(m, n)));
    }
  return scale == 0.0 ? 0.0 : worst / scale;
}

}  // namespace qlattice
