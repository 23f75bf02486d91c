#pragma once

// WaveGrid serialization.
//
// Binary: u64 rows, u64 cols, then rows*cols f64 values in storage order
// (m fastest), all little-endian.
// CSV: header "m,n,value", one line per site, shortest round-trip decimals.

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "qlattice/errors.hpp"
#include "qlattice/model.hpp"

namespace qlattice {

namespace detail {

template <class T>
void write_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  std::array<char, 8> buf;
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  os.write(buf.data(), 8);
}

template <class T>
T read_le(std::istream& is) {
  static_assert(sizeof(T) == 8);
  std::array<unsigned char, 8> buf;
  if (!is.read(reinterpret_cast<char*>(buf.data()), 8))
    throw error(errc::io_error, "truncated grid stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t{buf[i]} << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

inline std::string shortest(double v) {
  std::array<char, 32> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

}  // namespace detail

inline void write_grid_binary(std::ostream& os, const WaveGrid& grid) {
  detail::write_le<std::uint64_t>(os, grid.rows());
  detail::write_le<std::uint64_t>(os, grid.cols());
  for (double v : grid.values()) detail::write_le<double>(os, v);
  if (!os) throw error(errc::io_error, "failed writing grid");
}

inline WaveGrid read_grid_binary(std::istream& is) {
  const auto rows = detail::read_le<std::uint64_t>(is);
  const auto cols = detail::read_le<std::uint64_t>(is);
  if (rows > (1u << 20) || cols > (1u << 20))
    throw error(errc::io_error, "implausible grid dimensions");
  WaveGrid grid(rows, cols);
  for (double& v : grid.values()) v = detail::read_le<double>(is);
  return grid;
}

inline void write_grid_csv(std::ostream& os, const WaveGrid& grid) {
  os << "m,n,value\n";
  for (std::size_t n = 0; n < grid.cols(); ++n)
    for (std::size_t m = 0; m < grid.rows(); ++m)
      os << m << ',' << n << ',' << detail::shortest(grid(m, n)) << '\n';
  if (!os) throw error(errc::io_error, "failed writing grid csv");
}

}  // namespace qlattice
