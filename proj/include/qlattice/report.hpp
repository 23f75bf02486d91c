#pragma once

// Machine-readable reports. Every report carries the tool name, version and
// the threshold constant; doubles are written as shortest round-trip decimals.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include "qlattice/eigenvector.hpp"
#include "qlattice/errors.hpp"
#include "qlattice/grid_io.hpp"
#include "qlattice/solver.hpp"

namespace qlattice {

inline constexpr const char* tool_name = "qlattice";
inline constexpr const char* tool_version = "0.1.0";

inline Regime regime_from_string(const std::string& s) {
  for (Regime r : {Regime::unique_discrete_eigenvalue, Regime::empty_point_spectrum,
                   Regime::threshold_eigenvalue})
    if (s == to_string(r)) return r;
  throw error(errc::io_error, "unknown regime '" + s + "'");
}

struct OracleComparison {
  std::size_t truncation = 0;
  double eigenvalue = 0.0;
  double gap = 0.0;       // |E - eigenvalue|
  double residual = 0.0;  // Lanczos residual norm

  friend bool operator==(const OracleComparison&, const OracleComparison&) = default;
};

struct SpectrumReport {
  std::string tool = tool_name;
  std::string version = tool_version;
  std::string command;
  double lambda = 1.0;
  double mu = 0.0;
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
  Regime regime = Regime::empty_point_spectrum;
  int eigenvalue_sign = 0;
  std::optional<double> ratio;  // |lambda/mu|, absent for mu = 0
  double threshold_constant = qlattice::threshold_constant();
  std::optional<double> nu;
  std::optional<double> energy;
  std::optional<double> integral_residual;
  std::optional<OracleComparison> oracle;
  std::optional<double> seconds;  // only when timing was requested

  friend bool operator==(const SpectrumReport&, const SpectrumReport&) = default;
};

inline void to_json(nlohmann::ordered_json& j, const OracleComparison& o) {
  j = nlohmann::ordered_json{{"truncation", o.truncation},
                             {"eigenvalue", o.eigenvalue},
                             {"gap", o.gap},
                             {"residual", o.residual}};
}

inline void from_json(const nlohmann::ordered_json& j, OracleComparison& o) {
  j.at("truncation").get_to(o.truncation);
  j.at("eigenvalue").get_to(o.eigenvalue);
  j.at("gap").get_to(o.gap);
  j.at("residual").get_to(o.residual);
}

namespace detail {

template <class T>
void put_optional(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
  else j[key] = nullptr;
}

template <class T>
void get_optional(const nlohmann::ordered_json& j, const char* key, std::optional<T>& v) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) v.reset();
  else v = it->template get<T>();
}

}  // namespace detail

inline void to_json(nlohmann::ordered_json& j, const SpectrumReport& r) {
  j = nlohmann::ordered_json::object();
  j["tool"] = r.tool;
  j["version"] = r.version;
  j["command"] = r.command;
  j["inputs"] = {{"lambda", r.lambda}, {"mu", r.mu}, {"tolerance", r.tolerance}, {"seed", r.seed}};
  j["regime"] = to_string(r.regime);
  j["eigenvalue_sign"] = r.eigenvalue_sign;
  detail::put_optional(j, "ratio", r.ratio);
  j["threshold_constant"] = r.threshold_constant;
  detail::put_optional(j, "nu", r.nu);
  detail::put_optional(j, "energy", r.energy);
  detail::put_optional(j, "integral_residual", r.integral_residual);
  detail::put_optional(j, "oracle", r.oracle);
  if (r.seconds) j["seconds"] = *r.seconds;
}

inline void from_json(const nlohmann::ordered_json& j, SpectrumReport& r) {
  j.at("tool").get_to(r.tool);
  j.at("version").get_to(r.version);
  j.at("command").get_to(r.command);
  const auto& in = j.at("inputs");
  in.at("lambda").get_to(r.lambda);
  in.at("mu").get_to(r.mu);
  in.at("tolerance").get_to(r.tolerance);
  in.at("seed").get_to(r.seed);
  r.regime = regime_from_string(j.at("regime").get<std::string>());
  j.at("eigenvalue_sign").get_to(r.eigenvalue_sign);
  detail::get_optional(j, "ratio", r.ratio);
  j.at("threshold_constant").get_to(r.threshold_constant);
  detail::get_optional(j, "nu", r.nu);
  detail::get_optional(j, "energy", r.energy);
  detail::get_optional(j, "integral_residual", r.integral_residual);
  detail::get_optional(j, "oracle", r.oracle);
  detail::get_optional(j, "seconds", r.seconds);
}

/// Inputs echo plus the regime; the eigenvalue fields stay empty.
inline SpectrumReport make_report(const std::string& command, const ModelParams& params,
                                  double tolerance, std::uint64_t seed) {
  SpectrumReport r;
  r.command = command;
  r.lambda = params.lambda();
  r.mu = params.mu();
  r.tolerance = tolerance;
  r.seed = seed;
  const RegimeClassification cls = classify(params);
  r.regime = cls.regime;
  r.eigenvalue_sign = cls.eigenvalue_sign;
  if (std::isfinite(cls.threshold_ratio)) r.ratio = cls.threshold_ratio;
  return r;
}

inline std::string dump(const SpectrumReport& r) {
  nlohmann::ordered_json j = r;
  return j.dump(2) + "\n";
}

inline SpectrumReport parse_report(const std::string& text) {
  return nlohmann::ordered_json::parse(text).get<SpectrumReport>();
}

/// Header for an exported bound state; the grid itself goes to a sibling
/// binary (and optionally CSV) file.
inline nlohmann::ordered_json bound_state_json(const BoundState& st,
                                               const std::string& grid_file = {}) {
  nlohmann::ordered_json j;
  j["tool"] = tool_name;
  j["version"] = tool_version;
  j["threshold_constant"] = threshold_constant();
  j["lambda"] = st.params.lambda();
  j["mu"] = st.params.mu();
  j["energy"] = st.energy;
  j["nu"] = st.nu.nu;
  j["threshold"] = st.threshold;
  j["f00"] = st.f00;
  j["order"] = st.order;
  j["truncation"] = st.truncation;
  j["residual_norm"] = st.residual_norm;
  j["symmetry_deviation"] = st.symmetry_deviation;
  j["moment_lock"] = st.moment_lock;
  j["integral_residual"] = st.integral_residual;
  j["boundary_row"] = st.boundary_row;
  j["boundary_col"] = st.boundary_col;
  if (!grid_file.empty()) j["grid_file"] = grid_file;
  return j;
}

/// Writes <base>.json and <base>.bin, plus <base>.csv when `csv` is set.
inline void write_bound_state(const BoundState& st, const std::string& base, bool csv) {
  const std::string bin = base + ".bin";
  const auto slash = bin.find_last_of('/');
  const std::string bin_name = slash == std::string::npos ? bin : bin.substr(slash + 1);
  {
    std::ofstream os(base + ".json", std::ios::binary);
    if (!os) throw error(errc::io_error, "cannot open " + base + ".json");
    os << bound_state_json(st, bin_name).dump(2) << '\n';
  }
  {
    std::ofstream os(bin, std::ios::binary);
    if (!os) throw error(errc::io_error, "cannot open " + bin);
    write_grid_binary(os, st.grid);
  }
  if (csv) {
    std::ofstream os(base + ".csv", std::ios::binary);
    if (!os) throw error(errc::io_error, "cannot open " + base + ".csv");
    write_grid_csv(os, st.grid);
  }
}

}  // namespace qlattice
