// qlattice: command-line front end for the corner-potential lattice solver.
//
//   qlattice classify --lambda 1 --mu 10
//   qlattice solve    --lambda 1 --mu -10 --oracle 80
//   qlattice eigvec   --lambda 1 --mu -10 --order 60 --trunc 80 --out state
//   qlattice oracle   --lambda 1 --mu -10 --trunc 80 --seed 7
//   qlattice sweep    --lambda 1 --mu-min -20 --mu-max -4 --points 50   (CSV)
//   qlattice selftest
//
// Exit codes: 0 ok, 1 other failure, 2 invalid parameters, 3 empty point
// spectrum, 4 ill-conditioned reconstruction.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlattice/acceptance.hpp"
#include "qlattice/curve.hpp"
#include "qlattice/eigenvector.hpp"
#include "qlattice/errors.hpp"
#include "qlattice/grid_io.hpp"
#include "qlattice/model.hpp"
#include "qlattice/oracle.hpp"
#include "qlattice/report.hpp"
#include "qlattice/solver.hpp"

namespace {

using namespace qlattice;
using json = nlohmann::ordered_json;

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_invalid = 2,
  exit_empty_spectrum = 3,
  exit_ill_conditioned = 4,
};

struct RunConfig {
  std::string command;
  double lambda = 1.0;
  double mu = 0.0;
  double tol = 1e-10;
  std::size_t order = 0;  // 0: chosen from the decay rate
  std::size_t trunc = 80;
  std::size_t oracle = 0;  // 0: no oracle comparison
  std::string format = "json";
  bool format_given = false;
  std::string out;
  std::uint64_t seed = 1;
  bool timing = false;
  // sweep
  double mu_min = -20.0;
  double mu_max = -4.0;
  std::size_t points = 50;
  // oracle
  std::string matrix_out;
  // branch
  double nu = -2.0;
  std::size_t samples = 256;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw error(errc::invalid_params, "--lambda must be a finite number > 0");
    if (!std::isfinite(mu)) throw error(errc::invalid_params, "--mu must be finite");
    if (!(tol > 0.0)) throw error(errc::invalid_params, "--tol must be > 0");
    if (trunc < 2) throw error(errc::invalid_params, "--trunc must be >= 2");
    if (oracle == 1) throw error(errc::invalid_params, "--oracle must be >= 2");
  }

  QuadratureSpec quadrature() const {
    QuadratureSpec s;
    s.tolerance = tol;
    return s;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Writes `text` to --out if given, otherwise to stdout.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(cfg.out, std::ios::binary);
  if (!os) throw error(errc::io_error, "cannot open " + cfg.out);
  os << text;
}

std::string report_csv(const SpectrumReport& r) {
  json j = r;
  std::ostringstream os;
  os << "key,value\n";
  auto row = [&](const std::string& k, const json& v) {
    os << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  };
  for (const auto& [k, v] : j.items()) {
    if (v.is_object())
      for (const auto& [k2, v2] : v.items()) row(k + "." + k2, v2);
    else
      row(k, v);
  }
  return os.str();
}

std::string render(const RunConfig& cfg, const SpectrumReport& r) {
  return cfg.format == "csv" ? report_csv(r) : dump(r);
}

EigenPair run_oracle(const ModelParams& p, std::size_t N, std::uint64_t seed, SpectrumSide side) {
  LanczosOptions opt;
  opt.seed = seed;
  return extremal_eigenpair(assemble(p, N), side, opt);
}

int cmd_classify(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SpectrumReport r = make_report("classify", ModelParams(cfg.lambda, cfg.mu), cfg.tol, cfg.seed);
  if (cfg.timing) r.seconds = seconds_since(t0);
  emit(cfg, render(cfg, r));
  return exit_ok;
}

int cmd_solve(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams params(cfg.lambda, cfg.mu);
  SpectrumReport r = make_report("solve", params, cfg.tol, cfg.seed);
  if (r.regime == Regime::empty_point_spectrum) {
    emit(cfg, render(cfg, r));
    std::cerr << "qlattice: regime " << to_string(r.regime) << ": no eigenvalue to solve for\n";
    return exit_empty_spectrum;
  }
  const EigenvalueSolution sol = solve_eigenvalue(params, cfg.quadrature(), cfg.tol);
  r.nu = sol.nu.nu;
  r.energy = sol.energy;
  r.integral_residual = sol.residual;
  if (cfg.oracle) {
    const auto side = params.mu() > 0.0 ? SpectrumSide::max : SpectrumSide::min;
    const EigenPair ep = run_oracle(params, cfg.oracle, cfg.seed, side);
    r.oracle = OracleComparison{cfg.oracle, ep.value, std::abs(sol.energy - ep.value), ep.residual};
  }
  if (cfg.timing) r.seconds = seconds_since(t0);
  emit(cfg, render(cfg, r));
  return exit_ok;
}

int cmd_eigvec(const RunConfig& cfg) {
  const ModelParams params(cfg.lambda, cfg.mu);
  if (classify(params).regime == Regime::empty_point_spectrum) {
    std::cerr << "qlattice: regime " << to_string(Regime::empty_point_spectrum)
              << ": no bound state\n";
    return exit_empty_spectrum;
  }
  BoundStateOptions opt;
  opt.order = cfg.order;
  opt.truncation = cfg.trunc;
  opt.integral = cfg.quadrature();
  opt.root_tol = cfg.tol;
  const BoundState st = build_bound_state(params, opt);
  const std::string base = cfg.out.empty() ? "boundstate" : cfg.out;
  write_bound_state(st, base, cfg.format == "csv");
  std::cout << bound_state_json(st, base + ".bin").dump(2) << '\n';
  return exit_ok;
}

json pair_json(const EigenPair& ep) {
  return json{{"eigenvalue", ep.value},
              {"residual", ep.residual},
              {"matvecs", ep.matvecs},
              {"restarts", ep.restarts}};
}

int cmd_oracle(const RunConfig& cfg) {
  const ModelParams params(cfg.lambda, cfg.mu);
  const TruncatedOperator op = assemble(params, cfg.trunc);
  if (!cfg.matrix_out.empty()) {
    std::ofstream os(cfg.matrix_out, std::ios::binary);
    if (!os) throw error(errc::io_error, "cannot open " + cfg.matrix_out);
    write_coordinate(os, op);
  }
  LanczosOptions lo;
  lo.seed = cfg.seed;
  const EigenPair lo_pair = extremal_eigenpair(op, SpectrumSide::min, lo);
  const EigenPair hi_pair = extremal_eigenpair(op, SpectrumSide::max, lo);

  json j;
  j["tool"] = tool_name;
  j["version"] = tool_version;
  j["threshold_constant"] = threshold_constant();
  j["lambda"] = cfg.lambda;
  j["mu"] = cfg.mu;
  j["truncation"] = cfg.trunc;
  j["seed"] = cfg.seed;
  j["min"] = pair_json(lo_pair);
  j["max"] = pair_json(hi_pair);

  if (!cfg.out.empty()) {
    // Eigenpair export in the bound-state layout: the extreme pair on the
    // side of mu, as a unit-norm grid.
    const EigenPair& ep = cfg.mu > 0.0 ? hi_pair : lo_pair;
    const WaveGrid grid = to_grid(ep.vector, cfg.trunc);
    json h;
    h["tool"] = tool_name;
    h["version"] = tool_version;
    h["threshold_constant"] = threshold_constant();
    h["lambda"] = cfg.lambda;
    h["mu"] = cfg.mu;
    h["energy"] = ep.value;
    h["nu"] = ep.value / cfg.lambda;
    h["truncation"] = cfg.trunc;
    h["residual_norm"] = ep.residual;
    h["symmetry_deviation"] = transpose_asymmetry(grid);
    h["seed"] = cfg.seed;
    const std::string bin = cfg.out + ".bin";
    h["grid_file"] = bin.substr(bin.find_last_of('/') == std::string::npos ? 0 : bin.find_last_of('/') + 1);
    {
      std::ofstream os(cfg.out + ".json", std::ios::binary);
      if (!os) throw error(errc::io_error, "cannot open " + cfg.out + ".json");
      os << h.dump(2) << '\n';
    }
    {
      std::ofstream os(bin, std::ios::binary);
      if (!os) throw error(errc::io_error, "cannot open " + bin);
      write_grid_binary(os, grid);
    }
    if (cfg.format == "csv") {
      std::ofstream os(cfg.out + ".csv", std::ios::binary);
      write_grid_csv(os, grid);
    }
  }
  std::cout << j.dump(2) << '\n';
  return exit_ok;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.points < 1) throw error(errc::invalid_params, "--points must be >= 1");
  if (!(cfg.mu_min <= cfg.mu_max)) throw error(errc::invalid_params, "--mu-min must be <= --mu-max");
  std::ostringstream csv;
  json rows = json::array();
  csv << "mu,ratio,regime,energy,oracle_energy\n";
  std::size_t warnings = 0;
  for (std::size_t i = 0; i < cfg.points; ++i) {
    const double mu = cfg.points == 1 ? cfg.mu_min
                                      : cfg.mu_min + (cfg.mu_max - cfg.mu_min) * static_cast<double>(i) /
                                                         static_cast<double>(cfg.points - 1);
    std::string ratio, regime, energy, oracle_energy, note;
    json row{{"mu", mu}};
    try {
      const ModelParams params(cfg.lambda, mu);
      const RegimeClassification cls = classify(params);
      regime = to_string(cls.regime);
      row["regime"] = regime;
      if (std::isfinite(cls.threshold_ratio)) {
        ratio = detail::shortest(cls.threshold_ratio);
        row["ratio"] = cls.threshold_ratio;
      } else {
        row["ratio"] = nullptr;
      }
      if (cls.regime != Regime::empty_point_spectrum) {
        const auto sol = solve_eigenvalue(params, cfg.quadrature(), cfg.tol);
        energy = detail::shortest(sol.energy);
        row["energy"] = sol.energy;
        if (cfg.oracle) {
          const auto side = mu > 0.0 ? SpectrumSide::max : SpectrumSide::min;
          const double th = run_oracle(params, cfg.oracle, cfg.seed, side).value;
          oracle_energy = detail::shortest(th);
          row["oracle_energy"] = th;
        }
      }
    } catch (const error& e) {
      ++warnings;
      row["error"] = to_string(e.code());
      std::cerr << "qlattice: warning: mu = " << mu << ": " << to_string(e.code()) << ": "
                << e.what() << '\n';
    }
    csv << detail::shortest(mu) << ',' << ratio << ',' << regime << ',' << energy << ','
        << oracle_energy << '\n';
    rows.push_back(std::move(row));
  }
  // sweep is a table: CSV unless JSON was asked for explicitly
  if (cfg.format_given && cfg.format == "json") {
    json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["threshold_constant"] = threshold_constant();
    j["lambda"] = cfg.lambda;
    j["rows"] = std::move(rows);
    j["warnings"] = warnings;
    emit(cfg, j.dump(2) + "\n");
  } else {
    emit(cfg, csv.str());
  }
  if (warnings) std::cerr << "qlattice: " << warnings << " row(s) failed\n";
  return exit_ok;
}

int cmd_selftest(const RunConfig&) {
  bool all = true;
  for (const auto& r : acceptance::run_acceptance()) {
    std::cout << acceptance::format_line(r) << std::endl;
    all = all && r.passed;
  }
  return all ? exit_ok : exit_failure;
}

int cmd_branch(const RunConfig& cfg) {
  if (cfg.samples < 2) throw error(errc::invalid_params, "--samples must be >= 2");
  std::vector<double> phis(cfg.samples);
  for (std::size_t k = 0; k < cfg.samples; ++k)
    phis[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(cfg.samples - 1);
  const auto x1 = curve::track_x1_on_circle(cfg.nu, phis);
  std::ostringstream os;
  os << "phi,re,im\n";
  for (std::size_t k = 0; k < phis.size(); ++k)
    os << detail::shortest(phis[k]) << ',' << detail::shortest(x1[k].real()) << ','
       << detail::shortest(x1[k].imag()) << '\n';
  emit(cfg, os.str());
  return exit_ok;
}

int exit_code_for(errc code) {
  switch (code) {
    case errc::invalid_params:
    case errc::invalid_grid: return exit_invalid;
    case errc::no_discrete_eigenvalue: return exit_empty_spectrum;
    case errc::ill_conditioned: return exit_ill_conditioned;
    default: return exit_failure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Corner-potential bound states of the quarter-plane lattice"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--lambda", cfg.lambda, "hopping amplitude (> 0)")->capture_default_str();
  app.add_option("--mu", cfg.mu, "corner potential")->capture_default_str();
  app.add_option("--tol", cfg.tol, "quadrature and root tolerance")->capture_default_str();
  app.add_option("--order", cfg.order, "series order K (0 = from the decay rate)");
  app.add_option("--trunc", cfg.trunc, "truncation size N")->capture_default_str();
  app.add_option("--oracle", cfg.oracle, "compare against the truncated operator at this N");
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", cfg.out, "output path (or base name for grid exports)");
  app.add_option("--seed", cfg.seed, "seed for Lanczos start vectors")->capture_default_str();
  app.add_flag("--timing", cfg.timing, "add wall time to reports (breaks byte-identical output)");

  app.add_subcommand("classify", "regime of (lambda, mu)");
  app.add_subcommand("solve", "discrete eigenvalue");
  app.add_subcommand("eigvec", "bound-state wavefunction (JSON + grid)");
  auto* oracle = app.add_subcommand("oracle", "extreme eigenpairs of the truncated operator");
  oracle->add_option("--matrix", cfg.matrix_out, "write the matrix in coordinate text format");
  auto* sweep = app.add_subcommand("sweep", "scan mu at fixed lambda");
  sweep->add_option("--mu-min", cfg.mu_min)->capture_default_str();
  sweep->add_option("--mu-max", cfg.mu_max)->capture_default_str();
  sweep->add_option("--points", cfg.points)->capture_default_str();
  app.add_subcommand("selftest", "run the acceptance suite");
  auto* branch = app.add_subcommand("branch", "dump the tracked in-band branch x1(e^{i phi})");
  branch->add_option("--nu", cfg.nu, "renormalized energy, 0 < |nu| <= 4")->capture_default_str();
  branch->add_option("--samples", cfg.samples)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_invalid;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format_given = app.get_option("--format")->count() > 0;

  try {
    cfg.validate();
    if (cfg.command == "classify") return cmd_classify(cfg);
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "eigvec") return cmd_eigvec(cfg);
    if (cfg.command == "oracle") return cmd_oracle(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg);
    if (cfg.command == "selftest") return cmd_selftest(cfg);
    if (cfg.command == "branch") return cmd_branch(cfg);
  } catch (const error& e) {
    std::cerr << "qlattice: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "qlattice: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_failure;
}
