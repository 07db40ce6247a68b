#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "permqfi/fisher.hpp"
#include "permqfi/integrator.hpp"
#include "permqfi/metrology.hpp"

namespace permqfi::cli {

/// Fully resolved settings of one CLI run. Rates are in units of g.
struct RunConfig {
  std::string command;
  std::string probe = "dicke-1";
  std::vector<int> n;            // qubit numbers
  std::vector<int> excitations;  // dicke-scan; empty means 1..N
  std::vector<double> kappa;     // kappa/g
  std::vector<double> gamma;     // gamma/g
  double omega_q = 0.0;          // omega_q/g
  double omega_c = 0.0;          // omega_c/g
  double g = 1.0;                // only rescales the physical F column

  double t_max = 20.0;
  std::size_t intervals = 400;

  bool per_time = false;
  bool refine = true;
  double refine_tolerance = 1e-4;
  QfiConfig qfi;
  IntegratorConfig integrator;

  std::size_t workers = 1;
  std::filesystem::path out_dir = ".";
  std::filesystem::path cache_dir;  // empty disables the cache
  std::uint64_t cache_limit_mb = 1024;

  Objective objective() const { return per_time ? Objective::QfiPerTime : Objective::Qfi; }
  std::vector<double> times() const { return uniform_grid(t_max, intervals); }
  PipelineOptions pipeline() const;
  /// params for one cell; kappa and gamma are ratios to g
  SimParams params(int num_qubits, double kappa_ratio, double gamma_ratio) const;
  /// Range and consistency checks; throws InvalidArgument.
  void validate() const;
};

/// Reads a JSON config file into `cfg`, overwriting only the keys present.
/// Sections: probe, system, time_grid, peak, qfi, integrator, run. Unknown
/// keys are rejected.
void load_config(const std::filesystem::path& path, RunConfig& cfg);
void apply_config_json(const std::string& text, RunConfig& cfg);

/// Resolved config in the same layout load_config reads.
std::string config_to_json(const RunConfig& cfg);

/// "a:b:count" -> count evenly spaced values from a to b inclusive.
std::vector<double> parse_grid(const std::string& spec);
/// "x" or "x,y,z" -> values; a single "a:b:count" is expanded as a grid.
std::vector<double> parse_values(const std::string& spec);
std::vector<int> parse_ints(const std::string& spec);

/// Fixed two-decimal label used in file names, e.g. 0.2 -> "0.20".
std::string rate_label(double value);

}  // namespace permqfi::cli
