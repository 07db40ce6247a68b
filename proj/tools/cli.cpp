#include "cli.hpp"

#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "permqfi/error.hpp"
#include "permqfi/oracle_check.hpp"

namespace permqfi::cli {

namespace {

// Raw flag values; only flags that were given override the config file.
struct Flags {
  std::string config;
  std::string probe;
  std::string n;
  std::string excitations;
  std::string kappa;
  std::string gamma;
  std::string kappa_grid;
  std::string gamma_grid;
  double g = 1.0;
  double omega_q = 0.0;
  double omega_c = 0.0;
  double t_max = 0.0;
  std::size_t intervals = 0;
  bool per_time = false;
  bool no_refine = false;
  double refine_tol = 0.0;
  double delta = 0.0;
  double rtol = 0.0;
  double atol = 0.0;
  std::size_t workers = 0;
  std::string out;
  std::string cache_dir;
  std::uint64_t cache_limit_mb = 0;
};

void add_options(CLI::App& cmd, Flags& f, bool dicke) {
  cmd.add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  if (!dicke) cmd.add_option("--probe", f.probe, "probe state: dicke-<n>, x-polarized or ghz");
  cmd.add_option("--n", f.n, "qubit numbers, e.g. 4,8,12 or 4-8");
  if (dicke) cmd.add_option("--excitations,--n-values", f.excitations, "Dicke excitation numbers (default 1..N)");
  auto* k = cmd.add_option("--kappa", f.kappa, "kappa/g values, comma separated");
  auto* g = cmd.add_option("--gamma", f.gamma, "gamma/g values, comma separated");
  cmd.add_option("--kappa-grid", f.kappa_grid, "kappa/g grid a:b:count")->excludes(k);
  cmd.add_option("--gamma-grid", f.gamma_grid, "gamma/g grid a:b:count")->excludes(g);
  cmd.add_option("--g", f.g, "coupling g used to report physical F = (F g^2) / g^2");
  cmd.add_option("--omega-q", f.omega_q, "qubit frequency omega_q/g");
  cmd.add_option("--omega-c", f.omega_c, "resonator frequency omega_c/g");
  cmd.add_option("--t-max", f.t_max, "end of the gt grid");
  cmd.add_option("--intervals", f.intervals, "number of grid intervals");
  cmd.add_flag("--per-time", f.per_time, "maximise F/t instead of F");
  cmd.add_flag("--no-refine", f.no_refine, "skip the local peak refinement");
  cmd.add_option("--refine-tol", f.refine_tol, "peak refinement tolerance in gt");
  cmd.add_option("--delta", f.delta, "central-difference step in g/g");
  cmd.add_option("--rtol", f.rtol, "integrator relative tolerance");
  cmd.add_option("--atol", f.atol, "integrator absolute tolerance");
  cmd.add_option("--workers", f.workers, "worker threads (0 = one per hardware thread)");
  cmd.add_option("--out", f.out, "output directory");
  cmd.add_option("--cache-dir", f.cache_dir, "trajectory cache directory (off when empty)");
  cmd.add_option("--cache-limit-mb", f.cache_limit_mb, "largest trajectory pair kept in the cache");
}

bool given(const CLI::App& cmd, const std::string& name) {
  const CLI::Option* o = cmd.get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

void set_defaults(const std::string& command, RunConfig& cfg) {
  cfg.command = command;
  if (command == "oracle-check") {
    cfg.n = {2, 3, 4};
    cfg.kappa = {0.0, 0.2, 1.0};
    cfg.gamma = {0.0, 0.2, 1.0};
    cfg.t_max = 10.0;
    cfg.intervals = 49;
    const oracle::CheckOptions defaults;
    cfg.integrator = defaults.integrator;
  }
}

RunConfig resolve(const CLI::App& cmd, const Flags& f) {
  RunConfig cfg;
  set_defaults(cmd.get_name(), cfg);
  if (!f.config.empty()) {
    load_config(f.config, cfg);
    if (cfg.command != cmd.get_name()) {
      throw InvalidArgument("config file is for '" + cfg.command + "', not '" + cmd.get_name() + "'");
    }
  }
  if (given(cmd, "--probe")) cfg.probe = f.probe;
  if (given(cmd, "--n")) cfg.n = parse_ints(f.n);
  if (given(cmd, "--excitations")) cfg.excitations = parse_ints(f.excitations);
  if (given(cmd, "--kappa")) cfg.kappa = parse_values(f.kappa);
  if (given(cmd, "--gamma")) cfg.gamma = parse_values(f.gamma);
  if (given(cmd, "--kappa-grid")) cfg.kappa = parse_grid(f.kappa_grid);
  if (given(cmd, "--gamma-grid")) cfg.gamma = parse_grid(f.gamma_grid);
  if (given(cmd, "--g")) cfg.g = f.g;
  if (given(cmd, "--omega-q")) cfg.omega_q = f.omega_q;
  if (given(cmd, "--omega-c")) cfg.omega_c = f.omega_c;
  if (given(cmd, "--t-max")) cfg.t_max = f.t_max;
  if (given(cmd, "--intervals")) cfg.intervals = f.intervals;
  if (given(cmd, "--per-time")) cfg.per_time = f.per_time;
  if (given(cmd, "--no-refine")) cfg.refine = !f.no_refine;
  if (given(cmd, "--refine-tol")) cfg.refine_tolerance = f.refine_tol;
  if (given(cmd, "--delta")) cfg.qfi.delta = f.delta;
  if (given(cmd, "--rtol")) cfg.integrator.rtol = f.rtol;
  if (given(cmd, "--atol")) cfg.integrator.atol = f.atol;
  if (given(cmd, "--workers")) cfg.workers = f.workers;
  if (given(cmd, "--out")) cfg.out_dir = f.out;
  if (given(cmd, "--cache-dir")) cfg.cache_dir = f.cache_dir;
  if (given(cmd, "--cache-limit-mb")) cfg.cache_limit_mb = f.cache_limit_mb;
  if (cfg.command == "dicke-scan") cfg.probe = "dicke-1";  // per-entry probes; keeps validate() happy
  cfg.validate();
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-optimised quantum Fisher information of N qubits in a lossy resonator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("permqfi ") + version_string());

  Flags flags;
  CLI::App* time_scan = app.add_subcommand("time-scan", "QFI(gt) series per probe, N and rates");
  CLI::App* dicke_scan = app.add_subcommand("dicke-scan", "time-optimised QFI against Dicke excitation number");
  CLI::App* exponents = app.add_subcommand("exponent-map", "scaling exponent b over a (kappa/g, gamma/g) grid");
  CLI::App* oracle = app.add_subcommand("oracle-check", "compare against the full Hilbert space simulator (N <= 5)");
  add_options(*time_scan, flags, false);
  add_options(*dicke_scan, flags, true);
  add_options(*exponents, flags, false);
  add_options(*oracle, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    const RunConfig cfg = resolve(*cmd, flags);
    if (cmd == time_scan) return cmd_time_scan(cfg, out, err);
    if (cmd == dicke_scan) return cmd_dicke_scan(cfg, out, err);
    if (cmd == exponents) return cmd_exponent_map(cfg, out, err);
    return cmd_oracle_check(cfg, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace permqfi::cli
