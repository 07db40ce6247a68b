#include "commands.hpp"

#include <chrono>
#include <memory>
#include <mutex>

#include <json.hpp>

#include "pair_cache.hpp"
#include "permqfi/atomic_file.hpp"
#include "permqfi/error.hpp"
#include "permqfi/oracle.hpp"
#include "permqfi/oracle_check.hpp"
#include "permqfi/parallel.hpp"

namespace permqfi::cli {

namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

// Cache, progress and output directory shared by all commands.
class Session {
 public:
  Session(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log), start_(Clock::now()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string());
    if (!cfg.cache_dir.empty()) {
      cache_ = std::make_unique<PairCache>(cfg.cache_dir, cfg.cache_limit_mb * 1024 * 1024);
    }
  }

  PipelineOptions pipeline() {
    PipelineOptions o = cfg_.pipeline();
    o.store = cache_.get();
    o.progress = [this](const std::string& msg) { progress(msg); };
    return o;
  }

  void progress(const std::string& msg) {
    std::lock_guard lock(mutex_);
    log_ << "[" << cfg_.command << "] " << msg << '\n' << std::flush;
  }

  void write(const std::string& name, const std::string& content) {
    write_file_atomic(cfg_.out_dir / name, content);
    written_.push_back(name);
  }

  ojson manifest_head() const {
    ojson m;
    m["command"] = cfg_.command;
    m["version"] = version_string();
    m["config"] = ojson::parse(config_to_json(cfg_));
    return m;
  }

  void finish(ojson manifest, const std::string& name) {
    manifest["outputs"] = written_;
    const double seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    manifest["timing"] = {{"wall_seconds", seconds}};
    if (cache_) {
      manifest["cache"] = {{"dir", cfg_.cache_dir.string()},
                           {"hits", cache_->hits()},
                           {"misses", cache_->misses()},
                           {"stored", cache_->stores()}};
    }
    write_file_atomic(cfg_.out_dir / name, manifest.dump(2) + "\n");
  }

 private:
  const RunConfig& cfg_;
  std::ostream& log_;
  Clock::time_point start_;
  std::unique_ptr<PairCache> cache_;
  std::mutex mutex_;
  std::vector<std::string> written_;
};

ojson peak_json(const PeakResult& p) {
  return {{"objective", objective_name(p.objective)},
          {"peak_gt", p.peak_time},
          {"peak_value", p.peak_value},
          {"coarse_index", p.coarse_index},
          {"refined", p.refined},
          {"at_boundary", p.at_boundary}};
}

std::string cell_suffix(double kappa, double gamma) { return "_k" + rate_label(kappa) + "_g" + rate_label(gamma); }

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

// Physical F = F g^2 / g^2 and physical rates, for the --g option.
void rescale_series(QfiSeries& s, double g) {
  s.params.g = g;
  s.params.kappa *= g;
  s.params.gamma *= g;
  s.params.omega_q *= g;
  s.params.omega_c *= g;
  s.finalize();
}

}  // namespace

int cmd_time_scan(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  require(!cfg.n.empty(), "time-scan needs at least one qubit number (--n)");
  require(!cfg.kappa.empty() && !cfg.gamma.empty(), "time-scan needs --kappa and --gamma");
  const ProbeSpec probe = ProbeSpec::parse(cfg.probe);
  for (int n : cfg.n) require(probe.valid_for(n), "probe " + probe.name() + " is not defined for N=" + std::to_string(n));

  Session session(cfg, log);
  const PipelineOptions options = session.pipeline();

  struct Cell {
    double kappa;
    double gamma;
    int n;
    std::optional<PeakAnalysis> result;
    std::string error;
  };
  std::vector<Cell> cells;
  for (double k : cfg.kappa) {
    for (double g : cfg.gamma) {
      for (int n : cfg.n) cells.push_back({k, g, n, std::nullopt, ""});
    }
  }

  const auto errors = run_jobs(cells.size(), cfg.workers, [&](std::size_t i) {
    Cell& c = cells[i];
    c.result = analyze_probe(probe, cfg.params(c.n, c.kappa, c.gamma), options);
    rescale_series(c.result->series, cfg.g);
    session.progress(probe.name() + cell_suffix(c.kappa, c.gamma) + " N=" + std::to_string(c.n) + " done");
  });

  const Objective obj = cfg.objective();
  ojson manifest = session.manifest_head();
  ojson rows = ojson::array();
  bool failed = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Cell& c = cells[i];
    ojson row = {{"kappa", c.kappa}, {"gamma", c.gamma}, {"N", c.n}};
    if (errors[i]) {
      failed = true;
      c.error = describe(errors[i]);
      row["error"] = c.error;
      out << "N=" << c.n << cell_suffix(c.kappa, c.gamma) << " FAILED: " << c.error << '\n';
    } else {
      const std::string name =
          "time_" + probe.name() + cell_suffix(c.kappa, c.gamma) + "_N" + std::to_string(c.n) + ".csv";
      session.write(name, c.result->series.to_csv());
      row["file"] = name;
      row["peaks"] = {peak_json(c.result->peak(Objective::Qfi)), peak_json(c.result->peak(Objective::QfiPerTime))};
    }
    rows.push_back(row);
  }

  // peak value against N for each rate pair
  const std::string prefix = obj == Objective::QfiPerTime ? "tscaling_" : "scaling_";
  for (double k : cfg.kappa) {
    for (double g : cfg.gamma) {
      std::string csv = "N,peak_gt,peak_value,refined,at_boundary\n";
      for (const Cell& c : cells) {
        if (c.kappa != k || c.gamma != g || !c.result) continue;
        const PeakResult& p = c.result->peak(obj);
        csv += std::to_string(c.n) + "," + format_double(p.peak_time) + "," + format_double(p.peak_value) + "," +
               (p.refined ? "1" : "0") + "," + (p.at_boundary ? "1" : "0") + "\n";
        out << probe.name() << cell_suffix(k, g) << " N=" << c.n << " peak " << objective_name(obj) << " g^2 = "
            << format_double(p.peak_value) << " at gt = " << format_double(p.peak_time)
            << (p.at_boundary ? " (grid boundary)" : "") << '\n';
      }
      session.write(prefix + probe.name() + cell_suffix(k, g) + ".csv", csv);
    }
  }
  manifest["cells"] = rows;
  session.finish(manifest, "manifest_time-scan_" + probe.name() + ".json");
  return failed ? kExitNumerical : kExitOk;
}

int cmd_dicke_scan(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  require(cfg.n.size() == 1, "dicke-scan needs exactly one qubit number (--n)");
  require(!cfg.kappa.empty() && !cfg.gamma.empty(), "dicke-scan needs --kappa and --gamma");
  const int n = cfg.n.front();
  std::vector<int> excitations = cfg.excitations;
  if (excitations.empty()) {
    for (int e = 1; e <= n; ++e) excitations.push_back(e);
  }
  for (int e : excitations) require(e >= 0 && e <= n, "Dicke excitation " + std::to_string(e) + " outside [0, N]");

  Session session(cfg, log);
  const PipelineOptions options = session.pipeline();
  const Objective obj = cfg.objective();
  const std::string prefix = obj == Objective::QfiPerTime ? "tdicke-g_" : "dicke-g_";

  ojson manifest = session.manifest_head();
  ojson scans = ojson::array();
  bool failed = false;
  for (double gamma : cfg.gamma) {
    std::vector<DickeScan> per_kappa;
    for (double kappa : cfg.kappa) {
      session.progress("N=" + std::to_string(n) + cell_suffix(kappa, gamma));
      per_kappa.push_back(dicke_excitation_scan(cfg.params(n, kappa, gamma), excitations, options));
    }

    std::string table = "n";
    for (double kappa : cfg.kappa) table += "," + format_double(kappa);
    table += '\n';
    for (std::size_t e = 0; e < excitations.size(); ++e) {
      table += std::to_string(excitations[e]);
      for (const DickeScan& s : per_kappa) {
        const DickeScanEntry& entry = s.entries[e];
        table += ",";
        table += entry.error.empty() ? format_double(entry.peaks[static_cast<std::size_t>(obj)].peak_value)
                                     : std::string("nan");
      }
      table += '\n';
    }

    std::string best = "kappa,n_best,peak_gt,peak_value,at_boundary\n";
    for (std::size_t ki = 0; ki < cfg.kappa.size(); ++ki) {
      const DickeScan& s = per_kappa[ki];
      ojson entries = ojson::array();
      for (const DickeScanEntry& entry : s.entries) {
        ojson row = {{"n", entry.excitations}};
        if (!entry.error.empty()) {
          failed = true;
          row["error"] = entry.error;
        } else {
          row["peaks"] = {peak_json(entry.peaks[0]), peak_json(entry.peaks[1])};
        }
        entries.push_back(row);
      }
      const auto arg = s.best(obj);
      ojson scan = {{"kappa", cfg.kappa[ki]}, {"gamma", gamma}, {"N", n}, {"entries", entries}};
      if (arg) {
        const auto it = std::find(excitations.begin(), excitations.end(), *arg);
        const PeakResult& p = s.entries[static_cast<std::size_t>(it - excitations.begin())].peaks[static_cast<std::size_t>(obj)];
        best += format_double(cfg.kappa[ki]) + "," + std::to_string(*arg) + "," + format_double(p.peak_time) + "," +
                format_double(p.peak_value) + "," + (p.at_boundary ? "1" : "0") + "\n";
        scan["n_best"] = *arg;
        out << "N=" << n << cell_suffix(cfg.kappa[ki], gamma) << " best Dicke-" << *arg << " ("
            << objective_name(obj) << " g^2 = " << format_double(p.peak_value) << ")\n";
      } else {
        best += format_double(cfg.kappa[ki]) + ",nan,nan,nan,0\n";
      }
      scans.push_back(scan);
    }
    session.write(prefix + rate_label(gamma) + ".csv", table);
    session.write(prefix + rate_label(gamma) + "_best.csv", best);
  }
  manifest["scans"] = scans;
  session.finish(manifest, "manifest_dicke-scan_N" + std::to_string(n) + ".json");
  return failed ? kExitNumerical : kExitOk;
}

int cmd_exponent_map(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  require(!cfg.kappa.empty() && !cfg.gamma.empty(), "exponent-map needs --kappa-grid and --gamma-grid");
  const ProbeSpec probe = ProbeSpec::parse(cfg.probe);
  std::vector<int> n_list = cfg.n.empty() ? std::vector<int>{4, 8, 12, 16, 20} : cfg.n;

  Session session(cfg, log);
  const PipelineOptions options = session.pipeline();
  const Objective obj = cfg.objective();
  const ExponentMap map = exponent_map(probe, cfg.kappa, cfg.gamma, n_list, options);

  ojson manifest = session.manifest_head();
  manifest["config"]["system"]["n"] = n_list;
  ojson cells = ojson::array();
  bool failed = false;
  std::size_t invalid = 0;
  for (const ExponentCell& c : map.cells) {
    ojson row = {{"kappa", c.kappa}, {"gamma", c.gamma}, {"N", c.n_values}};
    if (!c.error.empty()) {
      failed = true;
      row["error"] = c.error;
    }
    ojson fits = ojson::object();
    for (Objective o : {Objective::Qfi, Objective::QfiPerTime}) {
      const CellFit& f = c.fits[static_cast<std::size_t>(o)];
      if (f.valid) {
        fits[objective_name(o)] = {{"valid", true},     {"a", f.fit.a},
                                   {"b", f.fit.b},      {"c", f.fit.c},
                                   {"residual_norm", f.fit.residual_norm}, {"iterations", f.fit.iterations}};
      } else {
        fits[objective_name(o)] = {{"valid", false}, {"reason", f.reason}};
      }
    }
    if (!c.fits[static_cast<std::size_t>(obj)].valid) ++invalid;
    row["fits"] = fits;
    ojson peaks = ojson::array();
    for (std::size_t i = 0; i < c.peaks.size() && c.error.empty(); ++i) {
      peaks.push_back({{"N", c.n_values[i]}, {"F", peak_json(c.peaks[i][0])}, {"F_over_t", peak_json(c.peaks[i][1])}});
    }
    row["peaks"] = peaks;
    cells.push_back(row);
  }
  const std::string name = (obj == Objective::QfiPerTime ? "texponents_" : "exponents_") + probe.name() + ".csv";
  session.write(name, map.to_csv(obj));
  manifest["cells"] = cells;
  session.finish(manifest, "manifest_exponent-map_" + probe.name() + ".json");

  out << name << ": " << map.cells.size() << " cells, " << invalid << " invalid\n";
  out << map.to_csv(obj);
  return failed ? kExitNumerical : kExitOk;
}

int cmd_oracle_check(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  for (int n : cfg.n) {
    require(n >= 1 && n <= oracle::kMaxQubits,
            "oracle-check supports 1 <= N <= " + std::to_string(oracle::kMaxQubits));
  }
  Session session(cfg, log);
  oracle::CheckOptions opt;
  if (!cfg.n.empty()) opt.n_values = cfg.n;
  if (!cfg.kappa.empty()) opt.kappa = cfg.kappa;
  if (!cfg.gamma.empty()) opt.gamma = cfg.gamma;
  opt.times = cfg.times();
  opt.qfi = cfg.qfi;
  opt.integrator = cfg.integrator;
  opt.progress = [&](const std::string& msg) { session.progress(msg); };

  const auto suites = oracle::run_checks(opt);
  ojson manifest = session.manifest_head();
  ojson rows = ojson::array();
  bool all = true;
  for (const auto& s : suites) {
    all = all && s.passed();
    out << (s.passed() ? "PASS " : "FAIL ") << s.name << ": max deviation " << format_double(s.max_deviation)
        << " (tolerance " << format_double(s.tolerance) << ", " << s.cases << " cases, worst " << s.worst_case
        << ")\n";
    rows.push_back({{"suite", s.name},
                    {"passed", s.passed()},
                    {"max_deviation", s.max_deviation},
                    {"tolerance", s.tolerance},
                    {"cases", s.cases},
                    {"worst_case", s.worst_case}});
  }
  manifest["suites"] = rows;
  session.finish(manifest, "manifest_oracle-check.json");
  return all ? kExitOk : kExitNumerical;
}

}  // namespace permqfi::cli
