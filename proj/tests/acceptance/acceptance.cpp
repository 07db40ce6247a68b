// Acceptance run: one PASS/FAIL line per check. Slow checks (N = 20 Dicke
// excitation scan and the beyond-SQL exponent fit) only run with --slow.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "permqfi/fisher.hpp"
#include "permqfi/metrology.hpp"
#include "permqfi/oracle_check.hpp"
#include "permqfi/scaling_fit.hpp"

using namespace permqfi;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
  std::string output;  // serialised results, compared by the determinism check
};

using Check = std::function<Outcome()>;

struct Settings {
  std::size_t workers = 1;
};
Settings settings;

std::string fmt(double v) { return format_double(v); }

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

PipelineOptions pipeline() {
  PipelineOptions o;
  o.workers = settings.workers;
  return o;
}

SimParams rates(int n, double kappa, double gamma) {
  SimParams p;
  p.num_qubits = n;
  p.kappa = kappa;
  p.gamma = gamma;
  return p;
}

std::string peak_row(int n, const PeakResult& p) {
  return std::to_string(n) + "," + fmt(p.peak_time) + "," + fmt(p.peak_value) + "," +
         (p.at_boundary ? "1" : "0") + "\n";
}

bool interior(const PeakResult& p) { return !p.at_boundary && p.coarse_index > 0 && p.peak_value > 0.0; }

// ---------------------------------------------------------------------------

Outcome analytic_rabi() {
  // F(t) = 4 sin^2(delta t) / delta^2 for the central difference, so the
  // step is small enough that the bias stays far below the tolerance
  QfiConfig qfi;
  qfi.delta = 1e-4;
  std::vector<double> times;
  for (int k = 1; k <= 20; ++k) times.push_back(0.15 * k);
  SimParams p;
  p.num_qubits = 1;
  const QfiSeries s = qfi_series(ProbeSpec::dicke(1), p, times, qfi);

  Outcome o;
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double exact = 4.0 * times[i] * times[i];
    worst = std::max(worst, std::abs(s.f_scaled[i] - exact) / exact);
    o.output += fmt(times[i]) + "," + fmt(s.f_scaled[i]) + "\n";
  }
  o.passed = worst <= 1e-6;
  o.detail = "max rel err " + short_num(worst) + " over 20 points";
  return o;
}

// the oracle suites are shared by two checks and the determinism rerun
std::optional<std::vector<oracle::SuiteResult>> oracle_cache;

std::vector<oracle::SuiteResult> oracle_suites() {
  oracle::CheckOptions opt;
  return oracle::run_checks(opt);
}

const oracle::SuiteResult& suite(const std::vector<oracle::SuiteResult>& all, const std::string& name) {
  for (const auto& s : all) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("no suite " + name);
}

std::string suite_text(const oracle::SuiteResult& s) {
  return s.name + "," + fmt(s.max_deviation) + "," + std::to_string(s.cases) + "," + s.worst_case + "\n";
}

Outcome oracle_equivalence() {
  if (!oracle_cache) oracle_cache = oracle_suites();
  const auto& q = suite(*oracle_cache, "qfi");
  Outcome o;
  o.passed = q.passed();
  o.detail = "max rel dev " + short_num(q.max_deviation) + " (tol " + short_num(q.tolerance) + ") over " +
             std::to_string(q.cases) + " probe/rate cases";
  if (!q.worst_case.empty()) o.detail += ", worst " + q.worst_case;
  for (const auto& s : *oracle_cache) o.output += suite_text(s);
  return o;
}

Outcome conservation() {
  if (!oracle_cache) oracle_cache = oracle_suites();
  Outcome o;
  o.passed = true;
  for (const char* name : {"trace", "hermiticity", "positivity"}) {
    const auto& s = suite(*oracle_cache, name);
    o.passed = o.passed && s.passed();
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += std::string(name) + " " + short_num(s.max_deviation) + " (tol " + short_num(s.tolerance) + ")";
    o.output += suite_text(s);
  }
  return o;
}

Outcome peaks_grow_with_n() {
  Outcome o;
  o.passed = true;
  double previous = -1.0;
  for (int n : {4, 8, 12, 16, 20}) {
    const PeakAnalysis a = analyze_probe(ProbeSpec::dicke(1), rates(n, 0.2, 0.6), pipeline());
    const PeakResult& p = a.peak(Objective::Qfi);
    o.output += peak_row(n, p);
    if (!interior(p)) {
      o.passed = false;
      o.detail += "N=" + std::to_string(n) + " has no interior peak; ";
    }
    if (p.peak_value <= previous) {
      o.passed = false;
      o.detail += "peak does not grow at N=" + std::to_string(n) + "; ";
    }
    previous = p.peak_value;
    o.detail += "N=" + std::to_string(n) + ":" + short_num(p.peak_value) + "@" + short_num(p.peak_time) + " ";
  }
  return o;
}

Outcome ghz_lowest() {
  Outcome o;
  o.passed = true;
  const std::vector<ProbeSpec> probes = {ProbeSpec::ghz(), ProbeSpec::dicke(1), ProbeSpec::x_polarized()};
  std::vector<int> offenders;
  for (int n = 4; n <= 14; ++n) {
    std::vector<double> peaks;
    for (const auto& probe : probes) {
      const PeakAnalysis a = analyze_probe(probe, rates(n, 1.0, 1.0), pipeline());
      peaks.push_back(a.peak(Objective::Qfi).peak_value);
      o.output += probe.name() + "," + peak_row(n, a.peak(Objective::Qfi));
    }
    if (n >= 8 && !(peaks[0] < peaks[1] && peaks[0] < peaks[2])) {
      o.passed = false;
      offenders.push_back(n);
    }
    if (n == 8 || n == 14) {
      o.detail += "N=" + std::to_string(n) + " ghz/dicke-1/x " + short_num(peaks[0]) + "/" + short_num(peaks[1]) +
                  "/" + short_num(peaks[2]) + " ";
    }
  }
  for (int n : offenders) o.detail += "[ghz not lowest at N=" + std::to_string(n) + "]";
  return o;
}

struct ExcitationProfile {
  double kappa = 0.0;
  DickeScan scan;
};

std::optional<std::vector<ExcitationProfile>> excitation_cache;

const std::vector<ExcitationProfile>& excitation_profiles() {
  if (!excitation_cache) {
    std::vector<int> n_values;
    for (int n = 1; n <= 20; ++n) n_values.push_back(n);
    excitation_cache.emplace();
    for (double kappa : {0.1, 0.5, 1.0}) {
      excitation_cache->push_back({kappa, dicke_excitation_scan(rates(20, kappa, 0.2), n_values, pipeline())});
    }
  }
  return *excitation_cache;
}

Outcome optimal_excitation(Objective objective) {
  Outcome o;
  o.passed = true;
  std::vector<int> best;
  for (const auto& prof : excitation_profiles()) {
    for (const auto& e : prof.scan.entries) {
      if (!e.error.empty()) {
        o.passed = false;
        o.detail += "n=" + std::to_string(e.excitations) + " failed: " + e.error + "; ";
      }
      o.output += fmt(prof.kappa) + "," + peak_row(e.excitations, e.peaks[static_cast<std::size_t>(objective)]);
    }
    const std::optional<int> b = prof.scan.best(objective);
    const int n_star = b.value_or(-1);
    best.push_back(n_star);
    o.detail += "kappa=" + short_num(prof.kappa) + " n*=" + std::to_string(n_star) + " ";
    if (!(n_star > 1 && n_star < 20)) o.passed = false;
  }
  if (objective == Objective::Qfi) {
    int ties = 0;
    for (std::size_t i = 1; i < best.size(); ++i) {
      if (best[i] < best[i - 1]) o.passed = false;
      if (best[i] == best[i - 1]) ++ties;
    }
    if (ties > 1) o.passed = false;
    o.detail += "(" + std::to_string(ties) + " ties)";
  }
  return o;
}

Outcome fit_recovery() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> n;
  for (int k = 2; k <= 30; k += 2) n.push_back(k);

  Outcome o;
  o.passed = true;
  double worst_clean = 0.0, worst_noisy = 0.0;
  for (double b : {0.5, 1.0, 1.5, 2.0}) {
    std::vector<double> y;
    for (double x : n) y.push_back(1.7 * std::pow(x, b) + 0.4);
    const ScalingFit clean = scaling_fit(n, y);
    worst_clean = std::max(worst_clean, std::abs(clean.b - b));
    o.output += fmt(b) + "," + fmt(clean.b);
    for (unsigned seed = 1; seed <= 10; ++seed) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> noise(0.0, 0.01);
      std::vector<double> yn = y;
      for (double& v : yn) v *= 1.0 + noise(rng);
      const ScalingFit fit = scaling_fit(n, yn);
      worst_noisy = std::max(worst_noisy, std::abs(fit.b - b));
      o.output += "," + fmt(fit.b);
    }
    o.output += "\n";
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.passed = worst_clean <= 1e-6 && worst_noisy <= 0.15 && seconds < 10.0;
  o.detail = "noiseless |db| " + short_num(worst_clean) + ", 1% noise |db| " + short_num(worst_noisy) +
             " over 10 seeds";
  return o;
}

Outcome beyond_sql() {
  const std::vector<int> n_values = {4, 8, 12, 16, 20};
  std::vector<std::array<PeakResult, 2>> dicke, x;
  Outcome o;
  for (int n : n_values) {
    dicke.push_back(analyze_probe(ProbeSpec::dicke(n / 2), rates(n, 0.1, 0.1), pipeline()).peaks);
    x.push_back(analyze_probe(ProbeSpec::x_polarized(), rates(n, 0.1, 0.1), pipeline()).peaks);
    o.output += "dicke," + peak_row(n, dicke.back()[0]) + "x," + peak_row(n, x.back()[0]);
  }
  const CellFit fd = fit_peaks(n_values, dicke, Objective::Qfi);
  const CellFit fx = fit_peaks(n_values, x, Objective::Qfi);
  if (!fd.valid || !fx.valid) {
    o.passed = false;
    o.detail = "invalid fit: dicke " + fd.reason + " x " + fx.reason;
    return o;
  }
  o.passed = fd.fit.b > 1.3 && fx.fit.b < fd.fit.b;
  o.detail = "b(dicke-N/2) " + short_num(fd.fit.b) + ", b(x) " + short_num(fx.fit.b);
  o.output += fmt(fd.fit.b) + "," + fmt(fx.fit.b) + "\n";
  return o;
}

// ---------------------------------------------------------------------------

struct Entry {
  std::string name;
  std::string description;
  Check check;
  double time_limit = 0.0;  // seconds, 0 = none
  bool slow = false;
  bool deterministic = false;  // rerun by the determinism check
};

struct Record {
  Outcome outcome;
  double seconds = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  bool slow = false;
  std::vector<std::string> only;
  app.add_flag("--slow", slow, "also run the slow checks");
  app.add_option("--only", only, "run only these checks");
  app.add_option("--workers", settings.workers, "worker threads for the probe sweeps (0 = all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Entry> entries = {
      {"analytic_rabi", "N=1 closed Rabi QFI equals 4 (gt)^2", analytic_rabi, 1.0, false, true},
      {"oracle_equivalence", "symmetric QFI equals full-space QFI, N=2..4", oracle_equivalence, 600.0, false, true},
      {"conservation", "trace, Hermiticity and positivity along oracle runs", conservation, 0.0, false, true},
      {"peaks_grow_with_n", "Dicke-1 interior peaks grow with N", peaks_grow_with_n, 1800.0, false, true},
      {"ghz_lowest", "GHZ time-optimised QFI lowest for N >= 8 at kappa=gamma=g", ghz_lowest, 0.0, false, true},
      {"optimal_excitation", "N=20 best Dicke excitation interior and nondecreasing in kappa",
       [] { return optimal_excitation(Objective::Qfi); }, 0.0, true, true},
      {"fit_recovery", "power-law fit recovers b", fit_recovery, 10.0, false, true},
      {"beyond_sql", "Dicke-N/2 exponent above 1.3 and above the X-state exponent", beyond_sql, 0.0, true, false},
      {"per_time_excitation", "F/t best Dicke excitation also interior",
       [] { return optimal_excitation(Objective::QfiPerTime); }, 0.0, true, false},
  };

  auto selected = [&](const std::string& name, bool is_slow) {
    if (!only.empty()) return std::find(only.begin(), only.end(), name) != only.end();
    return slow || !is_slow;
  };

  std::map<std::string, Record> records;
  int failures = 0;
  auto report = [&](const std::string& name, bool passed, const std::string& detail, double seconds) {
    if (!passed) ++failures;
    std::cout << (passed ? "PASS " : "FAIL ") << name << ": " << detail << " [" << short_num(seconds) << " s]"
              << std::endl;
  };

  for (const auto& e : entries) {
    if (!selected(e.name, e.slow)) {
      std::cout << "SKIP " << e.name << (only.empty() ? ": slow, run with --slow" : ": not selected") << std::endl;
      continue;
    }
    Record r;
    const auto start = std::chrono::steady_clock::now();
    try {
      r.outcome = e.check();
    } catch (const std::exception& ex) {
      r.outcome.passed = false;
      r.outcome.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool passed = r.outcome.passed;
    std::string detail = e.description + "; " + r.outcome.detail;
    if (e.time_limit > 0.0 && r.seconds >= e.time_limit) {
      passed = false;
      detail += "; over the " + short_num(e.time_limit) + " s budget";
    }
    report(e.name, passed, detail, r.seconds);
    records[e.name] = r;
  }

  if (only.empty() || std::find(only.begin(), only.end(), "determinism") != only.end()) {
    // second pass over everything already run, compared byte for byte
    const auto start = std::chrono::steady_clock::now();
    oracle_cache.reset();
    excitation_cache.reset();
    std::size_t compared = 0;
    std::vector<std::string> differing;
    for (const auto& e : entries) {
      auto it = records.find(e.name);
      if (!e.deterministic || it == records.end()) continue;
      Outcome again;
      try {
        again = e.check();
      } catch (const std::exception& ex) {
        again.output = std::string("exception: ") + ex.what();
      }
      ++compared;
      if (again.output != it->second.outcome.output || it->second.outcome.output.empty()) differing.push_back(e.name);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string detail = "reran " + std::to_string(compared) + " checks";
    for (const auto& d : differing) detail += "; " + d + " differs";
    report("determinism", compared > 0 && differing.empty(), detail, seconds);
  }

  return failures == 0 ? 0 : 1;
}
