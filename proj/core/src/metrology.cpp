#include "permqfi/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "permqfi/error.hpp"
#include "permqfi/parallel.hpp"

namespace permqfi {

namespace {

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

PeakResult find_peak(const QfiSeries& series, Objective objective, const PeakEvaluator& evaluate, double tolerance) {
  const auto& t = series.times;
  if (t.empty() || series.f_scaled.size() != t.size()) throw InvalidArgument("QFI series is empty");
  const std::vector<double>& values = objective == Objective::Qfi ? series.f_scaled : series.f_over_t;

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (objective == Objective::QfiPerTime && !(t[i] > 0.0)) continue;
    if (!best || values[i] > values[*best]) best = i;
  }
  if (!best) throw InvalidArgument("series has no sample with gt > 0");

  PeakResult r;
  r.probe = series.probe.name();
  r.params = series.params;
  r.objective = objective;
  r.coarse_index = *best;
  r.peak_time = t[*best];
  r.peak_value = values[*best];
  r.at_boundary = *best + 1 == t.size();
  if (!evaluate || r.at_boundary || !(r.peak_value > 0.0)) return r;

  // golden-section search for the maximum on [t_{k-2}, t_{k+2}], clipped to the grid
  double a = t[*best >= kRefineSteps ? *best - kRefineSteps : 0];
  double b = t[std::min(*best + kRefineSteps, t.size() - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = evaluate(c);
  double fd = evaluate(d);
  double best_t = fc > fd ? c : d;
  double best_v = std::max(fc, fd);
  while (b - a > tolerance) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = evaluate(c);
      if (fc > best_v) {
        best_v = fc;
        best_t = c;
      }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = evaluate(d);
      if (fd > best_v) {
        best_v = fd;
        best_t = d;
      }
    }
  }
  r.refined = true;
  if (best_v > r.peak_value) {
    r.peak_value = best_v;
    r.peak_time = best_t;
  }
  return r;
}

PeakAnalysis analyze_probe(const ProbeSpec& probe, const SimParams& params, const PipelineOptions& options,
                           const PairTrajectory* cached, PairTrajectory* keep) {
  QfiScan scan(probe, params, options.qfi, options.integrator);
  std::optional<PairTrajectory> stored;
  PairTrajectory fresh;
  bool save = false;
  if (!cached && !keep && options.store) {
    stored = options.store->load(probe, params, options);
    if (stored) {
      cached = &*stored;
    } else if (options.store->accepts(scan.support().size(), options.times.size())) {
      keep = &fresh;
      save = true;
    }
  }

  PeakAnalysis out;
  out.series = cached ? scan.replay(*cached) : scan.run(options.times, keep);
  if (save) options.store->save(probe, params, options, fresh);
  for (Objective o : {Objective::Qfi, Objective::QfiPerTime}) {
    PeakEvaluator eval;
    if (options.refine) eval = [&scan, o](double gt) { return scan.evaluate(o, gt); };
    out.peaks[static_cast<std::size_t>(o)] = find_peak(out.series, o, eval, options.refine_tolerance);
  }
  return out;
}

namespace {

void report(const PipelineOptions& options, const std::string& message) {
  static std::mutex mutex;
  if (!options.progress) return;
  std::lock_guard lock(mutex);
  options.progress(message);
}

}  // namespace

std::optional<int> DickeScan::best(Objective objective) const {
  std::optional<int> arg;
  double value = 0.0;
  for (const DickeScanEntry& e : entries) {
    if (!e.error.empty()) continue;
    const double v = e.peaks[static_cast<std::size_t>(objective)].peak_value;
    if (!arg || v > value) {
      arg = e.excitations;
      value = v;
    }
  }
  return arg;
}

DickeScan dicke_excitation_scan(const SimParams& params, const std::vector<int>& n_values,
                                const PipelineOptions& options) {
  params.validate();
  for (int n : n_values) {
    if (n < 0 || n > params.num_qubits) {
      throw InvalidArgument("Dicke excitation " + std::to_string(n) + " outside [0, N]");
    }
  }
  DickeScan scan;
  scan.num_qubits = params.num_qubits;
  scan.entries.resize(n_values.size());
  const auto errors = run_jobs(n_values.size(), options.workers, [&](std::size_t i) {
    DickeScanEntry& e = scan.entries[i];
    e.excitations = n_values[i];
    e.peaks = analyze_probe(ProbeSpec::dicke(n_values[i]), params, options).peaks;
    report(options, "dicke-" + std::to_string(n_values[i]) + " N=" + std::to_string(params.num_qubits) + " done");
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) scan.entries[i].error = describe(errors[i]);
  }
  return scan;
}

CellFit fit_peaks(const std::vector<int>& n_values, const std::vector<std::array<PeakResult, 2>>& peaks,
                  Objective objective) {
  CellFit out;
  if (n_values.size() < 4) {
    out.reason = "fewer than 4 valid N values";
    return out;
  }
  std::vector<double> n, y;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const PeakResult& p = peaks[i][static_cast<std::size_t>(objective)];
    if (p.at_boundary) {
      out.reason = "peak at grid boundary for N=" + std::to_string(n_values[i]);
      return out;
    }
    n.push_back(n_values[i]);
    y.push_back(p.peak_value);
  }
  try {
    out.fit = scaling_fit(n, y);
    out.valid = true;
  } catch (const Error& e) {
    out.reason = e.what();
  }
  return out;
}

ExponentMap exponent_map(const ProbeSpec& probe, const std::vector<double>& kappa_grid,
                         const std::vector<double>& gamma_grid, const std::vector<int>& n_list,
                         const PipelineOptions& options) {
  if (kappa_grid.empty() || gamma_grid.empty()) throw InvalidArgument("rate grids must not be empty");
  if (n_list.empty()) throw InvalidArgument("N list must not be empty");

  ExponentMap map;
  map.probe = probe.name();
  map.kappa = kappa_grid;
  map.gamma = gamma_grid;
  map.cells.resize(kappa_grid.size() * gamma_grid.size());

  struct Job {
    std::size_t cell;
    std::size_t slot;
  };
  std::vector<Job> jobs;
  for (std::size_t gi = 0; gi < gamma_grid.size(); ++gi) {
    for (std::size_t ki = 0; ki < kappa_grid.size(); ++ki) {
      const std::size_t idx = gi * kappa_grid.size() + ki;
      ExponentCell& cell = map.cells[idx];
      cell.kappa = kappa_grid[ki];
      cell.gamma = gamma_grid[gi];
      for (int n : n_list) {
        if (probe.valid_for(n)) cell.n_values.push_back(n);
      }
      cell.peaks.resize(cell.n_values.size());
      for (std::size_t s = 0; s < cell.n_values.size(); ++s) jobs.push_back({idx, s});
    }
  }

  const auto errors = run_jobs(jobs.size(), options.workers, [&](std::size_t j) {
    ExponentCell& cell = map.cells[jobs[j].cell];
    SimParams params;
    params.num_qubits = cell.n_values[jobs[j].slot];
    params.kappa = cell.kappa;
    params.gamma = cell.gamma;
    cell.peaks[jobs[j].slot] = analyze_probe(probe, params, options).peaks;
    report(options, probe.name() + " kappa=" + format_double(cell.kappa) + " gamma=" + format_double(cell.gamma) +
                        " N=" + std::to_string(params.num_qubits) + " done (" + std::to_string(j + 1) + "/" +
                        std::to_string(jobs.size()) + ")");
  });

  std::vector<std::string> cell_error(map.cells.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (errors[j] && cell_error[jobs[j].cell].empty()) {
      cell_error[jobs[j].cell] = "N=" + std::to_string(map.cells[jobs[j].cell].n_values[jobs[j].slot]) + ": " +
                                 describe(errors[j]);
    }
  }
  for (std::size_t c = 0; c < map.cells.size(); ++c) {
    map.cells[c].error = cell_error[c];
    for (Objective o : {Objective::Qfi, Objective::QfiPerTime}) {
      CellFit& fit = map.cells[c].fits[static_cast<std::size_t>(o)];
      if (!cell_error[c].empty()) {
        fit.reason = cell_error[c];
      } else {
        fit = fit_peaks(map.cells[c].n_values, map.cells[c].peaks, o);
      }
    }
  }
  return map;
}

std::string ExponentMap::to_csv(Objective objective) const {
  std::string out = "gamma/kappa";
  for (double k : kappa) out += "," + format_double(k);
  out += '\n';
  for (std::size_t gi = 0; gi < gamma.size(); ++gi) {
    out += format_double(gamma[gi]);
    for (std::size_t ki = 0; ki < kappa.size(); ++ki) {
      const CellFit& f = cell(gi, ki).fits[static_cast<std::size_t>(objective)];
      out += ',';
      out += f.valid ? format_double(f.fit.b) : std::string("nan");
    }
    out += '\n';
  }
  return out;
}

}  // namespace permqfi
