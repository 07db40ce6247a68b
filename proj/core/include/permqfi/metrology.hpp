#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "permqfi/fisher.hpp"
#include "permqfi/qfi_scan.hpp"
#include "permqfi/scaling_fit.hpp"

namespace permqfi {

/// Time-optimised QFI of one series. peak_value is in units of F g^2 (or
/// F g^2 / gt for the per-time objective).
struct PeakResult {
  std::string probe;
  SimParams params;
  Objective objective = Objective::Qfi;
  double peak_time = 0.0;
  double peak_value = 0.0;
  std::size_t coarse_index = 0;
  bool refined = false;
  /// Coarse maximum sits on the last grid point: the grid ends too early.
  bool at_boundary = false;
};

using PeakEvaluator = std::function<double(double gt)>;

/// Coarse argmax over the grid, then golden-section search on the
/// kRefineSteps grid intervals either side of it using `evaluate` (typically QfiScan::evaluate). The
/// reported value is never below the best grid sample. For the per-time
/// objective gt = 0 is excluded.
PeakResult find_peak(const QfiSeries& series, Objective objective, const PeakEvaluator& evaluate = {},
                     double tolerance = 1e-4);

struct PipelineOptions;

/// Persistence for pair trajectories, consulted by analyze_probe. Must be
/// safe to call from several worker threads at once.
class PairStore {
 public:
  virtual ~PairStore() = default;
  virtual std::optional<PairTrajectory> load(const ProbeSpec& probe, const SimParams& params,
                                             const PipelineOptions& options) = 0;
  /// Whether a trajectory with this many stored amplitudes per state should be kept.
  virtual bool accepts(std::size_t support_size, std::size_t samples) const = 0;
  virtual void save(const ProbeSpec& probe, const SimParams& params, const PipelineOptions& options,
                    const PairTrajectory& pair) = 0;
};

/// Called once per finished job with a short description; calls are serialised.
using ProgressFn = std::function<void(const std::string&)>;

/// Settings shared by every pipeline run.
struct PipelineOptions {
  std::vector<double> times = uniform_grid(20.0, 400);
  QfiConfig qfi;
  IntegratorConfig integrator;
  bool refine = true;
  double refine_tolerance = 1e-4;
  std::size_t workers = 1;
  PairStore* store = nullptr;
  ProgressFn progress;
};

/// Series plus peaks for both objectives from one pair integration.
struct PeakAnalysis {
  QfiSeries series;
  std::array<PeakResult, 2> peaks;  // indexed by Objective

  const PeakResult& peak(Objective o) const { return peaks[static_cast<std::size_t>(o)]; }
};

/// Runs one probe. When `cached` is given its snapshots replace the
/// integration; when `keep` is given the snapshots are stored there.
/// Without either, options.store is tried for a stored pair and offered the
/// new one.
PeakAnalysis analyze_probe(const ProbeSpec& probe, const SimParams& params, const PipelineOptions& options,
                           const PairTrajectory* cached = nullptr, PairTrajectory* keep = nullptr);

struct DickeScanEntry {
  int excitations = 0;
  std::array<PeakResult, 2> peaks;
  std::string error;  // non-empty when the run failed
};

struct DickeScan {
  int num_qubits = 0;
  std::vector<DickeScanEntry> entries;

  /// Excitation number with the largest peak, or nullopt if every entry failed.
  std::optional<int> best(Objective objective) const;
};

/// Time-optimised QFI for Dicke-n probes at fixed N and rates.
DickeScan dicke_excitation_scan(const SimParams& params, const std::vector<int>& n_values,
                                const PipelineOptions& options);

struct CellFit {
  bool valid = false;
  ScalingFit fit;
  std::string reason;  // why the cell is invalid
};

struct ExponentCell {
  double kappa = 0.0;
  double gamma = 0.0;
  std::vector<int> n_values;                    // N values the probe is defined for
  std::vector<std::array<PeakResult, 2>> peaks; // one per n_values entry
  std::array<CellFit, 2> fits;                  // indexed by Objective
  std::string error;                            // first failed run, empty if none
};

/// Scaling exponents over a (kappa/g, gamma/g) grid. cells[i * kappa.size() + j]
/// holds gamma[i], kappa[j].
struct ExponentMap {
  std::string probe;
  std::vector<double> kappa;
  std::vector<double> gamma;
  std::vector<ExponentCell> cells;

  const ExponentCell& cell(std::size_t gamma_index, std::size_t kappa_index) const {
    return cells[gamma_index * kappa.size() + kappa_index];
  }
  /// Rows gamma/g, columns kappa/g, invalid cells written as "nan".
  std::string to_csv(Objective objective) const;
};

/// For each cell: time-optimised peaks over `n_list`, then y(N) = a N^b + c.
/// Cells with boundary peaks, failed runs or failed fits are marked invalid
/// and the sweep continues.
ExponentMap exponent_map(const ProbeSpec& probe, const std::vector<double>& kappa_grid,
                         const std::vector<double>& gamma_grid, const std::vector<int>& n_list,
                         const PipelineOptions& options);

/// Fits one objective from a list of peaks (boundary peaks invalidate the cell).
CellFit fit_peaks(const std::vector<int>& n_values, const std::vector<std::array<PeakResult, 2>>& peaks,
                  Objective objective);

}  // namespace permqfi
