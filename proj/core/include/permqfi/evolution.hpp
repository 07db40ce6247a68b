#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "permqfi/integrator.hpp"
#include "permqfi/operators.hpp"
#include "permqfi/state.hpp"

namespace permqfi {

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityState> snapshots;
};

/// Integrates d rho/dt = rhs(rho) and returns snapshots at exactly `times`.
///
/// Aborts with NumericalError when the trace drifts from its initial value
/// by more than 100 x max(rtol, atol) or the state stops being finite.
Trajectory evolve(const DensityState& rho0, const SuperOp& rhs, std::span<const double> times,
                  const IntegratorConfig& config);

/// Two states on a shared support integrated as one stacked system, so both
/// see the same step sequence. Used for the g +/- delta/2 pair.
struct PairSample {
  std::size_t index;
  double time;
  Eigen::Ref<const Eigen::VectorXcd> plus;
  Eigen::Ref<const Eigen::VectorXcd> minus;
};

using PairObserver = std::function<void(const PairSample&)>;

void evolve_pair(const Eigen::VectorXcd& plus0, const Eigen::VectorXcd& minus0, const SuperOp& rhs_plus,
                 const SuperOp& rhs_minus, double t0, std::span<const double> times, const IntegratorConfig& config,
                 const PairObserver& observe);

/// Pair of trajectories at couplings g +/- delta/2, sampled on one grid.
struct PairTrajectory {
  double delta = 0.0;
  Trajectory plus;
  Trajectory minus;
};

/// Equivalent parameters with g = 1 and all rates and frequencies divided
/// by g. Time grids convert as t' = g t. Rejects g = 0.
SimParams dimensionless_rescale(const SimParams& params);

/// Binary trajectory cache.
///
/// Layout (native little-endian):
///   char[8]  magic "PQFITRJ\0"
///   u32      format version (1)
///   u32      number of qubits N
///   u64      support size S
///   u64      number of times T
///   u32      number of series K
///   u32      reserved (0)
///   f64      metadata scalar (finite-difference step for pair files, else 0)
///   u64[S]   flat component indices of the support
///   f64[T]   times
///   K x T x S complex<f64> snapshot values
/// All series share the support and the time grid.
void write_trajectories(const std::filesystem::path& path, std::span<const Trajectory* const> series,
                        double metadata = 0.0);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path, double* metadata = nullptr);

void write_pair_trajectory(const std::filesystem::path& path, const PairTrajectory& pair);
PairTrajectory read_pair_trajectory(const std::filesystem::path& path);

}  // namespace permqfi
