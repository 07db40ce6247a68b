#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "permqfi/integrator.hpp"
#include "permqfi/operators.hpp"
#include "permqfi/probes.hpp"
#include "permqfi/state.hpp"

namespace permqfi {

struct QfiConfig {
  double delta = 1e-3;          // central-difference step in g (dimensionless)
  double err_multiplier = 10.0; // eigenvalues below err_multiplier * |min eigenvalue| are zeroed
  double pair_floor = 1e-8;     // pairs with lambda_a + lambda_b below this are skipped

  void validate() const;
};

/// One block of the midpoint state and of the coupling derivative.
///
/// `copies` is the number of identical copies the block stands for in the
/// full Hilbert space; eigenvalue thresholds are applied to the per-copy
/// spectrum so that a block and its expansion give the same result.
struct QfiBlock {
  Eigen::MatrixXcd mean;
  Eigen::MatrixXcd derivative;
  double copies = 1.0;
};

/// F = 2 sum_ab |<a|d rho|b>|^2 / (l_a + l_b) over the eigenpairs of each
/// block, with the floating-point stabilisation described on QfiConfig.
/// Throws NumericalError on non-finite eigenvalues.
double qfi_from_blocks(std::span<const QfiBlock> blocks, const QfiConfig& config);

/// QFI from states at g + delta/2 and g - delta/2 on a shared support.
double qfi_at(const Support& support, const Eigen::Ref<const Eigen::VectorXcd>& plus,
              const Eigen::Ref<const Eigen::VectorXcd>& minus, const QfiConfig& config);
double qfi_at(const DensityState& plus, const DensityState& minus, const QfiConfig& config);

/// QFI time series on a grid of dimensionless times gt.
///
///   f         F(g), the physical QFI
///   f_scaled  F(g) g^2, equal to the QFI at unit coupling
///   f_over_t  f_scaled / gt, stored as 0 at gt = 0
///
/// peak_* hold the coarse grid argmax of f_scaled.
struct QfiSeries {
  ProbeSpec probe;
  SimParams params;
  QfiConfig qfi;
  IntegratorConfig integrator;

  std::vector<double> times;
  std::vector<double> f;
  std::vector<double> f_scaled;
  std::vector<double> f_over_t;

  std::size_t peak_index = 0;
  double peak_time = 0.0;
  double peak_value = 0.0;

  /// Fills f, f_over_t and the peak fields from times and f_scaled.
  void finalize();

  /// Header "gt,F,F_g2,F_over_t", one row per sample, shortest round-trip
  /// number formatting.
  std::string to_csv() const;
  /// Series plus the parameters, tolerances and code version that made it.
  std::string to_json() const;
};

/// Integrates the g +/- delta/2 pair for `probe` and evaluates the QFI at
/// every entry of `times` (dimensionless gt, strictly increasing, >= 0).
QfiSeries qfi_series(const ProbeSpec& probe, const SimParams& params, std::span<const double> times,
                     const QfiConfig& qfi = {}, const IntegratorConfig& integrator = {});

/// Uniform grid of `intervals` + 1 points over [0, t_max].
std::vector<double> uniform_grid(double t_max, std::size_t intervals);

/// Shortest decimal text that parses back to `value`.
std::string format_double(double value);

const char* version_string();

}  // namespace permqfi
