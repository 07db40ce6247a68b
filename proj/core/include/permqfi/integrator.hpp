#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

#include <Eigen/Dense>

namespace permqfi {

struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-10;
  double first_step = 0.0;  // 0 selects the step automatically
  double max_step = std::numeric_limits<double>::infinity();
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 10.0;
  std::size_t max_steps = 50'000'000;

  void validate() const;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Explicit Dormand-Prince 8(5,3) integrator for complex linear or nonlinear
/// systems y' = f(t, y).
///
/// Error control follows Hairer's DOP853: the 5th- and 3rd-order embedded
/// estimates are blended into one norm and the step adapts with exponent
/// -1/8. Output is produced by stepping exactly onto each requested time.
class Dop853 {
 public:
  using Rhs = std::function<void(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt)>;
  using Observer = std::function<void(std::size_t index, double t, const Eigen::VectorXcd& y)>;

  Dop853(Rhs rhs, IntegratorConfig config);

  /// Advances `y` from `t0` through every entry of `times` (strictly
  /// increasing, all >= t0), calling `observe` at each. A time equal to t0
  /// is reported without stepping. Throws NumericalError on step underflow
  /// or non-finite state.
  void integrate(double t0, Eigen::VectorXcd& y, std::span<const double> times, const Observer& observe);

  const IntegratorStats& stats() const { return stats_; }

 private:
  double initial_step(double t0, const Eigen::VectorXcd& y, const Eigen::VectorXcd& f, double t_end);
  double error_norm(double h, const Eigen::VectorXcd& y, const Eigen::VectorXcd& y_new) const;

  Rhs rhs_;
  IntegratorConfig config_;
  IntegratorStats stats_;
  Eigen::VectorXcd k_[13];
  Eigen::VectorXcd stage_;
};

}  // namespace permqfi
