#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace permqfi {

/// Least-squares fit of y(N) = a N^b + c.
struct ScalingFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double residual_norm = 0.0;  // ||y - model||_2 in the units of y
  std::vector<double> n_values;
  std::size_t iterations = 0;  // of the winning start
};

/// Multi-start damped Gauss-Newton (Levenberg-Marquardt). Starts are
/// b in {0.5, 1, 1.5, 2, 2.5} plus the log-log slope of y - min(y); for each
/// start a and c come from the linear least-squares solve at fixed b.
///
/// Throws InvalidArgument for fewer than 4 points, repeated or non-positive
/// N, or non-finite y, and NumericalError when y does not vary with N or no
/// start converges.
ScalingFit scaling_fit(std::span<const double> n_values, std::span<const double> y);

}  // namespace permqfi
