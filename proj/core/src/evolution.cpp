#include "permqfi/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "permqfi/error.hpp"

namespace permqfi {

namespace {

Complex trace_of(const Support& support, const Eigen::Ref<const Eigen::VectorXcd>& values) {
  Complex tr{};
  for (const CoherenceBlock& block : support.blocks()) {
    for (const auto& e : block.entries) {
      if (e.row == e.col) tr += values[e.position];
    }
  }
  return tr;
}

class TraceGuard {
 public:
  TraceGuard(const Support& support, const Eigen::Ref<const Eigen::VectorXcd>& initial, const IntegratorConfig& cfg)
      : support_(support), initial_(trace_of(support, initial)), limit_(100.0 * std::max(cfg.rtol, cfg.atol)) {}

  void check(double t, const Eigen::Ref<const Eigen::VectorXcd>& values) const {
    if (!values.allFinite()) {
      std::ostringstream msg;
      msg << "state became non-finite at t=" << t;
      throw NumericalError(msg.str());
    }
    const double drift = std::abs(trace_of(support_, values) - initial_);
    if (drift > limit_ * std::max(1.0, std::abs(initial_))) {
      std::ostringstream msg;
      msg << "trace drifted by " << drift << " at t=" << t;
      throw NumericalError(msg.str());
    }
  }

 private:
  const Support& support_;
  Complex initial_;
  double limit_;
};

}  // namespace

Trajectory evolve(const DensityState& rho0, const SuperOp& rhs, std::span<const double> times,
                  const IntegratorConfig& config) {
  if (rho0.support().flat_indices() != rhs.support().flat_indices()) {
    throw InvalidArgument("initial state and generator live on different supports");
  }
  if (!times.empty() && times.front() < 0.0) throw InvalidArgument("times must be non-negative");

  Trajectory out;
  out.times.assign(times.begin(), times.end());
  out.snapshots.reserve(times.size());

  const TraceGuard guard(rho0.support(), rho0.values(), config);
  Dop853 solver([&rhs](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) { rhs.apply(y, dy); }, config);
  Eigen::VectorXcd y = rho0.values();
  solver.integrate(times.empty() ? 0.0 : std::min(0.0, times.front()), y, times,
                   [&](std::size_t, double t, const Eigen::VectorXcd& state) {
                     guard.check(t, state);
                     out.snapshots.emplace_back(rho0.shared_support(), state);
                   });
  return out;
}

void evolve_pair(const Eigen::VectorXcd& plus0, const Eigen::VectorXcd& minus0, const SuperOp& rhs_plus,
                 const SuperOp& rhs_minus, double t0, std::span<const double> times, const IntegratorConfig& config,
                 const PairObserver& observe) {
  const Eigen::Index n = plus0.size();
  if (minus0.size() != n || static_cast<std::size_t>(n) != rhs_plus.support().size() ||
      rhs_plus.support().flat_indices() != rhs_minus.support().flat_indices()) {
    throw InvalidArgument("pair states and generators must share one support");
  }

  Eigen::VectorXcd y(2 * n);
  y.head(n) = plus0;
  y.tail(n) = minus0;
  const TraceGuard guard_plus(rhs_plus.support(), plus0, config);
  const TraceGuard guard_minus(rhs_minus.support(), minus0, config);

  Dop853 solver(
      [&](double, const Eigen::VectorXcd& state, Eigen::VectorXcd& d) {
        rhs_plus.apply(state.head(n), d.head(n));
        rhs_minus.apply(state.tail(n), d.tail(n));
      },
      config);
  solver.integrate(t0, y, times, [&](std::size_t idx, double t, const Eigen::VectorXcd& state) {
    guard_plus.check(t, state.head(n));
    guard_minus.check(t, state.tail(n));
    observe(PairSample{idx, t, state.head(n), state.tail(n)});
  });
}

SimParams dimensionless_rescale(const SimParams& params) {
  if (!(params.g > 0.0)) throw InvalidArgument("dimensionless rescaling needs g > 0");
  SimParams out = params;
  out.g = 1.0;
  out.kappa = params.kappa / params.g;
  out.gamma = params.gamma / params.g;
  out.omega_q = params.omega_q / params.g;
  out.omega_c = params.omega_c / params.g;
  return out;
}

}  // namespace permqfi
