#include "permqfi/qfi_scan.hpp"

#include <algorithm>
#include <cmath>

#include "permqfi/error.hpp"

namespace permqfi {

const char* objective_name(Objective objective) {
  return objective == Objective::Qfi ? "F" : "F_over_t";
}

QfiScan::QfiScan(const ProbeSpec& probe, const SimParams& params, const QfiConfig& qfi,
                 const IntegratorConfig& integrator)
    : probe_(probe), params_(params), qfi_(qfi), integrator_(integrator) {
  params.validate();
  qfi.validate();
  integrator.validate();
  if (!probe.valid_for(params.num_qubits)) {
    throw InvalidArgument("probe " + probe.name() + " is not defined for N=" + std::to_string(params.num_qubits));
  }
  DensityState rho0 = make_probe(probe, params.num_qubits);
  support_ = rho0.shared_support();
  initial_ = rho0.values();

  SimParams plus = dimensionless_rescale(params);
  SimParams minus = plus;
  plus.g = 1.0 + 0.5 * qfi.delta;
  minus.g = 1.0 - 0.5 * qfi.delta;
  rhs_plus_ = std::make_unique<SuperOp>(assemble_rhs(plus, support_));
  rhs_minus_ = std::make_unique<SuperOp>(assemble_rhs(minus, support_));
}

void QfiScan::reset() {
  history_.clear();
  for (Checkpoint& c : checkpoints_) c = Checkpoint{};
  f_scaled_.clear();
}

double QfiScan::consume(std::size_t index, double t, const Eigen::Ref<const Eigen::VectorXcd>& plus,
                        const Eigen::Ref<const Eigen::VectorXcd>& minus, std::span<const double> times) {
  const double value = qfi_at(*support_, plus, minus, qfi_);
  for (int o = 0; o < 2; ++o) {
    const auto objective = static_cast<Objective>(o);
    if (objective == Objective::QfiPerTime && !(t > 0.0)) continue;
    const double score = objective == Objective::Qfi ? value : value / t;
    Checkpoint& c = checkpoints_[static_cast<std::size_t>(o)];
    if (c.valid && !(score > c.best)) continue;
    c.valid = true;
    c.best = score;
    c.index = index;
    if (!history_.empty()) {
      c.time = history_.front().time;
      c.plus = history_.front().plus;
      c.minus = history_.front().minus;
    } else {
      c.time = t;
      c.plus = plus;
      c.minus = minus;
    }
    c.lo = times[index >= kRefineSteps ? index - kRefineSteps : 0];
    c.hi = times[std::min(index + kRefineSteps, times.size() - 1)];
  }
  if (history_.size() == kRefineSteps) history_.erase(history_.begin());
  history_.push_back(Sample{t, plus, minus});
  return value;
}

QfiSeries QfiScan::make_series(std::span<const double> times) const {
  QfiSeries s;
  s.probe = probe_;
  s.params = params_;
  s.qfi = qfi_;
  s.integrator = integrator_;
  s.times.assign(times.begin(), times.end());
  s.f_scaled = f_scaled_;
  s.finalize();
  return s;
}

QfiSeries QfiScan::run(std::span<const double> times, PairTrajectory* keep) {
  if (times.empty()) throw InvalidArgument("time grid is empty");
  if (times.front() < 0.0) throw InvalidArgument("time grid must start at gt >= 0");
  reset();
  f_scaled_.reserve(times.size());
  if (keep) {
    keep->delta = qfi_.delta;
    keep->plus = Trajectory{{times.begin(), times.end()}, {}};
    keep->minus = Trajectory{{times.begin(), times.end()}, {}};
  }
  evolve_pair(initial_, initial_, *rhs_plus_, *rhs_minus_, 0.0, times, integrator_, [&](const PairSample& s) {
    f_scaled_.push_back(consume(s.index, s.time, s.plus, s.minus, times));
    if (keep) {
      keep->plus.snapshots.emplace_back(support_, s.plus);
      keep->minus.snapshots.emplace_back(support_, s.minus);
    }
  });
  return make_series(times);
}

QfiSeries QfiScan::replay(const PairTrajectory& pair) {
  const auto& times = pair.plus.times;
  if (times.empty() || pair.minus.times != times || pair.plus.snapshots.size() != times.size() ||
      pair.minus.snapshots.size() != times.size()) {
    throw InvalidArgument("stored pair trajectory is inconsistent");
  }
  if (pair.delta != qfi_.delta) throw InvalidArgument("stored pair trajectory uses a different delta");
  if (pair.plus.snapshots.front().support().flat_indices() != support_->flat_indices()) {
    throw InvalidArgument("stored pair trajectory has a different support");
  }
  reset();
  for (std::size_t i = 0; i < times.size(); ++i) {
    f_scaled_.push_back(consume(i, times[i], pair.plus.snapshots[i].values(), pair.minus.snapshots[i].values(), times));
  }
  return make_series(times);
}

std::optional<std::pair<double, double>> QfiScan::bracket(Objective objective) const {
  const Checkpoint& c = checkpoints_[static_cast<std::size_t>(objective)];
  if (!c.valid) return std::nullopt;
  return std::make_pair(c.lo, c.hi);
}

double QfiScan::evaluate(Objective objective, double t) const {
  const Checkpoint& c = checkpoints_[static_cast<std::size_t>(objective)];
  if (!c.valid) throw InvalidArgument("no scan has been run for this objective");
  if (t < c.time || t > c.hi) throw InvalidArgument("refinement time outside the checkpoint window");
  double value = 0.0;
  if (t == c.time) {
    value = qfi_at(*support_, c.plus, c.minus, qfi_);
  } else {
    const double target[] = {t};
    evolve_pair(c.plus, c.minus, *rhs_plus_, *rhs_minus_, c.time, target, integrator_,
                [&](const PairSample& s) { value = qfi_at(*support_, s.plus, s.minus, qfi_); });
  }
  if (objective == Objective::QfiPerTime) {
    if (!(t > 0.0)) throw InvalidArgument("F/t is undefined at gt = 0");
    value /= t;
  }
  return value;
}

}  // namespace permqfi
