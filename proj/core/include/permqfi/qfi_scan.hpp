#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <utility>

#include "permqfi/evolution.hpp"
#include "permqfi/fisher.hpp"

namespace permqfi {

/// Figure of merit maximised over time: F itself, or F/t when the total
/// measurement time rather than the number of runs is the resource.
enum class Objective { Qfi, QfiPerTime };

const char* objective_name(Objective objective);

/// Half-width, in coarse grid steps, of the window searched around a coarse maximum.
inline constexpr std::size_t kRefineSteps = 2;

/// One g +/- delta/2 pair problem, prepared once and scanned over a grid.
///
/// While scanning, the pair state kRefineSteps grid steps before the running best of
/// each objective is kept, so the neighbourhood of the coarse maximum can be
/// re-integrated later without repeating the whole trajectory.
class QfiScan {
 public:
  QfiScan(const ProbeSpec& probe, const SimParams& params, const QfiConfig& qfi, const IntegratorConfig& integrator);

  const Support& support() const { return *support_; }
  const SimParams& params() const { return params_; }

  /// Integrates over `times` (dimensionless gt). When `keep` is non-null the
  /// pair snapshots are stored there as well.
  QfiSeries run(std::span<const double> times, PairTrajectory* keep = nullptr);
  /// Same as run() but reads the pair states from stored snapshots.
  QfiSeries replay(const PairTrajectory& pair);

  /// Grid bracket [t_{k-2}, t_{k+2}] around the coarse argmax of the
  /// objective from the last run, clipped to the grid.
  std::optional<std::pair<double, double>> bracket(Objective objective) const;
  /// Objective at time t inside bracket(), re-integrated from the checkpoint.
  double evaluate(Objective objective, double t) const;

 private:
  struct Checkpoint {
    bool valid = false;
    double time = 0.0;
    Eigen::VectorXcd plus;
    Eigen::VectorXcd minus;
    double lo = 0.0;
    double hi = 0.0;
    double best = 0.0;
    std::size_t index = 0;
  };

  void reset();
  double consume(std::size_t index, double t, const Eigen::Ref<const Eigen::VectorXcd>& plus,
                 const Eigen::Ref<const Eigen::VectorXcd>& minus, std::span<const double> times);
  QfiSeries make_series(std::span<const double> times) const;

  ProbeSpec probe_;
  SimParams params_;     // as given by the caller
  QfiConfig qfi_;
  IntegratorConfig integrator_;
  std::shared_ptr<const Support> support_;
  Eigen::VectorXcd initial_;
  std::unique_ptr<SuperOp> rhs_plus_;
  std::unique_ptr<SuperOp> rhs_minus_;

  struct Sample {
    double time = 0.0;
    Eigen::VectorXcd plus;
    Eigen::VectorXcd minus;
  };
  // the last kRefineSteps samples, oldest first; the oldest becomes the
  // checkpoint when the current sample is a new best
  std::vector<Sample> history_;
  std::array<Checkpoint, 2> checkpoints_;
  std::vector<double> f_scaled_;
};

}  // namespace permqfi
