#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "permqfi/error.hpp"
#include "permqfi/evolution.hpp"
#include "permqfi/fisher.hpp"
#include "permqfi/probes.hpp"

using namespace permqfi;

namespace {

double excited_population_n1(const DensityState& s) {
  double p = 0.0;
  for (int l = 0; l <= 1; ++l) p += s.at({{1, 1, 1}, l, l}).real();
  return p;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("permqfi_" + name + "_" + std::to_string(::getpid()));
}

}  // namespace

TEST(Dop853, ExponentialDecay) {
  Dop853 solver([](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& d) { d = -0.7 * y; }, IntegratorConfig{});
  Eigen::VectorXcd y(1);
  y[0] = 1.0;
  const std::vector<double> times = {0.0, 0.5, 1.0, 4.0};
  std::vector<double> seen;
  solver.integrate(0.0, y, times, [&](std::size_t i, double t, const Eigen::VectorXcd& s) {
    EXPECT_EQ(t, times[i]);
    EXPECT_NEAR(s[0].real(), std::exp(-0.7 * t), 1e-11);
    seen.push_back(t);
  });
  EXPECT_EQ(seen, times);
  EXPECT_GT(solver.stats().accepted, 0U);
}

TEST(Dop853, HarmonicOscillatorLongRun) {
  // y = exp(i w t) on a complex scalar
  const double w = 3.0;
  Dop853 solver([w](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& d) { d = Complex(0.0, w) * y; },
                IntegratorConfig{});
  Eigen::VectorXcd y(1);
  y[0] = 1.0;
  const std::vector<double> times = {10.0, 20.0};
  solver.integrate(0.0, y, times, [&](std::size_t, double t, const Eigen::VectorXcd& s) {
    EXPECT_NEAR(std::abs(s[0] - std::exp(Complex(0.0, w * t))), 0.0, 1e-8);
  });
}

TEST(Dop853, RejectsBadGrids) {
  Dop853 solver([](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& d) { d = y; }, IntegratorConfig{});
  Eigen::VectorXcd y = Eigen::VectorXcd::Ones(1);
  const std::vector<double> decreasing = {1.0, 0.5};
  EXPECT_THROW(solver.integrate(0.0, y, decreasing, [](std::size_t, double, const Eigen::VectorXcd&) {}),
               InvalidArgument);
  const std::vector<double> before_start = {-1.0};
  EXPECT_THROW(solver.integrate(0.0, y, before_start, [](std::size_t, double, const Eigen::VectorXcd&) {}),
               InvalidArgument);
}

TEST(Dop853, NonFiniteStateIsReported) {
  Dop853 solver([](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& d) { d = y.cwiseProduct(y); },
                IntegratorConfig{});
  Eigen::VectorXcd y = Eigen::VectorXcd::Ones(1);
  const std::vector<double> times = {5.0};  // blows up at t = 1
  EXPECT_THROW(solver.integrate(0.0, y, times, [](std::size_t, double, const Eigen::VectorXcd&) {}), NumericalError);
}

TEST(IntegratorConfig, Validation) {
  IntegratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.rtol = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Evolve, ZeroFieldKeepsStateExactly) {
  SimParams p;
  p.num_qubits = 3;
  p.g = 0.0;
  const DensityState rho0 = x_polarized_state(3);
  const SuperOp rhs = assemble_rhs(p, rho0.shared_support());
  const std::vector<double> times = {0.0, 1.0, 5.0};
  const Trajectory tr = evolve(rho0, rhs, times, IntegratorConfig{});
  for (const DensityState& s : tr.snapshots) EXPECT_EQ(s.values(), rho0.values());
}

TEST(Evolve, SingleQubitRabi) {
  SimParams p;
  p.num_qubits = 1;
  const DensityState rho0 = dicke_state(1, 1);
  const std::vector<double> times = {0.5, 1.0, 2.0};
  const Trajectory tr = evolve(rho0, assemble_rhs(p, rho0.shared_support()), times, IntegratorConfig{});
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double c = std::cos(times[i]);
    EXPECT_NEAR(excited_population_n1(tr.snapshots[i]), c * c, 1e-8);
  }
}

TEST(Evolve, SingleQubitAmplitudeDamping) {
  SimParams p;
  p.num_qubits = 1;
  p.g = 0.0;
  p.gamma = 0.8;
  const DensityState rho0 = dicke_state(1, 1);
  const std::vector<double> times = {0.5, 1.0, 2.0, 5.0};
  const Trajectory tr = evolve(rho0, assemble_rhs(p, rho0.shared_support()), times, IntegratorConfig{});
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_NEAR(excited_population_n1(tr.snapshots[i]), std::exp(-0.8 * times[i]), 1e-8);
  }
}

TEST(Evolve, ClosedSystemKeepsPurityAndTrace) {
  SimParams p;
  p.num_qubits = 4;
  for (const ProbeSpec& probe : {ProbeSpec::dicke(2), ProbeSpec::x_polarized(), ProbeSpec::ghz()}) {
    const DensityState rho0 = make_probe(probe, 4);
    const auto times = uniform_grid(20.0, 40);
    const Trajectory tr = evolve(rho0, assemble_rhs(p, rho0.shared_support()), times, IntegratorConfig{});
    for (const DensityState& s : tr.snapshots) {
      EXPECT_NEAR(s.purity(), 1.0, 1e-8) << probe.name();
      EXPECT_NEAR(std::abs(s.trace() - 1.0), 0.0, 1e-8) << probe.name();
    }
  }
}

TEST(Evolve, OpenSystemStaysPhysical) {
  SimParams p;
  p.num_qubits = 5;
  p.kappa = 0.2;
  p.gamma = 0.6;
  const DensityState rho0 = x_polarized_state(5);
  const auto times = uniform_grid(20.0, 40);
  const Trajectory tr = evolve(rho0, assemble_rhs(p, rho0.shared_support()), times, IntegratorConfig{});
  for (const DensityState& s : tr.snapshots) {
    EXPECT_LT(std::abs(s.trace() - 1.0), 1e-8);
    EXPECT_LT(s.hermiticity_residual(), 1e-10);
    EXPECT_GT(s.min_block_eigenvalue(), -1e-8);
  }
  // local decay moves population through the J = 3/2 sector on the way to the ground state
  double lower_sector = 0.0;
  for (const DensityState& s : tr.snapshots) {
    double pop = 0.0;
    for (int two_m = -3; two_m <= 3; two_m += 2) {
      for (int l = 0; l <= 5; ++l) pop += s.at({{3, two_m, two_m}, l, l}).real();
    }
    lower_sector = std::max(lower_sector, pop);
  }
  EXPECT_GT(lower_sector, 1e-2);
}

TEST(Evolve, BosonCutoffIsNeverReached) {
  SimParams p;
  p.num_qubits = 4;
  const DensityState rho0 = dicke_state(4, 4);
  const auto times = uniform_grid(10.0, 20);
  const Trajectory tr = evolve(rho0, assemble_rhs(p, rho0.shared_support()), times, IntegratorConfig{});
  // with four excitations the l = 4 level is reachable only with every qubit in the ground
  // state, and nothing can go above it
  for (const DensityState& s : tr.snapshots) {
    for (std::size_t q = 0; q < s.support().size(); ++q) {
      const Component c = s.layout().component(s.support().flat(q));
      EXPECT_LE(s.layout().left_excitations(c), 4);
    }
  }
}

TEST(DimensionlessRescale, Examples) {
  SimParams p;
  p.num_qubits = 2;
  p.g = 2.0;
  p.kappa = 0.4;
  p.gamma = 1.2;
  const SimParams r = dimensionless_rescale(p);
  EXPECT_DOUBLE_EQ(r.g, 1.0);
  EXPECT_DOUBLE_EQ(r.kappa, 0.2);
  EXPECT_DOUBLE_EQ(r.gamma, 0.6);

  SimParams unit;
  unit.num_qubits = 3;
  unit.kappa = 0.3;
  unit.gamma = 0.7;
  const SimParams same = dimensionless_rescale(unit);
  EXPECT_EQ(same.kappa, 0.3);
  EXPECT_EQ(same.gamma, 0.7);

  p.g = 0.0;
  EXPECT_THROW(dimensionless_rescale(p), InvalidArgument);
}

TEST(DimensionlessRescale, QfiTimesGSquaredIsInvariant) {
  // F at (g=2, t=1) from a run in physical units, against the unit-coupling run at gt=2
  SimParams phys;
  phys.num_qubits = 3;
  phys.g = 2.0;
  phys.kappa = 0.4;
  phys.gamma = 1.2;
  const QfiConfig qcfg;
  const DensityState rho0 = dicke_state(3, 1);
  SimParams plus = phys, minus = phys;
  plus.g += 0.5 * qcfg.delta;
  minus.g -= 0.5 * qcfg.delta;
  const SuperOp rp = assemble_rhs(plus, rho0.shared_support());
  const SuperOp rm = assemble_rhs(minus, rho0.shared_support());
  double f_phys = 0.0;
  const double t_phys[] = {1.0};
  evolve_pair(rho0.values(), rho0.values(), rp, rm, 0.0, t_phys, IntegratorConfig{},
              [&](const PairSample& s) { f_phys = qfi_at(rho0.support(), s.plus, s.minus, qcfg); });

  // the dimensionless run uses delta/g so both difference the same physical states
  QfiConfig scaled = qcfg;
  scaled.delta = qcfg.delta / phys.g;
  const double gt[] = {2.0};
  const QfiSeries series = qfi_series(ProbeSpec::dicke(1), phys, gt, scaled);
  EXPECT_NEAR(f_phys * 4.0 / series.f_scaled[0], 1.0, 1e-6);
  EXPECT_NEAR(series.f[0], f_phys, 1e-6 * f_phys);
}

TEST(TrajectoryIo, RoundTrip) {
  SimParams p;
  p.num_qubits = 3;
  p.kappa = 0.2;
  const DensityState rho0 = ghz_state(3);
  const auto times = uniform_grid(2.0, 4);
  const Trajectory a = evolve(rho0, assemble_rhs(p, rho0.shared_support()), times, IntegratorConfig{});
  PairTrajectory pair{1e-3, a, a};
  const auto path = temp_path("pair");
  write_pair_trajectory(path, pair);
  const PairTrajectory back = read_pair_trajectory(path);
  EXPECT_EQ(back.delta, 1e-3);
  EXPECT_EQ(back.plus.times, times);
  ASSERT_EQ(back.minus.snapshots.size(), times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_EQ(back.plus.snapshots[i].values(), a.snapshots[i].values());
    EXPECT_EQ(back.plus.snapshots[i].support().flat_indices(), rho0.support().flat_indices());
  }
  std::filesystem::remove(path);
}

TEST(TrajectoryIo, RejectsForeignAndTruncatedFiles) {
  const auto path = temp_path("bad");
  {
    std::ofstream os(path, std::ios::binary);
    os << "not a trajectory";
  }
  EXPECT_THROW(read_pair_trajectory(path), IoError);

  SimParams p;
  p.num_qubits = 2;
  const DensityState rho0 = dicke_state(2, 1);
  const double t[] = {0.0, 1.0};
  const Trajectory a = evolve(rho0, assemble_rhs(p, rho0.shared_support()), t, IntegratorConfig{});
  write_pair_trajectory(path, PairTrajectory{1e-3, a, a});
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(read_pair_trajectory(path), IoError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_pair_trajectory(path), IoError);
}
