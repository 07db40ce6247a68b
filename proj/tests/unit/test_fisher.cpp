#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "permqfi/error.hpp"
#include "permqfi/fisher.hpp"
#include "permqfi/metrology.hpp"
#include "permqfi/oracle.hpp"

using namespace permqfi;

namespace {

Eigen::MatrixXcd random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) a(r, c) = Complex(d(rng), d(rng));
  }
  return 0.5 * (a + a.adjoint());
}

// Pure-state QFI 4(<dpsi|dpsi> - |<psi|dpsi>|^2) of a state with density rank one.
double pure_qfi(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& dpsi) {
  return 4.0 * (dpsi.squaredNorm() - std::norm(psi.dot(dpsi)));
}

}  // namespace

TEST(QfiFromBlocks, PureStateFormula) {
  // rho = |psi><psi| with d rho = |dpsi><psi| + |psi><dpsi| and <psi|dpsi> imaginary
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  Eigen::VectorXcd psi(4), dpsi(4);
  for (int i = 0; i < 4; ++i) {
    psi[i] = Complex(d(rng), d(rng));
    dpsi[i] = Complex(d(rng), d(rng));
  }
  psi.normalize();
  dpsi -= psi.dot(dpsi).real() * psi;  // keep the norm fixed to first order
  const QfiBlock block{psi * psi.adjoint(), dpsi * psi.adjoint() + psi * dpsi.adjoint(), 1.0};
  const double f = qfi_from_blocks(std::span<const QfiBlock>(&block, 1), QfiConfig{});
  EXPECT_NEAR(f, pure_qfi(psi, dpsi), 1e-10 * f);
}

TEST(QfiFromBlocks, CopiesMatchExplicitExpansion) {
  // one block standing for three copies equals a 3x larger block-diagonal matrix
  std::mt19937_64 rng(9);
  const Eigen::MatrixXcd a = random_hermitian(3, rng);
  Eigen::MatrixXcd mean = a * a.adjoint();
  mean /= mean.trace().real();
  const Eigen::MatrixXcd deriv = random_hermitian(3, rng);

  const QfiBlock summed{mean, deriv, 3.0};
  Eigen::MatrixXcd big_mean = Eigen::MatrixXcd::Zero(9, 9);
  Eigen::MatrixXcd big_deriv = Eigen::MatrixXcd::Zero(9, 9);
  for (int c = 0; c < 3; ++c) {
    big_mean.block(3 * c, 3 * c, 3, 3) = mean / 3.0;
    big_deriv.block(3 * c, 3 * c, 3, 3) = deriv / 3.0;
  }
  const QfiBlock expanded{big_mean, big_deriv, 1.0};
  const double f1 = qfi_from_blocks(std::span<const QfiBlock>(&summed, 1), QfiConfig{});
  const double f2 = qfi_from_blocks(std::span<const QfiBlock>(&expanded, 1), QfiConfig{});
  EXPECT_NEAR(f1, f2, 1e-12 * f2);
}

TEST(QfiFromBlocks, ThresholdsDropNoiseEigenvalues) {
  // eigenvalues {0.6, 0.4, -1e-12, 5e-12}: eps_err = 1e-12, so 5e-12 < 10 eps is zeroed
  Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(4, 4);
  mean.diagonal() << 0.6, 0.4, -1e-12, 5e-12;
  Eigen::MatrixXcd deriv = Eigen::MatrixXcd::Zero(4, 4);
  deriv(0, 1) = deriv(1, 0) = 0.3;
  deriv(2, 3) = deriv(3, 2) = 1.0;  // only couples the two noise levels
  deriv(0, 3) = deriv(3, 0) = 0.2;  // couples a real level to a noise level
  const QfiBlock block{mean, deriv, 1.0};
  const double f = qfi_from_blocks(std::span<const QfiBlock>(&block, 1), QfiConfig{});
  const double expected = 2.0 * (2.0 * 0.09 / 1.0 + 2.0 * 0.04 / 0.6);
  EXPECT_NEAR(f, expected, 1e-12);

  // with the stabilisation off, the noise pair dominates
  QfiConfig raw;
  raw.err_multiplier = 0.0;
  raw.pair_floor = 0.0;
  EXPECT_GT(qfi_from_blocks(std::span<const QfiBlock>(&block, 1), raw), 1e10);
}

TEST(QfiFromBlocks, NoNegativeEigenvaluesMeansNoThreshold) {
  Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(2, 2);
  mean.diagonal() << 1.0 - 1e-7, 1e-7;
  Eigen::MatrixXcd deriv = Eigen::MatrixXcd::Zero(2, 2);
  deriv(0, 1) = deriv(1, 0) = 1.0;
  const QfiBlock block{mean, deriv, 1.0};
  EXPECT_NEAR(qfi_from_blocks(std::span<const QfiBlock>(&block, 1), QfiConfig{}), 4.0, 1e-12);
}

TEST(QfiFromBlocks, RejectsShapeMismatch) {
  const QfiBlock block{Eigen::MatrixXcd::Identity(2, 2), Eigen::MatrixXcd::Zero(3, 3), 1.0};
  EXPECT_THROW(qfi_from_blocks(std::span<const QfiBlock>(&block, 1), QfiConfig{}), InvalidArgument);
}

TEST(QfiAt, ZeroForIdenticalStates) {
  const DensityState s = x_polarized_state(4);
  EXPECT_EQ(qfi_at(s, s, QfiConfig{}), 0.0);
}

TEST(QfiAt, BlockEigensystemReconstructs) {
  SimParams p;
  p.num_qubits = 4;
  p.kappa = 0.2;
  p.gamma = 0.6;
  const DensityState rho0 = x_polarized_state(4);
  const double t[] = {3.0};
  const Trajectory tr = evolve(rho0, assemble_rhs(p, rho0.shared_support()), t, IntegratorConfig{});
  const DensityState& s = tr.snapshots.back();
  for (std::size_t b = 0; b < s.support().blocks().size(); ++b) {
    const Eigen::MatrixXcd m = s.block_matrix(b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    const Eigen::MatrixXcd back =
        solver.eigenvectors() * solver.eigenvalues().asDiagonal() * solver.eigenvectors().adjoint();
    EXPECT_LT((back - m).cwiseAbs().maxCoeff(), 1e-10);
  }
  // blocks tile the support exactly once
  std::size_t covered = 0;
  for (const auto& b : s.support().blocks()) covered += b.entries.size();
  EXPECT_EQ(covered, s.support().size());
}

TEST(QfiSeries, RabiWithSmallStepIsFourTSquared) {
  SimParams p;
  p.num_qubits = 1;
  QfiConfig q;
  q.delta = 1e-4;
  const std::vector<double> t = {0.0, 0.5, 1.0, 2.0};
  const QfiSeries s = qfi_series(ProbeSpec::dicke(1), p, t, q);
  EXPECT_EQ(s.f_scaled[0], 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(s.f_scaled[i] / (4 * t[i] * t[i]), 1.0, 1e-6);
}

TEST(QfiSeries, RabiCentralDifferenceClosedForm) {
  // the g +/- delta/2 pure states give exactly 4 sin^2(delta t) / delta^2
  SimParams p;
  p.num_qubits = 1;
  const QfiConfig q;  // delta = 1e-3
  const std::vector<double> t = {0.5, 1.0, 2.0, 3.0};
  const QfiSeries s = qfi_series(ProbeSpec::dicke(1), p, t, q);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double sn = std::sin(q.delta * t[i]);
    EXPECT_NEAR(s.f_scaled[i] / (4 * sn * sn / (q.delta * q.delta)), 1.0, 1e-8);
  }
}

TEST(QfiSeries, ClosedSystemGrowsQuadraticallyEarly) {
  SimParams p;
  p.num_qubits = 4;
  for (const ProbeSpec& probe : {ProbeSpec::dicke(1), ProbeSpec::x_polarized(), ProbeSpec::ghz()}) {
    const auto t = uniform_grid(1.0, 10);
    const QfiSeries s = qfi_series(probe, p, t);
    for (std::size_t i = 1; i < t.size(); ++i) {
      EXPECT_GT(s.f_scaled[i], 0.0) << probe.name();
      EXPECT_GE(s.f_scaled[i], s.f_scaled[i - 1]) << probe.name();
    }
  }
}

TEST(QfiSeries, MatchesOracleAtPeak) {
  SimParams p;
  p.num_qubits = 2;
  p.kappa = 0.2;
  p.gamma = 0.6;
  const auto t = uniform_grid(20.0, 400);
  const QfiSeries sym = qfi_series(ProbeSpec::dicke(1), p, t);
  const double at[] = {sym.peak_time};
  const auto full = oracle::full_qfi_series(ProbeSpec::dicke(1), p, at);
  EXPECT_GT(sym.peak_index, 0U);
  EXPECT_LT(sym.peak_index + 1, t.size());
  EXPECT_NEAR(full[0] / sym.peak_value, 1.0, 1e-6);
}

TEST(QfiSeries, GhzSeriesHaveInteriorPeaks) {
  SimParams p;
  p.kappa = 0.2;
  p.gamma = 0.6;
  for (int n : {2, 4}) {
    p.num_qubits = n;
    const QfiSeries s = qfi_series(ProbeSpec::ghz(), p, uniform_grid(20.0, 400));
    for (double v : s.f_scaled) EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(s.peak_time, 0.0);
    EXPECT_LT(s.peak_time, 20.0);
  }
}

TEST(QfiSeries, NonNegativeEverywhere) {
  SimParams p;
  p.num_qubits = 5;
  p.kappa = 1.0;
  p.gamma = 0.2;
  const QfiSeries s = qfi_series(ProbeSpec::x_polarized(), p, uniform_grid(20.0, 100));
  for (double v : s.f_scaled) EXPECT_GE(v, -1e-10);
}

TEST(QfiSeries, StepAndToleranceRobustness) {
  SimParams p;
  p.num_qubits = 5;
  p.kappa = 0.2;
  p.gamma = 0.6;
  PipelineOptions opt;
  const PeakResult base = analyze_probe(ProbeSpec::dicke(2), p, opt).peak(Objective::Qfi);
  ASSERT_FALSE(base.at_boundary);

  PipelineOptions half_delta = opt;
  half_delta.qfi.delta *= 0.5;
  const double f_delta = analyze_probe(ProbeSpec::dicke(2), p, half_delta).peak(Objective::Qfi).peak_value;
  EXPECT_LT(std::abs(f_delta / base.peak_value - 1.0), 1e-3);

  PipelineOptions tight = opt;
  tight.integrator.rtol *= 0.5;
  tight.integrator.atol *= 0.5;
  const double f_tight = analyze_probe(ProbeSpec::dicke(2), p, tight).peak(Objective::Qfi).peak_value;
  EXPECT_LT(std::abs(f_tight / base.peak_value - 1.0), 1e-6);
}

TEST(QfiSeries, PhysicalAndScaledColumns) {
  SimParams p;
  p.num_qubits = 2;
  p.g = 2.0;
  p.kappa = 0.4;
  const std::vector<double> t = {0.0, 1.0, 2.0};
  const QfiSeries s = qfi_series(ProbeSpec::dicke(1), p, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_DOUBLE_EQ(s.f[i], s.f_scaled[i] / 4.0);
  EXPECT_EQ(s.f_over_t[0], 0.0);
  EXPECT_DOUBLE_EQ(s.f_over_t[2], s.f_scaled[2] / 2.0);
}

TEST(QfiSeries, CsvAndJson) {
  SimParams p;
  p.num_qubits = 2;
  const std::vector<double> t = {0.0, 0.5};
  const QfiSeries s = qfi_series(ProbeSpec::dicke(1), p, t);
  const std::string csv = s.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "gt,F,F_g2,F_over_t");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("\n0,0,0,0\n"), std::string::npos);

  const auto j = nlohmann::json::parse(s.to_json());
  EXPECT_EQ(j["probe"], "dicke-1");
  EXPECT_EQ(j["params"]["N"], 2);
  EXPECT_EQ(j["qfi"]["delta"], 1e-3);
  EXPECT_EQ(j["F_g2"].size(), 2U);
  EXPECT_EQ(j["version"], version_string());
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.2), "0.2");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(UniformGrid, Layout) {
  const auto g = uniform_grid(20.0, 400);
  ASSERT_EQ(g.size(), 401U);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 20.0);
  EXPECT_DOUBLE_EQ(g[1], 0.05);
  EXPECT_THROW(uniform_grid(0.0, 10), InvalidArgument);
  EXPECT_THROW(uniform_grid(1.0, 0), InvalidArgument);
}
