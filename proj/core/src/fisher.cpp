#include "permqfi/fisher.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "permqfi/error.hpp"
#include "permqfi/qfi_scan.hpp"

#ifndef PERMQFI_VERSION
#define PERMQFI_VERSION "unknown"
#endif

namespace permqfi {

void QfiConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("finite-difference step must be positive");
  if (!(err_multiplier >= 0.0)) throw InvalidArgument("error multiplier must be non-negative");
  if (!(pair_floor >= 0.0)) throw InvalidArgument("pair floor must be non-negative");
}

double qfi_from_blocks(std::span<const QfiBlock> blocks, const QfiConfig& config) {
  struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
  };
  std::vector<Spectrum> spectra;
  spectra.reserve(blocks.size());
  double lowest = std::numeric_limits<double>::infinity();
  for (const QfiBlock& block : blocks) {
    if (block.mean.rows() != block.mean.cols() || block.derivative.rows() != block.mean.rows() ||
        block.derivative.cols() != block.mean.cols()) {
      throw InvalidArgument("QFI block shapes do not match");
    }
    if (!(block.copies > 0.0)) throw InvalidArgument("block copy count must be positive");
    const Eigen::MatrixXcd hermitian = 0.5 * (block.mean + block.mean.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian);
    if (solver.info() != Eigen::Success || !solver.eigenvalues().allFinite()) {
      throw NumericalError("eigendecomposition of the mean state failed");
    }
    Spectrum s{solver.eigenvalues() / block.copies, solver.eigenvectors()};
    if (s.values.size() > 0) lowest = std::min(lowest, s.values.minCoeff());
    spectra.push_back(std::move(s));
  }
  if (spectra.empty()) return 0.0;

  const double eps_err = lowest < 0.0 ? -lowest : 0.0;
  const double cutoff = config.err_multiplier * eps_err;

  double total = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Spectrum& s = spectra[b];
    for (Eigen::Index a = 0; a < s.values.size(); ++a) {
      if (s.values[a] < cutoff) s.values[a] = 0.0;
    }
    const Eigen::MatrixXcd d = 0.5 * (blocks[b].derivative + blocks[b].derivative.adjoint());
    const Eigen::MatrixXcd w = s.vectors.adjoint() * d * s.vectors;
    // per-copy terms are |w/c|^2 / ((la+lb)/c); summing c copies leaves |w|^2 / (c (la+lb))
    double sum = 0.0;
    for (Eigen::Index col = 0; col < w.cols(); ++col) {
      for (Eigen::Index row = 0; row < w.rows(); ++row) {
        const double denom = s.values[row] + s.values[col];
        if (denom > config.pair_floor) sum += std::norm(w(row, col)) / denom;
      }
    }
    total += 2.0 * sum / blocks[b].copies;
  }
  if (!std::isfinite(total)) throw NumericalError("QFI evaluation produced a non-finite value");
  return total;
}

double qfi_at(const Support& support, const Eigen::Ref<const Eigen::VectorXcd>& plus,
              const Eigen::Ref<const Eigen::VectorXcd>& minus, const QfiConfig& config) {
  const auto n = static_cast<Eigen::Index>(support.size());
  if (plus.size() != n || minus.size() != n) throw InvalidArgument("state vectors do not match the support");
  const SectorWeights weights(support.layout().num_qubits());
  std::vector<QfiBlock> blocks;
  blocks.reserve(support.blocks().size());
  for (const CoherenceBlock& cb : support.blocks()) {
    const auto dim = static_cast<Eigen::Index>(cb.dim);
    QfiBlock qb{Eigen::MatrixXcd::Zero(dim, dim), Eigen::MatrixXcd::Zero(dim, dim),
                static_cast<double>(weights.degeneracy(cb.two_j))};
    for (const auto& e : cb.entries) {
      const Complex p = plus[e.position];
      const Complex m = minus[e.position];
      qb.mean(e.row, e.col) = 0.5 * (p + m);
      qb.derivative(e.row, e.col) = (p - m) / config.delta;
    }
    blocks.push_back(std::move(qb));
  }
  return qfi_from_blocks(blocks, config);
}

double qfi_at(const DensityState& plus, const DensityState& minus, const QfiConfig& config) {
  if (plus.shared_support() != minus.shared_support() &&
      plus.support().flat_indices() != minus.support().flat_indices()) {
    throw InvalidArgument("QFI pair states live on different supports");
  }
  return qfi_at(plus.support(), plus.values(), minus.values(), config);
}

void QfiSeries::finalize() {
  const double g2 = params.g * params.g;
  f.resize(times.size());
  f_over_t.resize(times.size());
  peak_index = 0;
  peak_value = f_scaled.empty() ? 0.0 : f_scaled.front();
  for (std::size_t i = 0; i < times.size(); ++i) {
    f[i] = f_scaled[i] / g2;
    f_over_t[i] = times[i] > 0.0 ? f_scaled[i] / times[i] : 0.0;
    if (f_scaled[i] > peak_value) {
      peak_value = f_scaled[i];
      peak_index = i;
    }
  }
  peak_time = times.empty() ? 0.0 : times[peak_index];
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string QfiSeries::to_csv() const {
  std::string out = "gt,F,F_g2,F_over_t\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out += format_double(times[i]);
    out += ',';
    out += format_double(f[i]);
    out += ',';
    out += format_double(f_scaled[i]);
    out += ',';
    out += format_double(f_over_t[i]);
    out += '\n';
  }
  return out;
}

std::string QfiSeries::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = version_string();
  j["probe"] = probe.name();
  j["params"] = {{"N", params.num_qubits},    {"g", params.g},           {"kappa", params.kappa},
                 {"gamma", params.gamma},     {"omega_q", params.omega_q}, {"omega_c", params.omega_c}};
  j["qfi"] = {{"delta", qfi.delta}, {"err_multiplier", qfi.err_multiplier}, {"pair_floor", qfi.pair_floor}};
  j["integrator"] = {{"rtol", integrator.rtol}, {"atol", integrator.atol}};
  j["peak"] = {{"index", peak_index}, {"gt", peak_time}, {"F_g2", peak_value}};
  j["gt"] = times;
  j["F"] = f;
  j["F_g2"] = f_scaled;
  j["F_over_t"] = f_over_t;
  return j.dump(2);
}

QfiSeries qfi_series(const ProbeSpec& probe, const SimParams& params, std::span<const double> times,
                     const QfiConfig& qfi, const IntegratorConfig& integrator) {
  QfiScan scan(probe, params, qfi, integrator);
  return scan.run(times);
}

std::vector<double> uniform_grid(double t_max, std::size_t intervals) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be positive");
  if (intervals == 0) throw InvalidArgument("time grid needs at least one interval");
  std::vector<double> grid(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    grid[i] = t_max * static_cast<double>(i) / static_cast<double>(intervals);
  }
  return grid;
}

const char* version_string() { return PERMQFI_VERSION; }

}  // namespace permqfi
