#include "permqfi/oracle_check.hpp"

#include <algorithm>
#include <cmath>

#include "permqfi/evolution.hpp"
#include "permqfi/oracle.hpp"
#include "permqfi/probes.hpp"
#include "permqfi/qfi_scan.hpp"

namespace permqfi::oracle {

namespace {

std::string case_label(const std::string& probe, int n, double kappa, double gamma) {
  return probe + " N=" + std::to_string(n) + " kappa=" + format_double(kappa) + " gamma=" + format_double(gamma);
}

void record(SuiteResult& s, double deviation, const std::string& label) {
  ++s.cases;
  if (deviation > s.max_deviation || s.worst_case.empty()) {
    s.max_deviation = std::max(s.max_deviation, deviation);
    s.worst_case = label;
  }
}

}  // namespace

std::vector<ProbeSpec> check_probes(int num_qubits) {
  std::vector<ProbeSpec> out;
  for (const ProbeSpec& p : {ProbeSpec::dicke(1), ProbeSpec::dicke(num_qubits / 2), ProbeSpec::x_polarized(),
                             ProbeSpec::ghz()}) {
    if (p.valid_for(num_qubits) && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

std::vector<SuiteResult> run_checks(const CheckOptions& options) {
  SuiteResult rhs{"rhs", 0.0, 1e-10, 0, ""};
  SuiteResult qfi{"qfi", 0.0, 1e-6, 0, ""};
  SuiteResult round{"round-trip", 0.0, 1e-12, 0, ""};
  SuiteResult trace{"trace", 0.0, 1e-8, 0, ""};
  SuiteResult herm{"hermiticity", 0.0, 1e-10, 0, ""};
  SuiteResult pos{"positivity", 0.0, 1e-8, 0, ""};

  for (int n : options.n_values) {
    const auto full_support = Support::full(build_layout(n));
    for (std::size_t r = 0; r < options.random_states; ++r) {
      const DensityState rho = random_symmetric_state(n, 1000 * static_cast<std::uint64_t>(n) + r);
      const FullState expanded = expand(rho);
      record(round, (symmetrize(expanded).values() - rho.values()).cwiseAbs().maxCoeff(),
             "N=" + std::to_string(n) + " state " + std::to_string(r));
      for (double kappa : options.kappa) {
        for (double gamma : options.gamma) {
          SimParams p;
          p.num_qubits = n;
          p.kappa = kappa;
          p.gamma = gamma;
          const DensityState sym = assemble_rhs(p, full_support).apply(rho);
          const DensityState ref = symmetrize({n, FullRhs(p).apply(expanded.rho)});
          record(rhs, (sym.values() - ref.values()).cwiseAbs().maxCoeff(), case_label("random", n, kappa, gamma));
        }
      }
    }

    for (const ProbeSpec& probe : check_probes(n)) {
      for (double kappa : options.kappa) {
        for (double gamma : options.gamma) {
          SimParams p;
          p.num_qubits = n;
          p.kappa = kappa;
          p.gamma = gamma;
          const std::string label = case_label(probe.name(), n, kappa, gamma);

          QfiScan scan(probe, p, options.qfi, options.integrator);
          PairTrajectory pair;
          const QfiSeries sym = scan.run(options.times, &pair);
          const std::vector<double> full =
              full_qfi_series(probe, p, options.times, options.qfi, options.integrator);
          double worst = 0.0;
          for (std::size_t i = 0; i < full.size(); ++i) {
            if (!(std::abs(full[i]) > options.qfi_floor)) continue;
            worst = std::max(worst, std::abs(sym.f_scaled[i] - full[i]) / std::abs(full[i]));
          }
          record(qfi, worst, label);

          double drift = 0.0, residual = 0.0, lowest = 0.0;
          for (const Trajectory* t : {&pair.plus, &pair.minus}) {
            for (const DensityState& s : t->snapshots) {
              drift = std::max(drift, std::abs(s.trace() - 1.0));
              residual = std::max(residual, s.hermiticity_residual());
              lowest = std::min(lowest, s.min_block_eigenvalue());
            }
          }
          record(trace, drift, label);
          record(herm, residual, label);
          record(pos, -lowest, label);
          if (options.progress) options.progress(label + " max rel QFI diff " + format_double(worst));
        }
      }
    }
  }
  return {rhs, qfi, round, trace, herm, pos};
}

}  // namespace permqfi::oracle
