#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "permqfi/fisher.hpp"
#include "permqfi/metrology.hpp"

namespace permqfi::oracle {

/// Outcome of one comparison suite: the worst deviation over all cases.
struct SuiteResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::size_t cases = 0;
  std::string worst_case;

  bool passed() const { return cases > 0 && max_deviation <= tolerance; }
};

struct CheckOptions {
  std::vector<int> n_values = {2, 3, 4};
  std::vector<double> kappa = {0.0, 0.2, 1.0};  // kappa/g
  std::vector<double> gamma = {0.0, 0.2, 1.0};  // gamma/g
  std::vector<double> times = uniform_grid(10.0, 49);
  QfiConfig qfi;
  // tighter than the production default: at 1e-10 integration noise, divided
  // by delta in the central difference, reaches the 1e-6 QFI tolerance
  IntegratorConfig integrator = [] {
    IntegratorConfig c;
    c.rtol = 1e-12;
    c.atol = 1e-12;
    return c;
  }();
  std::size_t random_states = 3;  // per N for the RHS and round-trip suites
  double qfi_floor = 1e-6;        // relative QFI error only where F g^2 exceeds this
  ProgressFn progress;
};

/// Probes compared for N: Dicke-1, Dicke-floor(N/2), X and GHZ (duplicates dropped).
std::vector<ProbeSpec> check_probes(int num_qubits);

/// Suites, in order:
///   rhs          max |L_sym(rho) - symmetrize(L_full(expand(rho)))| on random states
///   qfi          max relative F difference, symmetric vs full space, over probes x rates x grid
///   round-trip   max |symmetrize(expand(rho)) - rho| on random states
///   trace        max |tr rho - 1| along every symmetric g +/- delta/2 trajectory of the qfi suite
///   hermiticity  max Hermiticity residual along the same trajectories
///   positivity   minus the lowest stored block eigenvalue along the same trajectories
std::vector<SuiteResult> run_checks(const CheckOptions& options);

}  // namespace permqfi::oracle
