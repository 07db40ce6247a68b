#include "permqfi/probes.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "permqfi/error.hpp"

namespace permqfi {

namespace {

// Pure state sum_m c_m |N/2, m> (x) |0>; amplitudes indexed by m = N/2 - idx.
DensityState pure_symmetric_state(int num_qubits, const std::vector<double>& amplitude) {
  auto layout = build_layout(num_qubits);
  const int two_j = num_qubits;
  std::vector<std::size_t> seeds;
  std::vector<std::pair<Component, Complex>> entries;
  for (std::size_t a = 0; a < amplitude.size(); ++a) {
    if (amplitude[a] == 0.0) continue;
    for (std::size_t b = 0; b < amplitude.size(); ++b) {
      if (amplitude[b] == 0.0) continue;
      const Component c{{two_j, two_j - 2 * static_cast<int>(a), two_j - 2 * static_cast<int>(b)}, 0, 0};
      seeds.push_back(layout->flat_index(c));
      entries.emplace_back(c, Complex(amplitude[a] * amplitude[b], 0.0));
    }
  }
  DensityState state = DensityState::zero(Support::excitation_closure(layout, seeds));
  for (const auto& [c, v] : entries) state.set(c, v);
  return state;
}

}  // namespace

ProbeSpec ProbeSpec::parse(std::string_view text) {
  if (text == "x-polarized" || text == "x") return x_polarized();
  if (text == "ghz") return ghz();
  constexpr std::string_view prefix = "dicke-";
  if (text.starts_with(prefix)) {
    const std::string_view digits = text.substr(prefix.size());
    int n = -1;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty() && n >= 0) return dicke(n);
  }
  throw InvalidArgument("unknown probe '" + std::string(text) + "' (expected dicke-<n>, x-polarized or ghz)");
}

std::string ProbeSpec::name() const {
  switch (kind) {
    case Kind::Dicke:
      return "dicke-" + std::to_string(excitations);
    case Kind::XPolarized:
      return "x-polarized";
    case Kind::Ghz:
      return "ghz";
  }
  return "unknown";
}

bool ProbeSpec::valid_for(int num_qubits) const {
  switch (kind) {
    case Kind::Dicke:
      return num_qubits >= 1 && excitations >= 0 && excitations <= num_qubits;
    case Kind::XPolarized:
      return num_qubits >= 1;
    case Kind::Ghz:
      return num_qubits >= 2;
  }
  return false;
}

DensityState dicke_state(int num_qubits, int excitations) {
  if (num_qubits < 1) throw InvalidArgument("N must be at least 1");
  if (excitations < 0 || excitations > num_qubits) {
    throw InvalidArgument("Dicke excitation number " + std::to_string(excitations) + " outside [0, " +
                          std::to_string(num_qubits) + "]");
  }
  std::vector<double> amp(static_cast<std::size_t>(num_qubits + 1), 0.0);
  amp[static_cast<std::size_t>(num_qubits - excitations)] = 1.0;
  return pure_symmetric_state(num_qubits, amp);
}

DensityState x_polarized_state(int num_qubits) {
  if (num_qubits < 1) throw InvalidArgument("N must be at least 1");
  // c_m^2 = C(N, N/2+m) / 2^N, evaluated in log space so large N stays finite
  std::vector<double> amp(static_cast<std::size_t>(num_qubits + 1));
  for (int idx = 0; idx <= num_qubits; ++idx) {
    const int up = num_qubits - idx;  // N/2 + m
    const double log_c = std::lgamma(num_qubits + 1.0) - std::lgamma(up + 1.0) - std::lgamma(num_qubits - up + 1.0) -
                         num_qubits * std::log(2.0);
    amp[static_cast<std::size_t>(idx)] = std::exp(0.5 * log_c);
  }
  return pure_symmetric_state(num_qubits, amp);
}

DensityState ghz_state(int num_qubits) {
  if (num_qubits < 2) throw InvalidArgument("GHZ probe needs N >= 2");
  std::vector<double> amp(static_cast<std::size_t>(num_qubits + 1), 0.0);
  amp.front() = amp.back() = 1.0 / std::sqrt(2.0);
  return pure_symmetric_state(num_qubits, amp);
}

DensityState make_probe(const ProbeSpec& probe, int num_qubits) {
  switch (probe.kind) {
    case ProbeSpec::Kind::Dicke:
      return dicke_state(num_qubits, probe.excitations);
    case ProbeSpec::Kind::XPolarized:
      return x_polarized_state(num_qubits);
    case ProbeSpec::Kind::Ghz:
      return ghz_state(num_qubits);
  }
  throw InvalidArgument("unknown probe kind");
}

}  // namespace permqfi
