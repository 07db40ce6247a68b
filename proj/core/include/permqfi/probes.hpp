#pragma once

#include <string>
#include <string_view>

#include "permqfi/state.hpp"

namespace permqfi {

/// Initial probe family. All probes start with the resonator in vacuum.
struct ProbeSpec {
  enum class Kind { Dicke, XPolarized, Ghz };

  Kind kind = Kind::Dicke;
  int excitations = 1;  // Dicke only

  static ProbeSpec dicke(int n) { return {Kind::Dicke, n}; }
  static ProbeSpec x_polarized() { return {Kind::XPolarized, 0}; }
  static ProbeSpec ghz() { return {Kind::Ghz, 0}; }

  /// Accepts "dicke-<n>", "x-polarized" and "ghz".
  static ProbeSpec parse(std::string_view text);
  std::string name() const;

  /// Whether the probe can be built for N qubits.
  bool valid_for(int num_qubits) const;

  friend bool operator==(const ProbeSpec&, const ProbeSpec&) = default;
};

/// |J=N/2, m=n-N/2> (x) |0>.
DensityState dicke_state(int num_qubits, int excitations);
/// ((|0>+|1>)/sqrt2)^N (x) |0>, amplitudes sqrt(C(N, N/2+m) / 2^N).
DensityState x_polarized_state(int num_qubits);
/// (|N/2,N/2> + |N/2,-N/2>)/sqrt2 (x) |0>; needs N >= 2.
DensityState ghz_state(int num_qubits);

DensityState make_probe(const ProbeSpec& probe, int num_qubits);

}  // namespace permqfi
