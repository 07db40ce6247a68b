#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace permqfi {

/// Spin labels of one |J,n><J,m| matrix element. All three quantum numbers
/// are stored doubled so that half-integer values stay exact integers.
struct SpinTriple {
  int two_j = 0;
  int two_n = 0;  // bra-side projection (row)
  int two_m = 0;  // ket-side projection (column)

  friend bool operator==(const SpinTriple&, const SpinTriple&) = default;
};

/// One component |J,n><J,m| (x) |l><k| of the flattened density matrix.
struct Component {
  SpinTriple spin;
  int ell = 0;  // boson number on the row side
  int k = 0;    // boson number on the column side

  friend bool operator==(const Component&, const Component&) = default;
};

/// Doubled total spin lengths 2J for N qubits, strictly decreasing from N
/// down to N mod 2.
std::vector<int> spin_lengths(int num_qubits);

/// Index tables for the permutation-symmetric spin (x) boson basis.
///
/// Spin triples are ordered by descending J, then descending n, then
/// descending m; the fully symmetric J = N/2 sector therefore occupies the
/// first (N+1)^2 spin indices. The flat component index is
///   spin_index * (cutoff+1)^2 + ell * (cutoff+1) + k.
/// Triples with |n| > J or |m| > J are never assigned an index.
class BasisLayout {
 public:
  explicit BasisLayout(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  int boson_cutoff() const { return num_qubits_; }
  int boson_dim() const { return num_qubits_ + 1; }
  std::size_t spin_dim() const { return triples_.size(); }
  std::size_t total_dim() const { return triples_.size() * boson_dim() * boson_dim(); }

  const std::vector<int>& two_js() const { return two_js_; }
  int min_two_j() const { return two_js_.back(); }
  bool has_sector(int two_j) const;

  bool is_valid(const SpinTriple& t) const;
  /// Throws InvalidArgument for triples outside the layout.
  std::size_t spin_index(const SpinTriple& t) const;
  std::optional<std::size_t> find_spin_index(const SpinTriple& t) const;
  const SpinTriple& triple(std::size_t spin_index) const { return triples_.at(spin_index); }

  std::size_t flat_index(std::size_t spin_index, int ell, int k) const {
    const auto b = static_cast<std::size_t>(boson_dim());
    return (spin_index * b + static_cast<std::size_t>(ell)) * b + static_cast<std::size_t>(k);
  }
  std::size_t flat_index(const Component& c) const {
    return flat_index(spin_index(c.spin), c.ell, c.k);
  }
  std::optional<std::size_t> find_flat_index(const Component& c) const;
  Component component(std::size_t flat) const;

  /// Row-side and column-side excitation numbers (qubits up + bosons).
  int left_excitations(const Component& c) const { return (c.spin.two_n + num_qubits_) / 2 + c.ell; }
  int right_excitations(const Component& c) const { return (c.spin.two_m + num_qubits_) / 2 + c.k; }

 private:
  std::size_t sector_offset(int two_j) const;

  int num_qubits_;
  std::vector<int> two_js_;
  std::vector<std::size_t> offsets_;  // first spin index of each sector, by position in two_js_
  std::vector<SpinTriple> triples_;
};

std::shared_ptr<const BasisLayout> build_layout(int num_qubits);

/// Sector combinatorics for N spin-1/2 particles.
///   alpha_N^J = C(N, N/2 - J)
///   d_N^J     = C(N, N/2 - J) (2J+1) / (N/2 + J + 1)
/// Both vanish for J outside {N/2, N/2-1, ...}.
class SectorWeights {
 public:
  explicit SectorWeights(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::uint64_t alpha(int two_j) const;
  std::uint64_t degeneracy(int two_j) const;

 private:
  std::size_t slot(int two_j) const;

  int num_qubits_;
  std::vector<std::uint64_t> alpha_;
  std::vector<std::uint64_t> degeneracy_;
};

SectorWeights sector_weights(int num_qubits);

std::uint64_t binomial(int n, int k);

}  // namespace permqfi
