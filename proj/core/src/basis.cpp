#include "permqfi/basis.hpp"

#include <cstdlib>
#include <string>

#include "permqfi/error.hpp"

namespace permqfi {

namespace {

void require_qubits(int num_qubits) {
  if (num_qubits < 1) {
    throw InvalidArgument("probe size must be at least one qubit, got " + std::to_string(num_qubits));
  }
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // exact at every step: result * (n-k+i) is divisible by i
    result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return result;
}

std::vector<int> spin_lengths(int num_qubits) {
  require_qubits(num_qubits);
  std::vector<int> out;
  for (int two_j = num_qubits; two_j >= 0; two_j -= 2) out.push_back(two_j);
  return out;
}

BasisLayout::BasisLayout(int num_qubits) : num_qubits_(num_qubits), two_js_(spin_lengths(num_qubits)) {
  std::size_t total = 0;
  for (int two_j : two_js_) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(two_j + 1) * static_cast<std::size_t>(two_j + 1);
  }
  triples_.reserve(total);
  for (int two_j : two_js_) {
    for (int two_n = two_j; two_n >= -two_j; two_n -= 2) {
      for (int two_m = two_j; two_m >= -two_j; two_m -= 2) {
        triples_.push_back({two_j, two_n, two_m});
      }
    }
  }
}

bool BasisLayout::has_sector(int two_j) const {
  return two_j >= min_two_j() && two_j <= num_qubits_ && (num_qubits_ - two_j) % 2 == 0;
}

bool BasisLayout::is_valid(const SpinTriple& t) const {
  if (!has_sector(t.two_j)) return false;
  const auto in_range = [&](int two_p) {
    return std::abs(two_p) <= t.two_j && (t.two_j - two_p) % 2 == 0;
  };
  return in_range(t.two_n) && in_range(t.two_m);
}

std::size_t BasisLayout::sector_offset(int two_j) const {
  return offsets_[static_cast<std::size_t>((num_qubits_ - two_j) / 2)];
}

std::optional<std::size_t> BasisLayout::find_spin_index(const SpinTriple& t) const {
  if (!is_valid(t)) return std::nullopt;
  const auto dim = static_cast<std::size_t>(t.two_j + 1);
  const auto row = static_cast<std::size_t>((t.two_j - t.two_n) / 2);
  const auto col = static_cast<std::size_t>((t.two_j - t.two_m) / 2);
  return sector_offset(t.two_j) + row * dim + col;
}

std::size_t BasisLayout::spin_index(const SpinTriple& t) const {
  if (auto idx = find_spin_index(t)) return *idx;
  throw InvalidArgument("spin triple (2J=" + std::to_string(t.two_j) + ", 2n=" + std::to_string(t.two_n) +
                        ", 2m=" + std::to_string(t.two_m) + ") is not in the layout for N=" +
                        std::to_string(num_qubits_));
}

std::optional<std::size_t> BasisLayout::find_flat_index(const Component& c) const {
  if (c.ell < 0 || c.k < 0 || c.ell > boson_cutoff() || c.k > boson_cutoff()) return std::nullopt;
  auto idx = find_spin_index(c.spin);
  if (!idx) return std::nullopt;
  return flat_index(*idx, c.ell, c.k);
}

Component BasisLayout::component(std::size_t flat) const {
  const auto b = static_cast<std::size_t>(boson_dim());
  const std::size_t k = flat % b;
  const std::size_t ell = (flat / b) % b;
  const std::size_t spin = flat / (b * b);
  return {triples_.at(spin), static_cast<int>(ell), static_cast<int>(k)};
}

std::shared_ptr<const BasisLayout> build_layout(int num_qubits) {
  require_qubits(num_qubits);
  return std::make_shared<const BasisLayout>(num_qubits);
}

SectorWeights::SectorWeights(int num_qubits) : num_qubits_(num_qubits) {
  require_qubits(num_qubits);
  for (int two_j : spin_lengths(num_qubits)) {
    const int deficit = (num_qubits - two_j) / 2;  // N/2 - J
    const std::uint64_t a = binomial(num_qubits, deficit);
    alpha_.push_back(a);
    // C(N, N/2-J) (2J+1) / (N/2+J+1); the quotient is always an integer
    degeneracy_.push_back(a * static_cast<std::uint64_t>(two_j + 1) /
                          static_cast<std::uint64_t>(num_qubits - deficit + 1));
  }
}

std::size_t SectorWeights::slot(int two_j) const {
  if (two_j < 0 || two_j > num_qubits_ || (num_qubits_ - two_j) % 2 != 0) return alpha_.size();
  return static_cast<std::size_t>((num_qubits_ - two_j) / 2);
}

std::uint64_t SectorWeights::alpha(int two_j) const {
  const auto s = slot(two_j);
  return s < alpha_.size() ? alpha_[s] : 0;
}

std::uint64_t SectorWeights::degeneracy(int two_j) const {
  const auto s = slot(two_j);
  return s < degeneracy_.size() ? degeneracy_[s] : 0;
}

SectorWeights sector_weights(int num_qubits) { return SectorWeights(num_qubits); }

}  // namespace permqfi
