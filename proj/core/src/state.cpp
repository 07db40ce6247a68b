#include "permqfi/state.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "permqfi/error.hpp"

namespace permqfi {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Row/column coordinate of a component inside its J sector matrix.
std::size_t sector_row(const BasisLayout& layout, int two_j, int two_p, int boson) {
  return static_cast<std::size_t>((two_j - two_p) / 2) * static_cast<std::size_t>(layout.boson_dim()) +
         static_cast<std::size_t>(boson);
}

}  // namespace

std::shared_ptr<const Support> Support::full(std::shared_ptr<const BasisLayout> layout) {
  std::vector<std::size_t> flat(layout->total_dim());
  std::iota(flat.begin(), flat.end(), std::size_t{0});
  return std::shared_ptr<const Support>(new Support(std::move(layout), std::move(flat)));
}

std::shared_ptr<const Support> Support::excitation_closure(std::shared_ptr<const BasisLayout> layout,
                                                           std::span<const std::size_t> seeds) {
  const int n_qubits = layout->num_qubits();
  const int max_exc = 2 * n_qubits;
  std::vector<char> delta_allowed(static_cast<std::size_t>(2 * max_exc + 1), 0);
  int exc_bound = 0;
  for (std::size_t flat : seeds) {
    if (flat >= layout->total_dim()) throw InvalidArgument("seed component outside the layout");
    const Component c = layout->component(flat);
    const int el = layout->left_excitations(c);
    const int er = layout->right_excitations(c);
    delta_allowed[static_cast<std::size_t>(el - er + max_exc)] = 1;
    delta_allowed[static_cast<std::size_t>(er - el + max_exc)] = 1;
    exc_bound = std::max({exc_bound, el, er});
  }

  std::vector<std::size_t> flat;
  for (std::size_t f = 0; f < layout->total_dim(); ++f) {
    const Component c = layout->component(f);
    const int el = layout->left_excitations(c);
    const int er = layout->right_excitations(c);
    if (el <= exc_bound && er <= exc_bound && delta_allowed[static_cast<std::size_t>(el - er + max_exc)]) {
      flat.push_back(f);
    }
  }
  return std::shared_ptr<const Support>(new Support(std::move(layout), std::move(flat)));
}

std::shared_ptr<const Support> Support::from_flat(std::shared_ptr<const BasisLayout> layout,
                                                  std::vector<std::size_t> flat) {
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (flat[i] >= layout->total_dim() || (i > 0 && flat[i] <= flat[i - 1])) {
      throw InvalidArgument("support indices must be sorted, unique and inside the layout");
    }
  }
  return std::shared_ptr<const Support>(new Support(std::move(layout), std::move(flat)));
}

Support::Support(std::shared_ptr<const BasisLayout> layout, std::vector<std::size_t> flat)
    : layout_(std::move(layout)), flat_(std::move(flat)) {
  if (flat_.size() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw InvalidArgument("support too large for 32-bit positions");
  }
  lookup_.assign(layout_->total_dim(), -1);
  for (std::size_t p = 0; p < flat_.size(); ++p) lookup_[flat_[p]] = static_cast<std::int32_t>(p);

  adjoint_.resize(flat_.size());
  for (std::size_t p = 0; p < flat_.size(); ++p) {
    const Component c = layout_->component(flat_[p]);
    const Component t{{c.spin.two_j, c.spin.two_m, c.spin.two_n}, c.k, c.ell};
    const auto q = position(t);
    if (!q) throw InvalidArgument("support is not closed under Hermitian conjugation");
    adjoint_[p] = *q;
  }
  build_blocks();
}

std::optional<std::size_t> Support::position(std::size_t flat) const {
  if (flat >= lookup_.size() || lookup_[flat] < 0) return std::nullopt;
  return static_cast<std::size_t>(lookup_[flat]);
}

std::optional<std::size_t> Support::position(const Component& c) const {
  auto f = layout_->find_flat_index(c);
  if (!f) return std::nullopt;
  return position(*f);
}

void Support::build_blocks() {
  const BasisLayout& layout = *layout_;
  const auto bdim = static_cast<std::size_t>(layout.boson_dim());

  // global row id = sector row offset + row inside the sector
  std::vector<std::size_t> row_offset;
  std::size_t total_rows = 0;
  for (int two_j : layout.two_js()) {
    row_offset.push_back(total_rows);
    total_rows += static_cast<std::size_t>(two_j + 1) * bdim;
  }
  const auto sector_slot = [&](int two_j) {
    return static_cast<std::size_t>((layout.num_qubits() - two_j) / 2);
  };

  DisjointSets sets(total_rows);
  std::vector<char> used(total_rows, 0);
  std::vector<std::size_t> row_of(flat_.size()), col_of(flat_.size());
  for (std::size_t p = 0; p < flat_.size(); ++p) {
    const Component c = layout.component(flat_[p]);
    const std::size_t base = row_offset[sector_slot(c.spin.two_j)];
    row_of[p] = base + sector_row(layout, c.spin.two_j, c.spin.two_n, c.ell);
    col_of[p] = base + sector_row(layout, c.spin.two_j, c.spin.two_m, c.k);
    used[row_of[p]] = used[col_of[p]] = 1;
    sets.unite(row_of[p], col_of[p]);
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> block_of_root(total_rows, kNone);
  std::vector<std::size_t> local_index(total_rows, 0);
  std::vector<std::size_t> sector_of_row(total_rows, 0);
  for (std::size_t s = 0; s < row_offset.size(); ++s) {
    const std::size_t end = s + 1 < row_offset.size() ? row_offset[s + 1] : total_rows;
    for (std::size_t r = row_offset[s]; r < end; ++r) sector_of_row[r] = s;
  }

  for (std::size_t r = 0; r < total_rows; ++r) {
    if (!used[r]) continue;
    const std::size_t root = sets.find(r);
    if (block_of_root[root] == kNone) {
      block_of_root[root] = blocks_.size();
      CoherenceBlock block;
      block.two_j = layout.two_js()[sector_of_row[r]];
      blocks_.push_back(std::move(block));
    }
    CoherenceBlock& block = blocks_[block_of_root[root]];
    local_index[r] = block.dim++;
  }

  for (std::size_t p = 0; p < flat_.size(); ++p) {
    CoherenceBlock& block = blocks_[block_of_root[sets.find(row_of[p])]];
    block.entries.push_back({static_cast<std::uint32_t>(local_index[row_of[p]]),
                             static_cast<std::uint32_t>(local_index[col_of[p]]),
                             static_cast<std::uint32_t>(p)});
  }
}

DensityState::DensityState(std::shared_ptr<const Support> support, Eigen::VectorXcd values)
    : support_(std::move(support)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != support_->size()) {
    throw InvalidArgument("state vector length " + std::to_string(values_.size()) +
                          " does not match support size " + std::to_string(support_->size()));
  }
}

DensityState DensityState::zero(std::shared_ptr<const Support> support) {
  const auto n = static_cast<Eigen::Index>(support->size());
  return DensityState(std::move(support), Eigen::VectorXcd::Zero(n));
}

Complex DensityState::at(const Component& c) const {
  auto p = support_->position(c);
  return p ? values_[static_cast<Eigen::Index>(*p)] : Complex{};
}

Complex DensityState::at_flat(std::size_t flat) const {
  auto p = support_->position(flat);
  return p ? values_[static_cast<Eigen::Index>(*p)] : Complex{};
}

void DensityState::set(const Component& c, Complex value) {
  auto p = support_->position(c);
  if (!p) throw InvalidArgument("component outside the state support");
  values_[static_cast<Eigen::Index>(*p)] = value;
}

Complex DensityState::trace() const {
  Complex tr{};
  for (const CoherenceBlock& block : support_->blocks()) {
    for (const auto& e : block.entries) {
      if (e.row == e.col) tr += values_[e.position];
    }
  }
  return tr;
}

double DensityState::purity() const {
  const SectorWeights weights(layout().num_qubits());
  double total = 0.0;
  for (const CoherenceBlock& block : support_->blocks()) {
    double sum = 0.0;
    for (const auto& e : block.entries) {
      sum += (values_[e.position] * values_[static_cast<Eigen::Index>(support_->adjoint_position(e.position))]).real();
    }
    total += sum / static_cast<double>(weights.degeneracy(block.two_j));
  }
  return total;
}

double DensityState::hermiticity_residual() const {
  double worst = 0.0;
  for (std::size_t p = 0; p < support_->size(); ++p) {
    const auto q = static_cast<Eigen::Index>(support_->adjoint_position(p));
    worst = std::max(worst, std::abs(values_[static_cast<Eigen::Index>(p)] - std::conj(values_[q])));
  }
  return worst;
}

Eigen::MatrixXcd DensityState::block_matrix(std::size_t block_index) const {
  const CoherenceBlock& block = support_->blocks().at(block_index);
  const auto dim = static_cast<Eigen::Index>(block.dim);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& e : block.entries) m(e.row, e.col) = values_[e.position];
  return m;
}

double DensityState::min_block_eigenvalue() const {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < support_->blocks().size(); ++b) {
    Eigen::MatrixXcd m = block_matrix(b);
    m = (0.5 * (m + m.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, solver.eigenvalues().minCoeff());
  }
  return lowest;
}

Eigen::MatrixXcd DensityState::sector_matrix(int two_j) const {
  const BasisLayout& l = layout();
  if (!l.has_sector(two_j)) throw InvalidArgument("no sector with 2J=" + std::to_string(two_j));
  const auto dim = static_cast<Eigen::Index>((two_j + 1) * l.boson_dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t p = 0; p < support_->size(); ++p) {
    const Component c = l.component(support_->flat(p));
    if (c.spin.two_j != two_j) continue;
    m(static_cast<Eigen::Index>(sector_row(l, two_j, c.spin.two_n, c.ell)),
      static_cast<Eigen::Index>(sector_row(l, two_j, c.spin.two_m, c.k))) = values_[static_cast<Eigen::Index>(p)];
  }
  return m;
}

DensityState DensityState::on(std::shared_ptr<const Support> target) const {
  if (&target->layout() != &layout() && target->layout().num_qubits() != layout().num_qubits()) {
    throw InvalidArgument("target support belongs to a different layout");
  }
  DensityState out = zero(target);
  for (std::size_t p = 0; p < support_->size(); ++p) {
    if (auto q = target->position(support_->flat(p))) {
      out.values_[static_cast<Eigen::Index>(*q)] = values_[static_cast<Eigen::Index>(p)];
    }
  }
  return out;
}

}  // namespace permqfi
