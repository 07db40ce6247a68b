#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "permqfi/basis.hpp"

namespace permqfi {

using Complex = std::complex<double>;

/// One row-connected block of a J sector. Rows are (n, l) pairs; `entries`
/// lists every stored component that falls inside the block.
struct CoherenceBlock {
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    std::uint32_t position;  // index into the support
  };
  int two_j = 0;
  std::size_t dim = 0;
  std::vector<Entry> entries;
};

/// The set of flat components a state may populate.
///
/// Every term of the master equation conserves the difference between the
/// row-side and column-side excitation numbers and never raises either of
/// them, so the components reachable from an initial state form a closed
/// set that is usually far smaller than the full layout. All dynamics and
/// QFI evaluation run on this compact set.
class Support {
 public:
  static std::shared_ptr<const Support> full(std::shared_ptr<const BasisLayout> layout);
  /// Closed set generated by the given seed components (flat indices).
  static std::shared_ptr<const Support> excitation_closure(std::shared_ptr<const BasisLayout> layout,
                                                           std::span<const std::size_t> seeds);
  /// Explicit component list, e.g. read back from a cache file. Must be
  /// sorted, unique and closed under Hermitian conjugation.
  static std::shared_ptr<const Support> from_flat(std::shared_ptr<const BasisLayout> layout,
                                                  std::vector<std::size_t> flat);

  const BasisLayout& layout() const { return *layout_; }
  const std::shared_ptr<const BasisLayout>& shared_layout() const { return layout_; }

  std::size_t size() const { return flat_.size(); }
  bool is_full() const { return flat_.size() == layout_->total_dim(); }
  std::size_t flat(std::size_t position) const { return flat_[position]; }
  const std::vector<std::size_t>& flat_indices() const { return flat_; }
  std::optional<std::size_t> position(std::size_t flat) const;
  std::optional<std::size_t> position(const Component& c) const;

  /// Block-diagonal structure of any state on this support. Blocks never mix
  /// different J and are ordered by descending J.
  const std::vector<CoherenceBlock>& blocks() const { return blocks_; }

  /// Position of the Hermitian-conjugate partner of each stored component.
  std::size_t adjoint_position(std::size_t position) const { return adjoint_[position]; }

 private:
  Support(std::shared_ptr<const BasisLayout> layout, std::vector<std::size_t> flat);
  void build_blocks();

  std::shared_ptr<const BasisLayout> layout_;
  std::vector<std::size_t> flat_;
  std::vector<std::int32_t> lookup_;  // flat -> position or -1
  std::vector<std::size_t> adjoint_;
  std::vector<CoherenceBlock> blocks_;
};

/// Flattened permutation-symmetric density matrix.
///
/// Trace convention: a J block represents the sum over its d_N^J
/// degenerate copies, so trace(rho) = sum_{J,m,l} rho[(J,m,m),l,l].
class DensityState {
 public:
  DensityState(std::shared_ptr<const Support> support, Eigen::VectorXcd values);
  static DensityState zero(std::shared_ptr<const Support> support);

  const Support& support() const { return *support_; }
  const std::shared_ptr<const Support>& shared_support() const { return support_; }
  const BasisLayout& layout() const { return support_->layout(); }

  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }

  /// Zero for components outside the support.
  Complex at(const Component& c) const;
  Complex at_flat(std::size_t flat) const;
  /// Throws InvalidArgument when `c` lies outside the support.
  void set(const Component& c, Complex value);

  Complex trace() const;
  /// tr(rho^2) of the full 2^N (N+1) dimensional operator.
  double purity() const;
  /// max |rho_ab - conj(rho_ba)| over stored components.
  double hermiticity_residual() const;
  /// Smallest eigenvalue over all coherence blocks.
  double min_block_eigenvalue() const;

  /// Dense J block with rows/columns ordered as (n descending, l ascending).
  Eigen::MatrixXcd sector_matrix(int two_j) const;
  /// Dense matrix of one coherence block of the support.
  Eigen::MatrixXcd block_matrix(std::size_t block) const;

  /// Same state re-expressed on another support over the same layout.
  /// Components missing from `target` are dropped.
  DensityState on(std::shared_ptr<const Support> target) const;

 private:
  std::shared_ptr<const Support> support_;
  Eigen::VectorXcd values_;
};

}  // namespace permqfi
