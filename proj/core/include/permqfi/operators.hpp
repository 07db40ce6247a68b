#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "permqfi/basis.hpp"
#include "permqfi/state.hpp"

namespace permqfi {

/// Physical parameters of the qubit-resonator model
///   H = wq Sz + wc a^dag a + g (a^dag S- + a S+)
/// with resonator decay kappa and per-qubit amplitude damping gamma.
struct SimParams {
  int num_qubits = 1;
  double g = 1.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double omega_q = 0.0;
  double omega_c = 0.0;

  /// Throws InvalidArgument unless N >= 1, g > 0 and both rates >= 0.
  /// `allow_zero_coupling` admits g = 0 for operator-level tests.
  void validate(bool allow_zero_coupling = false) const;
};

/// Matrix element O|from> = weight |to> of a single-sector or single-mode
/// ladder operator; indices are doubled projections (spin) or occupation
/// numbers (boson).
struct LadderEntry {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

struct SpinTables {
  int two_j = 0;
  std::vector<LadderEntry> z;
  std::vector<LadderEntry> plus;
  std::vector<LadderEntry> minus;
};

/// Sz, S+ and S- inside the sector of doubled spin length `two_j`.
SpinTables spin_matrix_elements(int two_j);

/// Left and right actions of the boson ladder operators on the (l, k) pair.
/// Entries act on l for the left variants and on k for the right variants:
///   a_L      : l -> l-1, sqrt(l)      (a rho)
///   a_dag_L  : l -> l+1, sqrt(l+1)    (a^dag rho)
///   a_R      : k -> k+1, sqrt(k+1)    (rho a)
///   a_dag_R  : k -> k-1, sqrt(k)      (rho a^dag)
/// Raising entries that would exceed the cutoff are absent.
struct BosonTables {
  std::vector<LadderEntry> a_left;
  std::vector<LadderEntry> a_dag_left;
  std::vector<LadderEntry> a_right;
  std::vector<LadderEntry> a_dag_right;
};

BosonTables boson_left_right(const BasisLayout& layout);

/// Sparse linear map on the components of a support. Rows are destination
/// positions, so applying it is one pass over the stored entries with a
/// fixed summation order.
class SuperOp {
 public:
  using Matrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, int>;

  explicit SuperOp(std::shared_ptr<const Support> support);
  SuperOp(std::shared_ptr<const Support> support, Matrix matrix);

  const Support& support() const { return *support_; }
  const std::shared_ptr<const Support>& shared_support() const { return support_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t nonzeros() const { return static_cast<std::size_t>(matrix_.nonZeros()); }

  void apply(const Eigen::Ref<const Eigen::VectorXcd>& rho, Eigen::Ref<Eigen::VectorXcd> out) const;
  DensityState apply(const DensityState& rho) const;

  SuperOp& operator+=(const SuperOp& other);
  friend SuperOp operator+(SuperOp lhs, const SuperOp& rhs) { return lhs += rhs; }

 private:
  std::shared_ptr<const Support> support_;
  Matrix matrix_;
};

/// rho -> -i [H, rho].
SuperOp hamiltonian_commutator(const SimParams& params, std::shared_ptr<const Support> support);
/// rho -> kappa D[a](rho).
SuperOp cavity_dissipator(double kappa, std::shared_ptr<const Support> support);
/// rho -> gamma sum_j D[sigma_-^(j)](rho), expressed through the J-preserving,
/// J-lowering and J-raising branches of the collective representation.
SuperOp local_qubit_dissipator(double gamma, const SectorWeights& weights, std::shared_ptr<const Support> support);
/// Full master-equation generator.
SuperOp assemble_rhs(const SimParams& params, std::shared_ptr<const Support> support);

}  // namespace permqfi
