#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "permqfi/fisher.hpp"
#include "permqfi/integrator.hpp"
#include "permqfi/operators.hpp"
#include "permqfi/probes.hpp"
#include "permqfi/state.hpp"

/// Brute-force reference simulator on the full qubit-resonator space.
///
/// Basis index is b (N+1) + l, where bit j of b set means qubit j is excited
/// and l is the photon number (cutoff N, as in the symmetric layout).
namespace permqfi::oracle {

inline constexpr int kMaxQubits = 5;

std::size_t full_dim(int num_qubits);

struct FullState {
  int num_qubits = 0;
  Eigen::MatrixXcd rho;

  Complex trace() const { return rho.trace(); }
};

/// Lindblad generator built from explicit per-qubit operators:
///   d rho/dt = -i (H_eff rho - rho H_eff^dag) + sum_k L_k rho L_k^dag
/// with H_eff = H - (i/2) sum_k L_k^dag L_k.
class FullRhs {
 public:
  using Sparse = Eigen::SparseMatrix<Complex>;

  /// Throws InvalidArgument for N > kMaxQubits.
  explicit FullRhs(const SimParams& params);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dim_; }

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  /// Column-major flattened form used by the integrator.
  void apply(const Eigen::Ref<const Eigen::VectorXcd>& rho, Eigen::Ref<Eigen::VectorXcd> out) const;

 private:
  int num_qubits_;
  std::size_t dim_;
  Sparse h_eff_;
  std::vector<Sparse> jumps_;
};

/// Orthonormal |J, m, q> vectors on the 2^N qubit space, q = 0..d_N^J - 1.
///
/// Built independently of the collective-operator tables: the m = J vectors
/// span the kernel of S+ inside the weight-J subspace, and lower ones follow
/// by repeated application of S- (Condon-Shortley phases).
class SymmetricBasis {
 public:
  explicit SymmetricBasis(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  /// 2^N x d matrix whose columns are the copies of |J, m>.
  const Eigen::MatrixXd& vectors(int two_j, int two_m) const;

 private:
  int num_qubits_;
  std::vector<std::vector<Eigen::MatrixXd>> vectors_;  // [sector slot][(2J - 2m)/2]
};

/// max |P rho P^T - rho| over adjacent qubit transpositions P.
double permutation_asymmetry(const FullState& state);

/// Block sums over degenerate copies. Rejects states whose permutation
/// asymmetry exceeds `tolerance`.
DensityState symmetrize(const FullState& state, double tolerance = 1e-10);
/// Inverse of symmetrize on the symmetric subspace: each J block is spread
/// over its d_N^J copies with weight 1/d_N^J.
FullState expand(const DensityState& state);

/// Probe states built directly from their computational-basis definitions.
FullState full_probe(const ProbeSpec& probe, int num_qubits);

/// Random positive trace-one state on the full symmetric support.
DensityState random_symmetric_state(int num_qubits, std::uint64_t seed);

/// QFI of the full-space pair, using the same thresholding as the
/// symmetric pipeline (one block, one copy).
double full_qfi(const FullState& plus, const FullState& minus, const QfiConfig& config);

using FullObserver = std::function<void(std::size_t index, double gt, const FullState& plus, const FullState& minus)>;

/// Full-space counterpart of qfi_series: returns F g^2 at each dimensionless
/// time, integrating the g +/- delta/2 pair as one stacked system.
std::vector<double> full_qfi_series(const ProbeSpec& probe, const SimParams& params, std::span<const double> times,
                                    const QfiConfig& qfi = {}, const IntegratorConfig& integrator = {},
                                    const FullObserver& observe = {});

}  // namespace permqfi::oracle
