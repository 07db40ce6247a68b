#include "permqfi/operators.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "permqfi/error.hpp"

namespace permqfi {

namespace {

constexpr Complex kI{0.0, 1.0};

using Triplet = Eigen::Triplet<Complex, int>;

// Collects (destination, source, weight) entries, dropping destinations that
// fall outside the support. Supports are closed under the dynamics, so the
// only entries dropped on a full support are boson raisings past the cutoff.
class TripletSink {
 public:
  explicit TripletSink(const Support& support) : support_(support) {}

  void add(const Component& dest, std::size_t source, Complex weight) {
    if (weight == Complex{}) return;
    if (auto p = support_.position(dest)) {
      triplets_.emplace_back(static_cast<int>(*p), static_cast<int>(source), weight);
    }
  }

  SuperOp::Matrix finish() && {
    const auto n = static_cast<int>(support_.size());
    SuperOp::Matrix m(n, n);
    m.setFromTriplets(triplets_.begin(), triplets_.end());
    m.makeCompressed();
    return m;
  }

 private:
  const Support& support_;
  std::vector<Triplet> triplets_;
};

// Single-valued shift read off a ladder table. Left action follows the
// table direction (O|from> -> |to>); right action, rho O, moves the column
// index from `to` back to `from`.
class Shift {
 public:
  Shift(const std::vector<LadderEntry>& table, bool right_action, int lo, int hi)
      : lo_(lo), slots_(static_cast<std::size_t>(hi - lo + 1)) {
    for (const LadderEntry& e : table) {
      const int src = right_action ? e.to : e.from;
      const int dst = right_action ? e.from : e.to;
      slots_[static_cast<std::size_t>(src - lo_)] = LadderEntry{src, dst, e.weight};
    }
  }

  const std::optional<LadderEntry>& operator()(int source) const {
    return slots_[static_cast<std::size_t>(source - lo_)];
  }

 private:
  int lo_;
  std::vector<std::optional<LadderEntry>> slots_;
};

struct SectorShifts {
  Shift minus_left, plus_left, minus_right, plus_right;
};

std::vector<SectorShifts> sector_shifts(const BasisLayout& layout) {
  std::vector<SectorShifts> out;
  for (int two_j : layout.two_js()) {
    const SpinTables t = spin_matrix_elements(two_j);
    out.push_back({Shift(t.minus, false, -two_j, two_j), Shift(t.plus, false, -two_j, two_j),
                   Shift(t.minus, true, -two_j, two_j), Shift(t.plus, true, -two_j, two_j)});
  }
  return out;
}

std::size_t sector_slot(const BasisLayout& layout, int two_j) {
  return static_cast<std::size_t>((layout.num_qubits() - two_j) / 2);
}

}  // namespace

void SimParams::validate(bool allow_zero_coupling) const {
  if (num_qubits < 1) throw InvalidArgument("N must be at least 1");
  if (!std::isfinite(g) || g < 0.0 || (g == 0.0 && !allow_zero_coupling)) {
    throw InvalidArgument("coupling g must be positive, got " + std::to_string(g));
  }
  if (!std::isfinite(kappa) || kappa < 0.0) throw InvalidArgument("kappa must be >= 0");
  if (!std::isfinite(gamma) || gamma < 0.0) throw InvalidArgument("gamma must be >= 0");
  if (!std::isfinite(omega_q) || !std::isfinite(omega_c)) throw InvalidArgument("frequencies must be finite");
}

SpinTables spin_matrix_elements(int two_j) {
  if (two_j < 0) throw InvalidArgument("spin length must be non-negative");
  SpinTables t;
  t.two_j = two_j;
  const double j = 0.5 * two_j;
  for (int two_m = two_j; two_m >= -two_j; two_m -= 2) {
    const double m = 0.5 * two_m;
    t.z.push_back({two_m, two_m, m});
    if (two_m + 2 <= two_j) t.plus.push_back({two_m, two_m + 2, std::sqrt(j * (j + 1) - m * (m + 1))});
    if (two_m - 2 >= -two_j) t.minus.push_back({two_m, two_m - 2, std::sqrt(j * (j + 1) - m * (m - 1))});
  }
  return t;
}

BosonTables boson_left_right(const BasisLayout& layout) {
  BosonTables t;
  const int cutoff = layout.boson_cutoff();
  for (int q = 0; q <= cutoff; ++q) {
    const double s = std::sqrt(static_cast<double>(q));
    const double s1 = std::sqrt(static_cast<double>(q + 1));
    if (q > 0) {
      t.a_left.push_back({q, q - 1, s});
      t.a_dag_right.push_back({q, q - 1, s});
    }
    if (q < cutoff) {
      t.a_dag_left.push_back({q, q + 1, s1});
      t.a_right.push_back({q, q + 1, s1});
    }
  }
  return t;
}

SuperOp::SuperOp(std::shared_ptr<const Support> support)
    : support_(std::move(support)),
      matrix_(static_cast<int>(support_->size()), static_cast<int>(support_->size())) {}

SuperOp::SuperOp(std::shared_ptr<const Support> support, Matrix matrix)
    : support_(std::move(support)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(support_->size());
  if (matrix_.rows() != n || matrix_.cols() != n) throw InvalidArgument("superoperator shape mismatch");
}

void SuperOp::apply(const Eigen::Ref<const Eigen::VectorXcd>& rho, Eigen::Ref<Eigen::VectorXcd> out) const {
  out.noalias() = matrix_ * rho;
}

DensityState SuperOp::apply(const DensityState& rho) const {
  if (rho.support().size() != support_->size() || rho.support().flat_indices() != support_->flat_indices()) {
    throw InvalidArgument("state and superoperator live on different supports");
  }
  Eigen::VectorXcd out(rho.values().size());
  apply(rho.values(), out);
  return DensityState(support_, std::move(out));
}

SuperOp& SuperOp::operator+=(const SuperOp& other) {
  if (other.support_ != support_ && other.support_->flat_indices() != support_->flat_indices()) {
    throw InvalidArgument("cannot add superoperators on different supports");
  }
  matrix_ = (matrix_ + other.matrix_).eval();
  matrix_.makeCompressed();
  return *this;
}

SuperOp hamiltonian_commutator(const SimParams& params, std::shared_ptr<const Support> support) {
  params.validate(true);
  const BasisLayout& layout = support->layout();
  if (params.num_qubits != layout.num_qubits()) throw InvalidArgument("parameters and layout disagree on N");
  const BosonTables bosons = boson_left_right(layout);
  const int lo = 0, hi = layout.boson_cutoff();
  const Shift a_l(bosons.a_left, false, lo, hi), a_dag_l(bosons.a_dag_left, false, lo, hi);
  // a_R/a_dag_R tables already describe the column shift of rho a / rho a^dag
  const Shift a_r(bosons.a_right, false, lo, hi), a_dag_r(bosons.a_dag_right, false, lo, hi);
  const std::vector<SectorShifts> spins = sector_shifts(layout);

  TripletSink sink(*support);
  const Complex left = -kI * params.g;
  const Complex right = kI * params.g;
  for (std::size_t p = 0; p < support->size(); ++p) {
    const Component c = layout.component(support->flat(p));
    const SectorShifts& s = spins[sector_slot(layout, c.spin.two_j)];
    const int two_j = c.spin.two_j;

    // H rho: a^dag S- and a S+ acting on the row index
    if (const auto& sm = s.minus_left(c.spin.two_n); sm) {
      if (const auto& b = a_dag_l(c.ell); b) {
        sink.add({{two_j, sm->to, c.spin.two_m}, b->to, c.k}, p, left * sm->weight * b->weight);
      }
    }
    if (const auto& sp = s.plus_left(c.spin.two_n); sp) {
      if (const auto& b = a_l(c.ell); b) {
        sink.add({{two_j, sp->to, c.spin.two_m}, b->to, c.k}, p, left * sp->weight * b->weight);
      }
    }
    // rho H: rho a^dag S- and rho a S+ acting on the column index
    if (const auto& sm = s.minus_right(c.spin.two_m); sm) {
      if (const auto& b = a_dag_r(c.k); b) {
        sink.add({{two_j, c.spin.two_n, sm->to}, c.ell, b->to}, p, right * sm->weight * b->weight);
      }
    }
    if (const auto& sp = s.plus_right(c.spin.two_m); sp) {
      if (const auto& b = a_r(c.k); b) {
        sink.add({{two_j, c.spin.two_n, sp->to}, c.ell, b->to}, p, right * sp->weight * b->weight);
      }
    }

    const double detuning = params.omega_q * 0.5 * (c.spin.two_n - c.spin.two_m) + params.omega_c * (c.ell - c.k);
    sink.add(c, p, -kI * detuning);
  }
  return SuperOp(support, std::move(sink).finish());
}

SuperOp cavity_dissipator(double kappa, std::shared_ptr<const Support> support) {
  if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be >= 0");
  const BasisLayout& layout = support->layout();
  const BosonTables bosons = boson_left_right(layout);
  const Shift a_l(bosons.a_left, false, 0, layout.boson_cutoff());
  const Shift a_dag_r(bosons.a_dag_right, false, 0, layout.boson_cutoff());

  TripletSink sink(*support);
  for (std::size_t p = 0; p < support->size(); ++p) {
    const Component c = layout.component(support->flat(p));
    // a rho a^dag
    if (const auto& bl = a_l(c.ell); bl) {
      if (const auto& br = a_dag_r(c.k); br) {
        sink.add({c.spin, bl->to, br->to}, p, kappa * bl->weight * br->weight);
      }
    }
    // -1/2 {a^dag a, rho}
    sink.add(c, p, -0.5 * kappa * (c.ell + c.k));
  }
  return SuperOp(support, std::move(sink).finish());
}

SuperOp local_qubit_dissipator(double gamma, const SectorWeights& weights, std::shared_ptr<const Support> support) {
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  const BasisLayout& layout = support->layout();
  if (weights.num_qubits() != layout.num_qubits()) throw InvalidArgument("sector weights built for another N");
  const int n_qubits = layout.num_qubits();

  struct Prefactors {
    double same = 0.0, lower = 0.0, raise = 0.0;
  };
  std::vector<Prefactors> pre;
  for (int two_j : layout.two_js()) {
    const double j = 0.5 * two_j;
    const double d = static_cast<double>(weights.degeneracy(two_j));
    const double alpha = static_cast<double>(weights.alpha(two_j));
    const double alpha_up = static_cast<double>(weights.alpha(two_j + 2));
    Prefactors f;
    // J = 0: the A and B coefficients vanish, so only the raising branch survives
    if (two_j > 0) {
      f.same = (1.0 + alpha_up / d * (2.0 * j + 1.0) / (j + 1.0)) / (2.0 * j);
      if (layout.has_sector(two_j - 2)) f.lower = alpha / (2.0 * j * d);
    }
    f.raise = alpha_up / (2.0 * (j + 1.0) * d);
    pre.push_back(f);
  }

  const auto coeff_a = [](double j, double x) { return std::sqrt(std::max(0.0, (j + x) * (j - x + 1.0))); };
  const auto coeff_b = [](double j, double x) { return -std::sqrt(std::max(0.0, (j + x) * (j + x - 1.0))); };
  const auto coeff_d = [](double j, double x) { return std::sqrt(std::max(0.0, (j - x + 1.0) * (j - x + 2.0))); };

  TripletSink sink(*support);
  for (std::size_t p = 0; p < support->size(); ++p) {
    const Component c = layout.component(support->flat(p));
    const int two_j = c.spin.two_j;
    const double j = 0.5 * two_j, n = 0.5 * c.spin.two_n, m = 0.5 * c.spin.two_m;
    const Prefactors& f = pre[sector_slot(layout, two_j)];
    const int two_n = c.spin.two_n - 2, two_m = c.spin.two_m - 2;

    const auto branch = [&](int target_two_j, double weight) {
      if (weight == 0.0) return;
      const SpinTriple t{target_two_j, two_n, two_m};
      if (!layout.is_valid(t)) return;
      sink.add({t, c.ell, c.k}, p, gamma * weight);
    };
    branch(two_j, f.same * coeff_a(j, n) * coeff_a(j, m));
    branch(two_j - 2, f.lower * coeff_b(j, n) * coeff_b(j, m));
    branch(two_j + 2, f.raise * coeff_d(j, n) * coeff_d(j, m));

    // -1/2 {sum_j sigma_+ sigma_-, rho} with sum_j sigma_+ sigma_- = N/2 + Sz
    sink.add(c, p, -0.5 * gamma * (n_qubits + n + m));
  }
  return SuperOp(support, std::move(sink).finish());
}

SuperOp assemble_rhs(const SimParams& params, std::shared_ptr<const Support> support) {
  params.validate(true);
  SuperOp rhs = hamiltonian_commutator(params, support);
  if (params.kappa > 0.0) rhs += cavity_dissipator(params.kappa, support);
  if (params.gamma > 0.0) {
    rhs += local_qubit_dissipator(params.gamma, SectorWeights(params.num_qubits), support);
  }
  return rhs;
}

}  // namespace permqfi
