#include "permqfi/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "permqfi/error.hpp"
#include "permqfi/evolution.hpp"

namespace permqfi::oracle {

namespace {

using Sparse = FullRhs::Sparse;
using Triplet = Eigen::Triplet<Complex>;

void check_size(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw InvalidArgument("oracle supports 1 <= N <= " + std::to_string(kMaxQubits) + ", got " +
                          std::to_string(num_qubits));
  }
}

std::size_t spin_states(int num_qubits) { return std::size_t{1} << num_qubits; }

// Operator on the qubit register (x) identity on the resonator.
Sparse spin_operator(int num_qubits, const std::vector<Triplet>& spin_entries) {
  const auto bdim = static_cast<std::size_t>(num_qubits + 1);
  const auto dim = static_cast<Eigen::Index>(full_dim(num_qubits));
  std::vector<Triplet> t;
  for (const Triplet& e : spin_entries) {
    for (std::size_t l = 0; l < bdim; ++l) {
      t.emplace_back(static_cast<int>(static_cast<std::size_t>(e.row()) * bdim + l),
                     static_cast<int>(static_cast<std::size_t>(e.col()) * bdim + l), e.value());
    }
  }
  Sparse m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Sparse sigma_minus(int num_qubits, int site) {
  std::vector<Triplet> e;
  for (std::size_t b = 0; b < spin_states(num_qubits); ++b) {
    if (b >> site & 1U) e.emplace_back(static_cast<int>(b & ~(std::size_t{1} << site)), static_cast<int>(b), 1.0);
  }
  return spin_operator(num_qubits, e);
}

Sparse collective_z(int num_qubits) {
  std::vector<Triplet> e;
  for (std::size_t b = 0; b < spin_states(num_qubits); ++b) {
    e.emplace_back(static_cast<int>(b), static_cast<int>(b), std::popcount(b) - 0.5 * num_qubits);
  }
  return spin_operator(num_qubits, e);
}

Sparse annihilation(int num_qubits) {
  const auto bdim = static_cast<std::size_t>(num_qubits + 1);
  const auto dim = static_cast<Eigen::Index>(full_dim(num_qubits));
  std::vector<Triplet> t;
  for (std::size_t b = 0; b < spin_states(num_qubits); ++b) {
    for (std::size_t l = 1; l < bdim; ++l) {
      t.emplace_back(static_cast<int>(b * bdim + l - 1), static_cast<int>(b * bdim + l),
                     std::sqrt(static_cast<double>(l)));
    }
  }
  Sparse m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Qubit-register ladder operators (no resonator), as dense real matrices.
Eigen::MatrixXd register_lowering(int num_qubits) {
  const auto n = static_cast<Eigen::Index>(spin_states(num_qubits));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (int j = 0; j < num_qubits; ++j) {
      if (b >> j & 1) m(b & ~(Eigen::Index{1} << j), b) += 1.0;
    }
  }
  return m;
}

Eigen::MatrixXcd unflatten(const Eigen::Ref<const Eigen::VectorXcd>& v, Eigen::Index dim) {
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

// Index map of the transposition of qubits j and j+1 on the full basis.
std::vector<Eigen::Index> transposition(int num_qubits, int j) {
  const auto bdim = static_cast<std::size_t>(num_qubits + 1);
  std::vector<Eigen::Index> p(full_dim(num_qubits));
  for (std::size_t b = 0; b < spin_states(num_qubits); ++b) {
    const std::size_t lo = b >> j & 1U;
    const std::size_t hi = b >> (j + 1) & 1U;
    std::size_t s = b & ~((std::size_t{1} << j) | (std::size_t{1} << (j + 1)));
    s |= (lo << (j + 1)) | (hi << j);
    for (std::size_t l = 0; l < bdim; ++l) p[b * bdim + l] = static_cast<Eigen::Index>(s * bdim + l);
  }
  return p;
}

}  // namespace

std::size_t full_dim(int num_qubits) {
  check_size(num_qubits);
  return spin_states(num_qubits) * static_cast<std::size_t>(num_qubits + 1);
}

FullRhs::FullRhs(const SimParams& params) : num_qubits_(params.num_qubits), dim_(full_dim(params.num_qubits)) {
  params.validate(true);
  const int n = num_qubits_;
  const auto dim = static_cast<Eigen::Index>(dim_);

  Sparse s_minus(dim, dim);
  for (int j = 0; j < n; ++j) s_minus += sigma_minus(n, j);
  const Sparse s_plus = s_minus.adjoint();
  const Sparse a = annihilation(n);
  const Sparse a_dag = a.adjoint();

  Sparse h = params.g * (Sparse(a_dag * s_minus) + Sparse(a * s_plus));
  if (params.omega_q != 0.0) h += params.omega_q * collective_z(n);
  if (params.omega_c != 0.0) h += params.omega_c * Sparse(a_dag * a);

  if (params.kappa > 0.0) jumps_.push_back(std::sqrt(params.kappa) * a);
  if (params.gamma > 0.0) {
    for (int j = 0; j < n; ++j) jumps_.push_back(std::sqrt(params.gamma) * sigma_minus(n, j));
  }
  h_eff_ = h;
  for (const Sparse& l : jumps_) {
    h_eff_ -= Complex(0.0, 0.5) * Sparse(Sparse(l.adjoint()) * l);
  }
}

Eigen::MatrixXcd FullRhs::apply(const Eigen::MatrixXcd& rho) const {
  const Complex i(0.0, 1.0);
  // rho A^dag = (A rho^dag)^dag keeps every product sparse times dense
  const Eigen::MatrixXcd rho_adj = rho.adjoint();
  Eigen::MatrixXcd out = -i * (h_eff_ * rho);
  out += i * (h_eff_ * rho_adj).adjoint();
  for (const Sparse& l : jumps_) out += l * (l * rho_adj).adjoint();
  return out;
}

void FullRhs::apply(const Eigen::Ref<const Eigen::VectorXcd>& rho, Eigen::Ref<Eigen::VectorXcd> out) const {
  const auto dim = static_cast<Eigen::Index>(dim_);
  const Eigen::MatrixXcd r = apply(unflatten(rho, dim));
  out = Eigen::Map<const Eigen::VectorXcd>(r.data(), dim * dim);
}

SymmetricBasis::SymmetricBasis(int num_qubits) : num_qubits_(num_qubits) {
  check_size(num_qubits);
  const SectorWeights weights(num_qubits);
  const Eigen::MatrixXd lower = register_lowering(num_qubits);
  const Eigen::MatrixXd raise = lower.transpose();
  const auto n_states = static_cast<Eigen::Index>(spin_states(num_qubits));

  for (int two_j : spin_lengths(num_qubits)) {
    // weight subspace with m = J: (N + 2J)/2 excited qubits
    const int excited = (num_qubits + two_j) / 2;
    std::vector<Eigen::Index> members;
    for (Eigen::Index b = 0; b < n_states; ++b) {
      if (std::popcount(static_cast<unsigned>(b)) == excited) members.push_back(b);
    }
    const auto w = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd restricted(n_states, w);
    for (Eigen::Index c = 0; c < w; ++c) restricted.col(c) = raise.col(members[static_cast<std::size_t>(c)]);
    const Eigen::MatrixXd gram = restricted.transpose() * restricted;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    std::vector<Eigen::Index> kernel;
    for (Eigen::Index e = 0; e < w; ++e) {
      if (std::abs(solver.eigenvalues()[e]) < 1e-9) kernel.push_back(e);
    }
    if (kernel.size() != weights.degeneracy(two_j)) {
      throw NumericalError("highest-weight space has the wrong dimension for 2J=" + std::to_string(two_j));
    }

    std::vector<Eigen::MatrixXd> ladder;
    Eigen::MatrixXd top = Eigen::MatrixXd::Zero(n_states, static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t q = 0; q < kernel.size(); ++q) {
      const Eigen::VectorXd v = solver.eigenvectors().col(kernel[q]);
      for (Eigen::Index c = 0; c < w; ++c) top(members[static_cast<std::size_t>(c)], static_cast<Eigen::Index>(q)) = v[c];
    }
    ladder.push_back(top);
    for (int two_m = two_j; two_m > -two_j; two_m -= 2) {
      // S-|J,m> = sqrt((J+m)(J-m+1)) |J,m-1>
      const double coeff = 0.5 * std::sqrt(static_cast<double>((two_j + two_m) * (two_j - two_m + 2)));
      ladder.push_back(lower * ladder.back() / coeff);
    }
    vectors_.push_back(std::move(ladder));
  }
}

const Eigen::MatrixXd& SymmetricBasis::vectors(int two_j, int two_m) const {
  if (two_j > num_qubits_ || two_j < 0 || (num_qubits_ - two_j) % 2 != 0 || std::abs(two_m) > two_j ||
      (two_j - two_m) % 2 != 0) {
    throw InvalidArgument("no symmetric basis vector for 2J=" + std::to_string(two_j) +
                          ", 2m=" + std::to_string(two_m));
  }
  return vectors_[static_cast<std::size_t>((num_qubits_ - two_j) / 2)][static_cast<std::size_t>((two_j - two_m) / 2)];
}

double permutation_asymmetry(const FullState& state) {
  double worst = 0.0;
  const Eigen::Index dim = state.rho.rows();
  for (int j = 0; j + 1 < state.num_qubits; ++j) {
    const auto p = transposition(state.num_qubits, j);
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (Eigen::Index r = 0; r < dim; ++r) {
        worst = std::max(worst, std::abs(state.rho(p[static_cast<std::size_t>(r)], p[static_cast<std::size_t>(c)]) -
                                         state.rho(r, c)));
      }
    }
  }
  return worst;
}

DensityState symmetrize(const FullState& state, double tolerance) {
  const int n = state.num_qubits;
  const auto dim = static_cast<Eigen::Index>(full_dim(n));
  if (state.rho.rows() != dim || state.rho.cols() != dim) throw InvalidArgument("full state has the wrong dimension");
  if (permutation_asymmetry(state) > tolerance) throw InvalidArgument("full state is not permutation symmetric");

  const SymmetricBasis basis(n);
  auto layout = build_layout(n);
  DensityState out = DensityState::zero(Support::full(layout));
  const Eigen::Index bdim = n + 1;
  const auto n_states = static_cast<Eigen::Index>(spin_states(n));
  for (int ell = 0; ell < bdim; ++ell) {
    for (int k = 0; k < bdim; ++k) {
      Eigen::MatrixXcd r(n_states, n_states);
      for (Eigen::Index c = 0; c < n_states; ++c) {
        for (Eigen::Index row = 0; row < n_states; ++row) r(row, c) = state.rho(row * bdim + ell, c * bdim + k);
      }
      for (std::size_t s = 0; s < layout->spin_dim(); ++s) {
        const SpinTriple& t = layout->triple(s);
        const Eigen::MatrixXd& vn = basis.vectors(t.two_j, t.two_n);
        const Eigen::MatrixXd& vm = basis.vectors(t.two_j, t.two_m);
        const Complex value = (vn.transpose().cast<Complex>() * r * vm.cast<Complex>()).trace();
        out.set({t, ell, k}, value);
      }
    }
  }
  return out;
}

FullState expand(const DensityState& state) {
  const BasisLayout& layout = state.layout();
  const int n = layout.num_qubits();
  const auto dim = static_cast<Eigen::Index>(full_dim(n));
  const SymmetricBasis basis(n);
  const SectorWeights weights(n);
  const Eigen::Index bdim = n + 1;
  const auto n_states = static_cast<Eigen::Index>(spin_states(n));

  FullState out{n, Eigen::MatrixXcd::Zero(dim, dim)};
  for (std::size_t p = 0; p < state.support().size(); ++p) {
    const Complex value = state.values()[static_cast<Eigen::Index>(p)];
    if (value == Complex{}) continue;
    const Component c = layout.component(state.support().flat(p));
    const Eigen::MatrixXd spin = basis.vectors(c.spin.two_j, c.spin.two_n) *
                                 basis.vectors(c.spin.two_j, c.spin.two_m).transpose() /
                                 static_cast<double>(weights.degeneracy(c.spin.two_j));
    for (Eigen::Index col = 0; col < n_states; ++col) {
      for (Eigen::Index row = 0; row < n_states; ++row) {
        if (spin(row, col) != 0.0) out.rho(row * bdim + c.ell, col * bdim + c.k) += value * spin(row, col);
      }
    }
  }
  return out;
}

FullState full_probe(const ProbeSpec& probe, int num_qubits) {
  check_size(num_qubits);
  if (!probe.valid_for(num_qubits)) {
    throw InvalidArgument("probe " + probe.name() + " is not defined for N=" + std::to_string(num_qubits));
  }
  const auto dim = static_cast<Eigen::Index>(full_dim(num_qubits));
  const Eigen::Index bdim = num_qubits + 1;
  const auto n_states = static_cast<Eigen::Index>(spin_states(num_qubits));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  switch (probe.kind) {
    case ProbeSpec::Kind::Dicke:
      for (Eigen::Index b = 0; b < n_states; ++b) {
        if (std::popcount(static_cast<unsigned>(b)) == probe.excitations) psi[b * bdim] = 1.0;
      }
      break;
    case ProbeSpec::Kind::XPolarized:
      for (Eigen::Index b = 0; b < n_states; ++b) psi[b * bdim] = 1.0;
      break;
    case ProbeSpec::Kind::Ghz:
      psi[0] = 1.0;
      psi[(n_states - 1) * bdim] = 1.0;
      break;
  }
  psi.normalize();
  return {num_qubits, psi * psi.adjoint()};
}

DensityState random_symmetric_state(int num_qubits, std::uint64_t seed) {
  auto layout = build_layout(num_qubits);
  DensityState out = DensityState::zero(Support::full(layout));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int bdim = layout->boson_dim();
  Complex trace{};
  for (int two_j : layout->two_js()) {
    const int dim = (two_j + 1) * bdim;
    Eigen::MatrixXcd a(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (Eigen::Index r = 0; r < dim; ++r) a(r, c) = Complex(normal(rng), normal(rng));
    }
    const Eigen::MatrixXcd block = a * a.adjoint();
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) {
        const SpinTriple t{two_j, two_j - 2 * (r / bdim), two_j - 2 * (c / bdim)};
        out.set({t, r % bdim, c % bdim}, block(r, c));
      }
    }
    trace += block.trace();
  }
  out.values() /= trace.real();
  return out;
}

double full_qfi(const FullState& plus, const FullState& minus, const QfiConfig& config) {
  if (plus.rho.rows() != minus.rho.rows() || plus.rho.cols() != minus.rho.cols()) {
    throw InvalidArgument("full pair states differ in dimension");
  }
  const QfiBlock block{0.5 * (plus.rho + minus.rho), (plus.rho - minus.rho) / config.delta, 1.0};
  return qfi_from_blocks(std::span<const QfiBlock>(&block, 1), config);
}

std::vector<double> full_qfi_series(const ProbeSpec& probe, const SimParams& params, std::span<const double> times,
                                    const QfiConfig& qfi, const IntegratorConfig& integrator,
                                    const FullObserver& observe) {
  params.validate();
  qfi.validate();
  const FullState rho0 = full_probe(probe, params.num_qubits);
  SimParams plus_params = dimensionless_rescale(params);
  SimParams minus_params = plus_params;
  plus_params.g = 1.0 + 0.5 * qfi.delta;
  minus_params.g = 1.0 - 0.5 * qfi.delta;
  const FullRhs rhs_plus(plus_params);
  const FullRhs rhs_minus(minus_params);

  const auto dim = static_cast<Eigen::Index>(rhs_plus.dim());
  const Eigen::Index half = dim * dim;
  Eigen::VectorXcd y(2 * half);
  y.head(half) = Eigen::Map<const Eigen::VectorXcd>(rho0.rho.data(), half);
  y.tail(half) = y.head(half);

  Dop853 solver(
      [&](double, const Eigen::VectorXcd& state, Eigen::VectorXcd& dydt) {
        rhs_plus.apply(state.head(half), dydt.head(half));
        rhs_minus.apply(state.tail(half), dydt.tail(half));
      },
      integrator);

  std::vector<double> out;
  out.reserve(times.size());
  solver.integrate(0.0, y, times, [&](std::size_t index, double t, const Eigen::VectorXcd& state) {
    const FullState p{params.num_qubits, unflatten(state.head(half), dim)};
    const FullState m{params.num_qubits, unflatten(state.tail(half), dim)};
    out.push_back(full_qfi(p, m, qfi));
    if (observe) observe(index, t, p, m);
  });
  return out;
}

}  // namespace permqfi::oracle
