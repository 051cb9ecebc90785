#include "qem/simulator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qem/errors.hpp"
#include "qem/rng.hpp"

namespace qem {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;

void check_support(const DensityState& state, const std::vector<int>& qubits,
                   const char* who) {
  if (qubits.empty()) throw ValidationError(std::string(who) + ": empty support");
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= state.n_qubits()) {
      throw ValidationError(std::string(who) + ": qubit index out of range");
    }
    for (std::size_t j = i + 1; j < qubits.size(); ++j) {
      if (qubits[i] == qubits[j]) {
        throw ValidationError(std::string(who) + ": duplicate qubit index");
      }
    }
  }
}

// Diagonal phases of one gate over the full basis; nullopt-style dispatch is
// handled by the caller (only diagonal kinds end up here).
std::vector<cplx> diagonal_phases(const DensityState& state, const Gate& g) {
  const std::size_t dim = state.dim();
  std::vector<cplx> phase(dim, cplx(1.0, 0.0));

  auto fill_bit_phase = [&](int qubit, cplx on_one) {
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & bit) phase[i] *= on_one;
    }
  };

  switch (g.kind) {
    case GateKind::Z:
      fill_bit_phase(g.qubits[0], cplx(-1.0, 0.0));
      break;
    case GateKind::S:
      fill_bit_phase(g.qubits[0], cplx(0.0, 1.0));
      break;
    case GateKind::Sdg:
      fill_bit_phase(g.qubits[0], cplx(0.0, -1.0));
      break;
    case GateKind::T:
      fill_bit_phase(g.qubits[0], std::polar(1.0, kPi / 4));
      break;
    case GateKind::Tdg:
      fill_bit_phase(g.qubits[0], std::polar(1.0, -kPi / 4));
      break;
    case GateKind::RZ: {
      const cplx lo = std::polar(1.0, -g.angle / 2);
      const cplx hi = std::polar(1.0, g.angle / 2);
      const std::size_t bit = std::size_t{1} << g.qubits[0];
      for (std::size_t i = 0; i < dim; ++i) phase[i] *= (i & bit) ? hi : lo;
      break;
    }
    case GateKind::CZ:
    case GateKind::MCZ: {
      std::size_t mask = 0;
      for (int q : g.qubits) mask |= std::size_t{1} << q;
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & mask) == mask) phase[i] = cplx(-1.0, 0.0);
      }
      break;
    }
    default:
      throw ValidationError("diagonal_phases: not a diagonal gate");
  }

  if (g.daggered) {
    for (cplx& p : phase) p = std::conj(p);
  }
  return phase;
}

// Base indices with all support bits clear, enumerated by scattering a
// counter over the non-support bit positions.
std::vector<std::size_t> group_bases(int n_qubits, const std::vector<int>& qubits) {
  std::vector<int> rest;
  for (int q = 0; q < n_qubits; ++q) {
    bool in_support = false;
    for (int s : qubits) in_support |= (s == q);
    if (!in_support) rest.push_back(q);
  }
  const std::size_t count = std::size_t{1} << rest.size();
  std::vector<std::size_t> bases(count);
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t base = 0;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      if (t & (std::size_t{1} << j)) base |= std::size_t{1} << rest[j];
    }
    bases[t] = base;
  }
  return bases;
}

std::vector<std::size_t> local_offsets(const std::vector<int>& qubits) {
  const std::size_t m = qubits.size();
  std::vector<std::size_t> offset(std::size_t{1} << m, 0);
  for (std::size_t b = 0; b < offset.size(); ++b) {
    for (std::size_t j = 0; j < m; ++j) {
      if (b & (std::size_t{1} << j)) offset[b] |= std::size_t{1} << qubits[j];
    }
  }
  return offset;
}

// rho -> U rho U^dagger with U a dense 2^m x 2^m matrix on `qubits`
// (row-major, local bit j <-> qubits[j]).
void conjugate_dense(DensityState& state, const std::vector<int>& qubits,
                     const std::vector<cplx>& u) {
  const std::size_t m = qubits.size();
  const std::size_t M = std::size_t{1} << m;
  const std::size_t dim = state.dim();
  const auto bases = group_bases(state.n_qubits(), qubits);
  const auto offset = local_offsets(qubits);

  std::vector<cplx> scratch(M);

  // left multiply: rho <- U rho
  for (std::size_t base : bases) {
    for (std::size_t col = 0; col < dim; ++col) {
      for (std::size_t b = 0; b < M; ++b) {
        cplx acc(0.0, 0.0);
        for (std::size_t bp = 0; bp < M; ++bp) {
          acc += u[b * M + bp] * state.at(base + offset[bp], col);
        }
        scratch[b] = acc;
      }
      for (std::size_t b = 0; b < M; ++b) state.at(base + offset[b], col) = scratch[b];
    }
  }

  // right multiply: rho <- rho U^dagger
  for (std::size_t base : bases) {
    for (std::size_t row = 0; row < dim; ++row) {
      for (std::size_t b = 0; b < M; ++b) {
        cplx acc(0.0, 0.0);
        for (std::size_t bp = 0; bp < M; ++bp) {
          acc += state.at(row, base + offset[bp]) * std::conj(u[b * M + bp]);
        }
        scratch[b] = acc;
      }
      for (std::size_t b = 0; b < M; ++b) state.at(row, base + offset[b]) = scratch[b];
    }
  }
}

std::vector<cplx> dense_matrix(const Gate& g) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<cplx> u;
  switch (g.kind) {
    case GateKind::H:
      u = {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
      break;
    case GateKind::X:
      u = {0, 1, 1, 0};
      break;
    case GateKind::CX:
      // local bit 0 = control, bit 1 = target
      u.assign(16, cplx(0.0, 0.0));
      u[0 * 4 + 0] = 1;
      u[3 * 4 + 1] = 1;
      u[2 * 4 + 2] = 1;
      u[1 * 4 + 3] = 1;
      break;
    default:
      throw ValidationError(std::string("dense_matrix: unsupported kind ") +
                            gate_name(g.kind));
  }
  if (g.daggered) {
    const std::size_t M = g.kind == GateKind::CX ? 4 : 2;
    std::vector<cplx> adj(M * M);
    for (std::size_t r = 0; r < M; ++r) {
      for (std::size_t c = 0; c < M; ++c) adj[r * M + c] = std::conj(u[c * M + r]);
    }
    u = adj;
  }
  return u;
}

DensityState evolve(const Circuit& circuit, const NoiseModel& noise) {
  if (!noise.noiseless()) {
    for (const Gate& g : circuit.gates) {
      if (g.arity() > 2) {
        throw ValidationError(
            "noisy evolution requires a transpiled circuit; found " +
            std::string(gate_name(g.kind)) + " on " +
            std::to_string(g.arity()) + " qubits (transpile first)");
      }
    }
  }
  DensityState state(circuit.n_qubits);
  for (const Gate& g : circuit.gates) {
    apply_gate(state, g);
    if (!noise.noiseless()) {
      const double p = g.arity() == 1 ? noise.p1 : noise.p2;
      if (p > 0.0) apply_depolarizing(state, g.qubits, p);
    }
  }
  return state;
}

std::vector<double> distribution_of(const DensityState& state, double drift_tol) {
  const double drift = state.trace_drift();
  if (drift > drift_tol) {
    throw NumericalError("evolution drifted off trace one by " +
                         std::to_string(drift));
  }
  std::vector<double> probs = state.diagonal();
  double total = 0.0;
  for (double& p : probs) {
    if (p < 0.0) {
      if (p < -1e-10) {
        throw NumericalError("negative outcome probability " + std::to_string(p));
      }
      p = 0.0;
    }
    total += p;
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace

NoiseModel::NoiseModel(double p1_, double p2_) : p1(p1_), p2(p2_) {
  if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0) {
    throw ValidationError("noise model: probabilities must lie in [0, 1]");
  }
}

double Counts::frequency(const std::string& bitstring) const {
  const auto it = histogram.find(bitstring);
  if (it == histogram.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(shots);
}

std::string index_to_bitstring(std::size_t index, int n_qubits) {
  std::string bits(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q) {
    if (index & (std::size_t{1} << q)) bits[static_cast<std::size_t>(q)] = '1';
  }
  return bits;
}

std::size_t bitstring_to_index(const std::string& bits) {
  std::size_t index = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] == '1') {
      index |= std::size_t{1} << q;
    } else if (bits[q] != '0') {
      throw ValidationError("bitstring must contain only '0' and '1'");
    }
  }
  return index;
}

DensityState::DensityState(int n_qubits)
    : n_qubits_(n_qubits), dim_(std::size_t{1} << (n_qubits > 0 ? n_qubits : 0)) {
  if (n_qubits < 1) throw ValidationError("density state: width must be >= 1");
  if (n_qubits > kMaxQubits) {
    throw ValidationError("density state: width " + std::to_string(n_qubits) +
                          " exceeds the " + std::to_string(kMaxQubits) +
                          "-qubit cap");
  }
  rho_.assign(dim_ * dim_, cplx(0.0, 0.0));
  rho_[0] = cplx(1.0, 0.0);
}

double DensityState::trace_drift() const {
  double tr = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) tr += rho_[i * dim_ + i].real();
  return std::abs(tr - 1.0);
}

double DensityState::hermiticity_drift() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = r; c < dim_; ++c) {
      worst = std::max(worst, std::abs(rho_[r * dim_ + c] -
                                       std::conj(rho_[c * dim_ + r])));
    }
  }
  return worst;
}

std::vector<double> DensityState::diagonal() const {
  std::vector<double> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = rho_[i * dim_ + i].real();
  return d;
}

void apply_gate(DensityState& state, const Gate& gate) {
  check_support(state, gate.qubits, "apply_gate");
  if (gate.is_diagonal()) {
    const auto phase = diagonal_phases(state, gate);
    const std::size_t dim = state.dim();
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        state.at(r, c) *= phase[r] * std::conj(phase[c]);
      }
    }
    return;
  }
  conjugate_dense(state, gate.qubits, dense_matrix(gate));
}

void apply_depolarizing(DensityState& state, const std::vector<int>& support,
                        double p) {
  check_support(state, support, "apply_depolarizing");
  if (support.size() > 2) {
    throw ValidationError(
        "apply_depolarizing: supports wider than 2 qubits are unsupported "
        "(transpile first)");
  }
  if (p < 0.0 || p > 1.0) {
    throw ValidationError("apply_depolarizing: p must lie in [0, 1]");
  }
  if (p == 0.0) return;

  // Averaging over the full Pauli group on the support projects onto
  // tr_s(rho) x I/2^m, so the channel reduces to
  //   rho -> a rho + (1-a) (tr_s(rho) x I/2^m),  a = 1 - p 4^m / (4^m - 1)
  const std::size_t m = support.size();
  const std::size_t M = std::size_t{1} << m;
  const double K = static_cast<double>(M) * static_cast<double>(M);  // 4^m
  const double a = 1.0 - p * K / (K - 1.0);
  const double b = 1.0 - a;

  const auto bases = group_bases(state.n_qubits(), support);
  const auto offset = local_offsets(support);
  const std::size_t groups = bases.size();

  std::vector<cplx> reduced(groups * groups, cplx(0.0, 0.0));
  for (std::size_t tr = 0; tr < groups; ++tr) {
    for (std::size_t tc = 0; tc < groups; ++tc) {
      cplx acc(0.0, 0.0);
      for (std::size_t b = 0; b < M; ++b) {
        acc += state.at(bases[tr] + offset[b], bases[tc] + offset[b]);
      }
      reduced[tr * groups + tc] = acc;
    }
  }

  const double mixed_weight = b / static_cast<double>(M);
  for (std::size_t tr = 0; tr < groups; ++tr) {
    for (std::size_t tc = 0; tc < groups; ++tc) {
      const cplx mixed = mixed_weight * reduced[tr * groups + tc];
      for (std::size_t br = 0; br < M; ++br) {
        for (std::size_t bc = 0; bc < M; ++bc) {
          cplx& cell = state.at(bases[tr] + offset[br], bases[tc] + offset[bc]);
          cell *= a;
          if (br == bc) cell += mixed;
        }
      }
    }
  }
}

std::vector<double> noisy_probabilities(const Circuit& circuit,
                                        const NoiseModel& noise) {
  return distribution_of(evolve(circuit, noise), 1e-8);
}

std::vector<double> ideal_probabilities(const Circuit& circuit) {
  return distribution_of(evolve(circuit, NoiseModel{}), 1e-10);
}

Counts sample_counts(const std::vector<double>& probs, long long shots,
                     std::uint64_t seed) {
  int n_qubits = 0;
  while ((std::size_t{1} << n_qubits) < probs.size()) ++n_qubits;
  if ((std::size_t{1} << n_qubits) != probs.size()) {
    throw ValidationError("sample_counts: distribution size is not a power of two");
  }
  const auto drawn = multinomial_sample(probs, shots, seed);
  Counts counts;
  counts.shots = shots;
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    if (drawn[i] > 0) counts.histogram[index_to_bitstring(i, n_qubits)] = drawn[i];
  }
  return counts;
}

Counts run(const Circuit& circuit, const NoiseModel& noise, long long shots,
           std::uint64_t seed) {
  if (shots < 1) throw ValidationError("run: shots must be >= 1");
  return sample_counts(noisy_probabilities(circuit, noise), shots, seed);
}

}  // namespace qem
