#include "qem/grover.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <utility>

#include "qem/errors.hpp"

namespace qem::grover {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_of(int n_qubits) {
  return std::asin(1.0 / std::sqrt(static_cast<double>(std::size_t{1} << n_qubits)));
}

void check_target(int n_qubits, const std::string& target) {
  if (static_cast<int>(target.size()) != n_qubits) {
    throw ValidationError("target: length must equal the qubit count");
  }
  for (char c : target) {
    if (c != '0' && c != '1') {
      throw ValidationError("target: must contain only '0' and '1'");
    }
  }
}

// Phase rotation by pi/2^(m-1) on the accumulator wire of an m-qubit parity
// network; named gates are used where the angle has one.
void emit_parity_phase(Circuit& out, int qubit, bool positive, int m) {
  switch (m) {
    case 2:
      out.append(positive ? Gate::s(qubit) : Gate::sdg(qubit));
      return;
    case 3:
      out.append(positive ? Gate::t(qubit) : Gate::tdg(qubit));
      return;
    default: {
      const double magnitude = kPi / static_cast<double>(std::size_t{1} << (m - 1));
      out.append(Gate::rz(qubit, positive ? magnitude : -magnitude));
      return;
    }
  }
}

// Phase flip on the all-ones substate of `qubits` (m >= 2), written as a
// parity network: wire j accumulates, in Gray-code order, every parity that
// has qubit j as its highest member, and receives a rotation of
// pi (-1)^(|S|+1) / 2^(m-1) per parity S. A single closing CX returns each
// accumulator to its own wire value. Gate count: 2^m - 1 rotations,
// 2^m - 2 CX. The dropped global phase is unobservable here.
void emit_phase_flip(Circuit& out, const std::vector<int>& qubits) {
  const int m = static_cast<int>(qubits.size());
  for (int j = 0; j < m; ++j) {
    emit_parity_phase(out, qubits[j], true, m);  // S = {j}
    if (j == 0) continue;
    unsigned prev = 0;
    for (unsigned i = 1; i < (1u << j); ++i) {
      const unsigned gray = i ^ (i >> 1);
      const int flipped = std::countr_zero(prev ^ gray);
      out.append(Gate::cx(qubits[flipped], qubits[j]));
      const bool positive = std::popcount(gray) % 2 == 0;  // |S| = popcount + 1
      emit_parity_phase(out, qubits[j], positive, m);
      prev = gray;
    }
    out.append(Gate::cx(qubits[std::countr_zero(prev)], qubits[j]));
  }
}

}  // namespace

GroverSpec::GroverSpec(int n, std::string target_, int iterations_)
    : n_qubits(n), target(std::move(target_)), iterations(iterations_),
      theta(0.0) {
  if (n < 2) throw ValidationError("grover spec: need at least 2 qubits");
  check_target(n, target);
  if (iterations < 0) throw ValidationError("grover spec: iterations must be >= 0");
  theta = angle_of(n);
}

int optimal_iterations(int n_qubits) {
  if (n_qubits < 2) {
    throw ValidationError("optimal_iterations: need at least 2 qubits");
  }
  const double theta = angle_of(n_qubits);
  return static_cast<int>(std::lround(kPi / (4.0 * theta) - 0.5));
}

double theoretical_success(int n_qubits, int iterations) {
  if (n_qubits < 2) {
    throw ValidationError("theoretical_success: need at least 2 qubits");
  }
  if (iterations < 0) {
    throw ValidationError("theoretical_success: iterations must be >= 0");
  }
  const double s = std::sin((2.0 * iterations + 1.0) * angle_of(n_qubits));
  return s * s;
}

Circuit build_oracle(int n_qubits, const std::string& target) {
  check_target(n_qubits, target);
  Circuit oracle(n_qubits, "oracle " + target);
  std::vector<int> all(n_qubits);
  for (int q = 0; q < n_qubits; ++q) all[q] = q;

  for (int q = 0; q < n_qubits; ++q) {
    if (target[static_cast<std::size_t>(q)] == '0') oracle.append(Gate::x(q));
  }
  oracle.append(Gate::mcz(all));
  for (int q = 0; q < n_qubits; ++q) {
    if (target[static_cast<std::size_t>(q)] == '0') oracle.append(Gate::x(q));
  }
  return oracle;
}

Circuit build_diffusion(int n_qubits) {
  Circuit diffusion(n_qubits, "diffusion");
  std::vector<int> all(n_qubits);
  for (int q = 0; q < n_qubits; ++q) all[q] = q;

  for (int q = 0; q < n_qubits; ++q) diffusion.append(Gate::h(q));
  for (int q = 0; q < n_qubits; ++q) diffusion.append(Gate::x(q));
  diffusion.append(Gate::mcz(all));
  for (int q = 0; q < n_qubits; ++q) diffusion.append(Gate::x(q));
  for (int q = 0; q < n_qubits; ++q) diffusion.append(Gate::h(q));
  return diffusion;
}

Circuit build_grover(const GroverSpec& spec) {
  Circuit circuit(spec.n_qubits,
                  "grover n=" + std::to_string(spec.n_qubits) + " r=" +
                      std::to_string(spec.iterations) + " target=" + spec.target);
  for (int q = 0; q < spec.n_qubits; ++q) circuit.append(Gate::h(q));
  const Circuit oracle = build_oracle(spec.n_qubits, spec.target);
  const Circuit diffusion = build_diffusion(spec.n_qubits);
  for (int r = 0; r < spec.iterations; ++r) {
    circuit.extend(oracle);
    circuit.extend(diffusion);
  }
  return circuit;
}

BlockPair build_block(const GroverSpec& spec) {
  Circuit block(spec.n_qubits, "block target=" + spec.target);
  block.extend(build_oracle(spec.n_qubits, spec.target));
  block.extend(build_diffusion(spec.n_qubits));
  BlockPair pair{block, block.inverse()};
  pair.inverse_block.label = "block target=" + spec.target + " inverse";
  return pair;
}

Circuit transpile(const Circuit& circuit) {
  Circuit out(circuit.n_qubits, circuit.label);
  for (const Gate& g : circuit.gates) {
    if (g.kind == GateKind::CZ || g.kind == GateKind::MCZ) {
      emit_phase_flip(out, g.qubits);  // self-adjoint, daggered is moot
    } else {
      out.append(g);
    }
  }
  return out;
}

Circuit fold_global(const Circuit& circuit, int lambda) {
  if (lambda < 1 || lambda % 2 == 0) {
    throw ValidationError("fold_global: lambda must be odd and positive");
  }
  Circuit folded = circuit;
  if (lambda > 1) {
    const Circuit inverse = circuit.inverse();
    for (int pair = 0; pair < (lambda - 1) / 2; ++pair) {
      folded.extend(inverse);
      folded.extend(circuit);
    }
    folded.label = circuit.label + " lambda=" + std::to_string(lambda);
  }
  return folded;
}

Circuit build_identity_circuit(const BlockPair& pair, int k) {
  if (k < 1) throw ValidationError("build_identity_circuit: k must be >= 1");
  if (pair.block.n_qubits != pair.inverse_block.n_qubits) {
    throw ValidationError("build_identity_circuit: mismatched block widths");
  }
  Circuit identity(pair.block.n_qubits, "identity k=" + std::to_string(k));
  for (int rep = 0; rep < k; ++rep) {
    identity.extend(pair.block);
    identity.extend(pair.inverse_block);
  }
  return identity;
}

}  // namespace qem::grover
