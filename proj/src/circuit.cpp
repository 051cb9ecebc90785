#include "qem/circuit.hpp"

#include <algorithm>
#include <utility>

#include "qem/errors.hpp"

namespace qem {

const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::S: return "s";
    case GateKind::Sdg: return "sdg";
    case GateKind::T: return "t";
    case GateKind::Tdg: return "tdg";
    case GateKind::RZ: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::MCZ: return "mcz";
  }
  return "?";
}

namespace {

Gate one_qubit(GateKind kind, int q) {
  Gate g;
  g.kind = kind;
  g.qubits = {q};
  return g;
}

}  // namespace

Gate Gate::h(int q) { return one_qubit(GateKind::H, q); }
Gate Gate::x(int q) { return one_qubit(GateKind::X, q); }
Gate Gate::z(int q) { return one_qubit(GateKind::Z, q); }
Gate Gate::s(int q) { return one_qubit(GateKind::S, q); }
Gate Gate::sdg(int q) { return one_qubit(GateKind::Sdg, q); }
Gate Gate::t(int q) { return one_qubit(GateKind::T, q); }
Gate Gate::tdg(int q) { return one_qubit(GateKind::Tdg, q); }

Gate Gate::rz(int q, double angle) {
  Gate g = one_qubit(GateKind::RZ, q);
  g.angle = angle;
  return g;
}

Gate Gate::cx(int control, int target) {
  if (control == target) {
    throw ValidationError("cx: control and target must differ");
  }
  Gate g;
  g.kind = GateKind::CX;
  g.qubits = {control, target};
  return g;
}

Gate Gate::cz(int a, int b) {
  if (a == b) throw ValidationError("cz: qubits must differ");
  Gate g;
  g.kind = GateKind::CZ;
  g.qubits = {a, b};
  return g;
}

Gate Gate::mcz(std::vector<int> qubits) {
  if (qubits.empty()) throw ValidationError("mcz: empty support");
  if (qubits.size() == 1) return z(qubits[0]);
  if (qubits.size() == 2) return cz(qubits[0], qubits[1]);
  Gate g;
  g.kind = GateKind::MCZ;
  g.qubits = std::move(qubits);
  return g;
}

Gate Gate::dagger() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::S: g.kind = GateKind::Sdg; break;
    case GateKind::Sdg: g.kind = GateKind::S; break;
    case GateKind::T: g.kind = GateKind::Tdg; break;
    case GateKind::Tdg: g.kind = GateKind::T; break;
    case GateKind::RZ: g.angle = -angle; break;
    default: break;  // H, X, Z, CX, CZ, MCZ are self-adjoint
  }
  return g;
}

bool Gate::is_diagonal() const {
  switch (kind) {
    case GateKind::Z:
    case GateKind::S:
    case GateKind::Sdg:
    case GateKind::T:
    case GateKind::Tdg:
    case GateKind::RZ:
    case GateKind::CZ:
    case GateKind::MCZ:
      return true;
    default:
      return false;
  }
}

Circuit::Circuit(int n, std::string label_) : n_qubits(n), label(std::move(label_)) {
  if (n < 1) throw ValidationError("circuit: width must be >= 1");
}

void Circuit::append(Gate gate) {
  if (gate.qubits.empty()) throw ValidationError("append: gate without support");
  for (std::size_t i = 0; i < gate.qubits.size(); ++i) {
    const int q = gate.qubits[i];
    if (q < 0 || q >= n_qubits) {
      throw ValidationError(std::string("append: qubit index out of range for ") +
                            gate_name(gate.kind));
    }
    for (std::size_t j = i + 1; j < gate.qubits.size(); ++j) {
      if (gate.qubits[j] == q) {
        throw ValidationError(std::string("append: duplicate qubit index in ") +
                              gate_name(gate.kind));
      }
    }
  }
  gates.push_back(std::move(gate));
}

void Circuit::extend(const Circuit& other) {
  if (other.n_qubits != n_qubits) {
    throw ValidationError("extend: circuit widths differ");
  }
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

Circuit Circuit::inverse() const {
  Circuit inv(n_qubits, label);
  inv.gates.reserve(gates.size());
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    inv.gates.push_back(it->dagger());
  }
  return inv;
}

GateCounts Circuit::gate_counts() const {
  GateCounts c;
  for (const Gate& g : gates) {
    if (g.arity() == 1) ++c.one_qubit;
    else if (g.arity() == 2) ++c.two_qubit;
    else ++c.multi_qubit;
  }
  return c;
}

Circuit concat(const Circuit& first, const Circuit& then) {
  Circuit out = first;
  out.extend(then);
  return out;
}

}  // namespace qem
