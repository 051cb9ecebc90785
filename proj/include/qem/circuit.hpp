#pragma once

#include <string>
#include <vector>

namespace qem {

enum class GateKind { H, X, Z, S, Sdg, T, Tdg, RZ, CX, CZ, MCZ };

const char* gate_name(GateKind kind);

// One gate application. `qubits` is the ordered support: CX is
// {control, target}; CZ and MCZ are symmetric phase flips on the all-ones
// substate of their support. `daggered` requests the adjoint of the base
// matrix; inversion maps kinds onto their adjoint partners (S <-> Sdg,
// T <-> Tdg, RZ negates its angle) so the flag stays meaningful for gates
// built by hand.
struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;
  double angle = 0.0;  // RZ only
  bool daggered = false;

  static Gate h(int q);
  static Gate x(int q);
  static Gate z(int q);
  static Gate s(int q);
  static Gate sdg(int q);
  static Gate t(int q);
  static Gate tdg(int q);
  static Gate rz(int q, double angle);
  static Gate cx(int control, int target);
  static Gate cz(int a, int b);
  // Phase flip on the all-ones substate of `qubits`; normalizes to Z / CZ
  // for supports of size one / two.
  static Gate mcz(std::vector<int> qubits);

  Gate dagger() const;
  int arity() const { return static_cast<int>(qubits.size()); }
  bool is_diagonal() const;

  bool operator==(const Gate&) const = default;
};

struct GateCounts {
  long long one_qubit = 0;
  long long two_qubit = 0;
  long long multi_qubit = 0;  // arity > 2, pre-transpilation only
  long long total() const { return one_qubit + two_qubit + multi_qubit; }
};

// Ordered gate list over a fixed register width. `label` is metadata and
// does not participate in equality.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  std::string label;

  Circuit() = default;
  explicit Circuit(int n_qubits, std::string label = "");

  void append(Gate gate);
  void extend(const Circuit& other);
  Circuit inverse() const;
  GateCounts gate_counts() const;

  bool operator==(const Circuit& other) const {
    return n_qubits == other.n_qubits && gates == other.gates;
  }
};

Circuit concat(const Circuit& first, const Circuit& then);

}  // namespace qem
