#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qem/circuit.hpp"

namespace qem {

// Per-gate depolarizing probabilities: p1 after every one-qubit gate, p2
// after every two-qubit gate. Measurement/SPAM error is not modeled.
struct NoiseModel {
  double p1 = 0.0;
  double p2 = 0.0;

  NoiseModel() = default;
  NoiseModel(double p1, double p2);

  bool noiseless() const { return p1 == 0.0 && p2 == 0.0; }
};

// Histogram of measured bitstrings for one execution. Bitstring convention:
// character i holds the value of qubit i, so "10" is qubit 0 = 1, qubit 1 = 0
// and maps to basis index 1.
struct Counts {
  long long shots = 0;
  std::map<std::string, long long> histogram;

  double frequency(const std::string& bitstring) const;
};

std::string index_to_bitstring(std::size_t index, int n_qubits);
std::size_t bitstring_to_index(const std::string& bits);

// Dense density matrix, row-major. Widths up to 10 qubits are the supported
// envelope; 12 is a hard cap.
class DensityState {
 public:
  static constexpr int kMaxQubits = 12;

  explicit DensityState(int n_qubits);  // |0...0><0...0|

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return dim_; }

  std::complex<double>& at(std::size_t row, std::size_t col) {
    return rho_[row * dim_ + col];
  }
  const std::complex<double>& at(std::size_t row, std::size_t col) const {
    return rho_[row * dim_ + col];
  }

  double trace_drift() const;        // |tr(rho) - 1|
  double hermiticity_drift() const;  // max |rho[r][c] - conj(rho[c][r])|
  std::vector<double> diagonal() const;

  bool operator==(const DensityState&) const = default;

 private:
  int n_qubits_;
  std::size_t dim_;
  std::vector<std::complex<double>> rho_;
};

// rho -> U rho U^dagger for one gate.
void apply_gate(DensityState& state, const Gate& gate);

// Uniform non-identity Pauli channel on a 1- or 2-qubit support:
//   rho -> (1-p) rho + p/(4^m - 1) * sum_{P != I} P rho P^dagger.
// With this parameterization p = 3/4 (m = 1) is the fully mixing point.
void apply_depolarizing(DensityState& state, const std::vector<int>& support,
                        double p);

// Exact output distribution of the noisy circuit: the depolarizing channel
// is applied after each gate on exactly that gate's support. Noisy
// evolution requires a transpiled circuit (no support wider than 2).
std::vector<double> noisy_probabilities(const Circuit& circuit,
                                        const NoiseModel& noise);

// Exact output distribution of the noiseless circuit.
std::vector<double> ideal_probabilities(const Circuit& circuit);

// Multinomial sample of a distribution, keyed by bitstring.
Counts sample_counts(const std::vector<double>& probs, long long shots,
                     std::uint64_t seed);

// Full shot-sampled execution; deterministic in (circuit, noise, shots, seed).
Counts run(const Circuit& circuit, const NoiseModel& noise, long long shots,
           std::uint64_t seed);

}  // namespace qem
