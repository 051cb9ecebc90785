#pragma once

#include <string>

#include "qem/circuit.hpp"

namespace qem::grover {

// Search instance: width, marked bitstring, and block repetition count.
struct GroverSpec {
  int n_qubits;
  std::string target;
  int iterations;
  double theta;  // asin(1/sqrt(2^n)), cached

  GroverSpec(int n_qubits, std::string target, int iterations);
};

// round(pi / (4 asin(1/sqrt(2^n))) - 1/2); requires n >= 2.
int optimal_iterations(int n_qubits);

// sin^2((2r+1) asin(1/sqrt(2^n)))
double theoretical_success(int n_qubits, int iterations);

// Phase flip on |target>: X-conjugated multi-controlled Z, no ancillas.
Circuit build_oracle(int n_qubits, const std::string& target);

// H X mcz X H on all qubits (inversion about the mean).
Circuit build_diffusion(int n_qubits);

// H on all qubits, then `iterations` repetitions of oracle followed by
// diffusion. Gate-for-gate, this is the H layer plus `iterations` copies of
// build_block's forward block.
Circuit build_grover(const GroverSpec& spec);

// The repeated unit of the search (diffusion after oracle, no state
// preparation) and its exact inverse.
struct BlockPair {
  Circuit block;
  Circuit inverse_block;
};

BlockPair build_block(const GroverSpec& spec);

// Rewrites CZ/MCZ into {H, X, Z, S, Sdg, T, Tdg, RZ, CX}; every other gate
// passes through unchanged. An m-qubit phase flip becomes a Gray-code parity
// network with 2^m - 1 phase rotations and 2^m - 2 CX; the 3-qubit instance
// is the standard 6-CX / 7-T circuit. Only the overall distribution is
// preserved (a global phase is dropped).
Circuit transpile(const Circuit& circuit);

// Global unitary folding: the gate list of C followed by (C^-1 C) repeated
// (lambda-1)/2 times. Lambda must be odd and positive; the noiseless
// distribution is unchanged and the gate count scales by lambda.
Circuit fold_global(const Circuit& circuit, int lambda);

// k concatenations of (block; inverse_block) acting on |0...0>, with no
// state-preparation prefix. Noiseless outcome is all-zeros with certainty.
Circuit build_identity_circuit(const BlockPair& pair, int k);

}  // namespace qem::grover
