#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qem/grover.hpp"
#include "qem/simulator.hpp"

namespace qem::blockfit {

// Return probability of |0...0> after k block-pair repetitions (depth 2k
// core-block applications).
struct FidelityPoint {
  int k = 1;
  double fidelity = 0.0;
  long long shots = 0;
  bool discarded = false;
  std::string discard_reason;

  int depth() const { return 2 * k; }
  bool operator==(const FidelityPoint&) const = default;
};

enum class FitMethod { root_extraction, ratio, loglinear };

const char* fit_method_name(FitMethod method);
FitMethod fit_method_from_name(const std::string& name);

// Fitted decay model F(depth) = c * f^depth.
struct DecayFit {
  double c = 1.0;  // initial-state fidelity; exactly 1 under root extraction
  double f = 1.0;  // fidelity retained per core-block application
  FitMethod method = FitMethod::root_extraction;
  double residual = 0.0;  // RMS of ln F - ln(c f^2k) over the fitted points
  std::vector<double> per_k_estimates;
  bool f_clamped = false;
  std::string warning;
};

struct MitigationResult {
  double p_raw = 0.0;
  double p_mit = 0.0;
  int r = 0;  // core-block count of the full circuit
  DecayFit fit;
  bool clipped = false;
};

enum class CPolicy { assume_unit, fit };

const char* c_policy_name(CPolicy policy);
CPolicy c_policy_from_name(const std::string& name);

// Exact noisy distribution of the transpiled k-fold block-identity circuit.
std::vector<double> identity_distribution(const grover::BlockPair& pair,
                                          const NoiseModel& noise, int k);

FidelityPoint measure_block_fidelity(const grover::BlockPair& pair, int k,
                                     const NoiseModel& noise, long long shots,
                                     std::uint64_t seed);

// Points with k >= 3 are flagged when F <= kappa / 2^n; k in {1, 2} is
// always kept. Flags are written in place; the retained subset comes back
// sorted by k.
std::vector<FidelityPoint> discard_baseline_fidelity(
    std::vector<FidelityPoint>& points, int n_qubits, long long shots,
    double kappa = 3.0);

// Branches:
//  - assume_unit_c: per-point roots f_i = F^(1/2k), f = mean, c = 1
//  - two points:    f = (F_b/F_a)^(1/(2(k_b-k_a))), c = F_a / f^(2k_a)
//  - three or more: least squares of ln F against depth 2k
// Fits with f > 1 are clamped to 1 with a warning (shot noise at very low
// noise can push ratios past unity).
DecayFit fit_decay(const std::vector<FidelityPoint>& retained, bool assume_unit_c);

// p_mit = min(1, p_raw / (c f^r)); refuses when c f^r < 1e-6.
MitigationResult mitigate(double p_raw, const DecayFit& fit, int r);

// Full per-run pipeline result plus the pooled fit over run-averaged
// fidelities.
struct PipelineResult {
  MitigationResult pooled;
  std::vector<MitigationResult> per_run;
  std::vector<FidelityPoint> mean_fidelities;
  double p_raw_mean = 0.0;
  double p_raw_std = 0.0;
  double p_mit_mean = 0.0;
  double p_mit_std = 0.0;
};

// Measures P_raw and F_I(2k) per run with derived seeds, discards, fits,
// mitigates, and aggregates across runs. k_grid defaults to
// 1..max(floor(r/2), 2).
PipelineResult block_pipeline(const grover::GroverSpec& spec,
                              const NoiseModel& noise, long long shots,
                              int repeats, std::uint64_t base_seed,
                              CPolicy c_policy, std::vector<int> k_grid = {});

std::vector<int> default_k_grid(int iterations);

}  // namespace qem::blockfit
