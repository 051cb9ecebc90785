#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qem/circuit.hpp"
#include "qem/simulator.hpp"

namespace qem::zne {

// One measured expectation at noise scale lambda.
struct ScaledPoint {
  int lambda = 1;
  double expectation = 0.0;
  long long shots = 0;
  bool discarded = false;
  std::string discard_reason;

  bool operator==(const ScaledPoint&) const = default;
};

enum class Method { richardson, exponential, loglinear, linear };

const char* method_name(Method method);
Method method_from_name(const std::string& name);

struct ZneEstimate {
  double value = 0.0;  // clipped to [0, 1]
  Method method = Method::richardson;
  std::vector<ScaledPoint> points_used;
  bool has_fit = false;  // a, b, p meaningful (exponential / log-linear)
  double fit_a = 0.0;
  double fit_b = 0.0;
  double fit_p = 0.0;
  bool clipped = false;
  std::string warning;
};

// Exact noisy output distribution of the lambda-folded transpiled circuit.
std::vector<double> scaled_distribution(const Circuit& circuit,
                                        const NoiseModel& noise, int lambda);

// Folds the transpiled circuit by lambda, runs it, and returns the observed
// frequency of `target`. Lambda = 1 is the unmitigated raw probability.
ScaledPoint measure_expectation(const Circuit& circuit, const std::string& target,
                                const NoiseModel& noise, long long shots,
                                int lambda, std::uint64_t seed);

// Flags points whose expectation is within shot noise of random guessing:
// E <= 1/2^n + max(3 sqrt(E(1-E)/shots), 0.005). Flags are written in place;
// the retained subset is returned in ascending lambda. If every point falls
// below threshold the lambda = 1 point is kept so the caller can fall back
// to the raw value.
std::vector<ScaledPoint> discard_baseline(std::vector<ScaledPoint>& points,
                                          int n_qubits, long long shots);

// Lagrange polynomial through 1..4 retained points, evaluated at lambda = 0.
// Two points reduce to linear extrapolation; one point is returned as-is.
ZneEstimate richardson_extrapolate(const std::vector<ScaledPoint>& retained);

// Fits E(lambda) = a + b p^lambda. Three equally spaced points solve exactly
// (p^d = (E2-E3)/(E1-E2)); more use damped Gauss-Newton least squares.
// Returns nullopt when the decay is not identifiable (negative ratio, p
// outside (0,1), or vanishing amplitude); callers fall back to Richardson.
std::optional<ZneEstimate> exponential_extrapolate(
    const std::vector<ScaledPoint>& retained);

// Least squares of ln(E - a) against lambda; requires E > a on every
// retained point.
ZneEstimate loglinear_extrapolate(const std::vector<ScaledPoint>& retained,
                                  double offset_a = 0.0);

// Method dispatch with the documented fallbacks to Richardson.
ZneEstimate extrapolate(const std::vector<ScaledPoint>& retained, Method method);

}  // namespace qem::zne
