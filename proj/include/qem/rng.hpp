#pragma once

#include <cstdint>
#include <vector>

namespace qem {

// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators", OOPSLA 2014). 64-bit state, one mix per output, period 2^64.
// Chosen so that per-run streams are pure functions of (base seed, index)
// and never depend on scheduling or call order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // uniform in [0, 1) with 53-bit resolution
  double next_double();

 private:
  std::uint64_t state_;
};

// SplitMix64 output function applied to a single value.
std::uint64_t mix64(std::uint64_t x);

// Stream seed for run `index` under `base`. Stable contract: changing it
// invalidates recorded results.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Sub-seed slots within one run, so that the raw, folded and identity
// measurements draw independent streams regardless of evaluation order.
namespace seed_slot {
constexpr std::uint64_t raw = 0;
inline std::uint64_t zne(int lambda) { return 1000 + static_cast<std::uint64_t>(lambda); }
inline std::uint64_t block(int k) { return 2000 + static_cast<std::uint64_t>(k); }
}  // namespace seed_slot

// Multinomial draw of `shots` samples from `probs` by inverse-CDF lookup.
// Entries within `drift_tol` below zero are clamped to zero and the vector
// is implicitly renormalized; larger drift throws NumericalError.
std::vector<long long> multinomial_sample(const std::vector<double>& probs,
                                          long long shots, std::uint64_t seed,
                                          double drift_tol = 1e-8);

}  // namespace qem
