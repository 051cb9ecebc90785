#include "qem/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qem/errors.hpp"

namespace qem {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitMix64::next() { return finalize(state_ += kGamma); }

double SplitMix64::next_double() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t mix64(std::uint64_t x) { return finalize(x + kGamma); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base + mix64(index));
}

std::vector<long long> multinomial_sample(const std::vector<double>& probs,
                                          long long shots, std::uint64_t seed,
                                          double drift_tol) {
  if (probs.empty()) {
    throw ValidationError("multinomial_sample: empty probability vector");
  }
  if (shots < 1) {
    throw ValidationError("multinomial_sample: shots must be >= 1");
  }

  std::vector<double> cdf(probs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double p = probs[i];
    if (p < 0.0) {
      if (p < -drift_tol) {
        throw NumericalError("multinomial_sample: probability " +
                             std::to_string(p) + " below tolerance");
      }
      p = 0.0;
    }
    total += p;
    cdf[i] = total;
  }
  if (std::abs(total - 1.0) > drift_tol) {
    throw NumericalError("multinomial_sample: probabilities sum to " +
                         std::to_string(total));
  }

  SplitMix64 rng(seed);
  std::vector<long long> counts(probs.size(), 0);
  for (long long s = 0; s < shots; ++s) {
    const double u = rng.next_double() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx =
        it == cdf.end() ? probs.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
    ++counts[idx];
  }
  return counts;
}

}  // namespace qem
