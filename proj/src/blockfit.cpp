#include "qem/blockfit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qem/errors.hpp"
#include "qem/rng.hpp"

namespace qem::blockfit {

namespace {

std::vector<FidelityPoint> sorted_by_k(std::vector<FidelityPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const FidelityPoint& a, const FidelityPoint& b) { return a.k < b.k; });
  return points;
}

void check_positive_fidelities(const std::vector<FidelityPoint>& points) {
  for (const FidelityPoint& pt : points) {
    if (pt.fidelity <= 0.0) {
      throw ValidationError("fit_decay: fidelity at k=" + std::to_string(pt.k) +
                            " is not positive");
    }
  }
}

double log_rms_residual(const std::vector<FidelityPoint>& points, double c,
                        double f) {
  double acc = 0.0;
  for (const FidelityPoint& pt : points) {
    const double r = std::log(pt.fidelity) - (std::log(c) + pt.depth() * std::log(f));
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(points.size()));
}

void clamp_f(DecayFit& fit) {
  if (fit.f > 1.0) {
    fit.f = 1.0;
    fit.f_clamped = true;
    fit.warning = "fitted f exceeded 1 and was clamped (shot noise)";
  }
  if (fit.c > 1.05) {
    fit.c = 1.05;
    if (!fit.warning.empty()) fit.warning += "; ";
    fit.warning += "fitted c exceeded 1.05 and was clamped";
  }
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return out;
}

}  // namespace

const char* fit_method_name(FitMethod method) {
  switch (method) {
    case FitMethod::root_extraction: return "root_extraction";
    case FitMethod::ratio: return "ratio";
    case FitMethod::loglinear: return "loglinear";
  }
  return "?";
}

FitMethod fit_method_from_name(const std::string& name) {
  if (name == "root_extraction") return FitMethod::root_extraction;
  if (name == "ratio") return FitMethod::ratio;
  if (name == "loglinear") return FitMethod::loglinear;
  throw ValidationError("unknown fit method '" + name + "'");
}

const char* c_policy_name(CPolicy policy) {
  return policy == CPolicy::assume_unit ? "assume_unit" : "fit";
}

CPolicy c_policy_from_name(const std::string& name) {
  if (name == "assume_unit" || name == "assume-unit") return CPolicy::assume_unit;
  if (name == "fit") return CPolicy::fit;
  throw ValidationError("unknown c policy '" + name + "'");
}

std::vector<double> identity_distribution(const grover::BlockPair& pair,
                                          const NoiseModel& noise, int k) {
  return noisy_probabilities(
      grover::transpile(grover::build_identity_circuit(pair, k)), noise);
}

FidelityPoint measure_block_fidelity(const grover::BlockPair& pair, int k,
                                     const NoiseModel& noise, long long shots,
                                     std::uint64_t seed) {
  const auto probs = identity_distribution(pair, noise, k);
  const Counts counts = sample_counts(probs, shots, seed);
  FidelityPoint point;
  point.k = k;
  point.fidelity =
      counts.frequency(std::string(static_cast<std::size_t>(pair.block.n_qubits), '0'));
  point.shots = shots;
  return point;
}

std::vector<FidelityPoint> discard_baseline_fidelity(
    std::vector<FidelityPoint>& points, int n_qubits, long long shots,
    double kappa) {
  if (points.empty()) throw ValidationError("discard_baseline_fidelity: no points");
  if (n_qubits < 1) throw ValidationError("discard_baseline_fidelity: bad qubit count");
  (void)shots;  // the cut is a fixed multiple of the baseline, not shot-scaled

  const double cutoff =
      kappa / static_cast<double>(std::size_t{1} << n_qubits);
  std::sort(points.begin(), points.end(),
            [](const FidelityPoint& a, const FidelityPoint& b) { return a.k < b.k; });

  std::vector<FidelityPoint> retained;
  for (FidelityPoint& pt : points) {
    if (pt.k >= 3 && pt.fidelity <= cutoff) {
      pt.discarded = true;
      pt.discard_reason = "indistinguishable from the 1/2^n baseline";
    } else {
      pt.discarded = false;
      pt.discard_reason.clear();
      retained.push_back(pt);
    }
  }
  return retained;
}

DecayFit fit_decay(const std::vector<FidelityPoint>& retained, bool assume_unit_c) {
  if (retained.empty()) throw ValidationError("fit_decay: no retained points");
  const auto pts = sorted_by_k(retained);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].k == pts[i - 1].k) {
      throw ValidationError("fit_decay: duplicate repetition count k=" +
                            std::to_string(pts[i].k));
    }
  }
  check_positive_fidelities(pts);

  DecayFit fit;
  if (assume_unit_c) {
    fit.method = FitMethod::root_extraction;
    fit.c = 1.0;
    double sum = 0.0;
    for (const FidelityPoint& pt : pts) {
      const double root = std::pow(pt.fidelity, 1.0 / pt.depth());
      fit.per_k_estimates.push_back(root);
      sum += root;
    }
    fit.f = sum / static_cast<double>(pts.size());
  } else if (pts.size() == 1) {
    throw ValidationError(
        "fit_decay: one point cannot determine both c and f; pass "
        "assume_unit_c or add depths");
  } else if (pts.size() == 2) {
    fit.method = FitMethod::ratio;
    const FidelityPoint& lo = pts[0];
    const FidelityPoint& hi = pts[1];
    fit.f = std::pow(hi.fidelity / lo.fidelity,
                     1.0 / static_cast<double>(hi.depth() - lo.depth()));
    fit.c = lo.fidelity / std::pow(fit.f, lo.depth());
    for (const FidelityPoint& pt : pts) {
      fit.per_k_estimates.push_back(std::pow(pt.fidelity / fit.c, 1.0 / pt.depth()));
    }
  } else {
    fit.method = FitMethod::loglinear;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const FidelityPoint& pt : pts) {
      const double x = pt.depth();
      const double y = std::log(pt.fidelity);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = sy / n - slope * sx / n;
    fit.f = std::exp(slope);
    fit.c = std::exp(intercept);
    for (const FidelityPoint& pt : pts) {
      fit.per_k_estimates.push_back(std::pow(pt.fidelity / fit.c, 1.0 / pt.depth()));
    }
  }

  clamp_f(fit);
  fit.residual = log_rms_residual(pts, fit.c, fit.f);
  return fit;
}

MitigationResult mitigate(double p_raw, const DecayFit& fit, int r) {
  if (r < 1) throw ValidationError("mitigate: r must be >= 1");
  if (p_raw < 0.0 || p_raw > 1.0) {
    throw ValidationError("mitigate: p_raw must lie in [0, 1]");
  }
  const double factor = fit.c * std::pow(fit.f, r);
  if (factor < 1e-6) {
    throw NumericalError("mitigate: c*f^r = " + std::to_string(factor) +
                         " is below 1e-6; mitigation factor unreliable");
  }
  MitigationResult result;
  result.p_raw = p_raw;
  result.r = r;
  result.fit = fit;
  const double corrected = p_raw / factor;
  result.clipped = corrected > 1.0;
  result.p_mit = std::min(1.0, corrected);
  return result;
}

std::vector<int> default_k_grid(int iterations) {
  const int top = std::max(iterations / 2, 2);
  std::vector<int> grid;
  for (int k = 1; k <= top; ++k) grid.push_back(k);
  return grid;
}

PipelineResult block_pipeline(const grover::GroverSpec& spec,
                              const NoiseModel& noise, long long shots,
                              int repeats, std::uint64_t base_seed,
                              CPolicy c_policy, std::vector<int> k_grid) {
  if (shots < 1) throw ValidationError("block_pipeline: shots must be >= 1");
  if (repeats < 1) throw ValidationError("block_pipeline: repeats must be >= 1");
  if (spec.iterations < 1) {
    throw ValidationError("block_pipeline: spec needs at least one iteration");
  }
  if (k_grid.empty()) k_grid = default_k_grid(spec.iterations);

  const grover::BlockPair pair = grover::build_block(spec);
  const Circuit full = grover::transpile(grover::build_grover(spec));
  const auto full_dist = noisy_probabilities(full, noise);

  std::map<int, std::vector<double>> identity_dists;
  for (int k : k_grid) {
    identity_dists.emplace(k, identity_distribution(pair, noise, k));
  }

  const bool assume_unit = c_policy == CPolicy::assume_unit;
  const std::string zeros(static_cast<std::size_t>(spec.n_qubits), '0');

  PipelineResult result;
  std::vector<double> raw_values, mit_values;
  std::map<int, double> fidelity_sums;

  for (int run = 0; run < repeats; ++run) {
    const std::uint64_t run_seed = derive_seed(base_seed, run);
    const double p_raw =
        sample_counts(full_dist, shots, derive_seed(run_seed, seed_slot::raw))
            .frequency(spec.target);

    std::vector<FidelityPoint> points;
    for (int k : k_grid) {
      const Counts counts = sample_counts(
          identity_dists.at(k), shots, derive_seed(run_seed, seed_slot::block(k)));
      FidelityPoint pt;
      pt.k = k;
      pt.fidelity = counts.frequency(zeros);
      pt.shots = shots;
      points.push_back(pt);
      fidelity_sums[k] += pt.fidelity;
    }

    const auto retained = discard_baseline_fidelity(points, spec.n_qubits, shots);
    const DecayFit fit = fit_decay(retained, assume_unit);
    result.per_run.push_back(mitigate(p_raw, fit, spec.iterations));
    raw_values.push_back(p_raw);
    mit_values.push_back(result.per_run.back().p_mit);
  }

  for (int k : k_grid) {
    FidelityPoint pt;
    pt.k = k;
    pt.fidelity = fidelity_sums[k] / static_cast<double>(repeats);
    pt.shots = shots * repeats;
    result.mean_fidelities.push_back(pt);
  }
  const auto pooled_retained = discard_baseline_fidelity(
      result.mean_fidelities, spec.n_qubits, shots * repeats);
  const DecayFit pooled_fit = fit_decay(pooled_retained, assume_unit);

  const MeanStd raw_stats = mean_std(raw_values);
  const MeanStd mit_stats = mean_std(mit_values);
  result.p_raw_mean = raw_stats.mean;
  result.p_raw_std = raw_stats.std;
  result.p_mit_mean = mit_stats.mean;
  result.p_mit_std = mit_stats.std;
  result.pooled = mitigate(raw_stats.mean, pooled_fit, spec.iterations);
  return result;
}

}  // namespace qem::blockfit
