#include "qem/zne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qem/errors.hpp"
#include "qem/grover.hpp"

namespace qem::zne {

namespace {

double clip01(double x, bool* clipped = nullptr) {
  if (x < 0.0 || x > 1.0) {
    if (clipped) *clipped = true;
    return std::clamp(x, 0.0, 1.0);
  }
  return x;
}

std::vector<ScaledPoint> sorted_by_lambda(std::vector<ScaledPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const ScaledPoint& a, const ScaledPoint& b) { return a.lambda < b.lambda; });
  return points;
}

void check_distinct_lambdas(const std::vector<ScaledPoint>& sorted) {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lambda == sorted[i - 1].lambda) {
      throw ValidationError("extrapolation: duplicate noise scale lambda=" +
                            std::to_string(sorted[i].lambda));
    }
  }
}

// Solves a symmetric positive 3x3 system in place; returns false when
// effectively singular.
bool solve3(double m[3][3], double rhs[3], double out[3]) {
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[perm[r]][col]) > std::abs(m[perm[pivot]][col])) pivot = r;
    }
    std::swap(perm[col], perm[pivot]);
    const double d = m[perm[col]][col];
    if (std::abs(d) < 1e-300) return false;
    for (int r = col + 1; r < 3; ++r) {
      const double factor = m[perm[r]][col] / d;
      for (int c = col; c < 3; ++c) m[perm[r]][c] -= factor * m[perm[col]][c];
      rhs[perm[r]] -= factor * rhs[perm[col]];
    }
  }
  for (int col = 2; col >= 0; --col) {
    double acc = rhs[perm[col]];
    for (int c = col + 1; c < 3; ++c) acc -= m[perm[col]][c] * out[c];
    out[col] = acc / m[perm[col]][col];
  }
  return true;
}

std::optional<ZneEstimate> exact_three_point(const std::vector<ScaledPoint>& pts) {
  const double l1 = pts[0].lambda, l2 = pts[1].lambda, l3 = pts[2].lambda;
  if (l2 - l1 != l3 - l2) return std::nullopt;  // caller goes to least squares
  const double d = l2 - l1;
  const double den = pts[0].expectation - pts[1].expectation;
  const double num = pts[1].expectation - pts[2].expectation;
  if (den == 0.0) return std::nullopt;
  const double ratio = num / den;
  if (ratio <= 0.0) return std::nullopt;
  const double p = std::pow(ratio, 1.0 / d);
  if (!(p > 0.0) || p >= 1.0) return std::nullopt;
  const double b = den / (std::pow(p, l1) - std::pow(p, l2));
  const double a = pts[0].expectation - b * std::pow(p, l1);

  ZneEstimate est;
  est.method = Method::exponential;
  est.points_used = pts;
  est.has_fit = true;
  est.fit_a = a;
  est.fit_b = b;
  est.fit_p = p;
  est.value = clip01(a + b, &est.clipped);
  return est;
}

double sse_of(const std::vector<ScaledPoint>& pts, double a, double b, double q) {
  double sse = 0.0;
  for (const ScaledPoint& pt : pts) {
    const double r = a + b * std::exp(q * pt.lambda) - pt.expectation;
    sse += r * r;
  }
  return sse;
}

std::optional<ZneEstimate> gauss_newton(const std::vector<ScaledPoint>& pts) {
  // initial guess: exact solve on first/middle/last, else flat-offset decay
  double a = 0.0, b = 0.0, q = 0.0;
  {
    std::vector<ScaledPoint> probe = {pts.front(), pts[pts.size() / 2], pts.back()};
    // force equal spacing for the probe by synthesizing lambda positions
    const double den = probe[0].expectation - probe[1].expectation;
    const double num = probe[1].expectation - probe[2].expectation;
    if (den != 0.0 && num / den > 0.0) {
      const double span1 = probe[1].lambda - probe[0].lambda;
      const double span2 = probe[2].lambda - probe[1].lambda;
      const double p0 = std::pow(num / den, 1.0 / (0.5 * (span1 + span2)));
      if (p0 > 0.0 && p0 < 1.0) {
        q = std::log(p0);
        b = den / (std::exp(q * probe[0].lambda) - std::exp(q * probe[1].lambda));
        a = probe[0].expectation - b * std::exp(q * probe[0].lambda);
      }
    }
    if (b == 0.0) {
      double lo = pts.front().expectation, hi = pts.front().expectation;
      for (const auto& pt : pts) {
        lo = std::min(lo, pt.expectation);
        hi = std::max(hi, pt.expectation);
      }
      if (hi - lo < 1e-14) return std::nullopt;  // constant data, no decay to fit
      a = lo;
      b = hi - lo;
      q = -0.5;
    }
  }

  double sse = sse_of(pts, a, b, q);
  for (int iter = 0; iter < 200; ++iter) {
    double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double jtr[3] = {0, 0, 0};
    for (const ScaledPoint& pt : pts) {
      const double e = std::exp(q * pt.lambda);
      const double resid = a + b * e - pt.expectation;
      const double jac[3] = {1.0, e, b * pt.lambda * e};
      for (int r = 0; r < 3; ++r) {
        jtr[r] += jac[r] * resid;
        for (int c = 0; c < 3; ++c) jtj[r][c] += jac[r] * jac[c];
      }
    }
    double step[3];
    if (!solve3(jtj, jtr, step)) break;

    double scale = 1.0;
    bool improved = false;
    for (int half = 0; half < 25; ++half) {
      const double na = a - scale * step[0];
      const double nb = b - scale * step[1];
      const double nq = q - scale * step[2];
      const double nsse = sse_of(pts, na, nb, nq);
      if (nsse <= sse) {
        const double move = std::abs(scale * step[0]) + std::abs(scale * step[1]) +
                            std::abs(scale * step[2]);
        a = na;
        b = nb;
        q = nq;
        improved = sse - nsse > 1e-18 || move > 1e-12;
        sse = nsse;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
  }

  const double p = std::exp(q);
  if (!(p > 0.0) || p >= 1.0 || std::abs(b) < 1e-12) return std::nullopt;

  ZneEstimate est;
  est.method = Method::exponential;
  est.points_used = pts;
  est.has_fit = true;
  est.fit_a = a;
  est.fit_b = b;
  est.fit_p = p;
  est.value = clip01(a + b, &est.clipped);
  return est;
}

}  // namespace

const char* method_name(Method method) {
  switch (method) {
    case Method::richardson: return "richardson";
    case Method::exponential: return "exponential";
    case Method::loglinear: return "loglinear";
    case Method::linear: return "linear";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "richardson") return Method::richardson;
  if (name == "exponential") return Method::exponential;
  if (name == "loglinear") return Method::loglinear;
  if (name == "linear") return Method::linear;
  throw ValidationError("unknown extrapolation method '" + name + "'");
}

std::vector<double> scaled_distribution(const Circuit& circuit,
                                        const NoiseModel& noise, int lambda) {
  return noisy_probabilities(grover::fold_global(grover::transpile(circuit), lambda),
                             noise);
}

ScaledPoint measure_expectation(const Circuit& circuit, const std::string& target,
                                const NoiseModel& noise, long long shots,
                                int lambda, std::uint64_t seed) {
  const auto probs = scaled_distribution(circuit, noise, lambda);
  const Counts counts = sample_counts(probs, shots, seed);
  ScaledPoint point;
  point.lambda = lambda;
  point.expectation = counts.frequency(target);
  point.shots = shots;
  return point;
}

std::vector<ScaledPoint> discard_baseline(std::vector<ScaledPoint>& points,
                                          int n_qubits, long long shots) {
  if (points.empty()) throw ValidationError("discard_baseline: no points");
  if (n_qubits < 1) throw ValidationError("discard_baseline: bad qubit count");
  if (shots < 1) throw ValidationError("discard_baseline: shots must be >= 1");

  const double baseline = 1.0 / static_cast<double>(std::size_t{1} << n_qubits);
  std::sort(points.begin(), points.end(),
            [](const ScaledPoint& a, const ScaledPoint& b) { return a.lambda < b.lambda; });

  for (ScaledPoint& pt : points) {
    const double e = pt.expectation;
    const double sigma = std::sqrt(std::max(e * (1.0 - e), 0.0) /
                                   static_cast<double>(shots));
    const double threshold = baseline + std::max(3.0 * sigma, 0.005);
    if (e <= threshold) {
      pt.discarded = true;
      pt.discard_reason = "within noise of the 1/2^n baseline";
    } else {
      pt.discarded = false;
      pt.discard_reason.clear();
    }
  }

  std::vector<ScaledPoint> retained;
  for (const ScaledPoint& pt : points) {
    if (!pt.discarded) retained.push_back(pt);
  }
  if (retained.empty()) {
    // keep the unfolded point so the estimate can fall back to the raw value
    for (ScaledPoint& pt : points) {
      if (pt.lambda == points.front().lambda) {
        pt.discarded = false;
        pt.discard_reason = "retained as fallback: every scale sits at baseline";
        retained.push_back(pt);
        break;
      }
    }
  }
  return retained;
}

ZneEstimate richardson_extrapolate(const std::vector<ScaledPoint>& retained) {
  if (retained.empty() || retained.size() > 4) {
    throw ValidationError("richardson_extrapolate: needs 1 to 4 retained points");
  }
  const auto pts = sorted_by_lambda(retained);
  check_distinct_lambdas(pts);

  double value = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double weight = 1.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i) continue;
      weight *= (0.0 - pts[j].lambda) /
                static_cast<double>(pts[i].lambda - pts[j].lambda);
    }
    value += weight * pts[i].expectation;
  }

  ZneEstimate est;
  est.method = pts.size() == 2 ? Method::linear : Method::richardson;
  est.points_used = pts;
  est.value = clip01(value, &est.clipped);
  if (pts.size() == 1) {
    est.warning = "single retained point; estimate equals E(lambda=" +
                  std::to_string(pts[0].lambda) + ")";
  }
  return est;
}

std::optional<ZneEstimate> exponential_extrapolate(
    const std::vector<ScaledPoint>& retained) {
  if (retained.size() < 3) {
    throw ValidationError("exponential_extrapolate: needs at least 3 points");
  }
  const auto pts = sorted_by_lambda(retained);
  check_distinct_lambdas(pts);
  if (pts.size() == 3) {
    if (auto est = exact_three_point(pts)) return est;
    // unequal spacing falls through to least squares; a sign failure is final
    const double den = pts[0].expectation - pts[1].expectation;
    const double num = pts[1].expectation - pts[2].expectation;
    if (den == 0.0 || num / den <= 0.0 ||
        (pts[1].lambda - pts[0].lambda == pts[2].lambda - pts[1].lambda)) {
      return std::nullopt;
    }
  }
  return gauss_newton(pts);
}

ZneEstimate loglinear_extrapolate(const std::vector<ScaledPoint>& retained,
                                  double offset_a) {
  if (retained.size() < 2) {
    throw ValidationError("loglinear_extrapolate: needs at least 2 points");
  }
  const auto pts = sorted_by_lambda(retained);
  check_distinct_lambdas(pts);
  for (const ScaledPoint& pt : pts) {
    if (pt.expectation <= offset_a) {
      throw ValidationError(
          "loglinear_extrapolate: expectation <= offset at lambda=" +
          std::to_string(pt.lambda));
    }
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const ScaledPoint& pt : pts) {
    const double x = pt.lambda;
    const double y = std::log(pt.expectation - offset_a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = sy / n - slope * sx / n;

  ZneEstimate est;
  est.method = Method::loglinear;
  est.points_used = pts;
  est.has_fit = true;
  est.fit_a = offset_a;
  est.fit_b = std::exp(intercept);
  est.fit_p = std::exp(slope);
  est.value = clip01(offset_a + est.fit_b, &est.clipped);
  return est;
}

ZneEstimate extrapolate(const std::vector<ScaledPoint>& retained, Method method) {
  switch (method) {
    case Method::exponential: {
      if (retained.size() >= 3) {
        if (auto est = exponential_extrapolate(retained)) return *est;
      }
      ZneEstimate est = richardson_extrapolate(retained);
      est.warning = "exponential fit not identifiable; fell back to Richardson";
      return est;
    }
    case Method::loglinear: {
      bool positive = !retained.empty();
      for (const ScaledPoint& pt : retained) positive &= pt.expectation > 0.0;
      if (positive && retained.size() >= 2) return loglinear_extrapolate(retained);
      ZneEstimate est = richardson_extrapolate(retained);
      est.warning = "log-linear fit unavailable; fell back to Richardson";
      return est;
    }
    case Method::linear:
    case Method::richardson:
    default:
      return richardson_extrapolate(retained);
  }
}

}  // namespace qem::zne
