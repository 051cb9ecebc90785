#include "doctest.h"

#include <cmath>

#include "qem/blockfit.hpp"
#include "qem/errors.hpp"
#include "qem/grover.hpp"

using namespace qem;
using namespace qem::blockfit;

namespace {

std::vector<FidelityPoint> points_of(
    std::initializer_list<std::pair<int, double>> vals, long long shots = 4000) {
  std::vector<FidelityPoint> points;
  for (const auto& [k, f] : vals) {
    FidelityPoint pt;
    pt.k = k;
    pt.fidelity = f;
    pt.shots = shots;
    points.push_back(pt);
  }
  return points;
}

std::vector<FidelityPoint> exact_model(double c, double f,
                                       std::initializer_list<int> ks) {
  std::vector<FidelityPoint> points;
  for (int k : ks) {
    FidelityPoint pt;
    pt.k = k;
    pt.fidelity = c * std::pow(f, 2 * k);
    pt.shots = 4000;
    points.push_back(pt);
  }
  return points;
}

}  // namespace

TEST_CASE("root extraction reproduces the reference per-point values") {
  const auto fit =
      fit_decay(points_of({{1, 0.7549}, {2, 0.57015}, {3, 0.43658}}), true);
  CHECK(fit.method == FitMethod::root_extraction);
  CHECK(fit.c == 1.0);
  REQUIRE(fit.per_k_estimates.size() == 3);
  CHECK(fit.per_k_estimates[0] == doctest::Approx(0.8689).epsilon(1e-4));
  CHECK(fit.per_k_estimates[1] == doctest::Approx(0.8690).epsilon(1e-4));
  CHECK(fit.per_k_estimates[2] == doctest::Approx(0.871).epsilon(1e-4));
  CHECK(fit.f >= 0.8676);
  CHECK(fit.f <= 0.8716);
}

TEST_CASE("two-point ratio fits reproduce the reference columns") {
  const auto three_qubit = fit_decay(points_of({{1, 0.642}, {2, 0.428}}), false);
  CHECK(three_qubit.method == FitMethod::ratio);
  CHECK(three_qubit.f == doctest::Approx(0.816).epsilon(1.3e-3));
  CHECK(three_qubit.c == doctest::Approx(0.963).epsilon(1e-3));

  const auto four_qubit = fit_decay(points_of({{1, 0.201}, {2, 0.082}}), false);
  CHECK(four_qubit.f == doctest::Approx(0.639).epsilon(3.2e-3));
  CHECK(four_qubit.c == doctest::Approx(0.493).epsilon(1.1e-2));
}

TEST_CASE("every branch recovers exact model data") {
  const double c = 0.9, f = 0.95;

  const auto ll = fit_decay(exact_model(c, f, {1, 2, 3, 4}), false);
  CHECK(ll.method == FitMethod::loglinear);
  CHECK(ll.c == doctest::Approx(c).epsilon(1e-10));
  CHECK(ll.f == doctest::Approx(f).epsilon(1e-10));
  CHECK(ll.residual <= 1e-12);

  const auto ratio = fit_decay(exact_model(c, f, {1, 2}), false);
  CHECK(ratio.c == doctest::Approx(c).epsilon(1e-10));
  CHECK(ratio.f == doctest::Approx(f).epsilon(1e-10));

  const auto roots = fit_decay(exact_model(1.0, f, {1, 2, 3}), true);
  CHECK(roots.f == doctest::Approx(f).epsilon(1e-10));
}

TEST_CASE("branches agree on exact unit-c data") {
  const auto data = exact_model(1.0, 0.87, {1, 2, 3});
  const double f_root = fit_decay(data, true).f;
  const double f_ll = fit_decay(data, false).f;
  const double f_ratio =
      fit_decay(exact_model(1.0, 0.87, {1, 2}), false).f;
  CHECK(std::abs(f_root - f_ll) <= 1e-8);
  CHECK(std::abs(f_root - f_ratio) <= 1e-8);
}

TEST_CASE("three equally spaced points reduce to the closed-form slope") {
  // least squares through depths 2,4,6 has slope (ln F(6) - ln F(2)) / 4
  const auto noisy = points_of({{1, 0.76}, {2, 0.55}, {3, 0.45}});
  const auto fit = fit_decay(noisy, false);
  const double expected_f =
      std::exp((std::log(0.45) - std::log(0.76)) / 4.0);
  CHECK(fit.f == doctest::Approx(expected_f).epsilon(1e-12));
}

TEST_CASE("fit contract checks") {
  CHECK_THROWS_AS(fit_decay({}, true), ValidationError);
  CHECK_THROWS_AS(fit_decay(points_of({{1, 0.5}}), false), ValidationError);
  CHECK_THROWS_AS(fit_decay(points_of({{1, 0.0}, {2, 0.1}}), true), ValidationError);
  CHECK_THROWS_AS(fit_decay(points_of({{1, 0.5}, {1, 0.4}}), true), ValidationError);
  CHECK_NOTHROW(fit_decay(points_of({{1, 0.5}}), true));
}

TEST_CASE("rising fidelities clamp f to one with a warning") {
  const auto fit = fit_decay(points_of({{1, 0.8}, {2, 0.9}}), false);
  CHECK(fit.f == 1.0);
  CHECK(fit.f_clamped);
  CHECK(!fit.warning.empty());
}

TEST_CASE("fidelity baseline discarding") {
  SUBCASE("k >= 3 at the baseline is dropped") {
    auto points = points_of({{1, 0.263}, {2, 0.086}, {3, 0.039}});
    const auto retained = discard_baseline_fidelity(points, 6, 4000);
    REQUIRE(retained.size() == 2);
    CHECK(points[2].discarded);
  }
  SUBCASE("informative k = 3 points survive") {
    auto points = points_of({{1, 0.755}, {2, 0.57}, {3, 0.437}});
    CHECK(discard_baseline_fidelity(points, 6, 4000).size() == 3);
  }
  SUBCASE("k in {1, 2} is always retained, even at the baseline") {
    auto points = points_of({{1, 0.01}, {2, 0.005}});
    CHECK(discard_baseline_fidelity(points, 6, 4000).size() == 2);
  }
  SUBCASE("kappa controls the cut") {
    auto points = points_of({{1, 0.5}, {2, 0.3}, {3, 0.04}});
    CHECK(discard_baseline_fidelity(points, 6, 4000, 3.0).size() == 2);
    auto again = points_of({{1, 0.5}, {2, 0.3}, {3, 0.04}});
    CHECK(discard_baseline_fidelity(again, 6, 4000, 1.0).size() == 3);
  }
}

TEST_CASE("mitigation") {
  SUBCASE("reference reconstruction: 0.42 / 0.87^6") {
    DecayFit fit;
    fit.c = 1.0;
    fit.f = 0.87;
    const auto result = mitigate(0.42, fit, 6);
    CHECK(result.p_mit == doctest::Approx(0.9686).epsilon(5e-4));
    CHECK_FALSE(result.clipped);
  }
  SUBCASE("noiseless blocks leave the probability unchanged") {
    DecayFit fit;  // c = f = 1
    CHECK(mitigate(0.42, fit, 6).p_mit == 0.42);
  }
  SUBCASE("reconstructions beyond one are clipped") {
    DecayFit fit;
    fit.c = 1.0;
    fit.f = 0.7;
    const auto result = mitigate(0.6, fit, 3);
    CHECK(result.p_mit == 1.0);
    CHECK(result.clipped);
  }
  SUBCASE("vanishing mitigation factors are refused") {
    DecayFit fit;
    fit.c = 1.0;
    fit.f = 0.05;
    CHECK_THROWS_AS(mitigate(0.01, fit, 6), NumericalError);
  }
  SUBCASE("argument checks") {
    DecayFit fit;
    CHECK_THROWS_AS(mitigate(0.5, fit, 0), ValidationError);
    CHECK_THROWS_AS(mitigate(1.5, fit, 2), ValidationError);
  }
}

TEST_CASE("default k grid") {
  CHECK(default_k_grid(6) == std::vector<int>{1, 2, 3});
  CHECK(default_k_grid(4) == std::vector<int>{1, 2});
  CHECK(default_k_grid(3) == std::vector<int>{1, 2});  // minimum grid
  CHECK(default_k_grid(2) == std::vector<int>{1, 2});
}

TEST_CASE("block identity fidelity measurements") {
  const grover::GroverSpec spec(3, "111", 2);
  const grover::BlockPair pair = grover::build_block(spec);

  SUBCASE("noiseless fidelity is exactly one for every k") {
    for (int k = 1; k <= 3; ++k) {
      const auto pt = measure_block_fidelity(pair, k, NoiseModel{}, 500, 9);
      CHECK(pt.fidelity == 1.0);
    }
  }
  SUBCASE("doubling k roughly squares the decay") {
    const NoiseModel noise(1e-4, 1e-3);
    const double f2 = identity_distribution(pair, noise, 1)[0];
    const double f4 = identity_distribution(pair, noise, 2)[0];
    CHECK(f4 == doctest::Approx(f2 * f2).epsilon(0.02));
  }
}

TEST_CASE("block pipeline") {
  const grover::GroverSpec spec(3, "111", 2);

  SUBCASE("zero noise mitigates to the raw value near theory") {
    const auto result =
        block_pipeline(spec, NoiseModel{}, 2000, 3, 11, CPolicy::assume_unit);
    CHECK(result.pooled.fit.f == 1.0);
    CHECK(result.pooled.p_mit == result.pooled.p_raw);
    CHECK(result.p_raw_mean == doctest::Approx(0.9453).epsilon(0.05));
  }
  SUBCASE("noisy pipeline lifts the success probability") {
    const auto result = block_pipeline(spec, NoiseModel(1e-3, 1e-2), 2000, 4, 11,
                                       CPolicy::assume_unit);
    CHECK(result.pooled.p_mit > result.p_raw_mean);
    CHECK(result.pooled.p_mit <= 1.0);
    CHECK(result.per_run.size() == 4);
    for (const auto& run : result.per_run) {
      CHECK(run.p_mit >= 0.0);
      CHECK(run.p_mit <= 1.0);
    }
    CHECK(result.mean_fidelities.size() == 2);  // k grid {1, 2} for r = 2
  }
  SUBCASE("c policies differ only in the fitted constant") {
    const auto fit_c = block_pipeline(spec, NoiseModel(1e-3, 1e-2), 2000, 4, 11,
                                      CPolicy::fit);
    CHECK(fit_c.pooled.fit.method == FitMethod::ratio);
    CHECK(fit_c.pooled.fit.c != 1.0);
  }
}
