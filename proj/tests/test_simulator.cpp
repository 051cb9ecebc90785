#include "doctest.h"

#include <cmath>
#include <complex>

#include "qem/errors.hpp"
#include "qem/grover.hpp"
#include "qem/rng.hpp"
#include "qem/simulator.hpp"
#include "test_util.hpp"

using namespace qem;
using cplx = std::complex<double>;

namespace {

DensityState prepared(int n, const std::vector<Gate>& gates) {
  DensityState state(n);
  for (const Gate& g : gates) apply_gate(state, g);
  return state;
}

}  // namespace

TEST_CASE("bitstring convention: character i is qubit i") {
  CHECK(index_to_bitstring(1, 2) == "10");
  CHECK(index_to_bitstring(2, 2) == "01");
  CHECK(bitstring_to_index("10") == 1);
  CHECK(bitstring_to_index("111111") == 63);
  CHECK_THROWS_AS(bitstring_to_index("10x"), ValidationError);
}

TEST_CASE("density state construction and caps") {
  DensityState state(2);
  CHECK(state.dim() == 4);
  CHECK(state.at(0, 0) == cplx(1, 0));
  CHECK(state.trace_drift() == 0.0);
  CHECK_THROWS_AS(DensityState(0), ValidationError);
  CHECK_THROWS_AS(DensityState(13), ValidationError);
}

TEST_CASE("single-gate conjugation examples") {
  SUBCASE("H on |0><0| gives the uniform 0.5 matrix") {
    const DensityState state = prepared(1, {Gate::h(0)});
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        CHECK(state.at(r, c).real() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(state.at(r, c).imag() == doctest::Approx(0.0).epsilon(1e-12));
      }
    }
  }
  SUBCASE("X flips |0><0| to |1><1|") {
    const DensityState state = prepared(1, {Gate::x(0)});
    CHECK(std::abs(state.at(1, 1) - cplx(1, 0)) < 1e-14);
    CHECK(std::abs(state.at(0, 0)) < 1e-14);
  }
  SUBCASE("CX fires on a set control") {
    const DensityState state = prepared(2, {Gate::x(0), Gate::cx(0, 1)});
    CHECK(std::abs(state.at(3, 3) - cplx(1, 0)) < 1e-14);  // |11>
  }
  SUBCASE("out-of-range support throws") {
    DensityState state(1);
    CHECK_THROWS_AS(apply_gate(state, Gate::x(1)), ValidationError);
  }
}

TEST_CASE("depolarizing channel") {
  SUBCASE("p = 0 leaves the state bit-for-bit unchanged") {
    DensityState state = prepared(2, {Gate::h(0), Gate::t(0), Gate::cx(0, 1)});
    const DensityState before = state;
    apply_depolarizing(state, {0}, 0.0);
    CHECK(state == before);
  }

  SUBCASE("p = 1 on |0><0| matches the hand-expanded Pauli mixture") {
    // (X rho X + Y rho Y + Z rho Z)/3 for rho = |0><0| is diag(1/3, 2/3)
    DensityState state(1);
    apply_depolarizing(state, {0}, 1.0);
    CHECK(state.at(0, 0).real() == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(state.at(1, 1).real() == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(std::abs(state.at(0, 1)) < 1e-14);
  }

  SUBCASE("p = 3/4 is the fully mixing point") {
    DensityState state = prepared(1, {Gate::h(0), Gate::t(0)});
    apply_depolarizing(state, {0}, 0.75);
    CHECK(state.at(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(state.at(1, 1).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(state.at(0, 1)) < 1e-14);
  }

  SUBCASE("two applications compose like a single depolarizing channel") {
    // 1 - 4r/3 = (1 - 4p/3)(1 - 4q/3)
    const double p = 0.02, q = 0.05;
    const double r = 0.75 * (1.0 - (1.0 - 4 * p / 3) * (1.0 - 4 * q / 3));
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Circuit prep = brute_force::random_circuit(2, 12, seed, false);
      DensityState twice(2), once(2);
      for (const Gate& g : prep.gates) {
        apply_gate(twice, g);
        apply_gate(once, g);
      }
      apply_depolarizing(twice, {0}, p);
      apply_depolarizing(twice, {0}, q);
      apply_depolarizing(once, {0}, r);
      for (std::size_t row = 0; row < 4; ++row) {
        for (std::size_t col = 0; col < 4; ++col) {
          CHECK(std::abs(twice.at(row, col) - once.at(row, col)) < 1e-12);
        }
      }
    }
  }

  SUBCASE("supports wider than two qubits are rejected") {
    DensityState state(3);
    CHECK_THROWS_AS(apply_depolarizing(state, {0, 1, 2}, 0.1), ValidationError);
    CHECK_THROWS_AS(apply_depolarizing(state, {0}, 1.5), ValidationError);
  }
}

TEST_CASE("trace and hermiticity are preserved along noisy evolution") {
  const Circuit circuit = brute_force::random_circuit(3, 25, 777, false);
  DensityState state(3);
  for (const Gate& g : circuit.gates) {
    apply_gate(state, g);
    REQUIRE(state.trace_drift() <= 1e-12);
    REQUIRE(state.hermiticity_drift() <= 1e-10);
    apply_depolarizing(state, g.qubits, g.arity() == 1 ? 1e-3 : 1e-2);
    REQUIRE(state.trace_drift() <= 1e-12);
    REQUIRE(state.hermiticity_drift() <= 1e-10);
  }
}

TEST_CASE("ideal_probabilities") {
  SUBCASE("H tensor H is uniform") {
    Circuit c(2);
    c.append(Gate::h(0));
    c.append(Gate::h(1));
    const auto probs = ideal_probabilities(c);
    for (double p : probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("a circuit followed by its inverse lands on |0...0>") {
    const Circuit c = brute_force::random_circuit(3, 20, 31);
    const auto probs = ideal_probabilities(concat(c, c.inverse()));
    CHECK(probs[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("distribution sums to one") {
    const auto probs = ideal_probabilities(brute_force::random_circuit(3, 30, 5));
    double total = 0.0;
    for (double p : probs) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("matches the dense matrix-product reference on random circuits") {
  // 200 random circuits of up to 30 gates on <= 3 qubits
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const int len = 1 + static_cast<int>(mix64(trial) % 30);
    const Circuit circuit = brute_force::random_circuit(n, len, 9000 + trial);
    const auto expected = brute_force::probabilities(circuit);
    const auto actual = ideal_probabilities(circuit);
    REQUIRE(actual.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      REQUIRE(std::abs(actual[i] - expected[i]) <= 1e-12);
    }
  }
}

TEST_CASE("run") {
  SUBCASE("empty circuit puts all shots on the all-zeros string") {
    const Counts counts = run(Circuit(3), NoiseModel{}, 500, 11);
    CHECK(counts.histogram.at("000") == 500);
    CHECK(counts.frequency("000") == 1.0);
    CHECK(counts.frequency("111") == 0.0);
  }
  SUBCASE("deterministic outcome circuits keep every shot on one string") {
    Circuit c(2);
    c.append(Gate::x(0));
    const Counts counts = run(c, NoiseModel{}, 1000, 5);
    CHECK(counts.histogram.size() == 1);
    CHECK(counts.histogram.at("10") == 1000);
  }
  SUBCASE("identical seeds give identical histograms") {
    Circuit c(2);
    c.append(Gate::h(0));
    c.append(Gate::cx(0, 1));
    const NoiseModel noise(1e-3, 1e-2);
    const Counts a = run(c, noise, 2000, 17);
    const Counts b = run(c, noise, 2000, 17);
    CHECK(a.histogram == b.histogram);
    const Counts other = run(c, noise, 2000, 18);
    CHECK(a.histogram != other.histogram);
  }
  SUBCASE("noisy execution of an untranspiled wide gate is rejected") {
    Circuit c(3);
    c.append(Gate::mcz({0, 1, 2}));
    CHECK_THROWS_AS(run(c, NoiseModel(1e-4, 1e-3), 100, 1), ValidationError);
    CHECK_NOTHROW(run(c, NoiseModel{}, 100, 1));
  }
  SUBCASE("shots must be positive") {
    CHECK_THROWS_AS(run(Circuit(1), NoiseModel{}, 0, 1), ValidationError);
  }
}

TEST_CASE("noiseless 3-qubit search hits the known success probability") {
  const grover::GroverSpec spec(3, "111", 2);
  const auto probs = ideal_probabilities(grover::build_grover(spec));
  CHECK(probs[7] == doctest::Approx(0.9453).epsilon(2e-4));
  // the shot-sampled estimate converges to the same value
  const Counts counts = run(grover::build_grover(spec), NoiseModel{}, 200000, 4);
  CHECK(counts.frequency("111") == doctest::Approx(0.9453).epsilon(5e-3));
}

TEST_CASE("noise model validation") {
  CHECK_THROWS_AS(NoiseModel(-0.1, 0.0), ValidationError);
  CHECK_THROWS_AS(NoiseModel(0.0, 1.1), ValidationError);
  CHECK(NoiseModel(0.0, 0.0).noiseless());
  CHECK_FALSE(NoiseModel(0.0, 1e-3).noiseless());
}
