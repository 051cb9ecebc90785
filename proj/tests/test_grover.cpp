#include "doctest.h"

#include <cmath>

#include "qem/errors.hpp"
#include "qem/grover.hpp"
#include "qem/simulator.hpp"
#include "test_util.hpp"

using namespace qem;
using namespace qem::grover;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("optimal iteration counts") {
  CHECK(optimal_iterations(2) == 1);
  CHECK(optimal_iterations(3) == 2);
  CHECK(optimal_iterations(4) == 3);
  CHECK(optimal_iterations(5) == 4);
  CHECK(optimal_iterations(6) == 6);
  CHECK_THROWS_AS(optimal_iterations(1), ValidationError);
}

TEST_CASE("theoretical success values") {
  CHECK(theoretical_success(3, 2) == doctest::Approx(0.9453).epsilon(2e-5));
  CHECK(theoretical_success(4, 3) == doctest::Approx(0.9613).epsilon(5e-5));
  CHECK(theoretical_success(6, 6) == doctest::Approx(0.9966).epsilon(2e-5));
  CHECK(theoretical_success(2, 1) == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 2; n <= 7; ++n) {
    CHECK(theoretical_success(n, 0) ==
          doctest::Approx(1.0 / (1 << n)).epsilon(1e-12));
  }
}

TEST_CASE("grover spec validation") {
  CHECK_THROWS_AS(GroverSpec(1, "1", 1), ValidationError);
  CHECK_THROWS_AS(GroverSpec(3, "11", 1), ValidationError);
  CHECK_THROWS_AS(GroverSpec(3, "1a1", 1), ValidationError);
  CHECK_THROWS_AS(GroverSpec(3, "111", -1), ValidationError);
  const GroverSpec spec(3, "101", 2);
  CHECK(spec.theta == doctest::Approx(std::asin(1.0 / std::sqrt(8.0))));
}

TEST_CASE("built circuits match the closed-form success probability") {
  for (int n = 2; n <= 7; ++n) {
    const int r_opt = optimal_iterations(n);
    std::vector<std::string> targets;
    targets.push_back(std::string(n, '1'));
    targets.push_back('0' + std::string(n - 1, '1'));
    for (const std::string& target : targets) {
      for (int r = 0; r <= r_opt; ++r) {
        const GroverSpec spec(n, target, r);
        const auto probs = ideal_probabilities(build_grover(spec));
        const double expected = theoretical_success(n, r);
        REQUIRE(std::abs(probs[bitstring_to_index(target)] - expected) <= 1e-10);
      }
    }
  }
}

TEST_CASE("zero iterations is the uniform superposition") {
  const auto probs = ideal_probabilities(build_grover(GroverSpec(3, "111", 0)));
  for (double p : probs) CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("block structure") {
  const GroverSpec spec(3, "111", 2);
  const BlockPair pair = build_block(spec);

  SUBCASE("block followed by its inverse is the identity") {
    const auto probs = ideal_probabilities(concat(pair.block, pair.inverse_block));
    CHECK(probs[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("grover circuit is the H layer plus repeated blocks, gate-for-gate") {
    Circuit expected(3);
    for (int q = 0; q < 3; ++q) expected.append(Gate::h(q));
    expected.extend(pair.block);
    expected.extend(pair.block);
    CHECK(build_grover(spec) == expected);
  }
  SUBCASE("construction is deterministic") {
    CHECK(build_block(spec).block == pair.block);
    CHECK(build_block(spec).inverse_block == pair.inverse_block);
  }
}

TEST_CASE("transpile") {
  SUBCASE("circuits without phase flips pass through unchanged") {
    Circuit c(2);
    c.append(Gate::h(0));
    c.append(Gate::cx(0, 1));
    c.append(Gate::rz(1, 0.3));
    CHECK(transpile(c) == c);
  }

  SUBCASE("a 3-qubit phase flip becomes the 6-CX / 7-T network") {
    Circuit c(3);
    c.append(Gate::mcz({0, 1, 2}));
    const Circuit t = transpile(c);
    const GateCounts counts = t.gate_counts();
    CHECK(counts.two_qubit == 6);
    CHECK(counts.one_qubit == 7);
    for (const Gate& g : t.gates) {
      const bool allowed = g.kind == GateKind::CX || g.kind == GateKind::T ||
                           g.kind == GateKind::Tdg;
      CHECK(allowed);
    }
    CHECK(brute_force::equal_up_to_phase(brute_force::circuit_matrix(t),
                                         brute_force::circuit_matrix(c), 1e-10));
  }

  SUBCASE("phase-flip networks are exact for every width up to 5") {
    for (int m = 2; m <= 5; ++m) {
      Circuit c(m);
      std::vector<int> all;
      for (int q = 0; q < m; ++q) all.push_back(q);
      c.append(Gate::mcz(all));
      const Circuit t = transpile(c);
      const GateCounts counts = t.gate_counts();
      CHECK(counts.two_qubit == (1 << m) - 2);
      CHECK(counts.one_qubit == (1 << m) - 1);
      CHECK(counts.multi_qubit == 0);
      REQUIRE(brute_force::equal_up_to_phase(brute_force::circuit_matrix(t),
                                             brute_force::circuit_matrix(c), 1e-9));
    }
  }

  SUBCASE("distributions are unchanged on constructed search circuits") {
    for (int n = 2; n <= 5; ++n) {
      const GroverSpec spec(n, std::string(n, '1'), optimal_iterations(n));
      const Circuit original = build_grover(spec);
      const Circuit t = transpile(original);
      REQUIRE(max_abs_diff(ideal_probabilities(original), ideal_probabilities(t)) <=
              1e-10);
      for (const Gate& g : t.gates) REQUIRE(g.arity() <= 2);
    }
  }

  SUBCASE("transpiling an inverse matches inverting the transpilation") {
    const BlockPair pair = build_block(GroverSpec(3, "101", 2));
    const Circuit via_inverse = transpile(pair.block.inverse());
    const Circuit via_transpile = transpile(pair.block).inverse();
    // not gate-for-gate identical, but the same computation
    Circuit probe = brute_force::random_circuit(3, 8, 55, false);
    CHECK(max_abs_diff(ideal_probabilities(concat(probe, via_inverse)),
                       ideal_probabilities(concat(probe, via_transpile))) <= 1e-10);
  }
}

TEST_CASE("global folding") {
  const Circuit c = brute_force::random_circuit(3, 14, 321);

  SUBCASE("lambda must be odd and positive") {
    CHECK_THROWS_AS(fold_global(c, 0), ValidationError);
    CHECK_THROWS_AS(fold_global(c, 2), ValidationError);
    CHECK_THROWS_AS(fold_global(c, -3), ValidationError);
  }
  SUBCASE("lambda = 1 returns the circuit unchanged") {
    CHECK(fold_global(c, 1) == c);
  }
  SUBCASE("gate count scales by lambda and the distribution is invariant") {
    const auto base = ideal_probabilities(c);
    for (int lambda : {3, 5, 7}) {
      const Circuit folded = fold_global(c, lambda);
      CHECK(folded.gates.size() == c.gates.size() * static_cast<std::size_t>(lambda));
      REQUIRE(max_abs_diff(ideal_probabilities(folded), base) <= 1e-10);
    }
  }
}

TEST_CASE("identity circuits") {
  const GroverSpec spec(3, "111", 2);
  const BlockPair pair = build_block(spec);

  SUBCASE("noiseless outcome is all-zeros with certainty for k = 1..5") {
    for (int k = 1; k <= 5; ++k) {
      const auto probs = ideal_probabilities(build_identity_circuit(pair, k));
      REQUIRE(std::abs(probs[0] - 1.0) <= 1e-10);
    }
  }
  SUBCASE("transpiled size is 2k block transpilations") {
    const long long block_size = transpile(pair.block).gate_counts().total();
    for (int k = 1; k <= 3; ++k) {
      const long long identity_size =
          transpile(build_identity_circuit(pair, k)).gate_counts().total();
      CHECK(identity_size == 2 * k * block_size);
    }
  }
  SUBCASE("k must be positive") {
    CHECK_THROWS_AS(build_identity_circuit(pair, 0), ValidationError);
  }
}

TEST_CASE("oracle conjugates only the zero bits of the target") {
  const Circuit oracle = build_oracle(3, "101");
  int x_count = 0;
  for (const Gate& g : oracle.gates) x_count += g.kind == GateKind::X;
  CHECK(x_count == 2);  // one X before, one after, on the single '0' qubit
  const Circuit all_ones = build_oracle(3, "111");
  CHECK(all_ones.gates.size() == 1);
}
