#include "doctest.h"

#include "qem/circuit.hpp"
#include "qem/errors.hpp"
#include "test_util.hpp"

using namespace qem;

TEST_CASE("gate factories validate and normalize") {
  CHECK_THROWS_AS(Gate::cx(1, 1), ValidationError);
  CHECK_THROWS_AS(Gate::cz(0, 0), ValidationError);
  CHECK_THROWS_AS(Gate::mcz({}), ValidationError);
  CHECK(Gate::mcz({3}).kind == GateKind::Z);
  CHECK(Gate::mcz({0, 1}).kind == GateKind::CZ);
  CHECK(Gate::mcz({0, 1, 2}).kind == GateKind::MCZ);
}

TEST_CASE("append validates support") {
  Circuit c(2);
  CHECK_THROWS_AS(c.append(Gate::h(2)), ValidationError);
  CHECK_THROWS_AS(c.append(Gate::h(-1)), ValidationError);
  Gate bad = Gate::cx(0, 1);
  bad.qubits = {0, 0};
  CHECK_THROWS_AS(c.append(bad), ValidationError);
  CHECK_NOTHROW(c.append(Gate::cx(0, 1)));
}

TEST_CASE("double inversion is the identity gate-for-gate") {
  const Circuit c = brute_force::random_circuit(3, 40, 2024);
  CHECK(c.inverse().inverse() == c);
  CHECK(c.inverse().gates.size() == c.gates.size());
}

TEST_CASE("dagger maps kinds onto adjoint partners") {
  CHECK(Gate::s(0).dagger() == Gate::sdg(0));
  CHECK(Gate::tdg(1).dagger() == Gate::t(1));
  CHECK(Gate::rz(0, 0.5).dagger() == Gate::rz(0, -0.5));
  CHECK(Gate::h(0).dagger() == Gate::h(0));
  CHECK(Gate::cx(0, 1).dagger() == Gate::cx(0, 1));
  // the daggered flag survives so hand-built adjoints stay meaningful
  Gate g = Gate::s(0);
  g.daggered = true;
  CHECK(g.dagger().kind == GateKind::Sdg);
  CHECK(g.dagger().daggered);
}

TEST_CASE("gate counts split by arity") {
  Circuit c(3);
  c.append(Gate::h(0));
  c.append(Gate::cx(0, 1));
  c.append(Gate::mcz({0, 1, 2}));
  c.append(Gate::rz(2, 0.1));
  const GateCounts counts = c.gate_counts();
  CHECK(counts.one_qubit == 2);
  CHECK(counts.two_qubit == 1);
  CHECK(counts.multi_qubit == 1);
  CHECK(counts.total() == 4);
}

TEST_CASE("extend requires matching widths") {
  Circuit a(2), b(3);
  CHECK_THROWS_AS(a.extend(b), ValidationError);
  Circuit c(2);
  c.append(Gate::x(0));
  a.extend(c);
  CHECK(a.gates.size() == 1);
  CHECK(concat(a, c).gates.size() == 2);
}

TEST_CASE("labels are metadata, not identity") {
  Circuit a(2, "one");
  Circuit b(2, "two");
  a.append(Gate::h(0));
  b.append(Gate::h(0));
  CHECK(a == b);
}
