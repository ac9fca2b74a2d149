#include "dequant/dense.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "dequant/circuit.hpp"
#include "testutil.hpp"

using namespace dequant;
using testutil::tt;

namespace {

double max_amplitude_error(const StateVector& s, const std::vector<Complex>& expected) {
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    worst = std::max(worst, std::abs(s.amplitude(i) - expected[i]));
  }
  return worst;
}

// Applies the circuit's unitary prefix (no measurements).
StateVector apply_all(const Circuit& c) {
  StateVector s(c.width);
  for (const Gate& g : c.gates) s.apply(g, c.oracles);
  return s;
}

}  // namespace

TEST_CASE("basis state preparation") {
  StateVector a = StateVector::basis(3, "001");
  CHECK(a.amplitude(1) == Complex(1));
  CHECK(a.amplitude(0) == Complex(0));

  StateVector b = StateVector::basis(1, "0");
  CHECK(b.amplitude(0) == Complex(1));
  CHECK(b.amplitude(1) == Complex(0));

  StateVector c = StateVector::basis(2, "11");
  CHECK(c.amplitude(3) == Complex(1));

  CHECK_THROWS_AS(StateVector(0), std::invalid_argument);
  CHECK_THROWS_AS(StateVector::basis(2, "0"), std::invalid_argument);
  CHECK_THROWS_AS(StateVector::basis(2, "02"), std::invalid_argument);
}

TEST_CASE("width cap") {
  CHECK_THROWS_AS(StateVector(kDenseMaxQubits + 1), ResourceError);
}

TEST_CASE("hadamard on |0>") {
  StateVector s(1);
  s.apply({GateOp::H, {0}});
  CHECK(std::abs(s.amplitude(0) - Complex(0.70710678)) < 1e-8);
  CHECK(std::abs(s.amplitude(1) - Complex(0.70710678)) < 1e-8);
}

TEST_CASE("equal superposition times |->") {
  // H^x3 |001> = (1/2) sum_x |x>|->: all amplitudes 1/(2 sqrt 2), sign
  // alternating with the last qubit.
  StateVector s = StateVector::basis(3, "001");
  for (int q = 0; q < 3; ++q) s.apply({GateOp::H, {q}});
  const double a = 1.0 / (2.0 * std::sqrt(2.0));
  for (std::size_t i = 0; i < 8; ++i) {
    Complex expected((i & 1) ? -a : a);
    CHECK(std::abs(s.amplitude(i) - expected) < 1e-12);
  }
}

TEST_CASE("oracle imprints (-1)^f(x) on the |-> ancilla") {
  StateVector s = StateVector::basis(3, "001");
  for (int q = 0; q < 3; ++q) s.apply({GateOp::H, {q}});
  OracleMap oracles{{"f", tt("0110")}};
  s.apply({GateOp::Oracle, {0, 1, 2}, 0, "f"}, oracles);

  const double a = 1.0 / (2.0 * std::sqrt(2.0));
  const int sign_of_x[4] = {+1, -1, -1, +1};  // (-1)^f for f = 0110
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(std::abs(s.amplitude(2 * x) - Complex(sign_of_x[x] * a)) < 1e-12);
    CHECK(std::abs(s.amplitude(2 * x + 1) - Complex(-sign_of_x[x] * a)) < 1e-12);
  }
}

TEST_CASE("oracle requires binding and matching arity") {
  StateVector s(3);
  CHECK_THROWS_AS(s.apply({GateOp::Oracle, {0, 1, 2}, 0, "f"}, {}), SimulationError);
  OracleMap wrong{{"f", tt("01")}};
  CHECK_THROWS_AS(s.apply({GateOp::Oracle, {0, 1, 2}, 0, "f"}, wrong), SimulationError);
}

TEST_CASE("deterministic Deutsch-Jozsa distributions") {
  Circuit dj = parse_circuit(
      "qubits 3\nx 2\nh 0\nh 1\nh 2\noracle f 0 1 2\nh 0\nh 1\nh 2\nmeasure 0 1");

  dj.oracles["f"] = tt("0000");
  Distribution constant = run_to_distribution(dj);
  CHECK(constant.probability("00") == 1.0);

  dj.oracles["f"] = tt("0011");
  Distribution balanced = run_to_distribution(dj);
  CHECK(balanced.probability("10") == 1.0);
}

TEST_CASE("Bell statistics") {
  Circuit bell = parse_circuit("qubits 2\nh 0\ncnot 0 1\nmeasure 0 1");
  Distribution d = run_to_distribution(bell);
  CHECK(d.probability("00") == Catch::Approx(0.5).margin(1e-12));
  CHECK(d.probability("11") == Catch::Approx(0.5).margin(1e-12));
  CHECK(d.probability("01") == 0.0);
  CHECK(d.probability("10") == 0.0);
}

TEST_CASE("runner demands a measurement") {
  Circuit c = parse_circuit("qubits 1\nh 0");
  CHECK_THROWS_AS(run_to_distribution(c), SimulationError);
}

TEST_CASE("sampled measurement collapses consistently") {
  // |1> measures to 1 with certainty, state untouched.
  StateVector one = StateVector::basis(1, "1");
  CounterRng rng(7);
  CHECK(one.measure({0}, rng) == "1");
  CHECK(one.amplitude(1) == Complex(1));

  // Bell pair: the partner qubit always matches the measured one.
  int zeros = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    StateVector s(2);
    s.apply({GateOp::H, {0}});
    s.apply({GateOp::Cnot, {0, 1}});
    CounterRng shot = CounterRng::derive(seed, 0);
    std::string first = s.measure({0}, shot);
    std::string second = s.measure({1}, shot);
    CHECK(first == second);
    zeros += first == "0";
  }
  CHECK(zeros > 60);
  CHECK(zeros < 140);

  // (|01> + |10>)/sqrt(2): only the two anticorrelated outcomes appear.
  const double inv = 1.0 / std::sqrt(2.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    StateVector s = StateVector::from_amplitudes(
        {Complex(0), Complex(inv), Complex(inv), Complex(0)});
    CounterRng shot = CounterRng::derive(seed, 1);
    std::string bits = s.measure({0, 1}, shot);
    CHECK((bits == "01" || bits == "10"));
  }
}

TEST_CASE("norm preserved and distribution normalised on random circuits") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Circuit c = testutil::random_unitary_circuit(seed, 1, 6, 30);
    StateVector s(c.width);
    for (const Gate& g : c.gates) {
      s.apply(g, c.oracles);
      REQUIRE(std::abs(s.norm_squared() - 1.0) < 1e-10);
    }
    Gate m{GateOp::Measure, {}};
    for (int q = 0; q < c.width; ++q) m.qubits.push_back(q);
    c.gates.push_back(std::move(m));
    Distribution d = run_to_distribution(c);
    double total = 0.0;
    for (const auto& [bits, p] : d.probabilities()) total += p;
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("applying a gate then its inverse restores the state") {
  for (std::uint64_t seed = 40; seed < 55; ++seed) {
    Circuit prep = testutil::random_unitary_circuit(seed, 3, 3, 12);
    StateVector s = apply_all(prep);
    std::vector<Complex> before = s.amplitudes();

    // Self-inverse gates twice.
    for (Gate g : {Gate{GateOp::H, {1}}, Gate{GateOp::X, {0}}, Gate{GateOp::Y, {2}},
                   Gate{GateOp::Z, {1}}, Gate{GateOp::Cnot, {0, 2}}, Gate{GateOp::Cz, {1, 2}},
                   Gate{GateOp::Ccx, {0, 1, 2}}}) {
      s.apply(g);
      s.apply(g);
      REQUIRE(max_amplitude_error(s, before) < 1e-10);
    }
    // S and T by period; rk(2) has period 4.
    for (int i = 0; i < 4; ++i) s.apply({GateOp::S, {0}});
    REQUIRE(max_amplitude_error(s, before) < 1e-10);
    for (int i = 0; i < 8; ++i) s.apply({GateOp::T, {2}});
    REQUIRE(max_amplitude_error(s, before) < 1e-10);
    for (int i = 0; i < 4; ++i) s.apply({GateOp::Rk, {0, 1}, 2});
    REQUIRE(max_amplitude_error(s, before) < 1e-10);
  }
}

TEST_CASE("f and its negation are physically indistinguishable") {
  Circuit dj = parse_circuit(
      "qubits 3\nx 2\nh 0\nh 1\nh 2\noracle f 0 1 2\nh 0\nh 1\nh 2\nmeasure 0 1");
  for (const char* table : {"0000", "0011", "0110"}) {
    std::string bits = table;
    std::string negated;
    for (char c : bits) negated += c == '0' ? '1' : '0';
    dj.oracles["f"] = tt(bits);
    Distribution a = run_to_distribution(dj);
    dj.oracles["f"] = tt(negated);
    Distribution b = run_to_distribution(dj);
    CHECK(a == b);
  }
}

TEST_CASE("intermediate measurements branch exhaustively") {
  Circuit c = parse_circuit("qubits 1\nh 0\nmeasure 0\nh 0\nmeasure 0");
  Distribution d = run_to_distribution(c);
  for (const char* key : {"00", "01", "10", "11"}) {
    CHECK(d.probability(key) == Catch::Approx(0.25).margin(1e-12));
  }

  // Measuring a Bell pair qubit by qubit keeps the correlation.
  Circuit bell = parse_circuit("qubits 2\nh 0\ncnot 0 1\nmeasure 0\nmeasure 1");
  Distribution bd = run_to_distribution(bell);
  CHECK(bd.probability("00") == Catch::Approx(0.5).margin(1e-12));
  CHECK(bd.probability("11") == Catch::Approx(0.5).margin(1e-12));
  CHECK(bd.support_size() == 2);
}
