#include "dequant/algorithms.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>
#include <string>

#include "dequant/census.hpp"
#include "dequant/circuit.hpp"
#include "dequant/dense.hpp"
#include "dequant/distribution.hpp"
#include "testutil.hpp"

using namespace dequant;
using testutil::tt;

TEST_CASE("classification of 2-input functions") {
  CHECK(classify_function(tt("1111")) == FunctionClass{FunctionClass::Constant, 1});
  CHECK(classify_function(tt("0000")) == FunctionClass{FunctionClass::Constant, 0});
  CHECK(classify_function(tt("0110")).tag == FunctionClass::Balanced);
  CHECK(classify_function(tt("1110")).tag == FunctionClass::Invalid);

  int constant = 0, balanced = 0, invalid = 0;
  for (int idx = 0; idx < 16; ++idx) {
    switch (classify_function(tt(testutil::all_tables_n2(idx))).tag) {
      case FunctionClass::Constant: ++constant; break;
      case FunctionClass::Balanced: ++balanced; break;
      case FunctionClass::Invalid: ++invalid; break;
    }
  }
  CHECK(constant == 2);
  CHECK(balanced == 6);
  CHECK(invalid == 8);
}

TEST_CASE("census: exact counts and validity probability") {
  CensusReport one = function_census(1);
  CHECK(one.n_constant == 2);
  CHECK(one.n_balanced == 2);
  CHECK(one.n_invalid == 0);
  CHECK(one.p_valid == mpq_class(1));

  CensusReport two = function_census(2);
  CHECK(two.n_constant == 2);
  CHECK(two.n_balanced == 6);
  CHECK(two.n_invalid == 8);
  CHECK(two.p_valid == mpq_class(1, 2));

  CHECK_THROWS_AS(function_census(0), std::invalid_argument);
  CHECK_THROWS_AS(function_census(17), std::invalid_argument);
}

TEST_CASE("census n = 3 against exhaustive enumeration") {
  // Independent oracle: classify all 256 truth tables directly.
  int constant = 0, balanced = 0, invalid = 0;
  for (int pattern = 0; pattern < 256; ++pattern) {
    int ones = 0;
    for (int b = 0; b < 8; ++b) ones += (pattern >> b) & 1;
    if (ones == 0 || ones == 8) {
      ++constant;
    } else if (ones == 4) {
      ++balanced;
    } else {
      ++invalid;
    }
  }
  REQUIRE(constant == 2);
  REQUIRE(balanced == 70);
  REQUIRE(invalid == 184);

  CensusReport three = function_census(3);
  CHECK(three.n_constant == constant);
  CHECK(three.n_balanced == balanced);
  CHECK(three.n_invalid == invalid);
  CHECK(three.p_valid == mpq_class(9, 32));  // 72/256 canonicalised
}

TEST_CASE("census scales to n = 16 exactly") {
  CensusReport r = function_census(16);
  CHECK(r.n_constant == 2);
  mpz_class total;
  mpz_ui_pow_ui(total.get_mpz_t(), 2, 65536);
  CHECK(r.n_total == total);
  CHECK(r.n_constant + r.n_balanced + r.n_invalid == total);
  CHECK(r.p_valid > 0);
}

TEST_CASE("Deutsch-Jozsa circuit construction") {
  Circuit c2 = build_dj_circuit(2);
  CHECK(c2.width == 3);
  CHECK(c2.gates.size() == 9);
  CHECK(c2.gates.front() == Gate{GateOp::X, {2}});
  CHECK(c2.gates[4] == Gate{GateOp::Oracle, {0, 1, 2}, 0, "f"});
  CHECK(c2.gates.back() == Gate{GateOp::Measure, {0, 1}});

  Circuit c1 = build_dj_circuit(1);
  CHECK(c1.width == 2);
  CHECK(c1.gates.size() == 7);

  Circuit c4 = build_dj_circuit(4);
  CHECK(c4.width == 5);
  CHECK(c4.gates[6] == Gate{GateOp::Oracle, {0, 1, 2, 3, 4}, 0, "f"});
}

TEST_CASE("quantum solver on dense and blockstate") {
  CHECK(dj_quantum_solve(tt("0000"), "dense").classification == FunctionClass::Constant);
  CHECK(dj_quantum_solve(tt("0011"), "blockstate", 3).classification ==
        FunctionClass::Balanced);

  DjResult r = dj_quantum_solve(tt("0110"), "dense");
  CHECK(r.classification == FunctionClass::Balanced);
  CHECK(r.outcome_bits == "11");

  CHECK_THROWS_AS(dj_quantum_solve(tt("0001"), "dense"), std::invalid_argument);
}

TEST_CASE("de-quantised solver identifies the function, not just the class") {
  DjDequantResult constant = dj_dequantised_solve(tt("1111"));
  CHECK(constant.classification == FunctionClass::Constant);
  CHECK(constant.f00 == 1);
  CHECK(constant.readings[0] == AxisReading{Axis::Imaginary, -1});
  CHECK(constant.readings[1] == AxisReading{Axis::Imaginary, -1});
  CHECK(constant.reconstructed == tt("1111"));

  DjDequantResult balanced = dj_dequantised_solve(tt("0011"));
  CHECK(balanced.classification == FunctionClass::Balanced);
  CHECK(balanced.readings[0].axis == Axis::Real);
  CHECK(balanced.readings[1].axis == Axis::Imaginary);
  CHECK(balanced.f00 == 0);
  CHECK(balanced.reconstructed == tt("0011"));

  CHECK_THROWS_AS(dj_dequantised_solve(tt("1110")), std::invalid_argument);
  CHECK_THROWS_AS(dj_dequantised_solve(tt("00000000")), std::invalid_argument);
}

TEST_CASE("solvers agree on every valid function; only one resolves negation") {
  for (const std::string& bits : testutil::valid_tables_n2()) {
    TruthTable f = tt(bits);
    DjResult dense = dj_quantum_solve(f, "dense");
    DjResult block = dj_quantum_solve(f, "blockstate", 3);
    DjDequantResult dq = dj_dequantised_solve(f);

    CHECK(dense.classification == dq.classification);
    CHECK(block.classification == dq.classification);
    CHECK(dense.outcome_bits == dq.outcome_bits);
    CHECK(dq.reconstructed == f);

    std::string negated;
    for (char c : bits) negated += c == '0' ? '1' : '0';
    CHECK(dj_quantum_solve(tt(negated), "dense").outcome_bits == dense.outcome_bits);
    CHECK(dj_dequantised_solve(tt(negated)).f00 != dq.f00);
  }

  // The 1-input (Deutsch) case, exhaustively.
  for (const char* bits : {"00", "11", "01", "10"}) {
    TruthTable f = tt(bits);
    DjDequantResult dq = dj_dequantised_solve(f);
    CHECK(dq.reconstructed == f);
    CHECK(dj_quantum_solve(f, "dense").classification == dq.classification);
  }
}

TEST_CASE("de-quantised solver runs in exact arithmetic end to end") {
  // The spot where floats would creep in is the pipeline; its outputs are
  // integer pairs on an axis, never approximate.
  for (const std::string& bits : testutil::valid_tables_n2()) {
    DjDequantResult r = dj_dequantised_solve(tt(bits));
    for (const AxisReading& a : r.readings) {
      CHECK(a.axis != Axis::Mixed);
      CHECK((a.sign == 1 || a.sign == -1));
    }
  }
}

TEST_CASE("semiclassical sampler: single qubit is a fair coin") {
  int ones = 0;
  CounterRng rng(99);
  for (int trial = 0; trial < 10000; ++trial) {
    ones += semiclassical_qft_sample({QubitState{}}, rng) == "1";
  }
  CHECK(ones > 4800);
  CHECK(ones < 5200);
}

TEST_CASE("semiclassical sampler: basis input gives the uniform distribution") {
  // Dense oracle: the Fourier transform of a basis state has equal
  // magnitudes everywhere, so the measured distribution is uniform.
  std::vector<QubitState> input{QubitState{Complex(1), Complex(0)},
                                QubitState{Complex(0), Complex(1)},
                                QubitState{Complex(0), Complex(1)}};
  std::map<std::string, std::uint64_t> counts;
  const std::uint64_t shots = 100000;
  for (std::uint64_t s = 0; s < shots; ++s) {
    CounterRng rng = CounterRng::derive(31, s);
    ++counts[semiclassical_qft_sample(input, rng)];
  }
  Distribution empirical = Distribution::empirical(counts);
  std::map<std::string, double> uniform;
  for (int i = 0; i < 8; ++i) {
    std::string key;
    for (int b = 2; b >= 0; --b) key += static_cast<char>('0' + ((i >> b) & 1));
    uniform[key] = 0.125;
  }
  CHECK(tvd(empirical, Distribution::exact(uniform)) < 0.02);
}

TEST_CASE("semiclassical sampler matches the dense Fourier distribution") {
  // Dense reference: the same product input pushed through the Fourier
  // circuit and measured exactly.
  const int n = 3;
  CounterRng setup(77);
  std::vector<QubitState> input;
  std::vector<Complex> product{Complex(1)};
  for (int q = 0; q < n; ++q) {
    double theta = setup.uniform() * std::numbers::pi;
    double phi = setup.uniform() * 2.0 * std::numbers::pi;
    QubitState qs{Complex(std::cos(theta / 2)),
                  std::polar(std::sin(theta / 2), phi)};
    input.push_back(qs);
    std::vector<Complex> next(product.size() * 2);
    for (std::size_t i = 0; i < product.size(); ++i) {
      next[2 * i] = product[i] * qs.amp0;
      next[2 * i + 1] = product[i] * qs.amp1;
    }
    product = std::move(next);
  }
  StateVector state = StateVector::from_amplitudes(product);
  Circuit qft = build_qft_circuit(n, false);
  for (const Gate& g : qft.gates) state.apply(g);
  Distribution expected = state.measure_distribution({0, 1, 2});

  std::map<std::string, std::uint64_t> counts;
  const std::uint64_t shots = 100000;
  for (std::uint64_t s = 0; s < shots; ++s) {
    CounterRng rng = CounterRng::derive(78, s);
    ++counts[semiclassical_qft_sample(input, rng)];
  }
  CHECK(tvd(Distribution::empirical(counts), expected) < 0.02);
}

TEST_CASE("semiclassical sampler costs O(n) updates and rejects bad input") {
  std::vector<QubitState> input(32, QubitState{Complex(1.0 / std::sqrt(2.0)),
                                               Complex(1.0 / std::sqrt(2.0))});
  CounterRng rng(5);
  std::size_t updates = 0;
  std::string bits = semiclassical_qft_sample(input, rng, &updates);
  CHECK(bits.size() == 32);
  CHECK(updates <= 2 * input.size());

  CHECK_THROWS_AS(semiclassical_qft_sample({QubitState{Complex(1), Complex(1)}}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(semiclassical_qft_sample({}, rng), std::invalid_argument);
}

TEST_CASE("Deutsch-Jozsa circuits are recognised for the phasebit backend") {
  Circuit dj = build_dj_circuit(2);
  dj.oracles["f"] = tt("0110");
  std::optional<TruthTable> matched = match_dj_circuit(dj);
  REQUIRE(matched.has_value());
  CHECK(*matched == tt("0110"));

  CHECK_FALSE(match_dj_circuit(build_ghz_circuit(3)).has_value());
  Circuit unbound = build_dj_circuit(2);
  CHECK_FALSE(match_dj_circuit(unbound).has_value());
}
