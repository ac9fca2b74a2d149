#include "dequant/phasebit.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <optional>
#include <vector>

#include "dequant/circuit.hpp"
#include "dequant/dense.hpp"
#include "testutil.hpp"

using namespace dequant;
using testutil::tt;

namespace {

// Independent oracle: enumerate every candidate factorisation
// sign * (1, c_0) x ... x (1, c_{n-1}) and compare the full tensor.
std::optional<SignFactorisation> brute_force_factorisation(const std::vector<int>& signs) {
  int n = 0;
  while ((std::size_t{1} << n) < signs.size()) ++n;
  for (int overall : {1, -1}) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      bool match = true;
      for (std::size_t idx = 0; idx < signs.size() && match; ++idx) {
        int value = overall;
        for (int q = 0; q < n; ++q) {
          bool qubit_is_one = ((idx >> (n - 1 - q)) & 1) != 0;
          bool factor_negative = ((mask >> q) & 1) != 0;
          if (qubit_is_one && factor_negative) value = -value;
        }
        match = value == signs[idx];
      }
      if (match) {
        SignFactorisation f;
        f.overall_sign = overall;
        for (int q = 0; q < n; ++q) f.qubit_signs.push_back(((mask >> q) & 1) ? -1 : 1);
        return f;
      }
    }
  }
  return std::nullopt;
}

std::vector<int> signs_of(const TruthTable& f) {
  std::vector<int> signs;
  for (std::uint8_t v : f.values) signs.push_back(v ? -1 : 1);
  return signs;
}

}  // namespace

TEST_CASE("phase pairs canonicalise powers of two into the scale") {
  CHECK(PhasePair(2, 2, 0) == PhasePair(1, 1, 2));
  CHECK(PhasePair(4, 0, -4) == PhasePair(1, 0, 0));
  CHECK(PhasePair(-2, 6, 0) == PhasePair(-1, 3, 2));
  CHECK_THROWS_AS(PhasePair(0, 0), std::invalid_argument);

  PhasePair p(1, 1);
  CHECK(std::abs(p.to_complex() - std::complex<double>(1, 1)) < 1e-15);
  PhasePair half = p.halved();
  CHECK(std::abs(half.to_complex() - std::complex<double>(0.5, 0.5)) < 1e-15);
}

TEST_CASE("gaussian-integer products are exact") {
  PhasePair a(1, 1), b(1, -1);
  CHECK(a * b == PhasePair(2, 0, 0));
  CHECK(a * a == PhasePair(0, 2, 0));
  CHECK((a * b).halved() == PhasePair(1, 0, 0));
  CHECK(-a == PhasePair(-1, -1, 0));
}

TEST_CASE("equal superposition register") {
  PhaseRegister two = equal_superposition(2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == PhasePair(1, 1));
  CHECK(two[1] == PhasePair(1, 1));

  CHECK(equal_superposition(1).size() == 1);
  CHECK(equal_superposition(5) == PhaseRegister(5, PhasePair(1, 1)));
  CHECK_THROWS_AS(equal_superposition(0), std::invalid_argument);
}

TEST_CASE("black-box action on the equal superposition") {
  PhaseRegister reg = equal_superposition(2);

  PhaseRegister constant = apply_cf(reg, tt("0000"));
  CHECK(constant[0] == PhasePair(1, 1));
  CHECK(constant[1] == PhasePair(1, 1));

  PhaseRegister negated = apply_cf(reg, tt("1111"));
  CHECK(negated[0] == PhasePair(-1, -1));
  CHECK(negated[1] == PhasePair(-1, -1));

  PhaseRegister balanced = apply_cf(reg, tt("0011"));
  CHECK(balanced[0] == PhasePair(1, -1));
  CHECK(balanced[1] == PhasePair(1, 1));

  CHECK_THROWS_AS(apply_cf(reg, tt("0001")), std::invalid_argument);
  CHECK_THROWS_AS(apply_cf(equal_superposition(1), tt("0011")), std::invalid_argument);
  CHECK_THROWS_AS(apply_cf(reg, tt("01")), std::invalid_argument);
}

TEST_CASE("hadamard analogue projects onto an axis") {
  PhaseRegister inputs = equal_superposition(2);

  PhaseRegister balanced = hadamard_analogue({PhasePair(1, -1), PhasePair(1, 1)}, inputs);
  CHECK(balanced[0] == PhasePair(1, 0));
  CHECK(balanced[1] == PhasePair(0, 1));

  PhaseRegister constant = hadamard_analogue({PhasePair(1, 1), PhasePair(1, 1)}, inputs);
  CHECK(constant[0] == PhasePair(0, 1));
  CHECK(constant[1] == PhasePair(0, 1));

  PhaseRegister flipped = hadamard_analogue({PhasePair(-1, -1), PhasePair(-1, -1)}, inputs);
  CHECK(flipped[0] == PhasePair(0, -1));
  CHECK(flipped[1] == PhasePair(0, -1));

  CHECK_THROWS_AS(hadamard_analogue({PhasePair(1, 1)}, inputs), std::invalid_argument);
}

TEST_CASE("axis measurement") {
  CHECK(measure_axis(PhasePair(0, 1)) == AxisReading{Axis::Imaginary, 1});
  CHECK(measure_axis(PhasePair(-1, 0)) == AxisReading{Axis::Real, -1});
  CHECK(measure_axis(PhasePair(1, 1)) == AxisReading{Axis::Mixed, 0});
  CHECK(measure_axis(PhasePair(0, -3)) == AxisReading{Axis::Imaginary, -1});
}

TEST_CASE("full pipeline over all sixteen 2-input functions") {
  for (int idx = 0; idx < 16; ++idx) {
    TruthTable f = tt(testutil::all_tables_n2(idx));
    bool valid = (f.value(0) ^ f.value(3)) == (f.value(1) ^ f.value(2));

    PhaseRegister inputs = equal_superposition(2);
    if (!valid) {
      CHECK_THROWS_AS(apply_cf(inputs, f), std::invalid_argument);
      continue;
    }

    PhaseRegister finals = hadamard_analogue(apply_cf(inputs, f), inputs);
    AxisReading r1 = measure_axis(finals[0]);
    AxisReading r2 = measure_axis(finals[1]);
    REQUIRE(r1.axis != Axis::Mixed);
    REQUIRE(r2.axis != Axis::Mixed);

    std::size_t ones = 0;
    for (auto v : f.values) ones += v;
    bool constant = ones == 0 || ones == 4;
    CHECK((r1.axis == Axis::Imaginary && r2.axis == Axis::Imaginary) == constant);

    // Shared sign carries f(00); axis pattern carries the exponents; the
    // three together pin the function exactly.
    CHECK(r1.sign == r2.sign);
    CHECK((r1.sign < 0 ? 1 : 0) == f.value(0));
    CHECK((r1.axis == Axis::Real ? 1 : 0) == (f.value(0b00) ^ f.value(0b10)));
    CHECK((r2.axis == Axis::Real ? 1 : 0) == (f.value(0b10) ^ f.value(0b11)));
  }
}

TEST_CASE("pipeline readings match the dense Deutsch-Jozsa outcome") {
  Circuit dj = parse_circuit(
      "qubits 3\nx 2\nh 0\nh 1\nh 2\noracle f 0 1 2\nh 0\nh 1\nh 2\nmeasure 0 1");
  for (const std::string& bits : testutil::valid_tables_n2()) {
    TruthTable f = tt(bits);
    dj.oracles["f"] = f;
    Distribution dense = run_to_distribution(dj);

    PhaseRegister inputs = equal_superposition(2);
    PhaseRegister finals = hadamard_analogue(apply_cf(inputs, f), inputs);
    std::string mapped;
    for (const PhasePair& p : finals) {
      mapped += measure_axis(p).axis == Axis::Imaginary ? '0' : '1';
    }
    CHECK(dense.probability(mapped) == 1.0);
  }
}

TEST_CASE("sign-vector separability: known cases") {
  auto bal = phase_vector_separable({1, -1, -1, 1});
  REQUIRE(bal.has_value());
  CHECK(bal->overall_sign == 1);
  CHECK(bal->qubit_signs == std::vector<int>{-1, -1});

  CHECK_FALSE(phase_vector_separable({1, 1, 1, -1}).has_value());

  auto all_plus = phase_vector_separable(std::vector<int>(16, 1));
  REQUIRE(all_plus.has_value());
  CHECK(all_plus->overall_sign == 1);
  CHECK(all_plus->qubit_signs == std::vector<int>(4, 1));

  CHECK_THROWS_AS(phase_vector_separable({1, -1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(phase_vector_separable({1, 0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(phase_vector_separable({}), std::invalid_argument);
}

TEST_CASE("sign-vector separability agrees with brute force up to n = 3") {
  for (int n = 1; n <= 3; ++n) {
    std::size_t len = std::size_t{1} << n;
    for (std::size_t pattern = 0; pattern < (std::size_t{1} << len); ++pattern) {
      std::vector<int> signs;
      for (std::size_t i = 0; i < len; ++i) signs.push_back(((pattern >> i) & 1) ? -1 : 1);
      auto fast = phase_vector_separable(signs);
      auto slow = brute_force_factorisation(signs);
      REQUIRE(fast.has_value() == slow.has_value());
      if (fast) {
        CHECK(fast->overall_sign == slow->overall_sign);
        CHECK(fast->qubit_signs == slow->qubit_signs);
      }
    }
  }
}

TEST_CASE("valid 2-input functions are exactly the separable ones") {
  for (int idx = 0; idx < 16; ++idx) {
    TruthTable f = tt(testutil::all_tables_n2(idx));
    std::size_t ones = 0;
    for (auto v : f.values) ones += v;
    bool valid = ones == 0 || ones == 4 || ones == 2;
    CHECK(phase_vector_separable(signs_of(f)).has_value() == valid);
  }
}
