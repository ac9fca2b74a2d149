#pragma once

// Problem-level suite: Deutsch-Jozsa oracle classification, circuit
// construction, both solvers (quantum-backend and de-quantised), and the
// classical sampler for the measured quantum Fourier transform.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dequant/blockstate.hpp"
#include "dequant/circuit.hpp"
#include "dequant/dense.hpp"
#include "dequant/phasebit.hpp"
#include "dequant/rng.hpp"

namespace dequant {

struct FunctionClass {
  enum Tag { Constant, Balanced, Invalid };

  Tag tag = Invalid;
  int constant_value = 0;  // meaningful when tag == Constant

  bool operator==(const FunctionClass&) const = default;
};

inline FunctionClass classify_function(const TruthTable& f) {
  std::size_t ones = 0;
  for (std::uint8_t v : f.values) ones += v;
  if (ones == 0) return {FunctionClass::Constant, 0};
  if (ones == f.size()) return {FunctionClass::Constant, 1};
  if (2 * ones == f.size()) return {FunctionClass::Balanced, 0};
  return {FunctionClass::Invalid, 0};
}

// Width n+1 circuit: X on the ancilla, H everywhere, the oracle "f" over
// the n inputs plus ancilla, H everywhere, measurement of the n inputs.
inline Circuit build_dj_circuit(int n) {
  if (n < 1) throw std::invalid_argument("input size must be >= 1");
  Circuit c;
  c.width = n + 1;
  c.gates.push_back({GateOp::X, {n}});
  for (int q = 0; q <= n; ++q) c.gates.push_back({GateOp::H, {q}});
  Gate oracle{GateOp::Oracle, {}, 0, "f"};
  for (int q = 0; q <= n; ++q) oracle.qubits.push_back(q);
  c.gates.push_back(std::move(oracle));
  for (int q = 0; q <= n; ++q) c.gates.push_back({GateOp::H, {q}});
  Gate measure{GateOp::Measure, {}};
  for (int q = 0; q < n; ++q) measure.qubits.push_back(q);
  c.gates.push_back(std::move(measure));
  return c;
}

inline Circuit build_ghz_circuit(int n) {
  if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
  Circuit c;
  c.width = n;
  c.gates.push_back({GateOp::H, {0}});
  for (int q = 1; q < n; ++q) c.gates.push_back({GateOp::Cnot, {0, q}});
  Gate measure{GateOp::Measure, {}};
  for (int q = 0; q < n; ++q) measure.qubits.push_back(q);
  c.gates.push_back(std::move(measure));
  return c;
}

// Fourier transform without the final qubit reversal: H on each qubit in
// MSB-first order, with controlled phase rotations rk(d+1) from each later
// qubit at distance d.
inline Circuit build_qft_circuit(int n, bool terminal_measure = true) {
  if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
  Circuit c;
  c.width = n;
  for (int j = 0; j < n; ++j) {
    c.gates.push_back({GateOp::H, {j}});
    for (int m = j + 1; m < n; ++m) {
      c.gates.push_back({GateOp::Rk, {m, j}, m - j + 1});
    }
  }
  if (terminal_measure) {
    Gate measure{GateOp::Measure, {}};
    for (int q = 0; q < n; ++q) measure.qubits.push_back(q);
    c.gates.push_back(std::move(measure));
  }
  return c;
}

struct DjResult {
  FunctionClass::Tag classification = FunctionClass::Invalid;
  std::string outcome_bits;  // the probability-one measurement outcome
};

// Runs the Deutsch-Jozsa circuit on a strong backend ("dense" or
// "blockstate") and classifies from the all-zeros outcome.
inline DjResult dj_quantum_solve(const TruthTable& f, const std::string& backend,
                                 int block_cap = 0) {
  if (classify_function(f).tag == FunctionClass::Invalid) {
    throw std::invalid_argument("truth table is not a valid (constant or balanced) function");
  }
  Circuit circuit = build_dj_circuit(f.n_inputs);
  circuit.oracles["f"] = f;

  Distribution dist = [&] {
    if (backend == "dense") return run_to_distribution(circuit);
    if (backend == "blockstate") {
      int cap = block_cap > 0 ? block_cap : f.n_inputs + 1;
      BlockRunReport report = run_blockstate(circuit, cap);
      if (!report.completed) {
        throw SimulationError("blockstate run failed: CAP_EXCEEDED at gate " +
                              std::to_string(report.failing_gate.value_or(0)));
      }
      return *report.distribution;
    }
    throw SimulationError("dj_quantum_solve supports backends 'dense' and 'blockstate'");
  }();

  DjResult result;
  for (const auto& [bits, p] : dist.probabilities()) {
    if (p > 1.0 - 1e-9) {
      result.outcome_bits = bits;
      result.classification = bits == std::string(bits.size(), '0') ? FunctionClass::Constant
                                                                    : FunctionClass::Balanced;
      return result;
    }
  }
  throw SimulationError("Deutsch-Jozsa run did not produce a deterministic outcome");
}

struct DjDequantResult {
  FunctionClass::Tag classification = FunctionClass::Invalid;
  std::vector<AxisReading> readings;  // one per phase bit
  int f00 = 0;                        // recovered from the shared sign
  TruthTable reconstructed;           // the full identified function
  std::string outcome_bits;           // quantum-equivalent outcome (imaginary -> 0)
};

// The de-quantised solver: exact phase-bit pipeline, deterministic, and
// strictly stronger than the quantum solver in that it identifies which
// function the black box computes. Defined for n_inputs in {1, 2}.
inline DjDequantResult dj_dequantised_solve(const TruthTable& f) {
  if (f.n_inputs != 1 && f.n_inputs != 2) {
    throw std::invalid_argument("de-quantised solver handles 1- and 2-input functions");
  }
  if (classify_function(f).tag == FunctionClass::Invalid) {
    throw std::invalid_argument("truth table is not a valid (constant or balanced) function");
  }

  PhaseRegister inputs;
  PhaseRegister outputs;
  if (f.n_inputs == 2) {
    inputs = equal_superposition(2);
    outputs = apply_cf(inputs, f);
  } else {
    // One-bit case: C_f(z) = (-1)^f(0) (a + (-1)^{f(0)^f(1)} b i).
    inputs = equal_superposition(1);
    int e = f.value(0) ^ f.value(1);
    PhasePair z(inputs[0].re(), e ? -inputs[0].im() : inputs[0].im(), inputs[0].scale());
    outputs.push_back(f.value(0) ? -z : z);
  }
  PhaseRegister finals = hadamard_analogue(outputs, inputs);

  DjDequantResult result;
  bool all_imaginary = true;
  int sign = 0;
  std::vector<int> exponents;
  for (const PhasePair& p : finals) {
    AxisReading r = measure_axis(p);
    if (r.axis == Axis::Mixed) {
      throw SimulationError("phase-bit pipeline produced a mixed reading");
    }
    all_imaginary = all_imaginary && r.axis == Axis::Imaginary;
    exponents.push_back(r.axis == Axis::Real ? 1 : 0);
    sign = r.sign;
    result.readings.push_back(r);
    result.outcome_bits += r.axis == Axis::Imaginary ? '0' : '1';
  }
  result.classification = all_imaginary ? FunctionClass::Constant : FunctionClass::Balanced;
  result.f00 = sign < 0 ? 1 : 0;

  // Rebuild the truth table from the sign and the recovered exponents.
  result.reconstructed.n_inputs = f.n_inputs;
  if (f.n_inputs == 1) {
    int f0 = result.f00;
    int f1 = f0 ^ exponents[0];
    result.reconstructed.values = {static_cast<std::uint8_t>(f0), static_cast<std::uint8_t>(f1)};
  } else {
    int f00 = result.f00;
    int f10 = f00 ^ exponents[0];
    int f11 = f10 ^ exponents[1];
    int f01 = f00 ^ f10 ^ f11;  // separability condition
    result.reconstructed.values = {
        static_cast<std::uint8_t>(f00), static_cast<std::uint8_t>(f01),
        static_cast<std::uint8_t>(f10), static_cast<std::uint8_t>(f11)};
  }
  return result;
}

struct QubitState {
  Complex amp0{1.0, 0.0};
  Complex amp1{0.0, 0.0};
};

// Classical sampler for the measured Fourier transform: each qubit is
// rotated by the phase accumulated from earlier outcomes, put through H,
// and sampled; the rotation owed to later qubits is carried in a single
// running phase, so a sample costs O(n) two-vector updates.
inline std::string semiclassical_qft_sample(const std::vector<QubitState>& input,
                                            CounterRng& rng,
                                            std::size_t* state_updates = nullptr) {
  if (input.empty()) throw std::invalid_argument("input must contain at least one qubit");
  constexpr double kInvSqrt2 = 0.7071067811865476;
  std::size_t updates = 0;
  std::string bits;
  bits.reserve(input.size());

  double pending = 0.0;  // phase owed to the current qubit by sampled bits
  for (const QubitState& qs : input) {
    double norm = std::norm(qs.amp0) + std::norm(qs.amp1);
    if (std::abs(norm - 1.0) > 1e-9) {
      throw std::invalid_argument("input qubit state is not normalised");
    }
    Complex a0 = qs.amp0;
    Complex a1 = qs.amp1 * std::polar(1.0, pending);
    ++updates;
    Complex h0 = kInvSqrt2 * (a0 + a1);
    Complex h1 = kInvSqrt2 * (a0 - a1);
    ++updates;
    double p0 = std::norm(h0) / (std::norm(h0) + std::norm(h1));
    int bit = rng.uniform() < p0 ? 0 : 1;
    bits += static_cast<char>('0' + bit);
    // Next qubit sits one step further from every sampled bit, so each
    // owed rotation halves; a freshly sampled 1 owes rk(2) = pi/2.
    pending = 0.5 * pending + (bit ? std::numbers::pi / 2.0 : 0.0);
  }
  if (state_updates) *state_updates = updates;
  return bits;
}

// Recognizes Deutsch-Jozsa-shaped circuits (the build_dj_circuit pattern)
// and returns the bound oracle; used to route circuits to the phase-bit
// backend.
inline std::optional<TruthTable> match_dj_circuit(const Circuit& circuit) {
  int n = circuit.width - 1;
  if (n < 1) return std::nullopt;
  const std::size_t expected = 1 + 2 * static_cast<std::size_t>(n + 1) + 2;
  if (circuit.gates.size() != expected) return std::nullopt;

  std::size_t g = 0;
  if (circuit.gates[g].op != GateOp::X || circuit.gates[g].qubits != std::vector<int>{n}) {
    return std::nullopt;
  }
  ++g;
  for (int layer = 0; layer < 2; ++layer) {
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
    for (int i = 0; i <= n; ++i, ++g) {
      const Gate& gate = circuit.gates[g];
      if (gate.op != GateOp::H) return std::nullopt;
      seen[static_cast<std::size_t>(gate.qubits[0])] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return std::nullopt;
    if (layer == 0) {
      const Gate& oracle = circuit.gates[g];
      if (oracle.op != GateOp::Oracle) return std::nullopt;
      std::vector<int> want;
      for (int q = 0; q <= n; ++q) want.push_back(q);
      if (oracle.qubits != want) return std::nullopt;
      auto it = circuit.oracles.find(oracle.oracle);
      if (it == circuit.oracles.end() || it->second.n_inputs != n) return std::nullopt;
      ++g;
    }
  }
  const Gate& measure = circuit.gates[g];
  std::vector<int> want;
  for (int q = 0; q < n; ++q) want.push_back(q);
  if (measure.op != GateOp::Measure || measure.qubits != want) return std::nullopt;
  return circuit.oracles.at(circuit.gates[1 + static_cast<std::size_t>(n) + 1].oracle);
}

}  // namespace dequant
