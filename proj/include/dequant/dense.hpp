#pragma once

// Dense statevector simulator: the reference backend every de-quantised
// backend is validated against. Amplitude index convention: qubit 0 is the
// most significant bit of the index and of outcome strings.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dequant/circuit.hpp"
#include "dequant/distribution.hpp"
#include "dequant/errors.hpp"
#include "dequant/rng.hpp"

namespace dequant {

using Complex = std::complex<double>;

inline constexpr int kDenseMaxQubits = 26;
inline constexpr double kNormTolerance = 1e-10;
// Branches below this probability are rounding residue, not outcomes.
inline constexpr double kBranchFloor = 1e-12;
// Hard ceiling on materialised outcome maps.
inline constexpr std::size_t kMaxExactOutcomes = std::size_t{1} << 20;

namespace detail {

// One-past-MSB-first bit position -> index mask within an n-bit space.
inline std::size_t bit_mask(int n, int pos) { return std::size_t{1} << (n - 1 - pos); }

inline int bit_at(std::size_t index, int n, int pos) {
  return static_cast<int>((index >> (n - 1 - pos)) & 1u);
}

inline void apply_single_qubit(std::vector<Complex>& amps, int n, int pos,
                               const std::array<Complex, 4>& m) {
  const std::size_t stride = bit_mask(n, pos);
  const std::size_t dim = amps.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      Complex a0 = amps[i];
      Complex a1 = amps[i + stride];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

inline void apply_cnot(std::vector<Complex>& amps, int n, int cpos, int tpos) {
  const std::size_t cm = bit_mask(n, cpos);
  const std::size_t tm = bit_mask(n, tpos);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & cm) && !(i & tm)) std::swap(amps[i], amps[i | tm]);
  }
}

inline void apply_ccx(std::vector<Complex>& amps, int n, int c1, int c2, int tpos) {
  const std::size_t m1 = bit_mask(n, c1);
  const std::size_t m2 = bit_mask(n, c2);
  const std::size_t tm = bit_mask(n, tpos);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & m1) && (i & m2) && !(i & tm)) std::swap(amps[i], amps[i | tm]);
  }
}

inline void apply_phase_on_11(std::vector<Complex>& amps, int n, int apos, int bpos,
                              Complex phase) {
  const std::size_t am = bit_mask(n, apos);
  const std::size_t bm = bit_mask(n, bpos);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & am) && (i & bm)) amps[i] *= phase;
  }
}

// f-controlled NOT: |x>|y> -> |x>|y ^ f(x)>, inputs listed MSB-first.
inline void apply_oracle(std::vector<Complex>& amps, int n, const std::vector<int>& input_pos,
                         int target_pos, const TruthTable& f) {
  const std::size_t tm = bit_mask(n, target_pos);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & tm) continue;
    std::size_t x = 0;
    for (int pos : input_pos) x = (x << 1) | static_cast<std::size_t>(bit_at(i, n, pos));
    if (f.value(x)) std::swap(amps[i], amps[i | tm]);
  }
}

// Applies `gate` to an amplitude vector over an n-bit index space; `pos`
// gives the index-space position of each gate qubit. Shared between the
// dense backend (identity mapping) and the block-product backend (local
// positions inside a block).
inline void apply_gate_at(std::vector<Complex>& amps, int n, const Gate& gate,
                          const std::vector<int>& pos, const OracleMap& oracles) {
  constexpr double kInvSqrt2 = 0.7071067811865476;
  switch (gate.op) {
    case GateOp::X:
      apply_single_qubit(amps, n, pos[0], {Complex(0), Complex(1), Complex(1), Complex(0)});
      break;
    case GateOp::Y:
      apply_single_qubit(amps, n, pos[0],
                         {Complex(0), Complex(0, -1), Complex(0, 1), Complex(0)});
      break;
    case GateOp::Z:
      apply_single_qubit(amps, n, pos[0], {Complex(1), Complex(0), Complex(0), Complex(-1)});
      break;
    case GateOp::H:
      apply_single_qubit(amps, n, pos[0],
                         {Complex(kInvSqrt2), Complex(kInvSqrt2), Complex(kInvSqrt2),
                          Complex(-kInvSqrt2)});
      break;
    case GateOp::S:
      apply_single_qubit(amps, n, pos[0], {Complex(1), Complex(0), Complex(0), Complex(0, 1)});
      break;
    case GateOp::T:
      apply_single_qubit(amps, n, pos[0],
                         {Complex(1), Complex(0), Complex(0),
                          std::polar(1.0, std::numbers::pi / 4.0)});
      break;
    case GateOp::Cnot:
      apply_cnot(amps, n, pos[0], pos[1]);
      break;
    case GateOp::Cz:
      apply_phase_on_11(amps, n, pos[0], pos[1], Complex(-1));
      break;
    case GateOp::Ccx:
      apply_ccx(amps, n, pos[0], pos[1], pos[2]);
      break;
    case GateOp::Rk:
      apply_phase_on_11(amps, n, pos[0], pos[1],
                        std::polar(1.0, std::ldexp(2.0 * std::numbers::pi, -gate.k)));
      break;
    case GateOp::Oracle: {
      auto it = oracles.find(gate.oracle);
      if (it == oracles.end()) {
        throw SimulationError("unresolved oracle '" + gate.oracle + "'");
      }
      const TruthTable& f = it->second;
      if (gate.qubits.size() != static_cast<std::size_t>(f.n_inputs) + 1) {
        throw SimulationError("oracle '" + gate.oracle + "' takes " +
                              std::to_string(f.n_inputs) + " inputs + 1 target, gate lists " +
                              std::to_string(gate.qubits.size()) + " qubits");
      }
      std::vector<int> input_pos(pos.begin(), pos.end() - 1);
      apply_oracle(amps, n, input_pos, pos.back(), f);
      break;
    }
    case GateOp::Measure:
      throw std::logic_error("measurement gates are handled by the circuit runners");
  }
}

}  // namespace detail

class StateVector {
 public:
  explicit StateVector(int n) : n_(check_width(n)), amps_(std::size_t{1} << n, Complex(0)) {
    amps_[0] = Complex(1);
  }

  static StateVector basis(int n, std::string_view bits) {
    StateVector s(n);
    if (bits.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("basis bitstring length " + std::to_string(bits.size()) +
                                  " does not match qubit count " + std::to_string(n));
    }
    std::size_t index = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("basis bits must be 0 or 1");
      index = (index << 1) | static_cast<std::size_t>(c - '0');
    }
    s.amps_[0] = Complex(0);
    s.amps_[index] = Complex(1);
    return s;
  }

  static StateVector from_amplitudes(std::vector<Complex> amps) {
    std::size_t dim = amps.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
      throw std::invalid_argument("amplitude count must be a power of two >= 2");
    }
    StateVector s(std::countr_zero(dim));
    s.amps_ = std::move(amps);
    if (std::abs(s.norm_squared() - 1.0) > kNormTolerance) {
      throw std::invalid_argument("amplitudes are not normalised");
    }
    return s;
  }

  int num_qubits() const { return n_; }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  Complex amplitude(std::size_t index) const { return amps_[index]; }

  double norm_squared() const {
    double total = 0.0;
    for (const Complex& a : amps_) total += std::norm(a);
    return total;
  }

  void apply(const Gate& gate, const OracleMap& oracles = {}) {
    for (int q : gate.qubits) check_qubit(q);
    detail::apply_gate_at(amps_, n_, gate, gate.qubits, oracles);
  }

  double outcome_probability(const std::vector<int>& qubits, std::string_view outcome) const {
    if (qubits.size() != outcome.size()) {
      throw std::invalid_argument("outcome length does not match qubit list");
    }
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (matches(i, qubits, outcome)) p += std::norm(amps_[i]);
    }
    return p;
  }

  // Projects onto the given outcome and renormalises.
  void collapse(const std::vector<int>& qubits, std::string_view outcome) {
    double p = outcome_probability(qubits, outcome);
    if (p < 1e-300) throw SimulationError("collapse onto a zero-probability outcome");
    double scale = 1.0 / std::sqrt(p);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (matches(i, qubits, outcome)) {
        amps_[i] *= scale;
      } else {
        amps_[i] = Complex(0);
      }
    }
  }

  // Samples the listed qubits per the Born rule, collapsing in place.
  std::string measure(const std::vector<int>& qubits, CounterRng& rng) {
    std::string outcome;
    outcome.reserve(qubits.size());
    for (int q : qubits) {
      check_qubit(q);
      double p0 = outcome_probability({q}, "0");
      char bit = rng.uniform() < p0 ? '0' : '1';
      collapse({q}, std::string_view(&bit, 1));
      outcome.push_back(bit);
    }
    return outcome;
  }

  // Exact marginal distribution over the listed qubits (in list order).
  std::map<std::string, double> measure_marginal(const std::vector<int>& qubits) const {
    for (int q : qubits) check_qubit(q);
    std::map<std::string, double> marginal;
    std::string key(qubits.size(), '0');
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      double p = std::norm(amps_[i]);
      if (p == 0.0) continue;
      for (std::size_t j = 0; j < qubits.size(); ++j) {
        key[j] = static_cast<char>('0' + detail::bit_at(i, n_, qubits[j]));
      }
      marginal[key] += p;
      if (marginal.size() > kMaxExactOutcomes) {
        throw ResourceError("exact outcome map exceeds " + std::to_string(kMaxExactOutcomes) +
                            " entries; use sampling instead");
      }
    }
    return marginal;
  }

  Distribution measure_distribution(const std::vector<int>& qubits) const {
    return Distribution::exact(measure_marginal(qubits));
  }

 private:
  static int check_width(int n) {
    if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
    if (n > kDenseMaxQubits) {
      throw ResourceError("dense backend supports at most " + std::to_string(kDenseMaxQubits) +
                          " qubits (requested " + std::to_string(n) + ")");
    }
    return n;
  }

  void check_qubit(int q) const {
    if (q < 0 || q >= n_) {
      throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range");
    }
  }

  bool matches(std::size_t index, const std::vector<int>& qubits, std::string_view outcome) const {
    for (std::size_t j = 0; j < qubits.size(); ++j) {
      if (detail::bit_at(index, n_, qubits[j]) != outcome[j] - '0') return false;
    }
    return true;
  }

  int n_;
  std::vector<Complex> amps_;
};

namespace detail {

inline void dense_branch(StateVector state, const Circuit& circuit, std::size_t gate_index,
                         double weight, const std::string& prefix,
                         std::map<std::string, double>& out) {
  for (std::size_t i = gate_index; i < circuit.gates.size(); ++i) {
    const Gate& g = circuit.gates[i];
    if (g.op != GateOp::Measure) {
      state.apply(g, circuit.oracles);
      continue;
    }
    std::map<std::string, double> marginal = state.measure_marginal(g.qubits);
    if (i + 1 == circuit.gates.size()) {
      for (const auto& [bits, p] : marginal) {
        if (p < kBranchFloor) continue;
        out[prefix + bits] += weight * p;
      }
      return;
    }
    // Intermediate measurement: branch exhaustively over the outcomes.
    for (const auto& [bits, p] : marginal) {
      if (p < kBranchFloor) continue;
      StateVector next = state;
      next.collapse(g.qubits, bits);
      dense_branch(std::move(next), circuit, i + 1, weight * p, prefix + bits, out);
    }
    return;
  }
  out[prefix] += weight;
}

}  // namespace detail

// Exact ("strong") outcome distribution of the circuit starting from
// |0...0>. Intermediate measurements branch over both outcomes.
inline Distribution run_to_distribution(const Circuit& circuit) {
  if (!circuit.has_measurement()) {
    throw SimulationError("circuit has no measure gate");
  }
  std::map<std::string, double> out;
  detail::dense_branch(StateVector(circuit.width), circuit, 0, 1.0, "", out);
  return Distribution::exact(std::move(out));
}

// One sampled ("weak") execution.
inline std::string run_single_shot(const Circuit& circuit, CounterRng& rng) {
  if (!circuit.has_measurement()) {
    throw SimulationError("circuit has no measure gate");
  }
  StateVector state(circuit.width);
  std::string outcome;
  for (const Gate& g : circuit.gates) {
    if (g.op == GateOp::Measure) {
      outcome += state.measure(g.qubits, rng);
    } else {
      state.apply(g, circuit.oracles);
    }
  }
  return outcome;
}

}  // namespace dequant
