#pragma once

// Stabiliser tableau with bit-packed rows, CHP layout: rows 0..n-1 are
// destabilisers, rows n..2n-1 stabilisers, each row an X bit-vector, a
// Z bit-vector and a sign bit.

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dequant/circuit.hpp"
#include "dequant/distribution.hpp"
#include "dequant/errors.hpp"
#include "dequant/rng.hpp"

namespace dequant {

class Tableau {
 public:
  explicit Tableau(int n) : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64) {
    if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
    std::size_t rows = 2 * static_cast<std::size_t>(n);
    xs_.assign(rows * words_, 0);
    zs_.assign(rows * words_, 0);
    phases_.assign(rows, 0);
    for (int q = 0; q < n; ++q) {
      set_bit(xs_, static_cast<std::size_t>(q), q);       // destabiliser q = X_q
      set_bit(zs_, static_cast<std::size_t>(n) + q, q);   // stabiliser q  = Z_q
    }
  }

  int num_qubits() const { return n_; }

  void apply(const Gate& gate) {
    switch (gate.op) {
      case GateOp::X: apply_x(gate.qubits[0]); break;
      case GateOp::Y: apply_y(gate.qubits[0]); break;
      case GateOp::Z: apply_z(gate.qubits[0]); break;
      case GateOp::H: apply_h(gate.qubits[0]); break;
      case GateOp::S: apply_s(gate.qubits[0]); break;
      case GateOp::Cnot: apply_cnot(gate.qubits[0], gate.qubits[1]); break;
      case GateOp::Cz: apply_cz(gate.qubits[0], gate.qubits[1]); break;
      case GateOp::Measure:
        throw std::logic_error("measurement gates are handled by the circuit runners");
      default:
        throw SimulationError(std::string("non-Clifford gate '") + gate_name(gate.op) +
                              "' is outside the stabilizer backend's gate set");
    }
  }

  void apply_h(int q) {
    check_qubit(q);
    const std::size_t w = word_of(q);
    const std::uint64_t m = mask_of(q);
    for (std::size_t r = 0; r < rows(); ++r) {
      std::uint64_t& xw = xs_[r * words_ + w];
      std::uint64_t& zw = zs_[r * words_ + w];
      std::uint64_t xb = xw & m, zb = zw & m;
      phases_[r] ^= static_cast<std::uint8_t>((xb && zb) ? 1 : 0);
      std::uint64_t diff = xb ^ zb;
      xw ^= diff;
      zw ^= diff;
    }
  }

  void apply_s(int q) {
    check_qubit(q);
    const std::size_t w = word_of(q);
    const std::uint64_t m = mask_of(q);
    for (std::size_t r = 0; r < rows(); ++r) {
      std::uint64_t xb = xs_[r * words_ + w] & m;
      std::uint64_t zb = zs_[r * words_ + w] & m;
      phases_[r] ^= static_cast<std::uint8_t>((xb && zb) ? 1 : 0);
      zs_[r * words_ + w] ^= xb;
    }
  }

  void apply_x(int q) { phase_flip(q, /*on_z=*/true, /*on_x=*/false); }
  void apply_z(int q) { phase_flip(q, /*on_z=*/false, /*on_x=*/true); }
  void apply_y(int q) { phase_flip(q, /*on_z=*/true, /*on_x=*/true); }

  void apply_cnot(int c, int t) {
    check_qubit(c);
    check_qubit(t);
    const std::size_t wc = word_of(c), wt = word_of(t);
    const std::uint64_t mc = mask_of(c), mt = mask_of(t);
    for (std::size_t r = 0; r < rows(); ++r) {
      std::uint64_t xc = xs_[r * words_ + wc] & mc;
      std::uint64_t zc = zs_[r * words_ + wc] & mc;
      std::uint64_t xt = xs_[r * words_ + wt] & mt;
      std::uint64_t zt = zs_[r * words_ + wt] & mt;
      // Sign flips when the row has X on the control, Z on the target and
      // X(target) == Z(control).
      bool flip = xc && zt && ((xt != 0) == (zc != 0));
      phases_[r] ^= static_cast<std::uint8_t>(flip ? 1 : 0);
      if (xc) xs_[r * words_ + wt] ^= mt;
      if (zt) zs_[r * words_ + wc] ^= mc;
    }
  }

  void apply_cz(int c, int t) {
    apply_h(t);
    apply_cnot(c, t);
    apply_h(t);
  }

  bool is_deterministic(int q) const { return !random_stabilizer_row(q).has_value(); }

  // Outcome that a computational-basis measurement of `q` would give when
  // it is determined by the stabiliser group.
  int deterministic_outcome(int q) const {
    check_qubit(q);
    std::vector<std::uint64_t> sx(words_, 0), sz(words_, 0);
    int phase_units = 0;  // exponent of i, mod 4
    for (int i = 0; i < n_; ++i) {
      if (!bit(xs_, static_cast<std::size_t>(i), q)) continue;
      std::size_t row = static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
      phase_units = (phase_units + 2 * phases_[row] + product_phase(row, sx.data(), sz.data())) & 3;
      for (std::size_t w = 0; w < words_; ++w) {
        sx[w] ^= xs_[row * words_ + w];
        sz[w] ^= zs_[row * words_ + w];
      }
    }
    return (phase_units >> 1) & 1;
  }

  double outcome_probability(int q, int bit_value) const {
    check_qubit(q);
    if (!is_deterministic(q)) return 0.5;
    return deterministic_outcome(q) == bit_value ? 1.0 : 0.0;
  }

  int measure(int q, CounterRng& rng) {
    check_qubit(q);
    std::optional<std::size_t> p = random_stabilizer_row(q);
    if (!p) return deterministic_outcome(q);
    return collapse(q, *p, rng.bit() ? 1 : 0);
  }

  // Measurement with a chosen outcome, for exact distribution assembly.
  // The outcome must have nonzero probability.
  int measure_forced(int q, int bit_value) {
    check_qubit(q);
    std::optional<std::size_t> p = random_stabilizer_row(q);
    if (!p) {
      if (deterministic_outcome(q) != bit_value) {
        throw std::logic_error("forced measurement outcome has probability zero");
      }
      return bit_value;
    }
    return collapse(q, *p, bit_value);
  }

  // Symplectic consistency: stabilisers and destabilisers each commute
  // pairwise, and destabiliser i anticommutes exactly with stabiliser i.
  bool check_invariants() const {
    std::size_t n = static_cast<std::size_t>(n_);
    for (std::size_t a = 0; a < 2 * n; ++a) {
      for (std::size_t b = a + 1; b < 2 * n; ++b) {
        bool anticommute = symplectic_product(a, b);
        bool expected = (a < n) && (b == a + n);
        if (anticommute != expected) return false;
      }
    }
    return true;
  }

  // Pauli string of a row, e.g. "+XZI"; stabiliser rows are n..2n-1.
  std::string row_string(std::size_t row) const {
    std::string s(phases_[row] ? "-" : "+");
    for (int q = 0; q < n_; ++q) {
      bool x = bit(xs_, row, q), z = bit(zs_, row, q);
      s += x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
    }
    return s;
  }

  std::size_t memory_bytes() const {
    return (xs_.size() + zs_.size()) * sizeof(std::uint64_t) + phases_.size();
  }

 private:
  std::size_t rows() const { return 2 * static_cast<std::size_t>(n_); }
  static std::size_t word_of(int q) { return static_cast<std::size_t>(q) >> 6; }
  static std::uint64_t mask_of(int q) { return std::uint64_t{1} << (q & 63); }

  bool bit(const std::vector<std::uint64_t>& v, std::size_t row, int q) const {
    return (v[row * words_ + word_of(q)] & mask_of(q)) != 0;
  }
  void set_bit(std::vector<std::uint64_t>& v, std::size_t row, int q) {
    v[row * words_ + word_of(q)] |= mask_of(q);
  }

  void check_qubit(int q) const {
    if (q < 0 || q >= n_) {
      throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range");
    }
  }

  void phase_flip(int q, bool on_z, bool on_x) {
    check_qubit(q);
    const std::size_t w = word_of(q);
    const std::uint64_t m = mask_of(q);
    for (std::size_t r = 0; r < rows(); ++r) {
      bool xb = (xs_[r * words_ + w] & m) != 0;
      bool zb = (zs_[r * words_ + w] & m) != 0;
      bool flip = (on_z && zb) != (on_x && xb);
      phases_[r] ^= static_cast<std::uint8_t>(flip ? 1 : 0);
    }
  }

  // Exponent of i, mod 4, accumulated when multiplying Pauli row `row`
  // into the accumulator word-vectors (ax, az). Per qubit the contribution
  // is +1 for the cyclic products X*Y, Y*Z, Z*X and -1 for the reversed
  // ones.
  int product_phase(std::size_t row, const std::uint64_t* ax, const std::uint64_t* az) const {
    std::int64_t total = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t x1 = xs_[row * words_ + w], z1 = zs_[row * words_ + w];
      std::uint64_t x2 = ax[w], z2 = az[w];
      std::uint64_t px1 = x1 & ~z1, py1 = x1 & z1, pz1 = ~x1 & z1;
      std::uint64_t px2 = x2 & ~z2, py2 = x2 & z2, pz2 = ~x2 & z2;
      std::uint64_t plus = (px1 & py2) | (py1 & pz2) | (pz1 & px2);
      std::uint64_t minus = (px1 & pz2) | (py1 & px2) | (pz1 & py2);
      total += std::popcount(plus) - std::popcount(minus);
    }
    return static_cast<int>(((total % 4) + 4) & 3);
  }

  // Row h := row i * row h (X/Z bits xor; phases via the i-exponent sum,
  // which is always 0 or 2 mod 4 for commuting products).
  void rowsum(std::size_t h, std::size_t i) {
    int units = 2 * phases_[h] + 2 * phases_[i];
    units = (units + product_phase(i, &xs_[h * words_], &zs_[h * words_])) & 3;
    for (std::size_t w = 0; w < words_; ++w) {
      xs_[h * words_ + w] ^= xs_[i * words_ + w];
      zs_[h * words_ + w] ^= zs_[i * words_ + w];
    }
    phases_[h] = static_cast<std::uint8_t>((units >> 1) & 1);
  }

  std::optional<std::size_t> random_stabilizer_row(int q) const {
    for (int i = 0; i < n_; ++i) {
      std::size_t row = static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
      if (bit(xs_, row, q)) return row;
    }
    return std::nullopt;
  }

  // Random-outcome collapse: all other rows with X on q absorb row p,
  // row p's old content becomes the matching destabiliser, and row p is
  // replaced by +-Z_q with the measured sign.
  int collapse(int q, std::size_t p, int outcome) {
    for (std::size_t r = 0; r < rows(); ++r) {
      if (r != p && bit(xs_, r, q)) rowsum(r, p);
    }
    std::size_t d = p - static_cast<std::size_t>(n_);
    for (std::size_t w = 0; w < words_; ++w) {
      xs_[d * words_ + w] = xs_[p * words_ + w];
      zs_[d * words_ + w] = zs_[p * words_ + w];
      xs_[p * words_ + w] = 0;
      zs_[p * words_ + w] = 0;
    }
    phases_[d] = phases_[p];
    set_bit(zs_, p, q);
    phases_[p] = static_cast<std::uint8_t>(outcome);
    return outcome;
  }

  bool symplectic_product(std::size_t a, std::size_t b) const {
    int parity = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      parity ^= std::popcount(xs_[a * words_ + w] & zs_[b * words_ + w]) & 1;
      parity ^= std::popcount(zs_[a * words_ + w] & xs_[b * words_ + w]) & 1;
    }
    return parity != 0;
  }

  int n_;
  std::size_t words_;
  std::vector<std::uint64_t> xs_, zs_;
  std::vector<std::uint8_t> phases_;
};

namespace detail {

inline void stabilizer_check_gates(const Circuit& circuit) {
  if (!is_clifford(circuit)) {
    throw SimulationError(
        "stabilizer backend requires a Clifford circuit "
        "(gates from {x, y, z, h, s, cnot, cz} plus measurements)");
  }
}

inline void stabilizer_branch(Tableau tableau, const Circuit& circuit, std::size_t gate_index,
                              std::size_t qubit_offset, double weight, std::string prefix,
                              std::map<std::string, double>& out) {
  for (std::size_t i = gate_index; i < circuit.gates.size(); ++i, qubit_offset = 0) {
    const Gate& g = circuit.gates[i];
    if (g.op != GateOp::Measure) {
      tableau.apply(g);
      continue;
    }
    for (std::size_t j = qubit_offset; j < g.qubits.size(); ++j) {
      int q = g.qubits[j];
      if (tableau.is_deterministic(q)) {
        prefix += static_cast<char>('0' + tableau.deterministic_outcome(q));
        continue;
      }
      Tableau zero_branch = tableau;
      zero_branch.measure_forced(q, 0);
      stabilizer_branch(std::move(zero_branch), circuit, i, j + 1, weight * 0.5, prefix + '0',
                        out);
      tableau.measure_forced(q, 1);
      weight *= 0.5;
      prefix += '1';
    }
  }
  out[prefix] += weight;
}

}  // namespace detail

// Exact outcome distribution of a Clifford circuit: deterministic
// measurements contribute a single branch, random ones split the weight.
inline Distribution run_stabilizer_strong(const Circuit& circuit) {
  detail::stabilizer_check_gates(circuit);
  if (!circuit.has_measurement()) {
    throw SimulationError("circuit has no measure gate");
  }
  std::map<std::string, double> out;
  detail::stabilizer_branch(Tableau(circuit.width), circuit, 0, 0, 1.0, "", out);
  return Distribution::exact(std::move(out));
}

inline std::string run_stabilizer_single_shot(const Circuit& circuit, CounterRng& rng) {
  detail::stabilizer_check_gates(circuit);
  if (!circuit.has_measurement()) {
    throw SimulationError("circuit has no measure gate");
  }
  Tableau tableau(circuit.width);
  std::string outcome;
  for (const Gate& g : circuit.gates) {
    if (g.op == GateOp::Measure) {
      for (int q : g.qubits) outcome += static_cast<char>('0' + tableau.measure(q, rng));
    } else {
      tableau.apply(g);
    }
  }
  return outcome;
}

}  // namespace dequant
