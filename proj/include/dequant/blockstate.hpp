#pragma once

// Block-product simulator: the global state is a tensor product of small
// dense factors ("entanglement blocks"). Cross-block gates merge factors,
// separable factors are split back greedily, and exceeding the block cap
// is a structured de-quantisation failure, not a crash.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dequant/dense.hpp"

namespace dequant {

inline constexpr double kSplitTolerance = 1e-10;

struct Block {
  std::vector<int> qubits;     // ascending; first qubit = MSB of the local index
  std::vector<Complex> amps;   // length 2^qubits.size()
};

struct CapExceeded {
  std::size_t gate_index = 0;
  int attempted_size = 0;
};

class BlockState {
 public:
  BlockState(int n, std::string_view bits, int cap) : n_(n), cap_(cap), owner_(n) {
    if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
    if (cap < 1) throw std::invalid_argument("block cap must be >= 1");
    if (bits.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("input bitstring length does not match qubit count");
    }
    blocks_.reserve(n);
    for (int q = 0; q < n; ++q) {
      char c = bits[q];
      if (c != '0' && c != '1') throw std::invalid_argument("input bits must be 0 or 1");
      Block b;
      b.qubits = {q};
      b.amps = c == '0' ? std::vector<Complex>{Complex(1), Complex(0)}
                        : std::vector<Complex>{Complex(0), Complex(1)};
      owner_[q] = static_cast<int>(blocks_.size());
      blocks_.push_back(std::move(b));
    }
    current_amps_ = 2 * static_cast<std::size_t>(n);
    peak_amps_ = current_amps_;
  }

  BlockState(int n, int cap)
      : BlockState(n, std::string(n > 0 ? static_cast<std::size_t>(n) : 0, '0'), cap) {}

  int num_qubits() const { return n_; }
  int cap() const { return cap_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int max_block_size() const { return max_block_; }
  std::size_t peak_amplitudes() const { return peak_amps_; }
  int block_of(int qubit) const { return owner_[qubit]; }

  // Applies a unitary gate: merges the touched blocks, applies the gate to
  // the merged local vector, then splits separable qubits back off.
  // Returns the failure record if the merge would exceed the cap.
  std::optional<CapExceeded> apply(const Gate& gate, const OracleMap& oracles,
                                   std::size_t gate_index = 0) {
    if (gate.op == GateOp::Measure) {
      throw std::logic_error("measurement gates are handled by the circuit runners");
    }
    for (int q : gate.qubits) check_qubit(q);

    std::vector<int> touched;
    for (int q : gate.qubits) {
      int b = owner_[q];
      if (std::find(touched.begin(), touched.end(), b) == touched.end()) touched.push_back(b);
    }
    int merged_size = 0;
    for (int b : touched) merged_size += static_cast<int>(blocks_[b].qubits.size());
    if (merged_size > cap_) return CapExceeded{gate_index, merged_size};

    std::size_t target = touched.size() == 1 ? static_cast<std::size_t>(touched[0])
                                             : merge(touched);
    Block& block = blocks_[target];
    int k = static_cast<int>(block.qubits.size());
    std::vector<int> local(gate.qubits.size());
    for (std::size_t i = 0; i < gate.qubits.size(); ++i) {
      local[i] = local_position(block, gate.qubits[i]);
    }
    detail::apply_gate_at(block.amps, k, gate, local, oracles);
    split_block(target);
    return std::nullopt;
  }

  // Greedy single-qubit peeling: repeatedly factor any qubit whose
  // row-reshaped local vector is rank one within tolerance.
  void split_block(std::size_t index) {
    bool progress = true;
    while (progress && blocks_[index].qubits.size() > 1) {
      progress = false;
      Block& block = blocks_[index];
      int k = static_cast<int>(block.qubits.size());
      for (int pos = 0; pos < k; ++pos) {
        if (try_peel(index, pos)) {
          progress = true;
          break;
        }
      }
    }
  }

  // Full dense vector in global qubit order; for validation on small n.
  std::vector<Complex> reassemble() const {
    if (n_ > 24) throw ResourceError("reassemble is limited to 24 qubits");
    std::size_t dim = std::size_t{1} << n_;
    std::vector<Complex> out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      Complex a(1);
      for (const Block& b : blocks_) {
        a *= b.amps[local_index(b, i)];
      }
      out[i] = a;
    }
    return out;
  }

  // Exact marginal over the listed qubits, assembled as the product of
  // per-block marginals.
  std::map<std::string, double> measure_marginal(const std::vector<int>& qubits) const {
    for (int q : qubits) check_qubit(q);
    struct Group {
      std::vector<std::size_t> key_slots;  // positions within the outcome key
      std::vector<int> local_pos;          // matching local qubit positions
      std::map<std::string, double> marginal;
    };
    std::map<int, Group> groups;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      const Block& b = blocks_[owner_[qubits[i]]];
      Group& g = groups[owner_[qubits[i]]];
      g.key_slots.push_back(i);
      g.local_pos.push_back(local_position(b, qubits[i]));
    }
    for (auto& [bi, g] : groups) {
      const Block& b = blocks_[bi];
      int k = static_cast<int>(b.qubits.size());
      std::string key(g.local_pos.size(), '0');
      for (std::size_t idx = 0; idx < b.amps.size(); ++idx) {
        double p = std::norm(b.amps[idx]);
        if (p == 0.0) continue;
        for (std::size_t j = 0; j < g.local_pos.size(); ++j) {
          key[j] = static_cast<char>('0' + detail::bit_at(idx, k, g.local_pos[j]));
        }
        g.marginal[key] += p;
      }
    }

    std::size_t support = 1;
    for (const auto& [bi, g] : groups) {
      support *= g.marginal.size();
      if (support > kMaxExactOutcomes) {
        throw ResourceError("exact outcome map exceeds " + std::to_string(kMaxExactOutcomes) +
                            " entries; use sampling instead");
      }
    }
    std::vector<std::pair<std::string, double>> partial{{std::string(qubits.size(), '0'), 1.0}};
    for (const auto& [bi, g] : groups) {
      std::vector<std::pair<std::string, double>> next;
      next.reserve(partial.size() * g.marginal.size());
      for (const auto& [key, p] : partial) {
        for (const auto& [sub, q] : g.marginal) {
          std::string merged = key;
          for (std::size_t j = 0; j < g.key_slots.size(); ++j) merged[g.key_slots[j]] = sub[j];
          next.emplace_back(std::move(merged), p * q);
        }
      }
      partial = std::move(next);
    }
    std::map<std::string, double> out;
    for (auto& [key, p] : partial) out[key] += p;
    return out;
  }

  Distribution measure_distribution(const std::vector<int>& qubits) const {
    return Distribution::exact(measure_marginal(qubits));
  }

  // Projects the listed qubits onto an outcome and renormalises the
  // affected blocks; measured qubits peel off as singletons.
  void collapse(const std::vector<int>& qubits, std::string_view outcome) {
    if (qubits.size() != outcome.size()) {
      throw std::invalid_argument("outcome length does not match qubit list");
    }
    std::map<int, std::vector<std::pair<int, char>>> per_block;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      check_qubit(qubits[i]);
      const Block& b = blocks_[owner_[qubits[i]]];
      per_block[owner_[qubits[i]]].emplace_back(local_position(b, qubits[i]), outcome[i]);
    }
    for (const auto& [bi, constraints] : per_block) {
      Block& b = blocks_[bi];
      int k = static_cast<int>(b.qubits.size());
      double p = 0.0;
      for (std::size_t idx = 0; idx < b.amps.size(); ++idx) {
        bool match = true;
        for (const auto& [pos, bit] : constraints) {
          if (detail::bit_at(idx, k, pos) != bit - '0') { match = false; break; }
        }
        if (match) {
          p += std::norm(b.amps[idx]);
        } else {
          b.amps[idx] = Complex(0);
        }
      }
      if (p < 1e-300) throw SimulationError("collapse onto a zero-probability outcome");
      double scale = 1.0 / std::sqrt(p);
      for (Complex& a : b.amps) a *= scale;
      split_block(static_cast<std::size_t>(bi));
    }
  }

  // Samples the listed qubits per the Born rule, collapsing in place.
  std::string measure(const std::vector<int>& qubits, CounterRng& rng) {
    std::string outcome;
    outcome.reserve(qubits.size());
    for (int q : qubits) {
      check_qubit(q);
      const Block& b = blocks_[owner_[q]];
      int pos = local_position(b, q);
      int k = static_cast<int>(b.qubits.size());
      double p0 = 0.0;
      for (std::size_t idx = 0; idx < b.amps.size(); ++idx) {
        if (detail::bit_at(idx, k, pos) == 0) p0 += std::norm(b.amps[idx]);
      }
      char bit = rng.uniform() < p0 ? '0' : '1';
      collapse({q}, std::string_view(&bit, 1));
      outcome.push_back(bit);
    }
    return outcome;
  }

 private:
  void check_qubit(int q) const {
    if (q < 0 || q >= n_) {
      throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range");
    }
  }

  static int local_position(const Block& b, int qubit) {
    auto it = std::lower_bound(b.qubits.begin(), b.qubits.end(), qubit);
    return static_cast<int>(it - b.qubits.begin());
  }

  // Local index of a block inside a global amplitude index.
  std::size_t local_index(const Block& b, std::size_t global_index) const {
    std::size_t local = 0;
    for (int q : b.qubits) {
      local = (local << 1) | static_cast<std::size_t>(detail::bit_at(global_index, n_, q));
    }
    return local;
  }

  // Tensor-merges the listed blocks into one, keeping qubits ascending.
  std::size_t merge(const std::vector<int>& block_indices) {
    std::vector<int> sorted = block_indices;
    std::sort(sorted.begin(), sorted.end());

    Block merged;
    for (int bi : sorted) {
      for (int q : blocks_[bi].qubits) merged.qubits.push_back(q);
    }
    std::sort(merged.qubits.begin(), merged.qubits.end());
    int k = static_cast<int>(merged.qubits.size());
    std::size_t dim = std::size_t{1} << k;

    peak_amps_ = std::max(peak_amps_, current_amps_ + dim);

    merged.amps.assign(dim, Complex(1));
    for (std::size_t idx = 0; idx < dim; ++idx) {
      for (int bi : sorted) {
        const Block& b = blocks_[bi];
        std::size_t sub = 0;
        for (int q : b.qubits) {
          sub = (sub << 1) |
                static_cast<std::size_t>(detail::bit_at(idx, k, local_position(merged, q)));
        }
        merged.amps[idx] *= b.amps[sub];
      }
    }

    // Replace the first block, erase the rest (descending to keep indices valid).
    std::size_t target = static_cast<std::size_t>(sorted.front());
    for (int bi : sorted) current_amps_ -= blocks_[bi].amps.size();
    current_amps_ += dim;
    blocks_[target] = std::move(merged);
    for (std::size_t i = sorted.size(); i-- > 1;) {
      blocks_.erase(blocks_.begin() + sorted[i]);
    }
    reindex_owners();
    max_block_ = std::max(max_block_, k);
    return static_cast<std::size_t>(target);
  }

  void reindex_owners() {
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      for (int q : blocks_[bi].qubits) owner_[q] = static_cast<int>(bi);
    }
  }

  // Attempts to factor the qubit at local position `pos` out of block
  // `index`. Reshape the local vector as a 2 x 2^(k-1) matrix indexed by
  // that qubit's bit; the block is separable across it iff the matrix has
  // rank one, tested by proportionality against the larger row.
  bool try_peel(std::size_t index, int pos) {
    Block& block = blocks_[index];
    int k = static_cast<int>(block.qubits.size());
    std::size_t dim = block.amps.size();
    std::size_t half = dim / 2;
    std::size_t pm = detail::bit_mask(k, pos);

    std::vector<Complex> row0(half), row1(half);
    std::size_t c = 0;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      if (idx & pm) continue;
      row0[c] = block.amps[idx];
      row1[c] = block.amps[idx | pm];
      ++c;
    }

    double n0 = 0.0, n1 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      n0 += std::norm(row0[i]);
      n1 += std::norm(row1[i]);
    }
    const bool pivot_is_zero = n0 >= n1;
    const std::vector<Complex>& pivot = pivot_is_zero ? row0 : row1;
    const std::vector<Complex>& other = pivot_is_zero ? row1 : row0;
    double pivot_norm2 = pivot_is_zero ? n0 : n1;

    Complex lambda(0);
    for (std::size_t i = 0; i < half; ++i) lambda += other[i] * std::conj(pivot[i]);
    lambda /= pivot_norm2;
    for (std::size_t i = 0; i < half; ++i) {
      if (std::abs(other[i] - lambda * pivot[i]) > kSplitTolerance) return false;
    }

    double pivot_norm = std::sqrt(pivot_norm2);
    Complex u0 = pivot_is_zero ? Complex(pivot_norm) : lambda * pivot_norm;
    Complex u1 = pivot_is_zero ? lambda * pivot_norm : Complex(pivot_norm);

    Block single;
    single.qubits = {block.qubits[pos]};
    single.amps = {u0, u1};

    Block rest;
    rest.qubits = block.qubits;
    rest.qubits.erase(rest.qubits.begin() + pos);
    rest.amps.resize(half);
    for (std::size_t i = 0; i < half; ++i) rest.amps[i] = pivot[i] / pivot_norm;

    current_amps_ -= dim;
    current_amps_ += half + 2;
    blocks_[index] = std::move(rest);
    owner_[single.qubits[0]] = static_cast<int>(blocks_.size());
    blocks_.push_back(std::move(single));
    return true;
  }

  int n_;
  int cap_;
  std::vector<Block> blocks_;
  std::vector<int> owner_;
  int max_block_ = 1;
  std::size_t current_amps_ = 0;
  std::size_t peak_amps_ = 0;
};

struct BlockRunReport {
  bool completed = false;
  int max_block_size = 0;
  std::size_t peak_amplitudes = 0;
  std::optional<std::size_t> failing_gate;
  std::optional<int> attempted_block_size;
  std::optional<Distribution> distribution;
  std::string note;
};

namespace detail {

struct BlockRunState {
  BlockRunReport report;
  std::map<std::string, double> outcomes;
  bool materialized = true;
};

inline bool block_branch(BlockState state, const Circuit& circuit, std::size_t gate_index,
                         double weight, const std::string& prefix, BlockRunState& run) {
  for (std::size_t i = gate_index; i < circuit.gates.size(); ++i) {
    const Gate& g = circuit.gates[i];
    if (g.op != GateOp::Measure) {
      std::optional<CapExceeded> failed = state.apply(g, circuit.oracles, i);
      run.report.max_block_size = std::max(run.report.max_block_size, state.max_block_size());
      run.report.peak_amplitudes = std::max(run.report.peak_amplitudes, state.peak_amplitudes());
      if (failed) {
        run.report.failing_gate = failed->gate_index;
        run.report.attempted_block_size = failed->attempted_size;
        return false;
      }
      continue;
    }
    std::map<std::string, double> marginal;
    try {
      marginal = state.measure_marginal(g.qubits);
    } catch (const ResourceError&) {
      if (i + 1 == circuit.gates.size()) {
        // Terminal measurement with unmaterialisably many outcomes: the run
        // still completes, only the joint distribution is omitted.
        run.materialized = false;
        run.report.note = "distribution omitted: outcome support exceeds the exact-map limit";
        return true;
      }
      throw;
    }
    if (i + 1 == circuit.gates.size()) {
      if (run.materialized) {
        for (const auto& [bits, p] : marginal) {
          if (p < kBranchFloor) continue;
          run.outcomes[prefix + bits] += weight * p;
        }
      }
      return true;
    }
    for (const auto& [bits, p] : marginal) {
      if (p < kBranchFloor) continue;
      BlockState next = state;
      next.collapse(g.qubits, bits);
      run.report.max_block_size = std::max(run.report.max_block_size, next.max_block_size());
      if (!block_branch(std::move(next), circuit, i + 1, weight * p, prefix + bits, run)) {
        return false;
      }
    }
    return true;
  }
  if (run.materialized) run.outcomes[prefix] += weight;
  return true;
}

}  // namespace detail

// Strong simulation under the block cap. On success the report carries the
// exact distribution (when materialisable) and the measured maximum block
// size; on cap overflow it carries the failing gate instead.
inline BlockRunReport run_blockstate(const Circuit& circuit, std::string_view input_bits,
                                     int cap) {
  if (!circuit.has_measurement()) {
    throw SimulationError("circuit has no measure gate");
  }
  detail::BlockRunState run;
  BlockState state(circuit.width, input_bits, cap);
  run.report.max_block_size = state.max_block_size();
  run.report.peak_amplitudes = state.peak_amplitudes();
  run.report.completed = detail::block_branch(std::move(state), circuit, 0, 1.0, "", run);
  if (run.report.completed && run.materialized) {
    run.report.distribution = Distribution::exact(std::move(run.outcomes));
  }
  return run.report;
}

inline BlockRunReport run_blockstate(const Circuit& circuit, int cap) {
  return run_blockstate(circuit, std::string(circuit.width, '0'), cap);
}

// One sampled execution; cap overflow is reported, not thrown.
inline std::optional<std::string> run_blockstate_single_shot(const Circuit& circuit, int cap,
                                                             CounterRng& rng,
                                                             CapExceeded* failure = nullptr,
                                                             int* max_block_size = nullptr,
                                                             std::size_t* peak_amps = nullptr) {
  BlockState state(circuit.width, std::string(circuit.width, '0'), cap);
  std::string outcome;
  std::optional<CapExceeded> failed;
  for (std::size_t i = 0; i < circuit.gates.size() && !failed; ++i) {
    const Gate& g = circuit.gates[i];
    if (g.op == GateOp::Measure) {
      outcome += state.measure(g.qubits, rng);
    } else {
      failed = state.apply(g, circuit.oracles, i);
    }
  }
  if (max_block_size) *max_block_size = std::max(*max_block_size, state.max_block_size());
  if (peak_amps) *peak_amps = std::max(*peak_amps, state.peak_amplitudes());
  if (failed) {
    if (failure) *failure = *failed;
    return std::nullopt;
  }
  return outcome;
}

}  // namespace dequant
