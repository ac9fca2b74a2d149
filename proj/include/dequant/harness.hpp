#pragma once

// Cross-backend runner and gamma-certification: runs a circuit on a
// reference and a candidate backend, compares the output distributions by
// total variation distance, and assembles a reproducible certificate.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dequant/algorithms.hpp"
#include "dequant/blockstate.hpp"
#include "dequant/circuit.hpp"
#include "dequant/dense.hpp"
#include "dequant/distribution.hpp"
#include "dequant/stabilizer.hpp"

namespace dequant {

// Logarithmic default for the block cap: ceil(log2(width)) + 1.
inline int default_block_cap(int width) {
  int cap = 1;
  while ((1 << cap) < width) ++cap;
  return cap + 1;
}

struct RunConfig {
  std::string backend = "dense";
  int block_cap = 0;  // 0 = default_block_cap(width)
  std::optional<std::uint64_t> shots;  // set = weak (sampled) mode
  std::uint64_t seed = 0;
};

struct RunStats {
  std::string backend;
  std::size_t gate_count = 0;
  std::size_t memory_bytes = 0;
  double wall_ms = 0.0;
  int max_block_size = 0;  // blockstate only
};

struct RunOutcome {
  bool ok = false;
  std::optional<Distribution> distribution;
  std::string failure;  // machine-checkable reason, e.g. "CAP_EXCEEDED ..."
  std::string note;
  RunStats stats;
};

namespace detail {

inline Distribution sample_via_shots(const Circuit& circuit, const RunConfig& cfg,
                                     RunOutcome& outcome) {
  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t s = 0; s < *cfg.shots; ++s) {
    CounterRng rng = CounterRng::derive(cfg.seed, s);
    std::string bits;
    if (cfg.backend == "dense") {
      bits = run_single_shot(circuit, rng);
    } else if (cfg.backend == "stabilizer") {
      bits = run_stabilizer_single_shot(circuit, rng);
    } else {  // blockstate
      CapExceeded failure;
      std::size_t peak = 0;
      std::optional<std::string> shot = run_blockstate_single_shot(
          circuit, cfg.block_cap, rng, &failure, &outcome.stats.max_block_size, &peak);
      outcome.stats.memory_bytes = std::max(outcome.stats.memory_bytes, peak * sizeof(Complex));
      if (!shot) {
        outcome.failure = "CAP_EXCEEDED at gate " + std::to_string(failure.gate_index) +
                          " (attempted block size " + std::to_string(failure.attempted_size) +
                          " > cap " + std::to_string(cfg.block_cap) + ")";
        throw SimulationError(outcome.failure);
      }
      bits = *shot;
    }
    ++counts[bits];
  }
  return Distribution::empirical(std::move(counts));
}

}  // namespace detail

// Runs a circuit on one backend. Strong mode computes the exact output
// distribution; weak mode samples `shots` executions. Structured backend
// failures (cap overflow) come back in `failure`, not as exceptions.
inline RunOutcome run_circuit(const Circuit& circuit, RunConfig cfg) {
  RunOutcome outcome;
  if (cfg.block_cap <= 0) cfg.block_cap = default_block_cap(circuit.width);
  outcome.stats.backend = cfg.backend;
  outcome.stats.gate_count = circuit.gates.size();

  auto start = std::chrono::steady_clock::now();
  bool intermediate = false;
  for (std::size_t i = 0; i + 1 < circuit.gates.size(); ++i) {
    if (circuit.gates[i].op == GateOp::Measure) intermediate = true;
  }

  if (cfg.backend == "dense") {
    if (circuit.width > kDenseMaxQubits) {
      throw ResourceError("dense backend supports at most " + std::to_string(kDenseMaxQubits) +
                          " qubits (requested " + std::to_string(circuit.width) + ")");
    }
    outcome.stats.memory_bytes = (std::size_t{1} << circuit.width) * sizeof(Complex);
    if (cfg.shots) {
      // Terminal-only measurements sample from the exact distribution;
      // intermediate ones need per-shot simulation.
      outcome.distribution =
          intermediate ? detail::sample_via_shots(circuit, cfg, outcome)
                       : sample_distribution(run_to_distribution(circuit), *cfg.shots, cfg.seed);
    } else {
      outcome.distribution = run_to_distribution(circuit);
    }
    outcome.ok = true;
  } else if (cfg.backend == "stabilizer") {
    detail::stabilizer_check_gates(circuit);
    outcome.stats.memory_bytes = Tableau(circuit.width).memory_bytes();
    outcome.distribution = cfg.shots
                               ? detail::sample_via_shots(circuit, cfg, outcome)
                               : run_stabilizer_strong(circuit);
    outcome.ok = true;
  } else if (cfg.backend == "blockstate") {
    if (cfg.shots) {
      try {
        outcome.distribution = detail::sample_via_shots(circuit, cfg, outcome);
        outcome.ok = true;
      } catch (const SimulationError&) {
        if (outcome.failure.empty()) throw;
        outcome.ok = false;
      }
    } else {
      BlockRunReport report = run_blockstate(circuit, cfg.block_cap);
      outcome.stats.max_block_size = report.max_block_size;
      outcome.stats.memory_bytes = report.peak_amplitudes * sizeof(Complex);
      outcome.note = report.note;
      if (report.completed) {
        outcome.ok = true;
        outcome.distribution = report.distribution;
      } else {
        outcome.failure = "CAP_EXCEEDED at gate " +
                          std::to_string(report.failing_gate.value_or(0)) +
                          " (attempted block size " +
                          std::to_string(report.attempted_block_size.value_or(0)) + " > cap " +
                          std::to_string(cfg.block_cap) + ")";
      }
    }
  } else if (cfg.backend == "phasebit") {
    std::optional<TruthTable> oracle = match_dj_circuit(circuit);
    if (!oracle || (oracle->n_inputs != 1 && oracle->n_inputs != 2)) {
      throw SimulationError(
          "phasebit backend handles Deutsch-Jozsa-shaped circuits with a bound "
          "1- or 2-input oracle");
    }
    DjDequantResult r = dj_dequantised_solve(*oracle);
    outcome.distribution = Distribution::point(r.outcome_bits);
    outcome.note = std::string(r.classification == FunctionClass::Constant ? "constant"
                                                                           : "balanced") +
                   " function identified exactly; f(00..)=" + std::to_string(r.f00) +
                   ", truth table ";
    for (std::uint8_t v : r.reconstructed.values) outcome.note += static_cast<char>('0' + v);
    outcome.stats.memory_bytes = sizeof(PhasePair) * r.readings.size();
    outcome.ok = true;
    if (cfg.shots) {
      outcome.distribution = sample_distribution(*outcome.distribution, *cfg.shots, cfg.seed);
    }
  } else {
    throw SimulationError("unknown backend '" + cfg.backend + "'");
  }

  outcome.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  return outcome;
}

struct DequantCertificate {
  int schema_version = 1;
  int width = 0;
  std::size_t gate_count = 0;
  std::string reference;
  std::string candidate;
  std::string mode;  // "strong" or "weak"
  double gamma = 0.0;
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 0;
  int block_cap = 0;
  double tvd_value = 0.0;
  bool verdict = false;
  std::string reason;
  RunStats reference_stats;
  RunStats candidate_stats;

  // Wall times vary between runs, so they are opt-in: the default
  // serialisation is byte-identical for identical inputs and seeds.
  nlohmann::json to_json(bool include_timings = false) const {
    nlohmann::json run_ref{{"backend", reference_stats.backend},
                           {"memory_bytes", reference_stats.memory_bytes}};
    nlohmann::json run_cand{{"backend", candidate_stats.backend},
                            {"memory_bytes", candidate_stats.memory_bytes},
                            {"max_block_size", candidate_stats.max_block_size}};
    if (include_timings) {
      run_ref["wall_ms"] = reference_stats.wall_ms;
      run_cand["wall_ms"] = candidate_stats.wall_ms;
    }
    nlohmann::json j{
        {"schema_version", schema_version},
        {"circuit", {{"width", width}, {"gate_count", gate_count}}},
        {"comparison",
         {{"reference", reference},
          {"candidate", candidate},
          {"mode", mode},
          {"gamma", gamma},
          {"shots", shots ? nlohmann::json(*shots) : nlohmann::json(nullptr)},
          {"seed", seed},
          {"block_cap", block_cap}}},
        {"result", {{"tvd", tvd_value}, {"verdict", verdict}, {"reason", reason}}},
        {"reference_run", run_ref},
        {"candidate_run", run_cand}};
    return j;
  }
};

// Certifies that the candidate backend reproduces the reference output
// distribution to within gamma. Strong candidates compare exactly; when
// shots are given the candidate is sampled and compared empirically.
inline DequantCertificate certify(const Circuit& circuit, const std::string& reference,
                                  const std::string& candidate, double gamma,
                                  std::optional<std::uint64_t> shots, std::uint64_t seed,
                                  int block_cap = 0) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  DequantCertificate cert;
  cert.width = circuit.width;
  cert.gate_count = circuit.gates.size();
  cert.reference = reference;
  cert.candidate = candidate;
  cert.gamma = gamma;
  cert.shots = shots;
  cert.seed = seed;
  cert.block_cap = block_cap > 0 ? block_cap : default_block_cap(circuit.width);
  cert.mode = shots ? "weak" : "strong";

  RunConfig ref_cfg{reference, cert.block_cap, std::nullopt, seed};
  RunOutcome ref = run_circuit(circuit, ref_cfg);
  cert.reference_stats = ref.stats;
  if (!ref.ok || !ref.distribution) {
    throw SimulationError("reference backend failed: " + ref.failure);
  }

  RunConfig cand_cfg{candidate, cert.block_cap, shots, seed};
  RunOutcome cand = run_circuit(circuit, cand_cfg);
  cert.candidate_stats = cand.stats;
  if (!cand.ok || !cand.distribution) {
    cert.verdict = false;
    cert.tvd_value = 1.0;
    cert.reason = cand.failure.empty() ? "candidate produced no distribution" : cand.failure;
    return cert;
  }

  cert.tvd_value = tvd(*ref.distribution, *cand.distribution);
  cert.verdict = cert.tvd_value < gamma;
  if (!cert.verdict) cert.reason = "tvd not below gamma";
  return cert;
}

}  // namespace dequant
