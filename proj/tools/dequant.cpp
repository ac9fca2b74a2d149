// Command-line front end: run circuits on any backend, analyze circuit
// structure, compare backends (gamma certification), solve Deutsch-Jozsa
// instances, and print the valid-function census.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dequant/algorithms.hpp"
#include "dequant/census.hpp"
#include "dequant/circuit.hpp"
#include "dequant/harness.hpp"

namespace {

struct OracleBinding {
  std::string name;
  std::string path;
};

std::vector<OracleBinding> parse_oracle_flags(const std::vector<std::string>& flags) {
  std::vector<OracleBinding> bindings;
  for (const std::string& flag : flags) {
    std::size_t eq = flag.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == flag.size()) {
      throw dequant::SimulationError("--oracle expects name=path.tt, got '" + flag + "'");
    }
    bindings.push_back({flag.substr(0, eq), flag.substr(eq + 1)});
  }
  return bindings;
}

dequant::Circuit load_circuit(const std::string& path, const std::vector<std::string>& oracles) {
  dequant::Circuit circuit = dequant::load_circuit_file(path);
  for (const OracleBinding& b : parse_oracle_flags(oracles)) {
    circuit.oracles[b.name] = dequant::load_truth_table_file(b.path);
  }
  return circuit;
}

void print_distribution(const dequant::Distribution& dist) {
  if (dist.is_exact()) {
    std::cout << "outcomes (exact):\n";
    for (const auto& [bits, p] : dist.probabilities()) {
      std::cout << "  " << bits << "  " << p << "\n";
    }
  } else {
    std::cout << "outcomes (" << dist.shots() << " shots):\n";
    for (const auto& [bits, c] : dist.counts()) {
      std::cout << "  " << bits << "  " << c << "\n";
    }
  }
}

int cmd_run(const std::string& circuit_path, const std::vector<std::string>& oracles,
            const std::string& backend, int cap, std::optional<std::uint64_t> shots,
            std::uint64_t seed, bool exact) {
  dequant::Circuit circuit = load_circuit(circuit_path, oracles);
  dequant::RunConfig cfg;
  cfg.backend = backend;
  cfg.block_cap = cap;
  cfg.seed = seed;
  if (shots && !exact) cfg.shots = shots;

  dequant::RunOutcome outcome = dequant::run_circuit(circuit, cfg);
  std::cout << "backend " << backend << "\n"
            << "gates " << outcome.stats.gate_count << "\n";
  if (backend == "blockstate") {
    std::cout << "max_block_size " << outcome.stats.max_block_size << "\n";
  }
  std::cout << "memory_bytes " << outcome.stats.memory_bytes << "\n";
  if (!outcome.ok) {
    std::cout << "status failed: " << outcome.failure << "\n";
    return 2;
  }
  std::cout << "status ok\n";
  if (!outcome.note.empty()) std::cout << "note " << outcome.note << "\n";
  if (outcome.distribution) print_distribution(*outcome.distribution);
  return 0;
}

int cmd_analyze(const std::string& circuit_path, const std::vector<std::string>& oracles,
                int cap) {
  dequant::Circuit circuit = load_circuit(circuit_path, oracles);
  if (cap <= 0) cap = dequant::default_block_cap(circuit.width);
  dequant::BackendRecommendation rec = dequant::recommend_backend(circuit, cap);
  std::cout << "width " << circuit.width << "\n"
            << "gates " << circuit.gates.size() << "\n"
            << "clifford " << (dequant::is_clifford(circuit) ? "true" : "false") << "\n"
            << "static_block_bound " << rec.static_bound << "\n"
            << "block_cap " << cap << "\n"
            << "recommendation " << rec.backend << "\n"
            << "rationale " << rec.rationale << "\n";
  return 0;
}

int cmd_compare(const std::string& circuit_path, const std::vector<std::string>& oracles,
                const std::string& reference, const std::string& candidate, double gamma,
                std::optional<std::uint64_t> shots, std::uint64_t seed, int cap, bool timings) {
  dequant::Circuit circuit = load_circuit(circuit_path, oracles);
  dequant::DequantCertificate cert =
      dequant::certify(circuit, reference, candidate, gamma, shots, seed, cap);
  std::cout << cert.to_json(timings).dump(2) << "\n";
  return cert.verdict ? 0 : 2;
}

int cmd_dj(int n, const std::string& tt_bits, const std::string& method,
           const std::string& backend) {
  dequant::TruthTable f = dequant::parse_truth_table("tt " + tt_bits);
  if (f.n_inputs != n) {
    throw dequant::SimulationError("--tt has " + std::to_string(f.n_inputs) +
                                   " inputs, but --n is " + std::to_string(n));
  }
  if (method == "quantum") {
    dequant::DjResult r = dequant::dj_quantum_solve(f, backend);
    std::cout << "method quantum (" << backend << ")\n"
              << "outcome " << r.outcome_bits << "\n"
              << "classification "
              << (r.classification == dequant::FunctionClass::Constant ? "CONSTANT" : "BALANCED")
              << "\n";
    return 0;
  }
  dequant::DjDequantResult r = dequant::dj_dequantised_solve(f);
  std::cout << "method dequantised\n";
  std::cout << "readings";
  for (const dequant::AxisReading& a : r.readings) {
    std::cout << ' ' << (a.sign < 0 ? '-' : '+')
              << (a.axis == dequant::Axis::Imaginary ? "imaginary" : "real");
  }
  std::cout << "\nclassification "
            << (r.classification == dequant::FunctionClass::Constant ? "CONSTANT" : "BALANCED")
            << "\n";
  std::cout << "f(0";
  for (int i = 1; i < n; ++i) std::cout << '0';
  std::cout << ") = " << r.f00 << "\n";
  std::cout << "identified_tt ";
  for (auto v : r.reconstructed.values) std::cout << static_cast<char>('0' + v);
  std::cout << "\n";
  return 0;
}

int cmd_census(int n) {
  dequant::CensusReport report = dequant::function_census(n);
  std::cout << "n " << report.n << "\n"
            << "functions " << report.n_total.get_str() << "\n"
            << "constant " << report.n_constant.get_str() << "\n"
            << "balanced " << report.n_balanced.get_str() << "\n"
            << "invalid " << report.n_invalid.get_str() << "\n"
            << "p_valid " << report.p_valid.get_str() << " (" << report.p_valid.get_d() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dequant: classical simulation backends for quantum circuits, "
               "with certification that the efficient backends reproduce the "
               "reference output distribution"};
  app.require_subcommand(1);

  std::string circuit_path, backend = "dense", reference = "dense", candidate, method = "quantum";
  std::string tt_bits;
  std::vector<std::string> oracle_flags;
  int cap = 0, dj_n = 2, census_n = 2;
  double gamma = 1e-6;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> shots;
  bool exact = false, timings = false;

  CLI::App* run = app.add_subcommand("run", "run a circuit on one backend");
  run->add_option("--circuit", circuit_path, "path to a .dqc file")->required();
  run->add_option("--backend", backend, "dense|phasebit|blockstate|stabilizer");
  run->add_option("--cap", cap, "block cap for blockstate (default ceil(log2(width))+1)");
  run->add_option("--oracle", oracle_flags, "bind an oracle, name=path.tt")->take_all();
  run->add_option("--shots", shots, "sample this many shots (weak mode)");
  run->add_option("--seed", seed, "rng seed");
  run->add_flag("--exact", exact, "force the exact (strong) distribution");

  CLI::App* analyze = app.add_subcommand("analyze", "structural analysis and backend choice");
  analyze->add_option("--circuit", circuit_path, "path to a .dqc file")->required();
  analyze->add_option("--cap", cap, "block cap used for the recommendation");
  analyze->add_option("--oracle", oracle_flags, "bind an oracle, name=path.tt")->take_all();

  CLI::App* compare = app.add_subcommand("compare", "certify a candidate against a reference");
  compare->add_option("--circuit", circuit_path, "path to a .dqc file")->required();
  compare->add_option("--reference", reference, "reference backend");
  compare->add_option("--candidate", candidate, "candidate backend")->required();
  compare->add_option("--gamma", gamma, "distribution distance bound")->required();
  compare->add_option("--shots", shots, "sample the candidate (weak comparison)");
  compare->add_option("--seed", seed, "rng seed");
  compare->add_option("--cap", cap, "block cap for blockstate");
  compare->add_option("--oracle", oracle_flags, "bind an oracle, name=path.tt")->take_all();
  compare->add_flag("--timings", timings, "include wall times in the certificate");

  CLI::App* dj = app.add_subcommand("dj", "solve a Deutsch-Jozsa instance");
  dj->add_option("--n", dj_n, "input size (1 or 2)")->required();
  dj->add_option("--tt", tt_bits, "truth table bits, e.g. 0110")->required();
  dj->add_option("--method", method, "quantum|dequantised");
  dj->add_option("--backend", backend, "backend for the quantum method");

  CLI::App* census = app.add_subcommand("census", "count constant/balanced/invalid functions");
  census->add_option("--n", census_n, "input size (1..16)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) {
      return cmd_run(circuit_path, oracle_flags, backend, cap, shots, seed, exact);
    }
    if (analyze->parsed()) return cmd_analyze(circuit_path, oracle_flags, cap);
    if (compare->parsed()) {
      return cmd_compare(circuit_path, oracle_flags, reference, candidate, gamma, shots, seed,
                         cap, timings);
    }
    if (dj->parsed()) return cmd_dj(dj_n, tt_bits, method, backend);
    if (census->parsed()) return cmd_census(census_n);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
