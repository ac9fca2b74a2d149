#pragma once

// Circuit intermediate representation, the line-oriented .dqc text format,
// truth-table oracles (.tt) and structural analysis used for backend
// dispatch.

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dequant/errors.hpp"

namespace dequant {

enum class GateOp { X, Y, Z, H, S, T, Cnot, Cz, Ccx, Rk, Oracle, Measure };

inline const char* gate_name(GateOp op) {
  switch (op) {
    case GateOp::X: return "x";
    case GateOp::Y: return "y";
    case GateOp::Z: return "z";
    case GateOp::H: return "h";
    case GateOp::S: return "s";
    case GateOp::T: return "t";
    case GateOp::Cnot: return "cnot";
    case GateOp::Cz: return "cz";
    case GateOp::Ccx: return "ccx";
    case GateOp::Rk: return "rk";
    case GateOp::Oracle: return "oracle";
    case GateOp::Measure: return "measure";
  }
  return "?";
}

struct Gate {
  GateOp op = GateOp::X;
  std::vector<int> qubits;
  int k = 0;           // Rk only: controlled phase rotation by 2*pi/2^k
  std::string oracle;  // Oracle only: name resolved through Circuit::oracles

  Gate() = default;
  Gate(GateOp op_, std::vector<int> qubits_, int k_ = 0, std::string oracle_ = {})
      : op(op_), qubits(std::move(qubits_)), k(k_), oracle(std::move(oracle_)) {}

  bool operator==(const Gate&) const = default;
};

// Boolean function f given extensionally; values[x] = f(x) with the first
// listed input qubit as the most significant bit of x.
struct TruthTable {
  int n_inputs = 0;
  std::vector<std::uint8_t> values;

  int value(std::size_t x) const { return values[x]; }
  std::size_t size() const { return values.size(); }

  bool operator==(const TruthTable&) const = default;
};

using OracleMap = std::map<std::string, TruthTable>;

struct Circuit {
  int width = 0;
  std::vector<Gate> gates;
  OracleMap oracles;  // bound before simulation, not part of the .dqc text

  bool has_measurement() const {
    return std::any_of(gates.begin(), gates.end(),
                       [](const Gate& g) { return g.op == GateOp::Measure; });
  }
};

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) toks.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

inline long parse_int(const std::string& tok, int line, const char* what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected integer for ") + what + ", got '" + tok + "'");
  }
  return value;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

}  // namespace detail

// Parses the .dqc grammar: a `qubits <n>` header, then one gate per line.
// `#` starts a comment, blank lines are skipped, mnemonics are
// case-insensitive. Oracle truth tables are bound separately.
inline Circuit parse_circuit(std::string_view text) {
  Circuit circuit;
  bool have_header = false;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::vector<std::string> toks = detail::split_tokens(line);
    if (toks.empty()) {
      if (pos > text.size()) break;
      continue;
    }

    std::string mnem = detail::to_lower(toks[0]);
    if (!have_header) {
      if (mnem != "qubits") throw ParseError(line_no, "expected 'qubits <n>' header");
      if (toks.size() != 2) throw ParseError(line_no, "'qubits' takes exactly one count");
      long n = detail::parse_int(toks[1], line_no, "qubit count");
      if (n < 1) throw ParseError(line_no, "qubit count must be >= 1");
      circuit.width = static_cast<int>(n);
      have_header = true;
      continue;
    }
    if (mnem == "qubits") throw ParseError(line_no, "duplicate 'qubits' header");

    Gate gate;
    std::size_t qubit_start = 1;
    std::size_t expected_qubits = 0;  // 0 = variable (oracle, measure)
    if (mnem == "x") { gate.op = GateOp::X; expected_qubits = 1; }
    else if (mnem == "y") { gate.op = GateOp::Y; expected_qubits = 1; }
    else if (mnem == "z") { gate.op = GateOp::Z; expected_qubits = 1; }
    else if (mnem == "h") { gate.op = GateOp::H; expected_qubits = 1; }
    else if (mnem == "s") { gate.op = GateOp::S; expected_qubits = 1; }
    else if (mnem == "t") { gate.op = GateOp::T; expected_qubits = 1; }
    else if (mnem == "cnot") { gate.op = GateOp::Cnot; expected_qubits = 2; }
    else if (mnem == "cz") { gate.op = GateOp::Cz; expected_qubits = 2; }
    else if (mnem == "ccx") { gate.op = GateOp::Ccx; expected_qubits = 3; }
    else if (mnem == "rk") {
      gate.op = GateOp::Rk;
      if (toks.size() < 2) throw ParseError(line_no, "'rk' needs a rotation exponent");
      long k = detail::parse_int(toks[1], line_no, "rk exponent");
      if (k < 1 || k > 64) throw ParseError(line_no, "rk exponent must be in [1, 64]");
      gate.k = static_cast<int>(k);
      qubit_start = 2;
      expected_qubits = 2;
    } else if (mnem == "oracle") {
      gate.op = GateOp::Oracle;
      if (toks.size() < 2) throw ParseError(line_no, "'oracle' needs a name");
      if (!detail::is_identifier(toks[1])) {
        throw ParseError(line_no, "oracle name '" + toks[1] + "' is not an identifier");
      }
      gate.oracle = toks[1];
      qubit_start = 2;
    } else if (mnem == "measure") {
      gate.op = GateOp::Measure;
    } else {
      throw ParseError(line_no, "unknown gate '" + toks[0] + "'");
    }

    for (std::size_t i = qubit_start; i < toks.size(); ++i) {
      long q = detail::parse_int(toks[i], line_no, "qubit index");
      if (q < 0 || q >= circuit.width) {
        throw ParseError(line_no, "qubit index " + std::to_string(q) + " out of range [0, " +
                                      std::to_string(circuit.width) + ")");
      }
      gate.qubits.push_back(static_cast<int>(q));
    }
    if (expected_qubits != 0 && gate.qubits.size() != expected_qubits) {
      throw ParseError(line_no, std::string("'") + gate_name(gate.op) + "' takes " +
                                    std::to_string(expected_qubits) + " qubit(s), got " +
                                    std::to_string(gate.qubits.size()));
    }
    if (gate.op == GateOp::Oracle && gate.qubits.size() < 2) {
      throw ParseError(line_no, "'oracle' needs at least one input qubit and a target");
    }
    if (gate.op == GateOp::Measure && gate.qubits.empty()) {
      throw ParseError(line_no, "'measure' needs at least one qubit");
    }
    std::vector<int> sorted = gate.qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParseError(line_no, "duplicate qubit index in one gate");
    }

    circuit.gates.push_back(std::move(gate));
  }

  if (!have_header) throw ParseError(line_no, "missing 'qubits <n>' header");
  return circuit;
}

inline std::string serialize(const Circuit& circuit) {
  std::ostringstream out;
  out << "qubits " << circuit.width << "\n";
  for (const Gate& g : circuit.gates) {
    out << gate_name(g.op);
    if (g.op == GateOp::Rk) out << ' ' << g.k;
    if (g.op == GateOp::Oracle) out << ' ' << g.oracle;
    for (int q : g.qubits) out << ' ' << q;
    out << "\n";
  }
  return out.str();
}

// Parses the .tt format: one `tt <bits>` line with 2^k bits in lexicographic
// input order; comment and blank lines allowed.
inline TruthTable parse_truth_table(std::string_view text) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::vector<std::string> toks = detail::split_tokens(line);
    if (toks.empty()) {
      if (pos > text.size()) break;
      continue;
    }
    if (detail::to_lower(toks[0]) != "tt" || toks.size() != 2) {
      throw ParseError(line_no, "expected 'tt <bits>'");
    }

    const std::string& bits = toks[1];
    TruthTable table;
    table.values.reserve(bits.size());
    for (char c : bits) {
      if (c != '0' && c != '1') throw ParseError(line_no, "truth table entries must be 0 or 1");
      table.values.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    std::size_t len = table.values.size();
    if (len < 2 || (len & (len - 1)) != 0) {
      throw ParseError(line_no, "truth table length " + std::to_string(len) +
                                    " is not a power of two (>= 2)");
    }
    table.n_inputs = std::countr_zero(len);
    return table;
  }
  throw ParseError(line_no, "no 'tt' line found");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Circuit load_circuit_file(const std::string& path) {
  return parse_circuit(read_text_file(path));
}

inline TruthTable load_truth_table_file(const std::string& path) {
  return parse_truth_table(read_text_file(path));
}

// True iff every gate is a Clifford-group generator or a computational-basis
// measurement. Oracle gates conservatively break the property.
inline bool is_clifford(const Circuit& circuit) {
  for (const Gate& g : circuit.gates) {
    switch (g.op) {
      case GateOp::X:
      case GateOp::Y:
      case GateOp::Z:
      case GateOp::H:
      case GateOp::S:
      case GateOp::Cnot:
      case GateOp::Cz:
      case GateOp::Measure:
        break;
      default:
        return false;
    }
  }
  return true;
}

namespace detail {

struct UnionFind {
  std::vector<int> parent, size;

  explicit UnionFind(int n) : parent(n), size(n, 1) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

}  // namespace detail

// Static connectivity scan: an upper bound on the largest block the
// block-product simulator could ever have to merge. Multi-qubit unitaries
// join their qubits; measurements do not.
inline int static_block_bound(const Circuit& circuit) {
  detail::UnionFind uf(circuit.width);
  for (const Gate& g : circuit.gates) {
    bool joins = g.op == GateOp::Cnot || g.op == GateOp::Cz || g.op == GateOp::Ccx ||
                 g.op == GateOp::Rk || g.op == GateOp::Oracle;
    if (!joins) continue;
    for (std::size_t i = 1; i < g.qubits.size(); ++i) uf.join(g.qubits[0], g.qubits[i]);
  }
  int bound = circuit.width > 0 ? 1 : 0;
  for (int q = 0; q < circuit.width; ++q) {
    bound = std::max(bound, uf.size[uf.find(q)]);
  }
  return bound;
}

struct BackendRecommendation {
  std::string backend;
  std::string rationale;
  int static_bound = 0;
};

inline BackendRecommendation recommend_backend(const Circuit& circuit, int block_cap) {
  BackendRecommendation rec;
  rec.static_bound = static_block_bound(circuit);
  if (is_clifford(circuit)) {
    rec.backend = "stabilizer";
    rec.rationale = "every gate is a Clifford generator or measurement; "
                    "tableau simulation is polynomial regardless of entanglement";
  } else if (rec.static_bound <= block_cap) {
    rec.backend = "blockstate";
    rec.rationale = "static connectivity bounds any merged block to " +
                    std::to_string(rec.static_bound) + " qubits (cap " +
                    std::to_string(block_cap) + ")";
  } else {
    rec.backend = "dense";
    rec.rationale = "circuit is not Clifford and the static block bound " +
                    std::to_string(rec.static_bound) + " exceeds the cap " +
                    std::to_string(block_cap);
  }
  return rec;
}

}  // namespace dequant
