// Copyright 2026 The qos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace qos {

using Qubit = int;
/// Device time unit (dt). All scheduling arithmetic is integral.
using Time = std::int64_t;

struct Operation {
  std::size_t index = 0;
  std::string name;
  /// Order matters: for "cx", qubits[0] is the control and qubits[1] the target.
  std::vector<Qubit> qubits;
  std::vector<double> params;
  Time duration = 0;

  bool acts_on(Qubit q) const {
    for (Qubit x : qubits) {
      if (x == q) return true;
    }
    return false;
  }

  bool operator==(const Operation&) const = default;
};

struct Circuit {
  int num_qubits = 0;
  std::vector<Operation> ops;

  std::size_t size() const { return ops.size(); }
  bool empty() const { return ops.empty(); }

  bool operator==(const Circuit&) const = default;
};

// Arity of the gates with built-in semantics. Barriers take any positive number
// of qubits.
struct GateSignature {
  int num_qubits;  // -1: variadic
  int num_params;
};

inline std::optional<GateSignature> known_gate(std::string_view name) {
  static const std::map<std::string, GateSignature, std::less<>> table = {
      {"h", {1, 0}},  {"x", {1, 0}},  {"z", {1, 0}},  {"s", {1, 0}},
      {"t", {1, 0}},  {"u1", {1, 1}}, {"u2", {1, 2}}, {"u3", {1, 3}},
      {"cx", {2, 0}}, {"barrier", {-1, 0}},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline std::string describe(const Operation& op) {
  std::string out = op.name + "(";
  for (std::size_t i = 0; i < op.qubits.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(op.qubits[i]);
  }
  return out + ")";
}

namespace detail {

inline void check_operation(const Operation& op, int num_qubits) {
  const std::string where = "op " + std::to_string(op.index) + " " + describe(op);
  if (op.qubits.empty()) {
    throw std::invalid_argument(where + ": no qubit operands");
  }
  for (std::size_t i = 0; i < op.qubits.size(); ++i) {
    Qubit q = op.qubits[i];
    if (q < 0 || q >= num_qubits) {
      throw std::invalid_argument(where + ": qubit index " + std::to_string(q) +
                                  " out of range [0," + std::to_string(num_qubits) + ")");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (op.qubits[j] == q) {
        throw std::invalid_argument(where + ": duplicate qubit " + std::to_string(q));
      }
    }
  }
  if (auto sig = known_gate(op.name)) {
    if (sig->num_qubits >= 0 && static_cast<int>(op.qubits.size()) != sig->num_qubits) {
      throw std::invalid_argument(where + ": gate '" + op.name + "' expects " +
                                  std::to_string(sig->num_qubits) + " qubit(s)");
    }
    if (static_cast<int>(op.params.size()) != sig->num_params) {
      throw std::invalid_argument(where + ": gate '" + op.name + "' expects " +
                                  std::to_string(sig->num_params) + " parameter(s)");
    }
  }
  if (op.duration < 0) {
    throw std::invalid_argument(where + ": negative duration");
  }
}

// Integral, non-negative duration from a JSON value. Fractional values are
// rejected rather than rounded.
inline Time json_duration(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_integer()) {
    throw std::invalid_argument(where + ": duration must be a non-negative integer");
  }
  auto d = v.get<std::int64_t>();
  if (d < 0) throw std::invalid_argument(where + ": duration must be a non-negative integer");
  return d;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Throws std::invalid_argument if any invariant of the circuit is broken.
inline void check_circuit(const Circuit& c) {
  if (c.num_qubits <= 0) throw std::invalid_argument("num_qubits must be positive");
  for (std::size_t i = 0; i < c.ops.size(); ++i) {
    if (c.ops[i].index != i) {
      throw std::invalid_argument("op at position " + std::to_string(i) + " has index " +
                                  std::to_string(c.ops[i].index));
    }
    detail::check_operation(c.ops[i], c.num_qubits);
  }
}

// ---------------------------------------------------------------------------
// JSON circuit format
//
//   {"num_qubits": 3,
//    "ops": [{"name": "h", "qubits": [1]},
//            {"name": "u1", "qubits": [0], "params": [0.5], "duration": 64}]}
// ---------------------------------------------------------------------------

inline Circuit parse_json_circuit(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON circuit: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("JSON circuit must be an object");
  if (!doc.contains("num_qubits") || !doc["num_qubits"].is_number_integer()) {
    throw std::invalid_argument("JSON circuit: 'num_qubits' must be an integer");
  }
  if (!doc.contains("ops") || !doc["ops"].is_array()) {
    throw std::invalid_argument("JSON circuit: 'ops' must be an array");
  }
  Circuit c;
  c.num_qubits = doc["num_qubits"].get<int>();
  if (c.num_qubits <= 0) throw std::invalid_argument("JSON circuit: num_qubits must be positive");
  for (const auto& jop : doc["ops"]) {
    Operation op;
    op.index = c.ops.size();
    const std::string where = "op " + std::to_string(op.index);
    if (!jop.is_object() || !jop.contains("name") || !jop["name"].is_string()) {
      throw std::invalid_argument(where + ": missing string 'name'");
    }
    op.name = jop["name"].get<std::string>();
    if (!jop.contains("qubits") || !jop["qubits"].is_array()) {
      throw std::invalid_argument(where + ": missing 'qubits' array");
    }
    for (const auto& q : jop["qubits"]) {
      if (!q.is_number_integer()) throw std::invalid_argument(where + ": qubit must be an integer");
      op.qubits.push_back(q.get<Qubit>());
    }
    if (jop.contains("params")) {
      if (!jop["params"].is_array()) throw std::invalid_argument(where + ": 'params' must be an array");
      for (const auto& p : jop["params"]) {
        if (!p.is_number()) throw std::invalid_argument(where + ": parameter must be a number");
        op.params.push_back(p.get<double>());
      }
    }
    if (jop.contains("duration")) op.duration = detail::json_duration(jop["duration"], where);
    detail::check_operation(op, c.num_qubits);
    c.ops.push_back(std::move(op));
  }
  return c;
}

inline nlohmann::json circuit_to_json_value(const Circuit& c) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : c.ops) {
    nlohmann::json j;
    j["name"] = op.name;
    j["qubits"] = op.qubits;
    if (!op.params.empty()) j["params"] = op.params;
    j["duration"] = op.duration;
    ops.push_back(std::move(j));
  }
  nlohmann::json doc;
  doc["num_qubits"] = c.num_qubits;
  doc["ops"] = std::move(ops);
  return doc;
}

inline std::string serialize_json_circuit(const Circuit& c) {
  return circuit_to_json_value(c).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// QASM subset: a single qreg, gates {h,x,z,s,t,u1,u2,u3,cx,barrier}, "//"
// comments. The OPENQASM header and qelib1.inc include are accepted and ignored.
// ---------------------------------------------------------------------------

namespace detail {

// Recursive-descent evaluator for gate parameter expressions such as "-pi/4"
// or "3*pi/2".
class ParamExpr {
 public:
  explicit ParamExpr(std::string_view s) : s_(s) {}

  double evaluate() {
    double v = expr();
    skip_ws();
    if (pos_ != s_.size()) fail();
    return v;
  }

 private:
  double expr() {
    double v = term();
    for (;;) {
      skip_ws();
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      skip_ws();
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }

  double unary() {
    skip_ws();
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }

  double primary() {
    skip_ws();
    if (eat('(')) {
      double v = expr();
      skip_ws();
      if (!eat(')')) fail();
      return v;
    }
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
            s_[pos_] == 'e' || s_[pos_] == 'E' ||
            ((s_[pos_] == '-' || s_[pos_] == '+') && pos_ > start &&
             (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    if (start == pos_) fail();
    std::string num(s_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(num, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != num.size()) fail();
    return v;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail() {
    throw std::invalid_argument("bad parameter expression '" + std::string(s_) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

struct Statement {
  std::string text;
  int line;
};

// Splits on ';' after removing "//" comments. Braces also end a statement so
// that gate bodies surface as an unsupported statement. Each statement carries the line
// number on which it starts.
inline std::vector<Statement> split_statements(std::string_view text) {
  std::vector<Statement> out;
  std::string current;
  int line = 1;
  int start_line = 1;
  bool in_comment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '\n') {
      ++line;
      in_comment = false;
      current += ' ';
      continue;
    }
    if (in_comment) continue;
    if (ch == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      in_comment = true;
      continue;
    }
    if (ch == ';' || ch == '{' || ch == '}') {
      std::string t = trim(current);
      if (!t.empty()) out.push_back({t, start_line});
      current.clear();
      continue;
    }
    if (trim(current).empty() && !std::isspace(static_cast<unsigned char>(ch))) start_line = line;
    current += ch;
  }
  if (!trim(current).empty()) {
    throw std::invalid_argument("line " + std::to_string(start_line) +
                                ": statement not terminated by ';'");
  }
  return out;
}

}  // namespace detail

inline Circuit parse_qasm_subset(std::string_view text) {
  Circuit c;
  std::string reg;
  for (const auto& st : detail::split_statements(text)) {
    const std::string at = "line " + std::to_string(st.line) + ": ";
    const std::string& s = st.text;
    auto fail = [&](const std::string& msg) -> void { throw std::invalid_argument(at + msg); };

    // Head: identifier up to whitespace or '('.
    std::size_t h = 0;
    while (h < s.size() && !std::isspace(static_cast<unsigned char>(s[h])) && s[h] != '(') ++h;
    std::string head = s.substr(0, h);
    std::string rest = s.substr(h);

    if (head == "OPENQASM") continue;
    if (head == "include") {
      if (detail::trim(rest) != "\"qelib1.inc\"") fail("unsupported include " + detail::trim(rest));
      continue;
    }
    if (head == "qreg") {
      if (!reg.empty()) fail("only one qreg declaration is supported");
      std::string decl = detail::trim(rest);
      auto lb = decl.find('[');
      auto rb = decl.find(']');
      if (lb == std::string::npos || rb == std::string::npos || rb < lb || rb + 1 != decl.size()) {
        fail("malformed qreg declaration");
      }
      reg = detail::trim(decl.substr(0, lb));
      try {
        c.num_qubits = std::stoi(decl.substr(lb + 1, rb - lb - 1));
      } catch (const std::exception&) {
        fail("malformed qreg size");
      }
      if (reg.empty() || c.num_qubits <= 0) fail("malformed qreg declaration");
      continue;
    }

    std::string name = head;
    if (name == "CX") name = "cx";
    auto sig = known_gate(name);
    if (!sig) fail("unsupported statement '" + head + "'");
    if (reg.empty()) fail("gate before qreg declaration");

    Operation op;
    op.index = c.ops.size();
    op.name = name;
    std::string args = detail::trim(rest);
    if (!args.empty() && args[0] == '(') {
      int depth = 0;
      std::size_t close = std::string::npos;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == '(') ++depth;
        if (args[i] == ')' && --depth == 0) {
          close = i;
          break;
        }
      }
      if (close == std::string::npos) fail("unbalanced parentheses");
      for (const auto& p : detail::split(args.substr(1, close - 1), ',')) {
        try {
          op.params.push_back(detail::ParamExpr(p).evaluate());
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
      }
      args = detail::trim(args.substr(close + 1));
    }
    if (args.empty()) fail("missing qubit operands");
    for (const auto& a : detail::split(args, ',')) {
      auto lb = a.find('[');
      std::string rname = detail::trim(a.substr(0, lb));
      if (rname != reg) fail("undeclared register '" + rname + "'");
      if (lb == std::string::npos) {
        // Whole-register operand, allowed for barrier only.
        if (name != "barrier") fail("register operand requires an index");
        for (Qubit q = 0; q < c.num_qubits; ++q) op.qubits.push_back(q);
        continue;
      }
      auto rb = a.find(']', lb);
      if (rb == std::string::npos || rb + 1 != a.size()) fail("malformed qubit operand '" + a + "'");
      try {
        std::size_t used = 0;
        std::string idx = a.substr(lb + 1, rb - lb - 1);
        op.qubits.push_back(std::stoi(idx, &used));
        if (used != idx.size()) fail("malformed qubit index");
      } catch (const std::invalid_argument&) {
        fail("malformed qubit index in '" + a + "'");
      } catch (const std::out_of_range&) {
        fail("qubit index out of range in '" + a + "'");
      }
    }
    try {
      detail::check_operation(op, c.num_qubits);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    c.ops.push_back(std::move(op));
  }
  if (reg.empty()) throw std::invalid_argument("no qreg declaration");
  return c;
}

inline std::string serialize_qasm(const Circuit& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" << c.num_qubits << "];\n";
  for (const auto& op : c.ops) {
    out << op.name;
    if (!op.params.empty()) {
      out << "(";
      for (std::size_t i = 0; i < op.params.size(); ++i) {
        if (i) out << ",";
        out << detail::format_double(op.params[i]);
      }
      out << ")";
    }
    out << " ";
    for (std::size_t i = 0; i < op.qubits.size(); ++i) {
      if (i) out << ",";
      out << "q[" << op.qubits[i] << "]";
    }
    out << ";\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Duration tables
// ---------------------------------------------------------------------------

/// Gate lengths in dt. Lookup order: exact (name, qubits) entry, then the
/// per-name default, then the global default. Qubit tuples are order-sensitive.
class DurationTable {
 public:
  void set_exact(std::string name, std::vector<Qubit> qubits, Time d) {
    check(d);
    exact_[{std::move(name), std::move(qubits)}] = d;
  }
  void set_default(std::string name, Time d) {
    check(d);
    defaults_[std::move(name)] = d;
  }
  void set_global_default(Time d) {
    check(d);
    global_ = d;
  }
  const std::optional<Time>& global_default() const { return global_; }

  std::optional<Time> lookup(const Operation& op) const {
    if (op.name == "barrier") return 0;
    if (auto it = exact_.find({op.name, op.qubits}); it != exact_.end()) return it->second;
    if (auto it = defaults_.find(op.name); it != defaults_.end()) return it->second;
    return global_;
  }

  static DurationTable uniform(Time d) {
    DurationTable t;
    t.set_global_default(d);
    return t;
  }

  static DurationTable parse_json(std::string_view text) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("malformed duration table: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("duration table must be a JSON object");
    DurationTable t;
    if (doc.contains("exact")) {
      if (!doc["exact"].is_array()) throw std::invalid_argument("duration table: 'exact' must be an array");
      for (const auto& e : doc["exact"]) {
        if (!e.is_object() || !e.contains("name") || !e.contains("qubits") || !e.contains("duration")) {
          throw std::invalid_argument("duration table: exact entries need name, qubits, duration");
        }
        t.set_exact(e["name"].get<std::string>(), e["qubits"].get<std::vector<Qubit>>(),
                    detail::json_duration(e["duration"], "exact entry"));
      }
    }
    if (doc.contains("defaults")) {
      if (!doc["defaults"].is_object()) {
        throw std::invalid_argument("duration table: 'defaults' must be an object");
      }
      for (const auto& [name, d] : doc["defaults"].items()) {
        t.set_default(name, detail::json_duration(d, "default '" + name + "'"));
      }
    }
    if (doc.contains("global_default") && !doc["global_default"].is_null()) {
      t.set_global_default(detail::json_duration(doc["global_default"], "global_default"));
    }
    return t;
  }

 private:
  static void check(Time d) {
    if (d < 0) throw std::invalid_argument("durations must be non-negative");
  }

  std::map<std::pair<std::string, std::vector<Qubit>>, Time> exact_;
  std::map<std::string, Time> defaults_;
  std::optional<Time> global_;
};

inline Circuit apply_durations(const Circuit& circuit, const DurationTable& table) {
  Circuit out = circuit;
  for (auto& op : out.ops) {
    auto d = table.lookup(op);
    if (!d) {
      throw std::invalid_argument("no duration for op " + std::to_string(op.index) + " " +
                                  describe(op));
    }
    op.duration = *d;
  }
  return out;
}

}  // namespace qos
