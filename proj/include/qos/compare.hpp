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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qos/circuit.hpp"
#include "qos/commutation.hpp"
#include "qos/depgraph.hpp"
#include "qos/exact.hpp"
#include "qos/schedule.hpp"

namespace qos {

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

enum class CircuitFormat { kAuto, kQasm, kJson };

inline CircuitFormat parse_format(std::string_view s) {
  if (s == "auto") return CircuitFormat::kAuto;
  if (s == "qasm") return CircuitFormat::kQasm;
  if (s == "json") return CircuitFormat::kJson;
  throw std::invalid_argument("unknown circuit format '" + std::string(s) + "'");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Circuit load_circuit(const std::filesystem::path& path, CircuitFormat format = CircuitFormat::kAuto) {
  if (format == CircuitFormat::kAuto) {
    format = path.extension() == ".qasm" ? CircuitFormat::kQasm : CircuitFormat::kJson;
  }
  const std::string text = read_file(path);
  return format == CircuitFormat::kQasm ? parse_qasm_subset(text) : parse_json_circuit(text);
}

// ---------------------------------------------------------------------------
// Scheduling methods
// ---------------------------------------------------------------------------

enum class Method { kAsap, kHeft, kBnb, kBrute };

inline Method parse_method(std::string_view s) {
  if (s == "asap") return Method::kAsap;
  if (s == "heft") return Method::kHeft;
  if (s == "bnb") return Method::kBnb;
  if (s == "brute") return Method::kBrute;
  throw std::invalid_argument("unknown scheduling method '" + std::string(s) + "'");
}

struct MethodResult {
  Schedule schedule;
  bool optimal = false;
};

inline MethodResult run_method(const Circuit& circuit, const DisjunctiveGraph& g, Method method,
                               const SolverConfig& cfg) {
  switch (method) {
    case Method::kAsap: return {asap(circuit, g.dag), g.disjunctive.empty()};
    case Method::kHeft: return {heft(g), false};
    case Method::kBnb: {
      auto r = solve_bnb(g, cfg);
      return {std::move(r.schedule), r.optimal};
    }
    case Method::kBrute: {
      auto r = solve_bruteforce(g, cfg);
      return {std::move(r.schedule), true};
    }
  }
  throw std::logic_error("unhandled method");
}

// ---------------------------------------------------------------------------
// Std-DAG vs. Ext-DAG comparison
// ---------------------------------------------------------------------------

/// Improvement rate (std - ext) / std in hundredths of a percent, rounded half
/// away from zero. nullopt when std is 0.
inline std::optional<std::int64_t> delta_hundredths(Time std_makespan, Time ext_makespan) {
  if (std_makespan <= 0) return std::nullopt;
  const std::int64_t num = 10000 * (std_makespan - ext_makespan);
  const std::int64_t mag = (2 * (num < 0 ? -num : num) + std_makespan) / (2 * std_makespan);
  return num < 0 ? -mag : mag;
}

inline std::string format_delta(std::optional<std::int64_t> hundredths) {
  if (!hundredths) return "n/a";
  const std::int64_t v = *hundredths;
  const std::int64_t a = v < 0 ? -v : v;
  std::string frac = std::to_string(a % 100);
  if (frac.size() < 2) frac = "0" + frac;
  return (v < 0 ? "-" : "") + std::to_string(a / 100) + "." + frac + "%";
}

/// "24940" -> "24,940".
inline std::string with_thousands(std::int64_t v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return (v < 0 ? "-" : "") + out;
}

struct CompareRow {
  std::string circuit;
  int qubits = 0;
  std::size_t gates = 0;
  Time std_makespan = 0;
  Time ext_makespan = 0;
  bool ext_optimal = false;
  std::optional<std::string> error;

  std::optional<std::int64_t> delta() const { return delta_hundredths(std_makespan, ext_makespan); }
};

struct CompareOptions {
  std::optional<DurationTable> durations;  // unset: keep durations from the file
  SolverConfig solver;
  Method method = Method::kBnb;
  CommutationRuleSet rules = CommutationRuleSet::all();
  DisjunctiveEdgeMode mode = DisjunctiveEdgeMode::kGrouped;
  CircuitFormat format = CircuitFormat::kAuto;
  /// Files processed at once; rows keep input order either way.
  unsigned jobs = 1;
};

inline std::size_t gate_count(const Circuit& c) {
  return static_cast<std::size_t>(
      std::count_if(c.ops.begin(), c.ops.end(), [](const Operation& op) { return op.name != "barrier"; }));
}

/// Std makespan from asap on the standard DAG; ext makespan from `method` on
/// the extended disjunctive graph.
inline CompareRow compare_circuit(const std::string& name, Circuit circuit, const CompareOptions& opt) {
  CompareRow row;
  row.circuit = name;
  if (opt.durations) circuit = apply_durations(circuit, *opt.durations);
  row.qubits = circuit.num_qubits;
  row.gates = gate_count(circuit);
  row.std_makespan = asap(circuit, build_standard_dag(circuit)).makespan;
  const DependencyDag ext = build_extended_dag(circuit, opt.rules);
  const DisjunctiveGraph g = build_disjunctive_graph(circuit, ext, opt.rules, opt.mode);
  MethodResult r = run_method(circuit, g, opt.method, opt.solver);
  row.ext_makespan = r.schedule.makespan;
  row.ext_optimal = r.optimal;
  return row;
}

inline std::vector<CompareRow> run_compare(const std::vector<std::filesystem::path>& files,
                                           const CompareOptions& opt) {
  auto one = [&](const std::filesystem::path& path) {
    try {
      return compare_circuit(path.stem().string(), load_circuit(path, opt.format), opt);
    } catch (const std::exception& e) {
      CompareRow row;
      row.circuit = path.stem().string();
      row.error = e.what();
      return row;
    }
  };
  std::vector<CompareRow> rows;
  rows.reserve(files.size());
  const std::size_t batch = std::max(1u, opt.jobs);
  for (std::size_t i = 0; i < files.size(); i += batch) {
    std::vector<std::future<CompareRow>> pending;
    for (std::size_t j = i; j < std::min(files.size(), i + batch); ++j) {
      pending.push_back(std::async(batch > 1 ? std::launch::async : std::launch::deferred, one,
                                   std::cref(files[j])));
    }
    for (auto& f : pending) rows.push_back(f.get());
  }
  return rows;
}

inline std::string format_compare_table(const std::vector<CompareRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"circuit", "qubits", "gates", "std", "ext", "delta", "proved"});
  for (const auto& r : rows) {
    if (r.error) {
      cells.push_back({r.circuit, "error: " + *r.error});
      continue;
    }
    cells.push_back({r.circuit, std::to_string(r.qubits), with_thousands(static_cast<std::int64_t>(r.gates)),
                     with_thousands(r.std_makespan), with_thousands(r.ext_makespan),
                     format_delta(r.delta()), r.ext_optimal ? "yes" : "no"});
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells) {
    if (row.size() != width.size()) {
      width[0] = std::max(width[0], row[0].size());
      continue;
    }
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const bool left = c == 0 || row.size() != width.size();
      const std::size_t pad = c < width.size() && width[c] > row[c].size() ? width[c] - row[c].size() : 0;
      if (c) out << "  ";
      if (left) {
        out << row[c];
        if (c + 1 < row.size()) out << std::string(pad, ' ');
      } else {
        out << std::string(pad, ' ') << row[c];
      }
    }
    out << "\n";
  }
  return out.str();
}

inline std::string format_compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "circuit,qubits,gates,std_makespan,ext_makespan,delta_percent,ext_optimal,error\n";
  for (const auto& r : rows) {
    if (r.error) {
      std::string msg = *r.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      out << r.circuit << ",,,,,,,\"" << msg << "\"\n";
      continue;
    }
    std::string d = format_delta(r.delta());
    if (!d.empty() && d.back() == '%') d.pop_back();
    out << r.circuit << "," << r.qubits << "," << r.gates << "," << r.std_makespan << ","
        << r.ext_makespan << "," << d << "," << (r.ext_optimal ? "true" : "false") << ",\n";
  }
  return out.str();
}

}  // namespace qos
