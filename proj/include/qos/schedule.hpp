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
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qos/circuit.hpp"
#include "qos/depgraph.hpp"

namespace qos {

struct Schedule {
  std::vector<Time> start;
  Time makespan = 0;

  /// Derives the makespan as max(start + duration).
  static Schedule from_starts(std::vector<Time> start, const std::vector<Operation>& ops) {
    if (start.size() != ops.size()) throw std::invalid_argument("schedule/op count mismatch");
    Schedule s{std::move(start), 0};
    for (std::size_t i = 0; i < ops.size(); ++i) {
      s.makespan = std::max(s.makespan, s.start[i] + ops[i].duration);
    }
    return s;
  }

  bool operator==(const Schedule&) const = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  enum class Kind { kPrecedence, kOverlap, kNegativeStart, kMakespan };
  Kind kind;
  NodeId first;
  NodeId second;
  std::string message;
};

inline std::vector<Violation> validate(const Circuit& circuit, const DependencyDag& dag,
                                       const Schedule& s) {
  if (dag.num_nodes() != circuit.size() || s.start.size() != circuit.size()) {
    throw std::invalid_argument("validate: circuit has " + std::to_string(circuit.size()) +
                                " ops, dag " + std::to_string(dag.num_nodes()) + ", schedule " +
                                std::to_string(s.start.size()));
  }
  const auto& ops = circuit.ops;
  std::vector<Violation> out;
  Time makespan = 0;
  for (NodeId i = 0; i < ops.size(); ++i) {
    if (s.start[i] < 0) {
      out.push_back({Violation::Kind::kNegativeStart, i, i,
                     "op " + std::to_string(i) + " starts at negative time"});
    }
    makespan = std::max(makespan, s.start[i] + ops[i].duration);
  }
  if (makespan != s.makespan) {
    out.push_back({Violation::Kind::kMakespan, 0, 0,
                   "makespan " + std::to_string(s.makespan) + " != max end " +
                       std::to_string(makespan)});
  }
  for (auto [i, j] : dag.edges()) {
    if (s.start[i] + ops[i].duration > s.start[j]) {
      out.push_back({Violation::Kind::kPrecedence, i, j,
                     "precedence: op " + std::to_string(i) + " ends at " +
                         std::to_string(s.start[i] + ops[i].duration) + " after op " +
                         std::to_string(j) + " starts at " + std::to_string(s.start[j])});
    }
  }
  auto per_qubit = detail::ops_per_qubit(circuit);
  for (Qubit q = 0; q < static_cast<Qubit>(per_qubit.size()); ++q) {
    const auto& seq = per_qubit[q];
    for (std::size_t a = 0; a < seq.size(); ++a) {
      for (std::size_t b = a + 1; b < seq.size(); ++b) {
        NodeId i = seq[a], j = seq[b];
        if (s.start[i] < s.start[j] + ops[j].duration && s.start[j] < s.start[i] + ops[i].duration) {
          out.push_back({Violation::Kind::kOverlap, i, j,
                         "overlap on qubit " + std::to_string(q) + ": op " + std::to_string(i) +
                             " and op " + std::to_string(j)});
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orientations and semi-active schedules
// ---------------------------------------------------------------------------

enum class Direction : std::int8_t {
  kUnset = 0,
  kForward,   // k -> l for the stored pair (k, l), k < l
  kBackward,  // l -> k
};

/// One direction per disjunctive pair of a graph, indexed like g.disjunctive.
using Orientation = std::vector<Direction>;

inline Orientation source_order_orientation(const DisjunctiveGraph& g) {
  return Orientation(g.disjunctive.size(), Direction::kForward);
}

class CycleError : public std::runtime_error {
 public:
  explicit CycleError(std::vector<NodeId> cycle)
      : std::runtime_error(describe_cycle(cycle)), cycle_(std::move(cycle)) {}
  const std::vector<NodeId>& cycle() const { return cycle_; }

 private:
  static std::string describe_cycle(const std::vector<NodeId>& c) {
    std::string s = "cycle in oriented graph:";
    for (NodeId v : c) s += " " + std::to_string(v);
    return s;
  }
  std::vector<NodeId> cycle_;
};

/// C plus the oriented disjunctive pairs (unset pairs are skipped).
inline DependencyDag oriented_dag(const DisjunctiveGraph& g, const Orientation& o) {
  if (o.size() != g.disjunctive.size()) throw std::invalid_argument("orientation size mismatch");
  std::vector<Edge> edges = g.dag.edges();
  for (std::size_t p = 0; p < o.size(); ++p) {
    auto [k, l] = g.disjunctive[p];
    if (o[p] == Direction::kForward) edges.emplace_back(k, l);
    else if (o[p] == Direction::kBackward) edges.emplace_back(l, k);
  }
  return DependencyDag(g.num_nodes(), std::move(edges));
}

namespace detail {

inline std::vector<NodeId> find_cycle(const DependencyDag& dag) {
  const std::size_t n = dag.num_nodes();
  std::vector<int> color(n, 0);
  std::vector<NodeId> parent(n, n);
  for (NodeId root = 0; root < n; ++root) {
    if (color[root]) continue;
    std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < dag.successors(u).size()) {
        NodeId v = dag.successors(u)[next++];
        if (color[v] == 1) {
          std::vector<NodeId> cyc{v};
          for (NodeId w = u; w != v; w = parent[w]) cyc.push_back(w);
          std::reverse(cyc.begin() + 1, cyc.end());
          return cyc;
        }
        if (color[v] == 0) {
          color[v] = 1;
          parent[v] = u;
          stack.emplace_back(v, 0);
        }
      } else {
        color[u] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

// Longest-path start times; nullopt if the graph has a cycle.
inline std::optional<std::vector<Time>> longest_path_starts(const DependencyDag& dag,
                                                           const std::vector<Operation>& ops) {
  auto order = dag.topological_order();
  if (!order) return std::nullopt;
  std::vector<Time> start(dag.num_nodes(), 0);
  for (NodeId u : *order) {
    for (NodeId v : dag.successors(u)) start[v] = std::max(start[v], start[u] + ops[u].duration);
  }
  return start;
}

}  // namespace detail

/// Earliest-start schedule induced by C and a total orientation of D.
inline Schedule semi_active(const DisjunctiveGraph& g, const Orientation& o) {
  for (Direction d : o) {
    if (d == Direction::kUnset) throw std::invalid_argument("semi_active needs a total orientation");
  }
  DependencyDag full = oriented_dag(g, o);
  auto starts = detail::longest_path_starts(full, g.ops);
  if (!starts) throw CycleError(detail::find_cycle(full));
  return Schedule::from_starts(std::move(*starts), g.ops);
}

/// Program-order list scheduling: each op starts once its DAG predecessors have
/// finished and every acting qubit is free. No gap insertion.
inline Schedule asap(const Circuit& circuit, const DependencyDag& dag) {
  if (dag.num_nodes() != circuit.size()) throw std::invalid_argument("asap: dag/circuit size mismatch");
  std::vector<Time> start(circuit.size(), 0);
  std::vector<Time> qubit_free(circuit.num_qubits, 0);
  for (const auto& op : circuit.ops) {
    Time t = 0;
    for (NodeId p : dag.predecessors(op.index)) {
      t = std::max(t, start[p] + circuit.ops[p].duration);
    }
    for (Qubit q : op.qubits) t = std::max(t, qubit_free[q]);
    start[op.index] = t;
    for (Qubit q : op.qubits) qubit_free[q] = std::max(qubit_free[q], t + op.duration);
  }
  return Schedule::from_starts(std::move(start), circuit.ops);
}

// ---------------------------------------------------------------------------
// HEFT
// ---------------------------------------------------------------------------

/// r(u) = d(u) + max over conjunctive successors r(v); exits get d(u).
inline std::vector<Time> upward_rank(const DisjunctiveGraph& g) {
  auto order = g.dag.topological_order();
  if (!order) throw CycleError(detail::find_cycle(g.dag));
  std::vector<Time> rank(g.num_nodes(), 0);
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    NodeId u = *it;
    Time best = 0;
    for (NodeId v : g.dag.successors(u)) best = std::max(best, rank[v]);
    rank[u] = g.duration(u) + best;
  }
  return rank;
}

namespace detail {

struct Interval {
  Time begin;
  Time end;
};

// Busy intervals of one qubit, sorted by begin. Zero-length ops are not stored.
class QubitTimeline {
 public:
  bool is_free(Time t, Time d) const {
    if (d == 0) return true;
    for (const auto& iv : busy_) {
      if (iv.begin >= t + d) break;
      if (iv.end > t) return false;
    }
    return true;
  }
  void occupy(Time t, Time d) {
    if (d == 0) return;
    Interval iv{t, t + d};
    busy_.insert(std::upper_bound(busy_.begin(), busy_.end(), iv,
                                  [](const Interval& a, const Interval& b) { return a.begin < b.begin; }),
                 iv);
  }
  const std::vector<Interval>& busy() const { return busy_; }

 private:
  std::vector<Interval> busy_;
};

}  // namespace detail

/// Insertion-based HEFT with time slots shared across each op's qubits. An idle
/// slot is usable when its length is at least the op's duration.
inline Schedule heft(const DisjunctiveGraph& g) {
  const std::size_t n = g.num_nodes();
  const std::vector<Time> rank = upward_rank(g);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return rank[a] > rank[b]; });

  Qubit num_qubits = 0;
  for (const auto& op : g.ops) {
    for (Qubit q : op.qubits) num_qubits = std::max(num_qubits, q + 1);
  }
  std::vector<detail::QubitTimeline> timeline(num_qubits);
  std::vector<Time> ready(n, 0);
  std::vector<Time> start(n, 0);

  for (NodeId u : order) {
    const auto& op = g.ops[u];
    const Time d = op.duration;
    // Candidate starts: the ready time, and the end of any busy interval after it.
    std::vector<Time> candidates{ready[u]};
    for (Qubit q : op.qubits) {
      for (const auto& iv : timeline[q].busy()) {
        if (iv.end > ready[u]) candidates.push_back(iv.end);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    Time t = candidates.back();
    for (Time c : candidates) {
      bool fits = true;
      for (Qubit q : op.qubits) {
        if (!timeline[q].is_free(c, d)) {
          fits = false;
          break;
        }
      }
      if (fits) {
        t = c;
        break;
      }
    }
    start[u] = t;
    for (Qubit q : op.qubits) timeline[q].occupy(t, d);
    for (NodeId v : g.dag.successors(u)) ready[v] = std::max(ready[v], t + d);
  }
  return Schedule::from_starts(std::move(start), g.ops);
}

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

inline std::string schedule_to_json(const Schedule& s, const std::vector<Operation>& ops) {
  nlohmann::json starts = nlohmann::json::array();
  for (const auto& op : ops) {
    nlohmann::json e;
    e["op"] = op.index;
    e["name"] = op.name;
    e["qubits"] = op.qubits;
    e["start"] = s.start[op.index];
    e["duration"] = op.duration;
    starts.push_back(std::move(e));
  }
  nlohmann::json doc;
  doc["makespan"] = s.makespan;
  doc["starts"] = std::move(starts);
  return doc.dump(2) + "\n";
}

/// Reads the schedule JSON written by schedule_to_json. Entries may appear in
/// any order but must cover ops 0..num_ops-1 exactly once.
inline Schedule schedule_from_json(std::string_view text, std::size_t num_ops) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed schedule: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("starts") || !doc["starts"].is_array() ||
      !doc.contains("makespan") || !doc["makespan"].is_number_integer()) {
    throw std::invalid_argument("schedule must have integer 'makespan' and array 'starts'");
  }
  Schedule s;
  s.makespan = doc["makespan"].get<Time>();
  s.start.assign(num_ops, 0);
  std::vector<bool> seen(num_ops, false);
  for (const auto& e : doc["starts"]) {
    if (!e.is_object() || !e.contains("op") || !e["op"].is_number_integer() || !e.contains("start") ||
        !e["start"].is_number_integer()) {
      throw std::invalid_argument("schedule entries need integer 'op' and 'start'");
    }
    auto idx = e["op"].get<std::int64_t>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= num_ops || seen[idx]) {
      throw std::invalid_argument("schedule entry for op " + std::to_string(idx) +
                                  " is out of range or repeated");
    }
    seen[idx] = true;
    s.start[idx] = e["start"].get<Time>();
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("schedule does not list every op");
  }
  return s;
}

/// Text Gantt chart, one row per qubit. Each op's cells carry its index
/// followed by '=' padding; idle cells are '.'.
inline std::string render_gantt(const Circuit& circuit, const Schedule& s, int max_width = 80) {
  std::ostringstream out;
  const Time width_dt = std::max<Time>(s.makespan, 1);
  const Time scale = (width_dt + max_width - 1) / max_width;
  const std::size_t cells = static_cast<std::size_t>((width_dt + scale - 1) / scale);
  out << "makespan " << s.makespan << " dt, 1 cell = " << scale << " dt\n";
  std::vector<std::string> rows(circuit.num_qubits, std::string(cells, '.'));
  for (const auto& op : circuit.ops) {
    if (op.duration == 0) continue;
    std::size_t b = static_cast<std::size_t>(s.start[op.index] / scale);
    std::size_t e = static_cast<std::size_t>((s.start[op.index] + op.duration + scale - 1) / scale);
    e = std::min(std::max(e, b + 1), cells);
    std::string label = std::to_string(op.index);
    for (Qubit q : op.qubits) {
      for (std::size_t c = b; c < e; ++c) {
        std::size_t k = c - b;
        rows[q][c] = k < label.size() ? label[k] : '=';
      }
    }
  }
  const std::size_t pad = std::to_string(std::max(circuit.num_qubits - 1, 0)).size();
  for (Qubit q = 0; q < circuit.num_qubits; ++q) {
    std::string name = std::to_string(q);
    out << "q" << std::string(pad - name.size(), ' ') << name << " |" << rows[q] << "|\n";
  }
  return out.str();
}

}  // namespace qos
