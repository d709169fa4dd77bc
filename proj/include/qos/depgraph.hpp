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
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qos/circuit.hpp"
#include "qos/commutation.hpp"

namespace qos {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

/// Consecutive commutation classes of the ops acting on one qubit, in order.
using QubitClasses = std::vector<std::vector<NodeId>>;

/// Conjunctive graph (V, C). Edges are sorted and unique; (i, j) means op i
/// finishes before op j starts.
class DependencyDag {
 public:
  DependencyDag() = default;

  DependencyDag(std::size_t num_nodes, std::vector<Edge> edges)
      : num_nodes_(num_nodes), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    succ_.assign(num_nodes_, {});
    pred_.assign(num_nodes_, {});
    for (auto [u, v] : edges_) {
      if (u >= num_nodes_ || v >= num_nodes_) throw std::invalid_argument("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loop in dependency graph");
      succ_[u].push_back(v);
      pred_[v].push_back(u);
    }
  }

  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<NodeId>& successors(NodeId u) const { return succ_[u]; }
  const std::vector<NodeId>& predecessors(NodeId u) const { return pred_[u]; }

  bool has_edge(NodeId u, NodeId v) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
  }

  /// Kahn order, or nullopt on a cycle. Ties resolve to the smallest index.
  std::optional<std::vector<NodeId>> topological_order() const;

  /// Per-qubit commutation classes this graph was built from (empty when the
  /// dag was assembled from raw edges).
  const std::vector<QubitClasses>& qubit_classes() const { return classes_; }
  const std::optional<CommutationRuleSet>& rules() const { return rules_; }

  bool operator==(const DependencyDag& o) const {
    return num_nodes_ == o.num_nodes_ && edges_ == o.edges_;
  }

 private:
  friend DependencyDag build_extended_dag(const Circuit&, const CommutationRuleSet&);

  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> succ_;
  std::vector<std::vector<NodeId>> pred_;
  std::vector<QubitClasses> classes_;
  std::optional<CommutationRuleSet> rules_;
};

inline std::optional<std::vector<NodeId>> DependencyDag::topological_order() const {
  std::vector<std::size_t> indeg(num_nodes_, 0);
  for (auto [u, v] : edges_) ++indeg[v];
  // Min-heap on index gives a deterministic order.
  std::vector<NodeId> heap;
  for (NodeId v = 0; v < num_nodes_; ++v) {
    if (indeg[v] == 0) heap.push_back(v);
  }
  std::make_heap(heap.begin(), heap.end(), std::greater<>());
  std::vector<NodeId> order;
  order.reserve(num_nodes_);
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), std::greater<>());
    NodeId u = heap.back();
    heap.pop_back();
    order.push_back(u);
    for (NodeId v : succ_[u]) {
      if (--indeg[v] == 0) {
        heap.push_back(v);
        std::push_heap(heap.begin(), heap.end(), std::greater<>());
      }
    }
  }
  if (order.size() != num_nodes_) return std::nullopt;
  return order;
}

/// Transitive-closure reachability over a node set, one bitset row per node.
class Reachability {
 public:
  /// `succ` must describe an acyclic graph and `topo` a topological order of it.
  Reachability(const std::vector<std::vector<NodeId>>& succ, const std::vector<NodeId>& topo)
      : n_(succ.size()), words_((n_ + 63) / 64), bits_(n_ * words_, 0) {
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      NodeId u = *it;
      std::uint64_t* row = &bits_[u * words_];
      for (NodeId v : succ[u]) {
        row[v / 64] |= std::uint64_t{1} << (v % 64);
        const std::uint64_t* vrow = &bits_[v * words_];
        for (std::size_t w = 0; w < words_; ++w) row[w] |= vrow[w];
      }
    }
  }

  explicit Reachability(const DependencyDag& dag)
      : Reachability(successor_lists(dag), require_order(dag)) {}

  /// True when a non-empty path u -> ... -> v exists.
  bool reaches(NodeId u, NodeId v) const {
    return (bits_[u * words_ + v / 64] >> (v % 64)) & 1;
  }

 private:
  static std::vector<std::vector<NodeId>> successor_lists(const DependencyDag& dag) {
    std::vector<std::vector<NodeId>> s(dag.num_nodes());
    for (NodeId u = 0; u < dag.num_nodes(); ++u) s[u] = dag.successors(u);
    return s;
  }
  static std::vector<NodeId> require_order(const DependencyDag& dag) {
    auto order = dag.topological_order();
    if (!order) throw std::invalid_argument("dependency graph has a cycle");
    return *order;
  }

  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

namespace detail {

inline std::vector<std::vector<NodeId>> ops_per_qubit(const Circuit& c) {
  std::vector<std::vector<NodeId>> per(c.num_qubits);
  for (const auto& op : c.ops) {
    for (Qubit q : op.qubits) per[q].push_back(op.index);
  }
  return per;
}

// Greedy partition of one qubit's op sequence: an op joins the open class iff it
// commutes with every member (commutation is not transitive).
inline QubitClasses partition_classes(const Circuit& c, const std::vector<NodeId>& seq,
                                      const CommutationRuleSet& rules) {
  QubitClasses classes;
  for (NodeId v : seq) {
    bool joins = !classes.empty();
    if (joins) {
      for (NodeId m : classes.back()) {
        if (!commutes(c.ops[m], c.ops[v], rules)) {
          joins = false;
          break;
        }
      }
    }
    if (joins) classes.back().push_back(v);
    else classes.push_back({v});
  }
  return classes;
}

}  // namespace detail

/// Conjunctive graph with per-qubit commutation classes: every op of class k
/// precedes every op of class k+1 on the same qubit.
inline DependencyDag build_extended_dag(const Circuit& circuit, const CommutationRuleSet& rules) {
  std::vector<QubitClasses> classes;
  std::vector<Edge> edges;
  for (const auto& seq : detail::ops_per_qubit(circuit)) {
    classes.push_back(detail::partition_classes(circuit, seq, rules));
    const auto& cls = classes.back();
    for (std::size_t k = 0; k + 1 < cls.size(); ++k) {
      for (NodeId u : cls[k]) {
        for (NodeId v : cls[k + 1]) edges.emplace_back(u, v);
      }
    }
  }
  DependencyDag dag(circuit.size(), std::move(edges));
  dag.classes_ = std::move(classes);
  dag.rules_ = rules;
  return dag;
}

/// Per-qubit chains in program order: only trivial (disjoint-qubit) commutation.
inline DependencyDag build_standard_dag(const Circuit& circuit) {
  return build_extended_dag(circuit, CommutationRuleSet::standard());
}

enum class DisjunctiveEdgeMode { kRedundant, kGrouped, kMinimal };

inline std::string_view mode_name(DisjunctiveEdgeMode m) {
  switch (m) {
    case DisjunctiveEdgeMode::kRedundant: return "redundant";
    case DisjunctiveEdgeMode::kGrouped: return "grouped";
    case DisjunctiveEdgeMode::kMinimal: return "minimal";
  }
  return "?";
}

inline DisjunctiveEdgeMode parse_mode(std::string_view s) {
  if (s == "redundant") return DisjunctiveEdgeMode::kRedundant;
  if (s == "grouped") return DisjunctiveEdgeMode::kGrouped;
  if (s == "minimal") return DisjunctiveEdgeMode::kMinimal;
  throw std::invalid_argument("unknown disjunctive edge mode '" + std::string(s) + "'");
}

/// G = (V, C ∪ D). Disjunctive pairs are stored as (k, l) with k < l, sorted.
struct DisjunctiveGraph {
  DependencyDag dag;
  std::vector<Edge> disjunctive;
  std::vector<Operation> ops;

  std::size_t num_nodes() const { return ops.size(); }
  Time duration(NodeId v) const { return ops[v].duration; }

  std::size_t pair_index(NodeId k, NodeId l) const {
    if (k > l) std::swap(k, l);
    auto it = std::lower_bound(disjunctive.begin(), disjunctive.end(), Edge{k, l});
    if (it == disjunctive.end() || *it != Edge{k, l}) return disjunctive.size();
    return static_cast<std::size_t>(it - disjunctive.begin());
  }
  bool has_pair(NodeId k, NodeId l) const { return pair_index(k, l) != disjunctive.size(); }
};

inline DisjunctiveGraph build_disjunctive_graph(const Circuit& circuit, const DependencyDag& dag,
                                                const CommutationRuleSet& rules,
                                                DisjunctiveEdgeMode mode) {
  if (dag.num_nodes() != circuit.size()) {
    throw std::invalid_argument("dependency graph has " + std::to_string(dag.num_nodes()) +
                                " nodes but circuit has " + std::to_string(circuit.size()) + " ops");
  }
  if (dag.rules() && !(*dag.rules() == rules)) {
    throw std::invalid_argument("dependency graph was built with a different rule set");
  }

  std::vector<Edge> pairs;
  auto add = [&](NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    if (!dag.has_edge(a, b)) pairs.emplace_back(a, b);
  };

  if (mode == DisjunctiveEdgeMode::kRedundant) {
    for (const auto& seq : detail::ops_per_qubit(circuit)) {
      for (std::size_t i = 0; i < seq.size(); ++i) {
        for (std::size_t j = i + 1; j < seq.size(); ++j) add(seq[i], seq[j]);
      }
    }
  } else {
    std::vector<QubitClasses> classes = dag.qubit_classes();
    if (classes.empty()) {
      for (const auto& seq : detail::ops_per_qubit(circuit)) {
        classes.push_back(detail::partition_classes(circuit, seq, rules));
      }
    }
    for (const auto& per_qubit : classes) {
      for (const auto& cls : per_qubit) {
        for (std::size_t i = 0; i < cls.size(); ++i) {
          for (std::size_t j = i + 1; j < cls.size(); ++j) add(cls[i], cls[j]);
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  if (mode == DisjunctiveEdgeMode::kMinimal) {
    Reachability reach(dag);
    std::erase_if(pairs, [&](const Edge& e) {
      return reach.reaches(e.first, e.second) || reach.reaches(e.second, e.first);
    });
  }
  return DisjunctiveGraph{dag, std::move(pairs), circuit.ops};
}

/// Same-qubit pairs that are neither joined by a conjunctive path nor present
/// in D. Empty for a well-formed graph.
inline std::vector<Edge> completeness_gaps(const DisjunctiveGraph& g) {
  Reachability reach(g.dag);
  std::vector<Edge> gaps;
  for (NodeId a = 0; a < g.num_nodes(); ++a) {
    for (NodeId b = a + 1; b < g.num_nodes(); ++b) {
      if (!detail::shares_qubit(g.ops[a], g.ops[b])) continue;
      if (reach.reaches(a, b) || reach.reaches(b, a) || g.has_pair(a, b)) continue;
      gaps.emplace_back(a, b);
    }
  }
  return gaps;
}

inline std::string export_dot(const DisjunctiveGraph& g) {
  std::ostringstream out;
  out << "digraph qos {\n";
  out << "  node [shape=box];\n";
  for (const auto& op : g.ops) {
    out << "  n" << op.index << " [label=\"" << describe(op) << " p=" << op.duration << "\"];\n";
  }
  for (auto [u, v] : g.dag.edges()) out << "  n" << u << " -> n" << v << ";\n";
  for (auto [k, l] : g.disjunctive) {
    out << "  n" << k << " -> n" << l << " [style=dashed, dir=none];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace qos
