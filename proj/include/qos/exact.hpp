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

// Exact minimum-makespan scheduling over disjunctive-graph orientations.
//
// The search space is the set of acyclic orientations of D. Every node of the
// branch-and-bound tree holds a partial orientation; the longest path through
// C and the fixed pairs is a lower bound for all completions, and each leaf is
// evaluated as the semi-active schedule of a total orientation.

#pragma once

#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qos/depgraph.hpp"
#include "qos/schedule.hpp"

namespace qos {

enum class BranchingStrategy {
  kCriticalPath,   // conflicting pair on a critical path, lowest index first
  kFirstConflict,  // lowest-index conflicting pair
};

struct SolverConfig {
  std::chrono::duration<double> time_limit{10.0};
  std::size_t bruteforce_cap = 20;
  BranchingStrategy branching = BranchingStrategy::kCriticalPath;
  /// Search-node budget; 0 means unlimited. Deterministic alternative to the
  /// wall-clock limit.
  std::uint64_t max_nodes = 0;

  void check() const {
    if (!(time_limit.count() > 0)) throw std::invalid_argument("time limit must be positive");
  }
};

struct SolveResult {
  Schedule schedule;
  Time makespan = 0;
  bool optimal = false;
  std::uint64_t nodes = 0;
  std::chrono::duration<double> elapsed{0};
};

namespace detail {

// Working graph for one search node: C plus the fixed pairs.
struct NodeGraph {
  std::vector<std::vector<NodeId>> succ;
  std::vector<NodeId> topo;
  std::vector<Time> head;  // earliest start
  std::vector<Time> tail;  // longest path after the op finishes
  Time bound = 0;
};

inline bool build_node_graph(const DisjunctiveGraph& g, const Orientation& o, NodeGraph& ng) {
  const std::size_t n = g.num_nodes();
  ng.succ.assign(n, {});
  std::vector<std::size_t> indeg(n, 0);
  auto add = [&](NodeId u, NodeId v) {
    ng.succ[u].push_back(v);
    ++indeg[v];
  };
  for (auto [u, v] : g.dag.edges()) add(u, v);
  for (std::size_t p = 0; p < o.size(); ++p) {
    auto [k, l] = g.disjunctive[p];
    if (o[p] == Direction::kForward) add(k, l);
    else if (o[p] == Direction::kBackward) add(l, k);
  }
  ng.topo.clear();
  std::vector<NodeId> stack;
  for (NodeId v = n; v-- > 0;) {
    if (indeg[v] == 0) stack.push_back(v);
  }
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    ng.topo.push_back(u);
    for (NodeId v : ng.succ[u]) {
      if (--indeg[v] == 0) stack.push_back(v);
    }
  }
  if (ng.topo.size() != n) return false;

  ng.head.assign(n, 0);
  for (NodeId u : ng.topo) {
    for (NodeId v : ng.succ[u]) ng.head[v] = std::max(ng.head[v], ng.head[u] + g.duration(u));
  }
  ng.tail.assign(n, 0);
  for (auto it = ng.topo.rbegin(); it != ng.topo.rend(); ++it) {
    NodeId u = *it;
    for (NodeId v : ng.succ[u]) ng.tail[u] = std::max(ng.tail[u], g.duration(v) + ng.tail[v]);
  }
  ng.bound = 0;
  for (NodeId v = 0; v < n; ++v) ng.bound = std::max(ng.bound, ng.head[v] + g.duration(v));
  return true;
}

inline bool overlaps(const DisjunctiveGraph& g, const std::vector<Time>& start, NodeId a, NodeId b) {
  return start[a] < start[b] + g.duration(b) && start[b] < start[a] + g.duration(a);
}

class BranchAndBound {
 public:
  BranchAndBound(const DisjunctiveGraph& g, const SolverConfig& cfg)
      : g_(g), cfg_(cfg), orient_(g.disjunctive.size(), Direction::kUnset) {}

  SolveResult run() {
    cfg_.check();
    const auto t0 = std::chrono::steady_clock::now();
    deadline_ = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(cfg_.time_limit);

    if (!g_.dag.topological_order()) throw CycleError(find_cycle(g_.dag));
    best_ = heft(g_);
    dfs();

    SolveResult r;
    r.schedule = best_;
    r.makespan = best_.makespan;
    r.optimal = !stopped_;
    r.nodes = nodes_;
    r.elapsed = std::chrono::steady_clock::now() - t0;
    return r;
  }

 private:
  bool out_of_budget() {
    if (cfg_.max_nodes && nodes_ >= cfg_.max_nodes) return true;
    if ((nodes_ & 63) == 0 && std::chrono::steady_clock::now() >= deadline_) return true;
    return false;
  }

  void dfs() {
    if (stopped_) return;
    if (out_of_budget()) {
      stopped_ = true;
      return;
    }
    ++nodes_;

    NodeGraph ng;
    if (!build_node_graph(g_, orient_, ng)) return;
    if (ng.bound >= best_.makespan) return;

    // Pairs already ordered by a path can only go one way.
    std::vector<std::size_t> forced;
    {
      Reachability reach(ng.succ, ng.topo);
      for (std::size_t p = 0; p < orient_.size(); ++p) {
        if (orient_[p] != Direction::kUnset) continue;
        auto [k, l] = g_.disjunctive[p];
        if (reach.reaches(k, l)) orient_[p] = Direction::kForward;
        else if (reach.reaches(l, k)) orient_[p] = Direction::kBackward;
        else continue;
        forced.push_back(p);
      }
    }

    std::optional<std::size_t> branch;
    bool any_conflict = false;
    for (std::size_t p = 0; p < orient_.size(); ++p) {
      if (orient_[p] != Direction::kUnset) continue;
      auto [k, l] = g_.disjunctive[p];
      if (!overlaps(g_, ng.head, k, l)) continue;
      if (!any_conflict) {
        any_conflict = true;
        branch = p;
        if (cfg_.branching == BranchingStrategy::kFirstConflict) break;
      }
      if (critical(ng, k) && critical(ng, l)) {
        branch = p;
        break;
      }
    }

    if (!any_conflict) {
      record_leaf(ng);
    } else {
      // Source order first.
      for (Direction d : {Direction::kForward, Direction::kBackward}) {
        orient_[*branch] = d;
        dfs();
        orient_[*branch] = Direction::kUnset;
        if (stopped_) break;
      }
    }
    for (std::size_t p : forced) orient_[p] = Direction::kUnset;
  }

  bool critical(const NodeGraph& ng, NodeId v) const {
    return ng.head[v] + g_.duration(v) + ng.tail[v] == ng.bound;
  }

  // No unoriented pair overlaps under the head schedule: orient the rest by
  // (start, end, topological position), which keeps the heads feasible.
  void record_leaf(const NodeGraph& ng) {
    std::vector<std::size_t> topo_pos(g_.num_nodes());
    for (std::size_t i = 0; i < ng.topo.size(); ++i) topo_pos[ng.topo[i]] = i;
    auto key = [&](NodeId v) {
      return std::tuple(ng.head[v], ng.head[v] + g_.duration(v), topo_pos[v]);
    };
    Orientation total = orient_;
    for (std::size_t p = 0; p < total.size(); ++p) {
      if (total[p] != Direction::kUnset) continue;
      auto [k, l] = g_.disjunctive[p];
      total[p] = key(k) < key(l) ? Direction::kForward : Direction::kBackward;
    }
    Schedule s = semi_active(g_, total);
    if (s.makespan < best_.makespan) best_ = std::move(s);
  }

  const DisjunctiveGraph& g_;
  SolverConfig cfg_;
  Orientation orient_;
  Schedule best_;
  std::uint64_t nodes_ = 0;
  bool stopped_ = false;
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace detail

/// Longest path through C and the oriented pairs of `o` (unset pairs ignored),
/// i.e. the search lower bound at that partial orientation. nullopt on a cycle.
inline std::optional<Time> orientation_lower_bound(const DisjunctiveGraph& g, const Orientation& o) {
  detail::NodeGraph ng;
  if (!detail::build_node_graph(g, o, ng)) return std::nullopt;
  return ng.bound;
}

/// Depth-first branch-and-bound, seeded with the HEFT schedule. The result is
/// proved optimal unless the time or node budget ran out.
inline SolveResult solve_bnb(const DisjunctiveGraph& g, const SolverConfig& cfg = {}) {
  return detail::BranchAndBound(g, cfg).run();
}

/// Minimum over all 2^|D| orientations; refuses when |D| exceeds the cap.
inline SolveResult solve_bruteforce(const DisjunctiveGraph& g, const SolverConfig& cfg = {}) {
  const std::size_t m = g.disjunctive.size();
  if (m > cfg.bruteforce_cap || m >= 63) {
    throw std::invalid_argument("brute force refused: " + std::to_string(m) +
                                " disjunctive pairs exceed the cap of " +
                                std::to_string(cfg.bruteforce_cap));
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Schedule> best;
  std::uint64_t evaluated = 0;
  Orientation o(m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    for (std::size_t p = 0; p < m; ++p) {
      o[p] = (mask >> p) & 1 ? Direction::kBackward : Direction::kForward;
    }
    ++evaluated;
    auto starts = detail::longest_path_starts(oriented_dag(g, o), g.ops);
    if (!starts) continue;
    Schedule s = Schedule::from_starts(std::move(*starts), g.ops);
    if (!best || s.makespan < best->makespan) best = std::move(s);
  }
  if (!best) throw std::runtime_error("no acyclic orientation exists");
  SolveResult r;
  r.makespan = best->makespan;
  r.schedule = std::move(*best);
  r.optimal = true;
  r.nodes = evaluated;
  r.elapsed = std::chrono::steady_clock::now() - t0;
  return r;
}

// ---------------------------------------------------------------------------
// MIP export (CPLEX LP format)
// ---------------------------------------------------------------------------

namespace detail {

class LinearRow {
 public:
  LinearRow& add(Time coef, const std::string& var) {
    if (coef == 0 && !terms_.str().empty()) return *this;
    if (terms_.str().empty()) {
      if (coef < 0) terms_ << "- ";
    } else {
      terms_ << (coef < 0 ? " - " : " + ");
    }
    Time a = coef < 0 ? -coef : coef;
    if (a != 1) terms_ << a << " ";
    terms_ << var;
    return *this;
  }
  std::string str() const { return terms_.str(); }

 private:
  std::ostringstream terms_;
};

}  // namespace detail

/// Big-M linearization with M = sum of durations: y_k_l = 1 means k precedes l.
inline std::string export_mip_lp(const DisjunctiveGraph& g) {
  const std::size_t n = g.num_nodes();
  Time big_m = 0;
  for (const auto& op : g.ops) big_m += op.duration;
  auto x = [](NodeId i) { return "x" + std::to_string(i); };
  auto y = [](NodeId k, NodeId l) { return "y_" + std::to_string(k) + "_" + std::to_string(l); };

  std::ostringstream out;
  out << "\\ Quantum operation scheduling: " << n << " ops, " << g.dag.edges().size()
      << " precedences, " << g.disjunctive.size() << " disjunctive pairs, M = " << big_m << "\n";
  out << "Minimize\n obj: t\nSubject To\n";
  for (auto [i, j] : g.dag.edges()) {
    out << " prec_" << i << "_" << j << ": " << detail::LinearRow().add(1, x(i)).add(-1, x(j)).str()
        << " <= " << -g.duration(i) << "\n";
  }
  for (auto [k, l] : g.disjunctive) {
    // x_k + p_k <= x_l + M (1 - y)
    out << " disj_" << k << "_" << l << "_a: "
        << detail::LinearRow().add(1, x(k)).add(-1, x(l)).add(big_m, y(k, l)).str()
        << " <= " << big_m - g.duration(k) << "\n";
    // x_l + p_l <= x_k + M y
    out << " disj_" << k << "_" << l << "_b: "
        << detail::LinearRow().add(1, x(l)).add(-1, x(k)).add(-big_m, y(k, l)).str()
        << " <= " << -g.duration(l) << "\n";
  }
  for (NodeId i = 0; i < n; ++i) {
    out << " mk_" << i << ": " << detail::LinearRow().add(1, x(i)).add(-1, "t").str()
        << " <= " << -g.duration(i) << "\n";
  }
  if (n == 0) out << " mk_empty: t >= 0\n";
  out << "Bounds\n";
  for (NodeId i = 0; i < n; ++i) out << " " << x(i) << " >= 0\n";
  out << " t >= 0\n";
  if (!g.disjunctive.empty()) {
    out << "Binary\n";
    for (auto [k, l] : g.disjunctive) out << " " << y(k, l) << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace qos
