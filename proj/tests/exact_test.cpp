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

#include "qos/exact.hpp"

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "test_support.hpp"

using namespace qos;
using qos::test::hcx_circuit;
using qos::test::make_circuit;
using qos::test::make_op;

namespace {

SolverConfig unlimited() {
  SolverConfig cfg;
  cfg.time_limit = std::chrono::hours(1);
  return cfg;
}

// Minimal reader for the LP sections we emit: counts rows per section and
// collects variable names by kind.
struct LpSummary {
  std::size_t rows = 0;
  std::map<std::string, std::size_t> rows_by_prefix;
  std::set<std::string> bounded;
  std::set<std::string> binaries;
  std::set<std::string> row_vars;
  std::string objective;
  bool ended = false;
};

LpSummary read_lp(const std::string& text) {
  LpSummary s;
  std::istringstream in(text);
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '\\') continue;
    if (line[0] != ' ') {
      section = line;
      if (line == "End") s.ended = true;
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    if (section == "Minimize") {
      ls >> tok >> s.objective;
    } else if (section == "Subject To") {
      ls >> tok;
      ++s.rows;
      ++s.rows_by_prefix[tok.substr(0, tok.find('_'))];
      while (ls >> tok) {
        if (tok == "<=" || tok == ">=") break;
        if (std::isalpha(static_cast<unsigned char>(tok[0]))) s.row_vars.insert(tok);
      }
    } else if (section == "Bounds") {
      ls >> tok;
      s.bounded.insert(tok);
    } else if (section == "Binary") {
      ls >> tok;
      s.binaries.insert(tok);
    }
  }
  return s;
}

}  // namespace

TEST(exact, hcx_extended_and_standard) {
  Circuit c = hcx_circuit();
  SolveResult ext = solve_bnb(test::extended_graph(c));
  EXPECT_EQ(ext.makespan, 2);
  EXPECT_TRUE(ext.optimal);
  EXPECT_EQ(ext.schedule.makespan, 2);
  EXPECT_TRUE(validate(c, build_extended_dag(c, CommutationRuleSet::all()), ext.schedule).empty());

  SolveResult std_r = solve_bnb(test::standard_graph(c));
  EXPECT_EQ(std_r.makespan, 3);
  EXPECT_TRUE(std_r.optimal);
  EXPECT_EQ(std_r.nodes, 1u);
}

TEST(exact, bruteforce_examples) {
  Circuit c = hcx_circuit();
  SolveResult b = solve_bruteforce(test::extended_graph(c));
  EXPECT_EQ(b.makespan, 2);
  EXPECT_TRUE(b.optimal);
  EXPECT_EQ(b.nodes, 2u);

  SolveResult s = solve_bruteforce(test::standard_graph(c));
  EXPECT_EQ(s.makespan, 3);
  EXPECT_EQ(s.schedule, asap(c, build_standard_dag(c)));

  // One of the two orientations closes a cycle; the other is still feasible.
  Circuit cyc = make_circuit(2, {make_op("cx", {0, 1}), make_op("h", {1}), make_op("cx", {0, 1})});
  SolveResult r = solve_bruteforce(test::extended_graph(cyc));
  EXPECT_EQ(r.makespan, 3);
  EXPECT_EQ(solve_bnb(test::extended_graph(cyc)).makespan, 3);
}

TEST(exact, bruteforce_refuses_over_cap) {
  std::vector<Operation> ops;
  for (int i = 0; i < 6; ++i) ops.push_back(make_op("cx", {0, i + 1}));
  auto g = test::extended_graph(make_circuit(7, ops));
  ASSERT_EQ(g.disjunctive.size(), 15u);
  SolverConfig cfg;
  cfg.bruteforce_cap = 10;
  EXPECT_THROW(solve_bruteforce(g, cfg), std::invalid_argument);
  cfg.bruteforce_cap = 15;
  EXPECT_EQ(solve_bruteforce(g, cfg).makespan, 6);
}

TEST(exact, bad_inputs) {
  SolverConfig cfg;
  cfg.time_limit = std::chrono::duration<double>(0);
  EXPECT_THROW(solve_bnb(test::extended_graph(hcx_circuit()), cfg), std::invalid_argument);

  DisjunctiveGraph g = test::extended_graph(hcx_circuit());
  g.dag = DependencyDag(3, {{0, 1}, {1, 0}});
  EXPECT_THROW(solve_bnb(g), CycleError);
}

TEST(exact, matches_bruteforce_on_random_circuits) {
  std::mt19937_64 rng(8);
  int nontrivial = 0;
  for (int trial = 0; trial < 150; ++trial) {
    Circuit c = test::random_circuit(rng, 8, 4);
    for (auto mode : {DisjunctiveEdgeMode::kGrouped, DisjunctiveEdgeMode::kMinimal, DisjunctiveEdgeMode::kRedundant}) {
      auto g = test::extended_graph(c, mode);
      if (g.disjunctive.size() > 15) continue;
      SolveResult brute = solve_bruteforce(g);
      for (auto branching : {BranchingStrategy::kCriticalPath, BranchingStrategy::kFirstConflict}) {
        SolverConfig cfg = unlimited();
        cfg.branching = branching;
        SolveResult bnb = solve_bnb(g, cfg);
        ASSERT_EQ(bnb.makespan, brute.makespan) << serialize_json_circuit(c);
        EXPECT_TRUE(bnb.optimal);
        EXPECT_TRUE(validate(c, g.dag, bnb.schedule).empty());
      }
      if (!g.disjunctive.empty()) ++nontrivial;
    }
  }
  EXPECT_GT(nontrivial, 100);
}

TEST(exact, bound_soundness_on_partial_orientations) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    Circuit c = test::random_circuit(rng, 8, 4);
    auto g = test::extended_graph(c);
    const std::size_t m = g.disjunctive.size();
    if (m == 0 || m > 10) continue;
    // Random partial orientation; brute force over its completions.
    Orientation partial(m);
    for (auto& d : partial) d = static_cast<Direction>(rng() % 3);
    auto bound = orientation_lower_bound(g, partial);
    std::optional<Time> best;
    for (std::uint64_t mask = 0; mask < (1u << m); ++mask) {
      Orientation o = partial;
      bool consistent = true;
      for (std::size_t p = 0; p < m; ++p) {
        Direction d = (mask >> p) & 1 ? Direction::kBackward : Direction::kForward;
        if (o[p] == Direction::kUnset) o[p] = d;
        else if (o[p] != d) consistent = false;
      }
      if (!consistent) continue;
      try {
        Time t = semi_active(g, o).makespan;
        if (!best || t < *best) best = t;
      } catch (const CycleError&) {
      }
    }
    if (!bound) {
      EXPECT_FALSE(best.has_value());
      continue;
    }
    if (best) {
      EXPECT_LE(*bound, *best);
    }
  }
}

TEST(exact, anytime_incumbent_is_monotone) {
  // Large enough that small node budgets stop the search early.
  std::mt19937_64 rng(4);
  std::vector<Operation> ops;
  for (int i = 0; i < 40; ++i) {
    Operation op = test::random_gate(rng, 6);
    op.duration = 1 + static_cast<Time>(rng() % 10);
    ops.push_back(op);
  }
  Circuit c = make_circuit(6, ops);
  auto g = test::extended_graph(c);
  Time previous = std::numeric_limits<Time>::max();
  for (std::uint64_t budget : {1, 2, 5, 20, 100, 1000, 10000}) {
    SolverConfig cfg = unlimited();
    cfg.max_nodes = budget;
    SolveResult r = solve_bnb(g, cfg);
    EXPECT_LE(r.makespan, previous);
    EXPECT_TRUE(validate(c, g.dag, r.schedule).empty());
    EXPECT_LE(r.nodes, budget);
    previous = r.makespan;
  }
  SolveResult full = solve_bnb(g, unlimited());
  EXPECT_LE(full.makespan, previous);
  EXPECT_LE(full.makespan, heft(g).makespan);
}

TEST(exact, time_limit_is_respected) {
  std::mt19937_64 rng(12);
  std::vector<Operation> ops;
  for (int i = 0; i < 400; ++i) {
    Operation op = test::random_gate(rng, 8);
    op.duration = 1 + static_cast<Time>(rng() % 10);
    ops.push_back(op);
  }
  Circuit c = make_circuit(8, ops);
  auto g = test::extended_graph(c);
  SolverConfig cfg;
  cfg.time_limit = std::chrono::milliseconds(200);
  SolveResult r = solve_bnb(g, cfg);
  EXPECT_LT(r.elapsed.count(), 5.0);
  EXPECT_TRUE(validate(c, g.dag, r.schedule).empty());
  EXPECT_LE(r.makespan, heft(g).makespan);
}

TEST(mip_export, hcx_counts) {
  auto g = test::extended_graph(hcx_circuit());
  std::string lp = export_mip_lp(g);
  LpSummary s = read_lp(lp);
  EXPECT_TRUE(s.ended);
  EXPECT_EQ(s.objective, "t");
  EXPECT_EQ(s.rows_by_prefix["prec"], 1u);
  EXPECT_EQ(s.rows_by_prefix["disj"], 2u);
  EXPECT_EQ(s.rows_by_prefix["mk"], 3u);
  EXPECT_EQ(s.rows, 6u);
  EXPECT_EQ(s.bounded, (std::set<std::string>{"t", "x0", "x1", "x2"}));
  EXPECT_EQ(s.binaries, (std::set<std::string>{"y_1_2"}));
  EXPECT_EQ(lp,
            "\\ Quantum operation scheduling: 3 ops, 1 precedences, 1 disjunctive pairs, M = 3\n"
            "Minimize\n"
            " obj: t\n"
            "Subject To\n"
            " prec_0_1: x0 - x1 <= -1\n"
            " disj_1_2_a: x1 - x2 + 3 y_1_2 <= 2\n"
            " disj_1_2_b: x2 - x1 - 3 y_1_2 <= -1\n"
            " mk_0: x0 - t <= -1\n"
            " mk_1: x1 - t <= -1\n"
            " mk_2: x2 - t <= -1\n"
            "Bounds\n"
            " x0 >= 0\n"
            " x1 >= 0\n"
            " x2 >= 0\n"
            " t >= 0\n"
            "Binary\n"
            " y_1_2\n"
            "End\n");
}

TEST(mip_export, structure_matches_graph) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    Circuit c = test::random_circuit(rng, 10, 5);
    auto g = test::extended_graph(c);
    LpSummary s = read_lp(export_mip_lp(g));
    EXPECT_EQ(s.rows_by_prefix["prec"], g.dag.edges().size());
    EXPECT_EQ(s.rows_by_prefix["disj"], 2 * g.disjunctive.size());
    EXPECT_EQ(s.rows_by_prefix["mk"], c.size());
    EXPECT_EQ(s.bounded.size(), c.size() + 1);
    EXPECT_EQ(s.binaries.size(), g.disjunctive.size());
    for (const auto& v : s.row_vars) {
      EXPECT_TRUE(s.bounded.count(v) || s.binaries.count(v)) << v;
    }
  }
  auto std_g = test::standard_graph(hcx_circuit());
  EXPECT_TRUE(read_lp(export_mip_lp(std_g)).binaries.empty());
  EXPECT_EQ(export_mip_lp(std_g).find("Binary"), std::string::npos);
}
