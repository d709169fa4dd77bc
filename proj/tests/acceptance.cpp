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

// End-to-end acceptance checks. One line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "qos/commutation_oracle.hpp"
#include "qos/qos.hpp"
#include "test_support.hpp"

using namespace qos;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kCorpusSize = 250;
constexpr int kParamSamplesPerRule = 200;
constexpr double kDeltaTolerance = 0.01;  // percentage points
constexpr double kHcxLimitMs = 1.0;
constexpr double kOracleLimitS = 60.0;

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << " " << detail << "\n";
  if (!ok) ++failures;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct CorpusResult {
  Circuit circuit;
  Time std_asap;
  Time exact;
  bool exact_proved;
  Time brute;
};

void ac1_hcx() {
  Circuit c = test::hcx_circuit();
  auto t0 = Clock::now();
  Time std_ms = asap(c, build_standard_dag(c)).makespan;
  SolveResult r = solve_bnb(test::extended_graph(c));
  double ms = ms_since(t0);
  std::ostringstream d;
  d << "hcx: std asap=" << std_ms << " ext bnb=" << r.makespan << (r.optimal ? " (proved)" : " (not proved)")
    << " in " << ms << " ms";
  report("AC1", std_ms == 3 && r.makespan == 2 && r.optimal && ms < kHcxLimitMs, d.str());
}

std::vector<CorpusResult> ac2_oracle(const std::vector<Circuit>& corpus) {
  std::vector<CorpusResult> out;
  std::size_t mismatches = 0, errors = 0, on_minimal = 0;
  SolverConfig cfg;
  cfg.time_limit = std::chrono::seconds(60);
  auto t0 = Clock::now();
  for (const auto& c : corpus) {
    try {
      auto g = test::extended_graph(c);
      SolveResult b = solve_bnb(g, cfg);
      // MINIMAL encodes the same feasible set with fewer pairs; the enumeration
      // falls back to it when the grouped set is over the cap.
      auto gm = test::extended_graph(c, DisjunctiveEdgeMode::kMinimal);
      const bool fallback = g.disjunctive.size() > cfg.bruteforce_cap;
      if (fallback) ++on_minimal;
      SolveResult f = solve_bruteforce(fallback ? gm : g, cfg);
      SolveResult bm = solve_bnb(gm, cfg);
      if (b.makespan != f.makespan || bm.makespan != f.makespan || !b.optimal) ++mismatches;
      out.push_back({c, asap(c, build_standard_dag(c)).makespan, b.makespan, b.optimal, f.makespan});
    } catch (const std::exception& e) {
      ++errors;
      std::cerr << "AC2 error: " << e.what() << "\n";
    }
  }
  double s = ms_since(t0) / 1000.0;
  std::ostringstream d;
  d << corpus.size() << " circuits: bnb==brute on " << (corpus.size() - mismatches - errors) << ", mismatches "
    << mismatches << ", errors " << errors << " (" << on_minimal << " enumerated on the minimal pair set), " << s
    << " s";
  report("AC2", corpus.size() >= 200 && mismatches == 0 && errors == 0 && s < kOracleLimitS, d.str());
  return out;
}

void ac3_monotone(const std::vector<CorpusResult>& results, std::size_t expected) {
  std::size_t bad = 0, improved = 0;
  for (const auto& r : results) {
    if (!r.exact_proved || r.exact > r.std_asap) ++bad;
    if (r.exact < r.std_asap) ++improved;
  }
  std::ostringstream d;
  d << results.size() << " instances: ext optimum <= std asap on all but " << bad << " (" << improved
    << " strictly better)";
  report("AC3", results.size() == expected && bad == 0, d.str());
}

void ac4_semi_active(const std::vector<Circuit>& corpus) {
  std::size_t bad = 0;
  for (const auto& c : corpus) {
    if (asap(c, build_standard_dag(c)) != semi_active(test::standard_graph(c), {})) ++bad;
  }
  std::ostringstream d;
  d << corpus.size() << " instances: asap(std) == semi_active(std, {}) except " << bad;
  report("AC4", bad == 0, d.str());
}

void ac5_heft(const std::vector<CorpusResult>& results) {
  std::size_t invalid = 0, below = 0;
  for (const auto& r : results) {
    auto g = test::extended_graph(r.circuit);
    Schedule h = heft(g);
    if (!validate(r.circuit, g.dag, h).empty()) ++invalid;
    if (h.makespan < r.exact) ++below;
  }
  Time hcx = heft(test::extended_graph(test::hcx_circuit())).makespan;
  std::ostringstream d;
  d << results.size() << " instances: invalid " << invalid << ", below optimum " << below << "; hcx heft=" << hcx;
  report("AC5", invalid == 0 && below == 0 && hcx == 2, d.str());
}

// One generator per rule; each yields an op pair the rule alone declares commuting.
using PairGen = std::function<std::pair<Operation, Operation>(std::mt19937_64&)>;

void ac6_commutation() {
  using test::make_op;
  std::uniform_real_distribution<double> angle(-2 * std::numbers::pi, 2 * std::numbers::pi);
  auto perm3 = [](std::mt19937_64& rng) {
    std::vector<Qubit> q{0, 1, 2};
    std::shuffle(q.begin(), q.end(), rng);
    return q;
  };
  auto random_1q = [&](std::mt19937_64& rng, Qubit q) {
    switch (rng() % 8) {
      case 0: return make_op("u1", {q}, {angle(rng)});
      case 1: return make_op("u2", {q}, {angle(rng), angle(rng)});
      case 2: return make_op("u3", {q}, {angle(rng), angle(rng), angle(rng)});
      case 3: return make_op("h", {q});
      case 4: return make_op("x", {q});
      case 5: return make_op("z", {q});
      case 6: return make_op("s", {q});
      default: return make_op("t", {q});
    }
  };
  std::vector<std::pair<Rule, PairGen>> gens = {
      {Rule::kDisjointQubits,
       [&](std::mt19937_64& rng) {
         auto q = perm3(rng);
         return std::pair{random_1q(rng, q[0]), rng() % 2 ? random_1q(rng, q[1]) : make_op("cx", {q[1], q[2]})};
       }},
      {Rule::kU1OnCxControl,
       [&](std::mt19937_64& rng) {
         auto q = perm3(rng);
         return std::pair{make_op("u1", {q[0]}, {angle(rng)}), make_op("cx", {q[0], q[1]})};
       }},
      {Rule::kCxSharedControl,
       [&](std::mt19937_64& rng) {
         auto q = perm3(rng);
         return std::pair{make_op("cx", {q[0], q[1]}), make_op("cx", {q[0], q[2]})};
       }},
      {Rule::kCxSharedTarget,
       [&](std::mt19937_64& rng) {
         auto q = perm3(rng);
         return std::pair{make_op("cx", {q[0], q[2]}), make_op("cx", {q[1], q[2]})};
       }},
      {Rule::kXOnCxTarget,
       [&](std::mt19937_64& rng) {
         auto q = perm3(rng);
         return std::pair{make_op("x", {q[1]}), make_op("cx", {q[0], q[1]})};
       }},
      {Rule::kIdenticalOps,
       [&](std::mt19937_64& rng) {
         auto q = perm3(rng);
         Operation a = rng() % 4 == 0 ? make_op("cx", {q[0], q[1]}) : random_1q(rng, q[0]);
         return std::pair{a, a};
       }},
  };
  std::mt19937_64 rng(606);
  std::size_t checked = 0, violations = 0, not_covered = 0;
  double worst = 0;
  for (const auto& [rule, gen] : gens) {
    CommutationRuleSet only = CommutationRuleSet::standard().enable(rule);
    int n = 0;
    for (int i = 0; i < kParamSamplesPerRule; ++i) {
      auto [a, b] = gen(rng);
      for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
        if (!commutes(x, y, only) || !commutes(x, y, CommutationRuleSet::all())) {
          ++not_covered;
          continue;
        }
        double norm = commutator_norm(x, y);
        worst = std::max(worst, norm);
        if (norm > kCommutatorTolerance) ++violations;
        ++checked;
      }
      ++n;
    }
    if (n < 100) ++not_covered;
  }
  std::ostringstream d;
  d << gens.size() << " rules x " << kParamSamplesPerRule << " samples: " << checked << " rule-true pairs, "
    << violations << " oracle violations, worst norm " << worst;
  report("AC6", violations == 0 && not_covered == 0 && checked >= gens.size() * 100, d.str());
}

void ac7_delta() {
  struct Fixture {
    Time std_ms, ext_ms;
    double expected;
  };
  const Fixture fixtures[] = {{20408, 18906, 7.36}, {6328, 5984, 5.44}, {24940, 24308, 2.53}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& f : fixtures) {
    auto h = delta_hundredths(f.std_ms, f.ext_ms);
    double got = h ? static_cast<double>(*h) / 100.0 : -1e9;
    ok = ok && std::abs(got - f.expected) <= kDeltaTolerance;
    d << with_thousands(f.std_ms) << "/" << with_thousands(f.ext_ms) << " -> " << format_delta(h) << "; ";
  }
  report("AC7", ok, d.str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ac8_determinism(const std::vector<Circuit>& corpus) {
  auto dir = std::filesystem::temp_directory_path() / "qos_acceptance_corpus";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "rand%04zu.json", i);
    files.push_back(dir / name);
    std::ofstream(files.back()) << serialize_json_circuit(corpus[i]);
  }
  CompareOptions opt;
  std::string a = format_compare_csv(run_compare(files, opt));
  opt.jobs = 4;
  std::string b = format_compare_csv(run_compare(files, opt));
  bool ok = a == b && !a.empty();
  std::ostringstream d;
  d << files.size() << " files: library csv " << (a == b ? "identical" : "differs");

#ifdef QOS_CLI_PATH
  std::string cmd = std::string("\"") + QOS_CLI_PATH + "\" --csv compare";
  for (const auto& f : files) cmd += " \"" + f.string() + "\"";
  std::string out1 = (dir / "run1.csv").string(), out2 = (dir / "run2.csv").string();
  int rc1 = std::system((cmd + " -o \"" + out1 + "\"").c_str());
  int rc2 = std::system((cmd + " -o \"" + out2 + "\"").c_str());
  std::string c1 = slurp(out1), c2 = slurp(out2);
  bool cli_ok = rc1 == 0 && rc2 == 0 && !c1.empty() && c1 == c2 && c1 == a;
  d << ", cli runs " << (cli_ok ? "identical" : "differ or failed");
  ok = ok && cli_ok;
#endif
  report("AC8", ok, d.str());
}

}  // namespace

int main() {
  auto corpus = test::random_corpus(kCorpusSize);
  ac1_hcx();
  auto results = ac2_oracle(corpus);
  ac3_monotone(results, corpus.size());
  ac4_semi_active(corpus);
  ac5_heft(results);
  ac6_commutation();
  ac7_delta();
  ac8_determinism(corpus);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria\n";
  return failures;
}
