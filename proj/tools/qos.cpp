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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qos/qos.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::string format = "auto";
  std::string durations;
  std::optional<qos::Time> default_duration;
  std::string rules = "default";
  std::string dmode = "grouped";
  double time_limit = 10.0;
  std::string out;
  bool csv = false;
  bool gantt = false;
};

struct Inputs {
  std::string file;
  std::string dag_kind = "extended";
  std::string method = "bnb";
  std::string emit;
  std::string schedule_path;
  std::vector<std::string> files;
};

std::optional<qos::DurationTable> duration_table(const GlobalOptions& g) {
  if (g.durations.empty() && !g.default_duration) return std::nullopt;
  qos::DurationTable t;
  if (!g.durations.empty()) t = qos::DurationTable::parse_json(qos::read_file(g.durations));
  if (g.default_duration) t.set_global_default(*g.default_duration);
  return t;
}

qos::Circuit load(const GlobalOptions& g, const std::string& path) {
  qos::Circuit c = qos::load_circuit(path, qos::parse_format(g.format));
  if (auto t = duration_table(g)) c = qos::apply_durations(c, *t);
  return c;
}

qos::SolverConfig solver_config(const GlobalOptions& g) {
  qos::SolverConfig cfg;
  cfg.time_limit = std::chrono::duration<double>(g.time_limit);
  cfg.check();
  return cfg;
}

struct BuiltGraph {
  qos::CommutationRuleSet rules = qos::CommutationRuleSet::standard();
  qos::DisjunctiveGraph graph;
};

BuiltGraph build_graph(const qos::Circuit& c, const GlobalOptions& g, const std::string& kind) {
  BuiltGraph b;
  if (kind == "standard") {
    b.rules = qos::CommutationRuleSet::standard();
  } else if (kind == "extended") {
    b.rules = qos::CommutationRuleSet::parse(g.rules);
  } else {
    throw CLI::ValidationError("--dag", "expected standard or extended, got '" + kind + "'");
  }
  const qos::DependencyDag dag = qos::build_extended_dag(c, b.rules);
  b.graph = qos::build_disjunctive_graph(c, dag, b.rules, qos::parse_mode(g.dmode));
  return b;
}

void emit(const GlobalOptions& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + g.out);
  f << text;
}

std::string graph_json(const qos::DisjunctiveGraph& g) {
  nlohmann::json doc;
  doc["nodes"] = g.num_nodes();
  nlohmann::json c = nlohmann::json::array();
  for (auto [u, v] : g.dag.edges()) c.push_back({u, v});
  nlohmann::json d = nlohmann::json::array();
  for (auto [k, l] : g.disjunctive) d.push_back({k, l});
  doc["conjunctive"] = std::move(c);
  doc["disjunctive"] = std::move(d);
  return doc.dump(2) + "\n";
}

int run_parse(const GlobalOptions& g, const Inputs& in) {
  qos::Circuit c = load(g, in.file);
  emit(g, in.emit == "qasm" ? qos::serialize_qasm(c) : qos::serialize_json_circuit(c));
  return kExitOk;
}

int run_dag(const GlobalOptions& g, const Inputs& in) {
  qos::Circuit c = load(g, in.file);
  BuiltGraph b = build_graph(c, g, in.dag_kind);
  emit(g, in.emit == "json" ? graph_json(b.graph) : qos::export_dot(b.graph));
  return kExitOk;
}

int run_schedule(const GlobalOptions& g, const Inputs& in) {
  qos::Circuit c = load(g, in.file);
  BuiltGraph b = build_graph(c, g, in.dag_kind);
  const qos::Method method = qos::parse_method(in.method);
  qos::MethodResult r = qos::run_method(c, b.graph, method, solver_config(g));
  std::cerr << "makespan " << r.schedule.makespan << " dt (" << in.method
            << (r.optimal ? ", proved optimal" : "") << ")\n";
  if (g.gantt && g.out.empty()) {
    std::cout << qos::render_gantt(c, r.schedule);
    return kExitOk;
  }
  emit(g, qos::schedule_to_json(r.schedule, c.ops));
  if (g.gantt) std::cout << qos::render_gantt(c, r.schedule);
  return kExitOk;
}

int run_validate(const GlobalOptions& g, const Inputs& in) {
  qos::Circuit c = load(g, in.file);
  BuiltGraph b = build_graph(c, g, in.dag_kind);
  qos::Schedule s = qos::schedule_from_json(qos::read_file(in.schedule_path), c.size());
  auto violations = qos::validate(c, b.graph.dag, s);
  std::string report;
  for (const auto& v : violations) report += v.message + "\n";
  report += violations.empty() ? "valid: makespan " + std::to_string(s.makespan) + "\n"
                               : std::to_string(violations.size()) + " violation(s)\n";
  emit(g, report);
  return violations.empty() ? kExitOk : kExitFailure;
}

int run_compare_cmd(const GlobalOptions& g, const Inputs& in) {
  qos::CompareOptions opt;
  opt.durations = duration_table(g);
  opt.solver = solver_config(g);
  opt.method = qos::parse_method(in.method);
  opt.rules = qos::CommutationRuleSet::parse(g.rules);
  opt.mode = qos::parse_mode(g.dmode);
  opt.format = qos::parse_format(g.format);
  std::vector<std::filesystem::path> files(in.files.begin(), in.files.end());
  auto rows = qos::run_compare(files, opt);
  emit(g, g.csv ? qos::format_compare_csv(rows) : qos::format_compare_table(rows));
  for (const auto& r : rows) {
    if (r.error) return kExitFailure;
  }
  return kExitOk;
}

int run_export_mip(const GlobalOptions& g, const Inputs& in) {
  qos::Circuit c = load(g, in.file);
  BuiltGraph b = build_graph(c, g, in.dag_kind);
  emit(g, qos::export_mip_lp(b.graph));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qos: commutation-aware quantum operation scheduling"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  Inputs in;
  app.add_option("--format", g.format, "Circuit format: auto|qasm|json")
      ->check(CLI::IsMember({"auto", "qasm", "json"}));
  app.add_option("--durations", g.durations, "Duration table JSON");
  app.add_option("--default-duration", g.default_duration, "Duration for ops not in the table")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--rules", g.rules, "Commutation rules: standard|default|RULE1,RULE2,...");
  app.add_option("--dmode", g.dmode, "Disjunctive edges: redundant|grouped|minimal")
      ->check(CLI::IsMember({"redundant", "grouped", "minimal"}));
  app.add_option("--time-limit", g.time_limit, "Exact solver time limit in seconds")
      ->check(CLI::PositiveNumber);
  app.add_option("--out,-o", g.out, "Write output to this path instead of stdout");
  app.add_flag("--csv", g.csv, "CSV output for compare");
  app.add_flag("--gantt", g.gantt, "Render a text Gantt chart of the schedule");

  auto dag_types = CLI::IsMember({"standard", "extended"});

  auto* parse = app.add_subcommand("parse", "Parse a circuit and print it normalized");
  parse->add_option("file", in.file, "Circuit file")->required()->check(CLI::ExistingFile);
  parse->add_option("--emit", in.emit, "json|qasm")->check(CLI::IsMember({"json", "qasm"}));

  auto* dag = app.add_subcommand("dag", "Build the dependency and disjunctive graph");
  dag->add_option("file", in.file, "Circuit file")->required()->check(CLI::ExistingFile);
  dag->add_option("--mode,--dag", in.dag_kind, "standard|extended")->check(dag_types);
  dag->add_option("--emit", in.emit, "dot|json")->check(CLI::IsMember({"dot", "json"}));

  auto* schedule = app.add_subcommand("schedule", "Schedule a circuit");
  schedule->add_option("file", in.file, "Circuit file")->required()->check(CLI::ExistingFile);
  schedule->add_option("--dag,--mode", in.dag_kind, "standard|extended")->check(dag_types);
  schedule->add_option("--method", in.method, "asap|heft|bnb|brute")
      ->check(CLI::IsMember({"asap", "heft", "bnb", "brute"}));

  auto* validate = app.add_subcommand("validate", "Check a schedule against a circuit");
  validate->add_option("file", in.file, "Circuit file")->required()->check(CLI::ExistingFile);
  validate->add_option("--schedule", in.schedule_path, "Schedule JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--dag,--mode", in.dag_kind, "standard|extended")->check(dag_types);

  auto* compare = app.add_subcommand("compare", "Compare Std-DAG asap with Ext-DAG scheduling");
  compare->add_option("files", in.files, "Circuit files")->required()->check(CLI::ExistingFile);
  compare->add_option("--method", in.method, "bnb|heft|brute")->check(CLI::IsMember({"bnb", "heft", "brute"}));

  auto* mip = app.add_subcommand("export-mip", "Write the big-M MIP model in LP format");
  mip->add_option("file", in.file, "Circuit file")->required()->check(CLI::ExistingFile);
  mip->add_option("--dag,--mode", in.dag_kind, "standard|extended")->check(dag_types);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*parse) return run_parse(g, in);
    if (*dag) return run_dag(g, in);
    if (*schedule) return run_schedule(g, in);
    if (*validate) return run_validate(g, in);
    if (*compare) return run_compare_cmd(g, in);
    if (*mip) return run_export_mip(g, in);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "qos: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "qos: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
