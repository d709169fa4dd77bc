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

#include <array>
#include <bitset>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qos/circuit.hpp"

namespace qos {

enum class Rule : int {
  kDisjointQubits = 0,
  kU1OnCxControl,
  kCxSharedControl,
  kCxSharedTarget,
  kXOnCxTarget,
  kIdenticalOps,
};

inline constexpr std::array<Rule, 6> kAllRules = {
    Rule::kDisjointQubits, Rule::kU1OnCxControl, Rule::kCxSharedControl,
    Rule::kCxSharedTarget, Rule::kXOnCxTarget,   Rule::kIdenticalOps,
};

inline std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::kDisjointQubits: return "DISJOINT_QUBITS";
    case Rule::kU1OnCxControl: return "U1_ON_CX_CONTROL";
    case Rule::kCxSharedControl: return "CX_SHARED_CONTROL";
    case Rule::kCxSharedTarget: return "CX_SHARED_TARGET";
    case Rule::kXOnCxTarget: return "X_ON_CX_TARGET";
    case Rule::kIdenticalOps: return "IDENTICAL_OPS";
  }
  return "?";
}

inline std::optional<Rule> rule_from_name(std::string_view name) {
  for (Rule r : kAllRules) {
    if (rule_name(r) == name) return r;
  }
  return std::nullopt;
}

/// Set of enabled commutation rules. DISJOINT_QUBITS is always a member.
class CommutationRuleSet {
 public:
  /// Only trivial commutation between ops on disjoint qubits.
  static CommutationRuleSet standard() { return CommutationRuleSet(); }

  static CommutationRuleSet all() {
    CommutationRuleSet s;
    for (Rule r : kAllRules) s.enable(r);
    return s;
  }

  /// Accepts "standard", "default", or a comma-separated list of rule names.
  static CommutationRuleSet parse(std::string_view text) {
    if (text == "standard") return standard();
    if (text == "default") return all();
    CommutationRuleSet s;
    for (const auto& tok : detail::split(text, ',')) {
      if (tok.empty()) continue;
      auto r = rule_from_name(tok);
      if (!r) throw std::invalid_argument("unknown commutation rule '" + tok + "'");
      s.enable(*r);
    }
    return s;
  }

  static CommutationRuleSet from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("rule set must be a JSON array");
    CommutationRuleSet s;
    for (const auto& e : j) {
      auto r = e.is_string() ? rule_from_name(e.get<std::string>()) : std::nullopt;
      if (!r) throw std::invalid_argument("unknown commutation rule " + e.dump());
      s.enable(*r);
    }
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (Rule r : kAllRules) {
      if (contains(r)) out.push_back(std::string(rule_name(r)));
    }
    return out;
  }

  CommutationRuleSet& enable(Rule r) {
    bits_.set(static_cast<int>(r));
    return *this;
  }

  bool contains(Rule r) const { return bits_.test(static_cast<int>(r)); }

  /// True when only DISJOINT_QUBITS is enabled.
  bool is_standard() const { return bits_.count() == 1; }

  bool operator==(const CommutationRuleSet&) const = default;

 private:
  CommutationRuleSet() { bits_.set(static_cast<int>(Rule::kDisjointQubits)); }

  std::bitset<kAllRules.size()> bits_;
};

namespace detail {

inline bool shares_qubit(const Operation& a, const Operation& b) {
  for (Qubit q : a.qubits) {
    if (b.acts_on(q)) return true;
  }
  return false;
}

// One direction of the nontrivial rules; commutes() tries both orders.
inline bool rule_matches(const Operation& a, const Operation& b, const CommutationRuleSet& rules) {
  const bool a_cx = a.name == "cx" && a.qubits.size() == 2;
  const bool b_cx = b.name == "cx" && b.qubits.size() == 2;
  if (rules.contains(Rule::kU1OnCxControl) && a.name == "u1" && b_cx &&
      a.qubits[0] == b.qubits[0]) {
    return true;
  }
  if (rules.contains(Rule::kXOnCxTarget) && a.name == "x" && b_cx && a.qubits[0] == b.qubits[1]) {
    return true;
  }
  if (a_cx && b_cx) {
    if (rules.contains(Rule::kCxSharedControl) && a.qubits[0] == b.qubits[0] &&
        a.qubits[1] != b.qubits[1]) {
      return true;
    }
    if (rules.contains(Rule::kCxSharedTarget) && a.qubits[1] == b.qubits[1] &&
        a.qubits[0] != b.qubits[0]) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Rule-table commutation check. Sound but not complete: a false result does
/// not prove the pair fails to commute.
inline bool commutes(const Operation& a, const Operation& b, const CommutationRuleSet& rules) {
  if (!detail::shares_qubit(a, b)) return true;
  if (a.name == "barrier" || b.name == "barrier") return false;
  if (rules.contains(Rule::kIdenticalOps) && a.name == b.name && a.qubits == b.qubits &&
      a.params == b.params) {
    return true;
  }
  return detail::rule_matches(a, b, rules) || detail::rule_matches(b, a, rules);
}

}  // namespace qos
