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

// Dense-matrix commutation check, used to cross-check the rule table.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qos/circuit.hpp"

namespace qos {

inline constexpr double kCommutatorTolerance = 1e-9;

/// Local unitary of a gate; qubit k of the gate is bit k of the basis index.
inline Eigen::MatrixXcd gate_unitary(const Operation& op) {
  using C = std::complex<double>;
  const C i(0, 1);
  const double r = 1 / std::sqrt(2.0);
  Eigen::MatrixXcd m(2, 2);
  const auto& p = op.params;
  if (op.name == "h") {
    m << r, r, r, -r;
  } else if (op.name == "x") {
    m << 0, 1, 1, 0;
  } else if (op.name == "z") {
    m << 1, 0, 0, -1;
  } else if (op.name == "s") {
    m << 1, 0, 0, i;
  } else if (op.name == "t") {
    m << 1, 0, 0, std::exp(i * (std::numbers::pi / 4));
  } else if (op.name == "u1" && p.size() == 1) {
    m << 1, 0, 0, std::exp(i * p[0]);
  } else if (op.name == "u2" && p.size() == 2) {
    m << r, -r * std::exp(i * p[1]), r * std::exp(i * p[0]), r * std::exp(i * (p[0] + p[1]));
  } else if (op.name == "u3" && p.size() == 3) {
    const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
    m << c, -std::exp(i * p[2]) * s, std::exp(i * p[1]) * s, std::exp(i * (p[1] + p[2])) * c;
  } else if (op.name == "cx" && op.qubits.size() == 2) {
    // Control is bit 0, target bit 1.
    m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1;
    m(2, 2) = 1;
    m(3, 1) = 1;
    m(1, 3) = 1;
  } else {
    throw std::invalid_argument("no unitary for gate " + describe(op));
  }
  return m;
}

/// Embeds the gate on `support` (bit k of the index = support[k]).
inline Eigen::MatrixXcd embed_unitary(const Operation& op, const std::vector<Qubit>& support) {
  const Eigen::MatrixXcd local = gate_unitary(op);
  std::vector<int> pos;
  for (Qubit q : op.qubits) {
    auto it = std::find(support.begin(), support.end(), q);
    if (it == support.end()) throw std::invalid_argument("support does not cover " + describe(op));
    pos.push_back(static_cast<int>(it - support.begin()));
  }
  const int dim = 1 << support.size();
  int gate_mask = 0;
  for (int b : pos) gate_mask |= 1 << b;
  auto local_index = [&](int full) {
    int idx = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) idx |= ((full >> pos[k]) & 1) << k;
    return idx;
  };
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (int row = 0; row < dim; ++row) {
    for (int col = 0; col < dim; ++col) {
      if ((row & ~gate_mask) != (col & ~gate_mask)) continue;
      full(row, col) = local(local_index(row), local_index(col));
    }
  }
  return full;
}

/// max |(AB - BA)_ij| over the union support of the two gates.
inline double commutator_norm(const Operation& a, const Operation& b) {
  std::vector<Qubit> support = a.qubits;
  for (Qubit q : b.qubits) {
    if (std::find(support.begin(), support.end(), q) == support.end()) support.push_back(q);
  }
  std::sort(support.begin(), support.end());
  if (support.size() > 3) throw std::invalid_argument("oracle supports at most 3 qubits");
  const Eigen::MatrixXcd ua = embed_unitary(a, support);
  const Eigen::MatrixXcd ub = embed_unitary(b, support);
  return (ua * ub - ub * ua).cwiseAbs().maxCoeff();
}

inline bool commutes_matrix_oracle(const Operation& a, const Operation& b) {
  return commutator_norm(a, b) <= kCommutatorTolerance;
}

}  // namespace qos
