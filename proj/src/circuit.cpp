// Copyright 2026 The mitiknit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mitiknit/circuit.hpp"

#include <bit>

#include "mitiknit/rng.hpp"

namespace mitiknit {

namespace {

constexpr std::array<std::string_view, 9> kGateNames = {
    "H", "RX", "RZ", "RZZ", "CNOT", "X", "Z", "PROJ_PLUS", "PROJ_MINUS"};

}  // namespace

std::string_view to_string(GateKind kind) { return kGateNames[static_cast<std::size_t>(kind)]; }

GateKind gate_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kGateNames.size(); ++i) {
    if (kGateNames[i] == name) return static_cast<GateKind>(i);
  }
  throw Error("unknown gate kind '" + std::string(name) + "'");
}

Gate Gate::inverse() const {
  if (is_projector(kind)) throw Error("projector gates have no inverse");
  Gate g = *this;
  if (is_parameterized(kind)) g.angle = -angle;
  return g;
}

Circuit::Circuit(int width) : width_(width) {
  if (width < 1 || width > 30) throw Error("circuit width must be in [1, 30]");
}

Circuit& Circuit::add(const Gate& gate) {
  const int n = gate.arity();
  for (int i = 0; i < n; ++i) {
    if (gate.qubits[i] < 0 || gate.qubits[i] >= width_) {
      throw Error("gate " + std::string(to_string(gate.kind)) + " qubit index " +
                  std::to_string(gate.qubits[i]) + " outside width " + std::to_string(width_));
    }
  }
  if (n == 2 && gate.qubits[0] == gate.qubits[1]) {
    throw Error("two-qubit gate " + std::string(to_string(gate.kind)) + " on identical qubits");
  }
  Gate stored = gate;
  if (n == 1) stored.qubits[1] = -1;
  if (!is_parameterized(gate.kind)) stored.angle = 0.0;
  gates_.push_back(stored);
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.width_ != width_) throw Error("cannot append circuits of different width");
  gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  return *this;
}

bool Circuit::has_projectors() const {
  for (const auto& g : gates_) {
    if (is_projector(g.kind)) return true;
  }
  return false;
}

std::size_t Circuit::count_parameterized() const {
  std::size_t n = 0;
  for (const auto& g : gates_) n += is_parameterized(g.kind) ? 1 : 0;
  return n;
}

Circuit Circuit::inverse() const {
  Circuit inv(width_);
  inv.gates_.reserve(gates_.size());
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) inv.gates_.push_back(it->inverse());
  return inv;
}

std::uint64_t Circuit::hash() const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(width_));
  for (const auto& g : gates_) {
    const std::uint64_t word = static_cast<std::uint64_t>(g.kind) |
                               (static_cast<std::uint64_t>(g.qubits[0] + 1) << 8) |
                               (static_cast<std::uint64_t>(g.qubits[1] + 1) << 24);
    h = mix64(h ^ word);
    h = mix64(h ^ std::bit_cast<std::uint64_t>(g.angle));
  }
  return h;
}

Circuit transpile(const Circuit& circuit) {
  Circuit out(circuit.width());
  for (const auto& g : circuit.gates()) {
    if (g.kind == GateKind::RZZ) {
      out.add(gates::cnot(g.qubits[0], g.qubits[1]));
      out.add(gates::rz(g.qubits[1], g.angle));
      out.add(gates::cnot(g.qubits[0], g.qubits[1]));
    } else {
      out.add(g);
    }
  }
  return out;
}

Circuit fold(const Circuit& circuit, int repetitions) {
  if (repetitions < 0) throw Error("fold repetitions must be non-negative");
  if (circuit.has_projectors()) throw Error("cannot fold a circuit containing projectors");
  const Circuit inv = circuit.inverse();
  Circuit out = circuit;
  for (int k = 0; k < repetitions; ++k) {
    out.append(inv);
    out.append(circuit);
  }
  return out;
}

nlohmann::json to_json(const Circuit& circuit) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : circuit.gates()) {
    nlohmann::json jg;
    jg["kind"] = std::string(to_string(g.kind));
    if (g.arity() == 2) {
      jg["qubits"] = {g.qubits[0], g.qubits[1]};
    } else {
      jg["qubits"] = {g.qubits[0]};
    }
    if (is_parameterized(g.kind)) jg["angle"] = g.angle;
    gates.push_back(std::move(jg));
  }
  return {{"width", circuit.width()}, {"gates", std::move(gates)}};
}

Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c(j.at("width").get<int>());
  for (const auto& jg : j.at("gates")) {
    Gate g;
    g.kind = gate_kind_from_string(jg.at("kind").get<std::string>());
    const auto& qs = jg.at("qubits");
    if (static_cast<int>(qs.size()) != g.arity()) {
      throw Error("gate " + std::string(to_string(g.kind)) + " expects " +
                  std::to_string(g.arity()) + " qubit indices");
    }
    for (int i = 0; i < g.arity(); ++i) g.qubits[i] = qs[i].get<int>();
    if (is_parameterized(g.kind)) g.angle = jg.at("angle").get<double>();
    c.add(g);
  }
  return c;
}

}  // namespace mitiknit
