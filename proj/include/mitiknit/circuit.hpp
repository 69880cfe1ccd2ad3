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

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mitiknit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GateKind : std::uint8_t { H, RX, RZ, RZZ, CNOT, X, Z, ProjPlus, ProjMinus };

std::string_view to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view name);

constexpr int arity(GateKind kind) {
  return (kind == GateKind::RZZ || kind == GateKind::CNOT) ? 2 : 1;
}
constexpr bool is_parameterized(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RZ || kind == GateKind::RZZ;
}
constexpr bool is_projector(GateKind kind) {
  return kind == GateKind::ProjPlus || kind == GateKind::ProjMinus;
}

/// One gate. Rotations follow the exp(-i*angle/2*G) convention with
/// G = X, Z or Z(x)Z. For CNOT, qubits[0] is the control. PROJ_PLUS and
/// PROJ_MINUS are the Z-basis projectors |0><0| and |1><1|.
struct Gate {
  GateKind kind = GateKind::H;
  std::array<int, 2> qubits{-1, -1};
  double angle = 0.0;

  int arity() const { return mitiknit::arity(kind); }
  Gate inverse() const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

namespace gates {
inline Gate h(int q) { return {GateKind::H, {q, -1}, 0.0}; }
inline Gate x(int q) { return {GateKind::X, {q, -1}, 0.0}; }
inline Gate z(int q) { return {GateKind::Z, {q, -1}, 0.0}; }
inline Gate rx(int q, double angle) { return {GateKind::RX, {q, -1}, angle}; }
inline Gate rz(int q, double angle) { return {GateKind::RZ, {q, -1}, angle}; }
inline Gate rzz(int a, int b, double angle) { return {GateKind::RZZ, {a, b}, angle}; }
inline Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}, 0.0}; }
inline Gate proj_plus(int q) { return {GateKind::ProjPlus, {q, -1}, 0.0}; }
inline Gate proj_minus(int q) { return {GateKind::ProjMinus, {q, -1}, 0.0}; }
}  // namespace gates

/// Ordered gate list on `width` qubits. Every gate is validated on insertion.
class Circuit {
 public:
  explicit Circuit(int width);

  int width() const { return width_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  Circuit& add(const Gate& gate);
  Circuit& append(const Circuit& other);

  bool has_projectors() const;
  std::size_t count_parameterized() const;

  /// U^dagger for projector-free circuits.
  Circuit inverse() const;

  /// Stable 64-bit content hash (kind, qubits and angle bits).
  std::uint64_t hash() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int width_;
  std::vector<Gate> gates_;
};

/// Replaces every RZZ(t) on (a, b) with CNOT(a, b), RZ(t) on b, CNOT(a, b).
Circuit transpile(const Circuit& circuit);

/// Global folding U (U^dagger U)^k. Rejects circuits with projectors.
Circuit fold(const Circuit& circuit, int repetitions);

nlohmann::json to_json(const Circuit& circuit);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace mitiknit
