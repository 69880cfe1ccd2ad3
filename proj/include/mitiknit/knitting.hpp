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
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mitiknit/circuit.hpp"
#include "mitiknit/ising.hpp"
#include "mitiknit/sim.hpp"

namespace mitiknit {

/// Local map applied to one cut qubit. RotPlus / RotMinus conjugate by
/// exp(+-i pi/4 Z); MeasSign is rho -> P+ rho P+ - P- rho P-.
enum class LocalOp { Id, Z, RotPlus, RotMinus, MeasSign };

std::string_view to_string(LocalOp op);

struct QpdTerm {
  double coefficient = 0.0;
  LocalOp op_a = LocalOp::Id;
  LocalOp op_b = LocalOp::Id;
};

/// Six-term quasi-probability decomposition of the RZZ(phi) channel.
std::array<QpdTerm, 6> qpd_terms(double phi);

/// One-norm of the decomposition, 1 + 2|sin phi|.
double qpd_gamma(double phi);

/// Sampling overhead prod_i (1 + 2|sin phi_i|)^2.
double overhead(std::span<const double> knitted_angles);

enum class CutAssignment { Knitted, Unknitted };

/// Which of the 2P cross-bond RZZ gates are knitted. Entry 2p + s refers to
/// layer p and cut bond s (s = 0: bond q-1, s = 1: bond q-1+N/2).
struct CutLayout {
  int cut_site = 1;
  std::vector<CutAssignment> assignments;

  int layers() const { return static_cast<int>(assignments.size()) / 2; }
  int num_cuts() const;
  int num_knitted() const { return static_cast<int>(assignments.size()) - num_cuts(); }
  PatchSpec patch() const { return PatchSpec{cut_site}; }
  void validate(int num_spins, int layers) const;
};

nlohmann::json to_json(const CutLayout& layout);
CutLayout layout_from_json(const nlohmann::json& j);

/// q uniform on [1, N]; C of the 2P cross gates unknitted, chosen uniformly
/// without replacement.
CutLayout random_layout(int num_spins, int layers, int cuts, std::uint64_t seed);

/// Nearest of {0, pi} modulo 2 pi, ties to 0.
double round_to_cut_angle(double angle);

/// Rounds every unknitted cross-bond angle; other angles are untouched.
AnsatzParams apply_cuts(const AnsatzParams& params, const CutLayout& layout);

/// Angles of the knitted cross gates, in circuit order.
std::vector<double> knitted_angles(const AnsatzParams& params, const CutLayout& layout);

struct KnittedGate {
  double angle = 0.0;
  int layer = 0;
  int bond = 0;
  std::array<int, 2> local_qubits{};  // cut qubit in side 0 and side 1
};

/// One step of a sub-circuit: a local gate, or (slot >= 0) the insertion
/// point of knitted gate `slot`.
struct SideOp {
  Gate gate;
  int slot = -1;
};

struct SubCircuit {
  std::vector<int> qubits;  // global index of each local qubit
  std::vector<SideOp> ops;

  int width() const { return static_cast<int>(qubits.size()); }
};

/// Where an observable is evaluated: inside one side, or (side == -1) as the
/// product of Z on `z_qubits[0]` in side 0 and Z on `z_qubits[1]` in side 1.
struct Route {
  int side = 0;
  std::vector<PauliString> local;  // one entry when side >= 0
  std::array<int, 2> z_qubits{-1, -1};
};

struct KnitPlan {
  int num_spins = 0;
  std::array<SubCircuit, 2> sides;
  std::vector<KnittedGate> knitted;
  std::vector<Route> routes;  // one per canonical observable

  int num_knitted() const { return static_cast<int>(knitted.size()); }
};

/// Splits the circuit descriptor along the layout. Unknitted angles must
/// already be 0 or pi.
KnitPlan split(const IsingInstance& instance, int layers, const AnsatzParams& params,
               const CutLayout& layout);

inline constexpr int kMaxExactKnitted = 6;

enum class KnitBackend { Auto, Pure, Density };

/// Exact reconstruction of the 2N canonical expectations by summing every
/// term assignment. At most kMaxExactKnitted knitted gates.
Eigen::VectorXd knit_exact(const KnitPlan& plan, KnitBackend backend = KnitBackend::Auto);

/// Monte-Carlo reconstruction with `samples` samples per measurement setting
/// (all-Z for the bond terms, all-X for the field terms).
Eigen::VectorXd knit_sampled(const KnitPlan& plan, std::int64_t samples, std::uint64_t seed);

}  // namespace mitiknit
