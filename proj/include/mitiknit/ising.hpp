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
#include "mitiknit/sim.hpp"

namespace mitiknit {

/// Periodic transverse-field Ising chain
///   H = -sum_i J_i Z_i Z_{i+1} - h sum_i X_i,
/// bond i couples spins i and (i + 1) mod N.
struct IsingInstance {
  int num_spins = 0;
  Eigen::VectorXd couplings;
  double field = 0.5;
};

/// Couplings i.i.d. uniform on [-1, 1]; N must be even and in [2, 14].
IsingInstance random_instance(int num_spins, std::uint64_t seed, double field = 0.5);

nlohmann::json to_json(const IsingInstance& instance);
IsingInstance instance_from_json(const nlohmann::json& j);

/// Qubits joined by bond i.
inline std::array<int, 2> bond_qubits(int num_spins, int bond) {
  return {bond, (bond + 1) % num_spins};
}

/// The 2N observables in canonical order: Z_i Z_{i+1} for every bond i,
/// then X_i for every spin i.
std::vector<PauliString> ising_observables(int num_spins);

/// The 2N canonical expectation values of a state.
Eigen::VectorXd ising_expectations(const PureState& state);
Eigen::VectorXd ising_expectations(const DensityState& state);

/// E = -sum_i J_i zz_i - h sum_i x_i. `values` holds zz then x (length 2N).
double energy_from_expectations(const IsingInstance& instance, std::span<const double> zz,
                                std::span<const double> x);
double energy_from_expectations(const IsingInstance& instance, const Eigen::VectorXd& values);

/// Smallest Hamiltonian eigenvalue: dense diagonalization up to 12 spins,
/// Lanczos above (at most 14 spins).
double exact_ground_energy(const IsingInstance& instance);

/// H v for the chain Hamiltonian, matrix-free.
Eigen::VectorXd apply_hamiltonian(const IsingInstance& instance, const Eigen::VectorXd& v);

// --- Ansatz parameters ------------------------------------------------------

enum class ParamKind { ZZ, X };

inline constexpr std::string_view kLayoutVersion = "layer-major-zz-x/v1";

/// Flat index of parameter (layer, kind, site): layer-major, the N bond
/// angles of a layer first, then its N field angles.
inline int param_index(int num_spins, int layer, ParamKind kind, int site) {
  return layer * 2 * num_spins + (kind == ParamKind::X ? num_spins : 0) + site;
}

struct AnsatzParams {
  int num_spins = 0;
  int layers = 0;
  Eigen::VectorXd theta;

  static AnsatzParams zeros(int num_spins, int layers);
  std::size_t size() const { return static_cast<std::size_t>(theta.size()); }
  double& at(int layer, ParamKind kind, int site) { return theta(param_index(num_spins, layer, kind, site)); }
  double at(int layer, ParamKind kind, int site) const { return theta(param_index(num_spins, layer, kind, site)); }
};

nlohmann::json to_json(const AnsatzParams& params);
AnsatzParams params_from_json(const nlohmann::json& j);

/// Bond application order inside a layer: even bonds, odd bonds, then the
/// periodic bond (N-1, 0).
std::vector<int> bond_order(int num_spins);

/// Cut location of the two-patch split. Patches are the two arcs of the ring
/// separated by bonds (q - 1) and (q - 1 + N/2) mod N, q in [1, N].
struct PatchSpec {
  int cut_site = 1;

  std::array<int, 2> cut_bonds(int num_spins) const;
  /// Qubits of patch 0 and 1 in arc order; patch 0 starts at qubit q mod N.
  std::array<std::vector<int>, 2> patches(int num_spins) const;
  void validate(int num_spins) const;
};

/// H on every qubit, then `layers` repetitions of RZZ on every bond (in
/// bond_order) followed by RX on every qubit.
Circuit build_ansatz(const IsingInstance& instance, int layers, const AnsatzParams& params);

/// build_ansatz without the RZZ gates on the two cut bonds.
Circuit patch_circuit(const IsingInstance& instance, int layers, const AnsatzParams& params,
                      const PatchSpec& patch);

}  // namespace mitiknit
