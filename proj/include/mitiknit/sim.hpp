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

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mitiknit/circuit.hpp"

namespace mitiknit {

// Basis-state index convention: qubit q is bit q of the index (qubit 0 is
// the least-significant bit). Density matrices are stored column-major, so
// entry (r, c) lives at r + c * 2^N; the row copy of qubit q is bit q and the
// column copy is bit N + q of the flat index.

using Complex = std::complex<double>;

/// Pauli string observable stored as X and Z bit masks (Y sets both).
class PauliString {
 public:
  /// `labels[q]` is the Pauli on qubit q, one of I, X, Y, Z.
  explicit PauliString(std::string_view labels);
  PauliString(int width, std::uint64_t x_mask, std::uint64_t z_mask);

  static PauliString single(int width, int qubit, char label);
  static PauliString pair(int width, int a, char label_a, int b, char label_b);

  int width() const { return width_; }
  std::uint64_t x_mask() const { return x_mask_; }
  std::uint64_t z_mask() const { return z_mask_; }
  char label(int qubit) const;
  std::string to_string() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  int width_;
  std::uint64_t x_mask_;
  std::uint64_t z_mask_;
};

using Observable = PauliString;

struct PureState {
  int width = 0;
  Eigen::VectorXcd amplitudes;

  double norm_squared() const { return amplitudes.squaredNorm(); }
};

/// Density operator. `is_signed` marks operators produced by signed
/// (non-CPTP) maps; those may have trace != 1 and negative eigenvalues.
struct DensityState {
  int width = 0;
  Eigen::MatrixXcd matrix;
  bool is_signed = false;

  double trace() const { return matrix.trace().real(); }
};

PureState zero_state(int width);
DensityState to_density(const PureState& state);

/// Applies one gate in place (projectors act as unnormalized projections).
void apply_gate(PureState& state, const Gate& gate);
void apply_gate(DensityState& state, const Gate& gate);

/// Exact statevector U|0...0>. Rejects circuits with projectors.
PureState run_pure(const Circuit& circuit);

/// A signed, weighted pure-state branch; the branch represents the operator
/// weight * |state><state| (state unnormalized in general).
struct Branch {
  double weight = 1.0;
  PureState state;
};

/// Applies the circuit (projectors included) to every branch in order; the
/// result has one branch per input branch, in input order.
std::vector<Branch> run_pure_branching(const Circuit& circuit,
                                       std::vector<Branch> branches);
/// Same, starting from the single branch (+1, |0...0>).
std::vector<Branch> run_pure_branching(const Circuit& circuit);

/// Realizes rho -> P0 rho P0 - P1 rho P1 on `qubit` as two branches
/// (+w, P0|psi>) and (-w, P1|psi>), in that order.
std::array<Branch, 2> split_signed(const Branch& branch, int qubit);

/// Single-qubit depolarizing map rho -> (1 - rate) rho + rate * I/2 (x) tr_q rho.
struct Depolarizing {
  int qubit = 0;
  double rate = 0.0;
};

/// A channel acting right after gate `after_gate` of the circuit.
struct ChannelAttachment {
  std::size_t after_gate = 0;
  Depolarizing channel;
};

DensityState run_density(const Circuit& circuit, std::span<const ChannelAttachment> channels = {});

void apply_depolarizing(DensityState& state, int qubit, double rate);
/// rho -> P0 rho P0 - P1 rho P1 on `qubit`; marks the state signed.
void apply_signed_measure(DensityState& state, int qubit);

double expectation(const PureState& state, const PauliString& obs);
double expectation(const DensityState& state, const PauliString& obs);
/// Sum over branches of weight * <psi|obs|psi>.
double expectation(std::span<const Branch> branches, const PauliString& obs);

/// Diagonal of a density operator in the computational basis.
Eigen::VectorXd basis_probabilities(const DensityState& state);

}  // namespace mitiknit
