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

// Pauli transfer matrices (PTMs) and the fused block program used by the
// noisy engine. Local Pauli index of one qubit is x + 2z (I, X, Z, Y); a
// two-qubit block on (a, b) uses la + 4 lb.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mitiknit/circuit.hpp"
#include "mitiknit/noise.hpp"

namespace mitiknit::ptm {

using Ptm4 = Eigen::Matrix4d;
using Ptm16 = Eigen::Matrix<double, 16, 16>;

/// I, X, Z, Y in local-index order.
const std::array<Eigen::Matrix2cd, 4>& local_paulis();

Ptm4 from_unitary(const Eigen::Matrix2cd& u);
Ptm16 from_unitary(const Eigen::Matrix4cd& u);

Ptm4 depolarizing(double rate);

/// PTM of a one-qubit gate (H, RX, RZ, X, Z).
Ptm4 single_qubit_gate(const Gate& gate);
/// PTM of CNOT with the control on local qubit 0 (or 1 if `control_second`).
const Ptm16& cnot(bool control_second);

Ptm16 embed_first(const Ptm4& m);
Ptm16 embed_second(const Ptm4& m);
Ptm16 swap_qubits(const Ptm16& m);

/// Sparse block ready for application to a Pauli vector.
struct Block {
  int qa = -1;
  int qb = -1;  // -1 for one-qubit blocks
  std::vector<int> row_start;
  std::vector<int> col;
  std::vector<double> val;
};

Block make_block(int qa, const Ptm4& m);
Block make_block(int qa, int qb, const Ptm16& m);

void apply_block(std::span<double> coeffs, int width, const Block& block);

/// Transpiled, noise-annotated and fused program for one circuit.
std::vector<Block> compile(const Circuit& transpiled, const NoiseProfile& profile);

}  // namespace mitiknit::ptm
