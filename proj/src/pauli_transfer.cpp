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

#include "pauli_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "mitiknit/sim.hpp"

namespace mitiknit::ptm {

namespace {

constexpr double kDropTolerance = 1e-15;

Eigen::Matrix4cd two_qubit_pauli(int l) {
  const auto& p = local_paulis();
  const Eigen::Matrix2cd& pa = p[l & 3];
  const Eigen::Matrix2cd& pb = p[l >> 2];
  Eigen::Matrix4cd m;
  for (int rb = 0; rb < 2; ++rb)
    for (int ra = 0; ra < 2; ++ra)
      for (int cb = 0; cb < 2; ++cb)
        for (int ca = 0; ca < 2; ++ca) m(ra + 2 * rb, ca + 2 * cb) = pb(rb, cb) * pa(ra, ca);
  return m;
}

Eigen::Matrix4cd cnot_unitary(bool control_second) {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  for (int s = 0; s < 4; ++s) {
    const int a = s & 1, b = s >> 1;
    int t = s;
    if (!control_second && a) t = s ^ 2;
    if (control_second && b) t = s ^ 1;
    u(t, s) = 1.0;
  }
  return u;
}

// Inserts a zero bit at each (ascending) position.
inline std::size_t spread(std::size_t k, std::span<const int> positions) {
  for (int p : positions) {
    const std::size_t low = k & ((std::size_t{1} << p) - 1);
    k = ((k >> p) << (p + 1)) | low;
  }
  return k;
}

}  // namespace

const std::array<Eigen::Matrix2cd, 4>& local_paulis() {
  static const std::array<Eigen::Matrix2cd, 4> p = [] {
    std::array<Eigen::Matrix2cd, 4> out;
    const Complex i{0.0, 1.0};
    out[0] << 1, 0, 0, 1;
    out[1] << 0, 1, 1, 0;
    out[2] << 1, 0, 0, -1;
    out[3] << 0, -i, i, 0;
    return out;
  }();
  return p;
}

Ptm4 from_unitary(const Eigen::Matrix2cd& u) {
  const auto& p = local_paulis();
  Ptm4 r;
  for (int j = 0; j < 4; ++j) {
    const Eigen::Matrix2cd image = u * p[j] * u.adjoint();
    for (int i = 0; i < 4; ++i) r(i, j) = 0.5 * (p[i] * image).trace().real();
  }
  return r;
}

Ptm16 from_unitary(const Eigen::Matrix4cd& u) {
  std::array<Eigen::Matrix4cd, 16> p;
  for (int l = 0; l < 16; ++l) p[l] = two_qubit_pauli(l);
  Ptm16 r;
  for (int j = 0; j < 16; ++j) {
    const Eigen::Matrix4cd image = u * p[j] * u.adjoint();
    for (int i = 0; i < 16; ++i) r(i, j) = 0.25 * (p[i] * image).trace().real();
  }
  return r;
}

Ptm4 depolarizing(double rate) {
  Ptm4 d = Ptm4::Identity() * (1.0 - rate);
  d(0, 0) = 1.0;
  return d;
}

Ptm4 single_qubit_gate(const Gate& gate) {
  Ptm4 r = Ptm4::Zero();
  r(0, 0) = 1.0;
  const double c = std::cos(gate.angle);
  const double s = std::sin(gate.angle);
  switch (gate.kind) {
    case GateKind::H:
      r(2, 1) = 1.0;  // X -> Z
      r(1, 2) = 1.0;  // Z -> X
      r(3, 3) = -1.0;
      break;
    case GateKind::X:
      r(1, 1) = 1.0;
      r(2, 2) = -1.0;
      r(3, 3) = -1.0;
      break;
    case GateKind::Z:
      r(1, 1) = -1.0;
      r(2, 2) = 1.0;
      r(3, 3) = -1.0;
      break;
    case GateKind::RX:
      // Z -> cos Z - sin Y, Y -> cos Y + sin Z.
      r(1, 1) = 1.0;
      r(2, 2) = c;
      r(3, 2) = -s;
      r(3, 3) = c;
      r(2, 3) = s;
      break;
    case GateKind::RZ:
      // X -> cos X + sin Y, Y -> cos Y - sin X.
      r(2, 2) = 1.0;
      r(1, 1) = c;
      r(3, 1) = s;
      r(3, 3) = c;
      r(1, 3) = -s;
      break;
    default:
      throw Error("no single-qubit transfer matrix for gate " + std::string(to_string(gate.kind)));
  }
  return r;
}

const Ptm16& cnot(bool control_second) {
  static const Ptm16 first = from_unitary(cnot_unitary(false));
  static const Ptm16 second = from_unitary(cnot_unitary(true));
  return control_second ? second : first;
}

Ptm16 embed_first(const Ptm4& m) {
  Ptm16 out = Ptm16::Zero();
  for (int lb = 0; lb < 4; ++lb)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out(i + 4 * lb, j + 4 * lb) = m(i, j);
  return out;
}

Ptm16 embed_second(const Ptm4& m) {
  Ptm16 out = Ptm16::Zero();
  for (int la = 0; la < 4; ++la)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out(la + 4 * i, la + 4 * j) = m(i, j);
  return out;
}

Ptm16 swap_qubits(const Ptm16& m) {
  auto sw = [](int l) { return (l >> 2) | ((l & 3) << 2); };
  Ptm16 out;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) out(sw(i), sw(j)) = m(i, j);
  return out;
}

namespace {

template <int Dim>
Block sparsify(int qa, int qb, const Eigen::Matrix<double, Dim, Dim>& m) {
  Block b;
  b.qa = qa;
  b.qb = qb;
  b.row_start.push_back(0);
  for (int i = 0; i < Dim; ++i) {
    for (int j = 0; j < Dim; ++j) {
      if (std::abs(m(i, j)) > kDropTolerance) {
        b.col.push_back(j);
        b.val.push_back(m(i, j));
      }
    }
    b.row_start.push_back(static_cast<int>(b.col.size()));
  }
  return b;
}

}  // namespace

Block make_block(int qa, const Ptm4& m) { return sparsify<4>(qa, -1, m); }
Block make_block(int qa, int qb, const Ptm16& m) { return sparsify<16>(qa, qb, m); }

namespace {

constexpr int kLanes = 8;

// Processes kLanes groups at a time: gather the local coefficients of each
// group into lane-major buffers, apply the sparse block, scatter back.
template <int Local>
void apply_lanes(std::span<double> coeffs, const Block& block, std::span<const int> pos,
                 const std::array<std::size_t, 16>& offset) {
  const std::size_t groups = coeffs.size() >> pos.size();
  const int nnz = static_cast<int>(block.val.size());
  std::array<int, 256> row{};
  for (int i = 0; i < Local; ++i) {
    for (int e = block.row_start[i]; e < block.row_start[i + 1]; ++e) row[e] = i;
  }
  double* data = coeffs.data();
  const bool contiguous = pos[0] >= 3;
  alignas(64) double in[Local][kLanes];
  alignas(64) double out[Local][kLanes];
  std::size_t base[kLanes];
  for (std::size_t k = 0; k < groups; k += kLanes) {
    if (contiguous) {
      const std::size_t b0 = spread(k, pos);
      for (int j = 0; j < kLanes; ++j) base[j] = b0 + j;
    } else {
      for (int j = 0; j < kLanes; ++j) base[j] = spread(k + j, pos);
    }
    for (int l = 0; l < Local; ++l) {
      for (int j = 0; j < kLanes; ++j) in[l][j] = data[base[j] + offset[l]];
    }
    for (int i = 0; i < Local; ++i) {
      for (int j = 0; j < kLanes; ++j) out[i][j] = 0.0;
    }
    for (int e = 0; e < nnz; ++e) {
      const double v = block.val[e];
      const double* src = in[block.col[e]];
      double* dst = out[row[e]];
      for (int j = 0; j < kLanes; ++j) dst[j] += v * src[j];
    }
    for (int i = 0; i < Local; ++i) {
      for (int j = 0; j < kLanes; ++j) data[base[j] + offset[i]] = out[i][j];
    }
  }
}

}  // namespace

void apply_block(std::span<double> coeffs, int width, const Block& block) {
  const bool two = block.qb >= 0;
  const int local = two ? 16 : 4;
  std::array<int, 4> positions{};
  std::array<std::size_t, 16> offset{};
  const int n = width;
  if (two) {
    positions = {block.qa, block.qb, n + block.qa, n + block.qb};
  } else {
    positions = {block.qa, n + block.qa, 0, 0};
  }
  for (int l = 0; l < local; ++l) {
    const int la = l & 3, lb = l >> 2;
    std::size_t off = 0;
    if (la & 1) off |= std::size_t{1} << block.qa;
    if (la & 2) off |= std::size_t{1} << (n + block.qa);
    if (lb & 1) off |= std::size_t{1} << block.qb;
    if (lb & 2) off |= std::size_t{1} << (n + block.qb);
    offset[l] = off;
  }
  const int nbits = two ? 4 : 2;
  std::sort(positions.begin(), positions.begin() + nbits);
  const std::span<const int> pos(positions.data(), static_cast<std::size_t>(nbits));
  const std::size_t groups = coeffs.size() >> nbits;
  if (groups >= static_cast<std::size_t>(kLanes)) {
    if (two) {
      apply_lanes<16>(coeffs, block, pos, offset);
    } else {
      apply_lanes<4>(coeffs, block, pos, offset);
    }
    return;
  }
  std::array<double, 16> in{};
  for (std::size_t k = 0; k < groups; ++k) {
    const std::size_t base = spread(k, pos);
    for (int l = 0; l < local; ++l) in[l] = coeffs[base + offset[l]];
    for (int i = 0; i < local; ++i) {
      double acc = 0.0;
      for (int e = block.row_start[i]; e < block.row_start[i + 1]; ++e) acc += block.val[e] * in[block.col[e]];
      coeffs[base + offset[i]] = acc;
    }
  }
}

std::vector<Block> compile(const Circuit& transpiled, const NoiseProfile& profile) {
  const int n = transpiled.width();
  std::vector<Block> program;
  int pa = -1, pb = -1;
  Ptm4 m1;
  Ptm16 m2;

  auto flush = [&] {
    if (pa < 0) return;
    program.push_back(pb < 0 ? make_block(pa, m1) : make_block(pa, pb, m2));
    pa = pb = -1;
  };

  for (const auto& g : transpiled.gates()) {
    if (g.kind == GateKind::RZZ) throw Error("noisy engine expects a transpiled circuit");
    if (is_projector(g.kind)) throw Error("noisy engine does not support projector gates");
    if (g.kind == GateKind::CNOT) {
      const int c = g.qubits[0], t = g.qubits[1];
      const double rate = profile.two_qubit_rate(c, t, n);
      const Ptm16 d = embed_first(depolarizing(rate)) * embed_second(depolarizing(rate));
      const Ptm16 op = d * cnot(false);  // local order (c, t)
      if (pa >= 0 && pb < 0 && (pa == c || pa == t)) {
        const Ptm16 prev = pa == c ? embed_first(m1) : embed_second(m1);
        m2 = op * prev;
        pa = c;
        pb = t;
      } else if (pa >= 0 && pb >= 0 && ((pa == c && pb == t) || (pa == t && pb == c))) {
        m2 = (pa == c ? op : swap_qubits(op)) * m2;
      } else {
        flush();
        pa = c;
        pb = t;
        m2 = op;
      }
      continue;
    }
    const int q = g.qubits[0];
    const Ptm4 op = depolarizing(profile.single_qubit_rate(q)) * single_qubit_gate(g);
    if (pa < 0) {
      pa = q;
      m1 = op;
    } else if (pb < 0) {
      if (q == pa) {
        m1 = op * m1;
      } else {
        m2 = embed_second(op) * embed_first(m1);
        pb = q;
      }
    } else if (q == pa) {
      m2 = embed_first(op) * m2;
    } else if (q == pb) {
      m2 = embed_second(op) * m2;
    } else {
      flush();
      pa = q;
      m1 = op;
    }
  }
  flush();
  return program;
}

}  // namespace mitiknit::ptm
