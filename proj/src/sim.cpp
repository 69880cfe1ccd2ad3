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

#include "mitiknit/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "kernels.hpp"

namespace mitiknit {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Matrix2cd single_qubit_matrix(const Gate& g) {
  Eigen::Matrix2cd m;
  const double c = std::cos(0.5 * g.angle);
  const double s = std::sin(0.5 * g.angle);
  switch (g.kind) {
    case GateKind::H: {
      const double r = std::numbers::sqrt2 / 2.0;
      m << r, r, r, -r;
      break;
    }
    case GateKind::RX:
      m << c, -kI * s, -kI * s, c;
      break;
    default:
      throw Error("no dense single-qubit matrix for gate " + std::string(to_string(g.kind)));
  }
  return m;
}

void check_width(int a, int b) {
  if (a != b) throw Error("width mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

std::span<Complex> flat(Eigen::VectorXcd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<Complex> flat(Eigen::MatrixXcd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

Complex pauli_phase(std::uint64_t index, std::uint64_t z_mask, int num_y) {
  static constexpr Complex kYPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex base = kYPowers[num_y & 3];
  return (std::popcount(index & z_mask) & 1) ? -base : base;
}

}  // namespace

PauliString::PauliString(std::string_view labels)
    : width_(static_cast<int>(labels.size())), x_mask_(0), z_mask_(0) {
  if (width_ < 1 || width_ > 63) throw Error("Pauli string width out of range");
  for (int q = 0; q < width_; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (labels[q]) {
      case 'I': break;
      case 'X': x_mask_ |= bit; break;
      case 'Y': x_mask_ |= bit; z_mask_ |= bit; break;
      case 'Z': z_mask_ |= bit; break;
      default: throw Error("invalid Pauli label '" + std::string(1, labels[q]) + "'");
    }
  }
  if ((x_mask_ | z_mask_) == 0) throw Error("observable must contain a non-identity label");
}

PauliString::PauliString(int width, std::uint64_t x_mask, std::uint64_t z_mask)
    : width_(width), x_mask_(x_mask), z_mask_(z_mask) {
  if (width < 1 || width > 63) throw Error("Pauli string width out of range");
  if (((x_mask | z_mask) >> width) != 0) throw Error("Pauli mask exceeds width");
  if ((x_mask | z_mask) == 0) throw Error("observable must contain a non-identity label");
}

PauliString PauliString::single(int width, int qubit, char label) {
  std::string s(static_cast<std::size_t>(width), 'I');
  s.at(static_cast<std::size_t>(qubit)) = label;
  return PauliString(s);
}

PauliString PauliString::pair(int width, int a, char label_a, int b, char label_b) {
  std::string s(static_cast<std::size_t>(width), 'I');
  s.at(static_cast<std::size_t>(a)) = label_a;
  s.at(static_cast<std::size_t>(b)) = label_b;
  return PauliString(s);
}

char PauliString::label(int qubit) const {
  const bool x = (x_mask_ >> qubit) & 1;
  const bool z = (z_mask_ >> qubit) & 1;
  return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
}

std::string PauliString::to_string() const {
  std::string s;
  for (int q = 0; q < width_; ++q) s.push_back(label(q));
  return s;
}

PureState zero_state(int width) {
  if (width < 1 || width > 30) throw Error("state width out of range");
  PureState s{width, Eigen::VectorXcd::Zero(Eigen::Index{1} << width)};
  s.amplitudes(0) = 1.0;
  return s;
}

DensityState to_density(const PureState& state) {
  return {state.width, state.amplitudes * state.amplitudes.adjoint(), false};
}

void apply_gate(PureState& state, const Gate& g) {
  auto d = flat(state.amplitudes);
  const int q = g.qubits[0];
  switch (g.kind) {
    case GateKind::H:
    case GateKind::RX:
      kernels::apply_matrix(d, q, single_qubit_matrix(g));
      break;
    case GateKind::RZ:
      kernels::apply_diagonal(d, q, std::polar(1.0, -0.5 * g.angle), std::polar(1.0, 0.5 * g.angle));
      break;
    case GateKind::Z:
      kernels::apply_diagonal(d, q, 1.0, -1.0);
      break;
    case GateKind::X:
      kernels::apply_flip(d, q);
      break;
    case GateKind::CNOT:
      kernels::apply_controlled_flip(d, q, g.qubits[1]);
      break;
    case GateKind::RZZ: {
      const Complex same = std::polar(1.0, -0.5 * g.angle);
      const Complex diff = std::polar(1.0, 0.5 * g.angle);
      const Complex phase[4] = {same, diff, diff, same};
      kernels::apply_diagonal2(d, q, g.qubits[1], phase);
      break;
    }
    case GateKind::ProjPlus:
      kernels::apply_projector(d, q, false);
      break;
    case GateKind::ProjMinus:
      kernels::apply_projector(d, q, true);
      break;
  }
}

void apply_gate(DensityState& state, const Gate& g) {
  auto d = flat(state.matrix);
  const int n = state.width;
  const int q = g.qubits[0];
  switch (g.kind) {
    case GateKind::H:
    case GateKind::RX: {
      const Eigen::Matrix2cd u = single_qubit_matrix(g);
      kernels::apply_matrix(d, q, u);
      kernels::apply_matrix(d, n + q, u.conjugate());
      break;
    }
    case GateKind::RZ: {
      // (row, col) = (0,1) picks up e^{-i t}, (1,0) picks up e^{+i t}.
      const Complex phase[4] = {1.0, std::polar(1.0, g.angle), std::polar(1.0, -g.angle), 1.0};
      kernels::apply_diagonal2(d, q, n + q, phase);
      break;
    }
    case GateKind::Z: {
      const Complex phase[4] = {1.0, -1.0, -1.0, 1.0};
      kernels::apply_diagonal2(d, q, n + q, phase);
      break;
    }
    case GateKind::X:
      kernels::apply_flip(d, q);
      kernels::apply_flip(d, n + q);
      break;
    case GateKind::CNOT:
      kernels::apply_controlled_flip(d, q, g.qubits[1]);
      kernels::apply_controlled_flip(d, n + q, n + g.qubits[1]);
      break;
    case GateKind::RZZ: {
      const int b = g.qubits[1];
      // Row phase e^{-i t/2 s_r}, column phase e^{+i t/2 s_c}, s = +1 when
      // the two qubits agree.
      const std::size_t ra = std::size_t{1} << q, rb = std::size_t{1} << b;
      const std::size_t ca = ra << n, cb = rb << n;
      const Complex rel = std::polar(1.0, g.angle);
      for (std::size_t i = 0; i < d.size(); ++i) {
        const bool row_same = !(i & ra) == !(i & rb);
        const bool col_same = !(i & ca) == !(i & cb);
        if (row_same != col_same) d[i] *= row_same ? std::conj(rel) : rel;
      }
      break;
    }
    case GateKind::ProjPlus:
      kernels::apply_projector(d, q, false);
      kernels::apply_projector(d, n + q, false);
      break;
    case GateKind::ProjMinus:
      kernels::apply_projector(d, q, true);
      kernels::apply_projector(d, n + q, true);
      break;
  }
}

PureState run_pure(const Circuit& circuit) {
  if (circuit.has_projectors()) throw Error("run_pure: circuit contains projector gates");
  PureState s = zero_state(circuit.width());
  for (const auto& g : circuit.gates()) apply_gate(s, g);
  return s;
}

std::vector<Branch> run_pure_branching(const Circuit& circuit, std::vector<Branch> branches) {
  for (auto& b : branches) {
    check_width(b.state.width, circuit.width());
    for (const auto& g : circuit.gates()) apply_gate(b.state, g);
  }
  return branches;
}

std::vector<Branch> run_pure_branching(const Circuit& circuit) {
  std::vector<Branch> init;
  init.push_back({1.0, zero_state(circuit.width())});
  return run_pure_branching(circuit, std::move(init));
}

std::array<Branch, 2> split_signed(const Branch& branch, int qubit) {
  std::array<Branch, 2> out{branch, branch};
  out[1].weight = -branch.weight;
  apply_gate(out[0].state, gates::proj_plus(qubit));
  apply_gate(out[1].state, gates::proj_minus(qubit));
  return out;
}

DensityState run_density(const Circuit& circuit, std::span<const ChannelAttachment> channels) {
  std::vector<ChannelAttachment> sorted(channels.begin(), channels.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.after_gate < b.after_gate; });
  for (const auto& c : sorted) {
    if (c.after_gate >= circuit.size()) throw Error("channel attached after a non-existent gate");
    if (c.channel.qubit < 0 || c.channel.qubit >= circuit.width()) {
      throw Error("channel qubit outside circuit width");
    }
    if (!(c.channel.rate >= 0.0 && c.channel.rate <= 1.0)) {
      throw Error("depolarizing rate must lie in [0, 1]");
    }
  }
  DensityState rho = to_density(zero_state(circuit.width()));
  rho.is_signed = circuit.has_projectors();
  std::size_t next = 0;
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    apply_gate(rho, circuit.gates()[i]);
    while (next < sorted.size() && sorted[next].after_gate == i) {
      apply_depolarizing(rho, sorted[next].channel.qubit, sorted[next].channel.rate);
      ++next;
    }
  }
  return rho;
}

void apply_depolarizing(DensityState& state, int qubit, double rate) {
  if (rate == 0.0) return;
  kernels::apply_depolarizing(flat(state.matrix), qubit, state.width + qubit, rate);
}

void apply_signed_measure(DensityState& state, int qubit) {
  auto d = flat(state.matrix);
  const Complex phase[4] = {1.0, 0.0, 0.0, -1.0};
  kernels::apply_diagonal2(d, qubit, state.width + qubit, phase);
  state.is_signed = true;
}

double expectation(const PureState& state, const PauliString& obs) {
  check_width(state.width, obs.width());
  const std::uint64_t x = obs.x_mask();
  const std::uint64_t z = obs.z_mask();
  const int ny = std::popcount(x & z);
  const auto& a = state.amplitudes;
  Complex sum = 0.0;
  for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(a.size()); ++j) {
    sum += std::conj(a(static_cast<Eigen::Index>(j ^ x))) * pauli_phase(j, z, ny) * a(static_cast<Eigen::Index>(j));
  }
  return sum.real();
}

double expectation(const DensityState& state, const PauliString& obs) {
  check_width(state.width, obs.width());
  const std::uint64_t x = obs.x_mask();
  const std::uint64_t z = obs.z_mask();
  const int ny = std::popcount(x & z);
  Complex sum = 0.0;
  const auto dim = static_cast<std::uint64_t>(state.matrix.rows());
  for (std::uint64_t j = 0; j < dim; ++j) {
    sum += pauli_phase(j, z, ny) *
           state.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j ^ x));
  }
  return sum.real();
}

double expectation(std::span<const Branch> branches, const PauliString& obs) {
  double sum = 0.0;
  for (const auto& b : branches) sum += b.weight * expectation(b.state, obs);
  return sum;
}

Eigen::VectorXd basis_probabilities(const DensityState& state) {
  return state.matrix.diagonal().real();
}

}  // namespace mitiknit
