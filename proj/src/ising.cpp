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

#include "mitiknit/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "mitiknit/rng.hpp"

namespace mitiknit {

namespace {

void check_even_size(int n) {
  if (n < 2 || n > 14) throw Error("number of spins must be in [2, 14]");
  if (n % 2 != 0) throw Error("number of spins must be even");
}

Eigen::VectorXd diagonal_energies(const IsingInstance& inst) {
  const int n = inst.num_spins;
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::VectorXd diag(static_cast<Eigen::Index>(dim));
  for (std::uint64_t s = 0; s < dim; ++s) {
    double e = 0.0;
    for (int b = 0; b < n; ++b) {
      const auto [i, j] = bond_qubits(n, b);
      const bool same = ((s >> i) & 1) == ((s >> j) & 1);
      e -= inst.couplings(b) * (same ? 1.0 : -1.0);
    }
    diag(static_cast<Eigen::Index>(s)) = e;
  }
  return diag;
}

double lanczos_ground_energy(const IsingInstance& inst) {
  const Eigen::Index dim = Eigen::Index{1} << inst.num_spins;
  const int max_iter = static_cast<int>(std::min<Eigen::Index>(dim, 300));
  Rng rng = make_rng(0x1a2c05ULL);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
  v.normalize();

  std::vector<Eigen::VectorXd> basis{v};
  std::vector<double> alpha, beta;
  double previous = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    Eigen::VectorXd w = apply_hamiltonian(inst, basis.back());
    alpha.push_back(basis.back().dot(w));
    // Full reorthogonalization (twice) keeps the Krylov basis orthonormal.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) w -= b.dot(w) * b;
    }
    const double norm = w.norm();

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      t(i, i) = alpha[i];
      if (i < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    const double ritz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t, Eigen::EigenvaluesOnly)
                            .eigenvalues()(0);
    if ((k > 10 && std::abs(ritz - previous) < 1e-13) || norm < 1e-12) return ritz;
    previous = ritz;
    beta.push_back(norm);
    basis.push_back(w / norm);
  }
  return previous;
}

}  // namespace

IsingInstance random_instance(int num_spins, std::uint64_t seed, double field) {
  check_even_size(num_spins);
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> coupling(-1.0, 1.0);
  IsingInstance inst{num_spins, Eigen::VectorXd(num_spins), field};
  for (int i = 0; i < num_spins; ++i) inst.couplings(i) = coupling(rng);
  return inst;
}

nlohmann::json to_json(const IsingInstance& instance) {
  std::vector<double> j(instance.couplings.data(), instance.couplings.data() + instance.couplings.size());
  return {{"N", instance.num_spins}, {"J", j}, {"h", instance.field}};
}

IsingInstance instance_from_json(const nlohmann::json& j) {
  IsingInstance inst;
  inst.num_spins = j.at("N").get<int>();
  check_even_size(inst.num_spins);
  const auto couplings = j.at("J").get<std::vector<double>>();
  if (static_cast<int>(couplings.size()) != inst.num_spins) throw Error("instance J length must equal N");
  inst.couplings = Eigen::Map<const Eigen::VectorXd>(couplings.data(), inst.num_spins);
  inst.field = j.value("h", 0.5);
  return inst;
}

std::vector<PauliString> ising_observables(int num_spins) {
  std::vector<PauliString> obs;
  obs.reserve(2 * static_cast<std::size_t>(num_spins));
  for (int b = 0; b < num_spins; ++b) {
    const auto [i, j] = bond_qubits(num_spins, b);
    const std::uint64_t z = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
    obs.emplace_back(num_spins, 0, z);
  }
  for (int i = 0; i < num_spins; ++i) obs.push_back(PauliString::single(num_spins, i, 'X'));
  return obs;
}

Eigen::VectorXd ising_expectations(const PureState& state) {
  const int n = state.width;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
  const auto& a = state.amplitudes;
  for (Eigen::Index s = 0; s < a.size(); ++s) {
    const double p = std::norm(a(s));
    const auto u = static_cast<std::uint64_t>(s);
    for (int b = 0; b < n; ++b) {
      const auto [i, j] = bond_qubits(n, b);
      out(b) += (((u >> i) ^ (u >> j)) & 1) ? -p : p;
    }
    for (int i = 0; i < n; ++i) {
      if (!((u >> i) & 1)) out(n + i) += 2.0 * (std::conj(a(s)) * a(s | (Eigen::Index{1} << i))).real();
    }
  }
  return out;
}

Eigen::VectorXd ising_expectations(const DensityState& state) {
  const int n = state.width;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
  const auto& m = state.matrix;
  for (Eigen::Index s = 0; s < m.rows(); ++s) {
    const double p = m(s, s).real();
    const auto u = static_cast<std::uint64_t>(s);
    for (int b = 0; b < n; ++b) {
      const auto [i, j] = bond_qubits(n, b);
      out(b) += (((u >> i) ^ (u >> j)) & 1) ? -p : p;
    }
    for (int i = 0; i < n; ++i) {
      if (!((u >> i) & 1)) out(n + i) += 2.0 * m(s, s | (Eigen::Index{1} << i)).real();
    }
  }
  return out;
}

double energy_from_expectations(const IsingInstance& instance, std::span<const double> zz,
                                std::span<const double> x) {
  const auto n = static_cast<std::size_t>(instance.num_spins);
  if (zz.size() != n || x.size() != n) throw Error("expectation vectors must have length N");
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e -= instance.couplings(static_cast<Eigen::Index>(i)) * zz[i];
    e -= instance.field * x[i];
  }
  return e;
}

double energy_from_expectations(const IsingInstance& instance, const Eigen::VectorXd& values) {
  const auto n = static_cast<std::size_t>(instance.num_spins);
  if (static_cast<std::size_t>(values.size()) != 2 * n) throw Error("expectation vector must have length 2N");
  return energy_from_expectations(instance, {values.data(), n}, {values.data() + n, n});
}

Eigen::VectorXd apply_hamiltonian(const IsingInstance& instance, const Eigen::VectorXd& v) {
  const int n = instance.num_spins;
  const Eigen::VectorXd diag = diagonal_energies(instance);
  Eigen::VectorXd out = diag.cwiseProduct(v);
  for (Eigen::Index s = 0; s < v.size(); ++s) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += v(s ^ (Eigen::Index{1} << i));
    out(s) -= instance.field * acc;
  }
  return out;
}

double exact_ground_energy(const IsingInstance& instance) {
  const int n = instance.num_spins;
  if (n < 1 || n > 14) throw Error("exact_ground_energy supports at most 14 spins");
  if (n > 12) return lanczos_ground_energy(instance);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  h.diagonal() = diagonal_energies(instance);
  for (Eigen::Index s = 0; s < dim; ++s) {
    for (int i = 0; i < n; ++i) h(s ^ (Eigen::Index{1} << i), s) -= instance.field;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

AnsatzParams AnsatzParams::zeros(int num_spins, int layers) {
  if (num_spins < 1 || layers < 1) throw Error("ansatz needs at least one spin and one layer");
  return {num_spins, layers, Eigen::VectorXd::Zero(2 * num_spins * layers)};
}

nlohmann::json to_json(const AnsatzParams& params) {
  std::vector<double> t(params.theta.data(), params.theta.data() + params.theta.size());
  return {{"layout", std::string(kLayoutVersion)},
          {"N", params.num_spins},
          {"P", params.layers},
          {"theta", t}};
}

AnsatzParams params_from_json(const nlohmann::json& j) {
  if (j.value("layout", std::string(kLayoutVersion)) != kLayoutVersion) {
    throw Error("unsupported parameter layout '" + j.at("layout").get<std::string>() + "'");
  }
  AnsatzParams p;
  p.num_spins = j.at("N").get<int>();
  p.layers = j.at("P").get<int>();
  const auto t = j.at("theta").get<std::vector<double>>();
  if (static_cast<int>(t.size()) != 2 * p.num_spins * p.layers) throw Error("theta length must be 2*N*P");
  p.theta = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  return p;
}

std::vector<int> bond_order(int num_spins) {
  std::vector<int> order;
  for (int b = 0; b < num_spins - 1; b += 2) order.push_back(b);
  for (int b = 1; b < num_spins - 1; b += 2) order.push_back(b);
  if (num_spins % 2 == 0) order.push_back(num_spins - 1);
  return order;
}

std::array<int, 2> PatchSpec::cut_bonds(int num_spins) const {
  validate(num_spins);
  return {cut_site - 1, (cut_site - 1 + num_spins / 2) % num_spins};
}

std::array<std::vector<int>, 2> PatchSpec::patches(int num_spins) const {
  validate(num_spins);
  std::array<std::vector<int>, 2> out;
  for (int k = 0; k < num_spins; ++k) {
    out[k < num_spins / 2 ? 0 : 1].push_back((cut_site + k) % num_spins);
  }
  return out;
}

void PatchSpec::validate(int num_spins) const {
  if (num_spins < 2 || num_spins % 2 != 0) throw Error("patch split needs an even number of spins");
  if (cut_site < 1 || cut_site > num_spins) throw Error("cut site must lie in [1, N]");
}

namespace {

Circuit ansatz_impl(const IsingInstance& inst, int layers, const AnsatzParams& params,
                    const std::array<int, 2>* skip_bonds) {
  const int n = inst.num_spins;
  if (params.num_spins != n || params.layers != layers ||
      params.theta.size() != 2 * static_cast<Eigen::Index>(n) * layers) {
    throw Error("ansatz parameter vector must have length 2*N*P");
  }
  const auto order = bond_order(n);
  Circuit c(n);
  for (int q = 0; q < n; ++q) c.add(gates::h(q));
  for (int p = 0; p < layers; ++p) {
    for (int b : order) {
      if (skip_bonds && (b == (*skip_bonds)[0] || b == (*skip_bonds)[1])) continue;
      const auto [i, j] = bond_qubits(n, b);
      c.add(gates::rzz(i, j, params.at(p, ParamKind::ZZ, b)));
    }
    for (int q = 0; q < n; ++q) c.add(gates::rx(q, params.at(p, ParamKind::X, q)));
  }
  return c;
}

}  // namespace

Circuit build_ansatz(const IsingInstance& instance, int layers, const AnsatzParams& params) {
  return ansatz_impl(instance, layers, params, nullptr);
}

Circuit patch_circuit(const IsingInstance& instance, int layers, const AnsatzParams& params,
                      const PatchSpec& patch) {
  const auto cut = patch.cut_bonds(instance.num_spins);
  return ansatz_impl(instance, layers, params, &cut);
}

}  // namespace mitiknit
