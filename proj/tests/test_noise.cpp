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

#include "mitiknit/noise.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "mitiknit/ising.hpp"
#include "oracle.hpp"

using namespace mitiknit;

namespace {

// Reference: run the transpiled circuit through the complex density engine
// with explicit depolarizing attachments.
DensityState reference_noisy(const Circuit& circuit, const NoiseProfile& profile) {
  const Circuit t = transpile(circuit);
  std::vector<ChannelAttachment> ch;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Gate& g = t.gates()[i];
    if (g.arity() == 2) {
      const double r = profile.two_qubit_rate(g.qubits[0], g.qubits[1], circuit.width());
      ch.push_back({i, {g.qubits[0], r}});
      ch.push_back({i, {g.qubits[1], r}});
    } else {
      ch.push_back({i, {g.qubits[0], profile.single_qubit_rate(g.qubits[0])}});
    }
  }
  return run_density(t, ch);
}

NoiseProfile random_profile(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 0.2);
  NoiseProfile p;
  p.p1.clear();
  p.p2.clear();
  p.readout.clear();
  for (int q = 0; q < n; ++q) {
    p.p1.push_back(u(rng));
    p.p2.push_back(u(rng));
    p.readout.push_back({u(rng), u(rng)});
  }
  return p;
}

}  // namespace

TEST(profile, defaults_and_broadcast) {
  const NoiseProfile p = default_profile();
  EXPECT_DOUBLE_EQ(p.single_qubit_rate(3), 1e-3);
  EXPECT_DOUBLE_EQ(p.two_qubit_rate(2, 3, 6), 2.5e-2);
  EXPECT_DOUBLE_EQ(p.readout_for(5).p01, 3e-2);
  EXPECT_TRUE(noiseless_profile().is_noiseless());
  EXPECT_FALSE(p.is_noiseless());
}

TEST(profile, scaling) {
  const NoiseProfile p = scale_profile(default_profile(), 0.1);
  EXPECT_DOUBLE_EQ(p.single_qubit_rate(0), 1e-4);
  EXPECT_DOUBLE_EQ(p.two_qubit_rate(0, 1, 4), 2.5e-3);
  EXPECT_DOUBLE_EQ(p.readout_for(0).p10, 3e-3);
  EXPECT_TRUE(scale_profile(default_profile(), 0.0).is_noiseless());
  EXPECT_THROW(scale_profile(default_profile(), -0.1), Error);
  EXPECT_THROW(scale_profile(default_profile(), 1.5), Error);
}

TEST(profile, validation) {
  NoiseProfile p = default_profile();
  p.p1 = {1.2};
  EXPECT_THROW(p.validate(), Error);
  p = default_profile();
  p.readout = {{0.6, 0.5}};
  EXPECT_THROW(p.validate(), Error);
  p = default_profile();
  p.p2 = {0.1, 0.2, 0.3, 0.4};
  EXPECT_DOUBLE_EQ(p.two_qubit_rate(3, 0, 4), 0.4);
  EXPECT_THROW(p.two_qubit_rate(0, 2, 4), Error);
}

TEST(profile, json_and_file_round_trip) {
  std::mt19937_64 rng(3);
  const NoiseProfile p = random_profile(4, rng);
  const NoiseProfile q = profile_from_json(nlohmann::json::parse(to_json(p).dump()));
  EXPECT_EQ(p.p1, q.p1);
  EXPECT_EQ(p.p2, q.p2);
  const auto path = std::filesystem::temp_directory_path() / "mitiknit_profile_test.json";
  save_profile(p, path.string());
  const NoiseProfile r = load_profile(path.string());
  EXPECT_EQ(r.readout.size(), 4u);
  EXPECT_EQ(r.readout[2].p10, p.readout[2].p10);
  std::filesystem::remove(path);
  const NoiseProfile s = profile_from_json(nlohmann::json::parse(R"({"p1":0.01,"p2":0.02,"readout":{"p01":0.0,"p10":0.1}})"));
  EXPECT_DOUBLE_EQ(s.two_qubit_rate(4, 5, 6), 0.02);
  EXPECT_DOUBLE_EQ(s.readout_for(3).p10, 0.1);
}

TEST(pauli_engine, noiseless_matches_pure_state) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 6; ++n) {
    const Circuit c = oracle::random_circuit(n, 40, rng);
    const PauliVector v = run_noisy_pauli(c, noiseless_profile());
    const PureState s = run_pure(c);
    for (int k = 0; k < 10; ++k) {
      const PauliString p = oracle::random_pauli(n, rng);
      EXPECT_NEAR(v.expectation(p), expectation(s, p), 1e-11);
    }
  }
}

TEST(pauli_engine, matches_density_engine_with_channels) {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const Circuit c = oracle::random_circuit(n, 30, rng);
      NoiseProfile prof = random_profile(n, rng);
      prof.p2 = {prof.p2[0]};
      const DensityState a = run_noisy(c, prof);
      const DensityState b = reference_noisy(c, prof);
      EXPECT_LT((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 1e-11) << "n=" << n;
      EXPECT_NEAR(a.trace(), 1.0, 1e-12);
    }
  }
}

TEST(pauli_engine, per_bond_two_qubit_rates) {
  std::mt19937_64 rng(9);
  const IsingInstance inst = random_instance(4, 1);
  AnsatzParams p = AnsatzParams::zeros(4, 2);
  std::uniform_real_distribution<double> a(-1, 1);
  for (auto& t : p.theta) t = a(rng);
  const Circuit c = build_ansatz(inst, 2, p);
  NoiseProfile prof = random_profile(4, rng);
  const DensityState x = run_noisy(c, prof);
  const DensityState y = reference_noisy(c, prof);
  EXPECT_LT((x.matrix - y.matrix).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(pauli_engine, depolarizing_contracts_expectations) {
  std::mt19937_64 rng(13);
  const IsingInstance inst = random_instance(6, 4);
  AnsatzParams p = AnsatzParams::zeros(6, 3);
  std::uniform_real_distribution<double> a(-1, 1);
  for (auto& t : p.theta) t = a(rng);
  const Circuit c = build_ansatz(inst, 3, p);
  const Eigen::VectorXd ideal = ising_expectations(run_pure(c));
  const Eigen::VectorXd lo = ising_expectations(run_noisy(c, scale_profile(default_profile(), 0.1)));
  const Eigen::VectorXd hi = ising_expectations(run_noisy(c, default_profile()));
  EXPECT_LT((lo - ideal).norm(), (hi - ideal).norm());
}

TEST(measurement, z_distribution_matches_diagonal) {
  std::mt19937_64 rng(17);
  const Circuit c = oracle::random_circuit(4, 30, rng);
  NoiseProfile prof = random_profile(4, rng);
  prof.p2 = {0.05};
  const PauliVector v = run_noisy_pauli(c, prof);
  const Eigen::VectorXd d = measurement_distribution(v, MeasurementBasis::Z, prof);
  EXPECT_LT((d - basis_probabilities(v.to_density())).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(d.sum(), 1.0, 1e-12);
}

TEST(measurement, x_distribution_matches_noisy_hadamard_layer) {
  std::mt19937_64 rng(19);
  const Circuit c = oracle::random_circuit(3, 30, rng);
  NoiseProfile prof = random_profile(3, rng);
  prof.p2 = {0.05};
  Circuit with_h = c;
  for (int q = 0; q < 3; ++q) with_h.add(gates::h(q));
  const Eigen::VectorXd ref = basis_probabilities(run_noisy(with_h, prof));
  const Eigen::VectorXd d = measurement_distribution(run_noisy_pauli(c, prof), MeasurementBasis::X, prof);
  EXPECT_LT((d - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(readout, confusion_matrix_single_qubit) {
  NoiseProfile prof = noiseless_profile();
  prof.readout = {{0.1, 0.3}};
  Eigen::VectorXd p(2);
  p << 0.8, 0.2;
  const Eigen::VectorXd r = apply_readout(p, 1, prof);
  EXPECT_NEAR(r(0), 0.8 * 0.9 + 0.2 * 0.3, 1e-15);
  EXPECT_NEAR(r(1), 0.8 * 0.1 + 0.2 * 0.7, 1e-15);
}

TEST(readout, symmetric_error_damps_z_expectations) {
  NoiseProfile prof = noiseless_profile();
  prof.readout = {{0.05, 0.05}};
  const IsingInstance inst = random_instance(4, 1);
  Circuit c(4);
  const ShotEstimate e = noisy_expectations(c, inst, prof, Shots::exact(), 1);
  const double f = 1 - 2 * 0.05;
  for (int b = 0; b < 4; ++b) EXPECT_NEAR(e.values(b), f * f, 1e-14);
}

TEST(sampling, counts_sum_and_reproducible) {
  Eigen::VectorXd p(4);
  p << 0.1, 0.2, 0.3, 0.4;
  const auto a = sample_counts(p, 100000, 42);
  const auto b = sample_counts(p, 100000, 42);
  EXPECT_EQ(a, b);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += a[i];
    EXPECT_NEAR(static_cast<double>(a[i]) / 1e5, p(static_cast<Eigen::Index>(i)), 5e-3);
  }
  EXPECT_EQ(total, 100000);
}

TEST(estimates, exact_matches_noisy_state_and_shots_converge) {
  std::mt19937_64 rng(23);
  const IsingInstance inst = random_instance(4, 9);
  AnsatzParams p = AnsatzParams::zeros(4, 2);
  std::uniform_real_distribution<double> a(-1, 1);
  for (auto& t : p.theta) t = a(rng);
  const Circuit c = build_ansatz(inst, 2, p);
  NoiseProfile prof = default_profile();
  prof.readout = {{0.0, 0.0}};
  const ShotEstimate exact = noisy_expectations(c, inst, prof, Shots::exact(), 7);
  const Eigen::VectorXd state_values = ising_expectations(run_noisy(c, prof));
  // X values carry the extra noisy H layer.
  EXPECT_LT((exact.values.head(4) - state_values.head(4)).cwiseAbs().maxCoeff(), 1e-12);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(exact.values(4 + i), (1 - 1e-3) * state_values(4 + i), 1e-12);

  const ShotEstimate s1 = noisy_expectations(c, inst, prof, Shots{200000}, 7);
  const ShotEstimate s2 = noisy_expectations(c, inst, prof, Shots{200000}, 7);
  EXPECT_EQ(s1.values, s2.values);
  EXPECT_LT((s1.values - exact.values).cwiseAbs().maxCoeff(), 0.02);
  const ShotEstimate s3 = noisy_expectations(c, inst, prof, Shots{200000}, 8);
  EXPECT_NE(s1.values, s3.values);
}
