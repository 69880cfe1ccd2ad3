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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mitiknit/ising.hpp"
#include "oracle.hpp"

using namespace mitiknit;

TEST(run_pure, empty_circuit_is_zero_state) {
  const PureState s = run_pure(Circuit(2));
  EXPECT_EQ(s.amplitudes(0), Complex(1.0));
  EXPECT_EQ(s.amplitudes.tail(3).norm(), 0.0);
}

TEST(run_pure, hadamard) {
  Circuit c(1);
  c.add(gates::h(0));
  const PureState s = run_pure(c);
  EXPECT_NEAR(s.amplitudes(0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.amplitudes(1).real(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(run_pure, rejects_projectors) {
  Circuit c(1);
  c.add(gates::proj_plus(0));
  EXPECT_THROW(run_pure(c), Error);
}

TEST(run_pure, matches_dense_matrix_chain_on_random_circuits) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const Circuit c = oracle::random_circuit(n, 30, rng);
      const PureState s = run_pure(c);
      const Eigen::VectorXcd ref = oracle::final_state(c);
      EXPECT_LT((s.amplitudes - ref).norm(), 1e-12) << "n=" << n;
    }
  }
}

TEST(run_pure, two_qubit_ansatz_matches_oracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  IsingInstance inst = random_instance(2, 1);
  AnsatzParams p = AnsatzParams::zeros(2, 1);
  for (auto& t : p.theta) t = angle(rng);
  const Circuit c = build_ansatz(inst, 1, p);
  const PureState s = run_pure(c);
  const Eigen::VectorXcd ref = oracle::final_state(c);
  for (const auto& obs : ising_observables(2)) {
    EXPECT_NEAR(expectation(s, obs), oracle::pure_expectation(ref, obs), 1e-12);
  }
}

TEST(run_pure, unitarity_property) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const PureState s = run_pure(oracle::random_circuit(n, 60, rng));
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
  }
}

TEST(expectation, basic_cases) {
  const PureState zero = zero_state(2);
  EXPECT_DOUBLE_EQ(expectation(zero, PauliString("ZZ")), 1.0);
  Circuit h(1);
  h.add(gates::h(0));
  EXPECT_NEAR(expectation(run_pure(h), PauliString("X")), 1.0, 1e-15);
  Circuit bell(2);
  bell.add(gates::h(0)).add(gates::cnot(0, 1));
  const PureState b = run_pure(bell);
  EXPECT_NEAR(expectation(b, PauliString("XI")), 0.0, 1e-15);
  EXPECT_NEAR(expectation(b, PauliString("XX")), 1.0, 1e-15);
  EXPECT_NEAR(expectation(b, PauliString("YY")), -1.0, 1e-15);
  EXPECT_THROW(expectation(b, PauliString("XXX")), Error);
  EXPECT_THROW(PauliString("II"), Error);
}

TEST(expectation, random_paulis_match_dense_oracle) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const Circuit c = oracle::random_circuit(n, 25, rng);
    const PureState s = run_pure(c);
    const DensityState rho = to_density(s);
    for (int k = 0; k < 5; ++k) {
      const PauliString p = oracle::random_pauli(n, rng);
      const double ref = oracle::pure_expectation(oracle::final_state(c), p);
      EXPECT_NEAR(expectation(s, p), ref, 1e-12);
      EXPECT_NEAR(expectation(rho, p), ref, 1e-12);
    }
  }
}

TEST(transpile, expectation_equivalence_up_to_six_qubits) {
  std::mt19937_64 rng(29);
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const Circuit c = oracle::random_circuit(n, 40, rng);
      const PureState a = run_pure(c);
      const PureState b = run_pure(transpile(c));
      // Equal up to global phase.
      EXPECT_NEAR(std::abs(a.amplitudes.dot(b.amplitudes)), 1.0, 1e-12);
      for (int k = 0; k < 10; ++k) {
        const PauliString p = oracle::random_pauli(n, rng);
        EXPECT_NEAR(expectation(a, p), expectation(b, p), 1e-10);
      }
    }
  }
}

TEST(fold, noiseless_expectations_unchanged) {
  std::mt19937_64 rng(31);
  for (int k = 0; k <= 3; ++k) {
    const Circuit c = oracle::random_circuit(4, 30, rng);
    const PureState a = run_pure(c);
    const PureState b = run_pure(fold(c, k));
    for (int j = 0; j < 10; ++j) {
      const PauliString p = oracle::random_pauli(4, rng);
      EXPECT_NEAR(expectation(a, p), expectation(b, p), 1e-10);
    }
    EXPECT_NEAR(std::abs(a.amplitudes.dot(b.amplitudes)), 1.0, 1e-10);
  }
}

TEST(run_pure_branching, projector_cases) {
  Circuit c(1);
  c.add(gates::h(0)).add(gates::proj_plus(0));
  const auto br = run_pure_branching(c);
  ASSERT_EQ(br.size(), 1u);
  EXPECT_NEAR(br[0].state.amplitudes(0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(std::abs(br[0].state.amplitudes(1)), 0.0);

  Circuit z(1);
  z.add(gates::h(0)).add(gates::proj_plus(0)).add(gates::proj_minus(0));
  EXPECT_EQ(run_pure_branching(z)[0].state.norm_squared(), 0.0);
}

TEST(run_pure_branching, projector_free_matches_run_pure) {
  std::mt19937_64 rng(37);
  const Circuit c = oracle::random_circuit(3, 20, rng);
  const auto br = run_pure_branching(c);
  ASSERT_EQ(br.size(), 1u);
  EXPECT_EQ(br[0].weight, 1.0);
  EXPECT_EQ((br[0].state.amplitudes - run_pure(c).amplitudes).norm(), 0.0);
}

TEST(split_signed, realizes_signed_measurement_map) {
  std::mt19937_64 rng(41);
  const Circuit c = oracle::random_circuit(3, 25, rng);
  const PureState s = run_pure(c);
  const auto br = split_signed(Branch{1.0, s}, 1);
  DensityState rho = to_density(s);
  apply_signed_measure(rho, 1);
  EXPECT_TRUE(rho.is_signed);
  for (int k = 0; k < 10; ++k) {
    const PauliString p = oracle::random_pauli(3, rng);
    EXPECT_NEAR(expectation(std::span<const Branch>(br), p), expectation(rho, p), 1e-12);
  }
  // The trace of the signed map is <Z_1>.
  EXPECT_NEAR(rho.trace(), expectation(s, PauliString::single(3, 1, 'Z')), 1e-12);
}

TEST(run_density, matches_outer_product_without_channels) {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 10; ++rep) {
    const Circuit c = oracle::random_circuit(4, 30, rng);
    const DensityState rho = run_density(c);
    const PureState s = run_pure(c);
    EXPECT_LT((rho.matrix - s.amplitudes * s.amplitudes.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    // Zero-rate channels change nothing.
    std::vector<ChannelAttachment> ch;
    for (std::size_t i = 0; i < c.size(); ++i) ch.push_back({i, {static_cast<int>(i % 4), 0.0}});
    EXPECT_LT((run_density(c, ch).matrix - rho.matrix).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(run_density, full_depolarizing_gives_maximally_mixed) {
  Circuit c(1);
  c.add(gates::h(0));
  const std::vector<ChannelAttachment> ch{{0, {0, 1.0}}};
  const DensityState rho = run_density(c, ch);
  EXPECT_LT((rho.matrix - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(run_density, trace_preserved_and_matches_kraus_oracle) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const Circuit c = oracle::random_circuit(3, 25, rng);
    std::vector<ChannelAttachment> ch;
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(8, 8);
    ref(0, 0) = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Eigen::MatrixXcd u = oracle::gate_matrix(c.gates()[i], 3);
      ref = u * ref * u.adjoint();
      if (i % 2 == 0) {
        const int q = static_cast<int>(rng() % 3);
        const double r = rate(rng);
        ch.push_back({i, {q, r}});
        ref = oracle::depolarize(ref, 3, q, r);
      }
    }
    const DensityState rho = run_density(c, ch);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
    EXPECT_LT((rho.matrix - ref).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(run_density, depolarizing_shrinks_single_qubit_paulis) {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 20; ++rep) {
    const Circuit c = oracle::random_circuit(2, 20, rng);
    const double lambda = std::uniform_real_distribution<double>(0, 1)(rng);
    DensityState rho = run_density(c);
    DensityState noisy = rho;
    apply_depolarizing(noisy, 0, lambda);
    for (char l : {'X', 'Y', 'Z'}) {
      const PauliString p = PauliString::single(2, 0, l);
      EXPECT_NEAR(expectation(noisy, p), (1 - lambda) * expectation(rho, p), 1e-12);
    }
  }
}

TEST(run_density, rejects_bad_attachments) {
  Circuit c(2);
  c.add(gates::h(0));
  const std::vector<ChannelAttachment> late{{1, {0, 0.1}}};
  const std::vector<ChannelAttachment> wide{{0, {2, 0.1}}};
  const std::vector<ChannelAttachment> rate{{0, {0, 1.5}}};
  EXPECT_THROW(run_density(c, late), Error);
  EXPECT_THROW(run_density(c, wide), Error);
  EXPECT_THROW(run_density(c, rate), Error);
}
