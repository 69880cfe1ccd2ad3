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

#include "mitiknit/circuit.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"

using namespace mitiknit;

TEST(circuit, rejects_out_of_range_and_duplicate_qubits) {
  Circuit c(2);
  EXPECT_THROW(c.add(gates::h(2)), Error);
  EXPECT_THROW(c.add(gates::h(-1)), Error);
  EXPECT_THROW(c.add(gates::cnot(1, 1)), Error);
  EXPECT_THROW(c.add(gates::rzz(0, 0, 0.3)), Error);
  EXPECT_NO_THROW(c.add(gates::rzz(1, 0, 0.3)));
  EXPECT_EQ(c.size(), 1u);
}

TEST(circuit, json_round_trip_is_exact) {
  std::mt19937_64 rng(5);
  Circuit c = oracle::random_circuit(4, 40, rng);
  c.add(gates::proj_plus(2));
  const auto text = to_json(c).dump();
  const Circuit back = circuit_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.hash(), c.hash());
}

TEST(circuit, json_rejects_bad_input) {
  EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"width":2,"gates":[{"kind":"T","qubits":[0]}]})")), Error);
  EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"width":2,"gates":[{"kind":"CNOT","qubits":[0]}]})")), Error);
  EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"width":2,"gates":[{"kind":"H","qubits":[3]}]})")), Error);
}

TEST(circuit, hash_depends_on_angles) {
  Circuit a(2), b(2);
  a.add(gates::rx(0, 0.1));
  b.add(gates::rx(0, 0.1 + 1e-15));
  EXPECT_NE(a.hash(), b.hash());
}

TEST(transpile, rzz_becomes_cnot_rz_cnot) {
  Circuit c(2);
  c.add(gates::rzz(0, 1, 0.7));
  const Circuit t = transpile(c);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.gates()[0], gates::cnot(0, 1));
  EXPECT_EQ(t.gates()[1], gates::rz(1, 0.7));
  EXPECT_EQ(t.gates()[2], gates::cnot(0, 1));
}

TEST(transpile, leaves_other_gates_alone) {
  Circuit c(3);
  c.add(gates::h(0)).add(gates::rx(1, 0.2)).add(gates::cnot(2, 0)).add(gates::z(1));
  EXPECT_EQ(transpile(c), c);
}

TEST(fold, gate_counts_and_structure) {
  Circuit c(2);
  c.add(gates::h(0)).add(gates::rzz(0, 1, 0.4)).add(gates::rx(1, -0.3));
  EXPECT_EQ(fold(c, 0), c);
  EXPECT_EQ(fold(c, 1).size(), 3 * c.size());
  EXPECT_EQ(fold(c, 2).size(), 5 * c.size());
  const Circuit f = fold(c, 1);
  EXPECT_EQ(f.gates()[3], gates::rx(1, 0.3));
  EXPECT_EQ(f.gates()[5], gates::h(0));
  EXPECT_THROW(fold(c, -1), Error);
  c.add(gates::proj_minus(0));
  EXPECT_THROW(fold(c, 1), Error);
}
