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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mitiknit/circuit.hpp"
#include "mitiknit/ising.hpp"
#include "mitiknit/sim.hpp"

namespace mitiknit {

/// Classical readout confusion of one qubit: p01 = P(read 1 | 0),
/// p10 = P(read 0 | 1).
struct ReadoutError {
  double p01 = 0.0;
  double p10 = 0.0;

  friend bool operator==(const ReadoutError&, const ReadoutError&) = default;
};

/// Gate-level noise: depolarizing of rate p1 after every single-qubit gate,
/// depolarizing of rate p2 on both qubits after every CNOT, readout
/// confusion at measurement. Each list holds one entry per qubit (p2: per
/// ring bond), or a single entry that applies everywhere.
struct NoiseProfile {
  std::vector<double> p1{0.0};
  std::vector<double> p2{0.0};
  std::vector<ReadoutError> readout{ReadoutError{}};

  double single_qubit_rate(int qubit) const;
  /// Rate for a CNOT on (a, b); per-bond lists require ring neighbours.
  double two_qubit_rate(int a, int b, int width) const;
  const ReadoutError& readout_for(int qubit) const;

  void validate() const;
  bool is_noiseless() const;

  friend bool operator==(const NoiseProfile&, const NoiseProfile&) = default;
};

/// Reference profile: p1 = 1e-3, p2 = 2.5e-2, p01 = p10 = 3e-2 everywhere.
/// Calibration target for the noisy-VQE failure regime, not device data.
NoiseProfile default_profile();
NoiseProfile noiseless_profile();

/// Rate scaling by p_noise in [0, 1]; equivalent to replacing each error
/// channel by (1 - p_noise) Id + p_noise E.
NoiseProfile scale_profile(const NoiseProfile& profile, double p_noise);

struct ScaledProfile {
  NoiseProfile base;
  double p_noise = 1.0;

  NoiseProfile effective() const { return scale_profile(base, p_noise); }
};

nlohmann::json to_json(const NoiseProfile& profile);
NoiseProfile profile_from_json(const nlohmann::json& j);
NoiseProfile load_profile(const std::string& path);
void save_profile(const NoiseProfile& profile, const std::string& path);
/// Profile named by MITIKNIT_PROFILE, or default_profile() when unset.
NoiseProfile profile_from_environment();

/// Real Pauli-basis coefficients c_P = tr(P rho). Qubit q contributes its X
/// bit at index bit q and its Z bit at index bit N + q (Y sets both).
struct PauliVector {
  int width = 0;
  Eigen::VectorXd coeffs;

  static PauliVector zero_state(int width);
  double expectation(const PauliString& obs) const;
  DensityState to_density() const;
};

inline constexpr int kMaxNoisyWidth = 14;

/// Transpiles, then evolves |0..0><0..0| through every native gate followed
/// by its depolarizing channels. Pauli-basis engine with gate fusion.
PauliVector run_noisy_pauli(const Circuit& circuit, const NoiseProfile& profile);

/// run_noisy_pauli as a density operator.
DensityState run_noisy(const Circuit& circuit, const NoiseProfile& profile);

enum class MeasurementBasis { Z, X };

/// Outcome distribution of measuring every qubit in `basis` (X: a noisy H
/// layer precedes the Z measurement), before readout confusion.
Eigen::VectorXd measurement_distribution(const PauliVector& state, MeasurementBasis basis,
                                         const NoiseProfile& profile);

/// Pushes a distribution through the per-qubit readout confusion matrices.
Eigen::VectorXd apply_readout(const Eigen::VectorXd& probabilities, int width,
                              const NoiseProfile& profile);

/// Multinomial counts of `shots` draws.
std::vector<std::int64_t> sample_counts(const Eigen::VectorXd& probabilities, std::int64_t shots,
                                        std::uint64_t seed);

/// Shot budget per measurement setting; zero means exact (no sampling).
struct Shots {
  std::int64_t count = 0;

  static Shots exact() { return {0}; }
  bool is_exact() const { return count == 0; }
};

struct ShotEstimate {
  Eigen::VectorXd values;  // ZZ on each bond, then X on each spin
  Shots shots;
  std::uint64_t seed = 0;
};

/// Runs the all-Z and all-X measurement settings of the circuit. The random
/// stream is derived from (seed, circuit hash).
ShotEstimate noisy_expectations(const Circuit& circuit, const IsingInstance& instance,
                                const NoiseProfile& profile, Shots shots, std::uint64_t seed);

/// Same, reusing an already simulated state.
ShotEstimate estimate_from_state(const PauliVector& state, const NoiseProfile& profile, Shots shots,
                                 std::uint64_t stream_seed);

}  // namespace mitiknit
