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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mitiknit/ising.hpp"
#include "mitiknit/knitting.hpp"
#include "mitiknit/mlp.hpp"
#include "mitiknit/noise.hpp"

namespace mitiknit {

/// 2N + 4NP: the noisy values, then (sin, cos) of every angle in layout order.
int feature_size(int num_spins, int layers);

Eigen::VectorXd featurize(const Eigen::VectorXd& noisy, const AnsatzParams& params);

/// Examples are stored column-wise.
struct Dataset {
  int num_spins = 0;
  int layers = 0;
  Eigen::MatrixXd inputs;   // feature_size x K
  Eigen::MatrixXd targets;  // 2N x K

  Eigen::Index size() const { return inputs.cols(); }
  /// First `count` examples.
  Dataset head(Eigen::Index count) const;
};

void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);
/// One row per example: f0..fF-1, t0..t2N-1.
void write_dataset_csv(const Dataset& data, const std::string& path);

enum class ShiftPolicy {
  ThirdEach,       // none / +pi/2 / -pi/2 with probability 1/3 each
  UniformOptions,  // uniform over the 2 * 2NP + 1 (gate, sign) options
};

enum class TargetMode { Exact, Sampled };

struct TrainingSetConfig {
  int cuts = 12;
  Shots noisy_shots{1'000'000};
  TargetMode target_mode = TargetMode::Exact;
  std::int64_t target_samples = 100;
  double sigma = 0.05;
  ShiftPolicy shift = ShiftPolicy::ThirdEach;
};

/// Per-example circuit draw: shifted and jittered angles with a random cut
/// layout applied.
struct TrainingCircuit {
  AnsatzParams params;
  CutLayout layout;
  int shifted_index = -1;
  int shift_sign = 0;
};

TrainingCircuit draw_training_circuit(const AnsatzParams& center, const TrainingSetConfig& config,
                                      std::uint64_t seed);

/// Ideal expectations of a cut circuit: knit_exact up to kMaxExactKnitted
/// knitted gates, statevector simulation of the cut circuit beyond.
Eigen::VectorXd exact_targets(const IsingInstance& instance, int layers, const AnsatzParams& cut_params,
                              const CutLayout& layout);

Dataset generate_training_set(const AnsatzParams& center, int k_train, const IsingInstance& instance,
                              int layers, const NoiseProfile& profile, const TrainingSetConfig& config,
                              std::uint64_t seed);

/// Hidden layer widths of every network.
inline const std::vector<int> kDefaultHidden{256, 256};

/// The 2N networks, the center they were trained around, and the VQE step
/// at which training happened.
struct MitigationModel {
  int num_spins = 0;
  int layers = 0;
  std::vector<Mlp<float>> networks;
  AnsatzParams center;
  int trained_step = 0;
  std::vector<TrainReport> reports;

  bool empty() const { return networks.empty(); }
  /// Mitigated expectations, clipped to [-1, 1]. One column per input.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const;
  Eigen::VectorXd predict(const Eigen::VectorXd& features) const;
};

/// Trains all 2N networks on `data`. When `warm` is given its weights are the
/// starting point, otherwise networks are freshly initialized.
MitigationModel train_model(const Dataset& data, const TrainConfig& config,
                            const std::vector<int>& hidden = kDefaultHidden,
                            const MitigationModel* warm = nullptr);

/// Median over networks of 1 - R^2 on a test set.
double median_one_minus_r2(const MitigationModel& model, const Dataset& test);
/// 1 - R^2 per network.
std::vector<double> one_minus_r2(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& predictions);

void save_mlp(const Mlp<float>& net, std::ostream& out);
Mlp<float> load_mlp(std::istream& in);
void save_model(const MitigationModel& model, const std::string& path);
MitigationModel load_model(const std::string& path);

}  // namespace mitiknit
