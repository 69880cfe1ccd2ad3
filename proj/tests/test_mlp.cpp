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

#include "mitiknit/mlp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "mitiknit/mitigation.hpp"

using namespace mitiknit;

namespace {

MatrixX<double> random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> g;
  MatrixX<double> m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST(r2, unit_cases) {
  const std::vector<double> t{0, 1, 2};
  EXPECT_EQ(r2_score(t, t), 1.0);
  const std::vector<double> mean{1, 1, 1};
  EXPECT_EQ(r2_score(t, mean), 0.0);
  const std::vector<double> p{0, 1, 1};
  EXPECT_EQ(r2_score(t, p), 0.5);
  const std::vector<double> flat{2, 2, 2};
  EXPECT_THROW(r2_score(flat, t), Error);
  EXPECT_THROW(r2_score(t, std::vector<double>{1, 2}), Error);
}

TEST(mlp, shapes_and_validation) {
  Mlp<double> net({5, 8, 3}, 1);
  EXPECT_EQ(net.num_parameters(), 5u * 8 + 8 + 8 * 3 + 3);
  EXPECT_EQ(net.forward(random_matrix(5, 7, 2)).cols(), 7);
  EXPECT_THROW(net.forward(random_matrix(4, 7, 2)), Error);
  EXPECT_THROW(Mlp<double>({5}, 1), Error);
  EXPECT_THROW(Mlp<double>({5, 0, 1}, 1), Error);
}

TEST(mlp, backprop_matches_central_differences) {
  for (Activation act : {Activation::Relu, Activation::Identity}) {
    Mlp<double> net({6, 9, 7, 2}, 3, act);
    const MatrixX<double> x = random_matrix(6, 11, 4);
    const MatrixX<double> y = random_matrix(2, 11, 5);
    MlpGradient<double> g;
    net.loss_and_gradient(x, y, g);
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
      auto check = [&](double& param, double analytic) {
        const double keep = param;
        param = keep + h;
        const double up = net.loss(x, y);
        param = keep - h;
        const double down = net.loss(x, y);
        param = keep;
        const double fd = (up - down) / (2 * h);
        worst = std::max(worst, std::abs(fd - analytic) / std::max(1e-3, std::abs(fd) + std::abs(analytic)));
      };
      for (Eigen::Index i = 0; i < net.weights()[l].size(); ++i) check(net.weights()[l].data()[i], g.weights[l].data()[i]);
      for (Eigen::Index i = 0; i < net.biases()[l].size(); ++i) check(net.biases()[l](i), g.biases[l](i));
    }
    EXPECT_LT(worst, 1e-5);
  }
}

TEST(train, linear_target_is_learned) {
  const MatrixX<float> x = MatrixX<float>(random_matrix(8, 5000, 6).cast<float>()).array().tanh().matrix();
  Eigen::RowVectorXf w(8);
  w << 0.3f, -0.2f, 0.1f, 0.05f, -0.4f, 0.25f, 0.0f, 0.15f;
  const MatrixX<float> y = w * x;
  Mlp<float> net({8, 32, 32, 1}, 7);
  TrainConfig c;
  c.seed = 1;
  c.max_epochs = 300;
  const TrainReport r = train(net, x, y, c);
  ASSERT_TRUE(r.r2_defined);
  EXPECT_LT(1.0 - r.validation_r2, 1e-3);
}

TEST(train, memorizes_sixteen_examples) {
  const MatrixX<float> x = random_matrix(6, 16, 8).cast<float>();
  const MatrixX<float> y = random_matrix(1, 16, 9).cast<float>();
  Mlp<float> net({6, 64, 64, 1}, 10);
  TrainConfig c;
  c.batch_size = 16;
  c.max_epochs = 2000;
  c.patience = 2000;
  const TrainReport r = train(net, x, y, c);
  EXPECT_LT(r.train_loss.back(), 1e-4);
}

TEST(train, deterministic_given_seed) {
  const MatrixX<float> x = random_matrix(5, 300, 11).cast<float>();
  const MatrixX<float> y = (x.row(0).array() * x.row(1).array()).matrix();
  TrainConfig c;
  c.seed = 42;
  c.max_epochs = 5;
  Mlp<float> a({5, 16, 1}, 3), b({5, 16, 1}, 3);
  train(a, x, y, c);
  train(b, x, y, c);
  for (std::size_t l = 0; l < a.weights().size(); ++l) {
    EXPECT_EQ(a.weights()[l], b.weights()[l]);
    EXPECT_EQ(a.biases()[l], b.biases()[l]);
  }
}

TEST(train, full_batch_loss_is_monotone) {
  const MatrixX<float> x = random_matrix(4, 100, 12).cast<float>();
  const MatrixX<float> y = (x.row(0).array().sin()).matrix();
  Mlp<float> net({4, 32, 1}, 4);
  TrainConfig c;
  c.batch_size = 1000;
  c.max_epochs = 100;
  c.patience = 100;
  c.learning_rate = 1e-3;
  const TrainReport r = train(net, x, y, c);
  for (std::size_t e = 1; e < r.train_loss.size(); ++e) EXPECT_LE(r.train_loss[e], r.train_loss[e - 1] * (1 + 1e-6));
}

TEST(train, zero_variance_targets_flag_r2) {
  const MatrixX<float> x = random_matrix(3, 50, 13).cast<float>();
  const MatrixX<float> y = MatrixX<float>::Constant(1, 50, 0.5f);
  Mlp<float> net({3, 8, 1}, 1);
  TrainConfig c;
  c.max_epochs = 3;
  EXPECT_FALSE(train(net, x, y, c).r2_defined);
}

TEST(train, rejects_bad_input) {
  Mlp<float> net({3, 8, 1}, 1);
  TrainConfig c;
  EXPECT_THROW(train(net, MatrixX<float>(random_matrix(3, 5, 1).cast<float>()), MatrixX<float>(MatrixX<float>::Zero(1, 5)), c), Error);
  c.validation_fraction = 0.7;
  EXPECT_THROW(c.validate(), Error);
}

TEST(features, layout_and_values) {
  AnsatzParams p = AnsatzParams::zeros(6, 8);
  const Eigen::VectorXd noisy = Eigen::VectorXd::LinSpaced(12, -1, 1);
  const Eigen::VectorXd f = featurize(noisy, p);
  ASSERT_EQ(f.size(), 204);
  EXPECT_EQ(f.head(12), noisy);
  for (int i = 0; i < 96; ++i) {
    EXPECT_EQ(f(12 + 2 * i), 0.0);
    EXPECT_EQ(f(12 + 2 * i + 1), 1.0);
  }
  p.theta(5) = 2.5;
  const Eigen::VectorXd g = featurize(noisy, p);
  EXPECT_NEAR(std::atan2(g(12 + 10), g(12 + 11)), 2.5, 1e-12);
  EXPECT_NEAR(g(22) * g(22) + g(23) * g(23), 1.0, 1e-12);
  EXPECT_THROW(featurize(noisy.head(10), p), Error);
}

TEST(training_set, shift_fraction_and_jitter) {
  AnsatzParams center = AnsatzParams::zeros(6, 8);
  TrainingSetConfig c;
  c.cuts = 16;
  int shifted = 0;
  double sum2 = 0.0;
  long count = 0;
  for (int i = 0; i < 10000; ++i) {
    const TrainingCircuit tc = draw_training_circuit(center, c, derive_seed(3, i));
    shifted += tc.shifted_index >= 0;
    // X angles are never rounded by cuts.
    for (int q = 0; q < 6; ++q) {
      for (int l = 0; l < 8; ++l) {
        const int idx = param_index(6, l, ParamKind::X, q);
        if (idx == tc.shifted_index) continue;
        sum2 += tc.params.theta(idx) * tc.params.theta(idx);
        ++count;
      }
    }
  }
  EXPECT_NEAR(shifted / 10000.0, 2.0 / 3.0, 0.02);
  EXPECT_NEAR(std::sqrt(sum2 / count), 0.05, 0.002);
}

TEST(training_set, factorized_noiseless_features_equal_targets) {
  const IsingInstance inst = random_instance(4, 3);
  AnsatzParams center = AnsatzParams::zeros(4, 2);
  Rng rng = make_rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& t : center.theta) t = u(rng);
  TrainingSetConfig c;
  c.cuts = 4;
  c.sigma = 0.0;
  c.noisy_shots = Shots::exact();
  c.shift = ShiftPolicy::ThirdEach;
  const Dataset d = generate_training_set(center, 20, inst, 2, noiseless_profile(), c, 9);
  EXPECT_LT((d.inputs.topRows(8) - d.targets).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(training_set, exact_targets_match_cut_circuit_and_workers_agree) {
  const IsingInstance inst = random_instance(4, 4);
  AnsatzParams center = AnsatzParams::zeros(4, 2);
  Rng rng = make_rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& t : center.theta) t = u(rng);
  TrainingSetConfig c;
  c.cuts = 2;
  c.noisy_shots = Shots{1000};
  const Dataset a = generate_training_set(center, 30, inst, 2, default_profile(), c, 10);
  setenv("MITIKNIT_WORKERS", "3", 1);
  const Dataset b = generate_training_set(center, 30, inst, 2, default_profile(), c, 10);
  unsetenv("MITIKNIT_WORKERS");
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.targets, b.targets);
  for (int i = 0; i < 30; ++i) {
    const TrainingCircuit tc = draw_training_circuit(center, c, derive_seed(derive_seed(10, i), "circuit"));
    const Eigen::VectorXd ref = ising_expectations(run_pure(build_ansatz(inst, 2, tc.params)));
    EXPECT_LT((a.targets.col(i) - ref).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(model, identity_training_and_clipping) {
  // Targets equal the noisy inputs: the networks learn the identity.
  const IsingInstance inst = random_instance(4, 5);
  AnsatzParams center = AnsatzParams::zeros(4, 1);
  TrainingSetConfig c;
  c.cuts = 0;
  c.noisy_shots = Shots::exact();
  c.sigma = 0.6;
  Dataset d = generate_training_set(center, 5500, inst, 1, default_profile(), c, 11);
  d.targets = d.inputs.topRows(8);
  TrainConfig tc;
  tc.max_epochs = 300;
  const MitigationModel m = train_model(d.head(5000), tc, {32, 32});
  Dataset test = d;
  test.inputs = d.inputs.rightCols(500);
  test.targets = d.targets.rightCols(500);
  EXPECT_LT(median_one_minus_r2(m, test), 1e-3);
  Eigen::MatrixXd wild = test.inputs;
  wild.topRows(8) *= 50.0;
  const Eigen::MatrixXd out = m.predict(wild);
  EXPECT_LE(out.cwiseAbs().maxCoeff(), 1.0);
}

TEST(persistence, dataset_and_model_round_trip) {
  const auto dir = std::filesystem::temp_directory_path();
  Dataset d{2, 1, random_matrix(feature_size(2, 1), 15, 1), random_matrix(4, 15, 2)};
  save_dataset(d, (dir / "mk_test.bin").string());
  const Dataset e = load_dataset((dir / "mk_test.bin").string());
  EXPECT_EQ(d.inputs, e.inputs);
  EXPECT_EQ(d.targets, e.targets);
  write_dataset_csv(d, (dir / "mk_test.csv").string());
  std::ifstream csv(dir / "mk_test.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.substr(0, 6), "f0,f1,");

  d.targets = d.targets.cwiseMax(-1).cwiseMin(1);
  TrainConfig tc;
  tc.max_epochs = 2;
  MitigationModel m = train_model(d, tc, {8});
  m.center = AnsatzParams::zeros(2, 1);
  m.trained_step = 9;
  save_model(m, (dir / "mk_model.bin").string());
  const MitigationModel n = load_model((dir / "mk_model.bin").string());
  EXPECT_EQ(n.trained_step, 9);
  EXPECT_EQ(m.predict(d.inputs), n.predict(d.inputs));
  std::ofstream((dir / "mk_bad.bin").string()) << "garbage";
  EXPECT_THROW(load_model((dir / "mk_bad.bin").string()), Error);
  EXPECT_THROW(load_dataset((dir / "mk_bad.bin").string()), Error);
  for (const char* f : {"mk_test.bin", "mk_test.csv", "mk_model.bin", "mk_bad.bin"}) std::filesystem::remove(dir / f);
}
