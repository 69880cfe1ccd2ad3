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

#include "mitiknit/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "mitiknit/parallel.hpp"
#include "mitiknit/rng.hpp"

namespace mitiknit {

// --- Metrics -------------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (batch_size < 1) throw Error("batch size must be positive");
  if (max_epochs < 1) throw Error("epoch budget must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction <= 0.5)) {
    throw Error("validation fraction must lie in (0, 0.5]");
  }
  if (patience < 1) throw Error("patience must be positive");
}

double r2_score(std::span<const double> targets, std::span<const double> predictions) {
  if (targets.empty() || targets.size() != predictions.size()) {
    throw Error("r2_score needs equal nonzero lengths");
  }
  double mean = 0.0;
  for (double t : targets) mean += t;
  mean /= static_cast<double>(targets.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ss_res += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    ss_tot += (targets[i] - mean) * (targets[i] - mean);
  }
  if (ss_tot == 0.0) throw Error("R^2 is undefined for targets with zero variance");
  return 1.0 - ss_res / ss_tot;
}

double r2_score(const Eigen::VectorXd& targets, const Eigen::VectorXd& predictions) {
  return r2_score(std::span<const double>(targets.data(), static_cast<std::size_t>(targets.size())),
                  std::span<const double>(predictions.data(), static_cast<std::size_t>(predictions.size())));
}

std::vector<double> one_minus_r2(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& predictions) {
  if (targets.rows() != predictions.rows() || targets.cols() != predictions.cols()) {
    throw Error("prediction shape does not match targets");
  }
  std::vector<double> out;
  for (Eigen::Index j = 0; j < targets.rows(); ++j) {
    const Eigen::VectorXd y = targets.row(j).transpose();
    const Eigen::VectorXd p = predictions.row(j).transpose();
    out.push_back(1.0 - r2_score(y, p));
  }
  return out;
}

// --- Features ------------------------------------------------------------------

int feature_size(int num_spins, int layers) { return 2 * num_spins + 4 * num_spins * layers; }

Eigen::VectorXd featurize(const Eigen::VectorXd& noisy, const AnsatzParams& params) {
  const int n = params.num_spins;
  if (noisy.size() != 2 * n) throw Error("featurize expects 2N noisy values");
  if (params.theta.size() != 2 * static_cast<Eigen::Index>(n) * params.layers) {
    throw Error("featurize: parameter vector does not match (N, P)");
  }
  Eigen::VectorXd f(feature_size(n, params.layers));
  f.head(2 * n) = noisy;
  for (Eigen::Index i = 0; i < params.theta.size(); ++i) {
    f(2 * n + 2 * i) = std::sin(params.theta(i));
    f(2 * n + 2 * i + 1) = std::cos(params.theta(i));
  }
  return f;
}

// --- Datasets ------------------------------------------------------------------

Dataset Dataset::head(Eigen::Index count) const {
  if (count < 0 || count > size()) throw Error("dataset has fewer examples than requested");
  return {num_spins, layers, inputs.leftCols(count), targets.leftCols(count)};
}

namespace {

constexpr char kDatasetMagic[8] = {'M', 'K', 'D', 'A', 'T', 'A', '0', '1'};
constexpr char kModelMagic[8] = {'M', 'K', 'M', 'O', 'D', 'L', '0', '1'};
constexpr char kMlpMagic[8] = {'M', 'K', 'M', 'L', 'P', '0', '0', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("unexpected end of file");
  return v;
}

template <class Derived>
void put_matrix(std::ostream& out, const Eigen::PlainObjectBase<Derived>& m) {
  put<std::int64_t>(out, m.rows());
  put<std::int64_t>(out, m.cols());
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(typename Derived::Scalar) * static_cast<std::size_t>(m.size())));
}

template <class M>
M get_matrix(std::istream& in) {
  const auto rows = get<std::int64_t>(in);
  const auto cols = get<std::int64_t>(in);
  if (rows < 0 || cols < 0 || rows * cols > (std::int64_t{1} << 34)) throw Error("corrupt matrix header");
  M m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(typename M::Scalar) * static_cast<std::size_t>(m.size())));
  if (!in) throw Error("unexpected end of file");
  return m;
}

void expect_magic(std::istream& in, const char (&magic)[8], const char* what) {
  char buf[8];
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0) throw Error(std::string("not a ") + what + " file");
}

// Writes to a temporary sibling and renames over the destination.
template <class F>
void atomic_write(const std::string& path, F&& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    body(out);
    if (!out) throw Error("write failed for " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename onto " + path);
}

}  // namespace

void save_dataset(const Dataset& data, const std::string& path) {
  atomic_write(path, [&](std::ostream& out) {
    out.write(kDatasetMagic, 8);
    put<std::int32_t>(out, data.num_spins);
    put<std::int32_t>(out, data.layers);
    put_matrix(out, data.inputs);
    put_matrix(out, data.targets);
  });
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path);
  expect_magic(in, kDatasetMagic, "dataset");
  Dataset d;
  d.num_spins = get<std::int32_t>(in);
  d.layers = get<std::int32_t>(in);
  d.inputs = get_matrix<Eigen::MatrixXd>(in);
  d.targets = get_matrix<Eigen::MatrixXd>(in);
  if (d.inputs.cols() != d.targets.cols() || d.inputs.rows() != feature_size(d.num_spins, d.layers) ||
      d.targets.rows() != 2 * d.num_spins) {
    throw Error("dataset shapes are inconsistent");
  }
  return d;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  atomic_write(path, [&](std::ostream& out) {
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) out << (i ? "," : "") << 'f' << i;
    for (Eigen::Index i = 0; i < data.targets.rows(); ++i) out << ",t" << i;
    out << '\n';
    for (Eigen::Index c = 0; c < data.size(); ++c) {
      for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) out << (i ? "," : "") << data.inputs(i, c);
      for (Eigen::Index i = 0; i < data.targets.rows(); ++i) out << ',' << data.targets(i, c);
      out << '\n';
    }
  });
}

// --- Training-set generation -------------------------------------------------

TrainingCircuit draw_training_circuit(const AnsatzParams& center, const TrainingSetConfig& config,
                                      std::uint64_t seed) {
  if (config.cuts < 0 || config.cuts > 2 * center.layers) throw Error("number of cuts must lie in [0, 2P]");
  if (config.sigma < 0.0) throw Error("angle jitter must be non-negative");
  Rng rng = make_rng(seed);
  TrainingCircuit tc;
  AnsatzParams p = center;
  const int m = static_cast<int>(p.theta.size());
  if (config.shift == ShiftPolicy::ThirdEach) {
    const int choice = std::uniform_int_distribution<int>(0, 2)(rng);
    if (choice > 0) {
      tc.shift_sign = choice == 1 ? 1 : -1;
      tc.shifted_index = std::uniform_int_distribution<int>(0, m - 1)(rng);
    }
  } else {
    const int choice = std::uniform_int_distribution<int>(0, 2 * m)(rng);
    if (choice > 0) {
      tc.shift_sign = choice <= m ? 1 : -1;
      tc.shifted_index = (choice - 1) % m;
    }
  }
  if (tc.shifted_index >= 0) p.theta(tc.shifted_index) += tc.shift_sign * std::numbers::pi / 2.0;
  if (config.sigma > 0.0) {
    std::normal_distribution<double> jitter(0.0, config.sigma);
    for (auto& t : p.theta) t += jitter(rng);
  }
  tc.layout = random_layout(p.num_spins, p.layers, config.cuts, derive_seed(seed, "layout"));
  tc.params = apply_cuts(p, tc.layout);
  return tc;
}

Eigen::VectorXd exact_targets(const IsingInstance& instance, int layers, const AnsatzParams& cut_params,
                              const CutLayout& layout) {
  if (layout.num_knitted() <= kMaxExactKnitted) {
    return knit_exact(split(instance, layers, cut_params, layout));
  }
  return ising_expectations(run_pure(build_ansatz(instance, layers, cut_params)));
}

Dataset generate_training_set(const AnsatzParams& center, int k_train, const IsingInstance& instance,
                              int layers, const NoiseProfile& profile, const TrainingSetConfig& config,
                              std::uint64_t seed) {
  if (k_train < 1) throw Error("training set size must be positive");
  if (center.num_spins != instance.num_spins || center.layers != layers) {
    throw Error("center parameters do not match (N, P)");
  }
  const int n = instance.num_spins;
  Dataset d;
  d.num_spins = n;
  d.layers = layers;
  d.inputs.resize(feature_size(n, layers), k_train);
  d.targets.resize(2 * n, k_train);
  parallel_for(static_cast<std::size_t>(k_train), [&](std::size_t i) {
    const std::uint64_t ex = derive_seed(seed, static_cast<std::uint64_t>(i));
    const TrainingCircuit tc = draw_training_circuit(center, config, derive_seed(ex, "circuit"));
    const Circuit circuit = build_ansatz(instance, layers, tc.params);
    const Eigen::VectorXd noisy =
        noisy_expectations(circuit, instance, profile, config.noisy_shots, derive_seed(ex, "noise")).values;
    const auto col = static_cast<Eigen::Index>(i);
    d.inputs.col(col) = featurize(noisy, tc.params);
    if (config.target_mode == TargetMode::Exact) {
      d.targets.col(col) = exact_targets(instance, layers, tc.params, tc.layout);
    } else {
      d.targets.col(col) =
          knit_sampled(split(instance, layers, tc.params, tc.layout), config.target_samples, derive_seed(ex, "knit"));
    }
  });
  return d;
}

// --- Model ---------------------------------------------------------------------

Eigen::MatrixXd MitigationModel::predict(const Eigen::MatrixXd& features) const {
  if (networks.empty()) throw Error("mitigation model is not trained");
  if (features.rows() != feature_size(num_spins, layers)) throw Error("feature dimension mismatch");
  const MatrixX<float> x = features.cast<float>();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(networks.size()), features.cols());
  for (std::size_t j = 0; j < networks.size(); ++j) {
    out.row(static_cast<Eigen::Index>(j)) = networks[j].forward(x).row(0).cast<double>();
  }
  // std::clamp keeps NaN, so a diverged network stays visible downstream.
  return out.unaryExpr([](double v) { return std::clamp(v, -1.0, 1.0); });
}

Eigen::VectorXd MitigationModel::predict(const Eigen::VectorXd& features) const {
  return predict(Eigen::MatrixXd(features)).col(0);
}

MitigationModel train_model(const Dataset& data, const TrainConfig& config, const std::vector<int>& hidden,
                            const MitigationModel* warm) {
  config.validate();
  const int n = data.num_spins;
  const int outputs = 2 * n;
  if (data.targets.rows() != outputs) throw Error("dataset targets must have 2N rows");
  if (warm && (warm->num_spins != n || warm->layers != data.layers ||
               static_cast<int>(warm->networks.size()) != outputs)) {
    throw Error("warm-start model does not match (N, P)");
  }
  MitigationModel model;
  model.num_spins = n;
  model.layers = data.layers;
  model.networks.resize(static_cast<std::size_t>(outputs));
  model.reports.resize(static_cast<std::size_t>(outputs));
  const MatrixX<float> x = data.inputs.cast<float>();
  const MatrixX<float> y = data.targets.cast<float>();
  std::vector<int> widths{static_cast<int>(data.inputs.rows())};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  parallel_for(static_cast<std::size_t>(outputs), [&](std::size_t j) {
    Mlp<float> net = warm ? warm->networks[j]
                          : Mlp<float>(widths, derive_seed(config.seed, "init" + std::to_string(j)));
    TrainConfig cj = config;
    cj.seed = derive_seed(config.seed, "train" + std::to_string(j));
    const MatrixX<float> yj = y.row(static_cast<Eigen::Index>(j));
    model.reports[j] = train(net, x, yj, cj);
    model.networks[j] = std::move(net);
  });
  return model;
}

double median_one_minus_r2(const MitigationModel& model, const Dataset& test) {
  std::vector<double> v = one_minus_r2(test.targets, model.predict(test.inputs));
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

void save_mlp(const Mlp<float>& net, std::ostream& out) {
  out.write(kMlpMagic, 8);
  put<std::int32_t>(out, net.hidden_activation() == Activation::Relu ? 0 : 1);
  put<std::int32_t>(out, net.num_layers());
  for (int l = 0; l < net.num_layers(); ++l) {
    put_matrix(out, net.weights()[static_cast<std::size_t>(l)]);
    put_matrix(out, net.biases()[static_cast<std::size_t>(l)]);
  }
}

Mlp<float> load_mlp(std::istream& in) {
  expect_magic(in, kMlpMagic, "MLP");
  const auto act = get<std::int32_t>(in) == 0 ? Activation::Relu : Activation::Identity;
  const auto layers = get<std::int32_t>(in);
  if (layers < 1 || layers > 64) throw Error("corrupt MLP header");
  std::vector<MatrixX<float>> w;
  std::vector<VectorX<float>> b;
  for (int l = 0; l < layers; ++l) {
    w.push_back(get_matrix<MatrixX<float>>(in));
    b.push_back(get_matrix<VectorX<float>>(in));
  }
  return Mlp<float>::from_layers(std::move(w), std::move(b), act);
}

void save_model(const MitigationModel& model, const std::string& path) {
  atomic_write(path, [&](std::ostream& out) {
    out.write(kModelMagic, 8);
    put<std::int32_t>(out, model.num_spins);
    put<std::int32_t>(out, model.layers);
    put<std::int32_t>(out, model.trained_step);
    const Eigen::VectorXd center = model.center.theta.size() ? model.center.theta : Eigen::VectorXd();
    put_matrix(out, center);
    put<std::int32_t>(out, static_cast<std::int32_t>(model.networks.size()));
    for (const auto& net : model.networks) save_mlp(net, out);
  });
}

MitigationModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path);
  expect_magic(in, kModelMagic, "mitigation model");
  MitigationModel m;
  m.num_spins = get<std::int32_t>(in);
  m.layers = get<std::int32_t>(in);
  m.trained_step = get<std::int32_t>(in);
  m.center = AnsatzParams{m.num_spins, m.layers, get_matrix<Eigen::VectorXd>(in)};
  const auto count = get<std::int32_t>(in);
  if (count != 2 * m.num_spins) throw Error("model must hold 2N networks");
  for (int j = 0; j < count; ++j) {
    m.networks.push_back(load_mlp(in));
    if (m.networks.back().input_size() != feature_size(m.num_spins, m.layers)) {
      throw Error("network input size does not match (N, P)");
    }
  }
  return m;
}

}  // namespace mitiknit
