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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mitiknit/circuit.hpp"
#include "mitiknit/rng.hpp"

namespace mitiknit {

enum class Activation { Relu, Identity };

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
struct MlpGradient {
  std::vector<MatrixX<Scalar>> weights;
  std::vector<VectorX<Scalar>> biases;
};

/// Fully connected network; hidden layers use `hidden`, the output layer is
/// linear. Inputs are column-major batches: one example per column.
template <class Scalar>
class Mlp {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;
  using Gradient = MlpGradient<Scalar>;

  Mlp() = default;

  /// He-normal weights, zero biases.
  Mlp(std::vector<int> widths, std::uint64_t seed, Activation hidden = Activation::Relu)
      : widths_(std::move(widths)), hidden_(hidden) {
    if (widths_.size() < 2) throw Error("an MLP needs at least input and output widths");
    for (int w : widths_) {
      if (w < 1) throw Error("layer widths must be positive");
    }
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      const double scale = std::sqrt(2.0 / widths_[l]);
      Matrix w(widths_[l + 1], widths_[l]);
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<Scalar>(scale * normal(rng));
      weights_.push_back(std::move(w));
      biases_.push_back(Vector::Zero(widths_[l + 1]));
    }
  }

  const std::vector<int>& widths() const { return widths_; }
  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  Activation hidden_activation() const { return hidden_; }

  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Vector>& biases() const { return biases_; }

  std::size_t num_parameters() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  bool is_finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    }
    return true;
  }

  Matrix forward(const Matrix& x) const {
    check_input(x);
    Matrix a = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = weights_[l] * a;
      z.colwise() += biases_[l];
      if (l + 1 < weights_.size()) activate(z);
      a = std::move(z);
    }
    return a;
  }

  /// Mean squared error over every output and column.
  Scalar loss(const Matrix& x, const Matrix& y) const {
    return (forward(x) - y).squaredNorm() / static_cast<Scalar>(y.size());
  }

  /// Mean squared error and its gradient by backpropagation.
  Scalar loss_and_gradient(const Matrix& x, const Matrix& y, Gradient& grad) const {
    check_input(x);
    const std::size_t nl = weights_.size();
    acts_.resize(nl + 1);
    acts_[0] = x;
    for (std::size_t l = 0; l < nl; ++l) {
      acts_[l + 1].noalias() = weights_[l] * acts_[l];
      acts_[l + 1].colwise() += biases_[l];
      if (l + 1 < nl) activate(acts_[l + 1]);
    }
    const Scalar count = static_cast<Scalar>(y.size());
    delta_ = acts_[nl] - y;
    const Scalar loss = delta_.squaredNorm() / count;
    delta_ *= Scalar(2) / count;
    grad.weights.resize(nl);
    grad.biases.resize(nl);
    for (std::size_t l = nl; l-- > 0;) {
      grad.weights[l].noalias() = delta_ * acts_[l].transpose();
      grad.biases[l] = delta_.rowwise().sum();
      if (l == 0) break;
      back_.noalias() = weights_[l].transpose() * delta_;
      if (hidden_ == Activation::Relu) back_ = (acts_[l].array() > Scalar(0)).select(back_, Scalar(0));
      delta_.swap(back_);
    }
    return loss;
  }

  template <class Other>
  Mlp<Other> cast() const {
    Mlp<Other> out;
    out.widths_ = widths_;
    out.hidden_ = hidden_;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.weights_.push_back(weights_[l].template cast<Other>());
      out.biases_.push_back(biases_[l].template cast<Other>());
    }
    return out;
  }

  /// Rebuilds a network from raw layers (persistence).
  static Mlp from_layers(std::vector<Matrix> weights, std::vector<Vector> biases, Activation hidden) {
    if (weights.empty() || weights.size() != biases.size()) throw Error("inconsistent MLP layers");
    Mlp out;
    out.hidden_ = hidden;
    out.widths_.push_back(static_cast<int>(weights.front().cols()));
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].cols() != out.widths_.back() || biases[l].size() != weights[l].rows()) {
        throw Error("incompatible consecutive MLP layer shapes");
      }
      out.widths_.push_back(static_cast<int>(weights[l].rows()));
    }
    out.weights_ = std::move(weights);
    out.biases_ = std::move(biases);
    return out;
  }

 private:
  template <class>
  friend class Mlp;

  void check_input(const Matrix& x) const {
    if (weights_.empty()) throw Error("MLP has no layers");
    if (x.rows() != widths_.front()) throw Error("MLP input dimension mismatch");
  }

  void activate(Matrix& z) const {
    if (hidden_ == Activation::Relu) z = z.cwiseMax(Scalar(0));
  }

  std::vector<int> widths_;
  Activation hidden_ = Activation::Relu;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
  // Scratch for loss_and_gradient.
  mutable std::vector<Matrix> acts_;
  mutable Matrix delta_;
  mutable Matrix back_;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int max_epochs = 500;
  double validation_fraction = 0.1;
  int patience = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainReport {
  std::vector<double> train_loss;       // per epoch, mean over batches
  std::vector<double> validation_loss;  // per epoch
  int best_epoch = -1;
  double best_validation_loss = std::numeric_limits<double>::infinity();
  bool stopped_early = false;
  bool r2_defined = true;
  double validation_r2 = std::numeric_limits<double>::quiet_NaN();
};

/// 1 - sum (y - yhat)^2 / sum (y - mean y)^2. Throws when the targets have
/// zero variance.
double r2_score(std::span<const double> targets, std::span<const double> predictions);
double r2_score(const Eigen::VectorXd& targets, const Eigen::VectorXd& predictions);

namespace detail {

template <class Scalar>
struct AdamState {
  MlpGradient<Scalar> m, v;
  long step = 0;

  explicit AdamState(const Mlp<Scalar>& net) {
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
      m.weights.push_back(MatrixX<Scalar>::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
      m.biases.push_back(VectorX<Scalar>::Zero(net.biases()[l].size()));
    }
    v = m;
  }

  void update(Mlp<Scalar>& net, const MlpGradient<Scalar>& g, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++step;
    const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(b1, step));
    const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(b2, step));
    const Scalar rate = static_cast<Scalar>(lr);
    auto apply = [&](auto& param, auto& mm, auto& vv, const auto& gg) {
      mm = Scalar(b1) * mm + Scalar(1 - b1) * gg;
      vv.array() = Scalar(b2) * vv.array() + Scalar(1 - b2) * gg.array().square();
      param.array() -= rate * (mm.array() / c1) / ((vv.array() / c2).sqrt() + Scalar(eps));
    };
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
      apply(net.weights()[l], m.weights[l], v.weights[l], g.weights[l]);
      apply(net.biases()[l], m.biases[l], v.biases[l], g.biases[l]);
    }
  }
};

template <class Scalar>
MatrixX<Scalar> gather_columns(const MatrixX<Scalar>& x, std::span<const int> cols) {
  MatrixX<Scalar> out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
  return out;
}

}  // namespace detail

/// Mini-batch Adam on the mean squared error. `inputs` holds one example per
/// column, `targets` one row per network output. A seeded shuffle holds out
/// the validation fraction; training stops after `patience` epochs without
/// validation improvement and restores the best weights.
template <class Scalar>
TrainReport train(Mlp<Scalar>& net, const MatrixX<Scalar>& inputs, const MatrixX<Scalar>& targets,
                  const TrainConfig& config) {
  config.validate();
  const int k = static_cast<int>(inputs.cols());
  if (k < 10) throw Error("training needs at least 10 examples");
  if (targets.cols() != k || targets.rows() != net.output_size()) throw Error("target shape mismatch");
  if (inputs.rows() != net.input_size()) throw Error("input dimension mismatch");

  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng = make_rng(derive_seed(config.seed, "split"));
  std::shuffle(order.begin(), order.end(), split_rng);
  const int n_val = std::max(1, static_cast<int>(std::lround(config.validation_fraction * k)));
  const std::span<const int> val_idx(order.data(), static_cast<std::size_t>(n_val));
  std::vector<int> train_idx(order.begin() + n_val, order.end());
  const MatrixX<Scalar> xv = detail::gather_columns(inputs, val_idx);
  const MatrixX<Scalar> yv = detail::gather_columns(targets, val_idx);

  TrainReport report;
  Mlp<Scalar> best = net;
  detail::AdamState<Scalar> adam(net);
  MlpGradient<Scalar> grad;
  Rng rng = make_rng(derive_seed(config.seed, "batches"));
  int since_best = 0;
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < train_idx.size(); start += bs) {
      const std::size_t len = std::min(bs, train_idx.size() - start);
      const std::span<const int> idx(train_idx.data() + start, len);
      const MatrixX<Scalar> xb = detail::gather_columns(inputs, idx);
      const MatrixX<Scalar> yb = detail::gather_columns(targets, idx);
      total += static_cast<double>(net.loss_and_gradient(xb, yb, grad));
      ++batches;
      adam.update(net, grad, config.learning_rate);
    }
    if (!net.is_finite()) throw Error("training diverged: non-finite weights");
    const double vloss = static_cast<double>(net.loss(xv, yv));
    report.train_loss.push_back(total / static_cast<double>(std::max<std::size_t>(batches, 1)));
    report.validation_loss.push_back(vloss);
    if (vloss < report.best_validation_loss) {
      report.best_validation_loss = vloss;
      report.best_epoch = epoch;
      best = net;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      report.stopped_early = true;
      break;
    }
  }
  net = std::move(best);

  if (net.output_size() == 1) {
    const Eigen::VectorXd all = targets.row(0).transpose().template cast<double>();
    const Eigen::VectorXd y = yv.row(0).transpose().template cast<double>();
    if ((all.array() - all.mean()).square().sum() == 0.0) {
      report.r2_defined = false;
    } else if (y.size() >= 2 && (y.array() - y.mean()).square().sum() > 0.0) {
      const Eigen::VectorXd p = net.forward(xv).row(0).transpose().template cast<double>();
      report.validation_r2 = r2_score(y, p);
    }
  }
  return report;
}

}  // namespace mitiknit
