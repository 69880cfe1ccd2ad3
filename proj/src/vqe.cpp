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

#include "mitiknit/vqe.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>

#include "mitiknit/parallel.hpp"
#include "mitiknit/rng.hpp"

namespace mitiknit {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

Eigen::VectorXd clip_unit(Eigen::VectorXd v) { return v.cwiseMax(-1.0).cwiseMin(1.0); }

Eigen::VectorXd exact_values(const Circuit& circuit) { return ising_expectations(run_pure(circuit)); }

}  // namespace

// --- Baselines -------------------------------------------------------------------

Eigen::VectorXd zne_extrapolate(std::span<const double> scales, std::span<const Eigen::VectorXd> values) {
  if (scales.size() < 2 || scales.size() != values.size()) throw Error("extrapolation needs >= 2 matching points");
  const double n = static_cast<double>(scales.size());
  const double mean_x = std::accumulate(scales.begin(), scales.end(), 0.0) / n;
  double sxx = 0.0;
  for (double x : scales) sxx += (x - mean_x) * (x - mean_x);
  if (sxx == 0.0) throw Error("extrapolation needs distinct scale factors");
  Eigen::VectorXd mean_y = Eigen::VectorXd::Zero(values.front().size());
  for (const auto& v : values) mean_y += v;
  mean_y /= n;
  Eigen::VectorXd sxy = Eigen::VectorXd::Zero(mean_y.size());
  for (std::size_t i = 0; i < scales.size(); ++i) sxy += (scales[i] - mean_x) * (values[i] - mean_y);
  const Eigen::VectorXd slope = sxy / sxx;
  return mean_y - mean_x * slope;
}

Eigen::VectorXd zne_mitigate(const Circuit& circuit, const IsingInstance& instance, const NoiseProfile& profile,
                             Shots shots, std::uint64_t seed) {
  const std::array<double, 3> scales{1.0, 3.0, 5.0};
  std::array<Eigen::VectorXd, 3> values;
  for (int k = 0; k < 3; ++k) {
    values[static_cast<std::size_t>(k)] = noisy_expectations(fold(circuit, k), instance, profile, shots, seed).values;
  }
  return clip_unit(zne_extrapolate(scales, values));
}

Circuit damping_circuit(const Circuit& circuit) {
  const Circuit native = transpile(circuit);
  Circuit out(circuit.width());
  for (const Gate& g : native.gates()) {
    if (g.kind == GateKind::RX || g.kind == GateKind::RZ) continue;
    out.add(g);
  }
  return out;
}

DmResult dm_mitigate(const Circuit& circuit, const IsingInstance& instance, const NoiseProfile& profile, Shots shots,
                     bool use_zne, std::uint64_t seed) {
  const int n = instance.num_spins;
  const Circuit damp = damping_circuit(circuit);
  const std::uint64_t ts = derive_seed(seed, "target");
  const std::uint64_t ds = derive_seed(seed, "damping");
  const Eigen::VectorXd target = use_zne ? zne_mitigate(circuit, instance, profile, shots, ts)
                                         : noisy_expectations(circuit, instance, profile, shots, ts).values;
  const Eigen::VectorXd noisy_damp = use_zne ? zne_mitigate(damp, instance, profile, shots, ds)
                                             : noisy_expectations(damp, instance, profile, shots, ds).values;
  const Eigen::VectorXd ideal_damp = exact_values(damp);

  const Eigen::Index m = 2 * n;
  DmResult out;
  out.damping = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  std::array<double, 2> sector_sum{0.0, 0.0};
  std::array<int, 2> sector_count{0, 0};
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(ideal_damp(i)) > 0.1) {
      out.damping(i) = noisy_damp(i) / ideal_damp(i);
      const int s = i < n ? 0 : 1;
      sector_sum[static_cast<std::size_t>(s)] += out.damping(i);
      ++sector_count[static_cast<std::size_t>(s)];
    }
  }
  const int total = sector_count[0] + sector_count[1];
  if (total == 0) throw Error("damping circuit has no observable with usable ideal value");
  const double global = (sector_sum[0] + sector_sum[1]) / total;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!std::isnan(out.damping(i))) continue;
    const std::size_t s = i < n ? 0 : 1;
    out.damping(i) = sector_count[s] > 0 ? sector_sum[s] / sector_count[s] : global;
  }
  out.values = target;
  for (int s = 0; s < 2; ++s) {
    const Eigen::Index first = s == 0 ? 0 : n;
    const Eigen::VectorXd d = out.damping.segment(first, n);
    if ((d.array() < 0.01).all()) {
      out.refused[static_cast<std::size_t>(s)] = true;
      continue;
    }
    out.values.segment(first, n) = target.segment(first, n).cwiseQuotient(d);
  }
  out.values = clip_unit(out.values);
  return out;
}

// --- Evaluator -------------------------------------------------------------------

std::string_view to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::Noiseless: return "noiseless";
    case EvalMode::Noisy: return "noisy";
    case EvalMode::NoisyDlem: return "dlem";
    case EvalMode::NoisyZne: return "zne";
    case EvalMode::NoisyDm: return "dm";
    case EvalMode::NoisyDmZne: return "dm_zne";
  }
  return "?";
}

EvalMode eval_mode_from_string(std::string_view name) {
  for (EvalMode m : {EvalMode::Noiseless, EvalMode::Noisy, EvalMode::NoisyDlem, EvalMode::NoisyZne, EvalMode::NoisyDm,
                     EvalMode::NoisyDmZne}) {
    if (to_string(m) == name) return m;
  }
  throw Error("unknown evaluator mode '" + std::string(name) + "'");
}

Evaluator::Evaluator(EvalMode mode, IsingInstance instance, int layers, NoiseProfile profile, Shots shots,
                     std::uint64_t seed)
    : mode_(mode),
      instance_(std::move(instance)),
      layers_(layers),
      profile_(std::move(profile)),
      shots_(shots),
      seed_(seed) {
  if (layers_ < 1) throw Error("ansatz needs at least one layer");
  if (shots_.count < 0) throw Error("shot count must be non-negative");
  profile_.validate();
}

void Evaluator::set_model(std::shared_ptr<const MitigationModel> model) {
  if (model && (model->num_spins != instance_.num_spins || model->layers != layers_)) {
    throw Error("mitigation model does not match (N, P)");
  }
  model_ = std::move(model);
}

Circuit Evaluator::circuit(const AnsatzParams& params) const {
  return patch_ ? patch_circuit(instance_, layers_, params, *patch_) : build_ansatz(instance_, layers_, params);
}

Eigen::VectorXd Evaluator::raw_values(const AnsatzParams& params) const {
  const Circuit c = circuit(params);
  switch (mode_) {
    case EvalMode::Noiseless: return exact_values(c);
    case EvalMode::Noisy:
    case EvalMode::NoisyDlem: return noisy_expectations(c, instance_, profile_, shots_, seed_).values;
    case EvalMode::NoisyZne: return zne_mitigate(c, instance_, profile_, shots_, seed_);
    case EvalMode::NoisyDm: return dm_mitigate(c, instance_, profile_, shots_, false, seed_).values;
    case EvalMode::NoisyDmZne: return dm_mitigate(c, instance_, profile_, shots_, true, seed_).values;
  }
  throw Error("unknown evaluator mode");
}

Evaluation Evaluator::evaluate(const AnsatzParams& params) const {
  return std::move(evaluate_many(std::span<const AnsatzParams>(&params, 1)).front());
}

std::vector<Evaluation> Evaluator::evaluate_many(std::span<const AnsatzParams> params) const {
  if (mode_ == EvalMode::NoisyDlem && !model_) throw Error("DLEM evaluation needs a trained mitigation model");
  std::vector<Evaluation> out(params.size());
  parallel_for(params.size(), [&](std::size_t i) { out[i].values = raw_values(params[i]); });
  if (mode_ == EvalMode::NoisyDlem && !params.empty()) {
    Eigen::MatrixXd features(feature_size(instance_.num_spins, layers_), static_cast<Eigen::Index>(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
      features.col(static_cast<Eigen::Index>(i)) = featurize(out[i].values, params[i]);
    }
    const Eigen::MatrixXd mitigated = model_->predict(features);
    for (std::size_t i = 0; i < params.size(); ++i) out[i].values = mitigated.col(static_cast<Eigen::Index>(i));
  }
  for (auto& e : out) e.energy = energy_from_expectations(instance_, e.values);
  return out;
}

ShiftGradient parameter_shift_gradient(const Evaluator& evaluator, const AnsatzParams& params) {
  const Eigen::Index m = params.theta.size();
  std::vector<AnsatzParams> points;
  points.reserve(static_cast<std::size_t>(2 * m + 1));
  points.push_back(params);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (double s : {kHalfPi, -kHalfPi}) {
      AnsatzParams p = params;
      p.theta(j) += s;
      points.push_back(std::move(p));
    }
  }
  const std::vector<Evaluation> ev = evaluator.evaluate_many(points);
  ShiftGradient g;
  g.center = ev[0];
  g.gradient.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double up = ev[static_cast<std::size_t>(1 + 2 * j)].energy;
    const double down = ev[static_cast<std::size_t>(2 + 2 * j)].energy;
    g.plus.push_back(up);
    g.minus.push_back(down);
    g.gradient(j) = 0.5 * (up - down);
  }
  return g;
}

// --- Traces ----------------------------------------------------------------------

std::uint64_t params_hash(const AnsatzParams& params) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(params.num_spins) << 32 | static_cast<std::uint32_t>(params.layers));
  for (double t : params.theta) h = mix64(h ^ std::bit_cast<std::uint64_t>(t));
  return h;
}

void VqeTrace::write_csv(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << "step,energy,mode,retrain_flag,wall_time,exact_energy\n" << std::setprecision(17);
    for (const auto& s : steps) {
      out << s.step << ',' << s.energy << ',' << to_string(s.mode) << ',' << (s.retrain ? 1 : 0) << ','
          << s.wall_time << ',' << s.exact_energy << '\n';
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename onto " + path);
}

// --- Optimizers ------------------------------------------------------------------

Adam::Adam(Eigen::Index size, double learning_rate, double beta1, double beta2, double epsilon)
    : m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)),
      lr_(learning_rate),
      b1_(beta1),
      b2_(beta2),
      eps_(epsilon) {
  if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
}

Eigen::VectorXd Adam::step(const Eigen::VectorXd& g) {
  if (g.size() != m_.size()) throw Error("gradient size mismatch");
  ++t_;
  m_ = b1_ * m_ + (1.0 - b1_) * g;
  v_ = b2_ * v_ + (1.0 - b2_) * g.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  return (-lr_ * (m_ / c1).array() / ((v_ / c2).array().sqrt() + eps_)).matrix();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double exact_energy_of(const Evaluator& ev, const AnsatzParams& theta, const Evaluation& e) {
  if (ev.mode() == EvalMode::Noiseless) return e.energy;
  return energy_from_expectations(ev.instance(), exact_values(ev.circuit(theta)));
}

}  // namespace

OptimizeResult adam_optimize(Evaluator& evaluator, const AnsatzParams& theta0, const AdamOptions& options) {
  if (options.steps < 1) throw Error("optimizer needs at least one step");
  OptimizeResult res;
  res.theta = theta0;
  Adam adam(theta0.theta.size(), options.learning_rate);
  const auto t0 = Clock::now();
  bool changed = false;
  res.budget_exhausted = true;
  for (int step = 0; step <= options.steps; ++step) {
    const bool last = step == options.steps;
    ShiftGradient g;
    if (last) {
      g.center = evaluator.evaluate(res.theta);
    } else {
      g = parameter_shift_gradient(evaluator, res.theta);
    }
    StepRecord rec;
    rec.step = step;
    rec.theta_hash = params_hash(res.theta);
    rec.energy = g.center.energy;
    rec.mode = evaluator.mode();
    rec.retrain = changed;
    rec.exact_energy = options.record_exact ? exact_energy_of(evaluator, res.theta, g.center) : rec.energy;
    rec.wall_time = seconds_since(t0);
    res.trace.steps.push_back(rec);
    res.trace.evaluations.push_back({step, rec.theta_hash, rec.energy});
    for (std::size_t j = 0; j < g.plus.size(); ++j) {
      AnsatzParams p = res.theta;
      p.theta(static_cast<Eigen::Index>(j)) += kHalfPi;
      res.trace.evaluations.push_back({step, params_hash(p), g.plus[j]});
      p.theta(static_cast<Eigen::Index>(j)) -= 2 * kHalfPi;
      res.trace.evaluations.push_back({step, params_hash(p), g.minus[j]});
    }
    if (!std::isfinite(rec.energy) || !g.gradient.allFinite()) {
      throw OptimizationError("non-finite energy or gradient at step " + std::to_string(step), res.trace);
    }
    res.energy = rec.energy;
    if (last) break;
    if (options.stop && options.stop(res.trace)) {
      res.budget_exhausted = false;
      break;
    }
    res.theta.theta += adam.step(g.gradient);
    changed = options.after_step ? options.after_step(step + 1, res.theta, evaluator) : false;
  }
  return res;
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options) {
  const Eigen::Index n = x0.size();
  if (n < 1) throw Error("Nelder-Mead needs at least one dimension");
  if (options.max_evaluations < n + 1) throw Error("Nelder-Mead budget below n + 1 evaluations");
  const double dn = static_cast<double>(n);
  const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 1.0 / (2.0 * dn), delta = 1.0 - 1.0 / dn;

  NelderMeadResult res;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    return f(x);
  };
  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> values;
  simplex.push_back(x0);
  values.push_back(eval(x0));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = x0;
    x(i) += options.initial_step;
    simplex.push_back(x);
    values.push_back(eval(x));
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(n + 1));
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (values[worst] - values[best] <= options.tolerance) break;
    if (res.evaluations + 2 > options.max_evaluations) {
      res.budget_exhausted = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= dn;
    const Eigen::VectorXd xr = centroid + alpha * (centroid - simplex[worst]);
    const double fr = eval(xr);
    if (fr < values[best]) {
      const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + gamma * (xr - centroid))
                                       : Eigen::VectorXd(centroid - gamma * (centroid - simplex[worst]));
    const double fc = eval(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    if (res.evaluations + n > options.max_evaluations) {
      res.budget_exhausted = true;
      break;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + delta * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  res.x = simplex[static_cast<std::size_t>(it - values.begin())];
  res.value = *it;
  return res;
}

OptimizeResult gradient_free_optimize(Evaluator& evaluator, const AnsatzParams& theta0, int budget,
                                      bool record_exact) {
  const int m = static_cast<int>(theta0.theta.size());
  if (budget < 2 * m + 1) throw Error("gradient-free budget must be at least 2NP + 1 evaluations");
  OptimizeResult res;
  res.theta = theta0;
  const auto t0 = Clock::now();
  double best = std::numeric_limits<double>::infinity();
  int count = 0;
  auto f = [&](const Eigen::VectorXd& x) {
    AnsatzParams p = theta0;
    p.theta = x;
    const Evaluation e = evaluator.evaluate(p);
    if (!std::isfinite(e.energy)) throw OptimizationError("non-finite energy", res.trace);
    const std::uint64_t h = params_hash(p);
    res.trace.evaluations.push_back({count, h, e.energy});
    if (e.energy < best) {
      best = e.energy;
      StepRecord rec;
      rec.step = count;
      rec.theta_hash = h;
      rec.energy = e.energy;
      rec.mode = evaluator.mode();
      rec.exact_energy = record_exact ? exact_energy_of(evaluator, p, e) : e.energy;
      rec.wall_time = seconds_since(t0);
      res.trace.steps.push_back(rec);
    }
    ++count;
    return e.energy;
  };
  NelderMeadOptions opt;
  opt.max_evaluations = budget;
  const NelderMeadResult nm = nelder_mead(f, theta0.theta, opt);
  res.theta.theta = nm.x;
  res.energy = nm.value;
  res.budget_exhausted = nm.budget_exhausted;
  return res;
}

AnsatzParams patch_initialize(const IsingInstance& instance, int layers, std::uint64_t seed,
                              const PatchInitOptions& options) {
  const int n = instance.num_spins;
  const PatchSpec patch{options.cut_site};
  patch.validate(n);
  AnsatzParams theta = AnsatzParams::zeros(n, layers);
  Rng rng = make_rng(seed);
  std::normal_distribution<double> init(0.0, options.init_scale);
  for (auto& t : theta.theta) t = init(rng);
  Evaluator ev(EvalMode::Noiseless, instance, layers);
  ev.set_patch(patch);
  AdamOptions ao;
  ao.steps = options.steps;
  ao.learning_rate = options.learning_rate;
  ao.record_exact = false;
  AnsatzParams out = adam_optimize(ev, theta, ao).theta;
  const auto bonds = patch.cut_bonds(n);
  for (int p = 0; p < layers; ++p) {
    out.at(p, ParamKind::ZZ, bonds[0]) = 0.0;
    out.at(p, ParamKind::ZZ, bonds[1]) = 0.0;
  }
  return out;
}

// --- Pipelines ---------------------------------------------------------------------

bool energy_plateau(const VqeTrace& trace, int window, double tolerance) {
  const auto& s = trace.steps;
  if (window < 1 || static_cast<int>(s.size()) <= window) return false;
  const auto split = s.end() - window;
  auto lower = [](const StepRecord& a, const StepRecord& b) { return a.energy < b.energy; };
  const double before = std::min_element(s.begin(), split, lower)->energy;
  const double now = std::min(before, std::min_element(split, s.end(), lower)->energy);
  return before - now < tolerance;
}

namespace {

AdamOptions adam_options(const VqeConfig& config, int num_spins) {
  AdamOptions ao;
  ao.steps = config.steps;
  ao.learning_rate = config.learning_rate;
  ao.record_exact = config.record_exact;
  if (config.stop_on_plateau) {
    const int window = config.plateau_window;
    const double tol = config.plateau_tolerance_per_spin * num_spins;
    ao.stop = [window, tol](const VqeTrace& t) { return energy_plateau(t, window, tol); };
  }
  return ao;
}

VqeResult finish(const Evaluator& ev, AnsatzParams initial, OptimizeResult opt) {
  VqeResult out;
  out.initial = std::move(initial);
  out.theta = std::move(opt.theta);
  out.trace = std::move(opt.trace);
  out.final_energy = opt.energy;
  out.exact_final_energy = energy_from_expectations(ev.instance(), exact_values(build_ansatz(ev.instance(), ev.layers(), out.theta)));
  return out;
}

}  // namespace

VqeResult run_vqe(const IsingInstance& instance, int layers, EvalMode mode, const NoiseProfile& profile, Shots shots,
                  const VqeConfig& config, std::uint64_t seed) {
  if (mode == EvalMode::NoisyDlem) return dlem_vqe(instance, layers, profile, shots, config, seed);
  AnsatzParams initial = patch_initialize(instance, layers, derive_seed(seed, "patch"), config.patch);
  Evaluator ev(mode, instance, layers, profile, shots, derive_seed(seed, "shots"));
  OptimizeResult opt = adam_optimize(ev, initial, adam_options(config, instance.num_spins));
  return finish(ev, std::move(initial), std::move(opt));
}

VqeResult dlem_vqe(const IsingInstance& instance, int layers, const NoiseProfile& profile, Shots shots,
                   const VqeConfig& config, std::uint64_t seed) {
  if (config.retrain_every < 1) throw Error("retrain interval must be positive");
  AnsatzParams initial = patch_initialize(instance, layers, derive_seed(seed, "patch"), config.patch);
  Evaluator ev(EvalMode::NoisyDlem, instance, layers, profile, shots, derive_seed(seed, "shots"));
  std::shared_ptr<const MitigationModel> current;
  int retrains = 0;
  auto train_at = [&](const AnsatzParams& center, int step) {
    TrainingSetConfig tc = config.training;
    tc.noisy_shots = shots;
    const std::string tag = std::to_string(retrains);
    const Dataset data = generate_training_set(center, config.k_train, instance, layers, profile, tc,
                                               derive_seed(seed, "dataset" + tag));
    if (config.on_dataset) config.on_dataset(retrains, data);
    TrainConfig trc = config.train;
    trc.seed = derive_seed(seed, "mlp" + tag);
    auto model = std::make_shared<MitigationModel>(
        train_model(data, trc, config.hidden, config.warm_start && current ? current.get() : nullptr));
    model->center = center;
    model->trained_step = step;
    current = model;
    ev.set_model(current);
    ++retrains;
  };
  train_at(initial, 0);
  AdamOptions ao = adam_options(config, instance.num_spins);
  ao.after_step = [&](int step, const AnsatzParams& theta, Evaluator&) {
    if (step % config.retrain_every != 0) return false;
    train_at(theta, step);
    return true;
  };
  OptimizeResult opt = adam_optimize(ev, initial, ao);
  VqeResult out = finish(ev, std::move(initial), std::move(opt));
  out.model = current;
  out.retrains = retrains;
  return out;
}

BaselineReport compare_baselines(const IsingInstance& instance, int layers, const AnsatzParams& theta,
                                 const NoiseProfile& profile, Shots shots, const MitigationModel* model,
                                 std::uint64_t seed) {
  const Circuit c = build_ansatz(instance, layers, theta);
  auto energy = [&](const Eigen::VectorXd& v) { return energy_from_expectations(instance, v); };
  BaselineReport r;
  r.exact = energy(exact_values(c));
  const Eigen::VectorXd noisy = noisy_expectations(c, instance, profile, shots, derive_seed(seed, "noisy")).values;
  r.noisy = energy(noisy);
  r.dlem = model ? energy(model->predict(featurize(noisy, theta))) : std::numeric_limits<double>::quiet_NaN();
  r.zne = energy(zne_mitigate(c, instance, profile, shots, derive_seed(seed, "zne")));
  r.dm = energy(dm_mitigate(c, instance, profile, shots, false, derive_seed(seed, "dm")).values);
  r.dm_zne = energy(dm_mitigate(c, instance, profile, shots, true, derive_seed(seed, "dm_zne")).values);
  return r;
}

}  // namespace mitiknit
