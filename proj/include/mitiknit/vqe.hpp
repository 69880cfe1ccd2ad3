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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mitiknit/ising.hpp"
#include "mitiknit/mitigation.hpp"
#include "mitiknit/noise.hpp"

namespace mitiknit {

// --- Baselines -------------------------------------------------------------------

/// Least-squares line through (scale, value) per observable; returns the
/// intercepts.
Eigen::VectorXd zne_extrapolate(std::span<const double> scales, std::span<const Eigen::VectorXd> values);

/// Global folding with k = 0, 1, 2 (scale factors 1, 3, 5), linear
/// extrapolation to zero noise, clipped to [-1, 1].
Eigen::VectorXd zne_mitigate(const Circuit& circuit, const IsingInstance& instance, const NoiseProfile& profile,
                             Shots shots, std::uint64_t seed);

/// The transpiled circuit with every RX / RZ removed; H and CNOT are kept.
Circuit damping_circuit(const Circuit& circuit);

struct DmResult {
  Eigen::VectorXd values;
  Eigen::VectorXd damping;  // D per observable
  std::array<bool, 2> refused{false, false};  // ZZ sector, X sector
};

/// Divides noisy values by damping factors measured on the damping circuit.
/// Observables whose ideal damping value is below 0.1 in magnitude use the
/// average D of their sector, or of all usable observables when the sector
/// has none. A sector whose factors are all below 0.01 is left unmitigated.
DmResult dm_mitigate(const Circuit& circuit, const IsingInstance& instance, const NoiseProfile& profile, Shots shots,
                     bool use_zne, std::uint64_t seed);

// --- Evaluator -------------------------------------------------------------------

enum class EvalMode { Noiseless, Noisy, NoisyDlem, NoisyZne, NoisyDm, NoisyDmZne };

std::string_view to_string(EvalMode mode);
EvalMode eval_mode_from_string(std::string_view name);

struct Evaluation {
  Eigen::VectorXd values;  // canonical 2N expectations
  double energy = 0.0;
};

/// Maps ansatz parameters to (expectations, energy) in one of the modes.
/// With a patch set, circuits omit the two cut-bond RZZ columns.
class Evaluator {
 public:
  Evaluator(EvalMode mode, IsingInstance instance, int layers, NoiseProfile profile = noiseless_profile(),
            Shots shots = Shots::exact(), std::uint64_t seed = 0);

  EvalMode mode() const { return mode_; }
  const IsingInstance& instance() const { return instance_; }
  int layers() const { return layers_; }
  const NoiseProfile& profile() const { return profile_; }
  Shots shots() const { return shots_; }
  std::uint64_t seed() const { return seed_; }

  void set_patch(std::optional<PatchSpec> patch) { patch_ = patch; }
  void set_model(std::shared_ptr<const MitigationModel> model);
  const MitigationModel* model() const { return model_.get(); }

  Circuit circuit(const AnsatzParams& params) const;
  Evaluation evaluate(const AnsatzParams& params) const;
  /// Independent evaluations, run on MITIKNIT_WORKERS threads.
  std::vector<Evaluation> evaluate_many(std::span<const AnsatzParams> params) const;

 private:
  Eigen::VectorXd raw_values(const AnsatzParams& params) const;

  EvalMode mode_;
  IsingInstance instance_;
  int layers_;
  NoiseProfile profile_;
  Shots shots_;
  std::uint64_t seed_;
  std::optional<PatchSpec> patch_;
  std::shared_ptr<const MitigationModel> model_;
};

struct ShiftGradient {
  Eigen::VectorXd gradient;
  Evaluation center;
  std::vector<double> plus;   // E(theta_j + pi/2)
  std::vector<double> minus;  // E(theta_j - pi/2)
};

/// dE/dtheta_j = [E(theta_j + pi/2) - E(theta_j - pi/2)] / 2 for every j,
/// plus the unshifted evaluation.
ShiftGradient parameter_shift_gradient(const Evaluator& evaluator, const AnsatzParams& params);

// --- Traces ----------------------------------------------------------------------

std::uint64_t params_hash(const AnsatzParams& params);

struct StepRecord {
  int step = 0;
  std::uint64_t theta_hash = 0;
  double energy = 0.0;
  EvalMode mode = EvalMode::Noiseless;
  bool retrain = false;
  double wall_time = 0.0;
  double exact_energy = 0.0;  // noiseless energy of the same circuit
};

struct EvalRecord {
  int step = 0;
  std::uint64_t theta_hash = 0;
  double energy = 0.0;
};

struct VqeTrace {
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evaluations;

  /// Columns: step, energy, mode, retrain_flag, wall_time, exact_energy.
  void write_csv(const std::string& path) const;
};

class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, VqeTrace trace) : Error(what), trace_(std::move(trace)) {}
  const VqeTrace& trace() const { return trace_; }

 private:
  VqeTrace trace_;
};

// --- Optimizers ------------------------------------------------------------------

/// Adaptive-moment update with bias correction.
class Adam {
 public:
  explicit Adam(Eigen::Index size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);
  /// Returns the parameter increment for gradient g.
  Eigen::VectorXd step(const Eigen::VectorXd& g);
  long iterations() const { return t_; }

 private:
  Eigen::VectorXd m_, v_;
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
};

struct AdamOptions {
  int steps = 100;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  bool record_exact = true;
  /// Called after update `step` (1-based); returns true when the evaluator
  /// was changed (e.g. retrained).
  std::function<bool(int step, const AnsatzParams& theta, Evaluator& evaluator)> after_step;
  /// Checked after every step record; returning true stops early.
  std::function<bool(const VqeTrace& trace)> stop;
};

struct OptimizeResult {
  AnsatzParams theta;
  VqeTrace trace;
  double energy = 0.0;     // estimate at theta
  bool budget_exhausted = false;
};

OptimizeResult adam_optimize(Evaluator& evaluator, const AnsatzParams& theta0, const AdamOptions& options);

struct NelderMeadOptions {
  int max_evaluations = 10000;
  double initial_step = 0.2;
  double tolerance = 1e-10;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;
};

/// Adaptive Nelder-Mead simplex minimization.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options);

/// Derivative-free VQE: Nelder-Mead on the evaluator energy. Budget must be
/// at least 2NP + 1 evaluations.
OptimizeResult gradient_free_optimize(Evaluator& evaluator, const AnsatzParams& theta0, int budget,
                                      bool record_exact = true);

struct PatchInitOptions {
  int steps = 200;
  double learning_rate = 0.05;
  double init_scale = 0.1;
  int cut_site = 1;
};

/// Noiseless Adam on the patch circuit from small random angles; cut-bond
/// angles of the result are exactly 0.
AnsatzParams patch_initialize(const IsingInstance& instance, int layers, std::uint64_t seed,
                              const PatchInitOptions& options = {});

// --- Pipelines ---------------------------------------------------------------------

struct VqeConfig {
  int steps = 100;
  double learning_rate = 0.05;
  PatchInitOptions patch;
  bool stop_on_plateau = true;
  int plateau_window = 18;
  double plateau_tolerance_per_spin = 1e-4;
  bool record_exact = true;

  // DL-EM only.
  int retrain_every = 9;
  int k_train = 10000;
  TrainingSetConfig training;
  TrainConfig train;
  std::vector<int> hidden = kDefaultHidden;
  bool warm_start = true;
  /// Called with (retrain index, dataset) when a training set is generated.
  std::function<void(int, const Dataset&)> on_dataset;
};

struct VqeResult {
  AnsatzParams initial;
  AnsatzParams theta;
  VqeTrace trace;
  double final_energy = 0.0;        // the mode's estimate at theta
  double exact_final_energy = 0.0;  // noiseless energy at theta
  std::shared_ptr<const MitigationModel> model;
  int retrains = 0;
};

/// Best-energy plateau test: improvement below tol over the last `window`
/// step records.
bool energy_plateau(const VqeTrace& trace, int window, double tolerance);

/// Patch initialization, then Adam with the mode's evaluator.
VqeResult run_vqe(const IsingInstance& instance, int layers, EvalMode mode, const NoiseProfile& profile, Shots shots,
                  const VqeConfig& config, std::uint64_t seed);

/// The DL-EM loop: patch initialization, training around the current angles,
/// Adam on the mitigated energy, retraining every `retrain_every` steps.
VqeResult dlem_vqe(const IsingInstance& instance, int layers, const NoiseProfile& profile, Shots shots,
                   const VqeConfig& config, std::uint64_t seed);

struct BaselineReport {
  double exact = 0.0;
  double noisy = 0.0;
  double dlem = 0.0;
  double zne = 0.0;
  double dm = 0.0;
  double dm_zne = 0.0;
};

/// Energies of one circuit under every mitigation method.
BaselineReport compare_baselines(const IsingInstance& instance, int layers, const AnsatzParams& theta,
                                 const NoiseProfile& profile, Shots shots, const MitigationModel* model,
                                 std::uint64_t seed);

}  // namespace mitiknit
