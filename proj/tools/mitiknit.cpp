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

// mitiknit: command-line front end for VQE runs, error-mitigation training,
// knitting checks, baselines, experiment sweeps and plotting.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mitiknit/experiments.hpp"
#include "mitiknit/knitting.hpp"
#include "mitiknit/mitigation.hpp"
#include "mitiknit/vqe.hpp"
#include "plot.hpp"

namespace fs = std::filesystem;
using namespace mitiknit;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

// Options naming a problem: an instance, an ansatz depth and a noise model.
struct Problem {
  std::string instance_path;
  int spins = 6;
  int instance_index = 0;
  int layers = 8;
  std::string profile_path;
  double p_noise = 1.0;
  std::int64_t shots = 1'000'000;
  std::uint64_t seed = 7;

  void add(CLI::App& app) {
    app.add_option("--instance", instance_path, "Ising instance JSON (default: random instance from --seed)");
    app.add_option("--spins,-N", spins, "chain length N for a random instance")->check(CLI::Range(4, 14));
    app.add_option("--instance-index", instance_index, "index of the random instance")->check(CLI::NonNegativeNumber);
    app.add_option("--layers,-P", layers, "ansatz layers P")->check(CLI::Range(1, 32));
    app.add_option("--profile", profile_path, "noise profile JSON (default: $MITIKNIT_PROFILE or built-in)");
    app.add_option("--p-noise", p_noise, "noise scale in [0, 1]")->check(CLI::Range(0.0, 1.0));
    app.add_option("--shots,-S", shots, "shots per measurement setting, 0 = exact")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "root seed");
  }

  IsingInstance instance() const {
    if (!instance_path.empty()) return instance_from_json(read_json(instance_path));
    return experiment_instance(spins, instance_index, seed);
  }

  NoiseProfile profile() const {
    const NoiseProfile base = profile_path.empty() ? profile_from_environment() : load_profile(profile_path);
    return scale_profile(base, p_noise);
  }
};

AnsatzParams params_or_center(const std::string& path, const IsingInstance& inst, const Problem& p) {
  if (!path.empty()) {
    AnsatzParams a = params_from_json(read_json(path));
    if (a.num_spins != inst.num_spins || a.layers != p.layers)
      throw Error("parameter file does not match (N, P) = (" + std::to_string(inst.num_spins) + ", " +
                  std::to_string(p.layers) + ")");
    return a;
  }
  std::cerr << "no --params given; using the patch-initialized angles\n";
  return experiment_center(inst, p.layers, p.seed, p.instance_index);
}

// --- vqe-run -------------------------------------------------------------------

struct VqeRunOptions {
  Problem problem;
  std::string mode = "dlem";
  std::string optimizer = "adam";
  int steps = 100;
  double lr = 0.05;
  int cuts = 12;
  int k_train = 10000;
  int budget = 0;
  bool no_plateau = false;
  std::string out = "trace.csv";
  std::string params_out;
  std::string model_out;
};

int vqe_run(const VqeRunOptions& o) {
  const IsingInstance inst = o.problem.instance();
  const NoiseProfile prof = o.problem.profile();
  const EvalMode mode = eval_mode_from_string(o.mode);
  const double e0 = exact_ground_energy(inst);
  AnsatzParams theta;
  VqeTrace trace;
  double final_energy = 0.0;
  std::shared_ptr<const MitigationModel> model;

  if (o.optimizer == "nelder-mead") {
    if (mode == EvalMode::NoisyDlem) throw Error("the gradient-free optimizer supports every mode except dlem");
    const AnsatzParams init = patch_initialize(inst, o.problem.layers, derive_seed(o.problem.seed, "patch"));
    Evaluator ev(mode, inst, o.problem.layers, prof, Shots{o.problem.shots}, derive_seed(o.problem.seed, "shots"));
    const int budget = o.budget > 0 ? o.budget : o.steps * (4 * inst.num_spins * o.problem.layers + 1);
    OptimizeResult r = gradient_free_optimize(ev, init, budget);
    theta = r.theta;
    trace = std::move(r.trace);
    final_energy = r.energy;
  } else {
    VqeConfig cfg;
    cfg.steps = o.steps;
    cfg.learning_rate = o.lr;
    cfg.stop_on_plateau = !o.no_plateau;
    cfg.k_train = o.k_train;
    cfg.training.cuts = o.cuts;
    cfg.on_dataset = [](int idx, const Dataset& d) {
      std::cerr << "retrain " << idx << ": " << d.size() << " training circuits\n";
    };
    VqeResult r = run_vqe(inst, o.problem.layers, mode, prof, Shots{o.problem.shots}, cfg, o.problem.seed);
    theta = r.theta;
    trace = std::move(r.trace);
    final_energy = r.final_energy;
    model = r.model;
  }
  trace.write_csv(o.out);
  if (!o.params_out.empty()) write_json(o.params_out, to_json(theta));
  if (!o.model_out.empty()) {
    if (!model) throw Error("--model-out needs --mode dlem");
    save_model(*model, o.model_out);
  }
  const double exact = trace.steps.empty() ? final_energy : trace.steps.back().exact_energy;
  std::cout << std::setprecision(8) << "mode " << o.mode << "\nsteps " << trace.steps.size()
            << "\nfinal_energy " << final_energy << "\nnoiseless_energy " << exact << "\nground_energy " << e0
            << "\nrelative_error " << std::abs((final_energy - e0) / e0) << "\ntrace " << o.out << "\n";
  return 0;
}

// --- train-em ------------------------------------------------------------------

struct TrainOptions {
  Problem problem;
  std::string center;
  int k_train = 10000;
  int cuts = 12;
  std::string targets = "exact";
  std::int64_t samples = 100;
  int k_test = 0;
  std::vector<int> hidden = kDefaultHidden;
  TrainConfig train;
  std::string out = "model.bin";
  std::string dataset_out;
};

int train_em(const TrainOptions& o) {
  const IsingInstance inst = o.problem.instance();
  const NoiseProfile prof = o.problem.profile();
  const AnsatzParams center = params_or_center(o.center, inst, o.problem);
  TrainingSetConfig tc;
  tc.cuts = o.cuts;
  tc.noisy_shots = Shots{o.problem.shots};
  tc.target_mode = o.targets == "sampled" ? TargetMode::Sampled : TargetMode::Exact;
  tc.target_samples = o.samples;
  std::cerr << "generating " << o.k_train << " training circuits\n";
  const Dataset data =
      generate_training_set(center, o.k_train, inst, o.problem.layers, prof, tc, derive_seed(o.problem.seed, "train-set"));
  if (!o.dataset_out.empty()) {
    if (o.dataset_out.ends_with(".csv")) write_dataset_csv(data, o.dataset_out);
    else save_dataset(data, o.dataset_out);
  }
  TrainConfig trc = o.train;
  trc.seed = derive_seed(o.problem.seed, "mlp");
  std::cerr << "training " << 2 * inst.num_spins << " networks\n";
  MitigationModel model = train_model(data, trc, o.hidden);
  model.center = center;
  save_model(model, o.out);
  std::cout << "network,best_epoch,validation_r2\n";
  for (std::size_t j = 0; j < model.reports.size(); ++j)
    std::cout << j << ',' << model.reports[j].best_epoch << ',' << model.reports[j].validation_r2 << "\n";
  if (o.k_test > 0) {
    const Dataset test = full_circuit_test_set("", center, o.k_test, inst, o.problem.layers, prof,
                                               Shots{o.problem.shots}, derive_seed(o.problem.seed, "test-set"));
    std::cout << "test_median_one_minus_r2 " << median_one_minus_r2(model, test) << "\n";
  }
  std::cout << "model " << o.out << "\n";
  return 0;
}

// --- knit-eval -----------------------------------------------------------------

struct KnitOptions {
  Problem problem;
  std::string layout;
  std::string params;
  std::string mode = "exact";
  std::int64_t samples = 100000;
};

int knit_eval(const KnitOptions& o) {
  const IsingInstance inst = o.problem.instance();
  const int n = inst.num_spins;
  const CutLayout layout = layout_from_json(read_json(o.layout));
  if (layout.layers() != o.problem.layers)
    throw Error("layout has " + std::to_string(layout.layers()) + " layers but --layers is " +
                std::to_string(o.problem.layers));
  layout.validate(n, o.problem.layers);
  const AnsatzParams cut = apply_cuts(params_or_center(o.params, inst, o.problem), layout);
  const KnitPlan plan = split(inst, o.problem.layers, cut, layout);
  const auto angles = knitted_angles(cut, layout);
  Eigen::VectorXd knitted;
  if (o.mode == "exact") {
    knitted = knit_exact(plan);
  } else if (o.mode == "sampled") {
    knitted = knit_sampled(plan, o.samples, derive_seed(o.problem.seed, "knit"));
  } else {
    throw Error("--mode must be exact or sampled");
  }
  const Eigen::VectorXd full = ising_expectations(run_pure(build_ansatz(inst, o.problem.layers, cut)));
  std::cout << "knitted_gates " << plan.num_knitted() << "\noverhead " << overhead(angles) << "\n";
  std::cout << std::setprecision(12) << "observable,knitted,statevector\n";
  const auto obs = ising_observables(n);
  for (int i = 0; i < 2 * n; ++i)
    std::cout << obs[static_cast<std::size_t>(i)].to_string() << ',' << knitted(i) << ',' << full(i) << "\n";
  std::cout << "max_abs_difference " << (knitted - full).cwiseAbs().maxCoeff() << "\n";
  std::cout << "energy_knitted " << energy_from_expectations(inst, knitted) << "\nenergy_statevector "
            << energy_from_expectations(inst, full) << "\n";
  return 0;
}

// --- baselines -----------------------------------------------------------------

struct BaselineOptions {
  Problem problem;
  std::string params;
  std::string model;
};

int baselines(const BaselineOptions& o) {
  const IsingInstance inst = o.problem.instance();
  const AnsatzParams theta = params_or_center(o.params, inst, o.problem);
  std::optional<MitigationModel> model;
  if (!o.model.empty()) model = load_model(o.model);
  const BaselineReport r = compare_baselines(inst, o.problem.layers, theta, o.problem.profile(),
                                             Shots{o.problem.shots}, model ? &*model : nullptr, o.problem.seed);
  const double e0 = exact_ground_energy(inst);
  std::cout << std::setprecision(8) << "method,energy,abs_error_vs_noiseless,relative_error_vs_ground\n";
  auto row = [&](const char* name, double e) {
    std::cout << name << ',' << e << ',' << std::abs(e - r.exact) << ',' << std::abs((e - e0) / e0) << "\n";
  };
  row("noiseless", r.exact);
  row("noisy", r.noisy);
  if (model) row("dlem", r.dlem);
  row("zne", r.zne);
  row("dm", r.dm);
  row("dm_zne", r.dm_zne);
  return 0;
}

// --- sweep -----------------------------------------------------------------------

struct SweepOptions {
  std::string config;
  std::string output_dir;
  std::string cache_dir;
  std::string write_template;
  std::vector<std::string> summarize;
  std::string summary_out;
  bool dry_run = false;
};

int sweep(const SweepOptions& o) {
  if (!o.write_template.empty()) {
    ExperimentConfig c;
    c.kind = experiment_kind_from_string(o.write_template);
    const std::string path = o.config.empty() ? o.write_template + ".json" : o.config;
    save_config(c, path);
    std::cout << "wrote " << path << "\n";
    return 0;
  }
  if (!o.summarize.empty()) {
    std::vector<RunManifest> ms;
    for (const auto& p : o.summarize) ms.push_back(load_manifest(fs::is_directory(p) ? (fs::path(p) / "manifest.json").string() : p));
    const std::string csv = summary_csv(emit_summary(ms));
    if (!o.summary_out.empty()) write_file_atomic(o.summary_out, csv);
    std::cout << csv;
    return 0;
  }
  if (o.config.empty()) throw Error("sweep needs --config (or --template / --summarize)");
  ExperimentConfig c = load_config(o.config);
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (!o.cache_dir.empty()) c.cache_dir = o.cache_dir;
  const auto diags = validate_config(c);
  for (const auto& d : diags) std::cerr << (d.severity == Severity::Error ? "error: " : "warning: ") << d.message << "\n";
  if (has_errors(diags)) return 1;
  std::cerr << "experiment " << to_string(c.kind) << ", config " << config_hash(c) << ", estimated "
            << std::setprecision(2) << estimate_runtime_seconds(c) / 60.0 << " min single-worker\n";
  if (o.dry_run) return 0;
  const RunManifest m = run_experiment(c, &std::cerr);
  for (const auto& f : m.files) std::cout << (fs::path(c.output_dir) / f.path).string() << "\n";
  return 0;
}

// --- plot --------------------------------------------------------------------------

struct PlotOptions {
  std::string csv;
  std::string out;
  std::string x, y, series;
  int log_y = -1;
};

int plot(const PlotOptions& o) {
  const tools::CsvData data = tools::read_csv(o.csv);
  tools::PlotSpec spec = tools::default_spec(data);
  if (!o.x.empty()) spec.x = o.x;
  if (!o.y.empty()) spec.y = o.y;
  if (!o.series.empty()) spec.series = o.series == "none" ? "" : o.series;
  if (o.log_y >= 0) spec.log_y = o.log_y != 0;
  if (spec.title.empty()) spec.title = fs::path(o.csv).filename().string();
  const std::string out = o.out.empty() ? fs::path(o.csv).replace_extension(".svg").string() : o.out;
  write_file_atomic(out, tools::render_svg(data, spec));
  std::cout << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mitiknit: deep-learned error mitigation with partial circuit knitting"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "worker threads (overrides MITIKNIT_WORKERS)")->check(CLI::PositiveNumber);

  VqeRunOptions vo;
  auto* vqe = app.add_subcommand("vqe-run", "run VQE with one evaluator mode; writes the step trace CSV");
  vo.problem.add(*vqe);
  vqe->add_option("--mode", vo.mode, "noiseless|noisy|dlem|zne|dm|dm_zne")
      ->check(CLI::IsMember({"noiseless", "noisy", "dlem", "zne", "dm", "dm_zne"}));
  vqe->add_option("--optimizer", vo.optimizer, "adam|nelder-mead")->check(CLI::IsMember({"adam", "nelder-mead"}));
  vqe->add_option("--steps", vo.steps, "optimizer steps")->check(CLI::PositiveNumber);
  vqe->add_option("--lr", vo.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  vqe->add_option("--cuts,-C", vo.cuts, "cuts per training circuit (dlem)")->check(CLI::NonNegativeNumber);
  vqe->add_option("--k-train", vo.k_train, "training circuits per retrain (dlem)")->check(CLI::Range(10, 10'000'000));
  vqe->add_option("--budget", vo.budget, "evaluation budget of the gradient-free optimizer");
  vqe->add_flag("--no-plateau", vo.no_plateau, "always run the full step budget");
  vqe->add_option("--out,-o", vo.out, "trace CSV path");
  vqe->add_option("--params-out", vo.params_out, "write the final angles as JSON");
  vqe->add_option("--model-out", vo.model_out, "write the last mitigation model (dlem)");

  TrainOptions to;
  auto* tr = app.add_subcommand("train-em", "generate a knitted training set and train the mitigation networks");
  to.problem.add(*tr);
  tr->add_option("--center", to.center, "center angles JSON (default: patch initialization)");
  tr->add_option("--k-train", to.k_train, "training circuits")->check(CLI::Range(10, 10'000'000));
  tr->add_option("--cuts,-C", to.cuts, "cuts per training circuit")->check(CLI::NonNegativeNumber);
  tr->add_option("--targets", to.targets, "exact|sampled")->check(CLI::IsMember({"exact", "sampled"}));
  tr->add_option("--samples", to.samples, "knitting samples per setting for sampled targets")->check(CLI::PositiveNumber);
  tr->add_option("--k-test", to.k_test, "full-circuit test set size (0 = skip)")->check(CLI::NonNegativeNumber);
  tr->add_option("--hidden", to.hidden, "hidden layer widths")->expected(1, 16);
  tr->add_option("--epochs", to.train.max_epochs, "epoch budget")->check(CLI::PositiveNumber);
  tr->add_option("--batch", to.train.batch_size, "mini-batch size")->check(CLI::PositiveNumber);
  tr->add_option("--train-lr", to.train.learning_rate, "network learning rate")->check(CLI::PositiveNumber);
  tr->add_option("--patience", to.train.patience, "early-stop patience")->check(CLI::PositiveNumber);
  tr->add_option("--out,-o", to.out, "model file");
  tr->add_option("--dataset-out", to.dataset_out, "also write the training set (.csv or binary)");

  KnitOptions ko;
  auto* kn = app.add_subcommand("knit-eval", "reconstruct expectations of a cut circuit by knitting");
  ko.problem.add(*kn);
  kn->add_option("--layout", ko.layout, "cut layout JSON")->required();
  kn->add_option("--params", ko.params, "angles JSON (default: patch initialization)");
  kn->add_option("--mode", ko.mode, "exact|sampled")->check(CLI::IsMember({"exact", "sampled"}));
  kn->add_option("--samples", ko.samples, "samples per setting in sampled mode")->check(CLI::PositiveNumber);

  BaselineOptions bo;
  auto* bl = app.add_subcommand("baselines", "compare noisy, ZNE, damping-factor and DL-EM energies at fixed angles");
  bo.problem.add(*bl);
  bl->add_option("--params", bo.params, "angles JSON (default: patch initialization)");
  bl->add_option("--model", bo.model, "mitigation model from train-em or vqe-run");

  SweepOptions so;
  auto* sw = app.add_subcommand("sweep", "run a configured experiment (fig4..fig8) into CSV files and a manifest");
  sw->add_option("--config,-c", so.config, "experiment config JSON");
  sw->add_option("--output-dir", so.output_dir, "override the config's output directory");
  sw->add_option("--cache-dir", so.cache_dir, "dataset cache directory");
  sw->add_option("--template", so.write_template, "write a default config of this experiment kind and exit")
      ->check(CLI::IsMember({"fig4_trajectory", "fig5_pnoise_sweep", "fig6_cuts_sweep", "fig7_ktrain_sweep",
                             "fig8_shotnoise_training"}));
  sw->add_option("--summarize", so.summarize, "aggregate final energies of these manifests or run directories");
  sw->add_option("--summary-out", so.summary_out, "write the summary CSV here");
  sw->add_flag("--dry-run", so.dry_run, "validate and estimate only");

  PlotOptions po;
  auto* pl = app.add_subcommand("plot", "render a result CSV as SVG");
  pl->add_option("csv", po.csv, "result CSV")->required()->check(CLI::ExistingFile);
  pl->add_option("--out,-o", po.out, "SVG path (default: next to the CSV)");
  pl->add_option("--x", po.x, "x column");
  pl->add_option("--y", po.y, "y column");
  pl->add_option("--series", po.series, "series column, or 'none'");
  pl->add_option("--log-y", po.log_y, "1 = logarithmic y axis, 0 = linear");

  CLI11_PARSE(app, argc, argv);
  if (workers > 0) setenv("MITIKNIT_WORKERS", std::to_string(workers).c_str(), 1);

  try {
    if (*vqe) return vqe_run(vo);
    if (*tr) return train_em(to);
    if (*kn) return knit_eval(ko);
    if (*bl) return baselines(bo);
    if (*sw) return sweep(so);
    if (*pl) return plot(po);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
