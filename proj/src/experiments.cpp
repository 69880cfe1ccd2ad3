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

#include "mitiknit/experiments.hpp"

#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "mitiknit/rng.hpp"

namespace mitiknit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 5> kKindNames{{
    {ExperimentKind::Trajectory, "fig4_trajectory"},
    {ExperimentKind::PNoiseSweep, "fig5_pnoise_sweep"},
    {ExperimentKind::CutsSweep, "fig6_cuts_sweep"},
    {ExperimentKind::KTrainSweep, "fig7_ktrain_sweep"},
    {ExperimentKind::ShotNoise, "fig8_shotnoise_training"},
}};

// Hierarchical seed: root -> tag -> each integer coordinate in turn.
template <class... Ints>
std::uint64_t seed_for(std::uint64_t root, std::string_view tag, Ints... coords) {
  std::uint64_t s = derive_seed(root, tag);
  ((s = derive_seed(s, static_cast<std::uint64_t>(coords))), ...);
  return s;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json train_to_json(const TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},
          {"batch_size", t.batch_size},
          {"max_epochs", t.max_epochs},
          {"validation_fraction", t.validation_fraction},
          {"patience", t.patience}};
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

bool uses_knitted_targets(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::Trajectory:
    case ExperimentKind::PNoiseSweep:
      return std::find(c.methods.begin(), c.methods.end(), "dlem") != c.methods.end();
    case ExperimentKind::ShotNoise: return true;
    default: return false;
  }
}

double noisy_circuit_seconds(int n, int layers) {
  // Measured Pauli-engine cost: about 0.8 ms at N = 6, P = 8; x4 per 2 spins.
  return 8e-4 * std::pow(2.0, n - 6) * layers / 8.0;
}

double training_seconds(int n, int layers, int k, const ExperimentConfig& c) {
  const double features = 2.0 * n + 4.0 * n * layers;
  double flops_per_example = 0.0;
  double width = features;
  for (int h : c.hidden) {
    flops_per_example += 2.0 * width * h;
    width = h;
  }
  flops_per_example += 2.0 * width;
  // About 3x forward for backprop, ~60 effective epochs, ~2e10 flop/s.
  return 2.0 * n * 3.0 * flops_per_example * k * 60.0 / 2e10;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw Error("unknown experiment '" + std::string(name) + "'");
}

// --- Config ------------------------------------------------------------------------

json to_json(const ExperimentConfig& c) {
  return {{"schema_version", kConfigSchemaVersion},
          {"experiment", std::string(to_string(c.kind))},
          {"spins", c.spins},
          {"layers", c.layers},
          {"cuts", c.cuts},
          {"k_train", c.k_train},
          {"k_test", c.k_test},
          {"shots", c.shots},
          {"target_samples", c.target_samples},
          {"p_noise", c.p_noise},
          {"methods", c.methods},
          {"instances", c.instances},
          {"seed", c.seed},
          {"steps", c.steps},
          {"retrain_every", c.retrain_every},
          {"learning_rate", c.learning_rate},
          {"hidden", c.hidden},
          {"train", train_to_json(c.train)},
          {"profile", c.profile},
          {"output_dir", c.output_dir},
          {"cache_dir", c.cache_dir}};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error("experiment config must be a JSON object");
  static const std::vector<std::string> known{
      "schema_version", "experiment", "spins", "layers", "cuts", "k_train", "k_test", "shots",
      "target_samples", "p_noise", "methods", "instances", "seed", "steps", "retrain_every",
      "learning_rate", "hidden", "train", "profile", "output_dir", "cache_dir"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw Error("unknown config key '" + key + "'");
  }
  const int version = j.value("schema_version", 0);
  if (version != kConfigSchemaVersion) {
    throw Error("config schema_version " + std::to_string(version) + " is not supported (expected " +
                std::to_string(kConfigSchemaVersion) + ")");
  }
  ExperimentConfig c;
  try {
    c.kind = experiment_kind_from_string(j.at("experiment").get<std::string>());
    read_if(j, "spins", c.spins);
    read_if(j, "layers", c.layers);
    read_if(j, "cuts", c.cuts);
    read_if(j, "k_train", c.k_train);
    read_if(j, "k_test", c.k_test);
    read_if(j, "shots", c.shots);
    read_if(j, "target_samples", c.target_samples);
    read_if(j, "p_noise", c.p_noise);
    read_if(j, "methods", c.methods);
    read_if(j, "instances", c.instances);
    read_if(j, "seed", c.seed);
    read_if(j, "steps", c.steps);
    read_if(j, "retrain_every", c.retrain_every);
    read_if(j, "learning_rate", c.learning_rate);
    read_if(j, "hidden", c.hidden);
    read_if(j, "profile", c.profile);
    read_if(j, "output_dir", c.output_dir);
    read_if(j, "cache_dir", c.cache_dir);
    if (j.contains("train")) {
      const json& t = j.at("train");
      read_if(t, "learning_rate", c.train.learning_rate);
      read_if(t, "batch_size", c.train.batch_size);
      read_if(t, "max_epochs", c.train.max_epochs);
      read_if(t, "validation_fraction", c.train.validation_fraction);
      read_if(t, "patience", c.train.patience);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error("config " + path + " is not valid JSON: " + e.what());
  }
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  write_file_atomic(path, to_json(config).dump(2) + "\n");
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output_dir");
  j.erase("cache_dir");
  return hex64(fnv1a(j.dump()));
}

NoiseProfile resolve_profile(const ExperimentConfig& config) {
  return config.profile.empty() ? profile_from_environment() : load_profile(config.profile);
}

// --- Validation ----------------------------------------------------------------------

std::vector<Diagnostic> validate_config(const ExperimentConfig& c) {
  std::vector<Diagnostic> d;
  auto error = [&](std::string m) { d.push_back({Severity::Error, std::move(m)}); };
  auto warn = [&](std::string m) { d.push_back({Severity::Warning, std::move(m)}); };

  if (c.spins.empty()) error("spins must list at least one chain size");
  for (int n : c.spins) {
    if (n % 2 != 0) error("N = " + std::to_string(n) + " is odd; the two-patch split needs even N");
    else if (n < 4 || n > kMaxNoisyWidth) error("N = " + std::to_string(n) + " outside [4, 14]");
    else if (n > 10) warn("N = " + std::to_string(n) + ": noisy simulation cost grows 4x per two spins");
  }
  if (c.layers < 1 || c.layers > 32) error("layers must be in [1, 32]");
  if (c.cuts.empty()) error("cuts must list at least one value");
  const int cross = 2 * c.layers;
  for (int cut : c.cuts) {
    if (cut < 0 || cut > cross) {
      error("C = " + std::to_string(cut) + " outside [0, " + std::to_string(cross) + "] (2P cross-patch gates)");
      continue;
    }
    const int k = cross - cut;
    if (k > kMaxExactKnitted) {
      std::ostringstream m;
      m << "C = " << cut << " leaves k = " << k << " knitted gates (limit " << kMaxExactKnitted
        << "); exact knitting needs " << std::setprecision(3) << std::pow(6.0, k)
        << " terms per circuit and sampling overhead up to " << std::pow(9.0, k);
      if (uses_knitted_targets(c)) error(m.str());
      else if (c.kind != ExperimentKind::CutsSweep && c.kind != ExperimentKind::KTrainSweep) warn(m.str());
    }
  }
  if (c.k_train.empty()) error("k_train must list at least one size");
  for (int k : c.k_train)
    if (k < 10) error("training sets need at least 10 examples (got " + std::to_string(k) + ")");
  if (c.k_test < 10) error("test sets need at least 10 examples");
  if (c.shots < 0) error("shots must be >= 0 (0 = exact)");
  if (c.target_samples < 1) error("target_samples must be positive");
  if (c.p_noise.empty()) error("p_noise must list at least one value");
  for (double p : c.p_noise)
    if (!(p >= 0.0 && p <= 1.0)) error("p_noise values must lie in [0, 1]");
  if (c.instances < 1) error("instances must be positive");
  if (c.steps < 1) error("steps must be positive");
  if (c.retrain_every < 1) error("retrain_every must be positive");
  if (!(c.learning_rate > 0.0)) error("learning_rate must be positive");
  if (c.hidden.empty()) error("hidden must list at least one layer width");
  for (int h : c.hidden)
    if (h < 1) error("hidden widths must be positive");
  try {
    c.train.validate();
  } catch (const Error& e) {
    error(std::string("train: ") + e.what());
  }
  if (c.kind == ExperimentKind::Trajectory || c.kind == ExperimentKind::PNoiseSweep) {
    if (c.methods.empty()) error("methods must list at least one evaluator mode");
    for (const auto& m : c.methods) {
      try {
        eval_mode_from_string(m);
      } catch (const Error& e) {
        error(e.what());
      }
    }
  }
  if (!c.profile.empty() && !fs::exists(c.profile)) error("profile file " + c.profile + " does not exist");
  for (int n : c.spins) {
    const int k = *std::max_element(c.k_train.begin(), c.k_train.end());
    const double bytes = 8.0 * k * (feature_size(n, c.layers) + 2.0 * n);
    if (bytes > 4e9) warn("training set for N = " + std::to_string(n) + " needs about " +
                          std::to_string(static_cast<long>(bytes / 1e9)) + " GB");
  }
  return d;
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& x) { return x.severity == Severity::Error; });
}

double estimate_runtime_seconds(const ExperimentConfig& c) {
  if (c.spins.empty() || c.k_train.empty()) return 0.0;
  const int kmax = *std::max_element(c.k_train.begin(), c.k_train.end());
  double total = 0.0;
  for (int n : c.spins) {
    const double circuit = noisy_circuit_seconds(n, c.layers);
    const double per_step = (4.0 * n * c.layers + 1.0) * circuit;
    const double dataset = kmax * circuit * 1.5;
    const double train = training_seconds(n, c.layers, kmax, c);
    switch (c.kind) {
      case ExperimentKind::Trajectory:
      case ExperimentKind::PNoiseSweep: {
        double run = 0.0;
        for (const auto& m : c.methods) {
          const EvalMode mode = eval_mode_from_string(m);
          double factor = mode == EvalMode::NoisyZne ? 3.0 : mode == EvalMode::NoisyDm ? 2.0
                          : mode == EvalMode::NoisyDmZne ? 6.0 : 1.0;
          run += c.steps * per_step * factor;
          if (mode == EvalMode::NoisyDlem) run += (c.steps / c.retrain_every + 1) * (dataset + train);
        }
        const double grid = c.kind == ExperimentKind::PNoiseSweep ? static_cast<double>(c.p_noise.size()) : 1.0;
        total += run * grid * c.instances;
        break;
      }
      case ExperimentKind::CutsSweep:
        total += c.instances * (c.k_test * circuit + c.cuts.size() * (dataset + train));
        break;
      case ExperimentKind::KTrainSweep:
      case ExperimentKind::ShotNoise:
        total += c.instances * (c.k_test * circuit * 2 + dataset + c.k_train.size() * train);
        break;
    }
    if (c.kind == ExperimentKind::Trajectory || c.kind == ExperimentKind::PNoiseSweep ||
        c.kind == ExperimentKind::ShotNoise)
      break;  // these use the first N only
  }
  return total;
}

// --- Manifest ------------------------------------------------------------------------

json to_json(const RunManifest& m) {
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"crc32", f.crc32}, {"bytes", f.bytes}});
  json results = json::array();
  for (const auto& r : m.results) {
    results.push_back({{"num_spins", r.num_spins},
                       {"instance", r.instance},
                       {"method", r.method},
                       {"p_noise", r.p_noise},
                       {"final_energy", r.final_energy},
                       {"ground_energy", r.ground_energy}});
  }
  return {{"config", m.config},   {"config_hash", m.config_hash}, {"software_version", m.software_version},
          {"started", m.started}, {"finished", m.finished},       {"status", m.ok ? "ok" : "failed"},
          {"error", m.error},     {"files", files},               {"results", results}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.config = j.at("config");
    m.config_hash = j.at("config_hash").get<std::string>();
    m.software_version = j.at("software_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.ok = j.at("status").get<std::string>() == "ok";
    m.error = j.value("error", "");
    for (const auto& f : j.at("files")) {
      m.files.push_back({f.at("path").get<std::string>(), f.at("crc32").get<std::uint32_t>(),
                         f.at("bytes").get<std::uint64_t>()});
    }
    for (const auto& r : j.at("results")) {
      m.results.push_back({r.at("num_spins").get<int>(), r.at("instance").get<int>(),
                           r.at("method").get<std::string>(), r.at("p_noise").get<double>(),
                           r.at("final_energy").get<double>(), r.at("ground_energy").get<double>()});
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path);
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error("manifest " + path + " is not valid JSON: " + e.what());
  }
}

std::uint32_t file_crc32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(got));
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::string> verify_manifest(const RunManifest& manifest, const std::string& dir) {
  std::vector<std::string> bad;
  for (const auto& f : manifest.files) {
    const fs::path p = fs::path(dir) / f.path;
    if (!fs::exists(p) || fs::file_size(p) != f.bytes || file_crc32(p.string()) != f.crc32) bad.push_back(f.path);
  }
  return bad;
}

void write_file_atomic(const std::string& path, std::string_view text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("short write to " + path);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename onto " + path + ": " + ec.message());
  }
}

// --- Shared building blocks ----------------------------------------------------------

IsingInstance experiment_instance(int num_spins, int index, std::uint64_t root_seed) {
  return random_instance(num_spins, seed_for(root_seed, "instance", num_spins, index));
}

AnsatzParams experiment_center(const IsingInstance& instance, int layers, std::uint64_t root_seed, int index) {
  return patch_initialize(instance, layers, seed_for(root_seed, "center", instance.num_spins, layers, index));
}

Dataset cached_training_set(const std::string& cache_dir, const AnsatzParams& center, int k,
                            const IsingInstance& instance, int layers, const NoiseProfile& profile,
                            const TrainingSetConfig& config, std::uint64_t seed) {
  if (cache_dir.empty()) return generate_training_set(center, k, instance, layers, profile, config, seed);
  const json key{{"instance", to_json(instance)},
                 {"layers", layers},
                 {"center", to_json(center)},
                 {"k", k},
                 {"profile", to_json(profile)},
                 {"cuts", config.cuts},
                 {"shots", config.noisy_shots.count},
                 {"target_mode", config.target_mode == TargetMode::Exact ? "exact" : "sampled"},
                 {"target_samples", config.target_samples},
                 {"sigma", config.sigma},
                 {"shift", config.shift == ShiftPolicy::ThirdEach ? "third" : "uniform"},
                 {"seed", seed},
                 {"version", kVersion}};
  fs::create_directories(cache_dir);
  const std::string path = (fs::path(cache_dir) / ("ds_" + hex64(fnv1a(key.dump())) + ".bin")).string();
  if (fs::exists(path)) return load_dataset(path);
  Dataset d = generate_training_set(center, k, instance, layers, profile, config, seed);
  save_dataset(d, path);
  return d;
}

Dataset full_circuit_test_set(const std::string& cache_dir, const AnsatzParams& center, int k,
                              const IsingInstance& instance, int layers, const NoiseProfile& profile,
                              Shots shots, std::uint64_t seed) {
  TrainingSetConfig tc;
  tc.cuts = 0;
  tc.noisy_shots = shots;
  tc.target_mode = TargetMode::Exact;
  return cached_training_set(cache_dir, center, k, instance, layers, profile, tc, seed);
}

// --- Experiments ---------------------------------------------------------------------

namespace {

class CsvTable {
 public:
  explicit CsvTable(std::string header) { out_ << header << '\n' << std::setprecision(12); }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cells, first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

struct Runner {
  const ExperimentConfig& c;
  NoiseProfile base;
  fs::path dir;
  std::ostream* log;
  RunManifest& manifest;

  void say(const std::string& msg) const {
    if (log) *log << "[" << to_string(c.kind) << "] " << msg << std::endl;
  }

  void emit(const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    write_file_atomic(p.string(), text);
    manifest.files.push_back({name, file_crc32(p.string()), static_cast<std::uint64_t>(text.size())});
  }

  NoiseProfile profile(double p_noise) const { return scale_profile(base, p_noise); }

  VqeConfig vqe_config() const {
    VqeConfig v;
    v.steps = c.steps;
    v.learning_rate = c.learning_rate;
    v.retrain_every = c.retrain_every;
    v.k_train = c.k_train.front();
    v.training.cuts = c.cuts.front();
    v.train = c.train;
    v.hidden = c.hidden;
    return v;
  }

  TrainConfig train_config(int n, int i, int cuts, int k) const {
    TrainConfig t = c.train;
    t.seed = seed_for(c.seed, "mlp", n, i, cuts, k);
    return t;
  }

  VqeResult vqe(const IsingInstance& inst, int i, const std::string& method, double p_noise) const {
    say("N=" + std::to_string(inst.num_spins) + " instance " + std::to_string(i) + " method " + method +
        " p_noise " + std::to_string(p_noise));
    // Same seed for every method: shared patch initialization per instance.
    return run_vqe(inst, c.layers, eval_mode_from_string(method), profile(p_noise), Shots{c.shots}, vqe_config(),
                   seed_for(c.seed, "run", inst.num_spins, i));
  }

  void trajectory() {
    const int n = c.spins.front();
    const double p = c.p_noise.front();
    for (int i = 0; i < c.instances; ++i) {
      const IsingInstance inst = experiment_instance(n, i, c.seed);
      const double e0 = exact_ground_energy(inst);
      CsvTable csv("step,energy_per_qubit,mode");
      for (const auto& m : c.methods) {
        const VqeResult r = vqe(inst, i, m, p);
        for (const auto& s : r.trace.steps) csv.row(s.step, s.energy / n, m);
        manifest.results.push_back({n, i, m, p, r.final_energy, e0});
      }
      emit("fig4_i" + std::to_string(i) + ".csv", csv.str());
    }
  }

  void pnoise_sweep() {
    const int n = c.spins.front();
    CsvTable csv("p_noise,delta_e_per_qubit,method");
    for (double p : c.p_noise) {
      for (int i = 0; i < c.instances; ++i) {
        const IsingInstance inst = experiment_instance(n, i, c.seed);
        const double e0 = exact_ground_energy(inst);
        for (const auto& m : c.methods) {
          const VqeResult r = vqe(inst, i, m, p);
          const InstanceResult res{n, i, m, p, r.final_energy, e0};
          csv.row(p, res.delta_per_spin(), m);
          manifest.results.push_back(res);
        }
      }
    }
    emit("fig5.csv", csv.str());
  }

  Dataset train_set(const IsingInstance& inst, const AnsatzParams& center, int i, int cuts, int k, TargetMode mode,
                    double p) const {
    TrainingSetConfig tc;
    tc.cuts = cuts;
    tc.noisy_shots = Shots{c.shots};
    tc.target_mode = mode;
    tc.target_samples = c.target_samples;
    say("dataset N=" + std::to_string(inst.num_spins) + " C=" + std::to_string(cuts) + " K=" + std::to_string(k));
    return cached_training_set(c.cache_dir, center, k, inst, c.layers, profile(p), tc,
                               seed_for(c.seed, "train-set", inst.num_spins, i, cuts));
  }

  Dataset test_set(const IsingInstance& inst, const AnsatzParams& center, int i, double p) const {
    say("test set N=" + std::to_string(inst.num_spins) + " K=" + std::to_string(c.k_test));
    return full_circuit_test_set(c.cache_dir, center, c.k_test, inst, c.layers, profile(p), Shots{c.shots},
                                 seed_for(c.seed, "test-set", inst.num_spins, i));
  }

  void cuts_sweep() {
    const double p = c.p_noise.front();
    const int k = *std::max_element(c.k_train.begin(), c.k_train.end());
    CsvTable csv("C,N,one_minus_r2");
    for (int n : c.spins) {
      for (int i = 0; i < c.instances; ++i) {
        const IsingInstance inst = experiment_instance(n, i, c.seed);
        const AnsatzParams center = experiment_center(inst, c.layers, c.seed, i);
        const Dataset test = test_set(inst, center, i, p);
        for (int cuts : c.cuts) {
          const Dataset data = train_set(inst, center, i, cuts, k, TargetMode::Exact, p);
          const MitigationModel model = train_model(data, train_config(n, i, cuts, k), c.hidden);
          csv.row(cuts, n, median_one_minus_r2(model, test));
        }
      }
    }
    emit("fig6.csv", csv.str());
  }

  void ktrain_sweep() {
    const double p = c.p_noise.front();
    const int cuts = c.cuts.front();
    std::vector<int> sizes = c.k_train;
    std::sort(sizes.begin(), sizes.end());
    CsvTable csv("k_train,N,one_minus_r2");
    for (int n : c.spins) {
      for (int i = 0; i < c.instances; ++i) {
        const IsingInstance inst = experiment_instance(n, i, c.seed);
        const AnsatzParams center = experiment_center(inst, c.layers, c.seed, i);
        const Dataset test = test_set(inst, center, i, p);
        const Dataset data = train_set(inst, center, i, cuts, sizes.back(), TargetMode::Exact, p);
        for (int k : sizes) {
          const MitigationModel model = train_model(data.head(k), train_config(n, i, cuts, k), c.hidden);
          csv.row(k, n, median_one_minus_r2(model, test));
        }
      }
    }
    emit("fig7.csv", csv.str());
  }

  void shot_noise() {
    const double p = c.p_noise.front();
    const int n = c.spins.front();
    const int cuts = c.cuts.front();
    std::vector<int> sizes = c.k_train;
    std::sort(sizes.begin(), sizes.end());
    CsvTable csv("k_train,one_minus_r2,baseline_error");
    for (int i = 0; i < c.instances; ++i) {
      const IsingInstance inst = experiment_instance(n, i, c.seed);
      const AnsatzParams center = experiment_center(inst, c.layers, c.seed, i);
      const Dataset data = train_set(inst, center, i, cuts, sizes.back(), TargetMode::Sampled, p);
      // Same seed, so the same cut circuits with exact and sampled targets.
      TrainingSetConfig tc;
      tc.cuts = cuts;
      tc.noisy_shots = Shots{c.shots};
      tc.target_samples = c.target_samples;
      const std::uint64_t ts = seed_for(c.seed, "cut-test-set", n, i, cuts);
      const Dataset exact = cached_training_set(c.cache_dir, center, c.k_test, inst, c.layers, profile(p), tc, ts);
      tc.target_mode = TargetMode::Sampled;
      const Dataset sampled = cached_training_set(c.cache_dir, center, c.k_test, inst, c.layers, profile(p), tc, ts);
      const std::vector<double> raw = one_minus_r2(exact.targets, sampled.targets);
      std::vector<double> sorted = raw;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t h = sorted.size() / 2;
      const double baseline = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
      for (int k : sizes) {
        const MitigationModel model = train_model(data.head(k), train_config(n, i, cuts, k), c.hidden);
        csv.row(k, median_one_minus_r2(model, exact), baseline);
      }
    }
    emit("fig8.csv", csv.str());
  }
};

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config, std::ostream* log) {
  const auto diagnostics = validate_config(config);
  if (has_errors(diagnostics)) {
    std::string msg = "invalid experiment config:";
    for (const auto& d : diagnostics)
      if (d.severity == Severity::Error) msg += "\n  " + d.message;
    throw Error(msg);
  }
  RunManifest manifest;
  manifest.config = to_json(config);
  manifest.config_hash = config_hash(config);
  manifest.started = utc_now();
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  Runner run{config, resolve_profile(config), dir, log, manifest};
  try {
    switch (config.kind) {
      case ExperimentKind::Trajectory: run.trajectory(); break;
      case ExperimentKind::PNoiseSweep: run.pnoise_sweep(); break;
      case ExperimentKind::CutsSweep: run.cuts_sweep(); break;
      case ExperimentKind::KTrainSweep: run.ktrain_sweep(); break;
      case ExperimentKind::ShotNoise: run.shot_noise(); break;
    }
    manifest.ok = true;
  } catch (const std::exception& e) {
    for (const auto& f : manifest.files) fs::remove(dir / f.path);
    manifest.files.clear();
    manifest.ok = false;
    manifest.error = e.what();
    manifest.finished = utc_now();
    write_file_atomic((dir / "manifest.json").string(), to_json(manifest).dump(2) + "\n");
    throw;
  }
  manifest.finished = utc_now();
  write_file_atomic((dir / "manifest.json").string(), to_json(manifest).dump(2) + "\n");
  return manifest;
}

// --- Summary ---------------------------------------------------------------------------

std::vector<SummaryRow> emit_summary(std::span<const RunManifest> manifests) {
  if (manifests.empty()) throw Error("summary needs at least one manifest");
  const json& first = manifests.front().config;
  for (const auto& m : manifests) {
    if (!m.ok) throw Error("cannot summarize a failed run");
    for (const char* key : {"experiment", "layers"}) {
      if (m.config.value(key, json()) != first.value(key, json()))
        throw Error(std::string("manifests disagree on '") + key + "'");
    }
  }
  int n = 0;
  std::vector<SummaryRow> rows;
  std::map<std::pair<std::string, double>, std::size_t> index;
  for (const auto& m : manifests) {
    for (const auto& r : m.results) {
      if (n == 0) n = r.num_spins;
      if (r.num_spins != n) throw Error("manifests mix chain sizes N = " + std::to_string(n) + " and " +
                                        std::to_string(r.num_spins));
      const auto key = std::make_pair(r.method, r.p_noise);
      auto it = index.find(key);
      if (it == index.end()) {
        it = index.emplace(key, rows.size()).first;
        rows.push_back({r.method, r.p_noise, 0, 0.0, 0.0, {}});
      }
      rows[it->second].per_instance.push_back(r.delta_per_spin());
    }
  }
  if (rows.empty()) throw Error("manifests contain no final energies to summarize");
  for (auto& row : rows) {
    row.count = static_cast<int>(row.per_instance.size());
    const Eigen::Map<const Eigen::VectorXd> v(row.per_instance.data(), row.count);
    row.mean_delta_per_spin = v.mean();
    row.standard_error =
        row.count > 1 ? std::sqrt((v.array() - v.mean()).square().sum() / (row.count - 1) / row.count) : 0.0;
  }
  return rows;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  CsvTable csv("method,p_noise,count,mean_delta_e_per_qubit,standard_error,per_instance");
  for (const auto& r : rows) {
    std::ostringstream per;
    per << std::setprecision(12);
    for (std::size_t i = 0; i < r.per_instance.size(); ++i) per << (i ? ";" : "") << r.per_instance[i];
    csv.row(r.method, r.p_noise, r.count, r.mean_delta_per_spin, r.standard_error, per.str());
  }
  return csv.str();
}

}  // namespace mitiknit
