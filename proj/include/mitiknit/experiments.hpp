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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mitiknit/mitigation.hpp"
#include "mitiknit/noise.hpp"
#include "mitiknit/vqe.hpp"

namespace mitiknit {

inline constexpr std::string_view kVersion = "0.4.0";
inline constexpr int kConfigSchemaVersion = 1;

enum class ExperimentKind {
  Trajectory,     // fig4: E/N per step for several evaluator modes
  PNoiseSweep,    // fig5: final error vs noise scale
  CutsSweep,      // fig6: 1 - R^2 vs number of cuts
  KTrainSweep,    // fig7: 1 - R^2 vs training-set size
  ShotNoise,      // fig8: sampled knitted targets vs their own error
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

/// Every knob of an experiment run. Lists are sweep axes; experiments that
/// need a single value use the first entry.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Trajectory;
  std::vector<int> spins{6};
  int layers = 8;
  std::vector<int> cuts{12};
  std::vector<int> k_train{10000};
  int k_test = 1000;
  std::int64_t shots = 1'000'000;      // noisy shots per setting, 0 = exact
  std::int64_t target_samples = 100;   // knitted-target samples (fig8)
  std::vector<double> p_noise{1.0};
  std::vector<std::string> methods{"noiseless", "noisy", "dlem", "zne"};
  int instances = 1;
  std::uint64_t seed = 7;
  int steps = 100;
  int retrain_every = 9;
  double learning_rate = 0.05;
  std::vector<int> hidden = kDefaultHidden;
  TrainConfig train;
  std::string profile;     // profile JSON path; empty: MITIKNIT_PROFILE or default
  std::string output_dir = "results";
  std::string cache_dir;   // dataset cache; empty disables caching
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Rejects unknown keys and schema versions other than kConfigSchemaVersion.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

/// 16 hex digits over the canonical JSON form (output_dir and cache_dir excluded).
std::string config_hash(const ExperimentConfig& config);

NoiseProfile resolve_profile(const ExperimentConfig& config);

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
};

/// Range and budget checks. Empty for a valid, affordable config.
std::vector<Diagnostic> validate_config(const ExperimentConfig& config);
bool has_errors(std::span<const Diagnostic> diagnostics);

/// Order-of-magnitude single-worker wall time.
double estimate_runtime_seconds(const ExperimentConfig& config);

struct OutputFile {
  std::string path;  // relative to the output directory
  std::uint32_t crc32 = 0;
  std::uint64_t bytes = 0;
};

/// One final energy of one method on one instance.
struct InstanceResult {
  int num_spins = 0;
  int instance = 0;
  std::string method;
  double p_noise = 0.0;
  double final_energy = 0.0;
  double ground_energy = 0.0;

  double delta_per_spin() const { return std::abs(final_energy - ground_energy) / num_spins; }
  double relative_error() const { return std::abs((final_energy - ground_energy) / ground_energy); }
};

struct RunManifest {
  nlohmann::json config;
  std::string config_hash;
  std::string software_version{kVersion};
  std::string started;
  std::string finished;
  bool ok = false;
  std::string error;
  std::vector<OutputFile> files;
  std::vector<InstanceResult> results;
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::string& path);

/// CRC-32 of a file's bytes.
std::uint32_t file_crc32(const std::string& path);
/// Files under `dir` whose size or checksum disagrees with the manifest.
std::vector<std::string> verify_manifest(const RunManifest& manifest, const std::string& dir);

/// Writes `text` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view text);

/// Runs the experiment, writes its CSV files and manifest.json into
/// config.output_dir. On failure the CSVs are removed and the manifest
/// records the error; the exception is rethrown. Progress goes to `log`.
RunManifest run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

struct SummaryRow {
  std::string method;
  double p_noise = 0.0;
  int count = 0;
  double mean_delta_per_spin = 0.0;
  double standard_error = 0.0;
  std::vector<double> per_instance;
};

/// Aggregates final energies across manifests by (method, p_noise).
/// Manifests must share kind, N and P.
std::vector<SummaryRow> emit_summary(std::span<const RunManifest> manifests);
std::string summary_csv(std::span<const SummaryRow> rows);

// --- Building blocks shared by the CLI and the acceptance suite -------------------

/// Instance `index` of size N under the root seed.
IsingInstance experiment_instance(int num_spins, int index, std::uint64_t root_seed);

/// Patch-initialized center angles the sweeps train around.
AnsatzParams experiment_center(const IsingInstance& instance, int layers, std::uint64_t root_seed, int index);

/// generate_training_set memoized on disk under `cache_dir` (no caching when empty).
Dataset cached_training_set(const std::string& cache_dir, const AnsatzParams& center, int k,
                            const IsingInstance& instance, int layers, const NoiseProfile& profile,
                            const TrainingSetConfig& config, std::uint64_t seed);

/// Test set of full (uncut) circuits around `center` with statevector targets.
Dataset full_circuit_test_set(const std::string& cache_dir, const AnsatzParams& center, int k,
                              const IsingInstance& instance, int layers, const NoiseProfile& profile,
                              Shots shots, std::uint64_t seed);

}  // namespace mitiknit
