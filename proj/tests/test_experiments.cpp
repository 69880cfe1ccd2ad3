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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mitiknit;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mitiknit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig tiny_trajectory(const fs::path& dir) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Trajectory;
  c.spins = {4};
  c.layers = 1;
  c.cuts = {2};
  c.methods = {"noiseless", "noisy"};
  c.steps = 3;
  c.shots = 1000;
  c.p_noise = {0.5};
  c.output_dir = dir.string();
  return c;
}

ExperimentConfig tiny_sweep(ExperimentKind kind, const fs::path& dir) {
  ExperimentConfig c;
  c.kind = kind;
  c.spins = {4};
  c.layers = 2;
  c.cuts = {2};
  c.k_train = {20, 40};
  c.k_test = 20;
  c.shots = 0;
  c.target_samples = 50;
  c.hidden = {8};
  c.train.max_epochs = 5;
  c.output_dir = dir.string();
  return c;
}

RunManifest manifest_with(int n, std::vector<double> finals, double e0) {
  RunManifest m;
  m.ok = true;
  m.config = to_json(ExperimentConfig{});
  for (std::size_t i = 0; i < finals.size(); ++i)
    m.results.push_back({n, static_cast<int>(i), "dlem", 0.1, finals[i], e0});
  return m;
}

}  // namespace

TEST(config, json_round_trip) {
  ExperimentConfig c;
  c.kind = ExperimentKind::KTrainSweep;
  c.spins = {6, 10};
  c.k_train = {100, 1000};
  c.seed = 0xfedcba9876543210ULL;
  c.train.patience = 7;
  const ExperimentConfig back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.seed, c.seed);
}

TEST(config, rejects_unknown_keys_and_versions) {
  nlohmann::json j = to_json(ExperimentConfig{});
  j["typo_knob"] = 1;
  EXPECT_THROW(config_from_json(j), Error);
  j = to_json(ExperimentConfig{});
  j["schema_version"] = 99;
  EXPECT_THROW(config_from_json(j), Error);
  j = to_json(ExperimentConfig{});
  j["experiment"] = "fig9";
  EXPECT_THROW(config_from_json(j), Error);
}

TEST(config, file_round_trip_and_hash) {
  const fs::path dir = fresh_dir("cfg");
  fs::create_directories(dir);
  ExperimentConfig c;
  c.output_dir = "a";
  save_config(c, (dir / "c.json").string());
  const ExperimentConfig back = load_config((dir / "c.json").string());
  EXPECT_EQ(config_hash(back), config_hash(c));
  c.output_dir = "b";
  EXPECT_EQ(config_hash(back), config_hash(c));
  c.seed += 1;
  EXPECT_NE(config_hash(back), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);
  fs::remove_all(dir);
}

TEST(validate, default_configs_are_clean) {
  for (auto kind : {ExperimentKind::Trajectory, ExperimentKind::PNoiseSweep, ExperimentKind::CutsSweep,
                    ExperimentKind::KTrainSweep}) {
    ExperimentConfig c;
    c.kind = kind;
    EXPECT_TRUE(validate_config(c).empty()) << to_string(kind);
  }
  ExperimentConfig c;
  c.kind = ExperimentKind::ShotNoise;
  c.cuts = {14};
  c.methods.clear();
  EXPECT_TRUE(validate_config(c).empty());
}

TEST(validate, odd_chain_is_an_error) {
  ExperimentConfig c;
  c.spins = {7};
  const auto d = validate_config(c);
  ASSERT_TRUE(has_errors(d));
  EXPECT_NE(d.front().message.find("odd"), std::string::npos);
}

TEST(validate, too_many_knitted_gates_is_an_error) {
  ExperimentConfig c;
  c.cuts = {4};  // k = 12 knitted gates for P = 8
  const auto d = validate_config(c);
  ASSERT_TRUE(has_errors(d));
  EXPECT_NE(d.front().message.find("k = 12"), std::string::npos);
  EXPECT_NE(d.front().message.find("overhead"), std::string::npos);
  // Sweeps over C use statevector targets and accept small C.
  c.kind = ExperimentKind::CutsSweep;
  EXPECT_FALSE(has_errors(validate_config(c)));
}

TEST(validate, range_checks) {
  ExperimentConfig c;
  c.p_noise = {1.5};
  c.cuts = {17};
  c.k_train = {5};
  c.methods = {"magic"};
  c.profile = "/nonexistent/profile.json";
  EXPECT_GE(validate_config(c).size(), 5u);
  EXPECT_THROW(run_experiment(c), Error);
}

TEST(validate, runtime_estimate_is_positive_and_monotone) {
  ExperimentConfig c;
  c.kind = ExperimentKind::CutsSweep;
  const double small = estimate_runtime_seconds(c);
  c.spins = {6, 10};
  EXPECT_GT(small, 0.0);
  EXPECT_GT(estimate_runtime_seconds(c), small);
}

TEST(manifest, checksums_detect_tampering) {
  const fs::path dir = fresh_dir("manifest");
  const RunManifest m = run_experiment(tiny_trajectory(dir));
  ASSERT_TRUE(m.ok);
  ASSERT_EQ(m.files.size(), 1u);
  EXPECT_TRUE(verify_manifest(m, dir.string()).empty());
  const RunManifest back = load_manifest((dir / "manifest.json").string());
  EXPECT_EQ(to_json(back), to_json(m));
  std::ofstream(dir / m.files[0].path, std::ios::app) << "x";
  EXPECT_EQ(verify_manifest(m, dir.string()).size(), 1u);
  fs::remove_all(dir);
}

TEST(manifest, crc32_of_known_text) {
  const fs::path dir = fresh_dir("crc");
  fs::create_directories(dir);
  write_file_atomic((dir / "t").string(), "123456789");
  EXPECT_EQ(file_crc32((dir / "t").string()), 0xCBF43926u);
  EXPECT_FALSE(fs::exists(dir / "t.tmp"));
  fs::remove_all(dir);
}

TEST(run, trajectory_is_reproducible) {
  const fs::path a = fresh_dir("traj_a"), b = fresh_dir("traj_b");
  const RunManifest ma = run_experiment(tiny_trajectory(a));
  const RunManifest mb = run_experiment(tiny_trajectory(b));
  const std::string csv = slurp(a / "fig4_i0.csv");
  EXPECT_EQ(csv, slurp(b / "fig4_i0.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,energy_per_qubit,mode");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 4);
  ASSERT_EQ(ma.results.size(), 2u);
  EXPECT_EQ(ma.results[0].method, "noiseless");
  EXPECT_EQ(ma.config_hash, mb.config_hash);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(run, failure_removes_partial_outputs) {
  const fs::path dir = fresh_dir("fail");
  ExperimentConfig c = tiny_trajectory(dir);
  c.instances = 2;
  c.methods = {"noiseless"};
  fs::create_directories(dir / "fig4_i1.csv");  // blocks the second write
  EXPECT_THROW(run_experiment(c), Error);
  EXPECT_FALSE(fs::exists(dir / "fig4_i0.csv"));
  const RunManifest m = load_manifest((dir / "manifest.json").string());
  EXPECT_FALSE(m.ok);
  EXPECT_FALSE(m.error.empty());
  EXPECT_TRUE(m.files.empty());
  fs::remove_all(dir);
}

TEST(run, ktrain_sweep_schema_and_cache) {
  const fs::path dir = fresh_dir("fig7");
  ExperimentConfig c = tiny_sweep(ExperimentKind::KTrainSweep, dir);
  c.cache_dir = (dir / "cache").string();
  run_experiment(c);
  const std::string first = slurp(dir / "fig7.csv");
  EXPECT_EQ(first.substr(0, first.find('\n')), "k_train,N,one_minus_r2");
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 3);
  const auto cached = std::distance(fs::directory_iterator(c.cache_dir), fs::directory_iterator{});
  EXPECT_EQ(cached, 2);  // training set and test set
  run_experiment(c);
  EXPECT_EQ(slurp(dir / "fig7.csv"), first);
  fs::remove_all(dir);
}

TEST(run, cuts_sweep_schema) {
  const fs::path dir = fresh_dir("fig6");
  ExperimentConfig c = tiny_sweep(ExperimentKind::CutsSweep, dir);
  c.cuts = {0, 4};
  run_experiment(c);
  const std::string csv = slurp(dir / "fig6.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "C,N,one_minus_r2");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  fs::remove_all(dir);
}

TEST(run, shot_noise_schema) {
  const fs::path dir = fresh_dir("fig8");
  run_experiment(tiny_sweep(ExperimentKind::ShotNoise, dir));
  const std::string csv = slurp(dir / "fig8.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k_train,one_minus_r2,baseline_error");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  fs::remove_all(dir);
}

TEST(summary, single_manifest_mean_is_the_value) {
  const std::vector<RunManifest> ms{manifest_with(6, {-3.0}, -3.3)};
  const auto rows = emit_summary(ms);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].mean_delta_per_spin, 0.05, 1e-12);
  EXPECT_EQ(rows[0].standard_error, 0.0);
}

TEST(summary, averages_instances) {
  const std::vector<RunManifest> ms{manifest_with(6, {-3.0, -3.06}, -3.3), manifest_with(6, {-3.12, -3.18}, -3.3)};
  const auto rows = emit_summary(ms);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].count, 4);
  EXPECT_NEAR(rows[0].mean_delta_per_spin, (0.3 + 0.24 + 0.18 + 0.12) / 4 / 6, 1e-12);
  EXPECT_GT(rows[0].standard_error, 0.0);
  EXPECT_NE(summary_csv(rows).find("dlem,0.1,4,"), std::string::npos);
}

TEST(summary, rejects_mixed_chain_sizes) {
  const std::vector<RunManifest> ms{manifest_with(6, {-3.0}, -3.3), manifest_with(8, {-4.0}, -4.3)};
  EXPECT_THROW(emit_summary(ms), Error);
  EXPECT_THROW(emit_summary(std::span<const RunManifest>{}), Error);
}
