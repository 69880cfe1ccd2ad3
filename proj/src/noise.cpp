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

#include "mitiknit/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>

#include "mitiknit/rng.hpp"
#include "pauli_transfer.hpp"

namespace mitiknit {

namespace {

template <typename T>
const T& pick(const std::vector<T>& v, std::size_t i, const char* what) {
  if (v.empty()) throw Error(std::string("noise profile has no ") + what + " entries");
  if (v.size() == 1) return v.front();
  if (i >= v.size()) throw Error(std::string("noise profile ") + what + " list too short for index " + std::to_string(i));
  return v[i];
}

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

// In-place Walsh-Hadamard transform: out[s] = sum_z in[z] (-1)^{popcount(z & s)}.
void walsh_hadamard(Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  for (Eigen::Index h = 1; h < n; h <<= 1) {
    for (Eigen::Index i = 0; i < n; i += 2 * h) {
      for (Eigen::Index j = i; j < i + h; ++j) {
        const double a = v(j), b = v(j + h);
        v(j) = a + b;
        v(j + h) = a - b;
      }
    }
  }
}

}  // namespace

double NoiseProfile::single_qubit_rate(int qubit) const {
  return pick(p1, static_cast<std::size_t>(qubit), "p1");
}

double NoiseProfile::two_qubit_rate(int a, int b, int width) const {
  if (p2.size() == 1) return p2.front();
  int bond = -1;
  if ((a + 1) % width == b) bond = a;
  if ((b + 1) % width == a) bond = b;
  if (bond < 0) throw Error("per-bond p2 requires ring-adjacent CNOT qubits");
  return pick(p2, static_cast<std::size_t>(bond), "p2");
}

const ReadoutError& NoiseProfile::readout_for(int qubit) const {
  return pick(readout, static_cast<std::size_t>(qubit), "readout");
}

void NoiseProfile::validate() const {
  if (p1.empty() || p2.empty() || readout.empty()) throw Error("noise profile lists must be non-empty");
  for (double p : p1) if (!in_unit(p)) throw Error("p1 must lie in [0, 1]");
  for (double p : p2) if (!in_unit(p)) throw Error("p2 must lie in [0, 1]");
  for (const auto& r : readout) {
    if (!in_unit(r.p01) || !in_unit(r.p10)) throw Error("readout probabilities must lie in [0, 1]");
    if (r.p01 + r.p10 >= 1.0) throw Error("readout error p01 + p10 must be below 1");
  }
}

bool NoiseProfile::is_noiseless() const {
  auto zero = [](double p) { return p == 0.0; };
  return std::all_of(p1.begin(), p1.end(), zero) && std::all_of(p2.begin(), p2.end(), zero) &&
         std::all_of(readout.begin(), readout.end(),
                     [](const ReadoutError& r) { return r.p01 == 0.0 && r.p10 == 0.0; });
}

NoiseProfile default_profile() { return {{1e-3}, {2.5e-2}, {ReadoutError{3e-2, 3e-2}}}; }

NoiseProfile noiseless_profile() { return {}; }

NoiseProfile scale_profile(const NoiseProfile& profile, double p_noise) {
  if (!in_unit(p_noise)) throw Error("p_noise must lie in [0, 1]");
  NoiseProfile out = profile;
  for (double& p : out.p1) p *= p_noise;
  for (double& p : out.p2) p *= p_noise;
  for (auto& r : out.readout) {
    r.p01 *= p_noise;
    r.p10 *= p_noise;
  }
  return out;
}

nlohmann::json to_json(const NoiseProfile& profile) {
  nlohmann::json readout = nlohmann::json::array();
  for (const auto& r : profile.readout) readout.push_back({{"p01", r.p01}, {"p10", r.p10}});
  return {{"p1", profile.p1}, {"p2", profile.p2}, {"readout", readout}};
}

NoiseProfile profile_from_json(const nlohmann::json& j) {
  auto list = [](const nlohmann::json& v) {
    return v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
  };
  NoiseProfile p;
  p.p1 = list(j.at("p1"));
  p.p2 = list(j.at("p2"));
  p.readout.clear();
  const auto& r = j.at("readout");
  if (r.is_array()) {
    for (const auto& e : r) p.readout.push_back({e.at("p01").get<double>(), e.at("p10").get<double>()});
  } else {
    p.readout.push_back({r.at("p01").get<double>(), r.at("p10").get<double>()});
  }
  p.validate();
  return p;
}

NoiseProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open noise profile '" + path + "'");
  return profile_from_json(nlohmann::json::parse(in));
}

void save_profile(const NoiseProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write noise profile '" + path + "'");
  out << to_json(profile).dump(2) << '\n';
}

NoiseProfile profile_from_environment() {
  const char* path = std::getenv("MITIKNIT_PROFILE");
  if (path == nullptr || *path == '\0') return default_profile();
  return load_profile(path);
}

PauliVector PauliVector::zero_state(int width) {
  if (width < 1 || width > kMaxNoisyWidth) throw Error("noisy simulation supports 1 to 14 qubits");
  PauliVector v{width, Eigen::VectorXd::Zero(Eigen::Index{1} << (2 * width))};
  for (Eigen::Index z = 0; z < (Eigen::Index{1} << width); ++z) v.coeffs(z << width) = 1.0;
  return v;
}

double PauliVector::expectation(const PauliString& obs) const {
  if (obs.width() != width) throw Error("observable width does not match state width");
  return coeffs(static_cast<Eigen::Index>(obs.x_mask() | (obs.z_mask() << width)));
}

DensityState PauliVector::to_density() const {
  const Eigen::Index dim = Eigen::Index{1} << width;
  DensityState rho{width, Eigen::MatrixXcd(dim, dim), false};
  Complex* d = rho.matrix.data();
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) d[i] = coeffs(i);
  // Per qubit: (I, X, Z, Y) coefficients -> (00, 10, 01, 11) block entries.
  const Complex half_i{0.0, 0.5};
  for (int q = 0; q < width; ++q) {
    const std::size_t xb = std::size_t{1} << q;
    const std::size_t zb = std::size_t{1} << (width + q);
    for (std::size_t i = 0; i < static_cast<std::size_t>(coeffs.size()); ++i) {
      if (i & (xb | zb)) continue;
      const Complex ci = d[i], cx = d[i | xb], cz = d[i | zb], cy = d[i | xb | zb];
      d[i] = 0.5 * (ci + cz);
      d[i | xb] = 0.5 * cx + half_i * cy;
      d[i | zb] = 0.5 * cx - half_i * cy;
      d[i | xb | zb] = 0.5 * (ci - cz);
    }
  }
  return rho;
}

PauliVector run_noisy_pauli(const Circuit& circuit, const NoiseProfile& profile) {
  if (circuit.width() > kMaxNoisyWidth) throw Error("noisy simulation supports at most 14 qubits");
  profile.validate();
  const auto program = ptm::compile(transpile(circuit), profile);
  PauliVector state = PauliVector::zero_state(circuit.width());
  std::span<double> c(state.coeffs.data(), static_cast<std::size_t>(state.coeffs.size()));
  for (const auto& block : program) ptm::apply_block(c, circuit.width(), block);
  return state;
}

DensityState run_noisy(const Circuit& circuit, const NoiseProfile& profile) {
  return run_noisy_pauli(circuit, profile).to_density();
}

Eigen::VectorXd measurement_distribution(const PauliVector& state, MeasurementBasis basis,
                                         const NoiseProfile& profile) {
  const int n = state.width;
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::VectorXd w(dim);
  if (basis == MeasurementBasis::Z) {
    for (Eigen::Index z = 0; z < dim; ++z) w(z) = state.coeffs(z << n);
  } else {
    // A noisy H maps X_q to Z_q and then damps it by (1 - p1_q).
    std::vector<double> damp(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) damp[q] = 1.0 - profile.single_qubit_rate(q);
    for (Eigen::Index x = 0; x < dim; ++x) {
      double f = 1.0;
      for (int q = 0; q < n; ++q) {
        if ((x >> q) & 1) f *= damp[q];
      }
      w(x) = state.coeffs(x) * f;
    }
  }
  walsh_hadamard(w);
  return w / static_cast<double>(dim);
}

Eigen::VectorXd apply_readout(const Eigen::VectorXd& probabilities, int width, const NoiseProfile& profile) {
  Eigen::VectorXd p = probabilities;
  for (int q = 0; q < width; ++q) {
    const auto& r = profile.readout_for(q);
    if (r.p01 == 0.0 && r.p10 == 0.0) continue;
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index s = 0; s < p.size(); ++s) {
      if (s & bit) continue;
      const double p0 = p(s), p1 = p(s | bit);
      p(s) = (1.0 - r.p01) * p0 + r.p10 * p1;
      p(s | bit) = r.p01 * p0 + (1.0 - r.p10) * p1;
    }
  }
  return p;
}

std::vector<std::int64_t> sample_counts(const Eigen::VectorXd& probabilities, std::int64_t shots,
                                        std::uint64_t seed) {
  if (shots < 1) throw Error("shot count must be at least 1");
  Rng rng = make_rng(seed);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(probabilities.size()), 0);
  std::int64_t remaining = shots;
  double mass = 1.0;
  for (Eigen::Index i = 0; i < probabilities.size() && remaining > 0; ++i) {
    const double p = std::max(0.0, probabilities(i));
    if (i + 1 == probabilities.size()) {
      counts[static_cast<std::size_t>(i)] = remaining;
      break;
    }
    const double q = mass > 0.0 ? std::clamp(p / mass, 0.0, 1.0) : 1.0;
    std::binomial_distribution<std::int64_t> binom(remaining, q);
    const std::int64_t k = q >= 1.0 ? remaining : binom(rng);
    counts[static_cast<std::size_t>(i)] = k;
    remaining -= k;
    mass -= p;
  }
  return counts;
}

namespace {

Eigen::VectorXd z_sector(const Eigen::VectorXd& p, int n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index s = 0; s < p.size(); ++s) {
    const auto u = static_cast<std::uint64_t>(s);
    for (int b = 0; b < n; ++b) {
      const auto [i, j] = bond_qubits(n, b);
      out(b) += (((u >> i) ^ (u >> j)) & 1) ? -p(s) : p(s);
    }
  }
  return out;
}

Eigen::VectorXd x_sector(const Eigen::VectorXd& p, int n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index s = 0; s < p.size(); ++s) {
    for (int i = 0; i < n; ++i) out(i) += ((s >> i) & 1) ? -p(s) : p(s);
  }
  return out;
}

Eigen::VectorXd realize(const Eigen::VectorXd& p, Shots shots, std::uint64_t seed) {
  if (shots.is_exact()) return p;
  const auto counts = sample_counts(p, shots.count, seed);
  Eigen::VectorXd freq(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    freq(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(shots.count);
  }
  return freq;
}

}  // namespace

ShotEstimate estimate_from_state(const PauliVector& state, const NoiseProfile& profile, Shots shots,
                                 std::uint64_t stream_seed) {
  if (shots.count < 0) throw Error("shot count must be non-negative");
  const int n = state.width;
  const Eigen::VectorXd pz =
      apply_readout(measurement_distribution(state, MeasurementBasis::Z, profile), n, profile);
  const Eigen::VectorXd px =
      apply_readout(measurement_distribution(state, MeasurementBasis::X, profile), n, profile);
  ShotEstimate est;
  est.shots = shots;
  est.seed = stream_seed;
  est.values.resize(2 * n);
  est.values.head(n) = z_sector(realize(pz, shots, derive_seed(stream_seed, 1)), n);
  est.values.tail(n) = x_sector(realize(px, shots, derive_seed(stream_seed, 2)), n);
  est.values = est.values.cwiseMax(-1.0).cwiseMin(1.0);
  return est;
}

ShotEstimate noisy_expectations(const Circuit& circuit, const IsingInstance& instance,
                                const NoiseProfile& profile, Shots shots, std::uint64_t seed) {
  if (circuit.width() != instance.num_spins) throw Error("circuit width does not match instance size");
  const PauliVector state = run_noisy_pauli(circuit, profile);
  return estimate_from_state(state, profile, shots, derive_seed(seed, circuit.hash()));
}

}  // namespace mitiknit
