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

#include "mitiknit/knitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "mitiknit/rng.hpp"

namespace mitiknit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kNumLabels = 5;

int label_index(LocalOp op) { return static_cast<int>(op); }

}  // namespace

std::string_view to_string(LocalOp op) {
  switch (op) {
    case LocalOp::Id: return "ID";
    case LocalOp::Z: return "Z";
    case LocalOp::RotPlus: return "ROT_PLUS";
    case LocalOp::RotMinus: return "ROT_MINUS";
    case LocalOp::MeasSign: return "MEAS_SIGN";
  }
  return "?";
}

std::array<QpdTerm, 6> qpd_terms(double phi) {
  const double t = -phi / 2.0;
  const double c = std::cos(t);
  const double s = std::sin(t);
  const double cs = c * s;
  return {{{c * c, LocalOp::Id, LocalOp::Id},
           {s * s, LocalOp::Z, LocalOp::Z},
           {cs, LocalOp::RotPlus, LocalOp::MeasSign},
           {-cs, LocalOp::RotMinus, LocalOp::MeasSign},
           {cs, LocalOp::MeasSign, LocalOp::RotPlus},
           {-cs, LocalOp::MeasSign, LocalOp::RotMinus}}};
}

double qpd_gamma(double phi) { return 1.0 + 2.0 * std::abs(std::sin(phi)); }

double overhead(std::span<const double> knitted_angles) {
  double out = 1.0;
  for (double phi : knitted_angles) {
    const double g = qpd_gamma(phi);
    out *= g * g;
  }
  return out;
}

// --- Layouts -----------------------------------------------------------------

int CutLayout::num_cuts() const {
  return static_cast<int>(std::count(assignments.begin(), assignments.end(), CutAssignment::Unknitted));
}

void CutLayout::validate(int num_spins, int layers) const {
  PatchSpec{cut_site}.validate(num_spins);
  if (static_cast<int>(assignments.size()) != 2 * layers) {
    throw Error("cut layout must assign all 2P cross-bond gates");
  }
}

nlohmann::json to_json(const CutLayout& layout) {
  nlohmann::json a = nlohmann::json::array();
  for (auto v : layout.assignments) a.push_back(v == CutAssignment::Knitted ? "KNITTED" : "UNKNITTED");
  return {{"q", layout.cut_site}, {"assignments", a}};
}

CutLayout layout_from_json(const nlohmann::json& j) {
  try {
    CutLayout out;
    out.cut_site = j.at("q").get<int>();
    for (const auto& v : j.at("assignments")) {
      const auto s = v.get<std::string>();
      if (s == "KNITTED") {
        out.assignments.push_back(CutAssignment::Knitted);
      } else if (s == "UNKNITTED") {
        out.assignments.push_back(CutAssignment::Unknitted);
      } else {
        throw Error("unknown cut assignment '" + s + "'");
      }
    }
    if (out.assignments.size() % 2 != 0) throw Error("cut layout needs two assignments per layer");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed cut layout: ") + e.what());
  }
}

CutLayout random_layout(int num_spins, int layers, int cuts, std::uint64_t seed) {
  if (layers < 1) throw Error("layout needs at least one layer");
  if (cuts < 0 || cuts > 2 * layers) throw Error("number of cuts must lie in [0, 2P]");
  Rng rng = make_rng(seed);
  CutLayout out;
  out.cut_site = std::uniform_int_distribution<int>(1, num_spins)(rng);
  out.assignments.assign(static_cast<std::size_t>(2 * layers), CutAssignment::Knitted);
  std::vector<int> idx(static_cast<std::size_t>(2 * layers));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first `cuts` entries are a uniform subset.
  for (int i = 0; i < cuts; ++i) {
    const int j = std::uniform_int_distribution<int>(i, 2 * layers - 1)(rng);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    out.assignments[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = CutAssignment::Unknitted;
  }
  out.validate(num_spins, layers);
  return out;
}

double round_to_cut_angle(double angle) {
  const double r = std::remainder(angle, 2.0 * kPi);
  return std::abs(r) <= kPi / 2.0 ? 0.0 : kPi;
}

AnsatzParams apply_cuts(const AnsatzParams& params, const CutLayout& layout) {
  layout.validate(params.num_spins, params.layers);
  const auto bonds = layout.patch().cut_bonds(params.num_spins);
  AnsatzParams out = params;
  for (int p = 0; p < params.layers; ++p) {
    for (int s = 0; s < 2; ++s) {
      if (layout.assignments[static_cast<std::size_t>(2 * p + s)] == CutAssignment::Unknitted) {
        double& a = out.at(p, ParamKind::ZZ, bonds[s]);
        a = round_to_cut_angle(a);
      }
    }
  }
  return out;
}

std::vector<double> knitted_angles(const AnsatzParams& params, const CutLayout& layout) {
  layout.validate(params.num_spins, params.layers);
  const auto bonds = layout.patch().cut_bonds(params.num_spins);
  const auto order = bond_order(params.num_spins);
  std::vector<double> out;
  for (int p = 0; p < params.layers; ++p) {
    for (int b : order) {
      const int s = b == bonds[0] ? 0 : (b == bonds[1] ? 1 : -1);
      if (s >= 0 && layout.assignments[static_cast<std::size_t>(2 * p + s)] == CutAssignment::Knitted) {
        out.push_back(params.at(p, ParamKind::ZZ, b));
      }
    }
  }
  return out;
}

// --- Split -------------------------------------------------------------------

KnitPlan split(const IsingInstance& instance, int layers, const AnsatzParams& params,
               const CutLayout& layout) {
  const int n = instance.num_spins;
  if (params.num_spins != n || params.layers != layers) throw Error("parameters do not match (N, P)");
  layout.validate(n, layers);
  const PatchSpec patch = layout.patch();
  const auto bonds = patch.cut_bonds(n);
  const auto parts = patch.patches(n);

  KnitPlan plan;
  plan.num_spins = n;
  std::vector<int> side_of(static_cast<std::size_t>(n)), local_of(static_cast<std::size_t>(n));
  for (int s = 0; s < 2; ++s) {
    plan.sides[s].qubits = parts[s];
    for (int i = 0; i < static_cast<int>(parts[s].size()); ++i) {
      side_of[static_cast<std::size_t>(parts[s][i])] = s;
      local_of[static_cast<std::size_t>(parts[s][i])] = i;
    }
  }
  auto emit = [&](int global, const Gate& g) {
    Gate local = g;
    local.qubits[0] = local_of[static_cast<std::size_t>(global)];
    if (g.arity() == 2) local.qubits[1] = local_of[static_cast<std::size_t>(g.qubits[1])];
    plan.sides[side_of[static_cast<std::size_t>(global)]].ops.push_back({local, -1});
  };

  for (int q = 0; q < n; ++q) emit(q, gates::h(q));
  const auto order = bond_order(n);
  for (int p = 0; p < layers; ++p) {
    for (int b : order) {
      const auto [u, v] = bond_qubits(n, b);
      const double angle = params.at(p, ParamKind::ZZ, b);
      const int s = b == bonds[0] ? 0 : (b == bonds[1] ? 1 : -1);
      if (s < 0) {
        emit(u, gates::rzz(u, v, angle));
        continue;
      }
      const bool knitted = layout.assignments[static_cast<std::size_t>(2 * p + s)] == CutAssignment::Knitted;
      if (knitted) {
        KnittedGate kg;
        kg.angle = angle;
        kg.layer = p;
        kg.bond = b;
        const int a = side_of[static_cast<std::size_t>(u)] == 0 ? u : v;
        const int c = a == u ? v : u;
        kg.local_qubits = {local_of[static_cast<std::size_t>(a)], local_of[static_cast<std::size_t>(c)]};
        const int slot = plan.num_knitted();
        plan.knitted.push_back(kg);
        plan.sides[0].ops.push_back({gates::z(kg.local_qubits[0]), slot});
        plan.sides[1].ops.push_back({gates::z(kg.local_qubits[1]), slot});
        continue;
      }
      const double r = std::remainder(angle, 2.0 * kPi);
      if (std::abs(r) < 1e-12) continue;
      if (std::abs(std::abs(r) - kPi) < 1e-12) {
        emit(u, gates::z(u));
        emit(v, gates::z(v));
        continue;
      }
      std::ostringstream msg;
      msg << "unknitted cross gate on bond " << b << " in layer " << p << " has angle " << angle
          << "; apply_cuts first";
      throw Error(msg.str());
    }
    for (int q = 0; q < n; ++q) emit(q, gates::rx(q, params.at(p, ParamKind::X, q)));
  }

  for (int b = 0; b < n; ++b) {
    const auto [u, v] = bond_qubits(n, b);
    Route r;
    if (side_of[static_cast<std::size_t>(u)] == side_of[static_cast<std::size_t>(v)]) {
      r.side = side_of[static_cast<std::size_t>(u)];
      r.local.push_back(PauliString::pair(plan.sides[r.side].width(), local_of[static_cast<std::size_t>(u)], 'Z',
                                          local_of[static_cast<std::size_t>(v)], 'Z'));
    } else {
      r.side = -1;
      r.z_qubits[side_of[static_cast<std::size_t>(u)]] = local_of[static_cast<std::size_t>(u)];
      r.z_qubits[side_of[static_cast<std::size_t>(v)]] = local_of[static_cast<std::size_t>(v)];
    }
    plan.routes.push_back(std::move(r));
  }
  for (int q = 0; q < n; ++q) {
    Route r;
    r.side = side_of[static_cast<std::size_t>(q)];
    r.local.push_back(PauliString::single(plan.sides[r.side].width(), local_of[static_cast<std::size_t>(q)], 'X'));
    plan.routes.push_back(std::move(r));
  }
  return plan;
}

// --- Exact reconstruction ------------------------------------------------------

namespace {

// Observables each side must report. Entry 0 of every value row is the trace.
struct SideObservables {
  std::vector<PauliString> paulis;
  std::vector<int> route_slot;    // per route: column in the side table, or -1
  std::vector<int> product_slot;  // per route: column of the single-Z factor, or -1
};

std::array<SideObservables, 2> side_observables(const KnitPlan& plan) {
  std::array<SideObservables, 2> out;
  for (auto& s : out) {
    s.route_slot.assign(plan.routes.size(), -1);
    s.product_slot.assign(plan.routes.size(), -1);
  }
  for (std::size_t i = 0; i < plan.routes.size(); ++i) {
    const Route& r = plan.routes[i];
    if (r.side >= 0) {
      auto& s = out[static_cast<std::size_t>(r.side)];
      s.paulis.push_back(r.local.front());
      s.route_slot[i] = static_cast<int>(s.paulis.size());
    } else {
      for (int side = 0; side < 2; ++side) {
        auto& s = out[static_cast<std::size_t>(side)];
        s.paulis.push_back(PauliString::single(plan.sides[side].width(), r.z_qubits[side], 'Z'));
        s.product_slot[i] = static_cast<int>(s.paulis.size());
      }
    }
  }
  return out;
}

Gate local_gate(LocalOp op, int q) {
  switch (op) {
    case LocalOp::Z: return gates::z(q);
    case LocalOp::RotPlus: return gates::rz(q, -kPi / 2.0);
    case LocalOp::RotMinus: return gates::rz(q, kPi / 2.0);
    default: break;
  }
  throw Error("local op has no gate form");
}

// Pure-state side: a list of signed branches.
struct PureSide {
  std::vector<Branch> branches;

  explicit PureSide(int width) { branches.push_back({1.0, zero_state(width)}); }
  void gate(const Gate& g) {
    for (auto& b : branches) apply_gate(b.state, g);
  }
  void local(LocalOp op, int q) {
    if (op == LocalOp::Id) return;
    if (op != LocalOp::MeasSign) {
      gate(local_gate(op, q));
      return;
    }
    std::vector<Branch> next;
    next.reserve(2 * branches.size());
    for (const auto& b : branches) {
      for (auto& s : split_signed(b, q)) next.push_back(std::move(s));
    }
    branches = std::move(next);
  }
  double trace() const {
    double t = 0.0;
    for (const auto& b : branches) t += b.weight * b.state.norm_squared();
    return t;
  }
  double value(const PauliString& p) const { return expectation(std::span<const Branch>(branches), p); }
};

struct DensitySide {
  DensityState rho;

  explicit DensitySide(int width) : rho(to_density(zero_state(width))) {}
  void gate(const Gate& g) { apply_gate(rho, g); }
  void local(LocalOp op, int q) {
    if (op == LocalOp::Id) return;
    if (op == LocalOp::MeasSign) {
      apply_signed_measure(rho, q);
    } else {
      gate(local_gate(op, q));
    }
  }
  double trace() const { return rho.trace(); }
  double value(const PauliString& p) const { return expectation(rho, p); }
};

// Table of (trace, observables...) for every label tuple reachable from the
// allowed labels, indexed by sum_j label_j * 5^j.
template <class State>
class SideTable {
 public:
  SideTable(const SubCircuit& side, const std::vector<PauliString>& paulis,
            const std::vector<std::array<bool, kNumLabels>>& allowed)
      : side_(side), paulis_(paulis), allowed_(allowed), cols_(paulis.size() + 1) {
    std::size_t count = 1;
    for (std::size_t j = 0; j < allowed.size(); ++j) count *= kNumLabels;
    values_.assign(count * cols_, 0.0);
    State s(side.width());
    walk(std::move(s), 0, 0, 1);
  }

  const double* row(std::size_t index) const { return values_.data() + index * cols_; }

 private:
  void walk(State state, std::size_t pos, std::size_t index, std::size_t stride) {
    while (pos < side_.ops.size() && side_.ops[pos].slot < 0) state.gate(side_.ops[pos++].gate);
    if (pos == side_.ops.size()) {
      double* r = values_.data() + index * cols_;
      r[0] = state.trace();
      for (std::size_t i = 0; i < paulis_.size(); ++i) r[i + 1] = state.value(paulis_[i]);
      return;
    }
    const SideOp& op = side_.ops[pos];
    const auto& ok = allowed_[static_cast<std::size_t>(op.slot)];
    int last = -1;
    for (int l = 0; l < kNumLabels; ++l) if (ok[static_cast<std::size_t>(l)]) last = l;
    for (int l = 0; l < kNumLabels; ++l) {
      if (!ok[static_cast<std::size_t>(l)]) continue;
      State next = l == last ? std::move(state) : state;
      next.local(static_cast<LocalOp>(l), op.gate.qubits[0]);
      walk(std::move(next), pos + 1, index + static_cast<std::size_t>(l) * stride, stride * kNumLabels);
      if (l == last) break;
    }
  }

  const SubCircuit& side_;
  const std::vector<PauliString>& paulis_;
  const std::vector<std::array<bool, kNumLabels>>& allowed_;
  std::size_t cols_;
  std::vector<double> values_;
};

struct ActiveTerm {
  double coefficient;
  int label_a;
  int label_b;
};

template <class State>
Eigen::VectorXd knit_exact_impl(const KnitPlan& plan) {
  const int k = plan.num_knitted();
  const auto obs = side_observables(plan);
  std::vector<std::vector<ActiveTerm>> terms(static_cast<std::size_t>(k));
  std::array<std::vector<std::array<bool, kNumLabels>>, 2> allowed;
  for (auto& a : allowed) a.assign(static_cast<std::size_t>(k), {});
  for (int j = 0; j < k; ++j) {
    for (const auto& t : qpd_terms(plan.knitted[static_cast<std::size_t>(j)].angle)) {
      if (t.coefficient == 0.0) continue;
      terms[static_cast<std::size_t>(j)].push_back({t.coefficient, label_index(t.op_a), label_index(t.op_b)});
      allowed[0][static_cast<std::size_t>(j)][static_cast<std::size_t>(label_index(t.op_a))] = true;
      allowed[1][static_cast<std::size_t>(j)][static_cast<std::size_t>(label_index(t.op_b))] = true;
    }
  }
  const SideTable<State> ta(plan.sides[0], obs[0].paulis, allowed[0]);
  const SideTable<State> tb(plan.sides[1], obs[1].paulis, allowed[1]);

  const std::size_t nr = plan.routes.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nr));
  std::vector<std::size_t> choice(static_cast<std::size_t>(k), 0);
  while (true) {
    double c = 1.0;
    std::size_t ia = 0, ib = 0, stride = 1;
    for (int j = 0; j < k; ++j) {
      const ActiveTerm& t = terms[static_cast<std::size_t>(j)][choice[static_cast<std::size_t>(j)]];
      c *= t.coefficient;
      ia += static_cast<std::size_t>(t.label_a) * stride;
      ib += static_cast<std::size_t>(t.label_b) * stride;
      stride *= kNumLabels;
    }
    const double* ra = ta.row(ia);
    const double* rb = tb.row(ib);
    for (std::size_t i = 0; i < nr; ++i) {
      const Route& r = plan.routes[i];
      double v;
      if (r.side == 0) {
        v = ra[obs[0].route_slot[i]] * rb[0];
      } else if (r.side == 1) {
        v = ra[0] * rb[obs[1].route_slot[i]];
      } else {
        v = ra[obs[0].product_slot[i]] * rb[obs[1].product_slot[i]];
      }
      out(static_cast<Eigen::Index>(i)) += c * v;
    }
    int j = 0;
    for (; j < k; ++j) {
      auto& cj = choice[static_cast<std::size_t>(j)];
      if (++cj < terms[static_cast<std::size_t>(j)].size()) break;
      cj = 0;
    }
    if (j == k) break;
  }
  return out;
}

}  // namespace

Eigen::VectorXd knit_exact(const KnitPlan& plan, KnitBackend backend) {
  const int k = plan.num_knitted();
  if (k > kMaxExactKnitted) {
    std::vector<double> angles;
    for (const auto& g : plan.knitted) angles.push_back(g.angle);
    std::ostringstream msg;
    msg << "knit_exact supports at most " << kMaxExactKnitted << " knitted gates, got " << k
        << " (6^" << k << " term assignments, sampling overhead " << overhead(angles) << ")";
    throw Error(msg.str());
  }
  if (backend == KnitBackend::Auto) {
    // Pure branches double per MEAS_SIGN slot; at most 2^k of them.
    backend = (std::size_t{1} << k) <= 64 ? KnitBackend::Pure : KnitBackend::Density;
  }
  return backend == KnitBackend::Pure ? knit_exact_impl<PureSide>(plan) : knit_exact_impl<DensitySide>(plan);
}

// --- Sampled reconstruction --------------------------------------------------

namespace {

// Outcome law of one side for a fixed label tuple: the MEAS_SIGN branches
// with their probability, sign, and final Z / X basis distributions.
struct SideLaw {
  std::vector<double> branch_cdf;
  std::vector<double> branch_sign;
  std::vector<std::vector<double>> z_cdf;
  std::vector<std::vector<double>> x_cdf;
};

std::vector<double> cumulative(const Eigen::VectorXcd& amps) {
  std::vector<double> cdf(static_cast<std::size_t>(amps.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps(i));
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, double u) {
  const double x = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

SideLaw side_law(const SubCircuit& side, const std::vector<int>& labels) {
  PureSide s(side.width());
  for (const SideOp& op : side.ops) {
    if (op.slot < 0) {
      s.gate(op.gate);
    } else {
      s.local(static_cast<LocalOp>(labels[static_cast<std::size_t>(op.slot)]), op.gate.qubits[0]);
    }
  }
  SideLaw law;
  double acc = 0.0;
  for (const Branch& b : s.branches) {
    const double p = b.state.norm_squared();
    if (p <= 0.0) continue;
    acc += p;
    law.branch_cdf.push_back(acc);
    law.branch_sign.push_back(b.weight < 0 ? -1.0 : 1.0);
    law.z_cdf.push_back(cumulative(b.state.amplitudes));
    PureState xs = b.state;
    for (int q = 0; q < side.width(); ++q) apply_gate(xs, gates::h(q));
    law.x_cdf.push_back(cumulative(xs.amplitudes));
  }
  return law;
}

double parity_sign(std::size_t outcome, std::uint64_t mask) {
  return (std::popcount(static_cast<std::uint64_t>(outcome) & mask) & 1) ? -1.0 : 1.0;
}

}  // namespace

Eigen::VectorXd knit_sampled(const KnitPlan& plan, std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw Error("knit_sampled needs at least one sample");
  const int k = plan.num_knitted();
  std::vector<std::vector<QpdTerm>> terms(static_cast<std::size_t>(k));
  std::vector<std::vector<double>> term_cdf(static_cast<std::size_t>(k));
  double gamma_total = 1.0;
  for (int j = 0; j < k; ++j) {
    double acc = 0.0;
    for (const auto& t : qpd_terms(plan.knitted[static_cast<std::size_t>(j)].angle)) {
      if (t.coefficient == 0.0) continue;
      acc += std::abs(t.coefficient);
      terms[static_cast<std::size_t>(j)].push_back(t);
      term_cdf[static_cast<std::size_t>(j)].push_back(acc);
    }
    gamma_total *= acc;
  }

  // Observable masks: Z setting covers the bond terms, X setting the field terms.
  const std::size_t nr = plan.routes.size();
  const int n = plan.num_spins;
  std::array<std::unordered_map<std::uint64_t, SideLaw>, 2> cache;
  auto law_for = [&](int side, const std::vector<int>& labels) -> const SideLaw& {
    std::uint64_t key = 0;
    for (int l : labels) key = key * kNumLabels + static_cast<std::uint64_t>(l);
    auto& c = cache[static_cast<std::size_t>(side)];
    auto it = c.find(key);
    if (it == c.end()) it = c.emplace(key, side_law(plan.sides[side], labels)).first;
    return it->second;
  };

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nr));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int setting = 0; setting < 2; ++setting) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(setting + 1)));
    const std::size_t first = setting == 0 ? 0 : static_cast<std::size_t>(n);
    const std::size_t last = setting == 0 ? static_cast<std::size_t>(n) : nr;
    std::array<std::vector<int>, 2> labels;
    labels[0].resize(static_cast<std::size_t>(k));
    labels[1].resize(static_cast<std::size_t>(k));
    for (std::int64_t s = 0; s < samples; ++s) {
      double weight = gamma_total;
      for (int j = 0; j < k; ++j) {
        const auto& cdf = term_cdf[static_cast<std::size_t>(j)];
        const QpdTerm& t = terms[static_cast<std::size_t>(j)][draw(cdf, unit(rng))];
        if (t.coefficient < 0) weight = -weight;
        labels[0][static_cast<std::size_t>(j)] = label_index(t.op_a);
        labels[1][static_cast<std::size_t>(j)] = label_index(t.op_b);
      }
      std::array<std::size_t, 2> outcome{};
      for (int side = 0; side < 2; ++side) {
        const SideLaw& law = law_for(side, labels[static_cast<std::size_t>(side)]);
        const std::size_t b = draw(law.branch_cdf, unit(rng));
        weight *= law.branch_sign[b];
        const auto& dist = setting == 0 ? law.z_cdf[b] : law.x_cdf[b];
        outcome[static_cast<std::size_t>(side)] = draw(dist, unit(rng));
      }
      for (std::size_t i = first; i < last; ++i) {
        const Route& r = plan.routes[i];
        double v;
        if (r.side >= 0) {
          const PauliString& p = r.local.front();
          v = parity_sign(outcome[static_cast<std::size_t>(r.side)], p.x_mask() | p.z_mask());
        } else {
          v = parity_sign(outcome[0], std::uint64_t{1} << r.z_qubits[0]) *
              parity_sign(outcome[1], std::uint64_t{1} << r.z_qubits[1]);
        }
        sum(static_cast<Eigen::Index>(i)) += weight * v;
      }
    }
  }
  return sum / static_cast<double>(samples);
}

}  // namespace mitiknit
