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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mitiknit/rng.hpp"
#include "oracle.hpp"

using namespace mitiknit;

namespace {

constexpr double kPi = std::numbers::pi;

AnsatzParams random_params(int n, int layers, std::mt19937_64& rng) {
  AnsatzParams p = AnsatzParams::zeros(n, layers);
  std::uniform_real_distribution<double> a(-kPi, kPi);
  for (auto& t : p.theta) t = a(rng);
  return p;
}

}  // namespace

TEST(qpd, trivial_angles) {
  const auto t0 = qpd_terms(0.0);
  EXPECT_EQ(t0[0].coefficient, 1.0);
  for (int i = 1; i < 6; ++i) EXPECT_EQ(std::abs(t0[i].coefficient), 0.0);
  const auto tp = qpd_terms(kPi);
  EXPECT_NEAR(tp[1].coefficient, 1.0, 1e-15);
  EXPECT_EQ(tp[1].op_a, LocalOp::Z);
  EXPECT_NEAR(qpd_gamma(kPi), 1.0, 1e-15);
  EXPECT_NEAR(qpd_gamma(kPi / 2), 3.0, 1e-15);
}

TEST(qpd, coefficient_identities) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-10, 10);
  for (int rep = 0; rep < 1000; ++rep) {
    const double phi = a(rng);
    double sum = 0.0, one = 0.0;
    for (const auto& t : qpd_terms(phi)) {
      sum += t.coefficient;
      one += std::abs(t.coefficient);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(one, qpd_gamma(phi), 1e-12);
  }
}

TEST(qpd, reproduces_rzz_channel_on_two_to_four_qubits) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-kPi, kPi);
  for (int n = 2; n <= 4; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::MatrixXcd rho = oracle::random_density(n, rng);
      const int qa = static_cast<int>(rng() % n);
      const int qb = (qa + 1 + static_cast<int>(rng() % (n - 1))) % n;
      const double phi = a(rng);
      const Eigen::MatrixXcd u = oracle::gate_matrix(gates::rzz(qa, qb, phi), n);
      const Eigen::MatrixXcd ref = u * rho * u.adjoint();
      Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
      for (const auto& t : qpd_terms(phi)) {
        sum += t.coefficient * oracle::apply_local(oracle::apply_local(rho, n, qa, t.op_a), n, qb, t.op_b);
      }
      EXPECT_LT((sum - ref).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(overhead, formula_cases) {
  EXPECT_EQ(overhead({}), 1.0);
  const std::vector<double> two{kPi / 2, kPi / 2};
  EXPECT_NEAR(overhead(two), 81.0, 1e-12);
  const std::vector<double> a{0.0, 0.7}, b{0.7};
  EXPECT_EQ(overhead(a), overhead(b));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> phis(1 + rng() % 6);
    double ref = 1.0;
    for (auto& p : phis) {
      p = u(rng);
      ref *= (1 + 2 * std::abs(std::sin(p))) * (1 + 2 * std::abs(std::sin(p)));
    }
    EXPECT_DOUBLE_EQ(overhead(phis), ref);
  }
}

TEST(layout, random_layout_counts_and_json) {
  for (int c = 0; c <= 16; ++c) {
    const CutLayout l = random_layout(6, 8, c, 100 + c);
    EXPECT_EQ(l.num_cuts(), c);
    EXPECT_GE(l.cut_site, 1);
    EXPECT_LE(l.cut_site, 6);
    const CutLayout back = layout_from_json(nlohmann::json::parse(to_json(l).dump()));
    EXPECT_EQ(back.cut_site, l.cut_site);
    EXPECT_EQ(back.assignments, l.assignments);
  }
  EXPECT_THROW(random_layout(6, 8, 17, 1), Error);
  EXPECT_THROW(random_layout(6, 8, -1, 1), Error);
}

TEST(layout, cut_site_is_uniform) {
  // Chi-square test at the 1% level, 5 degrees of freedom: 15.09.
  std::vector<int> hist(6, 0);
  for (int i = 0; i < 10000; ++i) ++hist[random_layout(6, 2, 1, derive_seed(9, i)).cut_site - 1];
  double chi2 = 0.0;
  for (int h : hist) chi2 += (h - 10000.0 / 6) * (h - 10000.0 / 6) / (10000.0 / 6);
  EXPECT_LT(chi2, 15.09);
}

TEST(apply_cuts, nearest_rounding) {
  EXPECT_EQ(round_to_cut_angle(0.1), 0.0);
  EXPECT_EQ(round_to_cut_angle(3.0), kPi);
  EXPECT_EQ(round_to_cut_angle(-3.0), kPi);
  EXPECT_EQ(round_to_cut_angle(kPi / 2), 0.0);
  EXPECT_EQ(round_to_cut_angle(2 * kPi + 0.2), 0.0);
  EXPECT_EQ(round_to_cut_angle(1.6), kPi);

  std::mt19937_64 rng(5);
  const AnsatzParams p = random_params(6, 4, rng);
  const CutLayout l = random_layout(6, 4, 3, 7);
  const AnsatzParams c = apply_cuts(p, l);
  const auto bonds = l.patch().cut_bonds(6);
  int changed = 0;
  for (Eigen::Index i = 0; i < p.theta.size(); ++i) changed += p.theta(i) != c.theta(i);
  EXPECT_LE(changed, 3);
  for (int layer = 0; layer < 4; ++layer) {
    for (int s = 0; s < 2; ++s) {
      if (l.assignments[2 * layer + s] == CutAssignment::Unknitted) {
        const double v = c.at(layer, ParamKind::ZZ, bonds[s]);
        EXPECT_TRUE(v == 0.0 || v == kPi);
      }
    }
  }
}

TEST(split, plan_structure) {
  std::mt19937_64 rng(6);
  const IsingInstance inst = random_instance(4, 1);
  const AnsatzParams p = random_params(4, 1, rng);
  CutLayout l{1, {CutAssignment::Knitted, CutAssignment::Unknitted}};
  const KnitPlan plan = split(inst, 1, apply_cuts(p, l), l);
  EXPECT_EQ(plan.num_knitted(), 1);
  EXPECT_EQ(plan.sides[0].width(), 2);
  EXPECT_EQ(plan.sides[1].width(), 2);
  EXPECT_EQ(plan.routes.size(), 8u);
  EXPECT_THROW(split(inst, 1, p, l), Error);
}

TEST(knit_exact, no_knitted_gates_is_product_of_sides) {
  std::mt19937_64 rng(7);
  const IsingInstance inst = random_instance(6, 1);
  CutLayout l = random_layout(6, 3, 6, 8);
  const AnsatzParams p = apply_cuts(random_params(6, 3, rng), l);
  const Eigen::VectorXd ref = ising_expectations(run_pure(build_ansatz(inst, 3, p)));
  const Eigen::VectorXd got = knit_exact(split(inst, 3, p, l));
  EXPECT_LT((got - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(knit_exact, matches_full_simulation_property) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 4 + 2 * static_cast<int>(rng() % 3);
    const int layers = std::array{1, 2, 4}[rng() % 3];
    const int k = std::min<int>(static_cast<int>(rng() % 4), 2 * layers);
    const IsingInstance inst = random_instance(n, rng());
    const CutLayout l = random_layout(n, layers, 2 * layers - k, rng());
    const AnsatzParams p = apply_cuts(random_params(n, layers, rng), l);
    const KnitPlan plan = split(inst, layers, p, l);
    ASSERT_EQ(plan.num_knitted(), k);
    const Eigen::VectorXd ref = ising_expectations(run_pure(build_ansatz(inst, layers, p)));
    EXPECT_LT((knit_exact(plan) - ref).cwiseAbs().maxCoeff(), 1e-10) << "n=" << n << " P=" << layers << " k=" << k;
  }
}

TEST(knit_exact, density_backend_agrees_with_pure) {
  std::mt19937_64 rng(9);
  const IsingInstance inst = random_instance(4, 2);
  const CutLayout l = random_layout(4, 2, 1, 3);
  const AnsatzParams p = apply_cuts(random_params(4, 2, rng), l);
  const KnitPlan plan = split(inst, 2, p, l);
  const Eigen::VectorXd a = knit_exact(plan, KnitBackend::Pure);
  const Eigen::VectorXd b = knit_exact(plan, KnitBackend::Density);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(knit_exact, rejects_too_many_knitted_gates) {
  std::mt19937_64 rng(10);
  const IsingInstance inst = random_instance(4, 2);
  const CutLayout l = random_layout(4, 4, 1, 3);
  const KnitPlan plan = split(inst, 4, apply_cuts(random_params(4, 4, rng), l), l);
  EXPECT_THROW(knit_exact(plan), Error);
}

TEST(knit_sampled, zero_knitted_angles_have_no_knitting_variance) {
  const IsingInstance inst = random_instance(4, 2);
  std::mt19937_64 rng(11);
  AnsatzParams p = random_params(4, 2, rng);
  CutLayout l{2, {CutAssignment::Knitted, CutAssignment::Knitted, CutAssignment::Unknitted, CutAssignment::Knitted}};
  const auto bonds = l.patch().cut_bonds(4);
  p.at(0, ParamKind::ZZ, bonds[0]) = 0.0;
  p.at(0, ParamKind::ZZ, bonds[1]) = 0.0;
  p.at(1, ParamKind::ZZ, bonds[1]) = 0.0;
  p = apply_cuts(p, l);
  const KnitPlan plan = split(inst, 2, p, l);
  const Eigen::VectorXd exact = knit_exact(plan);
  const Eigen::VectorXd est = knit_sampled(plan, 200000, 5);
  // Only shot noise remains: standard error <= 1/sqrt(S).
  EXPECT_LT((est - exact).cwiseAbs().maxCoeff(), 5.0 / std::sqrt(200000.0));
}

TEST(knit_sampled, unbiased_over_seeds) {
  const IsingInstance inst = random_instance(4, 3);
  std::mt19937_64 rng(12);
  const CutLayout l = random_layout(4, 2, 3, 4);
  const AnsatzParams p = apply_cuts(random_params(4, 2, rng), l);
  const KnitPlan plan = split(inst, 2, p, l);
  ASSERT_EQ(plan.num_knitted(), 1);
  const Eigen::VectorXd exact = knit_exact(plan);
  const double gamma = qpd_gamma(plan.knitted[0].angle);
  const int seeds = 100;
  const std::int64_t s = 1000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(exact.size());
  for (int i = 0; i < seeds; ++i) mean += knit_sampled(plan, s, derive_seed(77, i));
  mean /= seeds;
  const double se = gamma / std::sqrt(static_cast<double>(seeds * s));
  for (Eigen::Index i = 0; i < exact.size(); ++i) EXPECT_LT(std::abs(mean(i) - exact(i)), 4 * se) << i;
}

TEST(knit_sampled, reproducible_per_seed) {
  const IsingInstance inst = random_instance(4, 3);
  std::mt19937_64 rng(13);
  const CutLayout l = random_layout(4, 2, 2, 4);
  const KnitPlan plan = split(inst, 2, apply_cuts(random_params(4, 2, rng), l), l);
  EXPECT_EQ(knit_sampled(plan, 500, 1), knit_sampled(plan, 500, 1));
  EXPECT_NE(knit_sampled(plan, 500, 1), knit_sampled(plan, 500, 2));
}
