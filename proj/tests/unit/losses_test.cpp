// Copyright 2026 The Radial Authors.
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

#include "radial/losses.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "oracles.hpp"

namespace radial {
namespace {

using testing::random_vector;

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Embedding emb(std::string id, Vector v) { return Embedding{std::move(id), std::move(v)}; }

Triplet random_triplet(Rng& rng, std::size_t d, int tier, const std::string& tag) {
  return Triplet{emb(tag + "a", random_vector(rng, d)), emb(tag + "p", random_vector(rng, d)),
                 emb(tag + "n", random_vector(rng, d)), tier, tag};
}

TEST(LossConfig, DefaultsAndValidation) {
  const LossConfig c;
  EXPECT_EQ(c.lambda_re, 1.0);
  EXPECT_EQ(c.lambda_reg, 10.0);
  EXPECT_EQ(c.epsilon, 0.05);
  EXPECT_NO_THROW(c.validate());
  LossConfig bad = c;
  bad.epsilon = 0.0;
  EXPECT_RADIAL_ERROR(bad.validate(), ErrorCode::kInvalidArgument);
  bad = c;
  bad.lambda_reg = -1.0;
  EXPECT_RADIAL_ERROR(bad.validate(), ErrorCode::kInvalidArgument);
  bad = c;
  bad.margin = -0.5;
  EXPECT_RADIAL_ERROR(bad.validate(), ErrorCode::kInvalidArgument);
}

TEST(LossRe, Examples) {
  const Vector r{0, 0}, e{1, 0}, p{2, 0}, n{1, 1};
  EXPECT_EQ(loss_re(r, e, p, p), 0.0);
  EXPECT_NEAR(loss_re(r, e, p, n), -kPi / 2, 1e-15);
  EXPECT_RADIAL_ERROR(loss_re(r, r, p, n), ErrorCode::kDegenerateAngle);
}

TEST(LossRe, CompositionAndAntisymmetry) {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t d = 2 + rng.below(20);
    const Vector r = random_vector(rng, d), e = random_vector(rng, d);
    const Vector p = random_vector(rng, d), n = random_vector(rng, d);
    const double l = loss_re(r, e, p, n);
    EXPECT_EQ(l, exterior_angle(r, e, p) - exterior_angle(r, e, n));
    EXPECT_EQ(loss_re(r, e, n, p), -l);
    EXPECT_LE(std::fabs(l), kPi);
  }
}

TEST(LossEcMargin, Examples) {
  const Vector r{0, 0}, e{1, 0};
  EXPECT_EQ(loss_ec_margin(r, e, Vector{2, 0}, PairSign::kPositive, 0.05, 0.0), 0.0);
  EXPECT_NEAR(loss_ec_margin(r, e, Vector{1, 1}, PairSign::kPositive, 0.05, 0.0),
              kPi / 2 - std::asin(0.05), 1e-15);
  EXPECT_NEAR(kPi / 2 - std::asin(0.05), 1.52077, 1e-5);
  EXPECT_RADIAL_ERROR(loss_ec_margin(r, e, Vector{2, 0}, PairSign::kPositive, 0.05, -1.0),
                      ErrorCode::kInvalidArgument);
}

TEST(LossEcMargin, LimitIdentity) {
  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t d = 2 + rng.below(20);
    const Vector r = random_vector(rng, d), e = random_vector(rng, d);
    const Vector p = random_vector(rng, d), n = random_vector(rng, d);
    const double eps = rng.uniform(1e-3, 2.0);
    const double sum = loss_ec_margin(r, e, p, PairSign::kPositive, eps, kInf) +
                       loss_ec_margin(r, e, n, PairSign::kNegative, eps, kInf);
    EXPECT_LE(std::fabs(sum - loss_re(r, e, p, n)), 1e-12);
  }
}

TEST(LossEcMargin, NonDecreasingInMargin) {
  Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t d = 2 + rng.below(8);
    const Vector r = random_vector(rng, d), e = random_vector(rng, d), o = random_vector(rng, d);
    const PairSign s = rng.below(2) ? PairSign::kPositive : PairSign::kNegative;
    const double a1 = rng.uniform(0.0, 2.0), a2 = a1 + rng.uniform(0.0, 2.0);
    const double l1 = loss_ec_margin(r, e, o, s, 0.05, a1);
    const double l2 = loss_ec_margin(r, e, o, s, 0.05, a2);
    const double l3 = loss_ec_margin(r, e, o, s, 0.05, kInf);
    EXPECT_LE(l2, l1);
    EXPECT_LE(l3, l2);
    EXPECT_GE(l1, -a1);
  }
}

TEST(LossReg, Examples) {
  std::vector<Vector> cur, orth;
  Rng rng(14);
  for (int i = 0; i < 8; ++i) cur.push_back(random_vector(rng, 2));
  for (const auto& v : cur) orth.push_back(Vector{-v[1], v[0]});
  EXPECT_DOUBLE_EQ(loss_reg(cur, cur), -1.0);
  EXPECT_NEAR(loss_reg(cur, orth), 0.0, 1e-15);
  const std::vector<Vector> four(cur.begin(), cur.begin() + 4);
  EXPECT_DOUBLE_EQ(loss_reg(four, four), -1.0);
  const std::vector<Vector> seven(cur.begin(), cur.begin() + 7);
  EXPECT_RADIAL_ERROR(loss_reg(seven, seven), ErrorCode::kCountMismatch);
  EXPECT_RADIAL_ERROR(loss_reg(cur, four), ErrorCode::kCountMismatch);
}

TEST(LossReg, EqualsNegatedMeanCosine) {
  Rng rng(15);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t d = 2 + rng.below(30);
    std::vector<Vector> cur, orig;
    double sum = 0.0;
    for (int j = 0; j < 8; ++j) {
      orig.push_back(random_vector(rng, d));
      cur.push_back(random_vector(rng, d));
      for (std::size_t k = 0; k < d; ++k) cur.back()[k] = orig.back()[k] + 0.3 * cur.back()[k];
      sum += cosine_sim(cur.back(), orig.back());
    }
    const double l = loss_reg(cur, orig);
    EXPECT_NEAR(l, -sum / 8.0, 1e-15);
    EXPECT_GE(l, -1.0);
    EXPECT_LE(l, 1.0);
  }
}

TEST(LossReg, MinusOneForPositiveScalings) {
  Rng rng(16);
  std::vector<Vector> cur, orig;
  for (int j = 0; j < 8; ++j) {
    orig.push_back(random_vector(rng, 5));
    cur.push_back(orig.back());
    const double scale = rng.uniform(0.1, 10.0);
    for (double& x : cur.back()) x *= scale;
  }
  EXPECT_NEAR(loss_reg(cur, orig), -1.0, 1e-14);
}

TEST(HardExamples, SingletonIsForced) {
  Rng rng(17);
  const Vector r = random_vector(rng, 4);
  const std::vector<Triplet> batch{random_triplet(rng, 4, 1, "x")};
  EXPECT_NEAR(loss_re_aggregate(batch, r), 3.0 * loss_re(r, batch[0]), 1e-15);
}

TEST(HardExamples, TiesGoToLowestTierThenPosition) {
  Rng rng(18);
  const Vector r = random_vector(rng, 3);
  const Triplet t = random_triplet(rng, 3, 2, "t");
  Triplet a = t, b = t, c = t;
  a.tier = 3;
  b.tier = 2;
  c.tier = 2;
  const std::vector<Triplet> batch{a, b, c};
  const HardExamples h = select_hard_examples(batch, r);
  EXPECT_EQ(h.hardest_positive, 1u);
  EXPECT_EQ(h.hardest_negative, 1u);
  const std::vector<Triplet> same{t, t};
  EXPECT_NEAR(loss_re_aggregate(same, r), 3.0 * loss_re(r, t), 1e-15);
}

TEST(HardExamples, MatchesScanOracle) {
  Rng rng(19);
  for (int i = 0; i < 500; ++i) {
    const std::size_t d = 2 + rng.below(16);
    const Vector r = random_vector(rng, d);
    std::vector<Triplet> batch;
    for (int j = 0; j < 24; ++j) batch.push_back(random_triplet(rng, d, 1 + j % 3, std::to_string(j)));
    // Oracle: linear scan in (tier, position) order with strict comparisons.
    std::size_t ip = 0, in = 0;
    double sum = 0.0;
    for (int tier = 1; tier <= 3; ++tier) {
      for (std::size_t j = 0; j < batch.size(); ++j) {
        if (batch[j].tier != tier) continue;
        auto pos = [&](std::size_t k) { return testing::reference_angle(r, batch[k].anchor.values, batch[k].positive.values); };
        auto neg = [&](std::size_t k) { return testing::reference_angle(r, batch[k].anchor.values, batch[k].negative.values); };
        if (pos(j) > pos(ip)) ip = j;
        if (neg(j) < neg(in)) in = j;
      }
    }
    for (const auto& t : batch) sum += loss_re(r, t);
    const HardExamples h = select_hard_examples(batch, r);
    EXPECT_EQ(h.hardest_positive, ip);
    EXPECT_EQ(h.hardest_negative, in);
    EXPECT_NEAR(loss_re_aggregate(batch, r),
                sum / 24.0 + loss_re(r, batch[ip]) + loss_re(r, batch[in]), 1e-12);
  }
}

TEST(HardExamples, EmptyBatch) {
  const std::vector<Triplet> none;
  EXPECT_RADIAL_ERROR(loss_re_aggregate(none, Vector{0, 0}), ErrorCode::kEmptyBatch);
}

TEST(LossTotal, Reductions) {
  Rng rng(20);
  const std::size_t d = 6;
  const Vector r = random_vector(rng, d);
  std::vector<Triplet> batch;
  for (int j = 0; j < 6; ++j) batch.push_back(random_triplet(rng, d, 1 + j % 3, std::to_string(j)));
  RegularizationGroup g;
  for (int j = 0; j < 8; ++j) {
    g.current.push_back(emb("c" + std::to_string(j), random_vector(rng, d)));
    g.original.push_back(random_vector(rng, d));
  }
  const std::vector<RegularizationGroup> groups{g, g};

  LossConfig zero;
  zero.lambda_re = 0.0;
  zero.lambda_reg = 0.0;
  EXPECT_EQ(loss_total(batch, r, zero, groups), 0.0);

  LossConfig re_only;
  re_only.lambda_reg = 0.0;
  re_only.lambda_re = 2.5;
  EXPECT_EQ(loss_total(batch, r, re_only, groups), 2.5 * loss_re_aggregate(batch, r));
  EXPECT_EQ(loss_total(batch, r, re_only, {}), 2.5 * loss_re_aggregate(batch, r));

  const LossConfig defaults;
  EXPECT_NEAR(loss_total(batch, r, defaults, groups),
              1.0 * loss_re_aggregate(batch, r) + 10.0 * loss_reg(g), 1e-12);
  EXPECT_RADIAL_ERROR(loss_total(batch, r, defaults, {}), ErrorCode::kEmptyBatch);
}

TEST(LossTotal, GradientValueMatchesValue) {
  Rng rng(21);
  const Vector r = random_vector(rng, 5);
  std::vector<Triplet> batch;
  for (int j = 0; j < 9; ++j) batch.push_back(random_triplet(rng, 5, 1 + j % 3, std::to_string(j)));
  RegularizationGroup g;
  for (int j = 0; j < 4; ++j) {
    g.current.push_back(emb("c" + std::to_string(j), random_vector(rng, 5)));
    g.original.push_back(random_vector(rng, 5));
  }
  const std::vector<RegularizationGroup> groups{g};
  const LossConfig c;
  EXPECT_EQ(loss_total_grad(batch, r, c, groups).value, loss_total(batch, r, c, groups));
}

TEST(Gradients, SymmetricPairGivesOppositeGradients) {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 2 + rng.below(10);
    const Vector r = random_vector(rng, d), e = random_vector(rng, d), p = random_vector(rng, d);
    const Triplet t{emb("a", e), emb("p", p), emb("n", p), 1, "x"};
    const LossWithGradient g = loss_re_grad(r, t);
    EXPECT_EQ(g.value, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      EXPECT_NEAR(g.gradient.embeddings.at("p")[k], -g.gradient.embeddings.at("n")[k], 1e-12);
      EXPECT_NEAR(g.gradient.embeddings.at("a")[k], 0.0, 1e-12);
    }
  }
}

TEST(Gradients, ClippedHingeHasZeroGradient) {
  // Xi = 0 < theta: the hinge is clipped at 0.
  const LossWithGradient g = loss_ec_margin_grad(Vector{0, 0}, emb("e", {1, 0}), emb("o", {2, 0}),
                                                 PairSign::kPositive, 0.05, 0.0);
  EXPECT_EQ(g.value, 0.0);
  EXPECT_TRUE(g.gradient.embeddings.empty());
  EXPECT_TRUE(g.gradient.root.empty());
}

TEST(Gradients, CollinearAngleFlagsKink) {
  const AngleGradient g = exterior_angle_gradient(Vector{0, 0}, Vector{1, 0}, Vector{2, 0});
  EXPECT_TRUE(g.at_kink);
  EXPECT_EQ(g.d_anchor, (Vector{0, 0}));
}

TEST(Gradients, ClampedApertureIsFlat) {
  const ApertureGradient g = half_aperture_gradient(Vector{0, 0}, Vector{0.01, 0}, 0.05);
  EXPECT_DOUBLE_EQ(g.value, kPi / 2);
  EXPECT_EQ(g.d_anchor, (Vector{0, 0}));
}

}  // namespace
}  // namespace radial
