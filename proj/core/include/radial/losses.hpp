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

// Radial-embedding (RE) and entailment-cone (EC) losses over embeddings and a
// learnable root, with exact analytic gradients.
//
// Every loss has a value-only entry point and a *_grad entry point that
// returns the same value alongside a GradientBundle. At non-differentiable
// points (hinge corners, exterior angle of exactly 0 or pi, the aperture
// clamp) the zero subgradient is used and GradientBundle::at_kink is set.

#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "radial/geometry.hpp"

namespace radial {

struct LossConfig {
  double lambda_re = 1.0;
  double lambda_reg = 10.0;
  // Cone constant: sin(theta) = min(1, epsilon / d_r).
  double epsilon = 0.05;
  // Margin alpha of the EC margin loss; infinity disables clipping.
  double margin = std::numeric_limits<double>::infinity();

  void validate() const;
};

// +1 for an entailment pair, -1 for a contradicting pair.
enum class PairSign : int { kPositive = 1, kNegative = -1 };

// (anchor e, entailed positive e', negative e'') for one tier of one record.
struct Triplet {
  Embedding anchor;
  Embedding positive;
  Embedding negative;
  int tier = 1;
  std::string record_id;
};

// Current caption embeddings of one record with their frozen originals.
// Holds 8 pairs for training records, 4 for records without negatives.
struct RegularizationGroup {
  std::vector<Embedding> current;
  std::vector<Vector> original;
};

struct GradientBundle {
  std::map<std::string, Vector> embeddings;
  Vector root;
  bool at_kink = false;

  void accumulate(const std::string& id, std::span<const double> g, double scale = 1.0);
  void accumulate_root(std::span<const double> g, double scale = 1.0);
  void merge(const GradientBundle& other, double scale = 1.0);
};

struct LossWithGradient {
  double value = 0.0;
  GradientBundle gradient;
};

// Partial derivatives of exterior_angle(root, anchor, other).
struct AngleGradient {
  double value = 0.0;
  Vector d_root;
  Vector d_anchor;
  Vector d_other;
  bool at_kink = false;
};

AngleGradient exterior_angle_gradient(std::span<const double> root, std::span<const double> anchor,
                                      std::span<const double> other);

// Partial derivatives of half_aperture(root, anchor, epsilon). Zero in the
// clamped region d_r <= epsilon.
struct ApertureGradient {
  double value = 0.0;
  Vector d_root;
  Vector d_anchor;
  bool at_kink = false;
};

ApertureGradient half_aperture_gradient(std::span<const double> root,
                                        std::span<const double> anchor, double epsilon);

// L_RE = Xi_r(e, e') - Xi_r(e, e'').
double loss_re(std::span<const double> root, std::span<const double> anchor,
               std::span<const double> positive, std::span<const double> negative);
double loss_re(std::span<const double> root, const Triplet& t);
LossWithGradient loss_re_grad(std::span<const double> root, const Triplet& t);

// max(-margin, sign * (Xi_r(e, e') - theta_r(e))). margin = 0 with a positive
// sign is the plain EC hinge [Xi - theta]^+.
double loss_ec_margin(std::span<const double> root, std::span<const double> anchor,
                      std::span<const double> other, PairSign sign, double epsilon, double margin);
LossWithGradient loss_ec_margin_grad(std::span<const double> root, const Embedding& anchor,
                                     const Embedding& other, PairSign sign, double epsilon,
                                     double margin);

// -(1/n) sum_i sim(current_i, original_i), n in {4, 8}.
double loss_reg(std::span<const Vector> current, std::span<const Vector> original);
double loss_reg(const RegularizationGroup& group);
LossWithGradient loss_reg_grad(const RegularizationGroup& group);

// Indices (into the minibatch) of the triplet with the largest positive
// angle and the triplet with the smallest negative angle. Ties go to the
// lowest (tier, position).
struct HardExamples {
  std::size_t hardest_positive = 0;
  std::size_t hardest_negative = 0;
};

HardExamples select_hard_examples(std::span<const Triplet> batch, std::span<const double> root);

// mean_t L_RE(t) + L_RE(hardest positive) + L_RE(hardest negative).
double loss_re_aggregate(std::span<const Triplet> batch, std::span<const double> root);
LossWithGradient loss_re_aggregate_grad(std::span<const Triplet> batch,
                                        std::span<const double> root);

// lambda_re * aggregate RE loss + lambda_reg * (mean over records of L_reg).
double loss_total(std::span<const Triplet> batch, std::span<const double> root,
                  const LossConfig& config, std::span<const RegularizationGroup> regularization);
LossWithGradient loss_total_grad(std::span<const Triplet> batch, std::span<const double> root,
                                 const LossConfig& config,
                                 std::span<const RegularizationGroup> regularization);

}  // namespace radial
