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

// Evaluation statistics: hierarchical precision/recall, Kendall tau-b and the
// root-distance order score tau_d, Spearman rho, lexical entailment scoring,
// two-tier label pair prediction with a cross-validated mixing constant, and
// flat recall@k.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radial/dataset.hpp"
#include "radial/geometry.hpp"
#include "radial/store.hpp"

namespace radial {

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// Ground truth must hold 4 distinct keys (BadGroundTruth otherwise).
// Precision over the unique retrieved keys; 0 when nothing was retrieved.
PrecisionRecall precision_recall(std::span<const std::string> retrieved,
                                 std::span<const std::string> ground_truth);

// Kendall tau-b with tie correction, O(n log n). Throws DegenerateInput when
// n < 2 or either series is constant.
double kendall_tau(std::span<const double> xs, std::span<const double> ys);
// Against the reference ranks 1..n.
double kendall_tau(std::span<const double> values);

// Kendall tau between the root distances of four tier embeddings (P1..P4)
// and their tier order. 1 iff the distances strictly increase.
double tau_d(std::span<const double> root, std::span<const Vector> tiers);

// Pearson correlation of average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Exterior angle Xi_r(left, right) used as the predicted entailment score.
double lexical_entailment_score(std::span<const double> root, std::span<const double> left,
                                std::span<const double> right);

// Ordered pairs (x, y) closer than this in root distance have no order.
inline constexpr double kOrderTolerance = 1e-12;

// c_x + c_y + C * Xi_r(x, y). Throws OrderViolation unless x is strictly
// closer to the root than y.
double pair_score(double c_x, double c_y, std::span<const double> root,
                  std::span<const double> x, std::span<const double> y, double constant);

// Label task with all similarities resolved. Labels are coarse first, then
// fine; ground_truth holds (coarse index, fine index) into `labels`.
struct ScoredLabelTask {
  std::vector<Embedding> labels;
  std::vector<std::string> item_ids;
  std::vector<std::vector<double>> similarities;  // [item][label]
  std::vector<std::pair<std::size_t, std::size_t>> ground_truth;
  std::vector<double> constants = standard_constant_grid();
  bool shuffled_split = false;
  std::uint64_t seed = 0;
};

// Resolves label and image keys against `store` (KeyNotFound) and computes
// cosine similarities between every image and every label.
ScoredLabelTask score_label_task(const LabelPairTask& task, const EmbeddingTable& store,
                                 std::uint64_t seed = 0);

// An ordered label pair that satisfies the root-distance precondition.
struct LabelPair {
  std::size_t x = 0;
  std::size_t y = 0;
  double angle = 0.0;  // Xi_r(x, y)
};

// Every ordered pair of distinct labels with d_r(x) < d_r(y) - kOrderTolerance,
// in enumeration order (x outer, y inner). Ties in score later resolve to
// this order.
std::vector<LabelPair> ordered_label_pairs(std::span<const double> root,
                                           std::span<const Embedding> labels);

// Items sorted by id, then alternately assigned to folds 0 and 1. With
// `shuffled`, the sorted order is shuffled with `seed` first.
std::array<std::vector<std::size_t>, 2> split_folds(std::span<const std::string> item_ids,
                                                    bool shuffled, std::uint64_t seed);

// 1 for items whose ground-truth pair ranks in the top k at constant C.
std::vector<int> label_pair_hits(const ScoredLabelTask& task, std::span<const LabelPair> pairs,
                                 double constant, std::size_t k);

struct FoldOutcome {
  double selected_constant = 0.0;  // argmax of recall on this fold
  double held_out_recall = 0.0;    // that constant's recall on the other fold
};

struct PairRecallResult {
  std::size_t k = 1;
  double recall = 0.0;  // mean of the two held-out values
  std::array<FoldOutcome, 2> folds;
};

PairRecallResult breeds_eval(const ScoredLabelTask& task, std::span<const double> root,
                             std::size_t k);

// Fraction of queries whose target is among the k nearest corpus entries
// (k is capped at the corpus size). Throws BadK when k < 1.
double recall_at_k(std::span<const Embedding> queries, std::span<const std::string> targets,
                   std::span<const Embedding> corpus, std::size_t k);

}  // namespace radial
