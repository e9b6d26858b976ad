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

#include "radial/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "radial/retrieve.hpp"

#include "radial/error.hpp"
#include "radial/random.hpp"

namespace radial {

namespace {

void require_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kDegenerateInput, "series has a non-finite value");
  }
}

// Number of tied pairs summed over runs of equal values in a sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    It run = first;
    std::int64_t len = 0;
    while (run != last && eq(*first, *run)) {
      ++run;
      ++len;
    }
    total += len * (len - 1) / 2;
    first = run;
  }
  return total;
}

// Sorts `v` ascending and returns the number of inversions (pairs i < j with
// v[i] > v[j]) of the original order.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    // Positions i..j (0-based) share the average of ranks i+1..j+1.
    const double avg = 0.5 * static_cast<double>(i + j + 2);
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

PrecisionRecall precision_recall(std::span<const std::string> retrieved,
                                 std::span<const std::string> ground_truth) {
  const std::set<std::string> truth(ground_truth.begin(), ground_truth.end());
  if (ground_truth.size() != 4 || truth.size() != 4) {
    throw Error(ErrorCode::kBadGroundTruth, "ground truth must hold 4 distinct keys");
  }
  const std::set<std::string> unique(retrieved.begin(), retrieved.end());
  std::size_t hits = 0;
  for (const auto& k : unique) hits += truth.count(k);
  PrecisionRecall pr;
  pr.precision = unique.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(unique.size());
  pr.recall = static_cast<double>(hits) / 4.0;
  return pr;
}

double kendall_tau(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "kendall_tau series lengths differ");
  }
  if (xs.size() < 2) throw Error(ErrorCode::kDegenerateInput, "kendall_tau needs n >= 2");
  require_finite(xs);
  require_finite(ys);

  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] != xs[b] ? xs[a] < xs[b] : ys[a] < ys[b];
  });

  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 = tied_pairs(order.begin(), order.end(),
                                     [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
  const std::int64_t n3 = tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] == xs[b] && ys[a] == ys[b];
  });

  std::vector<double> y(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = ys[order[i]];
  const std::int64_t swaps = merge_count(y, scratch, 0, n);
  const std::int64_t n2 = tied_pairs(y.begin(), y.end(), [](double a, double b) { return a == b; });

  if (n0 == n1 || n0 == n2) throw Error(ErrorCode::kDegenerateInput, "constant series");
  const std::int64_t numerator = n0 - n1 - n2 + n3 - 2 * swaps;
  return static_cast<double>(numerator) /
         std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

double kendall_tau(std::span<const double> values) {
  std::vector<double> ranks(values.size());
  std::iota(ranks.begin(), ranks.end(), 1.0);
  return kendall_tau(values, ranks);
}

double tau_d(std::span<const double> root, std::span<const Vector> tiers) {
  if (tiers.size() != 4) {
    throw Error(ErrorCode::kCountMismatch, "tau_d needs the 4 tier embeddings");
  }
  std::array<double, 4> distances{};
  for (std::size_t i = 0; i < 4; ++i) distances[i] = root_distance(root, tiers[i]);
  return kendall_tau(distances);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::kDimensionMismatch, "spearman series lengths differ");
  if (xs.size() < 2) throw Error(ErrorCode::kDegenerateInput, "spearman needs n >= 2");
  require_finite(xs);
  require_finite(ys);
  const std::vector<double> rx = average_ranks(xs);
  const std::vector<double> ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kDegenerateInput, "constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double lexical_entailment_score(std::span<const double> root, std::span<const double> left,
                                std::span<const double> right) {
  return exterior_angle(root, left, right);
}

double pair_score(double c_x, double c_y, std::span<const double> root,
                  std::span<const double> x, std::span<const double> y, double constant) {
  const double dx = root_distance(root, x);
  const double dy = root_distance(root, y);
  if (!(dx < dy - kOrderTolerance)) {
    throw Error(ErrorCode::kOrderViolation, "first label is not strictly closer to the root");
  }
  return c_x + c_y + constant * exterior_angle(root, x, y);
}

ScoredLabelTask score_label_task(const LabelPairTask& task, const EmbeddingTable& store,
                                 std::uint64_t seed) {
  ScoredLabelTask out;
  out.constants = task.constants;
  out.shuffled_split = task.shuffled_split;
  out.seed = seed;

  std::unordered_map<std::string, std::size_t> coarse_index, fine_index;
  for (const auto& l : task.coarse) {
    coarse_index.emplace(l.name, out.labels.size());
    out.labels.push_back(Embedding{l.name, store.at(l.key)});
  }
  for (const auto& l : task.fine) {
    fine_index.emplace(l.name, out.labels.size());
    out.labels.push_back(Embedding{l.name, store.at(l.key)});
  }
  for (const auto& img : task.images) {
    auto c = coarse_index.find(img.coarse);
    auto f = fine_index.find(img.fine);
    if (c == coarse_index.end() || f == fine_index.end()) {
      throw Error(ErrorCode::kSchemaError, "image '" + img.id + "' names an unknown label");
    }
    const Vector& v = store.at(img.key);
    std::vector<double> sims;
    sims.reserve(out.labels.size());
    for (const auto& l : out.labels) sims.push_back(cosine_sim(v, l.values));
    out.item_ids.push_back(img.id);
    out.similarities.push_back(std::move(sims));
    out.ground_truth.emplace_back(c->second, f->second);
  }
  return out;
}

std::vector<LabelPair> ordered_label_pairs(std::span<const double> root,
                                           std::span<const Embedding> labels) {
  std::vector<double> d(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) d[i] = root_distance(root, labels[i].values);
  std::vector<LabelPair> out;
  for (std::size_t x = 0; x < labels.size(); ++x) {
    for (std::size_t y = 0; y < labels.size(); ++y) {
      if (x == y || !(d[x] < d[y] - kOrderTolerance)) continue;
      out.push_back(LabelPair{x, y, exterior_angle(root, labels[x].values, labels[y].values)});
    }
  }
  return out;
}

std::array<std::vector<std::size_t>, 2> split_folds(std::span<const std::string> item_ids,
                                                    bool shuffled, std::uint64_t seed) {
  std::vector<std::size_t> order(item_ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return item_ids[a] < item_ids[b]; });
  if (shuffled) {
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
  }
  std::array<std::vector<std::size_t>, 2> folds;
  for (std::size_t i = 0; i < order.size(); ++i) folds[i % 2].push_back(order[i]);
  return folds;
}

std::vector<int> label_pair_hits(const ScoredLabelTask& task, std::span<const LabelPair> pairs,
                                 double constant, std::size_t k) {
  std::vector<int> hits(task.item_ids.size(), 0);
  for (std::size_t item = 0; item < task.item_ids.size(); ++item) {
    const auto [gx, gy] = task.ground_truth[item];
    const auto gt = std::find_if(pairs.begin(), pairs.end(),
                                 [&](const LabelPair& p) { return p.x == gx && p.y == gy; });
    if (gt == pairs.end()) continue;  // ground truth violates the root-distance order
    const auto& sim = task.similarities[item];
    const double target = sim[gt->x] + sim[gt->y] + constant * gt->angle;
    const auto gt_pos = static_cast<std::size_t>(gt - pairs.begin());
    std::size_t rank = 0;
    for (std::size_t p = 0; p < pairs.size() && rank < k; ++p) {
      const double s = sim[pairs[p].x] + sim[pairs[p].y] + constant * pairs[p].angle;
      if (s > target || (s == target && p < gt_pos)) ++rank;
    }
    hits[item] = rank < k ? 1 : 0;
  }
  return hits;
}

PairRecallResult breeds_eval(const ScoredLabelTask& task, std::span<const double> root,
                             std::size_t k) {
  const std::vector<double> grid = standard_constant_grid();
  bool grid_ok = task.constants.size() == grid.size();
  for (std::size_t i = 0; grid_ok && i < grid.size(); ++i) {
    grid_ok = std::abs(task.constants[i] - grid[i]) <= 1e-12;
  }
  if (!grid_ok) {
    throw Error(ErrorCode::kGridMisconfigured,
                "mixing constants must be 20 equally spaced values on [0, 0.2]");
  }
  if (k < 1) throw Error(ErrorCode::kBadK, "k must be >= 1");
  if (task.item_ids.size() < 2) throw Error(ErrorCode::kDegenerateInput, "need at least 2 items");

  const auto folds = split_folds(task.item_ids, task.shuffled_split, task.seed);
  const std::vector<LabelPair> pairs = ordered_label_pairs(root, task.labels);

  // recall[c][f]: recall of constant c on fold f.
  std::vector<std::array<double, 2>> recall(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const std::vector<int> hits = label_pair_hits(task, pairs, task.constants[c], k);
    for (std::size_t f = 0; f < 2; ++f) {
      double sum = 0.0;
      for (std::size_t item : folds[f]) sum += hits[item];
      recall[c][f] = sum / static_cast<double>(folds[f].size());
    }
  }

  PairRecallResult out;
  out.k = k;
  for (std::size_t f = 0; f < 2; ++f) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < grid.size(); ++c) {
      if (recall[c][f] > recall[best][f]) best = c;
    }
    out.folds[f] = FoldOutcome{task.constants[best], recall[best][1 - f]};
  }
  out.recall = 0.5 * (out.folds[0].held_out_recall + out.folds[1].held_out_recall);
  return out;
}

double recall_at_k(std::span<const Embedding> queries, std::span<const std::string> targets,
                   std::span<const Embedding> corpus, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kBadK, "k must be >= 1");
  if (queries.size() != targets.size()) {
    throw Error(ErrorCode::kCountMismatch, "one target per query required");
  }
  if (queries.empty()) throw Error(ErrorCode::kDegenerateInput, "no queries");
  const std::size_t kk = std::min(k, corpus.size());
  std::size_t found = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto top = knn_retrieve(queries[q].values, corpus, kk);
    if (std::find(top.begin(), top.end(), targets[q]) != top.end()) ++found;
  }
  return static_cast<double>(found) / static_cast<double>(queries.size());
}

}  // namespace radial
