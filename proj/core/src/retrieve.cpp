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

#include "radial/retrieve.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "radial/error.hpp"

namespace radial {

namespace {

struct Scored {
  double similarity;
  const std::string* key;
};

// Higher similarity first, then smaller key.
bool better(const Scored& a, const Scored& b) {
  return a.similarity != b.similarity ? a.similarity > b.similarity : *a.key < *b.key;
}

void require_candidates(std::span<const Embedding> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptyCandidates, "no candidate texts");
}

}  // namespace

std::string nearest_text(std::span<const double> image, std::span<const Embedding> candidates) {
  require_candidates(candidates);
  Scored best{cosine_sim(image, candidates[0].values), &candidates[0].id};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const Scored s{cosine_sim(image, candidates[i].values), &candidates[i].id};
    if (better(s, best)) best = s;
  }
  return *best.key;
}

SweepResult hierarchical_retrieve(std::span<const double> image, std::span<const double> root,
                                  std::span<const Embedding> candidates, int steps) {
  require_candidates(candidates);
  if (steps < 1) throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one step");

  const std::size_t n = candidates.size();
  std::vector<double> sim(n), radius(n);
  std::size_t top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sim[i] = cosine_sim(image, candidates[i].values);
    radius[i] = root_distance(root, candidates[i].values);
    if (i > 0 && better({sim[i], &candidates[i].id}, {sim[top], &candidates[top].id})) top = i;
  }
  const double top_radius = radius[top];

  // Shells are nested, so one pass over candidates sorted by radius suffices.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return radius[a] < radius[b]; });

  SweepResult out;
  std::size_t next = 0;
  std::optional<std::size_t> best;
  for (int k = 1; k <= steps; ++k) {
    const double shell = top_radius * (static_cast<double>(k) / static_cast<double>(steps));
    while (next < n && radius[order[next]] <= shell) {
      const std::size_t i = order[next++];
      if (!best || better({sim[i], &candidates[i].id}, {sim[*best], &candidates[*best].id})) best = i;
    }
    if (!best) continue;
    const std::string& key = candidates[*best].id;
    out.steps.push_back(SweepStep{k, shell, key});
    if (out.hierarchy.empty() || out.hierarchy.back() != key) out.hierarchy.push_back(key);
  }
  return out;
}

std::vector<std::string> knn_retrieve(std::span<const double> query,
                                      std::span<const Embedding> corpus, std::size_t k) {
  if (k < 1 || k > corpus.size()) {
    throw Error(ErrorCode::kBadK, "k = " + std::to_string(k) + " outside [1, " +
                                      std::to_string(corpus.size()) + "]");
  }
  std::vector<Scored> scored;
  scored.reserve(corpus.size());
  for (const auto& e : corpus) scored.push_back({cosine_sim(query, e.values), &e.id});
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    better);
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(*scored[i].key);
  return out;
}

}  // namespace radial
