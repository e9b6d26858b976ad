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

// Image -> text retrieval: flat cosine nearest neighbours and the radial
// sweep that walks from the root toward the best match, collecting a
// general -> specific caption hierarchy.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radial/geometry.hpp"

namespace radial {

inline constexpr int kDefaultSweepSteps = 50;

struct SweepStep {
  int step = 0;         // 1..steps
  double radius = 0.0;  // shell radius around the root at this step
  std::string key;      // retrieved text
};

struct SweepResult {
  std::vector<SweepStep> steps;        // only steps with a non-empty shell
  std::vector<std::string> hierarchy;  // steps with consecutive repeats collapsed
};

// Most cosine-similar candidate; ties go to the lexicographically smallest
// key. Throws EmptyCandidates.
std::string nearest_text(std::span<const double> image, std::span<const Embedding> candidates);

// Let t* be the nearest text and d* = d_r(t*). For k = 1..steps the shell
// radius is (k/steps) * d*, i.e. the root distance of the k-th equally spaced
// point on the segment root -> t* (the k = 0 point at the root is skipped).
// At each step, the most image-similar candidate with d_r <= radius is
// retrieved.
SweepResult hierarchical_retrieve(std::span<const double> image, std::span<const double> root,
                                  std::span<const Embedding> candidates,
                                  int steps = kDefaultSweepSteps);

// Top-k keys by cosine similarity, descending; ties in key order.
// Throws BadK unless 1 <= k <= |corpus|.
std::vector<std::string> knn_retrieve(std::span<const double> query,
                                      std::span<const Embedding> corpus, std::size_t k);

}  // namespace radial
