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

// In-memory forms of the benchmark inputs: caption hierarchies, lexical
// entailment pairs and two-tier label tasks.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace radial {

struct Caption {
  std::string text;
  std::string key;  // embedding key in the store

  friend bool operator==(const Caption&, const Caption&) = default;
};

// One image with its caption chain, general -> specific (P1..P4), and
// optionally the tier-matched negatives N1..N4.
struct HierarchyRecord {
  std::string image_id;
  std::string image_key;
  std::array<Caption, 4> positives;
  std::optional<std::array<Caption, 4>> negatives;

  friend bool operator==(const HierarchyRecord&, const HierarchyRecord&) = default;
};

// Word pair with a gold entailment score. Words double as store keys.
struct LexicalPair {
  std::string left;
  std::string right;
  double gold = 0.0;
  std::string pos;  // empty when the file has no POS column

  friend bool operator==(const LexicalPair&, const LexicalPair&) = default;
};

struct Label {
  std::string name;
  std::string key;

  friend bool operator==(const Label&, const Label&) = default;
};

struct LabelImage {
  std::string id;
  std::string key;
  std::string coarse;  // ground-truth coarse label name
  std::string fine;    // ground-truth fine label name

  friend bool operator==(const LabelImage&, const LabelImage&) = default;
};

// The mixing constants C tried during cross-validation: 20 equally spaced
// values on [0, 0.2], endpoints included.
std::vector<double> standard_constant_grid();

struct LabelPairTask {
  std::vector<Label> coarse;
  std::vector<Label> fine;
  std::vector<LabelImage> images;
  std::vector<double> constants = standard_constant_grid();
  // When set, items are shuffled with the run seed before fold assignment.
  bool shuffled_split = false;

  friend bool operator==(const LabelPairTask&, const LabelPairTask&) = default;
};

// Query -> ground-truth target for flat recall@k.
struct RetrievalQuery {
  std::string query_key;
  std::string target_key;

  friend bool operator==(const RetrievalQuery&, const RetrievalQuery&) = default;
};

}  // namespace radial
