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

// Synthetic caption hierarchies with planted structure, for smoke tests,
// benchmarks and demos.
//
// Captions live on the unit sphere. A tier-t caption sits at geodesic angle
// tier_angles[t-1] from a hidden root direction. Tiers 1..3 form a shared
// regular tree: siblings leave their parent along +/- fresh coordinate axes,
// so every parent-child edge has the same shape. Tier 4 is unique per record
// and offset along the axes the tree does not use. The negative N_i of a
// record is the matching child of P_i's mirror sibling, which makes all
// records congruent up to noise. Observed embeddings are the planted points
// plus isotropic noise, renormalized.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "radial/dataset.hpp"
#include "radial/store.hpp"

namespace radial {

struct SyntheticOptions {
  std::size_t dimension = 16;
  std::size_t records = 256;
  std::size_t held_out = 64;
  // Children per node for tiers 1, 2, 3 (tier 1 counts roots of the tree).
  std::array<std::size_t, 3> branching = {2, 2, 4};
  std::array<double, 4> tier_angles = {0.35, 0.7, 1.05, 1.4};
  // Offset of a child direction from its parent's, per tier 2..4; the edge
  // angle is atan(spread).
  std::array<double, 3> spread = {1.2, 0.6, 0.4};
  double noise = 0.001;       // per-coordinate embedding noise
  double root_noise = 0.001;  // per-coordinate noise on the stored root
  std::uint64_t seed = 7;
};

struct SyntheticDataset {
  EmbeddingTable store;  // captions, images, and the root under ""
  std::vector<HierarchyRecord> train;
  std::vector<HierarchyRecord> held_out;  // new leaves under the shared tree
  Vector planted_root;
};

SyntheticDataset make_synthetic_hierarchies(const SyntheticOptions& options = {});

}  // namespace radial
