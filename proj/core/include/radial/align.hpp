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

// Alignment engine: optimizes a table of caption embeddings and the learnable
// entailment root under the total RE + regularization loss.
//
// Image embeddings are never parameters. Each step gathers a minibatch of
// records, builds the (P_i, P_i+1, N_i) triplets for tiers 1..3, evaluates
// loss_total_grad, applies an AdamW update to every vector that received a
// gradient, and projects updated vectors back onto the unit sphere.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "radial/dataset.hpp"
#include "radial/losses.hpp"
#include "radial/store.hpp"

namespace radial {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled
};

struct AlignConfig {
  std::size_t epochs = 1;
  std::size_t batch_size = 8;  // records per step (3 triplets each)
  double learning_rate = 1e-3;
  AdamOptions adam;
  std::uint64_t seed = 0;
  LossConfig loss;

  void validate() const;
};

struct MomentState {
  Vector first;
  Vector second;
  std::uint64_t updates = 0;
};

struct TrainState {
  // Trainable caption embeddings in order of first appearance in the data.
  std::vector<Embedding> parameters;
  std::unordered_map<std::string, std::size_t> index;
  // Pretrained values for the regularizer; never modified.
  std::vector<Vector> originals;
  std::vector<MomentState> moments;

  Vector root;
  Vector initial_root;
  MomentState root_moments;

  std::size_t step = 0;
  std::vector<double> loss_history;

  const Vector& value(std::string_view key) const;
};

struct AlignOptions {
  // Start the root here instead of at the store's "" embedding.
  std::optional<Vector> root_init;
  // Start trainable embeddings from these values (originals still come
  // from the store). Keys absent here start at the store value.
  std::optional<EmbeddingTable> initial_parameters;
  // Called after every optimizer step with the post-projection state.
  std::function<void(const TrainState&)> on_step;
};

struct TripletStats {
  double mean_positive_angle = 0.0;
  double mean_negative_angle = 0.0;
  double mean_loss_re = 0.0;
  std::size_t triplets = 0;
};

struct AlignResult {
  TrainState state;
  TripletStats initial_stats;
  TripletStats final_stats;
};

// [(P1, P2, N1), (P2, P3, N2), (P3, P4, N3)] with tiers 1..3, vectors taken
// from `table`. Throws MissingNegatives or KeyNotFound.
std::vector<Triplet> build_triplets(const HierarchyRecord& record, const EmbeddingTable& table);

// Rescales v to unit norm unless it is already within 1e-12 of it.
// Throws ZeroVector.
void project_to_sphere(Vector& v);
void project_to_sphere(TrainState& state);

// Initial state: trainables and root resolved, projected and with zeroed
// optimizer moments.
TrainState initial_state(std::span<const HierarchyRecord> dataset, const EmbeddingTable& store,
                         const AlignOptions& options = {});

// Runs epochs * ceil(N / batch_size) steps. Throws KeyNotFound,
// MissingNegatives, or NonFiniteLoss (with the step number).
AlignResult align(std::span<const HierarchyRecord> dataset, const EmbeddingTable& store,
                  const AlignConfig& config, const AlignOptions& options = {});

// Angle statistics over all tier triplets of `dataset` under `state`.
TripletStats triplet_statistics(std::span<const HierarchyRecord> dataset, const TrainState& state);

// The input store with trained caption embeddings and the root (key "")
// substituted. Every other entry is copied unchanged.
EmbeddingTable checkpoint_table(const EmbeddingTable& store, const TrainState& state);

// key=value sidecar describing the run.
std::string checkpoint_metadata(const AlignConfig& config, const TrainState& state);

}  // namespace radial
