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

#include "radial/align.hpp"

#include <cmath>
#include <numeric>

#include "radial/error.hpp"
#include "radial/formats.hpp"
#include "radial/random.hpp"
#include "radial/report.hpp"

namespace radial {

namespace {

constexpr double kSphereTolerance = 1e-12;

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// Caption keys of a record in P1..P4, N1..N4 order.
std::vector<std::string> caption_keys(const HierarchyRecord& r) {
  std::vector<std::string> keys;
  for (const auto& c : r.positives) keys.push_back(c.key);
  if (r.negatives) {
    for (const auto& c : *r.negatives) keys.push_back(c.key);
  }
  return keys;
}

void adam_update(Vector& x, MomentState& m, std::span<const double> g, double lr,
                 const AdamOptions& opt) {
  if (m.first.empty()) {
    m.first.assign(x.size(), 0.0);
    m.second.assign(x.size(), 0.0);
  }
  ++m.updates;
  const double t = static_cast<double>(m.updates);
  const double bias1 = 1.0 - std::pow(opt.beta1, t);
  const double bias2 = 1.0 - std::pow(opt.beta2, t);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] -= lr * opt.weight_decay * x[i];
    m.first[i] = opt.beta1 * m.first[i] + (1.0 - opt.beta1) * g[i];
    m.second[i] = opt.beta2 * m.second[i] + (1.0 - opt.beta2) * g[i] * g[i];
    const double m_hat = m.first[i] / bias1;
    const double v_hat = m.second[i] / bias2;
    x[i] -= lr * m_hat / (std::sqrt(v_hat) + opt.epsilon);
  }
}

Embedding current(const TrainState& s, const std::string& key) {
  return Embedding{key, s.value(key)};
}

std::vector<Triplet> state_triplets(const HierarchyRecord& r, const TrainState& s) {
  if (!r.negatives) {
    throw Error(ErrorCode::kMissingNegatives, "record '" + r.image_id + "' has no negatives");
  }
  std::vector<Triplet> out;
  for (int tier = 1; tier <= 3; ++tier) {
    const std::size_t i = static_cast<std::size_t>(tier - 1);
    out.push_back(Triplet{current(s, r.positives[i].key), current(s, r.positives[i + 1].key),
                          current(s, (*r.negatives)[i].key), tier, r.image_id});
  }
  return out;
}

RegularizationGroup state_group(const HierarchyRecord& r, const TrainState& s) {
  RegularizationGroup g;
  for (const auto& key : caption_keys(r)) {
    const std::size_t i = s.index.at(key);
    g.current.push_back(s.parameters[i]);
    g.original.push_back(s.originals[i]);
  }
  return g;
}

}  // namespace

void AlignConfig::validate() const {
  if (batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be finite and >= 0");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Adam betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0) || !(adam.weight_decay >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Adam epsilon must be > 0 and weight decay >= 0");
  }
  loss.validate();
}

const Vector& TrainState::value(std::string_view key) const {
  auto it = index.find(std::string(key));
  if (it == index.end()) {
    throw Error(ErrorCode::kKeyNotFound, "'" + std::string(key) + "' is not a trainable embedding",
                Location{.key = std::string(key)});
  }
  return parameters[it->second].values;
}

std::vector<Triplet> build_triplets(const HierarchyRecord& record, const EmbeddingTable& table) {
  if (!record.negatives) {
    throw Error(ErrorCode::kMissingNegatives, "record '" + record.image_id + "' has no negatives");
  }
  std::vector<Triplet> out;
  for (int tier = 1; tier <= 3; ++tier) {
    const std::size_t i = static_cast<std::size_t>(tier - 1);
    out.push_back(Triplet{table.entry(record.positives[i].key), table.entry(record.positives[i + 1].key),
                          table.entry((*record.negatives)[i].key), tier, record.image_id});
  }
  return out;
}

void project_to_sphere(Vector& v) {
  const double n = norm(v);
  if (std::abs(n - 1.0) <= kSphereTolerance) return;
  if (!(n > kDegenerateTolerance)) {
    throw Error(ErrorCode::kZeroVector, "update annihilated a trainable vector");
  }
  for (double& x : v) x /= n;
}

void project_to_sphere(TrainState& state) {
  for (auto& p : state.parameters) {
    try {
      project_to_sphere(p.values);
    } catch (const Error& e) {
      throw Error(e.code(), "'" + p.id + "': " + e.what(), Location{.key = p.id});
    }
  }
  project_to_sphere(state.root);
}

TrainState initial_state(std::span<const HierarchyRecord> dataset, const EmbeddingTable& store,
                         const AlignOptions& options) {
  resolve_keys(dataset, store);
  TrainState s;
  for (const auto& r : dataset) {
    for (const auto& key : caption_keys(r)) {
      if (key == kRootKey) {
        throw Error(ErrorCode::kInvalidArgument, "the root key \"\" cannot be a caption");
      }
      if (s.index.contains(key)) continue;
      s.index.emplace(key, s.parameters.size());
      const Vector& original = store.at(key);
      Vector start = original;
      if (options.initial_parameters && options.initial_parameters->contains(key)) {
        start = options.initial_parameters->at(key);
        if (start.size() != original.size()) {
          throw Error(ErrorCode::kDimensionMismatch, "initial value of '" + key + "' has wrong dimension");
        }
      }
      s.parameters.push_back(Embedding{key, std::move(start)});
      s.originals.push_back(original);
      s.moments.emplace_back();
    }
  }
  s.root = options.root_init ? *options.root_init : store.at(kRootKey);
  if (s.root.size() != store.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "root dimension differs from the store");
  }
  project_to_sphere(s);
  s.initial_root = s.root;
  return s;
}

TripletStats triplet_statistics(std::span<const HierarchyRecord> dataset, const TrainState& state) {
  TripletStats st;
  for (const auto& r : dataset) {
    for (const auto& t : state_triplets(r, state)) {
      const double pos = exterior_angle(state.root, t.anchor.values, t.positive.values);
      const double neg = exterior_angle(state.root, t.anchor.values, t.negative.values);
      st.mean_positive_angle += pos;
      st.mean_negative_angle += neg;
      st.mean_loss_re += pos - neg;
      ++st.triplets;
    }
  }
  if (st.triplets > 0) {
    const double n = static_cast<double>(st.triplets);
    st.mean_positive_angle /= n;
    st.mean_negative_angle /= n;
    st.mean_loss_re /= n;
  }
  return st;
}

AlignResult align(std::span<const HierarchyRecord> dataset, const EmbeddingTable& store,
                  const AlignConfig& config, const AlignOptions& options) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorCode::kEmptyBatch, "alignment dataset is empty");
  for (const auto& r : dataset) {
    if (!r.negatives) {
      throw Error(ErrorCode::kMissingNegatives, "record '" + r.image_id + "' has no negatives");
    }
  }

  AlignResult result;
  TrainState& s = result.state;
  s = initial_state(dataset, store, options);
  result.initial_stats = triplet_statistics(dataset, s);

  Rng rng(config.seed);
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<Triplet> batch;
      std::vector<RegularizationGroup> groups;
      for (std::size_t b = start; b < end; ++b) {
        const HierarchyRecord& r = dataset[order[b]];
        for (auto& t : state_triplets(r, s)) batch.push_back(std::move(t));
        groups.push_back(state_group(r, s));
      }

      const LossWithGradient lg = loss_total_grad(batch, s.root, config.loss, groups);
      bool finite = std::isfinite(lg.value) && all_finite(lg.gradient.root);
      for (const auto& [key, g] : lg.gradient.embeddings) finite = finite && all_finite(g);
      if (!finite) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "loss or gradient is not finite at step " + std::to_string(s.step) +
                        " (loss = " + format_number(lg.value) + ")");
      }
      s.loss_history.push_back(lg.value);

      for (const auto& [key, g] : lg.gradient.embeddings) {
        const std::size_t i = s.index.at(key);
        adam_update(s.parameters[i].values, s.moments[i], g, config.learning_rate, config.adam);
        project_to_sphere(s.parameters[i].values);
      }
      adam_update(s.root, s.root_moments, lg.gradient.root, config.learning_rate, config.adam);
      project_to_sphere(s.root);

      ++s.step;
      if (options.on_step) options.on_step(s);
    }
  }
  result.final_stats = triplet_statistics(dataset, s);
  return result;
}

EmbeddingTable checkpoint_table(const EmbeddingTable& store, const TrainState& state) {
  EmbeddingTable out = store;
  for (const auto& p : state.parameters) out.assign(p.id, p.values);
  if (out.contains(kRootKey)) {
    out.assign(kRootKey, state.root);
  } else {
    out.insert(std::string(kRootKey), state.root);
  }
  return out;
}

std::string checkpoint_metadata(const AlignConfig& config, const TrainState& state) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
  line("format", "radial-checkpoint-1");
  line("epochs", std::to_string(config.epochs));
  line("batch_size", std::to_string(config.batch_size));
  line("learning_rate", format_number(config.learning_rate));
  line("seed", std::to_string(config.seed));
  line("lambda_re", format_number(config.loss.lambda_re));
  line("lambda_reg", format_number(config.loss.lambda_reg));
  line("epsilon", format_number(config.loss.epsilon));
  line("adam_beta1", format_number(config.adam.beta1));
  line("adam_beta2", format_number(config.adam.beta2));
  line("adam_epsilon", format_number(config.adam.epsilon));
  line("weight_decay", format_number(config.adam.weight_decay));
  line("trainable", std::to_string(state.parameters.size()));
  line("steps", std::to_string(state.step));
  line("final_loss", state.loss_history.empty() ? "nan" : format_number(state.loss_history.back()));
  return out;
}

}  // namespace radial
