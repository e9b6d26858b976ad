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

#include "radial/synthetic.hpp"

#include <cmath>
#include <string>

#include "radial/error.hpp"
#include "radial/geometry.hpp"
#include "radial/random.hpp"

namespace radial {

namespace {

struct Node {
  std::size_t parent = 0;
  std::size_t sibling = 0;  // position among the parent's children
  Vector direction;         // unit, orthogonal to the root direction
  std::string key;
  std::vector<std::size_t> children;
};

// Unit vector orthogonal to e0 (the planted root direction).
Vector tangent(Vector v) {
  v[0] = 0.0;
  return normalize(v);
}

Vector point_at(const Vector& direction, double angle) {
  Vector p = direction;
  for (double& x : p) x *= std::sin(angle);
  p[0] += std::cos(angle);
  return p;
}

Vector observe(const Vector& planted, double noise, Rng& rng) {
  Vector v = planted;
  for (double& x : v) x += noise * rng.normal();
  return normalize(v);
}

Vector child_direction(const Vector& parent, const Vector& offset, double spread) {
  Vector d = parent;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += spread * offset[i];
  return tangent(std::move(d));
}

// Sibling whose offset is the negation of this one's (or a neighbour when
// the count is odd).
std::size_t mirror(std::size_t sibling, std::size_t count) {
  const std::size_t m = sibling ^ 1u;
  return m < count ? m : sibling - 1;
}

// Hands out coordinate axes e1, e2, ... in order.
class AxisPool {
 public:
  explicit AxisPool(std::size_t dimension) : dimension_(dimension) {}

  // Offsets for `count` siblings: +a, -a, +b, -b, ...
  std::vector<Vector> siblings(std::size_t count) {
    std::vector<Vector> out;
    while (out.size() < count) {
      if (next_ >= dimension_) {
        throw Error(ErrorCode::kInvalidArgument, "dimension too small for the requested tree");
      }
      Vector axis(dimension_, 0.0);
      axis[next_++] = 1.0;
      out.push_back(axis);
      if (out.size() < count) {
        axis[next_ - 1] = -1.0;
        out.push_back(std::move(axis));
      }
    }
    return out;
  }

  std::size_t used() const noexcept { return next_; }

 private:
  std::size_t dimension_;
  std::size_t next_ = 1;  // axis 0 is the root direction
};

}  // namespace

SyntheticDataset make_synthetic_hierarchies(const SyntheticOptions& o) {
  if (o.dimension < 3) throw Error(ErrorCode::kInvalidArgument, "synthetic data needs dimension >= 3");
  for (std::size_t b : o.branching) {
    if (b < 2) throw Error(ErrorCode::kInvalidArgument, "every tier needs branching >= 2 for negatives");
  }
  Rng rng(o.seed);
  SyntheticDataset out;
  out.store = EmbeddingTable(o.dimension);

  Vector e0(o.dimension, 0.0);
  e0[0] = 1.0;
  out.planted_root = e0;
  out.store.insert(std::string(kRootKey), observe(e0, o.root_noise, rng));

  // Shared tree for tiers 1..3.
  AxisPool axes(o.dimension);
  std::array<std::vector<Node>, 3> tiers;
  {
    const auto offsets = axes.siblings(o.branching[0]);
    for (std::size_t s = 0; s < offsets.size(); ++s) {
      tiers[0].push_back(Node{0, s, offsets[s], "t1/" + std::to_string(s), {}});
    }
  }
  for (std::size_t t = 1; t < 3; ++t) {
    for (std::size_t p = 0; p < tiers[t - 1].size(); ++p) {
      const auto offsets = axes.siblings(o.branching[t]);
      for (std::size_t s = 0; s < offsets.size(); ++s) {
        const std::size_t index = tiers[t].size();
        tiers[t - 1][p].children.push_back(index);
        tiers[t].push_back(Node{p, s,
                                child_direction(tiers[t - 1][p].direction, offsets[s],
                                                o.spread[t - 1]),
                                "t" + std::to_string(t + 1) + "/" + std::to_string(index),
                                {}});
      }
    }
  }
  for (std::size_t t = 0; t < 3; ++t) {
    for (const auto& n : tiers[t]) {
      out.store.insert(n.key, observe(point_at(n.direction, o.tier_angles[t]), o.noise, rng));
    }
  }

  // Leaves move off their parent within the span of the unused axes, so a
  // leaf relates to every tree node the same way its parent does.
  const std::size_t free_from = axes.used();
  auto leaf_offset = [&](const Vector& parent) {
    Vector u(o.dimension, 0.0);
    if (free_from < o.dimension) {
      for (std::size_t i = free_from; i < o.dimension; ++i) u[i] = rng.normal();
      return normalize(u);
    }
    u = rng.normal_vector(o.dimension);
    u[0] = 0.0;
    const double p = dot(u, parent);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= p * parent[i];
    return normalize(u);
  };
  auto leaf_under = [&](std::size_t tier3, const std::string& key, double noise) {
    const Vector& parent = tiers[2][tier3].direction;
    const Vector leaf =
        point_at(child_direction(parent, leaf_offset(parent), o.spread[2]), o.tier_angles[3]);
    out.store.insert(key, observe(leaf, noise, rng));
    return leaf;
  };

  auto caption = [](const std::string& key) { return Caption{"caption " + key, key}; };
  // Index of the mirror sibling of node `i` at tier `t` (0-based).
  auto mirror_of = [&](std::size_t t, std::size_t i) {
    const Node& n = tiers[t][i];
    if (t == 0) return mirror(n.sibling, tiers[0].size());
    const auto& family = tiers[t - 1][n.parent].children;
    return family[mirror(n.sibling, family.size())];
  };

  const std::size_t total = o.records + o.held_out;
  for (std::size_t r = 0; r < total; ++r) {
    const std::string id = std::to_string(r);
    const std::size_t p3 = static_cast<std::size_t>(rng.below(tiers[2].size()));
    const std::size_t p2 = tiers[2][p3].parent;
    const std::size_t p1 = tiers[1][p2].parent;

    const std::string leaf_key = "t4/" + id;
    const Vector leaf = leaf_under(p3, leaf_key, o.noise);
    out.store.insert("img/" + id, observe(leaf, 2.0 * o.noise, rng));

    // N_i: the child of P_i's mirror that sits where P_{i+1} sits.
    const std::size_t n1 = tiers[0][mirror_of(0, p1)].children[tiers[1][p2].sibling];
    const std::size_t n2 = tiers[1][mirror_of(1, p2)].children[tiers[2][p3].sibling];
    const std::size_t m3 = mirror_of(2, p3);
    leaf_under(m3, "n3/" + id, o.noise);
    leaf_under(m3, "n4/" + id, o.noise);

    HierarchyRecord rec;
    rec.image_id = id;
    rec.image_key = "img/" + id;
    rec.positives = {caption(tiers[0][p1].key), caption(tiers[1][p2].key),
                     caption(tiers[2][p3].key), caption(leaf_key)};
    rec.negatives = std::array<Caption, 4>{caption(tiers[1][n1].key), caption(tiers[2][n2].key),
                                           caption("n3/" + id), caption("n4/" + id)};
    (r < o.records ? out.train : out.held_out).push_back(std::move(rec));
  }
  return out;
}

}  // namespace radial
