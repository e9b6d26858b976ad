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

// Euclidean primitives for hierarchy probing: cosine similarity, distance
// from the entailment root, the exterior angle at an embedding, and the
// entailment-cone half-aperture built on top of it.
//
// All computation is in double precision. Cosines are clamped to [-1, 1]
// before any arccos/arcsin so rounding never produces NaN.

#pragma once

#include <span>
#include <string>
#include <vector>

namespace radial {

using Vector = std::vector<double>;

// Two points closer than this are treated as coincident.
inline constexpr double kDegenerateTolerance = 1e-12;

// A keyed embedding vector. Dimension is fixed per embedding space.
struct Embedding {
  std::string id;
  Vector values;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

// v / |v|. Throws ZeroVector when |v| <= kDegenerateTolerance.
Vector normalize(std::span<const double> v);

// Cosine similarity clamped to [-1, 1]. Throws ZeroVector or DimensionMismatch.
double cosine_sim(std::span<const double> v, std::span<const double> w);

// d_r(e) = |e - r|.
double root_distance(std::span<const double> root, std::span<const double> e);

// Exterior angle at `e`: arccos(sim(e - r, other - e)), in [0, pi].
// Zero when `other` lies radially outward from `e`, pi when it points back
// toward the root. Throws DegenerateAngle if e == r or other == e.
double exterior_angle(std::span<const double> root, std::span<const double> e,
                      std::span<const double> other);

// arcsin(min(1, epsilon / d_r(e))), in (0, pi/2].
double half_aperture(std::span<const double> root, std::span<const double> e, double epsilon);

// True iff exterior_angle(root, e, other) <= half_aperture(root, e, epsilon).
bool cone_contains(std::span<const double> root, std::span<const double> e,
                   std::span<const double> other, double epsilon);

}  // namespace radial
