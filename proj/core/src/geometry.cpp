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

#include "radial/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "radial/error.hpp"

namespace radial {

namespace {

void require_same_dimension(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dimension(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Vector normalize(std::span<const double> v) {
  const double n = norm(v);
  if (!(n > kDegenerateTolerance)) {
    throw Error(ErrorCode::kZeroVector, "cannot normalize a vector of norm " + std::to_string(n));
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

double cosine_sim(std::span<const double> v, std::span<const double> w) {
  require_same_dimension(v, w);
  const double nv = norm(v);
  const double nw = norm(w);
  if (!(nv > kDegenerateTolerance) || !(nw > kDegenerateTolerance)) {
    throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  }
  return clamp_unit(dot(v, w) / (nv * nw));
}

double root_distance(std::span<const double> root, std::span<const double> e) {
  require_same_dimension(root, e);
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double d = e[i] - root[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double exterior_angle(std::span<const double> root, std::span<const double> e,
                      std::span<const double> other) {
  require_same_dimension(root, e);
  require_same_dimension(e, other);
  const std::size_t n = e.size();
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = e[i] - root[i];
    const double v = other[i] - e[i];
    uu += u * u;
    vv += v * v;
    uv += u * v;
  }
  const double nu = std::sqrt(uu);
  const double nv = std::sqrt(vv);
  if (!(nu > kDegenerateTolerance)) {
    throw Error(ErrorCode::kDegenerateAngle, "embedding coincides with the root");
  }
  if (!(nv > kDegenerateTolerance)) {
    throw Error(ErrorCode::kDegenerateAngle, "embeddings coincide");
  }
  return std::acos(clamp_unit(uv / (nu * nv)));
}

double half_aperture(std::span<const double> root, std::span<const double> e, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive and finite");
  }
  const double d = root_distance(root, e);
  if (!(d > kDegenerateTolerance)) {
    throw Error(ErrorCode::kDegenerateAngle, "embedding coincides with the root");
  }
  return std::asin(std::min(1.0, epsilon / d));
}

bool cone_contains(std::span<const double> root, std::span<const double> e,
                   std::span<const double> other, double epsilon) {
  return exterior_angle(root, e, other) <= half_aperture(root, e, epsilon);
}

}  // namespace radial
