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

#include "radial/losses.hpp"

#include <algorithm>
#include <cmath>

#include "radial/error.hpp"

namespace radial {

namespace {

// sin(Xi) below this is treated as the collinear corner of arccos.
constexpr double kAngleKink = 1e-12;

void add_scaled(Vector& dst, std::span<const double> src, double scale) {
  if (dst.empty()) dst.assign(src.size(), 0.0);
  if (dst.size() != src.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "gradient dimension mismatch");
  }
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
}

void require_finite_weight(double w, const char* name) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be finite and >= 0");
  }
}

void require_margin(double margin) {
  if (!(margin >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "margin must be >= 0 or infinity");
  }
}

// Angles and their gradients for the positive and negative pair of a triplet.
struct TripletAngles {
  AngleGradient positive;
  AngleGradient negative;
  double loss() const { return positive.value - negative.value; }
};

TripletAngles triplet_angles(std::span<const double> root, const Triplet& t) {
  return {exterior_angle_gradient(root, t.anchor.values, t.positive.values),
          exterior_angle_gradient(root, t.anchor.values, t.negative.values)};
}

void accumulate_triplet(GradientBundle& out, const Triplet& t, const TripletAngles& a,
                        double scale) {
  out.accumulate_root(a.positive.d_root, scale);
  out.accumulate_root(a.negative.d_root, -scale);
  out.accumulate(t.anchor.id, a.positive.d_anchor, scale);
  out.accumulate(t.anchor.id, a.negative.d_anchor, -scale);
  out.accumulate(t.positive.id, a.positive.d_other, scale);
  out.accumulate(t.negative.id, a.negative.d_other, -scale);
  out.at_kink = out.at_kink || a.positive.at_kink || a.negative.at_kink;
}

bool ranks_before(const Triplet& a, std::size_t ia, const Triplet& b, std::size_t ib) {
  return a.tier != b.tier ? a.tier < b.tier : ia < ib;
}

double regularization_term(std::span<const RegularizationGroup> groups) {
  double sum = 0.0;
  for (const auto& g : groups) sum += loss_reg(g);
  return sum / static_cast<double>(groups.size());
}

}  // namespace

void LossConfig::validate() const {
  require_finite_weight(lambda_re, "lambda_re");
  require_finite_weight(lambda_reg, "lambda_reg");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive and finite");
  }
  require_margin(margin);
}

void GradientBundle::accumulate(const std::string& id, std::span<const double> g, double scale) {
  add_scaled(embeddings[id], g, scale);
}

void GradientBundle::accumulate_root(std::span<const double> g, double scale) {
  add_scaled(root, g, scale);
}

void GradientBundle::merge(const GradientBundle& other, double scale) {
  for (const auto& [id, g] : other.embeddings) accumulate(id, g, scale);
  if (!other.root.empty()) accumulate_root(other.root, scale);
  at_kink = at_kink || other.at_kink;
}

AngleGradient exterior_angle_gradient(std::span<const double> root, std::span<const double> anchor,
                                      std::span<const double> other) {
  AngleGradient out;
  out.value = exterior_angle(root, anchor, other);  // validates dimensions and degeneracy

  const std::size_t n = anchor.size();
  Vector u(n), v(n);
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = anchor[i] - root[i];
    v[i] = other[i] - anchor[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  const double nu = std::sqrt(uu);
  const double nv = std::sqrt(vv);
  const double c = uv / (nu * nv);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));

  out.d_root.assign(n, 0.0);
  out.d_anchor.assign(n, 0.0);
  out.d_other.assign(n, 0.0);
  if (s <= kAngleKink) {
    out.at_kink = true;
    return out;
  }
  // dXi/dc = -1/s; dc/du = v/(|u||v|) - c u/|u|^2; dc/dv = u/(|u||v|) - c v/|v|^2.
  const double k = -1.0 / s;
  const double inv = 1.0 / (nu * nv);
  for (std::size_t i = 0; i < n; ++i) {
    const double g_u = k * (v[i] * inv - c * u[i] / uu);
    const double g_v = k * (u[i] * inv - c * v[i] / vv);
    out.d_root[i] = -g_u;
    out.d_anchor[i] = g_u - g_v;
    out.d_other[i] = g_v;
  }
  return out;
}

ApertureGradient half_aperture_gradient(std::span<const double> root,
                                        std::span<const double> anchor, double epsilon) {
  ApertureGradient out;
  out.value = half_aperture(root, anchor, epsilon);
  const std::size_t n = anchor.size();
  out.d_root.assign(n, 0.0);
  out.d_anchor.assign(n, 0.0);

  const double d = root_distance(root, anchor);
  const double ratio = epsilon / d;
  if (ratio >= 1.0) {
    out.at_kink = ratio == 1.0;
    return out;
  }
  // dtheta/dd = -epsilon / (d^2 sqrt(1 - ratio^2)); dd/de = (e - r)/d.
  const double dtheta_dd = -epsilon / (d * d * std::sqrt(1.0 - ratio * ratio));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = dtheta_dd * (anchor[i] - root[i]) / d;
    out.d_anchor[i] = g;
    out.d_root[i] = -g;
  }
  return out;
}

double loss_re(std::span<const double> root, std::span<const double> anchor,
               std::span<const double> positive, std::span<const double> negative) {
  return exterior_angle(root, anchor, positive) - exterior_angle(root, anchor, negative);
}

double loss_re(std::span<const double> root, const Triplet& t) {
  return loss_re(root, t.anchor.values, t.positive.values, t.negative.values);
}

LossWithGradient loss_re_grad(std::span<const double> root, const Triplet& t) {
  const TripletAngles a = triplet_angles(root, t);
  LossWithGradient out;
  out.value = a.loss();
  accumulate_triplet(out.gradient, t, a, 1.0);
  return out;
}

double loss_ec_margin(std::span<const double> root, std::span<const double> anchor,
                      std::span<const double> other, PairSign sign, double epsilon,
                      double margin) {
  require_margin(margin);
  const double s = static_cast<double>(static_cast<int>(sign));
  const double excess = s * (exterior_angle(root, anchor, other) - half_aperture(root, anchor, epsilon));
  return std::max(-margin, excess);
}

LossWithGradient loss_ec_margin_grad(std::span<const double> root, const Embedding& anchor,
                                     const Embedding& other, PairSign sign, double epsilon,
                                     double margin) {
  require_margin(margin);
  const double s = static_cast<double>(static_cast<int>(sign));
  const AngleGradient xi = exterior_angle_gradient(root, anchor.values, other.values);
  const ApertureGradient theta = half_aperture_gradient(root, anchor.values, epsilon);
  const double excess = s * (xi.value - theta.value);

  LossWithGradient out;
  out.value = std::max(-margin, excess);
  if (excess < -margin) return out;  // clipped: locally constant
  if (excess == -margin) {
    out.gradient.at_kink = true;
    return out;
  }
  out.gradient.accumulate_root(xi.d_root, s);
  out.gradient.accumulate_root(theta.d_root, -s);
  out.gradient.accumulate(anchor.id, xi.d_anchor, s);
  out.gradient.accumulate(anchor.id, theta.d_anchor, -s);
  out.gradient.accumulate(other.id, xi.d_other, s);
  out.gradient.at_kink = xi.at_kink || theta.at_kink;
  return out;
}

namespace {

// Shared by both loss_reg overloads so neither copies vectors.
template <typename Current>
double reg_value(std::size_t n_current, std::span<const Vector> original, Current current) {
  if (n_current != original.size() || (n_current != 8 && n_current != 4)) {
    throw Error(ErrorCode::kCountMismatch,
                "regularization needs 8 (or 4 without negatives) aligned pairs, got " +
                    std::to_string(n_current) + " and " + std::to_string(original.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n_current; ++i) sum += cosine_sim(current(i), original[i]);
  return -sum / static_cast<double>(n_current);
}

}  // namespace

double loss_reg(std::span<const Vector> current, std::span<const Vector> original) {
  return reg_value(current.size(), original,
                   [&](std::size_t i) -> std::span<const double> { return current[i]; });
}

double loss_reg(const RegularizationGroup& group) {
  return reg_value(group.current.size(), group.original,
                   [&](std::size_t i) -> std::span<const double> { return group.current[i].values; });
}

LossWithGradient loss_reg_grad(const RegularizationGroup& group) {
  LossWithGradient out;
  out.value = loss_reg(group);  // validates counts
  const double scale = -1.0 / static_cast<double>(group.current.size());
  for (std::size_t i = 0; i < group.current.size(); ++i) {
    const Vector& e = group.current[i].values;
    const Vector& o = group.original[i];
    const double ne = norm(e);
    const double no = norm(o);
    const double c = dot(e, o) / (ne * no);
    // d sim / d e = o/(|e||o|) - c e/|e|^2
    Vector g(e.size());
    for (std::size_t j = 0; j < e.size(); ++j) g[j] = o[j] / (ne * no) - c * e[j] / (ne * ne);
    out.gradient.accumulate(group.current[i].id, g, scale);
  }
  return out;
}

HardExamples select_hard_examples(std::span<const Triplet> batch, std::span<const double> root) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "minibatch has no triplets");
  HardExamples h;
  double best_pos = 0.0, best_neg = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double pos = exterior_angle(root, batch[i].anchor.values, batch[i].positive.values);
    const double neg = exterior_angle(root, batch[i].anchor.values, batch[i].negative.values);
    if (i == 0) {
      best_pos = pos;
      best_neg = neg;
      continue;
    }
    if (pos > best_pos ||
        (pos == best_pos && ranks_before(batch[i], i, batch[h.hardest_positive], h.hardest_positive))) {
      best_pos = pos;
      h.hardest_positive = i;
    }
    if (neg < best_neg ||
        (neg == best_neg && ranks_before(batch[i], i, batch[h.hardest_negative], h.hardest_negative))) {
      best_neg = neg;
      h.hardest_negative = i;
    }
  }
  return h;
}

double loss_re_aggregate(std::span<const Triplet> batch, std::span<const double> root) {
  const HardExamples h = select_hard_examples(batch, root);
  double sum = 0.0;
  for (const auto& t : batch) sum += loss_re(root, t);
  const double mean = sum / static_cast<double>(batch.size());
  return mean + loss_re(root, batch[h.hardest_positive]) + loss_re(root, batch[h.hardest_negative]);
}

LossWithGradient loss_re_aggregate_grad(std::span<const Triplet> batch,
                                        std::span<const double> root) {
  const HardExamples h = select_hard_examples(batch, root);
  const double w_mean = 1.0 / static_cast<double>(batch.size());

  LossWithGradient out;
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const TripletAngles a = triplet_angles(root, batch[i]);
    sum += a.loss();
    double w = w_mean;
    if (i == h.hardest_positive) w += 1.0;
    if (i == h.hardest_negative) w += 1.0;
    accumulate_triplet(out.gradient, batch[i], a, w);
  }
  out.value = sum / static_cast<double>(batch.size()) + loss_re(root, batch[h.hardest_positive]) +
              loss_re(root, batch[h.hardest_negative]);
  return out;
}

double loss_total(std::span<const Triplet> batch, std::span<const double> root,
                  const LossConfig& config, std::span<const RegularizationGroup> regularization) {
  config.validate();
  if (regularization.empty() && config.lambda_reg != 0.0) {
    throw Error(ErrorCode::kEmptyBatch, "no regularization pairs for a nonzero lambda_reg");
  }
  const double reg = regularization.empty() ? 0.0 : regularization_term(regularization);
  return config.lambda_re * loss_re_aggregate(batch, root) + config.lambda_reg * reg;
}

LossWithGradient loss_total_grad(std::span<const Triplet> batch, std::span<const double> root,
                                 const LossConfig& config,
                                 std::span<const RegularizationGroup> regularization) {
  config.validate();
  if (regularization.empty() && config.lambda_reg != 0.0) {
    throw Error(ErrorCode::kEmptyBatch, "no regularization pairs for a nonzero lambda_reg");
  }
  LossWithGradient agg = loss_re_aggregate_grad(batch, root);

  LossWithGradient out;
  out.gradient.root.assign(root.size(), 0.0);
  out.gradient.merge(agg.gradient, config.lambda_re);

  double reg = 0.0;
  if (!regularization.empty()) {
    const double w = 1.0 / static_cast<double>(regularization.size());
    double sum = 0.0;
    for (const auto& g : regularization) {
      LossWithGradient r = loss_reg_grad(g);
      sum += r.value;
      out.gradient.merge(r.gradient, config.lambda_reg * w);
    }
    reg = sum / static_cast<double>(regularization.size());
  }
  out.value = config.lambda_re * agg.value + config.lambda_reg * reg;
  return out;
}

}  // namespace radial
