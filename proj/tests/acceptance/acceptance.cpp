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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances and sizes are fixed here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "radial/align.hpp"
#include "radial/error.hpp"
#include "radial/losses.hpp"
#include "radial/metrics.hpp"
#include "radial/retrieve.hpp"
#include "radial/store.hpp"
#include "radial/synthetic.hpp"
#include "store_fixtures.hpp"

namespace radial {
namespace {

namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Records the first failure; later checks keep running so the detail
// shows the worst offender where that matters.
struct Check {
  Verdict v;
  void fail(const std::string& why) {
    if (v.pass) v.detail = why;
    v.pass = false;
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Verdict gradients() {
  Check c;
  double worst = 0.0;
  std::size_t points = 0;
  Rng rng(20260101);
  for (auto kind : {testing::LossKind::kRe, testing::LossKind::kEcHinge,
                    testing::LossKind::kEcMargin, testing::LossKind::kReg,
                    testing::LossKind::kTotal}) {
    for (std::size_t dim : {2u, 8u, 64u}) {
      for (int i = 0; i < 500; ++i) {
        const auto r = testing::check_gradient(testing::random_smooth_case(kind, dim, rng), 1e-5);
        ++points;
        worst = std::max(worst, r.relative_error);
        if (!(r.relative_error <= 1e-4)) {
          c.fail(std::string(testing::name(kind)) + " dim " + std::to_string(dim) +
                 " rel err " + fmt(r.relative_error));
        }
        if (r.at_kink) c.fail(std::string(testing::name(kind)) + " sampled a kink");
      }
    }
  }
  if (c.v.pass) c.v.detail = std::to_string(points) + " points, max rel err " + fmt(worst);
  return c.v;
}

Verdict limit_identity() {
  Check c;
  Rng rng(20260102);
  double worst = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100000; ++i) {
    const std::size_t dim = 2 + rng.below(63);
    const Vector r = testing::random_vector(rng, dim), e = testing::random_vector(rng, dim),
                 p = testing::random_vector(rng, dim), n = testing::random_vector(rng, dim);
    const double eps = rng.uniform(0.01, 2.0);
    const double sum = loss_ec_margin(r, e, p, PairSign::kPositive, eps, inf) +
                       loss_ec_margin(r, e, n, PairSign::kNegative, eps, inf);
    const double gap = std::abs(sum - loss_re(r, e, p, n));
    worst = std::max(worst, gap);
    if (!(gap <= 1e-12)) c.fail("gap " + fmt(gap) + " at point " + std::to_string(i));
  }
  if (c.v.pass) c.v.detail = "1e5 points, max gap " + fmt(worst);
  return c.v;
}

Verdict retrieval_oracle() {
  Check c;
  Rng rng(20260103);
  std::size_t steps_checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 2 + rng.below(31);
    const std::size_t n = 1 + rng.below(200);
    std::vector<Embedding> candidates;
    for (std::size_t i = 0; i < n; ++i) {
      candidates.push_back({"t" + std::to_string(rng.below(1000)) + "_" + std::to_string(i),
                            testing::random_vector(rng, dim)});
    }
    const Vector image = testing::random_vector(rng, dim);
    const Vector root = testing::random_vector(rng, dim, 0.3);
    const auto got = hierarchical_retrieve(image, root, candidates, kDefaultSweepSteps);
    const auto want = testing::sweep_oracle(image, root, candidates, kDefaultSweepSteps);
    bool same = got.steps.size() == want.size();
    for (std::size_t i = 0; same && i < want.size(); ++i) {
      same = got.steps[i].step == want[i].step && got.steps[i].key == want[i].key;
    }
    same = same && got.hierarchy == testing::collapse_repeats(want);
    steps_checked += want.size();
    if (!same) c.fail("instance " + std::to_string(trial) + " differs");
  }
  if (c.v.pass) c.v.detail = "1000 instances, " + std::to_string(steps_checked) + " steps equal";
  return c.v;
}

Verdict rank_metrics() {
  Check c;
  Rng rng(20260104);
  double worst = 0.0;
  int compared = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const bool ties = trial % 2 == 1;
    const std::size_t n = 2 + rng.below(99);
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = ties ? static_cast<double>(rng.below(1 + n / 4)) : rng.normal();
      ys[i] = ties ? static_cast<double>(rng.below(1 + n / 4)) : rng.normal();
    }
    const double tau_ref = testing::kendall_tau_b_pairs(xs, ys);
    const double rho_ref = testing::spearman_reference(xs, ys);
    if (!std::isfinite(tau_ref) || !std::isfinite(rho_ref)) {
      // Constant series: both must refuse rather than return a number.
      bool refused = false;
      try {
        (void)kendall_tau(xs, ys);
      } catch (const Error& e) {
        refused = e.code() == ErrorCode::kDegenerateInput;
      }
      if (!refused) c.fail("constant series not rejected at trial " + std::to_string(trial));
      continue;
    }
    const double dt = std::abs(kendall_tau(xs, ys) - tau_ref);
    const double dr = std::abs(spearman(xs, ys) - rho_ref);
    worst = std::max({worst, dt, dr});
    ++compared;
    if (!(dt <= 1e-12)) c.fail("tau-b off by " + fmt(dt) + " at trial " + std::to_string(trial));
    if (!(dr <= 1e-12)) c.fail("spearman off by " + fmt(dr) + " at trial " + std::to_string(trial));
  }
  if (c.v.pass) c.v.detail = std::to_string(compared) + " series compared, max |d| " + fmt(worst);
  return c.v;
}

Verdict tau_d_contract() {
  Check c;
  Rng rng(20260105);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 2 + rng.below(63);
    const Vector root = testing::random_vector(rng, dim);
    std::vector<double> radii(4);
    for (auto& r : radii) r = rng.uniform(0.05, 3.0);
    std::sort(radii.begin(), radii.end());
    if (!(radii[0] < radii[1] && radii[1] < radii[2] && radii[2] < radii[3])) continue;
    std::vector<Vector> up, down;
    for (int i = 0; i < 4; ++i) {
      const Vector u = testing::random_unit(rng, dim);
      Vector v = root, w = root;
      for (std::size_t j = 0; j < dim; ++j) {
        v[j] += radii[i] * u[j];
        w[j] += radii[3 - i] * u[j];
      }
      up.push_back(std::move(v));
      down.push_back(std::move(w));
    }
    if (tau_d(root, up) != 1.0) c.fail("increasing instance " + std::to_string(trial) + " != 1");
    if (tau_d(root, down) != -1.0) c.fail("decreasing instance " + std::to_string(trial) + " != -1");
  }
  if (c.v.pass) c.v.detail = "1000 increasing and 1000 decreasing instances";
  return c.v;
}

Verdict alignment_smoke() {
  Check c;
  const SyntheticDataset data = make_synthetic_hierarchies();  // 16-D, 256 records, seed 7
  if (data.train.size() != 256 || data.store.dimension() != 16) c.fail("unexpected dataset shape");

  double worst_norm = 0.0;
  AlignOptions options;
  options.on_step = [&](const TrainState& s) {
    for (const auto& p : s.parameters) worst_norm = std::max(worst_norm, std::abs(norm(p.values) - 1.0));
    worst_norm = std::max(worst_norm, std::abs(norm(s.root) - 1.0));
  };
  const AlignResult result = align(data.train, data.store, AlignConfig{}, options);

  // (a) window-10 moving average never rises.
  const auto& h = result.state.loss_history;
  std::size_t rises = 0;
  for (std::size_t i = 0; i + 10 < h.size(); ++i) {
    if (h[i + 10] > h[i]) ++rises;  // MA[i+1] - MA[i] = (h[i+10] - h[i]) / 10
  }
  if (h.size() < 11) c.fail("too few steps for a window of 10");
  if (rises != 0) c.fail("(a) smoothed loss rose " + std::to_string(rises) + " times");

  // (b) separation after the epoch.
  const double margin =
      result.final_stats.mean_negative_angle - result.final_stats.mean_positive_angle;
  if (!(margin >= 0.1)) c.fail("(b) mean angle margin " + fmt(margin));

  // (c) held-out tau_d under the trained root.
  const EmbeddingTable trained = checkpoint_table(data.store, result.state);
  const Vector& root = trained.at(kRootKey);
  double tau = 0.0;
  for (const auto& r : data.held_out) {
    std::vector<Vector> tiers;
    for (const auto& cap : r.positives) tiers.push_back(trained.at(cap.key));
    tau += tau_d(root, tiers);
  }
  tau /= static_cast<double>(data.held_out.size());
  if (!(tau >= 0.95)) c.fail("(c) held-out tau_d " + fmt(tau));

  // (d) unit norms.
  if (!(worst_norm <= 1e-9)) c.fail("(d) norm drift " + fmt(worst_norm));

  if (c.v.pass) {
    c.v.detail = std::to_string(h.size()) + " steps, loss " + fmt(h.front()) + " -> " +
                 fmt(h.back()) + ", margin " + fmt(margin) + " rad, held-out tau_d " + fmt(tau) +
                 ", norm drift " + fmt(worst_norm);
  }
  return c.v;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Verdict determinism() {
  Check c;
  const fs::path dir = fs::temp_directory_path() / "radial_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "radial");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) c.fail("radial " + args[1] + " exited " + std::to_string(code) + ": " + err.str());
  };
  const std::string store = (dir / "store.remb").string(), data = (dir / "train.jsonl").string();
  run({"synth", "--out", store, "--data", data, "--seed", "11"});
  for (const char* out : {"a.remb", "b.remb"}) {
    run({"align", "--store", store, "--data", data, "--out", (dir / out).string(), "--seed", "3"});
  }
  const std::string a = slurp(dir / "a.remb"), b = slurp(dir / "b.remb");
  if (a.empty()) c.fail("no checkpoint written");
  if (a != b) c.fail("checkpoints differ");
  if (slurp(dir / "a.remb.meta") != slurp(dir / "b.remb.meta")) c.fail("metadata differs");
  if (a == slurp(store)) c.fail("checkpoint equals the input store (no training happened)");
  if (c.v.pass) c.v.detail = std::to_string(a.size()) + "-byte checkpoints identical";
  fs::remove_all(dir);
  return c.v;
}

Verdict store_round_trip() {
  Check c;
  Rng rng(20260108);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + rng.below(64);
    EmbeddingTable t(dim);
    for (std::size_t i = 0, n = rng.below(40); i < n; ++i) {
      std::string key = testing::random_key(rng, 16);
      if (t.contains(key)) continue;
      Vector v = testing::random_vector(rng, dim, std::pow(10.0, rng.uniform(-6, 6)));
      t.insert(std::move(key), std::move(v));
    }
    if (decode_store(encode_store(t, DType::kF64)).table != t) {
      c.fail("f64 table " + std::to_string(trial) + " changed");
    }
    const EmbeddingTable back = decode_store(encode_store(t, DType::kF32)).table;
    bool ok = back.size() == t.size();
    for (std::size_t i = 0; ok && i < t.size(); ++i) {
      const auto& a = t.entries()[i];
      const auto& b = back.entries()[i];
      ok = a.id == b.id;
      for (std::size_t j = 0; ok && j < dim; ++j) {
        ok = b.values[j] == static_cast<double>(static_cast<float>(a.values[j]));
      }
    }
    if (!ok) c.fail("f32 table " + std::to_string(trial) + " not rounded to nearest");
  }
  // The same path through real files for a handful of tables.
  const fs::path file = fs::temp_directory_path() / "radial_acceptance_store.remb";
  for (int trial = 0; trial < 20; ++trial) {
    EmbeddingTable t(8);
    for (int i = 0; i < 10; ++i) t.insert("k" + std::to_string(i), testing::random_vector(rng, 8));
    write_store(file, t, DType::kF64);
    if (read_store(file).table != t) c.fail("file round trip changed a table");
  }
  fs::remove(file);

  const auto fixtures = testing::corrupt_store_fixtures();
  for (const auto& f : fixtures) {
    std::string got = "no error";
    try {
      (void)decode_store(f.bytes);
    } catch (const Error& e) {
      got = std::string(to_string(e.code()));
    }
    if (got != to_string(f.expected)) {
      c.fail("fixture '" + f.name + "' gave " + got + ", want " + std::string(to_string(f.expected)));
    }
  }
  if (c.v.pass) {
    c.v.detail = "1000 tables (f64 bitwise, f32 nearest), " + std::to_string(fixtures.size()) +
                 " corrupt fixtures named correctly";
  }
  return c.v;
}

struct Criterion {
  const char* name;
  double budget_seconds;  // <= 0: no runtime bound
  std::function<Verdict()> run;
};

}  // namespace
}  // namespace radial

int main() {
  using namespace radial;
  const std::vector<Criterion> criteria = {
      {"gradient-correctness", 30, gradients},
      {"limit-identity", 10, limit_identity},
      {"retrieval-oracle", 60, retrieval_oracle},
      {"rank-metric-oracles", 0, rank_metrics},
      {"tau-d-contract", 0, tau_d_contract},
      {"alignment-smoke", 120, alignment_smoke},
      {"determinism", 0, determinism},
      {"store-round-trip", 0, store_round_trip},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && seconds > c.budget_seconds) {
      v.pass = false;
      v.detail = "took " + fmt(seconds) + " s, budget " + fmt(c.budget_seconds) + " s; " + v.detail;
    }
    if (!v.pass) ++failures;
    std::printf("%s %s (%.2f s): %s\n", v.pass ? "PASS" : "FAIL", c.name, seconds, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
