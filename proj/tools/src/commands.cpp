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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "radial/align.hpp"
#include "radial/error.hpp"
#include "radial/formats.hpp"
#include "radial/geometry.hpp"
#include "radial/losses.hpp"
#include "radial/metrics.hpp"
#include "radial/report.hpp"
#include "radial/retrieve.hpp"
#include "radial/store.hpp"
#include "radial/synthetic.hpp"

namespace radial::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string store;
  std::string data;
  std::string out;
  std::string format = "text";
  std::string root_key;  // "" is the stored root
  std::string image;
  std::string filter;
  std::string held_out;
  std::string dtype = "f64";
  std::vector<std::string> keys;
  std::vector<std::size_t> k;
  std::uint64_t seed = 0;
  int steps = kDefaultSweepSteps;
  double lambda_re = 1.0;
  double lambda_reg = 10.0;
  double epsilon = 0.05;
  double margin = 0.0;
  double lr = 1e-3;
  std::size_t batch = 8;
  std::size_t epochs = 1;
  std::size_t dimension = 16;
  std::size_t records = 256;
  std::size_t held_out_records = 64;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool structured(const Options& o) { return o.format == "structured"; }

const Vector& root_of(const EmbeddingTable& store, const Options& o) {
  return store.at(o.root_key);
}

// Store entries whose key starts with the filter prefix. The root key and
// any excluded key never count as candidates.
std::vector<Embedding> filtered(const EmbeddingTable& store, const std::string& prefix,
                                const std::unordered_set<std::string>& excluded) {
  std::vector<Embedding> out;
  for (const auto& e : store.entries()) {
    if (e.id.empty() || excluded.contains(e.id)) continue;
    if (e.id.compare(0, prefix.size(), prefix) == 0) out.push_back(e);
  }
  return out;
}

void emit_report(std::ostream& out, const Options& o, const EvalReport& report) {
  if (structured(o)) {
    write_structured_report(out, report);
  } else {
    write_text_report(out, report);
  }
}

void emit_pairs(std::ostream& out, const Options& o,
                const std::vector<std::pair<std::string, double>>& values) {
  if (structured(o)) {
    ordered_json row = ordered_json::object();
    for (const auto& [k, v] : values) row[k] = v;
    out << row.dump() << '\n';
  } else {
    for (const auto& [k, v] : values) out << k << '=' << format_number(v) << '\n';
  }
}

int cmd_probe(const Options& o, std::ostream& out) {
  if (o.keys.size() != 2 && o.keys.size() != 3) {
    throw UsageError("probe takes 2 keys (anchor other) or 3 (anchor positive negative)");
  }
  const auto store = read_store(o.store).table;
  const Vector& r = root_of(store, o);
  const Vector& a = store.at(o.keys[0]);
  const Vector& b = store.at(o.keys[1]);

  std::vector<std::pair<std::string, double>> values;
  values.emplace_back("xi", exterior_angle(r, a, b));
  values.emplace_back("d_r.anchor", root_distance(r, a));
  values.emplace_back("d_r.other", root_distance(r, b));
  values.emplace_back("theta", half_aperture(r, a, o.epsilon));
  values.emplace_back("cone", cone_contains(r, a, b, o.epsilon) ? 1.0 : 0.0);
  values.emplace_back("loss_ec.positive",
                      loss_ec_margin(r, a, b, PairSign::kPositive, o.epsilon, o.margin));
  values.emplace_back("loss_ec.negative",
                      loss_ec_margin(r, a, b, PairSign::kNegative, o.epsilon, o.margin));
  if (o.keys.size() == 3) {
    const Vector& n = store.at(o.keys[2]);
    values.emplace_back("xi.negative", exterior_angle(r, a, n));
    values.emplace_back("d_r.negative", root_distance(r, n));
    values.emplace_back("loss_re", loss_re(r, a, b, n));
  }
  emit_pairs(out, o, values);
  return kExitOk;
}

int cmd_retrieve(const Options& o, std::ostream& out) {
  if (o.steps < 1) throw UsageError("--steps must be >= 1");
  const auto store = read_store(o.store).table;
  const Vector& r = root_of(store, o);
  const Vector& image = store.at(o.image);
  const auto candidates = filtered(store, o.filter, {o.image, o.root_key});
  const auto result = hierarchical_retrieve(image, r, candidates, o.steps);

  if (structured(o)) {
    for (const auto& s : result.steps) {
      ordered_json row;
      row["step"] = s.step;
      row["radius"] = s.radius;
      row["key"] = s.key;
      out << row.dump() << '\n';
    }
    ordered_json tail;
    tail["image"] = o.image;
    tail["hierarchy"] = result.hierarchy;
    out << tail.dump() << '\n';
  } else {
    for (const auto& key : result.hierarchy) out << key << '\n';
  }
  return kExitOk;
}

AlignConfig align_config(const Options& o) {
  AlignConfig config;
  config.epochs = o.epochs;
  config.batch_size = o.batch;
  config.learning_rate = o.lr;
  config.seed = o.seed;
  config.loss.lambda_re = o.lambda_re;
  config.loss.lambda_reg = o.lambda_reg;
  config.loss.epsilon = o.epsilon;
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return config;
}

int cmd_align(const Options& o, std::ostream& out) {
  const AlignConfig config = align_config(o);
  const auto contents = read_store(o.store);
  const auto records = load_hierarchies(o.data, contents.table);
  const auto result = align(records, contents.table, config);

  // Both files are fully encoded before anything touches the disk.
  const auto checkpoint = checkpoint_table(contents.table, result.state);
  const std::string bytes = encode_store(checkpoint, contents.dtype);
  const std::string meta = checkpoint_metadata(config, result.state);
  write_file_atomic(o.out, bytes);
  write_file_atomic(o.out + ".meta", meta);

  const auto& history = result.state.loss_history;
  std::vector<std::pair<std::string, double>> summary;
  summary.emplace_back("steps", static_cast<double>(result.state.step));
  summary.emplace_back("loss.first", history.empty() ? std::nan("") : history.front());
  summary.emplace_back("loss.last", history.empty() ? std::nan("") : history.back());
  summary.emplace_back("xi.positive.before", result.initial_stats.mean_positive_angle);
  summary.emplace_back("xi.negative.before", result.initial_stats.mean_negative_angle);
  summary.emplace_back("xi.positive.after", result.final_stats.mean_positive_angle);
  summary.emplace_back("xi.negative.after", result.final_stats.mean_negative_angle);
  summary.emplace_back("loss_re.before", result.initial_stats.mean_loss_re);
  summary.emplace_back("loss_re.after", result.final_stats.mean_loss_re);
  if (structured(o)) {
    for (std::size_t i = 0; i < history.size(); ++i) {
      ordered_json row;
      row["step"] = i + 1;
      row["loss"] = history[i];
      out << row.dump() << '\n';
    }
  }
  emit_pairs(out, o, summary);
  return kExitOk;
}

int cmd_eval_hier(const Options& o, std::ostream& out) {
  if (o.steps < 1) throw UsageError("--steps must be >= 1");
  const auto store = read_store(o.store).table;
  const Vector& r = root_of(store, o);
  const auto records = load_hierarchies(o.data, store);

  // Candidates: every positive caption in the file, unless a store prefix
  // filter is given.
  std::vector<Embedding> candidates;
  if (!o.filter.empty()) {
    candidates = filtered(store, o.filter, {o.root_key});
  } else {
    std::unordered_set<std::string> seen;
    for (const auto& rec : records) {
      for (const auto& c : rec.positives) {
        if (seen.insert(c.key).second) candidates.push_back(store.entry(c.key));
      }
    }
  }

  EvalReport report;
  report.task = "hier";
  std::vector<double> precision, recall, tau;
  for (const auto& rec : records) {
    const auto sweep = hierarchical_retrieve(store.at(rec.image_key), r, candidates, o.steps);
    std::vector<std::string> truth;
    std::vector<Vector> tiers;
    for (const auto& c : rec.positives) {
      truth.push_back(c.key);
      tiers.push_back(store.at(c.key));
    }
    const auto pr = precision_recall(sweep.hierarchy, truth);
    report.item_ids.push_back(rec.image_id);
    precision.push_back(pr.precision);
    recall.push_back(pr.recall);
    tau.push_back(tau_d(r, tiers));
  }
  report.add_column("precision", std::move(precision));
  report.add_column("recall", std::move(recall));
  report.add_column("tau_d", std::move(tau));
  emit_report(out, o, report);
  return kExitOk;
}

int cmd_eval_lexical(const Options& o, std::ostream& out) {
  const auto store = read_store(o.store).table;
  const Vector& r = root_of(store, o);
  const auto pairs = load_pairs(o.data);

  EvalReport report;
  report.task = "lexical";
  std::vector<double> score, gold;
  std::vector<std::string> tags;
  for (const auto& p : pairs) {
    report.item_ids.push_back(p.left + "|" + p.right);
    score.push_back(lexical_entailment_score(r, store.at(p.left), store.at(p.right)));
    gold.push_back(p.gold);
    if (!p.pos.empty() && std::find(tags.begin(), tags.end(), p.pos) == tags.end()) {
      tags.push_back(p.pos);
    }
  }
  report.add_summary("spearman.all", spearman(score, gold));
  for (const auto& tag : tags) {
    std::vector<double> s, g;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pairs[i].pos != tag) continue;
      s.push_back(score[i]);
      g.push_back(gold[i]);
    }
    if (s.size() >= 2) report.add_summary("spearman.pos." + tag, spearman(s, g));
  }
  report.add_column("score", std::move(score));
  report.add_column("gold", std::move(gold));
  emit_report(out, o, report);
  return kExitOk;
}

std::vector<std::size_t> ks_or_default(const Options& o) {
  return o.k.empty() ? std::vector<std::size_t>{1, 5} : o.k;
}

int cmd_eval_pairs(const Options& o, std::ostream& out) {
  const auto store = read_store(o.store).table;
  const Vector& r = root_of(store, o);
  const auto task = load_label_task(o.data);
  const auto scored = score_label_task(task, store, o.seed);

  EvalReport report;
  report.task = "pairs";
  report.item_ids = scored.item_ids;
  for (std::size_t k : ks_or_default(o)) {
    const auto result = breeds_eval(scored, r, k);
    const std::string name = "recall@" + std::to_string(k);
    report.add_summary(name, result.recall);
    for (std::size_t f = 0; f < result.folds.size(); ++f) {
      const std::string prefix = name + ".fold" + std::to_string(f);
      report.add_summary(prefix + ".constant", result.folds[f].selected_constant);
      report.add_summary(prefix + ".held_out", result.folds[f].held_out_recall);
    }
  }
  emit_report(out, o, report);
  return kExitOk;
}

int cmd_eval_knn(const Options& o, std::ostream& out) {
  const auto store = read_store(o.store).table;
  const auto queries = load_queries(o.data);

  std::vector<Embedding> corpus;
  if (!o.filter.empty()) {
    corpus = filtered(store, o.filter, {o.root_key});
  } else {
    std::unordered_set<std::string> seen;
    for (const auto& q : queries) {
      if (seen.insert(q.target_key).second) corpus.push_back(store.entry(q.target_key));
    }
  }
  std::vector<Embedding> query_vectors;
  std::vector<std::string> targets;
  for (const auto& q : queries) {
    query_vectors.push_back(store.entry(q.query_key));
    targets.push_back(q.target_key);
  }

  EvalReport report;
  report.task = "knn";
  for (const auto& q : queries) report.item_ids.push_back(q.query_key);
  for (std::size_t k : ks_or_default(o)) {
    if (k < 1) throw UsageError("--k must be >= 1");
    const std::size_t kk = std::min(k, corpus.size());
    std::vector<double> hits;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto top = knn_retrieve(query_vectors[i].values, corpus, kk);
      hits.push_back(std::find(top.begin(), top.end(), targets[i]) != top.end() ? 1.0 : 0.0);
    }
    const std::string name = "recall@" + std::to_string(k);
    report.add_column("hit@" + std::to_string(k), std::move(hits));
    report.add_summary(name, recall_at_k(query_vectors, targets, corpus, k));
  }
  emit_report(out, o, report);
  return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  SyntheticOptions s;
  s.dimension = o.dimension;
  s.records = o.records;
  s.held_out = o.held_out_records;
  s.seed = o.seed;
  if (s.dimension < 2) throw UsageError("--dim must be >= 2");
  const auto data = make_synthetic_hierarchies(s);
  const DType dtype = o.dtype == "f32" ? DType::kF32 : DType::kF64;

  std::ostringstream train, held;
  write_hierarchies(train, data.train);
  write_hierarchies(held, data.held_out);
  write_file_atomic(o.out, encode_store(data.store, dtype));
  write_file_atomic(o.data, train.str());
  if (!o.held_out.empty()) write_file_atomic(o.held_out, held.str());

  emit_pairs(out, o,
             {{"records", static_cast<double>(data.train.size())},
              {"held_out", static_cast<double>(data.held_out.size())},
              {"keys", static_cast<double>(data.store.size())},
              {"dimension", static_cast<double>(data.store.dimension())}});
  return kExitOk;
}

void add_format(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
}

void add_store(CLI::App* cmd, Options& o) {
  cmd->add_option("--store", o.store, "embedding store (REMB)")
      ->required()
      ->check(CLI::ExistingFile);
}

void add_root(CLI::App* cmd, Options& o) {
  cmd->add_option("--root", o.root_key, "store key of the root embedding (default: \"\")");
}

void add_data(CLI::App* cmd, Options& o, const std::string& what) {
  cmd->add_option("--data", o.data, what)->required()->check(CLI::ExistingFile);
}

void add_loss_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--epsilon", o.epsilon, "cone constant")->capture_default_str();
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Radial embedding probes, alignment and evaluation", "radial"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  auto* probe = app.add_subcommand("probe", "angles, radii, cone membership and losses for keys");
  add_store(probe, o);
  add_root(probe, o);
  add_format(probe, o);
  add_loss_flags(probe, o);
  probe->add_option("--margin", o.margin, "margin alpha of the EC loss")->capture_default_str();
  probe->add_option("keys", o.keys, "anchor other [negative]")->required();

  auto* retrieve = app.add_subcommand("retrieve", "radial sweep for one image");
  add_store(retrieve, o);
  add_root(retrieve, o);
  add_format(retrieve, o);
  retrieve->add_option("--image", o.image, "image key")->required();
  retrieve->add_option("--filter", o.filter, "candidate key prefix (default: all keys)");
  retrieve->add_option("--steps", o.steps, "sweep length")->capture_default_str();

  auto* align_cmd = app.add_subcommand("align", "optimize text embeddings and the root");
  add_store(align_cmd, o);
  add_format(align_cmd, o);
  add_loss_flags(align_cmd, o);
  add_data(align_cmd, o, "hierarchy file");
  align_cmd->add_option("--out", o.out, "checkpoint store (metadata goes to <out>.meta)")
      ->required();
  align_cmd->add_option("--seed", o.seed, "shuffle seed")->capture_default_str();
  align_cmd->add_option("--lr", o.lr, "learning rate")->capture_default_str();
  align_cmd->add_option("--batch", o.batch, "records per step")->capture_default_str();
  align_cmd->add_option("--epochs", o.epochs, "passes over the data")->capture_default_str();
  align_cmd->add_option("--lambda-re", o.lambda_re, "weight of the RE loss")->capture_default_str();
  align_cmd->add_option("--lambda-reg", o.lambda_reg, "weight of the regularizer")
      ->capture_default_str();

  auto* eval = app.add_subcommand("eval", "evaluation tasks");
  eval->require_subcommand(1);

  auto* hier = eval->add_subcommand("hier", "hierarchical retrieval: precision, recall, tau_d");
  add_store(hier, o);
  add_root(hier, o);
  add_format(hier, o);
  add_data(hier, o, "hierarchy file");
  hier->add_option("--steps", o.steps, "sweep length")->capture_default_str();
  hier->add_option("--filter", o.filter, "take candidates from store keys with this prefix");

  auto* lexical = eval->add_subcommand("lexical", "Spearman correlation of exterior angles");
  add_store(lexical, o);
  add_root(lexical, o);
  add_format(lexical, o);
  add_data(lexical, o, "pair file (TSV)");

  auto* pairs = eval->add_subcommand("pairs", "label-pair prediction recall@k");
  add_store(pairs, o);
  add_root(pairs, o);
  add_format(pairs, o);
  add_data(pairs, o, "label task file");
  pairs->add_option("--k", o.k, "k values (default: 1 5)")->check(CLI::PositiveNumber);
  pairs->add_option("--seed", o.seed, "seed for shuffled splits")->capture_default_str();

  auto* knn = eval->add_subcommand("knn", "flat retrieval recall@k");
  add_store(knn, o);
  add_format(knn, o);
  add_data(knn, o, "query file");
  knn->add_option("--k", o.k, "k values (default: 1 5)")->check(CLI::PositiveNumber);
  knn->add_option("--filter", o.filter, "take the corpus from store keys with this prefix");

  auto* synth = app.add_subcommand("synth", "write a synthetic planted-hierarchy dataset");
  add_format(synth, o);
  synth->add_option("--out", o.out, "store to write")->required();
  synth->add_option("--data", o.data, "training hierarchy file to write")->required();
  synth->add_option("--held-out", o.held_out, "held-out hierarchy file to write");
  synth->add_option("--seed", o.seed, "generator seed")->capture_default_str();
  synth->add_option("--dim", o.dimension, "dimension")->capture_default_str();
  synth->add_option("--records", o.records, "training records")->capture_default_str();
  synth->add_option("--held-out-records", o.held_out_records, "held-out records")
      ->capture_default_str();
  synth->add_option("--dtype", o.dtype, "on-disk dtype")
      ->check(CLI::IsMember({"f32", "f64"}))
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*probe) return cmd_probe(o, out);
    if (*retrieve) return cmd_retrieve(o, out);
    if (*align_cmd) return cmd_align(o, out);
    if (*hier) return cmd_eval_hier(o, out);
    if (*lexical) return cmd_eval_lexical(o, out);
    if (*pairs) return cmd_eval_pairs(o, out);
    if (*knn) return cmd_eval_knn(o, out);
    if (*synth) return cmd_synth(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  err << "usage error: no command\n";
  return kExitUsage;
}

}  // namespace radial::cli
