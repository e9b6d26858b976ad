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

#include "radial/formats.hpp"

#include <charconv>
#include <cmath>
#include <iterator>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "radial/error.hpp"

namespace radial {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& message, std::size_t line) {
  throw Error(ErrorCode::kSchemaError, message, Location{.line = line});
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  return f;
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

json parse_json(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what(), line);
  }
}

std::string string_field(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    schema_error(std::string("missing or non-string field '") + field + "'", line);
  }
  return it->get<std::string>();
}

std::array<Caption, 4> caption_tier(const json& arr, const char* field, std::size_t line) {
  if (!arr.is_array() || arr.size() != 4) {
    schema_error(std::string("'") + field + "' must hold exactly 4 captions", line);
  }
  std::array<Caption, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!arr[i].is_object()) schema_error(std::string("'") + field + "' entries must be objects", line);
    out[i] = Caption{string_field(arr[i], "text", line), string_field(arr[i], "key", line)};
  }
  return out;
}

json caption_json(const std::array<Caption, 4>& tier) {
  json arr = json::array();
  for (const auto& c : tier) arr.push_back({{"text", c.text}, {"key", c.key}});
  return arr;
}

struct NumberedRecord {
  HierarchyRecord record;
  std::size_t line;
};

std::vector<NumberedRecord> parse_numbered(std::istream& in) {
  std::vector<NumberedRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    const json obj = parse_json(text, line);
    if (!obj.is_object()) schema_error("record must be a JSON object", line);
    HierarchyRecord r;
    r.image_id = string_field(obj, "image_id", line);
    r.image_key = string_field(obj, "image_key", line);
    auto pos = obj.find("positives");
    if (pos == obj.end()) schema_error("missing 'positives'", line);
    r.positives = caption_tier(*pos, "positives", line);
    auto neg = obj.find("negatives");
    if (neg != obj.end() && !neg->is_null()) r.negatives = caption_tier(*neg, "negatives", line);
    out.push_back(NumberedRecord{std::move(r), line});
  }
  return out;
}

void resolve_numbered(std::span<const HierarchyRecord> records,
                      std::span<const std::size_t> lines, const EmbeddingTable& store) {
  std::vector<std::pair<std::size_t, std::string>> missing;
  auto check = [&](std::size_t line, const std::string& key) {
    if (!store.contains(key)) missing.emplace_back(line, key);
  };
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    check(lines[i], r.image_key);
    for (const auto& c : r.positives) check(lines[i], c.key);
    if (r.negatives) {
      for (const auto& c : *r.negatives) check(lines[i], c.key);
    }
  }
  if (missing.empty()) return;
  std::string message = std::to_string(missing.size()) + " unresolved key(s):";
  for (const auto& [line, key] : missing) {
    message += " [line " + std::to_string(line) + " key '" + key + "']";
  }
  throw Error(ErrorCode::kKeyNotFound, message,
              Location{.line = missing.front().first, .key = missing.front().second});
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = s.find('\t', start);
    out.push_back(s.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::vector<Label> label_list(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end() || !it->is_array()) {
    schema_error(std::string("label task needs an array '") + field + "'", 1);
  }
  std::vector<Label> out;
  for (const auto& l : *it) {
    if (!l.is_object()) schema_error(std::string("'") + field + "' entries must be objects", 1);
    out.push_back(Label{string_field(l, "name", 1), string_field(l, "key", 1)});
  }
  return out;
}

}  // namespace

std::vector<double> standard_constant_grid() {
  std::vector<double> grid(20);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.2 * static_cast<double>(i) / 19.0;
  return grid;
}

std::vector<HierarchyRecord> parse_hierarchies(std::istream& in) {
  std::vector<HierarchyRecord> out;
  for (auto& n : parse_numbered(in)) out.push_back(std::move(n.record));
  return out;
}

void write_hierarchies(std::ostream& out, std::span<const HierarchyRecord> records) {
  for (const auto& r : records) {
    json obj = {{"image_id", r.image_id},
                {"image_key", r.image_key},
                {"positives", caption_json(r.positives)}};
    if (r.negatives) obj["negatives"] = caption_json(*r.negatives);
    out << obj.dump() << '\n';
  }
}

void resolve_keys(std::span<const HierarchyRecord> records, const EmbeddingTable& store) {
  std::vector<std::size_t> lines(records.size());
  for (std::size_t i = 0; i < lines.size(); ++i) lines[i] = i + 1;
  resolve_numbered(records, lines, store);
}

std::vector<HierarchyRecord> load_hierarchies(const std::filesystem::path& path,
                                              const EmbeddingTable& store) {
  auto in = open_input(path);
  std::vector<NumberedRecord> numbered = parse_numbered(in);
  std::vector<HierarchyRecord> records;
  std::vector<std::size_t> lines;
  records.reserve(numbered.size());
  for (auto& n : numbered) {
    records.push_back(std::move(n.record));
    lines.push_back(n.line);
  }
  resolve_numbered(records, lines, store);
  return records;
}

std::vector<LexicalPair> parse_pairs(std::istream& in) {
  std::vector<LexicalPair> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (is_blank(text) || text.front() == '#') continue;
    const auto fields = split_tabs(text);
    if (fields.size() != 3 && fields.size() != 4) {
      schema_error("expected 3 or 4 tab-separated fields, got " + std::to_string(fields.size()), line);
    }
    LexicalPair p;
    p.left = fields[0];
    p.right = fields[1];
    if (p.left.empty() || p.right.empty()) schema_error("empty word field", line);
    const std::string& score = fields[2];
    auto [end, ec] = std::from_chars(score.data(), score.data() + score.size(), p.gold);
    if (ec != std::errc() || end != score.data() + score.size() || !std::isfinite(p.gold)) {
      schema_error("field 'gold' is not a number: '" + score + "'", line);
    }
    if (fields.size() == 4) p.pos = fields[3];
    if (!seen.emplace(p.left, p.right).second) {
      schema_error("duplicate pair (" + p.left + ", " + p.right + ")", line);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_pairs(std::ostream& out, std::span<const LexicalPair> pairs) {
  for (const auto& p : pairs) {
    out << p.left << '\t' << p.right << '\t' << format_double(p.gold);
    if (!p.pos.empty()) out << '\t' << p.pos;
    out << '\n';
  }
}

std::vector<LexicalPair> load_pairs(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_pairs(in);
}

LabelPairTask parse_label_task(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const json doc = parse_json(text, 1);
  if (!doc.is_object()) schema_error("label task must be a JSON object", 1);

  LabelPairTask task;
  task.coarse = label_list(doc, "coarse");
  task.fine = label_list(doc, "fine");

  std::unordered_set<std::string> coarse_names, fine_names;
  for (const auto& l : task.coarse) {
    if (!coarse_names.insert(l.name).second) schema_error("duplicate coarse label '" + l.name + "'", 1);
  }
  for (const auto& l : task.fine) {
    if (!fine_names.insert(l.name).second || coarse_names.contains(l.name)) {
      schema_error("duplicate label '" + l.name + "'", 1);
    }
  }

  auto images = doc.find("images");
  if (images == doc.end() || !images->is_array()) schema_error("label task needs an array 'images'", 1);
  std::unordered_set<std::string> ids;
  for (const auto& img : *images) {
    if (!img.is_object()) schema_error("'images' entries must be objects", 1);
    LabelImage li{string_field(img, "id", 1), string_field(img, "key", 1),
                  string_field(img, "coarse", 1), string_field(img, "fine", 1)};
    if (!coarse_names.contains(li.coarse)) {
      schema_error("image '" + li.id + "': field 'coarse' names unknown label '" + li.coarse + "'", 1);
    }
    if (!fine_names.contains(li.fine)) {
      schema_error("image '" + li.id + "': field 'fine' names unknown label '" + li.fine + "'", 1);
    }
    if (!ids.insert(li.id).second) schema_error("duplicate image id '" + li.id + "'", 1);
    task.images.push_back(std::move(li));
  }

  if (auto c = doc.find("constants"); c != doc.end()) {
    if (!c->is_array()) schema_error("'constants' must be an array of numbers", 1);
    task.constants.clear();
    for (const auto& v : *c) {
      if (!v.is_number()) schema_error("'constants' must be an array of numbers", 1);
      task.constants.push_back(v.get<double>());
    }
  }
  if (auto s = doc.find("shuffled_split"); s != doc.end()) {
    if (!s->is_boolean()) schema_error("'shuffled_split' must be a boolean", 1);
    task.shuffled_split = s->get<bool>();
  }
  return task;
}

void write_label_task(std::ostream& out, const LabelPairTask& task) {
  auto labels = [](const std::vector<Label>& ls) {
    json arr = json::array();
    for (const auto& l : ls) arr.push_back({{"name", l.name}, {"key", l.key}});
    return arr;
  };
  json images = json::array();
  for (const auto& i : task.images) {
    images.push_back({{"id", i.id}, {"key", i.key}, {"coarse", i.coarse}, {"fine", i.fine}});
  }
  json doc = {{"coarse", labels(task.coarse)},
              {"fine", labels(task.fine)},
              {"images", images},
              {"constants", task.constants},
              {"shuffled_split", task.shuffled_split}};
  out << doc.dump(2) << '\n';
}

LabelPairTask load_label_task(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_label_task(in);
}

std::vector<RetrievalQuery> parse_queries(std::istream& in) {
  std::vector<RetrievalQuery> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    const json obj = parse_json(text, line);
    if (!obj.is_object()) schema_error("query must be a JSON object", line);
    out.push_back(RetrievalQuery{string_field(obj, "query_key", line),
                                 string_field(obj, "target_key", line)});
  }
  return out;
}

void write_queries(std::ostream& out, std::span<const RetrievalQuery> queries) {
  for (const auto& q : queries) {
    out << json{{"query_key", q.query_key}, {"target_key", q.target_key}}.dump() << '\n';
  }
}

std::vector<RetrievalQuery> load_queries(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_queries(in);
}

}  // namespace radial
