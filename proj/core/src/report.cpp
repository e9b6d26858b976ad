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

#include "radial/report.hpp"

#include <charconv>
#include <ostream>

#include <json.hpp>

#include "radial/error.hpp"

namespace radial {

void EvalReport::add_column(std::string name, std::vector<double> values) {
  if (values.size() != item_ids.size()) {
    throw Error(ErrorCode::kCountMismatch, "column '" + name + "' has " +
                                               std::to_string(values.size()) + " values for " +
                                               std::to_string(item_ids.size()) + " items");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
  columns.push_back(MetricColumn{std::move(name), std::move(values), mean});
}

void EvalReport::add_summary(std::string name, double value) {
  summary.emplace_back(std::move(name), value);
}

const MetricColumn& EvalReport::column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::kKeyNotFound, "report has no column '" + name + "'");
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void write_text_report(std::ostream& out, const EvalReport& report) {
  out << "task=" << report.task << '\n';
  out << "count=" << report.count() << '\n';
  for (const auto& c : report.columns) out << "mean." << c.name << '=' << format_number(c.mean) << '\n';
  for (const auto& [name, value] : report.summary) out << name << '=' << format_number(value) << '\n';
  for (std::size_t i = 0; i < report.item_ids.size(); ++i) {
    for (const auto& c : report.columns) {
      out << "item." << report.item_ids[i] << '.' << c.name << '=' << format_number(c.values[i])
          << '\n';
    }
  }
}

void write_structured_report(std::ostream& out, const EvalReport& report) {
  using nlohmann::ordered_json;
  for (std::size_t i = 0; i < report.item_ids.size(); ++i) {
    ordered_json row;
    row["item"] = report.item_ids[i];
    for (const auto& c : report.columns) row[c.name] = c.values[i];
    out << row.dump() << '\n';
  }
  ordered_json means = ordered_json::object();
  for (const auto& c : report.columns) means[c.name] = c.mean;
  ordered_json summary = ordered_json::object();
  for (const auto& [name, value] : report.summary) summary[name] = value;
  ordered_json tail;
  tail["task"] = report.task;
  tail["count"] = report.count();
  tail["means"] = means;
  tail["summary"] = summary;
  out << tail.dump() << '\n';
}

}  // namespace radial
