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

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace radial {

struct MetricColumn {
  std::string name;
  std::vector<double> values;  // one per item
  double mean = 0.0;
};

// Per-item metric values with their dataset means, plus free-form scalar
// results (selected constants, correlations) under `summary`.
struct EvalReport {
  std::string task;
  std::vector<std::string> item_ids;
  std::vector<MetricColumn> columns;
  std::vector<std::pair<std::string, double>> summary;

  std::size_t count() const noexcept { return item_ids.size(); }

  // Appends a column; `values` must have one entry per item. The mean is the
  // plain arithmetic average.
  void add_column(std::string name, std::vector<double> values);
  void add_summary(std::string name, double value);
  const MetricColumn& column(const std::string& name) const;
};

// key=value lines: task, count, mean.<metric>, <summary name>, then
// item.<id>.<metric> for every item.
void write_text_report(std::ostream& out, const EvalReport& report);

// JSON lines: one {"item": id, <metric>: value...} object per item followed
// by {"task", "count", "means": {...}, "summary": {...}}.
void write_structured_report(std::ostream& out, const EvalReport& report);

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

}  // namespace radial
