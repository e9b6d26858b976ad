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

// Readers and writers for the line-oriented benchmark files.
//
//   hierarchy file   JSON lines, one HierarchyRecord per line:
//                    {"image_id", "image_key",
//                     "positives": [{"text", "key"} x4],
//                     "negatives": [{"text", "key"} x4]   (optional)}
//   pair file        tab-separated: word1, word2, gold score, optional POS.
//                    Blank lines and lines starting with '#' are skipped.
//   label task       one JSON document:
//                    {"coarse": [{"name","key"}], "fine": [...],
//                     "images": [{"id","key","coarse","fine"}],
//                     "constants": [...] (optional), "shuffled_split": bool}
//   knn queries      JSON lines: {"query_key", "target_key"}
//
// Parsers validate schema only; the load_* functions additionally resolve
// every embedding key against a store and report all misses at once.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "radial/dataset.hpp"
#include "radial/store.hpp"

namespace radial {

std::vector<HierarchyRecord> parse_hierarchies(std::istream& in);
void write_hierarchies(std::ostream& out, std::span<const HierarchyRecord> records);
std::vector<HierarchyRecord> load_hierarchies(const std::filesystem::path& path,
                                              const EmbeddingTable& store);

std::vector<LexicalPair> parse_pairs(std::istream& in);
void write_pairs(std::ostream& out, std::span<const LexicalPair> pairs);
std::vector<LexicalPair> load_pairs(const std::filesystem::path& path);

LabelPairTask parse_label_task(std::istream& in);
void write_label_task(std::ostream& out, const LabelPairTask& task);
LabelPairTask load_label_task(const std::filesystem::path& path);

std::vector<RetrievalQuery> parse_queries(std::istream& in);
void write_queries(std::ostream& out, std::span<const RetrievalQuery> queries);
std::vector<RetrievalQuery> load_queries(const std::filesystem::path& path);

// Throws KeyNotFound listing every unresolved key with its line number.
void resolve_keys(std::span<const HierarchyRecord> records, const EmbeddingTable& store);

}  // namespace radial
