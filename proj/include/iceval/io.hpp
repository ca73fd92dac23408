// Copyright 2026 The iceval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "iceval/data_types.hpp"
#include "iceval/ltr.hpp"
#include "iceval/policy.hpp"
#include "iceval/world.hpp"

namespace iceval {

/// 12-significant-digit decimal rendering shared by every CSV writer, so
/// reruns of a deterministic experiment produce byte-identical files.
std::string format_number(double value);

/// World documents:
/// {"contexts":[{"id":0,"p":..},...], "actions":[..], "pi0":[[..]],
///  "pi0_hat":[[..]] (optional), "pi":[[..]], "delta":[[..]],
///  "sigma2":[[..]], "delta_hat":[[..]]}
/// Context ids must be exactly 0..C-1 (they index the matrices). A reference
/// of the form "builtin:<name>" resolves to the built-in fixture instead of
/// a file.
EnumerableWorld load_world(const std::string& path_or_builtin);
void save_world(const std::string& path, const EnumerableWorld& world);

/// Parses a world document already held in memory (inline configs).
EnumerableWorld parse_world_text(const std::string& json_text);

/// Bandit logs: JSON lines, one interaction per line,
/// {"x":[...]|"xid":int, "y":int, "r":float, "p0":float,
///  "p0_row":[...] (optional)},
/// plus a sidecar manifest at <path>.manifest.json carrying the metadata
/// (seed, sizes, policy id, source split, PRNG algorithm id).
void save_bandit_log(const std::string& path, const BanditLog& log);
BanditLog load_bandit_log(const std::string& path);

/// Learned policies: a single JSON document with the feature-map id, shape,
/// floor, parameter vector, and a free-form training manifest.
void save_policy(const std::string& path, const SoftmaxLinearPolicy& policy,
                 const std::string& manifest_json = "{}");
SoftmaxLinearPolicy load_policy(const std::string& path);

/// Query corpora: JSON lines, {"qid":..,"docs":[{"feat":[...],"rel":0|1}]}.
void save_queries(const std::string& path,
                  const std::vector<QueryInstance>& queries);
std::vector<QueryInstance> load_queries(const std::string& path);

/// Click logs: JSON lines,
/// {"qid":..,"entries":[{"doc":j,"rank":int,"p":float,"c":0|1}]},
/// plus a sidecar manifest like bandit logs.
void save_click_log(const std::string& path, const ClickLog& log);
ClickLog load_click_log(const std::string& path);

/// Linear rankers: {"schema":..,"weights":[...]}.
void save_ranker(const std::string& path, const LinearRanker& ranker);
LinearRanker load_ranker(const std::string& path);

/// Relevance models: {"schema":..,"weights":[...],"bias":..}.
void save_relevance_model(const std::string& path,
                          const LogisticRelevanceModel& model);
LogisticRelevanceModel load_relevance_model(const std::string& path);

}  // namespace iceval
