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

#include "iceval/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace iceval {
namespace {

using nlohmann::json;

constexpr const char* kPolicySchema = "iceval/policy/1";
constexpr const char* kRankerSchema = "iceval/ranker/1";
constexpr const char* kRelevanceSchema = "iceval/relevance/1";
constexpr const char* kLogManifestSchema = "iceval/bandit-log-manifest/1";
constexpr const char* kClickManifestSchema = "iceval/click-log-manifest/1";

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  in >> doc;
  return doc;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

Mat mat_from_json(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    throw std::runtime_error(std::string(what) + " must be a nonempty array of rows");
  }
  const std::size_t c = rows.at(0).size();
  Mat m(rows.size(), c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows.at(i);
    if (row.size() != c) {
      throw std::runtime_error(std::string(what) + " rows have inconsistent lengths");
    }
    for (std::size_t j = 0; j < c; ++j) m(i, j) = row.at(j).get<double>();
  }
  return m;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string manifest_path(const std::string& path) {
  return path + ".manifest.json";
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

namespace {

EnumerableWorld world_from_json(const json& doc) {
  const json& contexts = doc.at("contexts");
  Vec p(contexts.size());
  for (const json& ctx : contexts) {
    const auto id = ctx.at("id").get<std::size_t>();
    if (id >= p.size()) {
      throw std::runtime_error("context ids must be exactly 0..C-1");
    }
    p[id] = ctx.at("p").get<double>();
  }

  std::vector<std::string> actions;
  for (const json& a : doc.at("actions")) {
    actions.push_back(a.is_string() ? a.get<std::string>() : a.dump());
  }

  Mat pi0 = mat_from_json(doc.at("pi0"), "pi0");
  Mat pi0_hat = doc.contains("pi0_hat") ? mat_from_json(doc.at("pi0_hat"), "pi0_hat")
                                        : Mat();
  return EnumerableWorld::create(
      std::move(p), std::move(actions), std::move(pi0), std::move(pi0_hat),
      mat_from_json(doc.at("pi"), "pi"), mat_from_json(doc.at("delta"), "delta"),
      mat_from_json(doc.at("sigma2"), "sigma2"),
      mat_from_json(doc.at("delta_hat"), "delta_hat"));
}

}  // namespace

EnumerableWorld load_world(const std::string& path_or_builtin) {
  constexpr const char* kBuiltinPrefix = "builtin:";
  if (path_or_builtin.rfind(kBuiltinPrefix, 0) == 0) {
    return builtin_world(path_or_builtin.substr(std::string(kBuiltinPrefix).size()));
  }
  return world_from_json(parse_file(path_or_builtin));
}

EnumerableWorld parse_world_text(const std::string& json_text) {
  return world_from_json(json::parse(json_text));
}

void save_world(const std::string& path, const EnumerableWorld& world) {
  json doc;
  doc["contexts"] = json::array();
  for (std::size_t i = 0; i < world.num_contexts(); ++i) {
    doc["contexts"].push_back({{"id", i}, {"p", world.context_prob[i]}});
  }
  doc["actions"] = world.action_labels;
  doc["pi0"] = mat_to_json(world.pi0);
  doc["pi0_hat"] = mat_to_json(world.pi0_hat);
  doc["pi"] = mat_to_json(world.pi);
  doc["delta"] = mat_to_json(world.delta);
  doc["sigma2"] = mat_to_json(world.sigma2);
  doc["delta_hat"] = mat_to_json(world.delta_hat);
  write_text(path, doc.dump(2) + "\n");
}

void save_bandit_log(const std::string& path, const BanditLog& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const LoggedInteraction& rec : log.records) {
    json line;
    if (rec.context_id >= 0) {
      line["xid"] = rec.context_id;
    } else {
      line["x"] = rec.features;
    }
    line["y"] = rec.action;
    line["r"] = rec.reward;
    line["p0"] = rec.propensity;
    if (!rec.logging_row.empty()) line["p0_row"] = rec.logging_row;
    out << line.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);

  json manifest;
  manifest["schema"] = kLogManifestSchema;
  manifest["num_records"] = log.records.size();
  manifest["num_actions"] = log.num_actions;
  manifest["feature_dim"] = log.feature_dim;
  manifest["seed"] = log.seed;
  manifest["logging_policy_id"] = log.logging_policy_id;
  manifest["source_split"] = log.source_split;
  manifest["prng_algorithm"] = log.prng_algorithm;
  write_text(manifest_path(path), manifest.dump(2) + "\n");
}

BanditLog load_bandit_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  BanditLog log;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_action = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    LoggedInteraction rec;
    if (doc.contains("xid")) {
      rec.context_id = doc.at("xid").get<std::int64_t>();
    } else {
      rec.features = doc.at("x").get<Vec>();
    }
    rec.action = doc.at("y").get<std::size_t>();
    rec.reward = doc.at("r").get<double>();
    rec.propensity = doc.at("p0").get<double>();
    if (doc.contains("p0_row")) rec.logging_row = doc.at("p0_row").get<Vec>();
    max_action = std::max(max_action, rec.action);
    if (!rec.logging_row.empty()) {
      max_action = std::max(max_action, rec.logging_row.size() - 1);
    }
    if (log.feature_dim == 0) log.feature_dim = rec.features.size();
    log.records.push_back(std::move(rec));
  }
  if (log.records.empty()) throw EmptyData("bandit log has no records: " + path);
  log.num_actions = max_action + 1;

  std::ifstream manifest_in(manifest_path(path));
  if (manifest_in) {
    json manifest;
    manifest_in >> manifest;
    log.num_actions = manifest.value("num_actions", log.num_actions);
    log.feature_dim = manifest.value("feature_dim", log.feature_dim);
    log.seed = manifest.value("seed", std::uint64_t{0});
    log.logging_policy_id = manifest.value("logging_policy_id", "");
    log.source_split = manifest.value("source_split", "");
    log.prng_algorithm = manifest.value("prng_algorithm", "");
  }
  return log;
}

void save_policy(const std::string& path, const SoftmaxLinearPolicy& policy,
                 const std::string& manifest_json) {
  json doc;
  doc["schema"] = kPolicySchema;
  doc["feature_map"] = SoftmaxLinearPolicy::kFeatureMapId;
  doc["num_actions"] = policy.num_actions();
  doc["feature_dim"] = policy.feature_dim();
  doc["uniform_floor"] = policy.uniform_floor();
  doc["weights"] = policy.params();
  doc["manifest"] = json::parse(manifest_json);
  write_text(path, doc.dump(2) + "\n");
}

SoftmaxLinearPolicy load_policy(const std::string& path) {
  const json doc = parse_file(path);
  if (doc.value("schema", "") != kPolicySchema) {
    throw std::runtime_error(path + ": not a policy document");
  }
  if (doc.value("feature_map", "") != SoftmaxLinearPolicy::kFeatureMapId) {
    throw std::runtime_error(path + ": unsupported feature map '" +
                             doc.value("feature_map", "") + "'");
  }
  return SoftmaxLinearPolicy(doc.at("num_actions").get<std::size_t>(),
                             doc.at("feature_dim").get<std::size_t>(),
                             doc.at("weights").get<Vec>(),
                             doc.value("uniform_floor", 0.0));
}

void save_queries(const std::string& path,
                  const std::vector<QueryInstance>& queries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const QueryInstance& q : queries) {
    json line;
    line["qid"] = q.qid;
    line["docs"] = json::array();
    for (std::size_t j = 0; j < q.num_docs(); ++j) {
      line["docs"].push_back({{"feat", q.doc_features[j]}, {"rel", q.relevance[j]}});
    }
    out << line.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<QueryInstance> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<QueryInstance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json doc = json::parse(line);
    QueryInstance q;
    q.qid = doc.at("qid").get<std::int64_t>();
    for (const json& d : doc.at("docs")) {
      q.doc_features.push_back(d.at("feat").get<Vec>());
      q.relevance.push_back(d.at("rel").get<int>());
    }
    out.push_back(std::move(q));
  }
  if (out.empty()) throw EmptyData("query corpus has no queries: " + path);
  return out;
}

void save_click_log(const std::string& path, const ClickLog& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const ClickRecord& rec : log.records) {
    json line;
    line["qid"] = rec.query_index;
    line["entries"] = json::array();
    for (const ClickEntry& e : rec.entries) {
      line["entries"].push_back(
          {{"doc", e.doc}, {"rank", e.rank}, {"p", e.propensity}, {"c", e.click}});
    }
    out << line.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);

  json manifest;
  manifest["schema"] = kClickManifestSchema;
  manifest["num_records"] = log.records.size();
  manifest["seed"] = log.seed;
  manifest["sweeps"] = log.sweeps;
  manifest["prng_algorithm"] = log.prng_algorithm;
  write_text(manifest_path(path), manifest.dump(2) + "\n");
}

ClickLog load_click_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ClickLog log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json doc = json::parse(line);
    ClickRecord rec;
    rec.query_index = doc.at("qid").get<std::size_t>();
    for (const json& e : doc.at("entries")) {
      rec.entries.push_back({e.at("doc").get<std::size_t>(),
                             e.at("rank").get<std::size_t>(),
                             e.at("p").get<double>(), e.at("c").get<int>()});
    }
    log.records.push_back(std::move(rec));
  }
  if (log.records.empty()) throw EmptyData("click log has no records: " + path);

  std::ifstream manifest_in(manifest_path(path));
  if (manifest_in) {
    json manifest;
    manifest_in >> manifest;
    log.seed = manifest.value("seed", std::uint64_t{0});
    log.sweeps = manifest.value("sweeps", 0.0);
    log.prng_algorithm = manifest.value("prng_algorithm", "");
  }
  return log;
}

void save_ranker(const std::string& path, const LinearRanker& ranker) {
  json doc;
  doc["schema"] = kRankerSchema;
  doc["weights"] = ranker.weights;
  write_text(path, doc.dump(2) + "\n");
}

LinearRanker load_ranker(const std::string& path) {
  const json doc = parse_file(path);
  if (doc.value("schema", "") != kRankerSchema) {
    throw std::runtime_error(path + ": not a ranker document");
  }
  return LinearRanker{doc.at("weights").get<Vec>()};
}

void save_relevance_model(const std::string& path,
                          const LogisticRelevanceModel& model) {
  json doc;
  doc["schema"] = kRelevanceSchema;
  doc["weights"] = model.weights();
  doc["bias"] = model.bias();
  write_text(path, doc.dump(2) + "\n");
}

LogisticRelevanceModel load_relevance_model(const std::string& path) {
  const json doc = parse_file(path);
  if (doc.value("schema", "") != kRelevanceSchema) {
    throw std::runtime_error(path + ": not a relevance-model document");
  }
  return LogisticRelevanceModel(doc.at("weights").get<Vec>(),
                                doc.at("bias").get<double>());
}

}  // namespace iceval
