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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "iceval/datasets.hpp"
#include "iceval/estimators.hpp"
#include "iceval/experiments.hpp"
#include "iceval/io.hpp"
#include "iceval/learn.hpp"
#include "iceval/ltr.hpp"
#include "iceval/world.hpp"

namespace {

using iceval::Vec;
using nlohmann::json;

constexpr const char* kConfigSchemaPrefix = "iceval/config/";

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int workers = 1;
};

json load_config(const GlobalOpts& global) {
  if (global.config_path.empty()) return json::object();
  std::ifstream in(global.config_path);
  if (!in) throw std::runtime_error("cannot open config " + global.config_path);
  json doc;
  in >> doc;
  const std::string schema = doc.value("schema", "");
  if (schema.rfind(kConfigSchemaPrefix, 0) != 0) {
    throw std::runtime_error(global.config_path +
                             ": config must declare \"schema\": \"" +
                             kConfigSchemaPrefix + "<version>\"");
  }
  return doc;
}

std::string out_path(const GlobalOpts& global, const std::string& name) {
  std::filesystem::create_directories(global.out_dir);
  return (std::filesystem::path(global.out_dir) / name).string();
}

/// Scheme from a label plus at most one of --M / --tau / --param.
iceval::WeightScheme make_scheme(const std::string& label,
                                 std::optional<double> clip,
                                 std::optional<double> blend,
                                 std::optional<double> param) {
  int given = int(clip.has_value()) + int(blend.has_value()) +
              int(param.has_value());
  if (given > 1) {
    throw std::runtime_error("give at most one of --M, --tau, --param");
  }
  std::optional<double> value = param;
  if (clip) value = clip;
  if (blend) value = blend;
  return iceval::WeightScheme::from_label(label, value);
}

iceval::EnumerableWorld world_from_config(const json& ref) {
  if (ref.is_string()) return iceval::load_world(ref.get<std::string>());
  if (ref.is_object()) return iceval::parse_world_text(ref.dump());
  throw std::runtime_error(
      "config \"world\" must be a path, \"builtin:<name>\", or an inline object");
}

std::vector<iceval::WeightScheme> estimators_from_config(const json& list) {
  std::vector<iceval::WeightScheme> out;
  for (const json& entry : list) {
    const auto label = entry.at("scheme").get<std::string>();
    if (entry.contains("params")) {
      for (const json& p : entry.at("params")) {
        out.push_back(
            iceval::WeightScheme::from_label(label, p.get<double>()));
      }
    } else if (entry.contains("param")) {
      out.push_back(iceval::WeightScheme::from_label(
          label, entry.at("param").get<double>()));
    } else {
      out.push_back(iceval::WeightScheme::from_label(label, std::nullopt));
    }
  }
  if (out.empty()) throw std::runtime_error("config lists no estimators");
  return out;
}

iceval::SyntheticSpec dataset_spec_from_config(const json& doc) {
  iceval::SyntheticSpec spec;
  spec.num_examples = doc.value("n", spec.num_examples);
  spec.feature_dim = doc.value("dim", spec.feature_dim);
  spec.num_classes = doc.value("classes", spec.num_classes);
  spec.separation = doc.value("separation", spec.separation);
  spec.seed = doc.value("seed", spec.seed);
  spec.train_fraction = doc.value("train_fraction", spec.train_fraction);
  spec.validation_fraction =
      doc.value("validation_fraction", spec.validation_fraction);
  return spec;
}

iceval::LearnConfig learn_config_from_json(const json& doc) {
  iceval::LearnConfig cfg;
  std::optional<double> param;
  if (doc.contains("param")) param = doc.at("param").get<double>();
  cfg.scheme =
      iceval::WeightScheme::from_label(doc.at("scheme").get<std::string>(), param);
  cfg.penalty = doc.value("penalty", cfg.penalty);
  cfg.squared_penalty = doc.value("squared_penalty", cfg.squared_penalty);
  cfg.restarts = doc.value("restarts", cfg.restarts);
  cfg.max_iterations = doc.value("iterations", cfg.max_iterations);
  cfg.gradient_tolerance = doc.value("tolerance", cfg.gradient_tolerance);
  cfg.seed = doc.value("seed", cfg.seed);
  if (doc.value("optimizer", "lbfgs") == std::string("gd")) {
    cfg.optimizer = iceval::OptimizerKind::kGradientDescent;
  }
  return cfg;
}

iceval::SweepConfig sweep_config_from_json(const json& doc,
                                           const GlobalOpts& global) {
  iceval::SweepConfig config;
  config.world = world_from_config(doc.at("world"));
  config.estimators = estimators_from_config(doc.at("estimators"));
  config.sample_sizes = doc.at("sizes").get<std::vector<std::size_t>>();
  config.replications = doc.value("replications", std::size_t{1000});
  config.seed = doc.value("seed", std::uint64_t{0});
  if (global.seed) config.seed = *global.seed;
  config.workers = global.workers;
  return config;
}

int cmd_gen_data(const GlobalOpts& global, const iceval::SyntheticSpec& flags,
                 bool flags_given) {
  const json doc = load_config(global);
  iceval::SyntheticSpec spec = doc.contains("dataset")
                                   ? dataset_spec_from_config(doc.at("dataset"))
                                   : flags;
  if (flags_given) spec = flags;
  if (global.seed) spec.seed = *global.seed;
  const iceval::SupervisedDataset dataset = iceval::make_synthetic_multiclass(spec);
  const std::string path = out_path(global, "dataset.csv");
  iceval::write_dataset_csv(path, dataset);
  std::cout << "wrote " << path << " (" << dataset.examples.size()
            << " examples, " << dataset.num_classes << " classes, dim "
            << dataset.feature_dim << ")\n";
  return 0;
}

int cmd_gen_bandit(const GlobalOpts& global, const std::string& data_path,
                   const std::string& split_name, double logger_fraction,
                   double model_fraction, double floor, bool no_floor) {
  const iceval::SupervisedDataset dataset = iceval::load_dataset_csv(data_path);
  iceval::Split split = iceval::Split::kTrain;
  if (split_name == "validation") split = iceval::Split::kValidation;
  else if (split_name == "test") split = iceval::Split::kTest;
  else if (split_name != "train") throw std::runtime_error("unknown split: " + split_name);

  const std::uint64_t seed = global.seed.value_or(0);
  const iceval::BanditActors actors = iceval::train_logger_and_models(
      dataset, logger_fraction, model_fraction, seed,
      no_floor ? 0.0 : floor);
  const iceval::BanditLog log =
      iceval::supervised_to_bandit(dataset, split, actors.logger, seed);

  iceval::save_bandit_log(out_path(global, "bandit.jsonl"), log);
  iceval::save_policy(out_path(global, "logger.json"), actors.logger);
  iceval::save_policy(out_path(global, "model.json"), actors.model.classifier());
  iceval::save_policy(out_path(global, "target.json"), actors.target);

  double mean_reward = 0.0;
  for (const iceval::LoggedInteraction& rec : log.records) mean_reward += rec.reward;
  mean_reward /= static_cast<double>(log.records.size());
  std::cout << "wrote " << log.records.size() << " interactions to "
            << out_path(global, "bandit.jsonl") << " (mean reward "
            << iceval::format_number(mean_reward) << ")\n";
  return 0;
}

int cmd_evaluate(const GlobalOpts& global, const std::string& log_path,
                 const std::string& scheme_label, std::optional<double> clip,
                 std::optional<double> blend, std::optional<double> param,
                 const std::string& policy_path, const std::string& model_path,
                 const std::string& world_ref) {
  const iceval::WeightScheme scheme = make_scheme(scheme_label, clip, blend, param);
  const iceval::BanditLog log = iceval::load_bandit_log(log_path);
  if (!policy_path.empty() == !world_ref.empty()) {
    throw std::runtime_error("give exactly one of --policy or --world");
  }

  iceval::EstimateDiagnostics diag;
  double estimate = 0.0;
  if (!world_ref.empty()) {
    const iceval::EnumerableWorld world = iceval::load_world(world_ref);
    const iceval::TabularPolicy target = iceval::target_policy_of(world);
    const iceval::TabularRewardModel model = iceval::reward_model_of(world);
    estimate = iceval::evaluate(scheme, log.records, target, model, &diag);
  } else {
    const iceval::SoftmaxLinearPolicy policy = iceval::load_policy(policy_path);
    if (scheme.uses_reward_model()) {
      if (model_path.empty()) {
        throw std::runtime_error(scheme.label() +
                                 " needs --model <classifier policy json>");
      }
      const iceval::ClassifierRewardModel model(iceval::load_policy(model_path));
      estimate = iceval::evaluate(scheme, log.records, policy, model, &diag);
    } else {
      estimate = iceval::evaluate(scheme, log.records, policy, &diag);
    }
  }
  std::cout << scheme.label() << " estimate: " << iceval::format_number(estimate)
            << "\n";
  if (diag.scanned_pairs > 0) {
    std::cout << "zero-support pairs: " << diag.zero_support_pairs << " / "
              << diag.scanned_pairs << "\n";
  }
  return 0;
}

int cmd_sweep(const GlobalOpts& global) {
  const json doc = load_config(global);
  if (!doc.contains("world")) throw std::runtime_error("sweep needs --config");
  const iceval::SweepConfig config = sweep_config_from_json(doc, global);
  const std::vector<iceval::SweepRow> rows = iceval::run_sweep(config);
  const std::string path = out_path(global, "sweep.csv");
  iceval::write_sweep_csv(path, rows);
  std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
  return 0;
}

int cmd_oracle_check(const GlobalOpts& global) {
  const json doc = load_config(global);
  if (!doc.contains("world")) throw std::runtime_error("oracle-check needs --config");
  const iceval::SweepConfig config = sweep_config_from_json(doc, global);
  const iceval::OracleCheckReport report = iceval::run_oracle_check(config);
  const std::string path = out_path(global, "oracle_check.csv");
  iceval::write_oracle_check_csv(path, report.rows);
  std::cout << "wrote " << report.rows.size() << " rows to " << path
            << "; max |z| = " << iceval::format_number(report.max_abs_z)
            << (report.pass ? " (pass)" : " (FAIL)") << "\n";
  return report.pass ? 0 : 1;
}

int cmd_learn(const GlobalOpts& global, const std::string& log_path,
              const std::string& scheme_label, std::optional<double> clip,
              std::optional<double> blend, std::optional<double> param,
              double penalty, bool squared, int restarts, int iterations,
              const std::string& model_path, const std::string& optimizer) {
  iceval::LearnConfig cfg;
  cfg.scheme = make_scheme(scheme_label, clip, blend, param);
  cfg.penalty = penalty;
  cfg.squared_penalty = squared;
  cfg.restarts = restarts;
  cfg.max_iterations = iterations;
  cfg.seed = global.seed.value_or(0);
  if (optimizer == "gd") cfg.optimizer = iceval::OptimizerKind::kGradientDescent;

  const iceval::BanditLog log = iceval::load_bandit_log(log_path);
  std::optional<iceval::ClassifierRewardModel> model;
  if (cfg.scheme.uses_reward_model()) {
    if (model_path.empty()) {
      throw std::runtime_error(cfg.scheme.label() +
                               " needs --model <classifier policy json>");
    }
    model.emplace(iceval::load_policy(model_path));
  }
  const iceval::LearnResult result =
      iceval::erm_learn(log, cfg, model ? &*model : nullptr);

  json manifest;
  manifest["scheme"] = cfg.scheme.label();
  if (cfg.scheme.param()) manifest["param"] = *cfg.scheme.param();
  manifest["penalty"] = cfg.penalty;
  manifest["squared_penalty"] = cfg.squared_penalty;
  manifest["restarts"] = result.restarts_run;
  manifest["seed"] = cfg.seed;
  manifest["objective"] = result.objective;
  manifest["estimate"] = result.estimate;
  manifest["prng"] = iceval::RngStream::kAlgorithmId;
  const std::string path = out_path(global, "policy.json");
  iceval::save_policy(path, result.policy, manifest.dump());
  std::cout << "wrote " << path << "; objective "
            << iceval::format_number(result.objective) << ", estimate "
            << iceval::format_number(result.estimate) << "\n";
  return 0;
}

int cmd_learn_curve(const GlobalOpts& global) {
  const json doc = load_config(global);
  if (!doc.contains("families")) {
    throw std::runtime_error("learn-curve needs --config with \"families\"");
  }
  iceval::LearnCurveConfig config;
  config.dataset = dataset_spec_from_config(doc.value("dataset", json::object()));
  config.logger_fraction = doc.value("logger_fraction", config.logger_fraction);
  config.model_fraction = doc.value("model_fraction", config.model_fraction);
  for (const json& fam : doc.at("families")) {
    iceval::LearnFamily family;
    family.label = fam.at("label").get<std::string>();
    for (const json& cand : fam.at("candidates")) {
      family.candidates.push_back(learn_config_from_json(cand));
    }
    config.families.push_back(std::move(family));
  }
  config.sample_sizes = doc.at("sizes").get<std::vector<std::size_t>>();
  config.num_seeds = doc.value("seeds", config.num_seeds);
  config.seed = doc.value("seed", std::uint64_t{0});
  if (global.seed) config.seed = *global.seed;
  if (doc.value("selector", "cips90") == std::string("ips")) {
    config.selector = iceval::ValidationSelector::kIps;
  }
  config.workers = global.workers;

  const std::vector<iceval::LearnCurveRow> rows = iceval::run_learn_curve(config);
  const std::string path = out_path(global, "learn_curve.csv");
  iceval::write_learn_curve_csv(path, rows);
  std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
  return 0;
}

int cmd_ltr_sim(const GlobalOpts& global, const std::string& queries_path,
                std::size_t num_queries, std::size_t docs_per_query,
                std::size_t dim, const std::string& logger_path, double sweeps,
                bool train_model, double model_fraction) {
  const std::uint64_t seed = global.seed.value_or(0);
  std::vector<iceval::QueryInstance> queries;
  if (!queries_path.empty()) {
    queries = iceval::load_queries(queries_path);
  } else {
    queries =
        iceval::make_synthetic_queries(num_queries, docs_per_query, dim, seed);
    const std::string qpath = out_path(global, "queries.jsonl");
    iceval::save_queries(qpath, queries);
    std::cout << "wrote " << queries.size() << " queries to " << qpath << "\n";
  }
  iceval::LinearRanker logger;
  if (!logger_path.empty()) {
    logger = iceval::load_ranker(logger_path);
  } else {
    logger.weights.assign(queries.front().doc_features.front().size(), 0.0);
  }
  const iceval::ClickLog log =
      iceval::simulate_clicks(queries, logger, sweeps, seed);
  const std::string cpath = out_path(global, "clicks.jsonl");
  iceval::save_click_log(cpath, log);
  std::cout << "wrote " << log.records.size() << " presentations to " << cpath
            << "\n";
  if (train_model) {
    const iceval::LogisticRelevanceModel model =
        iceval::train_relevance_model(queries, model_fraction, seed);
    const std::string mpath = out_path(global, "relevance.json");
    iceval::save_relevance_model(mpath, model);
    std::cout << "wrote " << mpath << "\n";
  }
  return 0;
}

int cmd_ltr_eval(const GlobalOpts& global, const std::string& queries_path,
                 const std::string& log_path, const std::string& ranker_path,
                 const std::string& scheme_label, std::optional<double> clip,
                 std::optional<double> blend, std::optional<double> param,
                 const std::string& model_path) {
  (void)global;
  const iceval::WeightScheme scheme = make_scheme(scheme_label, clip, blend, param);
  const std::vector<iceval::QueryInstance> queries =
      iceval::load_queries(queries_path);
  const iceval::ClickLog log = iceval::load_click_log(log_path);
  const iceval::LinearRanker ranker = iceval::load_ranker(ranker_path);
  std::optional<iceval::LogisticRelevanceModel> model;
  if (!model_path.empty()) model = iceval::load_relevance_model(model_path);
  const double estimate = iceval::ltr_evaluate(scheme, log, queries, ranker,
                                               model ? &*model : nullptr);
  std::cout << scheme.label()
            << " rank estimate: " << iceval::format_number(estimate) << "\n";
  std::cout << "true rank metric of this ranker: "
            << iceval::format_number(iceval::true_average_rank(queries, ranker))
            << "\n";
  return 0;
}

int cmd_ltr_learn(const GlobalOpts& global, const std::string& queries_path,
                  const std::string& log_path, const std::string& logger_path,
                  double sweeps, const std::string& scheme_label,
                  std::optional<double> clip, std::optional<double> blend,
                  std::optional<double> param, double regularization,
                  int budget, const std::string& model_path) {
  const iceval::WeightScheme scheme = make_scheme(scheme_label, clip, blend, param);
  const std::vector<iceval::QueryInstance> queries =
      iceval::load_queries(queries_path);
  const std::uint64_t seed = global.seed.value_or(0);

  iceval::ClickLog log;
  if (!log_path.empty()) {
    log = iceval::load_click_log(log_path);
  } else {
    iceval::LinearRanker logger;
    if (!logger_path.empty()) {
      logger = iceval::load_ranker(logger_path);
    } else {
      logger.weights.assign(queries.front().doc_features.front().size(), 0.0);
    }
    log = iceval::simulate_clicks(queries, logger, sweeps, seed);
  }

  std::optional<iceval::LogisticRelevanceModel> model;
  if (!model_path.empty()) model = iceval::load_relevance_model(model_path);

  iceval::SvmRankConfig config;
  config.regularization = regularization;
  config.iterations = budget;
  config.seed = seed;
  const iceval::LinearRanker ranker = iceval::svmrank_learn(
      log, queries, scheme, model ? &*model : nullptr, config);

  const std::string path = out_path(global, "ranker.json");
  iceval::save_ranker(path, ranker);
  const Vec coefficients = iceval::svmrank_coefficients(
      scheme, log, queries, model ? &*model : nullptr);
  std::cout << "wrote " << path << "; objective "
            << iceval::format_number(iceval::svmrank_objective(
                   ranker.weights, coefficients, log, queries, regularization))
            << ", rank metric "
            << iceval::format_number(iceval::true_average_rank(queries, ranker))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual evaluation and learning toolkit"};
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--config", global.config_path, "JSON config file")
      ->expected(1);
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "PRNG seed override");
  app.add_option("--out", global.out_dir, "output directory");
  app.add_option("--workers", global.workers, "worker thread count");
  app.fallthrough();

  // gen-data
  auto* gen_data = app.add_subcommand("gen-data", "generate a synthetic dataset");
  iceval::SyntheticSpec spec;
  gen_data->add_option("--n", spec.num_examples, "number of examples");
  gen_data->add_option("--dim", spec.feature_dim, "feature dimension");
  gen_data->add_option("--classes", spec.num_classes, "number of classes");
  gen_data->add_option("--separation", spec.separation, "cluster separation");
  gen_data->add_option("--train-fraction", spec.train_fraction, "train fraction");
  gen_data->add_option("--validation-fraction", spec.validation_fraction,
                       "validation fraction");

  // gen-bandit
  auto* gen_bandit =
      app.add_subcommand("gen-bandit", "convert a dataset to a bandit log");
  std::string data_path, split = "train";
  double logger_fraction = 0.05, model_fraction = 0.1, floor = -1.0;
  bool no_floor = false;
  gen_bandit->add_option("--data", data_path, "dataset CSV")->required();
  gen_bandit->add_option("--split", split, "train|validation|test");
  gen_bandit->add_option("--logger-fraction", logger_fraction,
                         "training fraction for the logging policy");
  gen_bandit->add_option("--model-fraction", model_fraction,
                         "training fraction for the reward model");
  gen_bandit->add_option("--floor", floor,
                         "uniform floor for the logger (default 1e-3/k)");
  gen_bandit->add_flag("--no-floor", no_floor, "disable the logger floor");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a policy on a log");
  std::string eval_log, eval_scheme = "IPS", eval_policy, eval_model, eval_world;
  std::optional<double> opt_clip, opt_blend, opt_param;
  evaluate->add_option("--log", eval_log, "bandit log JSONL")->required();
  evaluate->add_option("--scheme", eval_scheme, "estimator label");
  evaluate->add_option("--M", opt_clip, "clip hyperparameter");
  evaluate->add_option("--tau", opt_blend, "blend hyperparameter");
  evaluate->add_option("--param", opt_param, "generic hyperparameter");
  evaluate->add_option("--policy", eval_policy, "policy JSON to evaluate");
  evaluate->add_option("--model", eval_model, "classifier policy JSON as model");
  evaluate->add_option("--world", eval_world, "world ref (file or builtin:<name>)");

  // sweep / oracle-check
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo bias/variance sweep");
  auto* oracle =
      app.add_subcommand("oracle-check", "Monte Carlo vs closed-form check");

  // learn
  auto* learn = app.add_subcommand("learn", "train a policy on a bandit log");
  std::string learn_log, learn_scheme = "DR", learn_model, learn_optimizer = "lbfgs";
  std::optional<double> learn_clip, learn_blend, learn_param;
  double penalty = 1e-3;
  bool squared = false;
  int restarts = 10, iterations = 200;
  learn->add_option("--log", learn_log, "bandit log JSONL")->required();
  learn->add_option("--scheme", learn_scheme, "learning objective");
  learn->add_option("--M", learn_clip, "clip hyperparameter");
  learn->add_option("--tau", learn_blend, "blend hyperparameter");
  learn->add_option("--param", learn_param, "generic hyperparameter");
  learn->add_option("--penalty", penalty, "norm penalty weight");
  learn->add_flag("--squared-penalty", squared, "use the squared norm");
  learn->add_option("--restarts", restarts, "optimizer restarts");
  learn->add_option("--iterations", iterations, "optimizer iterations");
  learn->add_option("--model", learn_model, "classifier policy JSON as model");
  learn->add_option("--optimizer", learn_optimizer, "lbfgs|gd");

  // learn-curve
  auto* learn_curve =
      app.add_subcommand("learn-curve", "learning experiment across seeds");

  // ltr-sim
  auto* ltr_sim = app.add_subcommand("ltr-sim", "simulate position-biased clicks");
  std::string ltr_queries, ltr_logger;
  std::size_t num_queries = 50, docs_per_query = 8, ltr_dim = 6;
  double sweeps = 1.0;
  bool train_model = false;
  double relevance_fraction = 0.1;
  ltr_sim->add_option("--queries", ltr_queries, "query corpus JSONL");
  ltr_sim->add_option("--num-queries", num_queries, "queries to generate");
  ltr_sim->add_option("--docs", docs_per_query, "documents per query");
  ltr_sim->add_option("--dim", ltr_dim, "feature dimension");
  ltr_sim->add_option("--logger", ltr_logger, "logging ranker JSON");
  ltr_sim->add_option("--sweeps", sweeps, "corpus passes (fractional allowed)");
  ltr_sim->add_flag("--train-model", train_model,
                    "also fit and save a relevance model");
  ltr_sim->add_option("--model-fraction", relevance_fraction,
                      "labeled fraction for the relevance model");

  // ltr-eval
  auto* ltr_eval = app.add_subcommand("ltr-eval", "evaluate a ranker on clicks");
  std::string le_queries, le_log, le_ranker, le_scheme = "IPS", le_model;
  std::optional<double> le_clip, le_blend, le_param;
  ltr_eval->add_option("--queries", le_queries, "query corpus JSONL")->required();
  ltr_eval->add_option("--log", le_log, "click log JSONL")->required();
  ltr_eval->add_option("--ranker", le_ranker, "ranker JSON")->required();
  ltr_eval->add_option("--scheme", le_scheme, "estimator label");
  ltr_eval->add_option("--M", le_clip, "clip hyperparameter");
  ltr_eval->add_option("--tau", le_blend, "blend hyperparameter");
  ltr_eval->add_option("--param", le_param, "generic hyperparameter");
  ltr_eval->add_option("--model", le_model, "relevance model JSON");

  // ltr-learn
  auto* ltr_learn = app.add_subcommand("ltr-learn", "train a ranker on clicks");
  std::string ll_queries, ll_log, ll_logger, ll_scheme = "IPS", ll_model;
  std::optional<double> ll_clip, ll_blend, ll_param;
  double regularization = 1.0, ll_sweeps = 1.0;
  int budget = 200;
  ltr_learn->add_option("--queries", ll_queries, "query corpus JSONL")->required();
  ltr_learn->add_option("--log", ll_log, "click log JSONL (else simulate)");
  ltr_learn->add_option("--logger", ll_logger, "logging ranker JSON");
  ltr_learn->add_option("--sweeps", ll_sweeps, "simulation sweeps if no --log");
  ltr_learn->add_option("--scheme", ll_scheme, "weighting scheme");
  ltr_learn->add_option("--M", ll_clip, "clip hyperparameter");
  ltr_learn->add_option("--tau", ll_blend, "blend hyperparameter");
  ltr_learn->add_option("--param", ll_param, "generic hyperparameter");
  ltr_learn->add_option("--C", regularization, "hinge regularization");
  ltr_learn->add_option("--budget", budget, "subgradient iterations");
  ltr_learn->add_option("--model", ll_model, "relevance model JSON");

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  bool gen_data_flags = false;
  gen_data->parse_complete_callback([&] {
    gen_data_flags = gen_data->count("--n") || gen_data->count("--dim") ||
                     gen_data->count("--classes") ||
                     gen_data->count("--separation");
  });

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) global.seed = seed_value;

  try {
    if (gen_data->parsed()) return cmd_gen_data(global, spec, gen_data_flags);
    if (gen_bandit->parsed()) {
      return cmd_gen_bandit(global, data_path, split, logger_fraction,
                            model_fraction, floor, no_floor);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(global, eval_log, eval_scheme, opt_clip, opt_blend,
                          opt_param, eval_policy, eval_model, eval_world);
    }
    if (sweep->parsed()) return cmd_sweep(global);
    if (oracle->parsed()) return cmd_oracle_check(global);
    if (learn->parsed()) {
      return cmd_learn(global, learn_log, learn_scheme, learn_clip, learn_blend,
                       learn_param, penalty, squared, restarts, iterations,
                       learn_model, learn_optimizer);
    }
    if (learn_curve->parsed()) return cmd_learn_curve(global);
    if (ltr_sim->parsed()) {
      return cmd_ltr_sim(global, ltr_queries, num_queries, docs_per_query,
                         ltr_dim, ltr_logger, sweeps, train_model,
                         relevance_fraction);
    }
    if (ltr_eval->parsed()) {
      return cmd_ltr_eval(global, le_queries, le_log, le_ranker, le_scheme,
                          le_clip, le_blend, le_param, le_model);
    }
    if (ltr_learn->parsed()) {
      return cmd_ltr_learn(global, ll_queries, ll_log, ll_logger, ll_sweeps,
                           ll_scheme, ll_clip, ll_blend, ll_param,
                           regularization, budget, ll_model);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
