#pragma once

// TOML configuration for experiment grids and single-model training.
//
//   [dataset]      path, format ("arff" | "csv"), label_count (ARFF),
//                  label_columns + missing (CSV), preprocess (bool)
//   [experiment]   seed, output, threads
//   [[samples]]    size, strategy ("first" | "random"), seed
//   [[evaluations]] kind ("train_test" | "kfold"), fraction, folds, stratified
//   [[models]]     transform or transforms, learner, learner parameters,
//                  threshold, seed, chain_order, chain_seed
//
// A train config uses [dataset] and a single [model] table.

#include <filesystem>
#include <set>

#include <toml.hpp>

#include "mll/arff.hpp"
#include "mll/csv.hpp"
#include "mll/eval.hpp"
#include "mll/preprocess.hpp"

namespace mll {

struct DatasetConfig {
  std::string path;
  std::string format;  // "arff" or "csv"
  std::optional<std::size_t> label_count;
  std::vector<std::string> label_columns;
  std::string missing = "?";
  bool preprocess = false;  // apply the diabetes preprocessing after a CSV load
};

struct ExperimentConfig {
  DatasetConfig dataset;
  GridSpec grid;
  std::string output = "results";
  std::size_t threads = 0;
};

struct TrainConfig {
  DatasetConfig dataset;
  ModelSpec model;
};

namespace detail {

inline std::string where(const toml::node& n) {
  const auto& src = n.source();
  return src.begin ? "line " + std::to_string(src.begin.line) : std::string("config");
}

inline std::string where(const toml::table& t, std::string_view key) {
  if (auto* n = t.get(key)) return where(*n);
  return where(t);
}

[[noreturn]] inline void config_fail(const std::string& location, const std::string& field, const std::string& msg) {
  throw ConfigError(location + ": " + field + ": " + msg);
}

inline void allow_keys(const toml::table& t, const std::string& ctx, std::initializer_list<std::string_view> keys) {
  for (const auto& [k, v] : t) {
    bool ok = false;
    for (auto allowed : keys) ok = ok || k.str() == allowed;
    if (!ok) config_fail(where(v), ctx + "." + std::string(k.str()), "unknown key");
  }
}

inline const toml::table& table_at(const toml::table& t, std::string_view key, const std::string& ctx) {
  auto* n = t.get(key);
  if (!n) config_fail(where(t), ctx.empty() ? std::string(key) : ctx + "." + std::string(key), "missing table");
  auto* tb = n->as_table();
  if (!tb) config_fail(where(*n), std::string(key), "expected a table");
  return *tb;
}

inline std::optional<std::string> opt_string(const toml::table& t, std::string_view key, const std::string& ctx) {
  auto* n = t.get(key);
  if (!n) return std::nullopt;
  auto v = n->value<std::string>();
  if (!v || !n->is_string()) config_fail(where(*n), ctx + "." + std::string(key), "expected a string");
  return *v;
}

inline std::optional<std::int64_t> opt_int(const toml::table& t, std::string_view key, const std::string& ctx) {
  auto* n = t.get(key);
  if (!n) return std::nullopt;
  if (!n->is_integer()) config_fail(where(*n), ctx + "." + std::string(key), "expected an integer");
  return n->as_integer()->get();
}

inline std::optional<std::size_t> opt_count(const toml::table& t, std::string_view key, const std::string& ctx) {
  auto v = opt_int(t, key, ctx);
  if (v && *v < 0) config_fail(where(t, key), ctx + "." + std::string(key), "must be >= 0");
  if (!v) return std::nullopt;
  return static_cast<std::size_t>(*v);
}

inline std::optional<double> opt_real(const toml::table& t, std::string_view key, const std::string& ctx) {
  auto* n = t.get(key);
  if (!n) return std::nullopt;
  if (n->is_integer()) return static_cast<double>(n->as_integer()->get());
  if (!n->is_floating_point()) config_fail(where(*n), ctx + "." + std::string(key), "expected a number");
  return n->as_floating_point()->get();
}

inline std::optional<bool> opt_bool(const toml::table& t, std::string_view key, const std::string& ctx) {
  auto* n = t.get(key);
  if (!n) return std::nullopt;
  if (!n->is_boolean()) config_fail(where(*n), ctx + "." + std::string(key), "expected true or false");
  return n->as_boolean()->get();
}

inline std::vector<std::string> string_list(const toml::node& n, const std::string& ctx) {
  auto* arr = n.as_array();
  if (!arr) config_fail(where(n), ctx, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : *arr) {
    if (!e.is_string()) config_fail(where(e), ctx, "expected an array of strings");
    out.push_back(e.as_string()->get());
  }
  return out;
}

inline const toml::array& array_of_tables(const toml::table& t, std::string_view key) {
  auto* n = t.get(key);
  if (!n) config_fail(where(t), std::string(key), "missing (add at least one [[" + std::string(key) + "]] table)");
  auto* arr = n->as_array();
  if (!arr || !arr->is_array_of_tables())
    config_fail(where(*n), std::string(key), "expected [[" + std::string(key) + "]] tables");
  return *arr;
}

inline std::uint64_t seed_value(const toml::table& t, std::string_view key, const std::string& ctx,
                                std::uint64_t fallback) {
  auto v = opt_int(t, key, ctx);
  if (!v) return fallback;
  if (*v < 0) config_fail(where(t, key), ctx + "." + std::string(key), "seed must be >= 0");
  return static_cast<std::uint64_t>(*v);
}

inline DatasetConfig parse_dataset(const toml::table& t, const std::filesystem::path& base) {
  const std::string ctx = "dataset";
  allow_keys(t, ctx, {"path", "format", "label_count", "label_columns", "missing", "preprocess"});
  DatasetConfig d;
  auto path = opt_string(t, "path", ctx);
  if (!path) config_fail(where(t), "dataset.path", "missing");
  std::filesystem::path p(*path);
  d.path = p.is_absolute() || base.empty() ? p.string() : (base / p).string();
  auto ext = p.extension().string();
  d.format = opt_string(t, "format", ctx).value_or(ext == ".csv" ? "csv" : "arff");
  if (d.format != "arff" && d.format != "csv") config_fail(where(t, "format"), "dataset.format", "expected \"arff\" or \"csv\"");
  d.label_count = opt_count(t, "label_count", ctx);
  if (auto* n = t.get("label_columns")) d.label_columns = string_list(*n, "dataset.label_columns");
  d.missing = opt_string(t, "missing", ctx).value_or("?");
  d.preprocess = opt_bool(t, "preprocess", ctx).value_or(false);
  if (d.format == "csv" && d.preprocess && !d.label_columns.empty())
    config_fail(where(t), "dataset.label_columns", "not used when preprocess = true");
  if (d.format == "csv" && !d.preprocess && d.label_columns.empty())
    config_fail(where(t), "dataset.label_columns", "required for CSV input unless preprocess = true");
  return d;
}

inline LearnerSpec parse_learner(const toml::table& t, const std::string& ctx) {
  auto name = opt_string(t, "learner", ctx);
  if (!name) config_fail(where(t), ctx + ".learner", "missing");
  LearnerSpec spec;
  const auto& n = *name;
  auto reject = [&](std::initializer_list<std::string_view> keys) {
    for (auto k : keys)
      if (t.get(k)) config_fail(where(t, k), ctx + "." + std::string(k), "does not apply to learner " + n);
  };
  if (n == "ZeroR") {
    reject({"k", "delta", "tau", "grace_period", "leaf", "folds_for_prune", "optimization_passes", "min_coverage"});
    spec.params = ZeroRParams{};
  } else if (n == "NaiveBayes") {
    reject({"k", "delta", "tau", "grace_period", "leaf", "folds_for_prune", "optimization_passes", "min_coverage"});
    spec.params = NaiveBayesParams{};
  } else if (n == "KNN") {
    reject({"delta", "tau", "grace_period", "leaf", "folds_for_prune", "optimization_passes", "min_coverage"});
    KnnParams p;
    p.k = opt_count(t, "k", ctx).value_or(p.k);
    if (p.k < 1) config_fail(where(t, "k"), ctx + ".k", "must be >= 1");
    spec.params = p;
  } else if (n == "HoeffdingTree") {
    reject({"k", "folds_for_prune", "optimization_passes", "min_coverage"});
    HoeffdingParams p;
    p.delta = opt_real(t, "delta", ctx).value_or(p.delta);
    p.tau = opt_real(t, "tau", ctx).value_or(p.tau);
    p.grace_period = opt_count(t, "grace_period", ctx).value_or(p.grace_period);
    auto leaf = opt_string(t, "leaf", ctx).value_or("majority");
    if (leaf != "majority" && leaf != "naive_bayes")
      config_fail(where(t, "leaf"), ctx + ".leaf", "expected \"majority\" or \"naive_bayes\"");
    p.leaf = leaf == "majority" ? LeafStrategy::MajorityClass : LeafStrategy::NaiveBayes;
    spec.params = p;
  } else if (n == "Ripper" || n == "JRip") {
    reject({"k", "delta", "tau", "grace_period", "leaf"});
    RipperParams p;
    p.folds_for_prune = opt_count(t, "folds_for_prune", ctx).value_or(p.folds_for_prune);
    p.optimization_passes = opt_count(t, "optimization_passes", ctx).value_or(p.optimization_passes);
    p.min_coverage = opt_real(t, "min_coverage", ctx).value_or(p.min_coverage);
    spec.params = p;
  } else {
    config_fail(where(t, "learner"), ctx + ".learner",
                "unknown learner '" + n + "' (expected ZeroR, NaiveBayes, KNN, HoeffdingTree or Ripper)");
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    config_fail(where(t), ctx, e.what());
  }
  return spec;
}

/// One [[models]] / [model] table; expands "transforms" into several specs.
inline std::vector<ModelSpec> parse_models(const toml::table& t, const std::string& ctx, std::uint64_t default_seed,
                                           bool allow_many) {
  allow_keys(t, ctx,
             {"transform", "transforms", "learner", "k", "delta", "tau", "grace_period", "leaf", "folds_for_prune",
              "optimization_passes", "min_coverage", "threshold", "seed", "chain_order", "chain_seed"});
  std::vector<std::string> transforms;
  if (auto tr = opt_string(t, "transform", ctx)) transforms.push_back(*tr);
  if (auto* n = t.get("transforms")) {
    if (!allow_many) config_fail(where(*n), ctx + ".transforms", "use a single 'transform' here");
    if (!transforms.empty()) config_fail(where(*n), ctx + ".transforms", "give either 'transform' or 'transforms'");
    transforms = string_list(*n, ctx + ".transforms");
  }
  if (transforms.empty()) config_fail(where(t), ctx + ".transform", "missing");

  ModelSpec base;
  base.base = parse_learner(t, ctx);
  base.threshold = opt_real(t, "threshold", ctx).value_or(0.5);
  if (!(base.threshold >= 0 && base.threshold <= 1)) config_fail(where(t, "threshold"), ctx + ".threshold", "must lie in [0, 1]");
  base.seed = seed_value(t, "seed", ctx, default_seed);
  if (auto* n = t.get("chain_order")) {
    if (n->is_string()) {
      const auto v = n->as_string()->get();
      if (v == "labels") base.chain = ChainOrder::labels();
      else if (v == "random") base.chain = ChainOrder::random(seed_value(t, "chain_seed", ctx, base.seed));
      else config_fail(where(*n), ctx + ".chain_order", "expected \"labels\", \"random\" or an array of label indices");
    } else if (auto* arr = n->as_array()) {
      std::vector<std::size_t> order;
      for (const auto& e : *arr) {
        if (!e.is_integer() || e.as_integer()->get() < 0)
          config_fail(where(e), ctx + ".chain_order", "expected non-negative label indices");
        order.push_back(static_cast<std::size_t>(e.as_integer()->get()));
      }
      base.chain = ChainOrder::explicit_order(std::move(order));
    } else {
      config_fail(where(*n), ctx + ".chain_order", "expected \"labels\", \"random\" or an array of label indices");
    }
  }
  std::vector<ModelSpec> out;
  for (const auto& tr : transforms) {
    ModelSpec m = base;
    try {
      m.transform = transform_from_string(tr);
    } catch (const ConfigError& e) {
      config_fail(where(t, allow_many && t.get("transforms") ? "transforms" : "transform"), ctx + ".transform", e.what());
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline toml::table parse_toml_file(const std::string& path) {
  try {
    return toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    const auto& src = e.source();
    std::string loc = src.begin ? "line " + std::to_string(src.begin.line) + ", column " + std::to_string(src.begin.column)
                                : std::string("config");
    throw ConfigError(path + ": " + loc + ": " + std::string(e.description()));
  }
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const toml::table& root, const std::filesystem::path& base = {}) {
  using namespace detail;
  allow_keys(root, "", {"dataset", "experiment", "samples", "evaluations", "models"});
  ExperimentConfig cfg;
  cfg.dataset = parse_dataset(table_at(root, "dataset", ""), base);
  if (auto* n = root.get("experiment")) {
    auto* t = n->as_table();
    if (!t) config_fail(where(*n), "experiment", "expected a table");
    allow_keys(*t, "experiment", {"seed", "output", "threads"});
    cfg.grid.seed = seed_value(*t, "seed", "experiment", 1);
    if (auto out = opt_string(*t, "output", "experiment")) {
      std::filesystem::path p(*out);
      cfg.output = p.is_absolute() || base.empty() ? p.string() : (base / p).string();
    }
    cfg.threads = opt_count(*t, "threads", "experiment").value_or(0);
  }

  const auto& samples = array_of_tables(root, "samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& t = *samples[i].as_table();
    const std::string ctx = "samples[" + std::to_string(i) + "]";
    allow_keys(t, ctx, {"size", "strategy", "seed"});
    SampleSpec s;
    auto size = opt_count(t, "size", ctx);
    if (!size || *size < 1) config_fail(where(t), ctx + ".size", "required, >= 1");
    s.size = *size;
    const auto strategy = opt_string(t, "strategy", ctx).value_or("first");
    if (strategy == "first") s.strategy = SampleStrategy::first();
    else if (strategy == "random") s.strategy = SampleStrategy::random(seed_value(t, "seed", ctx, cfg.grid.seed));
    else config_fail(where(t, "strategy"), ctx + ".strategy", "expected \"first\" or \"random\"");
    cfg.grid.samples.push_back(s);
  }

  const auto& evals = array_of_tables(root, "evaluations");
  for (std::size_t i = 0; i < evals.size(); ++i) {
    const auto& t = *evals[i].as_table();
    const std::string ctx = "evaluations[" + std::to_string(i) + "]";
    allow_keys(t, ctx, {"kind", "fraction", "folds", "stratified"});
    const auto kind = opt_string(t, "kind", ctx);
    EvalMethod e;
    if (kind == "train_test") {
      e = EvalMethod::train_test(opt_real(t, "fraction", ctx).value_or(0.66));
      if (!(e.fraction > 0 && e.fraction < 1)) config_fail(where(t, "fraction"), ctx + ".fraction", "must lie in (0, 1)");
    } else if (kind == "kfold") {
      e = EvalMethod::k_fold(opt_count(t, "folds", ctx).value_or(10), opt_bool(t, "stratified", ctx).value_or(false));
      if (e.folds < 2) config_fail(where(t, "folds"), ctx + ".folds", "must be >= 2");
    } else {
      config_fail(where(t, "kind"), ctx + ".kind", "expected \"train_test\" or \"kfold\"");
    }
    cfg.grid.evaluations.push_back(e);
  }

  const auto& models = array_of_tables(root, "models");
  for (std::size_t i = 0; i < models.size(); ++i) {
    auto specs = parse_models(*models[i].as_table(), "models[" + std::to_string(i) + "]", cfg.grid.seed, true);
    cfg.grid.models.insert(cfg.grid.models.end(), specs.begin(), specs.end());
  }
  if (cfg.grid.models.empty()) config_fail("config", "models", "no models configured");
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  auto root = detail::parse_toml_file(path);
  try {
    return parse_experiment_config(root, std::filesystem::path(path).parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline TrainConfig parse_train_config(const toml::table& root, const std::filesystem::path& base = {}) {
  using namespace detail;
  allow_keys(root, "", {"dataset", "model"});
  TrainConfig cfg;
  cfg.dataset = parse_dataset(table_at(root, "dataset", ""), base);
  cfg.model = parse_models(table_at(root, "model", ""), "model", 1, false).front();
  return cfg;
}

inline TrainConfig load_train_config(const std::string& path) {
  auto root = detail::parse_toml_file(path);
  try {
    return parse_train_config(root, std::filesystem::path(path).parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Loads the configured dataset, applying the diabetes preprocessing if asked.
inline MultiLabelDataset load_dataset(const DatasetConfig& d) {
  if (d.format == "arff") return read_arff_file(d.path, d.label_count);
  if (d.preprocess) return preprocess_diabetes(read_csv_file(d.path, {}, d.missing)).first;
  return read_csv_file(d.path, d.label_columns, d.missing);
}

}  // namespace mll
