#pragma once

// Cross-validation, train/test evaluation, fold aggregation and the
// sample-size x model x evaluation experiment grid.

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "mll/metrics.hpp"
#include "mll/sampling.hpp"

namespace mll {

struct AggregateStat {
  double mean = 0;
  double std = 0;
  std::size_t count = 0;
};

/// Mean and sample standard deviation (divisor count - 1) of the finite
/// values; NaN entries are ignored. No finite values gives NaN/NaN/0.
inline AggregateStat aggregate(std::span<const double> values) {
  AggregateStat s;
  double sum = 0;
  for (double v : values)
    if (!std::isnan(v)) {
      sum += v;
      ++s.count;
    }
  if (s.count == 0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0};
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0;
    for (double v : values)
      if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

struct AggregateReport {
  std::array<AggregateStat, kMetricFields.size()> fields{};
  std::vector<AggregateStat> per_label_accuracy;

  const AggregateStat& get(std::string_view name) const {
    for (std::size_t i = 0; i < kMetricFields.size(); ++i)
      if (kMetricFields[i].name == name) return fields[i];
    throw ConfigError("unknown metric '" + std::string(name) + "'");
  }
};

inline AggregateReport aggregate(std::span<const MetricReport> folds) {
  AggregateReport out;
  std::vector<double> vals(folds.size());
  for (std::size_t f = 0; f < kMetricFields.size(); ++f) {
    for (std::size_t i = 0; i < folds.size(); ++i) vals[i] = folds[i].*(kMetricFields[f].member);
    out.fields[f] = aggregate(vals);
  }
  const auto k = folds.empty() ? 0 : folds[0].per_label_accuracy.size();
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < folds.size(); ++i) vals[i] = folds[i].per_label_accuracy[j];
    out.per_label_accuracy.push_back(aggregate(vals));
  }
  return out;
}

/// Seeded shuffle of 0..n-1 dealt into k folds; the first n % k folds get
/// one extra index. Each fold is returned in ascending order.
inline std::vector<std::vector<std::size_t>> k_fold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw RangeError("fold count must be >= 2");
  if (k > n) throw RangeError("fold count " + std::to_string(k) + " exceeds instance count " + std::to_string(n));
  const auto perm = Rng(seed).permutation(n);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos), perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

/// Folds stratified by labelset: rows are grouped by labelset (shuffled
/// within each group) and dealt round-robin.
inline std::vector<std::vector<std::size_t>> stratified_fold_indices(const MultiLabelDataset& ds, std::size_t k,
                                                                     std::uint64_t seed) {
  const auto n = ds.size();
  if (k < 2) throw RangeError("fold count must be >= 2");
  if (k > n) throw RangeError("fold count " + std::to_string(k) + " exceeds instance count " + std::to_string(n));
  const auto perm = Rng(seed).permutation(n);
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[perm[i]] = i;
  std::vector<std::pair<std::string, std::size_t>> keyed;
  for (std::size_t i = 0; i < n; ++i) keyed.emplace_back(labelset_key(ds.label_bits(i)), i);
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : rank[a.second] < rank[b.second];
  });
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(keyed[i].second);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

struct CvResult {
  std::vector<std::vector<std::size_t>> folds;
  std::vector<MetricReport> per_fold;
  AggregateReport aggregate;
};

inline CvResult cross_validate(const MultiLabelDataset& ds, const ModelSpec& spec, std::size_t k, std::uint64_t seed,
                               bool stratified = false) {
  CvResult out;
  out.folds = stratified ? stratified_fold_indices(ds, k, seed) : k_fold_indices(ds.size(), k, seed);
  std::vector<std::size_t> fold_of(ds.size());
  for (std::size_t f = 0; f < k; ++f)
    for (auto i : out.folds[f]) fold_of[i] = f;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (fold_of[i] != f) train.push_back(i);
    try {
      auto model = train_model(ds.subset(train), spec);
      out.per_fold.push_back(evaluate(model, ds.subset(out.folds[f])));
    } catch (const Error& e) {
      throw TrainingError("fold " + std::to_string(f) + ": " + e.what());
    }
  }
  out.aggregate = aggregate(out.per_fold);
  return out;
}

inline MetricReport train_test_eval(const MultiLabelDataset& ds, const ModelSpec& spec, double fraction,
                                    std::uint64_t seed) {
  auto [train, test] = split(ds, fraction, seed);
  return evaluate(train_model(train, spec), test);
}

struct EvalMethod {
  enum class Kind { TrainTest, KFold };
  Kind kind = Kind::KFold;
  double fraction = 0.66;
  std::size_t folds = 10;
  bool stratified = false;

  static EvalMethod train_test(double f = 0.66) { return {Kind::TrainTest, f, 10, false}; }
  static EvalMethod k_fold(std::size_t k = 10, bool stratified = false) { return {Kind::KFold, 0.66, k, stratified}; }

  std::string name() const {
    if (kind == Kind::TrainTest) return "Test/Train Split";
    return std::to_string(folds) + " Fold CV" + (stratified ? " (stratified)" : "");
  }

  void validate() const {
    if (kind == Kind::TrainTest && !(fraction > 0 && fraction < 1)) throw ConfigError("train fraction must lie in (0, 1)");
    if (kind == Kind::KFold && folds < 2) throw ConfigError("fold count must be >= 2");
  }

  friend bool operator==(const EvalMethod&, const EvalMethod&) = default;
};

struct SampleSpec {
  std::size_t size = 1000;
  SampleStrategy strategy = SampleStrategy::first();

  std::string name() const {
    return strategy.kind == SampleStrategy::Kind::First ? "first" : "random(" + std::to_string(strategy.seed) + ")";
  }
};

struct GridSpec {
  std::vector<SampleSpec> samples;
  std::vector<ModelSpec> models;
  std::vector<EvalMethod> evaluations;
  std::uint64_t seed = 1;  // split and fold seed, shared by every cell

  void validate() const {
    if (samples.empty()) throw ConfigError("no sample sizes configured");
    if (models.empty()) throw ConfigError("no models configured");
    if (evaluations.empty()) throw ConfigError("no evaluation methods configured");
    for (const auto& m : models) m.validate();
    for (const auto& e : evaluations) e.validate();
  }
};

struct GridRow {
  std::size_t cell = 0;
  SampleSpec sample;
  ModelSpec model;
  EvalMethod method;
  bool ok = false;
  std::string error;
  MetricReport report;                       // train/test result, or fold means for CV
  std::optional<AggregateReport> aggregate;  // CV only
};

using RowSink = std::function<void(const GridRow&)>;

inline GridRow run_cell(const MultiLabelDataset& sample_ds, const SampleSpec& s, const ModelSpec& m,
                        const EvalMethod& e, std::uint64_t seed) {
  GridRow row;
  row.sample = s;
  row.model = m;
  row.method = e;
  try {
    if (e.kind == EvalMethod::Kind::TrainTest) {
      row.report = train_test_eval(sample_ds, m, e.fraction, seed);
    } else {
      auto cv = cross_validate(sample_ds, m, e.folds, seed, e.stratified);
      row.aggregate = cv.aggregate;
      for (std::size_t f = 0; f < kMetricFields.size(); ++f)
        row.report.*(kMetricFields[f].member) = cv.aggregate.fields[f].mean;
      for (const auto& a : cv.aggregate.per_label_accuracy) row.report.per_label_accuracy.push_back(a.mean);
    }
    row.ok = true;
  } catch (const std::exception& ex) {
    row.ok = false;
    row.error = ex.what();
  }
  return row;
}

/// Runs every (sample, model, evaluation) cell. Rows reach `sink` in
/// config order as soon as they and all earlier rows are done. Failed
/// cells become failed rows. threads = 0 uses hardware concurrency.
inline std::vector<GridRow> run_grid(const MultiLabelDataset& ds, const GridSpec& grid, const RowSink& sink = {},
                                     std::size_t threads = 1) {
  grid.validate();
  std::vector<std::optional<MultiLabelDataset>> samples;
  std::vector<std::string> sample_errors;
  for (const auto& s : grid.samples) {
    try {
      samples.emplace_back(sample(ds, s.size, s.strategy));
      sample_errors.emplace_back();
    } catch (const std::exception& ex) {
      samples.emplace_back();
      sample_errors.emplace_back(ex.what());
    }
  }

  struct Cell {
    std::size_t s, m, e;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < grid.samples.size(); ++s)
    for (std::size_t m = 0; m < grid.models.size(); ++m)
      for (std::size_t e = 0; e < grid.evaluations.size(); ++e) cells.push_back({s, m, e});

  std::vector<std::optional<GridRow>> done(cells.size());
  std::vector<GridRow> emitted;
  std::mutex mu;
  std::size_t next_emit = 0;
  std::atomic<std::size_t> next_cell{0};

  auto work = [&] {
    while (true) {
      const auto i = next_cell.fetch_add(1);
      if (i >= cells.size()) return;
      const auto& c = cells[i];
      GridRow row;
      if (samples[c.s]) {
        row = run_cell(*samples[c.s], grid.samples[c.s], grid.models[c.m], grid.evaluations[c.e], grid.seed);
      } else {
        row.sample = grid.samples[c.s];
        row.model = grid.models[c.m];
        row.method = grid.evaluations[c.e];
        row.error = sample_errors[c.s];
      }
      row.cell = i;
      std::lock_guard lock(mu);
      done[i] = std::move(row);
      while (next_emit < cells.size() && done[next_emit]) {
        if (sink) sink(*done[next_emit]);
        emitted.push_back(std::move(*done[next_emit]));
        done[next_emit].reset();
        ++next_emit;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(cells.size(), 1));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  return emitted;
}

}  // namespace mll
