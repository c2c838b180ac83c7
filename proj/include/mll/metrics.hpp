#pragma once

// Multi-label evaluation measures over (true set, predicted set, ranking)
// triples. Sets are dense bit rows of length k; rankings use 1 for the top.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mll/error.hpp"
#include "mll/multilabel.hpp"

namespace mll {

struct EvalPair {
  std::size_t k = 0;
  std::vector<std::vector<std::uint8_t>> Y;        // true bits per instance
  std::vector<std::vector<std::uint8_t>> Z;        // predicted bits per instance
  std::vector<std::vector<std::size_t>> ranking;   // r_i(label), 1 = top

  std::size_t n() const { return Y.size(); }

  void validate() const {
    if (Y.empty()) throw EvaluationError("no instances to evaluate");
    if (Z.size() != Y.size() || ranking.size() != Y.size())
      throw EvaluationError("true sets, predicted sets and rankings differ in length");
    for (std::size_t i = 0; i < Y.size(); ++i) {
      if (Y[i].size() != k || Z[i].size() != k || ranking[i].size() != k)
        throw EvaluationError("instance " + std::to_string(i) + " does not have " + std::to_string(k) + " labels");
      std::vector<bool> seen(k + 1, false);
      for (auto r : ranking[i]) {
        if (r < 1 || r > k || seen[r]) throw EvaluationError("ranking of instance " + std::to_string(i) + " is not a permutation");
        seen[r] = true;
      }
    }
  }
};

/// Truth from the dataset, predictions from the model.
inline EvalPair make_eval_pair(const MultiLabelDataset& ds, const std::vector<MultiLabelPrediction>& predictions) {
  if (predictions.size() != ds.size()) throw EvaluationError("prediction count does not match dataset size");
  EvalPair p;
  p.k = ds.label_count();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    p.Y.push_back(ds.label_bits(i));
    p.Z.push_back(predictions[i].bipartition);
    p.ranking.push_back(predictions[i].ranking);
  }
  return p;
}

struct MetricReport {
  double exact_match = 0;
  double zero_one_loss = 0;
  double precision = 0;
  double recall = 0;
  double accuracy = 0;
  double f1_example = 0;
  double hamming_loss = 0;
  double hamming_score = 0;
  double one_error = 0;
  double ranking_loss = 0;  // NaN when no instance has both relevant and irrelevant labels
  double coverage = 0;      // NaN when every true set is empty
  double f1_micro = 0;
  double harmonic_score = 0;
  std::vector<double> per_label_accuracy;
};

struct MetricField {
  const char* name;
  double MetricReport::*member;
};

/// Scalar fields in report order.
inline constexpr std::array<MetricField, 13> kMetricFields = {{
    {"accuracy", &MetricReport::accuracy},
    {"exact_match", &MetricReport::exact_match},
    {"zero_one_loss", &MetricReport::zero_one_loss},
    {"hamming_loss", &MetricReport::hamming_loss},
    {"hamming_score", &MetricReport::hamming_score},
    {"harmonic_score", &MetricReport::harmonic_score},
    {"f1_micro", &MetricReport::f1_micro},
    {"f1_example", &MetricReport::f1_example},
    {"precision", &MetricReport::precision},
    {"recall", &MetricReport::recall},
    {"one_error", &MetricReport::one_error},
    {"ranking_loss", &MetricReport::ranking_loss},
    {"coverage", &MetricReport::coverage},
}};

namespace detail {

struct SetCounts {
  double inter = 0, y = 0, z = 0, uni = 0;
};

inline SetCounts set_counts(const std::vector<std::uint8_t>& y, const std::vector<std::uint8_t>& z) {
  SetCounts c;
  for (std::size_t j = 0; j < y.size(); ++j) {
    c.inter += (y[j] && z[j]) ? 1 : 0;
    c.uni += (y[j] || z[j]) ? 1 : 0;
    c.y += y[j] ? 1 : 0;
    c.z += z[j] ? 1 : 0;
  }
  return c;
}

/// num/den, or the empty-set convention: 1 if both sets are empty, else 0.
inline double ratio(double num, double den, bool both_empty) {
  if (den > 0) return num / den;
  return both_empty ? 1.0 : 0.0;
}

}  // namespace detail

struct ExactMatch {
  double exact_match, zero_one_loss;
};

inline ExactMatch exact_match(const EvalPair& p) {
  p.validate();
  double hits = 0;
  for (std::size_t i = 0; i < p.n(); ++i) hits += p.Y[i] == p.Z[i] ? 1 : 0;
  const double em = hits / static_cast<double>(p.n());
  return {em, 1.0 - em};
}

struct ExampleBased {
  double precision, recall, accuracy, f1;
};

inline ExampleBased example_based(const EvalPair& p) {
  p.validate();
  ExampleBased r{0, 0, 0, 0};
  for (std::size_t i = 0; i < p.n(); ++i) {
    const auto c = detail::set_counts(p.Y[i], p.Z[i]);
    const bool both_empty = c.y == 0 && c.z == 0;
    r.precision += detail::ratio(c.inter, c.z, both_empty);
    r.recall += detail::ratio(c.inter, c.y, both_empty);
    r.accuracy += detail::ratio(c.inter, c.uni, both_empty);
    r.f1 += detail::ratio(2 * c.inter, c.y + c.z, both_empty);
  }
  const double n = static_cast<double>(p.n());
  return {r.precision / n, r.recall / n, r.accuracy / n, r.f1 / n};
}

struct Hamming {
  double loss, score;
};

inline Hamming hamming(const EvalPair& p) {
  p.validate();
  double diff = 0;
  for (std::size_t i = 0; i < p.n(); ++i)
    for (std::size_t j = 0; j < p.k; ++j) diff += (p.Y[i][j] != 0) != (p.Z[i][j] != 0) ? 1 : 0;
  const double loss = p.k ? diff / (static_cast<double>(p.n()) * static_cast<double>(p.k)) : 0.0;
  return {loss, 1.0 - loss};
}

struct RankingMetrics {
  double one_error, ranking_loss, coverage;
};

/// Ranking-loss skips instances whose true set or its complement is empty;
/// coverage skips empty true sets. A metric with nothing left is NaN here.
inline RankingMetrics ranking_metrics_or_nan(const EvalPair& p) {
  p.validate();
  double oe = 0, rl = 0, cov = 0, rl_n = 0, cov_n = 0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    const auto& y = p.Y[i];
    const auto& r = p.ranking[i];
    std::size_t top = 0;
    for (std::size_t j = 0; j < p.k; ++j)
      if (r[j] == 1) top = j;
    oe += y[top] ? 0 : 1;

    double ny = 0, wrong = 0;
    std::size_t worst = 0;
    for (std::size_t a = 0; a < p.k; ++a) {
      if (!y[a]) continue;
      ny += 1;
      worst = std::max(worst, r[a]);
      for (std::size_t b = 0; b < p.k; ++b)
        if (!y[b] && r[a] > r[b]) wrong += 1;
    }
    const double nbar = static_cast<double>(p.k) - ny;
    if (ny > 0 && nbar > 0) {
      rl += wrong / (ny * nbar);
      rl_n += 1;
    }
    if (ny > 0) {
      cov += static_cast<double>(worst) - 1.0;
      cov_n += 1;
    }
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  return {oe / static_cast<double>(p.n()), rl_n > 0 ? rl / rl_n : nan, cov_n > 0 ? cov / cov_n : nan};
}

inline RankingMetrics ranking_metrics(const EvalPair& p) {
  auto r = ranking_metrics_or_nan(p);
  if (std::isnan(r.ranking_loss))
    throw EvaluationError("ranking loss undefined: every instance has all or no labels relevant");
  if (std::isnan(r.coverage)) throw EvaluationError("coverage undefined: every instance has an empty true set");
  return r;
}

inline std::vector<double> per_label_accuracy(const EvalPair& p) {
  p.validate();
  std::vector<double> acc(p.k, 0.0);
  for (std::size_t i = 0; i < p.n(); ++i)
    for (std::size_t j = 0; j < p.k; ++j) acc[j] += (p.Y[i][j] != 0) == (p.Z[i][j] != 0) ? 1 : 0;
  for (auto& a : acc) a /= static_cast<double>(p.n());
  return acc;
}

inline double f1_micro(const EvalPair& p) {
  p.validate();
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < p.n(); ++i)
    for (std::size_t j = 0; j < p.k; ++j) {
      const bool y = p.Y[i][j], z = p.Z[i][j];
      tp += (y && z) ? 1 : 0;
      fp += (!y && z) ? 1 : 0;
      fn += (y && !z) ? 1 : 0;
    }
  const double den = 2 * tp + fp + fn;
  return den > 0 ? 2 * tp / den : 0.0;
}

/// Mean over labels of the harmonic mean of true-positive and true-negative
/// rates; a label where either rate is undefined or zero scores 0.
inline double harmonic_score(const EvalPair& p) {
  p.validate();
  if (p.k == 0) return 0.0;
  double total = 0;
  for (std::size_t j = 0; j < p.k; ++j) {
    double tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t i = 0; i < p.n(); ++i) {
      const bool y = p.Y[i][j], z = p.Z[i][j];
      if (y) (z ? tp : fn) += 1;
      else (z ? fp : tn) += 1;
    }
    if (tp + fn == 0 || tn + fp == 0) continue;
    const double tpr = tp / (tp + fn), tnr = tn / (tn + fp);
    if (tpr > 0 && tnr > 0) total += 2 * tpr * tnr / (tpr + tnr);
  }
  return total / static_cast<double>(p.k);
}

inline MetricReport compute_report(const EvalPair& p) {
  MetricReport r;
  const auto em = exact_match(p);
  r.exact_match = em.exact_match;
  r.zero_one_loss = em.zero_one_loss;
  const auto eb = example_based(p);
  r.precision = eb.precision;
  r.recall = eb.recall;
  r.accuracy = eb.accuracy;
  r.f1_example = eb.f1;
  const auto h = hamming(p);
  r.hamming_loss = h.loss;
  r.hamming_score = h.score;
  const auto rk = ranking_metrics_or_nan(p);
  r.one_error = rk.one_error;
  r.ranking_loss = rk.ranking_loss;
  r.coverage = rk.coverage;
  r.f1_micro = f1_micro(p);
  r.harmonic_score = harmonic_score(p);
  r.per_label_accuracy = per_label_accuracy(p);
  return r;
}

inline MetricReport evaluate(const MultiLabelModel& model, const MultiLabelDataset& ds) {
  return compute_report(make_eval_pair(ds, predict_all(model, ds)));
}

}  // namespace mll
