#pragma once

// Synthetic datasets for tests and the acceptance gate.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mll/mll.hpp"

namespace synth {

using mll::Attribute;
using mll::Cell;

/// Multi-label dataset with the labels first, built from plain values.
/// Label cells are 0/1, nominal features are category indices, NaN is missing.
inline mll::MultiLabelDataset table(const std::vector<std::string>& labels, const std::vector<Attribute>& features,
                                    const std::vector<std::vector<double>>& rows, std::string name = "synthetic") {
  std::vector<Attribute> attrs;
  std::vector<std::size_t> label_idx;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    attrs.push_back(mll::binary_label(labels[j]));
    label_idx.push_back(j);
  }
  attrs.insert(attrs.end(), features.begin(), features.end());
  std::vector<mll::Instance> inst;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    mll::Instance in;
    in.row_id = r;
    for (double v : rows[r]) in.values.push_back(std::isnan(v) ? Cell::missing() : Cell::number(v));
    inst.push_back(std::move(in));
  }
  return mll::MultiLabelDataset(std::move(name), mll::AttributeSchema(std::move(attrs), std::move(label_idx)),
                                std::move(inst));
}

inline mll::SingleLabelView view(const std::vector<Attribute>& features, const std::vector<std::vector<double>>& rows,
                                 const std::vector<std::uint32_t>& targets, std::size_t classes = 2) {
  std::vector<std::string> cats;
  for (std::size_t c = 0; c < classes; ++c) cats.push_back(std::to_string(c));
  std::vector<Cell> cells;
  for (const auto& r : rows)
    for (double v : r) cells.push_back(std::isnan(v) ? Cell::missing() : Cell::number(v));
  return mll::SingleLabelView(features, Attribute::nominal("class", cats), std::move(cells), targets);
}

inline std::vector<Attribute> binary_features(std::size_t n) {
  std::vector<Attribute> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Attribute::nominal("x" + std::to_string(i), {"a", "b"}));
  return out;
}

/// Noise-free tree concept over four binary features:
/// x0 ? (x1 ? 1 : x2) : (x3 ? 1 - x1 : 0).
struct Concept {
  std::vector<Attribute> features;
  std::vector<std::vector<double>> rows;
  std::vector<std::uint32_t> targets;

  mll::SingleLabelView as_view() const { return view(features, rows, targets); }
};

inline std::uint32_t tree_label(const std::vector<double>& x) {
  if (x[0] == 1) return x[1] == 1 ? 1u : static_cast<std::uint32_t>(x[2]);
  return x[3] == 1 ? static_cast<std::uint32_t>(1 - x[1]) : 0u;
}

inline Concept tree_concept(std::size_t n, std::uint64_t seed) {
  mll::Rng rng(seed);
  Concept c{binary_features(4), {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(4);
    for (auto& v : x) v = static_cast<double>(rng.below(2));
    c.targets.push_back(tree_label(x));
    c.rows.push_back(std::move(x));
  }
  return c;
}

/// Three conjunctive rules over numeric a, b, c and nominal d; class 1 when
/// any fires.
inline constexpr std::size_t kRuleCount = 3;

inline std::uint32_t rule_label(const std::vector<double>& x) {
  const double a = x[0], b = x[1], c = x[2], d = x[3];
  if (a > 0.7 && b < 0.3) return 1;
  if (c > 0.8 && d == 2) return 1;
  if (a < 0.2 && c < 0.25) return 1;
  return 0;
}

inline Concept rule_concept(std::size_t n, std::uint64_t seed) {
  mll::Rng rng(seed);
  Concept c{{Attribute::numeric("a"), Attribute::numeric("b"), Attribute::numeric("c"),
             Attribute::nominal("d", {"p", "q", "r", "s"})},
            {},
            {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = {rng.uniform(), rng.uniform(), rng.uniform(), static_cast<double>(rng.below(4))};
    c.targets.push_back(rule_label(x));
    c.rows.push_back(std::move(x));
  }
  return c;
}

inline double accuracy(const mll::TrainedLearner& model, const Concept& test) {
  double hits = 0;
  for (std::size_t i = 0; i < test.rows.size(); ++i) {
    std::vector<Cell> row;
    for (double v : test.rows[i]) row.push_back(Cell::number(v));
    const auto dist = model.predict_distribution(row);
    hits += mll::argmax(dist) == test.targets[i] ? 1 : 0;
  }
  return hits / static_cast<double>(test.rows.size());
}

inline std::size_t pick(mll::Rng& rng, std::span<const double> weights) {
  double total = 0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

/// Shaped like the preprocessed diabetes data: five one-hot race labels and
/// two one-hot gender labels ahead of mixed encounter features. Race shifts
/// a few feature distributions so it is partly learnable.
inline mll::MultiLabelDataset uci_like(std::size_t n, std::uint64_t seed) {
  mll::Rng rng(seed);
  const std::vector<std::string> labels = {"Caucasian", "AfricanAmerican", "Hispanic", "Asian", "Other", "Male", "Female"};
  std::vector<Attribute> features = {
      Attribute::nominal("age", {"[0-10)", "[10-20)", "[20-30)", "[30-40)", "[40-50)", "[50-60)", "[60-70)", "[70-80)",
                                 "[80-90)", "[90-100)"}),
      Attribute::nominal("admission_type_id", {"1", "2", "3", "4", "5", "6", "7", "8"}),
      Attribute::nominal("discharge_disposition_id", {"1", "2", "3", "6", "11", "18", "22", "25"}),
      Attribute::nominal("admission_source_id", {"1", "2", "4", "6", "7", "17"}),
      Attribute::numeric("time_in_hospital"),
      Attribute::numeric("num_lab_procedures"),
      Attribute::numeric("num_procedures"),
      Attribute::numeric("num_medications"),
      Attribute::numeric("number_outpatient"),
      Attribute::numeric("number_emergency"),
      Attribute::numeric("number_inpatient"),
      Attribute::numeric("number_diagnoses"),
      Attribute::nominal("max_glu_serum", {"None", "Norm", ">200", ">300"}),
      Attribute::nominal("A1Cresult", {"None", "Norm", ">7", ">8"}),
      Attribute::nominal("metformin", {"No", "Steady", "Up", "Down"}),
      Attribute::nominal("insulin", {"No", "Steady", "Up", "Down"}),
      Attribute::nominal("change", {"No", "Ch"}),
      Attribute::nominal("diabetesMed", {"No", "Yes"}),
      Attribute::nominal("readmitted", {"NO", ">30", "<30"}),
      Attribute::nominal("payer_code", {"MC", "HM", "SP", "BC", "MD", "CP", "UN"}),
  };
  const std::array<double, 5> race_w = {0.75, 0.19, 0.02, 0.006, 0.015};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto race = pick(rng, race_w);
    const bool male = rng.uniform() < 0.46;
    std::vector<double> r(labels.size(), 0.0);
    r[race] = 1;
    r[male ? 5 : 6] = 1;
    const double shift = race == 1 ? 1.0 : 0.0;
    const std::array<double, 10> age_w = {0.01, 0.01, 0.02, 0.04, 0.1, 0.17, 0.22, 0.26, 0.15, 0.02};
    r.push_back(static_cast<double>(pick(rng, age_w)));
    const std::array<double, 8> adm_w = {0.53 - 0.2 * shift, 0.18 + 0.1 * shift, 0.18 + 0.1 * shift, 0.01, 0.05, 0.03, 0.01, 0.01};
    r.push_back(static_cast<double>(pick(rng, adm_w)));
    r.push_back(static_cast<double>(rng.below(8)));
    const std::array<double, 6> src_w = {0.29 - 0.15 * shift, 0.01, 0.03, 0.02, 0.56 + 0.15 * shift, 0.09};
    r.push_back(static_cast<double>(pick(rng, src_w)));
    r.push_back(std::floor(1 + rng.uniform() * 13));
    r.push_back(std::floor(1 + rng.uniform() * 80 + 10 * shift));
    r.push_back(static_cast<double>(rng.below(7)));
    r.push_back(std::floor(1 + rng.uniform() * 40 + (male ? 2 : 0)));
    r.push_back(rng.uniform() < 0.8 ? 0.0 : static_cast<double>(rng.below(5)));
    r.push_back(rng.uniform() < 0.85 - 0.1 * shift ? 0.0 : static_cast<double>(rng.below(4) + 1));
    r.push_back(rng.uniform() < 0.65 ? 0.0 : static_cast<double>(rng.below(6)));
    r.push_back(static_cast<double>(3 + rng.below(7)));
    r.push_back(static_cast<double>(pick(rng, std::array<double, 4>{0.95, 0.02, 0.015, 0.015})));
    r.push_back(static_cast<double>(pick(rng, std::array<double, 4>{0.83, 0.05, 0.04, 0.08})));
    r.push_back(static_cast<double>(pick(rng, std::array<double, 4>{0.8, 0.18, 0.01, 0.01})));
    r.push_back(static_cast<double>(pick(rng, std::array<double, 4>{0.47, 0.3, 0.11, 0.12})));
    r.push_back(static_cast<double>(rng.below(2)));
    r.push_back(rng.uniform() < 0.77 ? 1.0 : 0.0);
    r.push_back(static_cast<double>(pick(rng, std::array<double, 3>{0.54, 0.35, 0.11})));
    r.push_back(rng.uniform() < 0.4 ? std::nan("") : static_cast<double>(pick(rng, std::array<double, 7>{0.32, 0.06, 0.05, 0.05, 0.03, 0.03, 0.02})));
    rows.push_back(std::move(r));
  }
  return table(labels, features, rows, "diabetes-synthetic");
}

/// Small random multi-label dataset: `k` labels, two numeric and two
/// nominal features, labels correlated with the features.
inline mll::MultiLabelDataset small_random(std::size_t n, std::size_t k, std::uint64_t seed) {
  mll::Rng rng(seed);
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < k; ++j) labels.push_back("L" + std::to_string(j));
  const std::vector<Attribute> features = {Attribute::numeric("u"), Attribute::numeric("v"),
                                           Attribute::nominal("color", {"red", "green", "blue"}),
                                           Attribute::nominal("flag", {"no", "yes"})};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform(), v = rng.uniform();
    const double color = static_cast<double>(rng.below(3)), flag = static_cast<double>(rng.below(2));
    std::vector<double> r;
    for (std::size_t j = 0; j < k; ++j) {
      const double p = 0.15 + 0.6 * (j % 2 == 0 ? u : v) + 0.2 * (color == static_cast<double>(j % 3) ? 1 : 0);
      r.push_back(rng.uniform() < std::min(p, 0.95) ? 1.0 : 0.0);
    }
    r.insert(r.end(), {u, v, color, rng.uniform() < 0.05 ? std::nan("") : flag});
    rows.push_back(std::move(r));
  }
  return table(labels, features, rows, "small");
}

}  // namespace synth
