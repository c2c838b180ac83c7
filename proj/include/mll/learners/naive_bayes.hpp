#pragma once

#include <numbers>

#include "mll/learners/learner.hpp"

namespace mll {

/// Gaussian/categorical naive Bayes.
///
/// Priors and nominal likelihoods use Laplace smoothing (alpha = 1). Numeric
/// features use one Gaussian per class with variance floored at 1e-6; a
/// class with no observed value for a feature falls back to the pooled
/// Gaussian of that feature. Missing cells are skipped in training counts
/// and in the prediction product.
class NaiveBayes final : public TrainedLearner {
 public:
  static constexpr double kVarianceFloor = 1e-6;

  struct Gaussian {
    double count = 0;
    double mean = 0;
    double variance = 0;
  };

  struct FeatureStats {
    // nominal: counts[value * C + c], totals[c]
    std::vector<double> counts;
    std::vector<double> totals;
    // numeric: per class, plus pooled at index C
    std::vector<Gaussian> gaussians;
  };

  NaiveBayes(LearnerSpec spec, std::vector<Attribute> features, Attribute target, std::vector<double> class_counts,
             std::vector<FeatureStats> stats)
      : TrainedLearner(std::move(spec), std::move(features), std::move(target)),
        class_counts_(std::move(class_counts)),
        stats_(std::move(stats)) {}

  static LearnerPtr train(const SingleLabelView& view, const LearnerSpec& spec) {
    if (view.empty()) throw TrainingError("NaiveBayes: empty training view");
    const auto C = view.class_count();
    std::vector<FeatureStats> stats(view.feature_count());
    for (std::size_t f = 0; f < view.feature_count(); ++f) {
      const auto& attr = view.features()[f];
      auto& st = stats[f];
      if (attr.is_nominal()) {
        st.counts.assign(attr.categories.size() * C, 0.0);
        st.totals.assign(C, 0.0);
        for (std::size_t i = 0; i < view.size(); ++i) {
          const auto& cell = view.cell(i, f);
          if (cell.is_missing()) continue;
          st.counts[cell.category() * C + view.target_of(i)] += 1.0;
          st.totals[view.target_of(i)] += 1.0;
        }
      } else {
        // Welford per class and pooled
        std::vector<double> n(C + 1, 0.0), mean(C + 1, 0.0), m2(C + 1, 0.0);
        auto add = [&](std::size_t slot, double x) {
          n[slot] += 1.0;
          double d = x - mean[slot];
          mean[slot] += d / n[slot];
          m2[slot] += d * (x - mean[slot]);
        };
        for (std::size_t i = 0; i < view.size(); ++i) {
          const auto& cell = view.cell(i, f);
          if (cell.is_missing()) continue;
          add(view.target_of(i), cell.number());
          add(C, cell.number());
        }
        st.gaussians.resize(C + 1);
        for (std::size_t s = 0; s <= C; ++s)
          st.gaussians[s] = {n[s], mean[s], n[s] > 0 ? m2[s] / n[s] : 0.0};
      }
    }
    return std::make_shared<NaiveBayes>(spec, view.features(), view.target(), view.class_counts(), std::move(stats));
  }

  static LearnerPtr from_state(LearnerSpec spec, std::vector<Attribute> features, Attribute target, const json& state) {
    std::vector<FeatureStats> stats;
    for (const auto& js : state.at("features")) {
      FeatureStats st;
      if (js.contains("counts")) {
        st.counts = js.at("counts").get<std::vector<double>>();
        st.totals = js.at("totals").get<std::vector<double>>();
      } else {
        for (const auto& g : js.at("gaussians"))
          st.gaussians.push_back({g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>()});
      }
      stats.push_back(std::move(st));
    }
    return std::make_shared<NaiveBayes>(std::move(spec), std::move(features), std::move(target),
                                        state.at("class_counts").get<std::vector<double>>(), std::move(stats));
  }

  json state_json() const override {
    json fs = json::array();
    for (std::size_t f = 0; f < stats_.size(); ++f) {
      const auto& st = stats_[f];
      if (features()[f].is_nominal()) {
        fs.push_back({{"counts", st.counts}, {"totals", st.totals}});
      } else {
        json gs = json::array();
        for (const auto& g : st.gaussians) gs.push_back({g.count, g.mean, g.variance});
        fs.push_back({{"gaussians", gs}});
      }
    }
    return {{"class_counts", class_counts_}, {"features", fs}};
  }

  static double log_gaussian(double x, const Gaussian& g) {
    const double var = std::max(g.variance, kVarianceFloor);
    const double d = x - g.mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
  }

 protected:
  std::vector<double> distribution(std::span<const Cell> row) const override {
    const auto C = class_count();
    double n = 0;
    for (double c : class_counts_) n += c;
    std::vector<double> logp(C);
    for (std::size_t c = 0; c < C; ++c) logp[c] = std::log((class_counts_[c] + 1.0) / (n + static_cast<double>(C)));
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (row[f].is_missing()) continue;
      const auto& st = stats_[f];
      const auto& attr = features()[f];
      if (attr.is_nominal()) {
        const double V = static_cast<double>(attr.categories.size());
        const auto v = row[f].category();
        for (std::size_t c = 0; c < C; ++c) logp[c] += std::log((st.counts[v * C + c] + 1.0) / (st.totals[c] + V));
      } else {
        if (st.gaussians[C].count == 0) continue;
        for (std::size_t c = 0; c < C; ++c) {
          const auto& g = st.gaussians[c].count > 0 ? st.gaussians[c] : st.gaussians[C];
          logp[c] += log_gaussian(row[f].number(), g);
        }
      }
    }
    return softmax_logs(logp);
  }

 private:
  std::vector<double> class_counts_;
  std::vector<FeatureStats> stats_;
};

}  // namespace mll
