#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mll/error.hpp"
#include "mll/learners/view.hpp"

namespace mll {

using json = nlohmann::json;

struct ZeroRParams {
  friend bool operator==(const ZeroRParams&, const ZeroRParams&) = default;
};

struct NaiveBayesParams {
  friend bool operator==(const NaiveBayesParams&, const NaiveBayesParams&) = default;
};

struct KnnParams {
  std::size_t k = 5;
  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

enum class LeafStrategy { MajorityClass, NaiveBayes };

struct HoeffdingParams {
  double delta = 1e-7;
  double tau = 0.05;
  std::size_t grace_period = 200;
  LeafStrategy leaf = LeafStrategy::MajorityClass;
  friend bool operator==(const HoeffdingParams&, const HoeffdingParams&) = default;
};

struct RipperParams {
  std::size_t folds_for_prune = 3;  // one fold prunes, the rest grow
  std::size_t optimization_passes = 2;
  double min_coverage = 2.0;  // minimum covered positives for a grown condition
  friend bool operator==(const RipperParams&, const RipperParams&) = default;
};

using LearnerParams = std::variant<ZeroRParams, NaiveBayesParams, KnnParams, HoeffdingParams, RipperParams>;

struct LearnerSpec {
  LearnerParams params = ZeroRParams{};
  std::uint64_t seed = 1;

  void validate() const {
    if (auto* k = std::get_if<KnnParams>(&params); k && k->k < 1) throw ConfigError("KNN k must be >= 1");
    if (auto* h = std::get_if<HoeffdingParams>(&params)) {
      if (!(h->delta > 0 && h->delta < 1)) throw ConfigError("Hoeffding delta must lie in (0, 1)");
      if (!(h->tau >= 0)) throw ConfigError("Hoeffding tau must be >= 0");
      if (h->grace_period < 1) throw ConfigError("Hoeffding grace_period must be >= 1");
    }
    if (auto* r = std::get_if<RipperParams>(&params)) {
      if (r->folds_for_prune < 2) throw ConfigError("Ripper folds_for_prune must be >= 2");
      if (!(r->min_coverage >= 0)) throw ConfigError("Ripper min_coverage must be >= 0");
    }
  }

  /// Short display name, e.g. "KNN(5)".
  std::string name() const {
    return std::visit(
        [](const auto& p) -> std::string {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ZeroRParams>) return "ZeroR";
          else if constexpr (std::is_same_v<T, NaiveBayesParams>) return "NaiveBayes";
          else if constexpr (std::is_same_v<T, KnnParams>) return "KNN(" + std::to_string(p.k) + ")";
          else if constexpr (std::is_same_v<T, HoeffdingParams>) return "HoeffdingTree";
          else return "Ripper";
        },
        params);
  }

  friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;
};

/// Fitted single-label classifier. Immutable after construction.
class TrainedLearner {
 public:
  virtual ~TrainedLearner() = default;

  /// Class probabilities for one feature row; one entry per target category.
  std::vector<double> predict_distribution(std::span<const Cell> row) const {
    check_row(row);
    return distribution(row);
  }

  const LearnerSpec& spec() const { return spec_; }
  const std::vector<Attribute>& features() const { return features_; }
  const Attribute& target() const { return target_; }
  const std::vector<std::string>& classes() const { return target_.categories; }
  std::size_t class_count() const { return target_.categories.size(); }

  /// Kind-specific fitted state.
  virtual json state_json() const = 0;

 protected:
  TrainedLearner(LearnerSpec spec, std::vector<Attribute> features, Attribute target)
      : spec_(std::move(spec)), features_(std::move(features)), target_(std::move(target)) {}

  virtual std::vector<double> distribution(std::span<const Cell> row) const = 0;

  void check_row(std::span<const Cell> row) const {
    if (row.size() != features_.size())
      throw PredictionError("row has " + std::to_string(row.size()) + " features, model expects " +
                            std::to_string(features_.size()));
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (row[f].is_missing() || !features_[f].is_nominal()) continue;
      double v = row[f].raw();
      if (v < 0 || v != std::floor(v) || row[f].category() >= features_[f].categories.size())
        throw PredictionError("category out of range for feature '" + features_[f].name + "'");
    }
  }

 private:
  LearnerSpec spec_;
  std::vector<Attribute> features_;
  Attribute target_;
};

using LearnerPtr = std::shared_ptr<const TrainedLearner>;

/// Normalizes in place; all-zero input becomes uniform.
inline void normalize(std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  if (s > 0) {
    for (double& x : v) x /= s;
  } else {
    for (double& x : v) x = 1.0 / static_cast<double>(v.size());
  }
}

/// exp-normalize of log scores.
inline std::vector<double> softmax_logs(const std::vector<double>& logs) {
  double mx = -INFINITY;
  for (double l : logs) mx = std::max(mx, l);
  std::vector<double> out(logs.size());
  if (!std::isfinite(mx)) {
    for (auto& x : out) x = 1.0 / static_cast<double>(out.size());
    return out;
  }
  for (std::size_t i = 0; i < logs.size(); ++i) out[i] = std::exp(logs[i] - mx);
  normalize(out);
  return out;
}

inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// JSON helpers shared by the learner serializers.

inline json attribute_to_json(const Attribute& a) {
  json j{{"name", a.name}, {"kind", a.is_nominal() ? "nominal" : "numeric"}};
  if (a.is_nominal()) j["categories"] = a.categories;
  return j;
}

inline Attribute attribute_from_json(const json& j) {
  auto name = j.at("name").get<std::string>();
  auto kind = j.at("kind").get<std::string>();
  if (kind == "nominal") return Attribute::nominal(name, j.at("categories").get<std::vector<std::string>>());
  if (kind == "numeric") return Attribute::numeric(name);
  throw ParseError("unknown attribute kind '" + kind + "'");
}

inline json cell_to_json(const Cell& c) { return c.is_missing() ? json(nullptr) : json(c.raw()); }
inline Cell cell_from_json(const json& j) { return j.is_null() ? Cell::missing() : Cell::number(j.get<double>()); }

}  // namespace mll
