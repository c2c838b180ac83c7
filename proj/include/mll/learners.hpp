#pragma once

#include "mll/learners/hoeffding_tree.hpp"
#include "mll/learners/knn.hpp"
#include "mll/learners/naive_bayes.hpp"
#include "mll/learners/ripper.hpp"
#include "mll/learners/zero_r.hpp"

namespace mll {

inline LearnerPtr train_learner(const SingleLabelView& view, const LearnerSpec& spec) {
  spec.validate();
  return std::visit(
      [&](const auto& p) -> LearnerPtr {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ZeroRParams>) return ZeroR::train(view, spec);
        else if constexpr (std::is_same_v<T, NaiveBayesParams>) return NaiveBayes::train(view, spec);
        else if constexpr (std::is_same_v<T, KnnParams>) return Knn::train(view, spec);
        else if constexpr (std::is_same_v<T, HoeffdingParams>) return HoeffdingTree::train(view, spec);
        else return Ripper::train(view, spec);
      },
      spec.params);
}

inline json spec_to_json(const LearnerSpec& spec) {
  json j = std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ZeroRParams>) return {{"kind", "ZeroR"}};
        else if constexpr (std::is_same_v<T, NaiveBayesParams>) return {{"kind", "NaiveBayes"}};
        else if constexpr (std::is_same_v<T, KnnParams>) return {{"kind", "KNN"}, {"k", p.k}};
        else if constexpr (std::is_same_v<T, HoeffdingParams>)
          return {{"kind", "HoeffdingTree"},
                  {"delta", p.delta},
                  {"tau", p.tau},
                  {"grace_period", p.grace_period},
                  {"leaf", p.leaf == LeafStrategy::MajorityClass ? "majority" : "naive_bayes"}};
        else
          return {{"kind", "Ripper"},
                  {"folds_for_prune", p.folds_for_prune},
                  {"optimization_passes", p.optimization_passes},
                  {"min_coverage", p.min_coverage}};
      },
      spec.params);
  j["seed"] = spec.seed;
  return j;
}

inline LearnerSpec spec_from_json(const json& j) {
  LearnerSpec spec;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "ZeroR") {
    spec.params = ZeroRParams{};
  } else if (kind == "NaiveBayes") {
    spec.params = NaiveBayesParams{};
  } else if (kind == "KNN") {
    spec.params = KnnParams{j.at("k").get<std::size_t>()};
  } else if (kind == "HoeffdingTree") {
    HoeffdingParams h;
    h.delta = j.at("delta").get<double>();
    h.tau = j.at("tau").get<double>();
    h.grace_period = j.at("grace_period").get<std::size_t>();
    const auto leaf = j.at("leaf").get<std::string>();
    if (leaf != "majority" && leaf != "naive_bayes") throw ParseError("unknown leaf strategy '" + leaf + "'");
    h.leaf = leaf == "majority" ? LeafStrategy::MajorityClass : LeafStrategy::NaiveBayes;
    spec.params = h;
  } else if (kind == "Ripper") {
    RipperParams r;
    r.folds_for_prune = j.at("folds_for_prune").get<std::size_t>();
    r.optimization_passes = j.at("optimization_passes").get<std::size_t>();
    r.min_coverage = j.at("min_coverage").get<double>();
    spec.params = r;
  } else {
    throw ParseError("unknown learner kind '" + kind + "'");
  }
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

inline json learner_to_json(const TrainedLearner& learner) {
  json features = json::array();
  for (const auto& f : learner.features()) features.push_back(attribute_to_json(f));
  return {{"spec", spec_to_json(learner.spec())},
          {"features", features},
          {"target", attribute_to_json(learner.target())},
          {"state", learner.state_json()}};
}

inline LearnerPtr learner_from_json(const json& j) {
  auto spec = spec_from_json(j.at("spec"));
  std::vector<Attribute> features;
  for (const auto& f : j.at("features")) features.push_back(attribute_from_json(f));
  auto target = attribute_from_json(j.at("target"));
  const auto& state = j.at("state");
  return std::visit(
      [&](const auto& p) -> LearnerPtr {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ZeroRParams>)
          return ZeroR::from_state(spec, std::move(features), std::move(target), state);
        else if constexpr (std::is_same_v<T, NaiveBayesParams>)
          return NaiveBayes::from_state(spec, std::move(features), std::move(target), state);
        else if constexpr (std::is_same_v<T, KnnParams>)
          return Knn::from_state(spec, std::move(features), std::move(target), state);
        else if constexpr (std::is_same_v<T, HoeffdingParams>)
          return HoeffdingTree::from_state(spec, std::move(features), std::move(target), state);
        else
          return Ripper::from_state(spec, std::move(features), std::move(target), state);
      },
      spec.params);
}

}  // namespace mll
