#pragma once

#include "mll/learners/learner.hpp"

namespace mll {

/// Majority-class baseline. Predicts the training class frequencies for
/// every input; the mode is the argmax (ties to the lowest category).
class ZeroR final : public TrainedLearner {
 public:
  ZeroR(LearnerSpec spec, std::vector<Attribute> features, Attribute target, std::vector<double> counts)
      : TrainedLearner(std::move(spec), std::move(features), std::move(target)), counts_(std::move(counts)) {
    double total = 0;
    for (double c : counts_) total += c;
    frequencies_ = counts_;
    for (auto& f : frequencies_) f /= total;
  }

  static LearnerPtr train(const SingleLabelView& view, const LearnerSpec& spec) {
    if (view.empty()) throw TrainingError("ZeroR: empty training view");
    return std::make_shared<ZeroR>(spec, view.features(), view.target(), view.class_counts());
  }

  static LearnerPtr from_state(LearnerSpec spec, std::vector<Attribute> features, Attribute target, const json& state) {
    return std::make_shared<ZeroR>(std::move(spec), std::move(features), std::move(target),
                                   state.at("counts").get<std::vector<double>>());
  }

  std::size_t mode() const { return argmax(frequencies_); }

  json state_json() const override { return {{"counts", counts_}}; }

 protected:
  std::vector<double> distribution(std::span<const Cell>) const override { return frequencies_; }

 private:
  std::vector<double> counts_;
  std::vector<double> frequencies_;
};

}  // namespace mll
