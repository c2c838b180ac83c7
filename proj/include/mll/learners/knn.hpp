#pragma once

#include <algorithm>

#include "mll/learners/learner.hpp"

namespace mll {

/// Lazy k-nearest-neighbour classifier over mixed attributes.
///
/// Per-attribute difference: nominal 0/1 mismatch; numeric |a-b| divided by
/// the training range; 1 when either side is Missing. Distance is the
/// Euclidean norm of those differences. Ties go to the lower training row.
class Knn final : public TrainedLearner {
 public:
  Knn(LearnerSpec spec, std::vector<Attribute> features, Attribute target, std::size_t k, std::vector<Cell> cells,
      std::vector<std::uint32_t> targets)
      : TrainedLearner(std::move(spec), std::move(features), std::move(target)),
        k_(k),
        cells_(std::move(cells)),
        targets_(std::move(targets)) {
    const auto d = this->features().size();
    lo_.assign(d, INFINITY);
    hi_.assign(d, -INFINITY);
    for (std::size_t i = 0; i < targets_.size(); ++i)
      for (std::size_t f = 0; f < d; ++f) {
        const auto& c = cells_[i * d + f];
        if (c.is_missing() || !this->features()[f].is_numeric()) continue;
        lo_[f] = std::min(lo_[f], c.number());
        hi_[f] = std::max(hi_[f], c.number());
      }
  }

  static LearnerPtr train(const SingleLabelView& view, const LearnerSpec& spec) {
    const auto k = std::get<KnnParams>(spec.params).k;
    if (view.empty()) throw TrainingError("KNN: empty training view");
    if (k > view.size())
      throw TrainingError("KNN: k=" + std::to_string(k) + " exceeds training size " + std::to_string(view.size()));
    std::vector<Cell> cells;
    cells.reserve(view.size() * view.feature_count());
    for (std::size_t i = 0; i < view.size(); ++i) {
      auto r = view.row(i);
      cells.insert(cells.end(), r.begin(), r.end());
    }
    return std::make_shared<Knn>(spec, view.features(), view.target(), k, std::move(cells), view.targets());
  }

  static LearnerPtr from_state(LearnerSpec spec, std::vector<Attribute> features, Attribute target, const json& state) {
    std::vector<Cell> cells;
    for (const auto& c : state.at("cells")) cells.push_back(cell_from_json(c));
    auto k = std::get<KnnParams>(spec.params).k;
    return std::make_shared<Knn>(std::move(spec), std::move(features), std::move(target), k, std::move(cells),
                                 state.at("targets").get<std::vector<std::uint32_t>>());
  }

  json state_json() const override {
    json cells = json::array();
    for (const auto& c : cells_) cells.push_back(cell_to_json(c));
    return {{"cells", cells}, {"targets", targets_}};
  }

  double squared_distance(std::span<const Cell> a, std::size_t train_row) const {
    const auto d = features().size();
    const Cell* b = cells_.data() + train_row * d;
    double s = 0;
    for (std::size_t f = 0; f < d; ++f) {
      double diff;
      if (a[f].is_missing() || b[f].is_missing()) {
        diff = 1.0;
      } else if (features()[f].is_nominal()) {
        diff = a[f].category() == b[f].category() ? 0.0 : 1.0;
      } else {
        const double range = hi_[f] - lo_[f];
        diff = range > 0 ? std::abs(a[f].number() - b[f].number()) / range
                         : (a[f].number() == b[f].number() ? 0.0 : 1.0);
      }
      s += diff * diff;
    }
    return s;
  }

 protected:
  std::vector<double> distribution(std::span<const Cell> row) const override {
    const auto n = targets_.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = {squared_distance(row, i), i};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
    std::vector<double> votes(class_count(), 0.0);
    for (std::size_t i = 0; i < k_; ++i) votes[targets_[dist[i].second]] += 1.0;
    for (auto& v : votes) v /= static_cast<double>(k_);
    return votes;
  }

 private:
  std::size_t k_;
  std::vector<Cell> cells_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> lo_, hi_;
};

}  // namespace mll
