#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mll/dataset.hpp"

namespace mll {

/// Single-target training table: feature cells (row-major), feature schema,
/// and a nominal target with at least two categories.
class SingleLabelView {
 public:
  SingleLabelView(std::vector<Attribute> features, Attribute target, std::vector<Cell> cells,
                  std::vector<std::uint32_t> targets)
      : features_(std::move(features)), target_(std::move(target)), cells_(std::move(cells)), targets_(std::move(targets)) {
    if (!target_.is_nominal() || target_.categories.size() < 2)
      throw ConfigError("target '" + target_.name + "' must be nominal with at least two categories");
    if (cells_.size() != features_.size() * targets_.size())
      throw ConfigError("view cell count does not match rows x features");
    for (auto t : targets_)
      if (t >= target_.categories.size()) throw ConfigError("target value out of range in '" + target_.name + "'");
  }

  const std::vector<Attribute>& features() const { return features_; }
  const Attribute& target() const { return target_; }
  std::size_t size() const { return targets_.size(); }
  bool empty() const { return targets_.empty(); }
  std::size_t feature_count() const { return features_.size(); }
  std::size_t class_count() const { return target_.categories.size(); }

  std::span<const Cell> row(std::size_t i) const {
    return {cells_.data() + i * features_.size(), features_.size()};
  }
  const Cell& cell(std::size_t i, std::size_t f) const { return cells_[i * features_.size() + f]; }
  std::size_t target_of(std::size_t i) const { return targets_[i]; }
  const std::vector<std::uint32_t>& targets() const { return targets_; }

  std::vector<double> class_counts() const {
    std::vector<double> counts(class_count(), 0.0);
    for (auto t : targets_) counts[t] += 1.0;
    return counts;
  }

  /// Rows at `positions`, in that order.
  SingleLabelView subset(std::span<const std::size_t> positions) const {
    std::vector<Cell> cells;
    cells.reserve(positions.size() * features_.size());
    std::vector<std::uint32_t> targets;
    targets.reserve(positions.size());
    for (auto p : positions) {
      auto r = row(p);
      cells.insert(cells.end(), r.begin(), r.end());
      targets.push_back(targets_[p]);
    }
    return SingleLabelView(features_, target_, std::move(cells), std::move(targets));
  }

 private:
  std::vector<Attribute> features_;
  Attribute target_;
  std::vector<Cell> cells_;
  std::vector<std::uint32_t> targets_;
};

}  // namespace mll
