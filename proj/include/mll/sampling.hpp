#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "mll/dataset.hpp"
#include "mll/random.hpp"

namespace mll {

struct SampleStrategy {
  enum class Kind { First, Random };
  Kind kind = Kind::First;
  std::uint64_t seed = 1;

  static SampleStrategy first() { return {Kind::First, 0}; }
  static SampleStrategy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

/// First n rows, or n rows drawn without replacement (kept in stored order).
inline MultiLabelDataset sample(const MultiLabelDataset& ds, std::size_t n, SampleStrategy strategy) {
  if (n < 1 || n > ds.size())
    throw RangeError("sample size " + std::to_string(n) + " outside [1, " + std::to_string(ds.size()) + "]");
  std::vector<std::size_t> rows;
  if (strategy.kind == SampleStrategy::Kind::First) {
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  } else {
    Rng rng(strategy.seed);
    rows = rng.permutation(ds.size());
    rows.resize(n);
    std::sort(rows.begin(), rows.end());
  }
  return ds.subset(rows);
}

/// Rounded train size; the epsilon absorbs representation error such as
/// 0.7 * 10 = 7.000000000000001.
inline std::size_t train_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

/// Seeded shuffle, then the first ceil(fraction * n) rows train, the rest test.
inline std::pair<MultiLabelDataset, MultiLabelDataset> split(const MultiLabelDataset& ds, double fraction,
                                                             std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw RangeError("train fraction must lie in (0, 1)");
  const auto n = ds.size();
  const auto n_train = train_count(n, fraction);
  if (n_train == 0 || n_train >= n)
    throw RangeError("split of " + std::to_string(n) + " rows at fraction " + format_number(fraction) +
                     " leaves an empty part");
  Rng rng(seed);
  auto order = rng.permutation(n);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {ds.subset(train), ds.subset(test)};
}

}  // namespace mll
