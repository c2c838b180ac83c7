#pragma once

// Brute-force multi-label metrics over std::set label sets. Shares no code
// with the library: sets are built from the bit vectors, then every measure
// is computed with plain set loops.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

namespace oracle {

struct Instance {
  std::set<int> Y, Z;
  std::vector<int> order;  // labels from top-ranked to bottom
};

struct Result {
  double exact, zero_one, precision, recall, accuracy, f1, hamming_loss, hamming_score;
  double one_error, ranking_loss, coverage, f1_micro, harmonic;
  std::vector<double> per_label;
};

inline std::set<int> to_set(const std::vector<std::uint8_t>& bits) {
  std::set<int> s;
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (bits[j]) s.insert(static_cast<int>(j));
  return s;
}

inline std::vector<Instance> build(const std::vector<std::vector<std::uint8_t>>& Y,
                                   const std::vector<std::vector<std::uint8_t>>& Z,
                                   const std::vector<std::vector<std::size_t>>& ranks) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    Instance in{to_set(Y[i]), to_set(Z[i]), {}};
    for (std::size_t r = 1; r <= ranks[i].size(); ++r)
      for (std::size_t j = 0; j < ranks[i].size(); ++j)
        if (ranks[i][j] == r) in.order.push_back(static_cast<int>(j));
    out.push_back(in);
  }
  return out;
}

inline std::set<int> intersect(const std::set<int>& a, const std::set<int>& b) {
  std::set<int> r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.begin()));
  return r;
}

inline std::set<int> unite(const std::set<int>& a, const std::set<int>& b) {
  std::set<int> r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.begin()));
  return r;
}

inline std::set<int> sym_diff(const std::set<int>& a, const std::set<int>& b) {
  std::set<int> r;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.begin()));
  return r;
}

inline double frac(double num, double den, bool both_empty) {
  if (den == 0) return both_empty ? 1.0 : 0.0;
  return num / den;
}

inline Result evaluate(const std::vector<Instance>& data, int k) {
  Result r{};
  const double n = static_cast<double>(data.size());
  double rl_sum = 0, rl_count = 0, cov_sum = 0, cov_count = 0;
  double tp = 0, fp = 0, fn = 0;
  for (const auto& d : data) {
    const auto inter = intersect(d.Y, d.Z);
    const auto uni = unite(d.Y, d.Z);
    const bool both_empty = d.Y.empty() && d.Z.empty();
    if (d.Y == d.Z) r.exact += 1;
    r.precision += frac(static_cast<double>(inter.size()), static_cast<double>(d.Z.size()), both_empty);
    r.recall += frac(static_cast<double>(inter.size()), static_cast<double>(d.Y.size()), both_empty);
    r.accuracy += frac(static_cast<double>(inter.size()), static_cast<double>(uni.size()), both_empty);
    r.f1 += frac(2.0 * static_cast<double>(inter.size()), static_cast<double>(d.Y.size() + d.Z.size()), both_empty);
    r.hamming_loss += static_cast<double>(sym_diff(d.Y, d.Z).size()) / k;

    if (!d.Y.count(d.order.front())) r.one_error += 1;

    std::set<int> irrelevant;
    for (int j = 0; j < k; ++j)
      if (!d.Y.count(j)) irrelevant.insert(j);
    auto position = [&](int label) {
      return static_cast<int>(std::find(d.order.begin(), d.order.end(), label) - d.order.begin());
    };
    if (!d.Y.empty() && !irrelevant.empty()) {
      double bad = 0;
      for (int a : d.Y)
        for (int b : irrelevant)
          if (position(b) < position(a)) bad += 1;
      rl_sum += bad / static_cast<double>(d.Y.size() * irrelevant.size());
      rl_count += 1;
    }
    if (!d.Y.empty()) {
      int depth = 0;
      for (int a : d.Y) depth = std::max(depth, position(a));
      cov_sum += depth;
      cov_count += 1;
    }
    tp += static_cast<double>(inter.size());
    fp += static_cast<double>(d.Z.size() - inter.size());
    fn += static_cast<double>(d.Y.size() - inter.size());
  }
  r.exact /= n;
  r.zero_one = 1 - r.exact;
  r.precision /= n;
  r.recall /= n;
  r.accuracy /= n;
  r.f1 /= n;
  r.hamming_loss /= n;
  r.hamming_score = 1 - r.hamming_loss;
  r.one_error /= n;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.ranking_loss = rl_count ? rl_sum / rl_count : nan;
  r.coverage = cov_count ? cov_sum / cov_count : nan;
  r.f1_micro = (2 * tp + fp + fn) > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;

  double harmonic = 0;
  for (int j = 0; j < k; ++j) {
    double pos = 0, neg = 0, hit_pos = 0, hit_neg = 0, agree = 0;
    for (const auto& d : data) {
      const bool y = d.Y.count(j), z = d.Z.count(j);
      if (y) {
        pos += 1;
        if (z) hit_pos += 1;
      } else {
        neg += 1;
        if (!z) hit_neg += 1;
      }
      if (y == z) agree += 1;
    }
    r.per_label.push_back(agree / n);
    if (pos == 0 || neg == 0 || hit_pos == 0 || hit_neg == 0) continue;
    const double tpr = hit_pos / pos, tnr = hit_neg / neg;
    harmonic += 2 / (1 / tpr + 1 / tnr);
  }
  r.harmonic = harmonic / k;
  return r;
}

}  // namespace oracle
