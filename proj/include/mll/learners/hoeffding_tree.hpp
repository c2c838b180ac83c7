#pragma once

// Incremental (VFDT-style) decision tree. Leaves collect sufficient
// statistics; a leaf splits once the information-gain lead of its best
// attribute over the runner-up exceeds the Hoeffding bound, or the bound
// itself falls below the tie threshold tau.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mll/learners/learner.hpp"

namespace mll {

/// epsilon = sqrt(R^2 ln(1/delta) / (2n)).
inline double hoeffding_bound(double range, double delta, double n) {
  if (!(range > 0)) throw RangeError("hoeffding_bound: range must be > 0");
  if (!(delta > 0 && delta < 1)) throw RangeError("hoeffding_bound: delta must lie in (0, 1)");
  if (!(n >= 1)) throw RangeError("hoeffding_bound: n must be >= 1");
  return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

inline double entropy(std::span<const double> dist) {
  double total = 0;
  for (double d : dist) total += d;
  if (total <= 0) return 0.0;
  double h = 0;
  for (double d : dist)
    if (d > 0) h -= (d / total) * std::log2(d / total);
  return h;
}

class HoeffdingTree final : public TrainedLearner {
 public:
  static constexpr double kMinBranchFraction = 0.01;
  static constexpr std::size_t kNumericCandidates = 10;

  struct GaussianEstimator {
    double n = 0, mean = 0, m2 = 0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double x) {
      n += 1;
      double d = x - mean;
      mean += d / n;
      m2 += d * (x - mean);
      min = std::min(min, x);
      max = std::max(max, x);
    }
    double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }

    /// Estimated weight of observations <= t.
    double weight_at_or_below(double t) const {
      if (n == 0 || t < min) return 0.0;
      if (t >= max) return n;
      const double sd = stddev();
      if (sd <= 0) return t >= mean ? n : 0.0;
      return n * 0.5 * std::erfc(-(t - mean) / (sd * std::numbers::sqrt2));
    }
  };

  struct AttributeObserver {
    std::vector<double> counts;              // nominal: counts[value * C + class]
    std::vector<GaussianEstimator> gauss;    // numeric: one per class
  };

  struct Node {
    bool leaf = true;
    std::vector<double> class_counts;  // inherited + observed; used for prediction
    std::size_t attribute = 0;
    bool numeric_split = false;
    double threshold = 0;
    std::vector<std::size_t> children;
    // leaf learning state
    std::vector<double> observed;
    double seen = 0;
    double seen_at_last_eval = 0;
    std::vector<AttributeObserver> observers;
  };

  HoeffdingTree(LearnerSpec spec, std::vector<Attribute> features, Attribute target)
      : TrainedLearner(std::move(spec), std::move(features), std::move(target)),
        params_(std::get<HoeffdingParams>(this->spec().params)) {
    nodes_.push_back(make_leaf(std::vector<double>(class_count(), 0.0)));
  }

  static std::shared_ptr<HoeffdingTree> train_tree(const SingleLabelView& view, const LearnerSpec& spec) {
    spec.validate();
    if (view.empty()) throw TrainingError("HoeffdingTree: empty training view");
    auto tree = std::make_shared<HoeffdingTree>(spec, view.features(), view.target());
    for (std::size_t i = 0; i < view.size(); ++i) tree->learn(view.row(i), view.target_of(i));
    tree->finish();
    return tree;
  }

  static LearnerPtr train(const SingleLabelView& view, const LearnerSpec& spec) { return train_tree(view, spec); }

  /// Processes one labelled instance.
  void learn(std::span<const Cell> row, std::size_t cls) {
    std::size_t id = route(row);
    {
      Node& leaf = nodes_[id];
      leaf.class_counts[cls] += 1;
      leaf.observed[cls] += 1;
      leaf.seen += 1;
      observe(leaf, row, cls);
    }
    Node& leaf = nodes_[id];
    if (leaf.seen - leaf.seen_at_last_eval >= static_cast<double>(params_.grace_period)) {
      leaf.seen_at_last_eval = leaf.seen;
      attempt_split(id);
    }
  }

  /// Drops learning state not needed for prediction.
  void finish() {
    if (params_.leaf == LeafStrategy::NaiveBayes) return;
    for (auto& n : nodes_) {
      n.observers.clear();
      n.observers.shrink_to_fit();
    }
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
  }
  std::size_t depth() const { return depth_of(0); }
  const std::vector<Node>& nodes() const { return nodes_; }

  json state_json() const override {
    json nodes = json::array();
    const bool nb = params_.leaf == LeafStrategy::NaiveBayes;
    for (const auto& n : nodes_) {
      json j{{"leaf", n.leaf}, {"class_counts", n.class_counts}};
      if (!n.leaf) {
        j["attribute"] = n.attribute;
        j["numeric"] = n.numeric_split;
        j["threshold"] = n.threshold;
        j["children"] = n.children;
      } else if (nb) {
        j["observed"] = n.observed;
        json obs = json::array();
        for (const auto& o : n.observers) {
          if (!o.gauss.empty()) {
            json gs = json::array();
            for (const auto& g : o.gauss)
              gs.push_back(g.n > 0 ? json{g.n, g.mean, g.m2, g.min, g.max} : json(nullptr));
            obs.push_back({{"gauss", gs}});
          } else {
            obs.push_back({{"counts", o.counts}});
          }
        }
        j["observers"] = obs;
      }
      nodes.push_back(std::move(j));
    }
    return {{"nodes", nodes}};
  }

  static LearnerPtr from_state(LearnerSpec spec, std::vector<Attribute> features, Attribute target, const json& state) {
    auto tree = std::make_shared<HoeffdingTree>(std::move(spec), std::move(features), std::move(target));
    tree->nodes_.clear();
    for (const auto& j : state.at("nodes")) {
      Node n;
      n.leaf = j.at("leaf").get<bool>();
      n.class_counts = j.at("class_counts").get<std::vector<double>>();
      if (!n.leaf) {
        n.attribute = j.at("attribute").get<std::size_t>();
        n.numeric_split = j.at("numeric").get<bool>();
        n.threshold = j.at("threshold").get<double>();
        n.children = j.at("children").get<std::vector<std::size_t>>();
      } else if (j.contains("observers")) {
        n.observed = j.at("observed").get<std::vector<double>>();
        for (const auto& o : j.at("observers")) {
          AttributeObserver ob;
          if (o.contains("gauss")) {
            for (const auto& g : o.at("gauss")) {
              GaussianEstimator e;
              if (!g.is_null())
                e = {g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>(), g.at(3).get<double>(),
                     g.at(4).get<double>()};
              ob.gauss.push_back(e);
            }
          } else {
            ob.counts = o.at("counts").get<std::vector<double>>();
          }
          n.observers.push_back(std::move(ob));
        }
      }
      tree->nodes_.push_back(std::move(n));
    }
    return tree;
  }

 protected:
  std::vector<double> distribution(std::span<const Cell> row) const override {
    std::size_t id = 0;
    std::vector<double> fallback = nodes_[0].class_counts;
    while (!nodes_[id].leaf) {
      if (total(nodes_[id].class_counts) > 0) fallback = nodes_[id].class_counts;
      id = child_for(nodes_[id], row);
    }
    const Node& leaf = nodes_[id];
    if (params_.leaf == LeafStrategy::NaiveBayes && !leaf.observers.empty() && total(leaf.observed) > 0)
      return naive_bayes(leaf, row);
    auto dist = total(leaf.class_counts) > 0 ? leaf.class_counts : fallback;
    normalize(dist);
    return dist;
  }

 private:
  static double total(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }

  Node make_leaf(std::vector<double> counts) const {
    Node n;
    n.class_counts = std::move(counts);
    n.observed.assign(class_count(), 0.0);
    return n;
  }

  std::size_t depth_of(std::size_t id) const {
    if (nodes_[id].leaf) return 0;
    std::size_t d = 0;
    for (auto c : nodes_[id].children) d = std::max(d, depth_of(c));
    return d + 1;
  }

  /// Child for a row; Missing (or an unknown category) takes the heaviest branch.
  std::size_t child_for(const Node& node, std::span<const Cell> row) const {
    const auto& cell = row[node.attribute];
    if (!cell.is_missing()) {
      if (node.numeric_split) return node.children[cell.number() <= node.threshold ? 0 : 1];
      if (cell.category() < node.children.size()) return node.children[cell.category()];
    }
    std::size_t best = node.children[0];
    double best_w = -1;
    for (auto c : node.children) {
      double w = total(nodes_[c].class_counts);
      if (w > best_w) {
        best_w = w;
        best = c;
      }
    }
    return best;
  }

  std::size_t route(std::span<const Cell> row) const {
    std::size_t id = 0;
    while (!nodes_[id].leaf) id = child_for(nodes_[id], row);
    return id;
  }

  void observe(Node& leaf, std::span<const Cell> row, std::size_t cls) const {
    const auto C = class_count();
    if (leaf.observers.empty()) {
      leaf.observers.resize(features().size());
      for (std::size_t f = 0; f < features().size(); ++f) {
        if (features()[f].is_nominal())
          leaf.observers[f].counts.assign(features()[f].categories.size() * C, 0.0);
        else
          leaf.observers[f].gauss.resize(C);
      }
    }
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (row[f].is_missing()) continue;
      if (features()[f].is_nominal())
        leaf.observers[f].counts[row[f].category() * C + cls] += 1;
      else
        leaf.observers[f].gauss[cls].add(row[f].number());
    }
  }

  struct Candidate {
    double merit = 0;
    std::size_t attribute = 0;
    bool numeric = false;
    double threshold = 0;
    std::vector<std::vector<double>> branches;
    bool null_split = true;
  };

  static double info_gain(double pre_entropy, const std::vector<std::vector<double>>& branches) {
    double W = 0;
    std::vector<double> weights;
    for (const auto& b : branches) weights.push_back(total(b)), W += weights.back();
    if (W <= 0) return -INFINITY;
    int big = 0;
    for (double w : weights)
      if (w / W >= kMinBranchFraction) ++big;
    if (big < 2) return -INFINITY;
    double post = 0;
    for (std::size_t b = 0; b < branches.size(); ++b) post += weights[b] / W * entropy(branches[b]);
    return pre_entropy - post;
  }

  /// Thresholds at the 1/11 .. 10/11 quantiles of the per-class Gaussian mixture.
  static std::vector<double> numeric_candidates(const std::vector<GaussianEstimator>& gauss) {
    double lo = INFINITY, hi = -INFINITY, n = 0;
    for (const auto& g : gauss)
      if (g.n > 0) lo = std::min(lo, g.min), hi = std::max(hi, g.max), n += g.n;
    std::vector<double> out;
    if (!(lo < hi)) return out;
    auto cdf = [&](double t) {
      double s = 0;
      for (const auto& g : gauss) s += g.weight_at_or_below(t);
      return s / n;
    };
    for (std::size_t i = 1; i <= kNumericCandidates; ++i) {
      const double q = static_cast<double>(i) / static_cast<double>(kNumericCandidates + 1);
      double a = lo, b = hi;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (a + b);
        if (cdf(mid) < q) a = mid;
        else b = mid;
      }
      if (b < hi && (out.empty() || b != out.back())) out.push_back(b);
    }
    return out;
  }

  void attempt_split(std::size_t id) {
    const auto C = class_count();
    {
      const Node& leaf = nodes_[id];
      int present = 0;
      for (double c : leaf.observed) present += c > 0 ? 1 : 0;
      if (present < 2) return;
    }
    const Node& leaf = nodes_[id];
    const double pre = entropy(leaf.observed);

    std::vector<Candidate> cands;
    cands.push_back(Candidate{});  // null split, merit 0
    for (std::size_t f = 0; f < features().size(); ++f) {
      const auto& ob = leaf.observers[f];
      if (features()[f].is_nominal()) {
        const auto V = features()[f].categories.size();
        Candidate c;
        c.attribute = f;
        c.null_split = false;
        c.branches.assign(V, std::vector<double>(C, 0.0));
        for (std::size_t v = 0; v < V; ++v)
          for (std::size_t k = 0; k < C; ++k) c.branches[v][k] = ob.counts[v * C + k];
        c.merit = info_gain(pre, c.branches);
        if (std::isfinite(c.merit)) cands.push_back(std::move(c));
      } else {
        Candidate best;
        best.merit = -INFINITY;
        for (double t : numeric_candidates(ob.gauss)) {
          std::vector<std::vector<double>> br(2, std::vector<double>(C, 0.0));
          for (std::size_t k = 0; k < C; ++k) {
            br[0][k] = ob.gauss[k].weight_at_or_below(t);
            br[1][k] = ob.gauss[k].n - br[0][k];
          }
          double m = info_gain(pre, br);
          if (m > best.merit) {
            best = Candidate{m, f, true, t, std::move(br), false};
          }
        }
        if (std::isfinite(best.merit)) cands.push_back(std::move(best));
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.merit > b.merit; });
    if (cands.size() < 2) return;
    const auto& best = cands[0];
    const auto& second = cands[1];
    if (best.null_split || !(best.merit > 0)) return;
    const double range = std::log2(static_cast<double>(std::max<std::size_t>(C, 2)));
    const double eps = hoeffding_bound(range, params_.delta, leaf.seen);
    if (!(best.merit - second.merit > eps || eps < params_.tau)) return;

    Candidate chosen = best;
    std::vector<std::size_t> children;
    for (auto& b : chosen.branches) {
      children.push_back(nodes_.size());
      nodes_.push_back(make_leaf(std::move(b)));
    }
    Node& node = nodes_[id];
    node.leaf = false;
    node.attribute = chosen.attribute;
    node.numeric_split = chosen.numeric;
    node.threshold = chosen.threshold;
    node.children = std::move(children);
    node.observers.clear();
    node.observers.shrink_to_fit();
    node.observed.clear();
  }

  std::vector<double> naive_bayes(const Node& leaf, std::span<const Cell> row) const {
    const auto C = class_count();
    const double n = total(leaf.class_counts);
    std::vector<double> logp(C);
    for (std::size_t c = 0; c < C; ++c) logp[c] = std::log((leaf.class_counts[c] + 1.0) / (n + static_cast<double>(C)));
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (row[f].is_missing()) continue;
      const auto& ob = leaf.observers[f];
      if (features()[f].is_nominal()) {
        const auto V = features()[f].categories.size();
        for (std::size_t c = 0; c < C; ++c) {
          double tot = 0;
          for (std::size_t v = 0; v < V; ++v) tot += ob.counts[v * C + c];
          logp[c] += std::log((ob.counts[row[f].category() * C + c] + 1.0) / (tot + static_cast<double>(V)));
        }
      } else {
        bool all = true;
        for (const auto& g : ob.gauss) all = all && g.n > 0;
        if (!all) continue;
        for (std::size_t c = 0; c < C; ++c) {
          const auto& g = ob.gauss[c];
          const double var = std::max(g.variance(), 1e-6);
          const double d = row[f].number() - g.mean;
          logp[c] += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
        }
      }
    }
    return softmax_logs(logp);
  }

  HoeffdingParams params_;
  std::vector<Node> nodes_;
};

}  // namespace mll
