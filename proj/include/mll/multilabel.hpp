#pragma once

// Problem-transformation meta-learners: Binary Relevance, Classifier Chains,
// Bayesian (tree-structured) Classifier Chains and Label Powerset.

#include <algorithm>
#include <numeric>
#include <optional>
#include <tuple>

#include "mll/learners.hpp"
#include "mll/random.hpp"

namespace mll {

enum class Transform { BR, CC, BCC, LP };

inline std::string to_string(Transform t) {
  switch (t) {
    case Transform::BR: return "BR";
    case Transform::CC: return "CC";
    case Transform::BCC: return "BCC";
    case Transform::LP: return "LP";
  }
  return "?";
}

inline Transform transform_from_string(std::string_view s) {
  if (s == "BR") return Transform::BR;
  if (s == "CC") return Transform::CC;
  if (s == "BCC") return Transform::BCC;
  if (s == "LP") return Transform::LP;
  throw ConfigError("unknown transform '" + std::string(s) + "' (expected BR, CC, BCC or LP)");
}

/// Chain order for CC: label order, an explicit permutation, or a seeded shuffle.
struct ChainOrder {
  enum class Kind { Labels, Explicit, Random };
  Kind kind = Kind::Labels;
  std::vector<std::size_t> order;
  std::uint64_t seed = 1;

  static ChainOrder labels() { return {}; }
  static ChainOrder explicit_order(std::vector<std::size_t> o) { return {Kind::Explicit, std::move(o), 1}; }
  static ChainOrder random(std::uint64_t seed) { return {Kind::Random, {}, seed}; }

  std::vector<std::size_t> resolve(std::size_t k) const {
    std::vector<std::size_t> out;
    switch (kind) {
      case Kind::Labels:
        out.resize(k);
        std::iota(out.begin(), out.end(), std::size_t{0});
        break;
      case Kind::Explicit: {
        out = order;
        auto sorted = out;
        std::sort(sorted.begin(), sorted.end());
        bool ok = sorted.size() == k;
        for (std::size_t i = 0; ok && i < k; ++i) ok = sorted[i] == i;
        if (!ok) throw ConfigError("chain order is not a permutation of 0.." + std::to_string(k - 1));
        break;
      }
      case Kind::Random: out = Rng(seed).permutation(k); break;
    }
    return out;
  }

  friend bool operator==(const ChainOrder&, const ChainOrder&) = default;
};

/// Label dependence tree over the label columns.
struct DependencyTree {
  struct Edge {
    std::size_t a, b;
    double weight;
  };
  std::size_t root = 0;
  std::vector<Edge> edges;                          // k - 1 edges, a < b
  std::vector<std::optional<std::size_t>> parent;   // parent label after rooting
  std::vector<std::size_t> order;                   // breadth-first from the root
};

/// Normalized mutual information I(a;b) / sqrt(H(a) H(b)) of two binary
/// columns; 0 if either column is constant.
inline double normalized_mutual_information(const MultiLabelDataset& ds, std::size_t a, std::size_t b) {
  const double n = static_cast<double>(ds.size());
  if (n == 0) return 0.0;
  double joint[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < ds.size(); ++i) joint[ds.label_bit(i, a)][ds.label_bit(i, b)] += 1;
  const double pa[2] = {(joint[0][0] + joint[0][1]) / n, (joint[1][0] + joint[1][1]) / n};
  const double pb[2] = {(joint[0][0] + joint[1][0]) / n, (joint[0][1] + joint[1][1]) / n};
  auto h = [](const double* p) {
    double s = 0;
    for (int i = 0; i < 2; ++i)
      if (p[i] > 0) s -= p[i] * std::log(p[i]);
    return s;
  };
  const double ha = h(pa), hb = h(pb);
  if (ha <= 0 || hb <= 0) return 0.0;
  double mi = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double pxy = joint[x][y] / n;
      if (pxy > 0) mi += pxy * std::log(pxy / (pa[x] * pb[y]));
    }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

/// Maximum spanning tree over pairwise NMI (Kruskal; equal weights resolved
/// by ascending (a, b)), rooted at label 0.
inline DependencyTree build_dependency_tree(const MultiLabelDataset& ds) {
  const auto k = ds.label_count();
  if (k < 2) throw ConfigError("dependency tree needs at least two labels, got " + std::to_string(k));
  std::vector<DependencyTree::Edge> all;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) all.push_back({a, b, normalized_mutual_information(ds, a, b)});
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.weight > y.weight; });

  std::vector<std::size_t> uf(k);
  std::iota(uf.begin(), uf.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  DependencyTree tree;
  for (const auto& e : all) {
    auto ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    uf[ra] = rb;
    tree.edges.push_back(e);
    if (tree.edges.size() == k - 1) break;
  }

  std::vector<std::vector<std::size_t>> adj(k);
  for (const auto& e : tree.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& n : adj) std::sort(n.begin(), n.end());
  tree.parent.assign(k, std::nullopt);
  std::vector<bool> seen(k, false);
  tree.order.push_back(tree.root);
  seen[tree.root] = true;
  for (std::size_t head = 0; head < tree.order.size(); ++head) {
    const auto u = tree.order[head];
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        tree.parent[v] = u;
        tree.order.push_back(v);
      }
  }
  return tree;
}

/// Per-instance output: confidences, relevant-label bits and a ranking
/// where ranking[j] = 1 marks the top label.
struct MultiLabelPrediction {
  std::vector<double> confidences;
  std::vector<std::uint8_t> bipartition;
  std::vector<std::size_t> ranking;

  friend bool operator==(const MultiLabelPrediction&, const MultiLabelPrediction&) = default;
};

/// Ranks by descending confidence, equal confidences by ascending label index.
inline std::vector<std::size_t> rank_labels(std::span<const double> confidences) {
  std::vector<std::size_t> idx(confidences.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return confidences[a] > confidences[b]; });
  std::vector<std::size_t> rank(confidences.size());
  for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = r + 1;
  return rank;
}

inline MultiLabelPrediction make_prediction(std::vector<double> confidences, double threshold) {
  MultiLabelPrediction p;
  for (auto& c : confidences) c = std::clamp(c, 0.0, 1.0);
  p.bipartition.resize(confidences.size());
  for (std::size_t j = 0; j < confidences.size(); ++j) p.bipartition[j] = confidences[j] >= threshold ? 1 : 0;
  p.ranking = rank_labels(confidences);
  p.confidences = std::move(confidences);
  return p;
}

/// Fitted meta-learner.
struct MultiLabelModel {
  Transform kind = Transform::BR;
  AttributeSchema schema;                          // training schema
  double threshold = 0.5;
  std::vector<std::size_t> order;                  // BR/CC/BCC: training order of labels
  std::vector<std::optional<std::size_t>> parents; // BCC only
  std::vector<DependencyTree::Edge> tree_edges;    // BCC only, informational
  std::vector<std::vector<std::uint8_t>> labelsets; // LP: class index -> label bits
  std::vector<LearnerPtr> learners;                // BR/CC/BCC: one per label index; LP: at most one

  std::size_t label_count() const { return schema.label_count(); }
  std::vector<std::string> label_names() const { return schema.label_names(); }
};

struct ModelSpec {
  Transform transform = Transform::BR;
  LearnerSpec base;
  double threshold = 0.5;
  std::uint64_t seed = 1;
  ChainOrder chain;

  /// e.g. "CC/KNN(5)".
  std::string name() const { return to_string(transform) + "/" + base.name(); }

  void validate() const {
    if (!(threshold >= 0 && threshold <= 1)) throw ConfigError("threshold must lie in [0, 1]");
    base.validate();
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

namespace detail {

inline std::vector<Attribute> base_features(const AttributeSchema& s) {
  std::vector<Attribute> out;
  for (auto i : s.feature_indices()) out.push_back(s.attribute(i));
  return out;
}

/// Training view for label `target` with the given labels appended as
/// binary features (their true values).
inline SingleLabelView label_view(const MultiLabelDataset& ds, std::size_t target,
                                  const std::vector<std::size_t>& extra_labels) {
  const auto& s = ds.schema();
  auto features = base_features(s);
  const auto names = s.label_names();
  for (auto l : extra_labels) features.push_back(binary_label(names[l]));
  std::vector<Cell> cells;
  cells.reserve(ds.size() * features.size());
  std::vector<std::uint32_t> targets;
  targets.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& v = ds.instance(i).values;
    for (auto f : s.feature_indices()) cells.push_back(v[f]);
    for (auto l : extra_labels) cells.push_back(Cell::category(ds.label_bit(i, l) ? 1 : 0));
    targets.push_back(ds.label_bit(i, target) ? 1 : 0);
  }
  return SingleLabelView(std::move(features), binary_label(names[target]), std::move(cells), std::move(targets));
}

inline LearnerPtr train_for_label(const SingleLabelView& view, const LearnerSpec& spec, const std::string& label) {
  try {
    return train_learner(view, spec);
  } catch (const Error& e) {
    throw TrainingError("label '" + label + "': " + e.what());
  }
}

inline void require_nonempty(const MultiLabelDataset& ds) {
  if (ds.empty()) throw TrainingError("cannot train on an empty dataset");
  if (ds.label_count() == 0) throw ConfigError("dataset has no label columns");
}

}  // namespace detail

/// One view per label: target = that label, features = all non-label attributes.
inline std::vector<SingleLabelView> br_transform(const MultiLabelDataset& ds) {
  std::vector<SingleLabelView> out;
  for (std::size_t j = 0; j < ds.label_count(); ++j) out.push_back(detail::label_view(ds, j, {}));
  return out;
}

inline MultiLabelModel train_br(const MultiLabelDataset& ds, const LearnerSpec& spec) {
  detail::require_nonempty(ds);
  MultiLabelModel m;
  m.kind = Transform::BR;
  m.schema = ds.schema();
  m.order.resize(ds.label_count());
  std::iota(m.order.begin(), m.order.end(), std::size_t{0});
  const auto names = ds.schema().label_names();
  for (std::size_t j = 0; j < ds.label_count(); ++j)
    m.learners.push_back(detail::train_for_label(detail::label_view(ds, j, {}), spec, names[j]));
  return m;
}

/// Learner for order[j] sees the true values of order[0..j-1] during training.
inline MultiLabelModel train_cc(const MultiLabelDataset& ds, const LearnerSpec& spec,
                                const ChainOrder& chain = ChainOrder::labels()) {
  detail::require_nonempty(ds);
  MultiLabelModel m;
  m.kind = Transform::CC;
  m.schema = ds.schema();
  m.order = chain.resolve(ds.label_count());
  m.learners.resize(ds.label_count());
  const auto names = ds.schema().label_names();
  std::vector<std::size_t> prefix;
  for (auto l : m.order) {
    m.learners[l] = detail::train_for_label(detail::label_view(ds, l, prefix), spec, names[l]);
    prefix.push_back(l);
  }
  return m;
}

/// Learner for each label sees only its tree parent's value. One label
/// degenerates to BR.
inline MultiLabelModel train_bcc(const MultiLabelDataset& ds, const LearnerSpec& spec) {
  detail::require_nonempty(ds);
  MultiLabelModel m;
  m.kind = Transform::BCC;
  m.schema = ds.schema();
  const auto k = ds.label_count();
  if (k == 1) {
    m.order = {0};
    m.parents = {std::nullopt};
  } else {
    auto tree = build_dependency_tree(ds);
    m.order = tree.order;
    m.parents = tree.parent;
    m.tree_edges = tree.edges;
  }
  m.learners.resize(k);
  const auto names = ds.schema().label_names();
  for (auto l : m.order) {
    std::vector<std::size_t> extra;
    if (m.parents[l]) extra.push_back(*m.parents[l]);
    m.learners[l] = detail::train_for_label(detail::label_view(ds, l, extra), spec, names[l]);
  }
  return m;
}

inline std::string labelset_key(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

/// Each distinct training labelset becomes one class (ordered by bit string).
inline MultiLabelModel train_lp(const MultiLabelDataset& ds, const LearnerSpec& spec) {
  detail::require_nonempty(ds);
  MultiLabelModel m;
  m.kind = Transform::LP;
  m.schema = ds.schema();
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < ds.size(); ++i) keys.push_back(labelset_key(ds.label_bits(i)));
  std::vector<std::string> classes = keys;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  for (const auto& c : classes) {
    std::vector<std::uint8_t> bits;
    for (char ch : c) bits.push_back(ch == '1' ? 1 : 0);
    m.labelsets.push_back(std::move(bits));
  }
  if (classes.size() == 1) return m;  // constant labelset: nothing to learn

  const auto& s = ds.schema();
  auto features = detail::base_features(s);
  std::vector<Cell> cells;
  cells.reserve(ds.size() * features.size());
  std::vector<std::uint32_t> targets;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (auto f : s.feature_indices()) cells.push_back(ds.instance(i).values[f]);
    targets.push_back(static_cast<std::uint32_t>(std::lower_bound(classes.begin(), classes.end(), keys[i]) - classes.begin()));
  }
  SingleLabelView view(std::move(features), Attribute::nominal("labelset", classes), std::move(cells), std::move(targets));
  m.learners.push_back(detail::train_for_label(view, spec, "labelset"));
  return m;
}

inline MultiLabelModel train_model(const MultiLabelDataset& ds, const ModelSpec& spec) {
  spec.validate();
  LearnerSpec base = spec.base;
  base.seed = spec.seed;
  MultiLabelModel m;
  switch (spec.transform) {
    case Transform::BR: m = train_br(ds, base); break;
    case Transform::CC: m = train_cc(ds, base, spec.chain); break;
    case Transform::BCC: m = train_bcc(ds, base); break;
    case Transform::LP: m = train_lp(ds, base); break;
  }
  m.threshold = spec.threshold;
  return m;
}

/// Prediction for one full instance row (labels included; they are ignored).
/// LP returns the most probable training labelset as its bipartition.
inline MultiLabelPrediction predict(const MultiLabelModel& model, std::span<const Cell> values, double threshold) {
  const auto& s = model.schema;
  if (values.size() != s.attribute_count())
    throw PredictionError("instance has " + std::to_string(values.size()) + " values, model schema has " +
                          std::to_string(s.attribute_count()));
  std::vector<Cell> base;
  base.reserve(s.feature_indices().size() + 1);
  for (auto f : s.feature_indices()) base.push_back(values[f]);
  const auto k = s.label_count();

  if (model.kind == Transform::LP) {
    std::vector<double> conf(k, 0.0);
    if (model.learners.empty()) {
      for (std::size_t j = 0; j < k; ++j) conf[j] = model.labelsets[0][j];
      auto p = make_prediction(conf, threshold);
      p.bipartition = model.labelsets[0];
      return p;
    }
    const auto dist = model.learners[0]->predict_distribution(base);
    for (std::size_t c = 0; c < dist.size(); ++c)
      for (std::size_t j = 0; j < k; ++j)
        if (model.labelsets[c][j]) conf[j] += dist[c];
    auto p = make_prediction(std::move(conf), threshold);
    p.bipartition = model.labelsets[argmax(dist)];
    return p;
  }

  std::vector<double> conf(k, 0.0);
  std::vector<std::uint8_t> bits(k, 0);
  const auto nbase = base.size();
  std::vector<std::size_t> prefix;
  for (auto l : model.order) {
    base.resize(nbase);
    if (model.kind == Transform::CC)
      for (auto e : prefix) base.push_back(Cell::category(bits[e]));
    else if (model.kind == Transform::BCC && model.parents[l])
      base.push_back(Cell::category(bits[*model.parents[l]]));
    conf[l] = model.learners[l]->predict_distribution(base)[1];
    bits[l] = conf[l] >= threshold ? 1 : 0;
    prefix.push_back(l);
  }
  return make_prediction(std::move(conf), threshold);
}

inline MultiLabelPrediction predict(const MultiLabelModel& model, const Instance& instance) {
  return predict(model, instance.values, model.threshold);
}

inline MultiLabelPrediction predict(const MultiLabelModel& model, const Instance& instance, double threshold) {
  return predict(model, instance.values, threshold);
}

/// Predictions for every row; the dataset must share the model's schema.
inline std::vector<MultiLabelPrediction> predict_all(const MultiLabelModel& model, const MultiLabelDataset& ds) {
  if (ds.schema().fingerprint() != model.schema.fingerprint() || !(ds.schema() == model.schema))
    throw SchemaMismatchError("dataset schema does not match the model's training schema");
  std::vector<MultiLabelPrediction> out;
  out.reserve(ds.size());
  for (const auto& inst : ds.instances()) out.push_back(predict(model, inst));
  return out;
}

}  // namespace mll
