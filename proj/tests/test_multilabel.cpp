#include <gtest/gtest.h>

#include <set>

#include "mll/mll.hpp"
#include "synthetic.hpp"

namespace {

using mll::Transform;

std::vector<mll::LearnerSpec> bases() {
  return {{mll::ZeroRParams{}, 1},
          {mll::NaiveBayesParams{}, 1},
          {mll::KnnParams{3}, 1},
          {mll::HoeffdingParams{1e-7, 0.05, 30, mll::LeafStrategy::NaiveBayes}, 1},
          {mll::RipperParams{}, 1}};
}

mll::ModelSpec model_spec(Transform t, const mll::LearnerSpec& base) {
  mll::ModelSpec s;
  s.transform = t;
  s.base = base;
  return s;
}

/// Same data with the label columns reordered: new label j = old label perm[j].
mll::MultiLabelDataset permute_labels(const mll::MultiLabelDataset& ds, const std::vector<std::size_t>& perm) {
  const auto& s = ds.schema();
  const auto names = s.label_names();
  std::vector<std::string> labels;
  for (auto p : perm) labels.push_back(names[p]);
  std::vector<mll::Attribute> features;
  for (auto f : s.feature_indices()) features.push_back(s.attribute(f));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<double> r;
    for (auto p : perm) r.push_back(ds.label_bit(i, p) ? 1 : 0);
    for (auto f : s.feature_indices()) r.push_back(ds.instance(i).values[f].raw());
    rows.push_back(std::move(r));
  }
  return synth::table(labels, features, rows);
}

TEST(Ranking, ExampleAndTies) {
  const auto p = mll::make_prediction({0.9, 0.1, 0.6}, 0.5);
  EXPECT_EQ(p.ranking, (std::vector<std::size_t>{1, 3, 2}));
  EXPECT_EQ(p.bipartition, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(mll::rank_labels(std::vector<double>{0.5, 0.7, 0.5, 0.7}), (std::vector<std::size_t>{3, 1, 4, 2}));
  const auto clamped = mll::make_prediction({1.5, -0.2}, 0.5);
  EXPECT_EQ(clamped.confidences, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(mll::make_prediction({0.5}, 0.5).bipartition[0], 1);
}

TEST(ChainOrder, Resolve) {
  EXPECT_EQ(mll::ChainOrder::labels().resolve(3), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(mll::ChainOrder::explicit_order({2, 0, 1}).resolve(3), (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_THROW(mll::ChainOrder::explicit_order({0, 0, 1}).resolve(3), mll::ConfigError);
  EXPECT_THROW(mll::ChainOrder::explicit_order({0, 1}).resolve(3), mll::ConfigError);
  auto r = mll::ChainOrder::random(4).resolve(6);
  EXPECT_EQ(r, mll::ChainOrder::random(4).resolve(6));
  std::sort(r.begin(), r.end());
  EXPECT_EQ(r, mll::ChainOrder::labels().resolve(6));
}

TEST(Transforms, BinaryRelevanceViews) {
  auto ds = synth::small_random(20, 3, 2);
  auto views = mll::br_transform(ds);
  ASSERT_EQ(views.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(views[j].feature_count(), 4u);
    for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(views[j].target_of(i), ds.label_bit(i, j) ? 1u : 0u);
  }
}

TEST(Transforms, PredictionsAreWellFormed) {
  auto ds = synth::small_random(120, 4, 3);
  for (auto t : {Transform::BR, Transform::CC, Transform::BCC, Transform::LP})
    for (const auto& b : bases()) {
      auto model = mll::train_model(ds, model_spec(t, b));
      for (const auto& p : mll::predict_all(model, ds)) {
        ASSERT_EQ(p.confidences.size(), 4u);
        for (double c : p.confidences) {
          EXPECT_GE(c, 0.0);
          EXPECT_LE(c, 1.0);
        }
        auto r = p.ranking;
        std::sort(r.begin(), r.end());
        EXPECT_EQ(r, (std::vector<std::size_t>{1, 2, 3, 4})) << to_string(t) << '/' << b.name();
      }
    }
}

TEST(Transforms, BinaryRelevanceIsLabelPermutationEquivariant) {
  auto ds = synth::small_random(150, 4, 7);
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  auto permuted = permute_labels(ds, perm);
  for (const auto& b : bases()) {
    auto a = mll::predict_all(mll::train_model(ds, model_spec(Transform::BR, b)), ds);
    auto p = mll::predict_all(mll::train_model(permuted, model_spec(Transform::BR, b)), permuted);
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = 0; j < perm.size(); ++j) {
        EXPECT_EQ(p[i].confidences[j], a[i].confidences[perm[j]]) << b.name();
        EXPECT_EQ(p[i].bipartition[j], a[i].bipartition[perm[j]]) << b.name();
      }
  }
}

TEST(Transforms, SingleLabelChainsEqualBinaryRelevance) {
  auto ds = synth::small_random(150, 1, 9);
  for (const auto& b : bases()) {
    const auto br = mll::predict_all(mll::train_model(ds, model_spec(Transform::BR, b)), ds);
    for (auto t : {Transform::CC, Transform::BCC})
      EXPECT_EQ(mll::predict_all(mll::train_model(ds, model_spec(t, b)), ds), br) << to_string(t) << '/' << b.name();
  }
}

TEST(Transforms, LabelPowersetPredictsObservedLabelsets) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto ds = synth::small_random(80, 5, seed);
    auto [train, test] = mll::split(ds, 0.5, seed);
    std::set<std::vector<std::uint8_t>> seen;
    for (std::size_t i = 0; i < train.size(); ++i) seen.insert(train.label_bits(i));
    for (const auto& b : bases()) {
      auto model = mll::train_model(train, model_spec(Transform::LP, b));
      EXPECT_EQ(model.labelsets.size(), seen.size());
      for (const auto& p : mll::predict_all(model, test)) EXPECT_TRUE(seen.count(p.bipartition)) << b.name();
    }
  }
}

TEST(Transforms, LabelPowersetWithOneLabelset) {
  auto ds = synth::table({"a", "b"}, {mll::Attribute::numeric("x")}, {{1, 0, 0.1}, {1, 0, 0.7}, {1, 0, 0.3}});
  auto model = mll::train_model(ds, model_spec(Transform::LP, {mll::NaiveBayesParams{}, 1}));
  EXPECT_TRUE(model.learners.empty());
  for (const auto& p : mll::predict_all(model, ds)) {
    EXPECT_EQ(p.bipartition, (std::vector<std::uint8_t>{1, 0}));
    EXPECT_EQ(p.ranking, (std::vector<std::size_t>{1, 2}));
  }
}

TEST(Transforms, ZeroRBaselineIsTheSameUnderEveryChain) {
  auto ds = synth::small_random(200, 5, 4);
  const auto br = mll::predict_all(mll::train_model(ds, model_spec(Transform::BR, {})), ds);
  for (auto t : {Transform::CC, Transform::BCC}) EXPECT_EQ(mll::predict_all(mll::train_model(ds, model_spec(t, {})), ds), br);
  auto cc = model_spec(Transform::CC, {});
  cc.chain = mll::ChainOrder::random(3);
  EXPECT_EQ(mll::predict_all(mll::train_model(ds, cc), ds), br);
}

TEST(Transforms, ChainFeedsPredictedBitsForward) {
  // Label b copies label a; x determines a. CC with order (a, b) learns b from
  // a's bit, so b follows the predicted a at test time.
  std::vector<std::vector<double>> rows;
  mll::Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform();
    const double a = x > 0.5 ? 1 : 0;
    rows.push_back({a, a, x, rng.uniform()});
  }
  auto ds = synth::table({"a", "b"}, {mll::Attribute::numeric("x"), mll::Attribute::numeric("noise")}, rows);
  auto spec = model_spec(Transform::CC, {mll::RipperParams{}, 1});
  auto model = mll::train_model(ds, spec);
  EXPECT_EQ(model.learners[1]->features().size(), 3u);
  EXPECT_EQ(model.learners[1]->features().back().name, "a");
  for (const auto& p : mll::predict_all(model, ds)) EXPECT_EQ(p.bipartition[0], p.bipartition[1]);
}

TEST(DependencyTree, NmiFixtures) {
  // a == b exactly, c is the complement of a, d independent of a.
  auto ds = synth::table({"a", "b", "c", "d"}, {mll::Attribute::numeric("x")},
                         {{1, 1, 0, 1, 0}, {1, 1, 0, 0, 0}, {0, 0, 1, 1, 0}, {0, 0, 1, 0, 0}});
  EXPECT_DOUBLE_EQ(mll::normalized_mutual_information(ds, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(mll::normalized_mutual_information(ds, 0, 2), 1.0);
  EXPECT_NEAR(mll::normalized_mutual_information(ds, 0, 3), 0.0, 1e-15);
  auto constant = synth::table({"a", "b"}, {mll::Attribute::numeric("x")}, {{1, 0, 0}, {1, 1, 0}});
  EXPECT_EQ(mll::normalized_mutual_information(constant, 0, 1), 0.0);
}

TEST(DependencyTree, MaximumSpanningTreeRootedAtFirstLabel) {
  // Chain of dependence d - c - b - a through shared noise.
  mll::Rng rng(2);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 2000; ++i) {
    const double d = rng.below(2);
    const double c = rng.uniform() < 0.9 ? d : 1 - d;
    const double b = rng.uniform() < 0.85 ? c : 1 - c;
    const double a = rng.uniform() < 0.8 ? b : 1 - b;
    rows.push_back({a, b, c, d, 0});
  }
  auto ds = synth::table({"a", "b", "c", "d"}, {mll::Attribute::numeric("x")}, rows);
  const auto tree = mll::build_dependency_tree(ds);
  ASSERT_EQ(tree.edges.size(), 3u);
  EXPECT_EQ(tree.root, 0u);
  EXPECT_EQ(tree.order, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_FALSE(tree.parent[0]);
  EXPECT_EQ(*tree.parent[1], 0u);
  EXPECT_EQ(*tree.parent[2], 1u);
  EXPECT_EQ(*tree.parent[3], 2u);

  auto model = mll::train_model(ds, model_spec(Transform::BCC, {mll::NaiveBayesParams{}, 1}));
  EXPECT_EQ(model.learners[0]->features().size(), 1u);
  EXPECT_EQ(model.learners[3]->features().back().name, "c");

  auto single = synth::table({"a"}, {mll::Attribute::numeric("x")}, {{1, 0}});
  EXPECT_THROW(mll::build_dependency_tree(single), mll::ConfigError);
}

TEST(Training, ErrorsNameTheLabel) {
  auto ds = synth::small_random(4, 2, 1);
  try {
    mll::train_model(ds, model_spec(Transform::BR, {mll::KnnParams{10}, 1}));
    FAIL() << "expected a training error";
  } catch (const mll::TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("label 'L0'"), std::string::npos) << e.what();
  }
  auto empty = ds.subset(std::vector<std::size_t>{});
  EXPECT_THROW(mll::train_model(empty, model_spec(Transform::BR, {})), mll::TrainingError);
}

TEST(Training, SchemaMismatchOnPredict) {
  auto ds = synth::small_random(30, 2, 1);
  auto other = synth::small_random(30, 3, 1);
  auto model = mll::train_model(ds, model_spec(Transform::BR, {}));
  EXPECT_THROW(mll::predict_all(model, other), mll::SchemaMismatchError);
  EXPECT_THROW(mll::predict(model, other.instance(0)), mll::PredictionError);
}

TEST(Transforms, Names) {
  EXPECT_EQ(model_spec(Transform::CC, {mll::KnnParams{5}, 1}).name(), "CC/KNN(5)");
  EXPECT_EQ(mll::transform_from_string("BCC"), Transform::BCC);
  EXPECT_THROW(mll::transform_from_string("XX"), mll::ConfigError);
}

}  // namespace
