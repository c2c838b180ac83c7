#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "mll/mll.hpp"
#include "synthetic.hpp"

namespace {

using mll::Transform;

mll::ModelSpec model_spec(Transform t, mll::LearnerParams p) {
  mll::ModelSpec s;
  s.transform = t;
  s.base.params = p;
  return s;
}

void expect_partition(const std::vector<std::vector<std::size_t>>& folds, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& f : folds) {
    EXPECT_FALSE(f.empty());
    EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
    for (auto i : f) {
      ASSERT_LT(i, n);
      ++seen[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(seen[i], 1) << "index " << i;
}

TEST(Aggregate, MeanAndSampleStd) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto s = mll::aggregate(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(5.0 / 3.0));
  EXPECT_EQ(s.count, 4u);
  const std::vector<double> constant(7, 0.42);
  EXPECT_EQ(mll::aggregate(constant).std, 0.0);
  const std::vector<double> with_nan = {1, std::nan(""), 3};
  EXPECT_DOUBLE_EQ(mll::aggregate(with_nan).mean, 2.0);
  EXPECT_EQ(mll::aggregate(with_nan).count, 2u);
  const std::vector<double> none = {std::nan("")};
  EXPECT_TRUE(std::isnan(mll::aggregate(none).mean));
  const std::vector<double> one = {5};
  EXPECT_EQ(mll::aggregate(one).std, 0.0);
}

TEST(Folds, TenIntoThree) {
  const auto folds = mll::k_fold_indices(10, 3, 1);
  ASSERT_EQ(folds.size(), 3u);
  EXPECT_EQ(folds[0].size(), 4u);
  EXPECT_EQ(folds[1].size(), 3u);
  EXPECT_EQ(folds[2].size(), 3u);
  expect_partition(folds, 10);
}

TEST(Folds, PartitionForManyShapes) {
  for (std::size_t n = 2; n < 60; n += 3)
    for (std::size_t k = 2; k <= std::min<std::size_t>(n, 12); k += 2) {
      const auto folds = mll::k_fold_indices(n, k, n * 31 + k);
      expect_partition(folds, n);
      for (const auto& f : folds) EXPECT_LE(f.size(), n / k + 1);
    }
  EXPECT_EQ(mll::k_fold_indices(20, 4, 3), mll::k_fold_indices(20, 4, 3));
  EXPECT_NE(mll::k_fold_indices(20, 4, 3), mll::k_fold_indices(20, 4, 4));
  EXPECT_THROW(mll::k_fold_indices(5, 1, 1), mll::RangeError);
  EXPECT_THROW(mll::k_fold_indices(5, 6, 1), mll::RangeError);
}

TEST(Folds, StratifiedSpreadsEachLabelset) {
  auto ds = synth::small_random(97, 2, 8);
  const auto folds = mll::stratified_fold_indices(ds, 5, 2);
  expect_partition(folds, ds.size());
  std::map<std::string, std::size_t> total;
  for (std::size_t i = 0; i < ds.size(); ++i) ++total[mll::labelset_key(ds.label_bits(i))];
  for (const auto& f : folds) {
    std::map<std::string, std::size_t> in;
    for (auto i : f) ++in[mll::labelset_key(ds.label_bits(i))];
    for (const auto& [key, count] : total) {
      const double expect = static_cast<double>(count) / 5.0;
      EXPECT_LE(std::abs(static_cast<double>(in[key]) - expect), 1.0) << key;
    }
  }
}

TEST(CrossValidate, ReportsOneEntryPerFold) {
  auto ds = synth::small_random(60, 3, 2);
  const auto cv = mll::cross_validate(ds, model_spec(Transform::BR, mll::NaiveBayesParams{}), 5, 1);
  ASSERT_EQ(cv.per_fold.size(), 5u);
  expect_partition(cv.folds, ds.size());
  double sum = 0;
  for (const auto& r : cv.per_fold) sum += r.accuracy;
  EXPECT_NEAR(cv.aggregate.get("accuracy").mean, sum / 5, 1e-12);
  EXPECT_EQ(cv.aggregate.per_label_accuracy.size(), 3u);
  EXPECT_THROW(cv.aggregate.get("nope"), mll::ConfigError);
}

TEST(CrossValidate, ZeroRRowsMatchAcrossTransforms) {
  auto ds = synth::uci_like(400, 3);
  const auto br = mll::cross_validate(ds, model_spec(Transform::BR, mll::ZeroRParams{}), 10, 1);
  for (auto t : {Transform::CC, Transform::BCC}) {
    const auto other = mll::cross_validate(ds, model_spec(t, mll::ZeroRParams{}), 10, 1);
    for (std::size_t f = 0; f < br.per_fold.size(); ++f)
      for (const auto& m : mll::kMetricFields) {
        const double a = br.per_fold[f].*(m.member), b = other.per_fold[f].*(m.member);
        if (std::isnan(a)) EXPECT_TRUE(std::isnan(b));
        else EXPECT_EQ(a, b) << m.name;
      }
  }
}

TEST(CrossValidate, InvariantToInstanceOrderAfterCanonicalReindex) {
  auto ds = synth::small_random(80, 3, 6);
  auto shuffled = ds.subset(mll::Rng(44).permutation(ds.size()));
  for (auto p : {mll::LearnerParams{mll::ZeroRParams{}}, mll::LearnerParams{mll::NaiveBayesParams{}}}) {
    const auto spec = model_spec(Transform::BR, p);
    const auto a = mll::cross_validate(ds.canonical(), spec, 4, 9);
    const auto b = mll::cross_validate(shuffled.canonical(), spec, 4, 9);
    for (std::size_t f = 0; f < 4; ++f) EXPECT_EQ(a.per_fold[f].accuracy, b.per_fold[f].accuracy);
  }
}

TEST(CrossValidate, FoldFailuresNameTheFold) {
  auto ds = synth::small_random(12, 2, 1);
  try {
    mll::cross_validate(ds, model_spec(Transform::BR, mll::KnnParams{11}), 3, 1);
    FAIL();
  } catch (const mll::TrainingError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("fold 0: ", 0), 0u) << e.what();
  }
}

TEST(TrainTest, UsesTheSplit) {
  auto ds = synth::small_random(50, 2, 3);
  const auto r = mll::train_test_eval(ds, model_spec(Transform::BR, mll::ZeroRParams{}), 0.66, 1);
  EXPECT_EQ(r.per_label_accuracy.size(), 2u);
  auto [train, test] = mll::split(ds, 0.66, 1);
  auto model = mll::train_model(train, model_spec(Transform::BR, mll::ZeroRParams{}));
  EXPECT_EQ(mll::evaluate(model, test).accuracy, r.accuracy);
}

mll::GridSpec small_grid() {
  mll::GridSpec g;
  g.samples = {{120, mll::SampleStrategy::first()}, {100, mll::SampleStrategy::random(5)}};
  for (auto t : {Transform::BR, Transform::CC, Transform::BCC}) {
    g.models.push_back(model_spec(t, mll::ZeroRParams{}));
    g.models.push_back(model_spec(t, mll::NaiveBayesParams{}));
  }
  g.evaluations = {mll::EvalMethod::train_test(), mll::EvalMethod::k_fold(5)};
  return g;
}

TEST(Grid, RowsArriveInConfigOrderForAnyThreadCount) {
  auto ds = synth::uci_like(300, 1);
  const auto grid = small_grid();
  std::vector<std::size_t> order;
  const auto serial = mll::run_grid(ds, grid, [&](const mll::GridRow& r) { order.push_back(r.cell); }, 1);
  ASSERT_EQ(serial.size(), 2u * 6u * 2u);
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], i);
  const auto parallel = mll::run_grid(ds, grid, {}, 4);
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(parallel[i].cell, i);
    EXPECT_EQ(parallel[i].model.name(), serial[i].model.name());
    EXPECT_EQ(mll::result_row(parallel[i], 7), mll::result_row(serial[i], 7));
  }
  EXPECT_EQ(serial[0].sample.size, 120u);
  EXPECT_EQ(serial[0].method.kind, mll::EvalMethod::Kind::TrainTest);
  EXPECT_FALSE(serial[0].aggregate);
  EXPECT_TRUE(serial[1].aggregate);
}

TEST(Grid, ZeroRRowsIdenticalAcrossTransforms) {
  auto ds = synth::uci_like(300, 2);
  const auto rows = mll::run_grid(ds, small_grid(), {}, 2);
  auto find = [&](const std::string& model, std::size_t size, mll::EvalMethod::Kind kind) {
    for (const auto& r : rows)
      if (r.model.name() == model && r.sample.size == size && r.method.kind == kind) return r;
    throw std::runtime_error("missing row");
  };
  for (std::size_t size : {120u, 100u})
    for (auto kind : {mll::EvalMethod::Kind::TrainTest, mll::EvalMethod::Kind::KFold}) {
      auto br = mll::result_row(find("BR/ZeroR", size, kind), 7);
      for (const char* other : {"CC/ZeroR", "BCC/ZeroR"}) {
        auto row = mll::result_row(find(other, size, kind), 7);
        // Skip the cell/model/transform columns.
        for (std::size_t c = 6; c < row.size(); ++c) EXPECT_EQ(row[c], br[c]) << other << " column " << c;
      }
    }
}

TEST(Grid, FailedCellsDoNotAbort) {
  auto ds = synth::uci_like(60, 3);
  mll::GridSpec g;
  g.samples = {{60, mll::SampleStrategy::first()}, {1000, mll::SampleStrategy::first()}};
  g.models = {model_spec(Transform::BR, mll::ZeroRParams{}), model_spec(Transform::BR, mll::KnnParams{55})};
  g.evaluations = {mll::EvalMethod::k_fold(10)};
  const auto rows = mll::run_grid(ds, g, {}, 2);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(rows[0].ok);
  EXPECT_FALSE(rows[1].ok);
  EXPECT_NE(rows[1].error.find("KNN"), std::string::npos) << rows[1].error;
  EXPECT_FALSE(rows[2].ok);
  EXPECT_NE(rows[2].error.find("sample size"), std::string::npos) << rows[2].error;
  const auto cells = mll::result_row(rows[1], 7);
  EXPECT_EQ(cells[7], "failed");
}

TEST(Grid, Validation) {
  mll::GridSpec g;
  auto ds = synth::uci_like(20, 1);
  EXPECT_THROW(mll::run_grid(ds, g), mll::ConfigError);
  g = small_grid();
  g.evaluations.push_back(mll::EvalMethod::train_test(1.5));
  EXPECT_THROW(mll::run_grid(ds, g), mll::ConfigError);
}

TEST(Report, TsvRoundTripAndTables) {
  auto ds = synth::uci_like(200, 4);
  const auto rows = mll::run_grid(ds, small_grid(), {}, 2);
  const auto labels = ds.schema().label_names();
  std::ostringstream tsv;
  mll::write_tsv_line(tsv, mll::result_columns(labels));
  for (const auto& r : rows) mll::write_tsv_line(tsv, mll::result_row(r, labels.size()));
  std::istringstream in(tsv.str());
  const auto table = mll::read_tsv(in);
  EXPECT_EQ(table.rows.size(), rows.size());
  EXPECT_EQ(table.label_names(), labels);
  EXPECT_EQ(table.at(0, "model"), "BR/ZeroR");
  EXPECT_EQ(table.at(0, "accuracy_std"), "");
  EXPECT_NE(table.at(1, "accuracy_std"), "");
  EXPECT_EQ(*mll::parse_number(table.at(0, "accuracy")), rows[0].report.accuracy);

  std::ostringstream text;
  mll::write_text_tables(text, table);
  const auto s = text.str();
  EXPECT_NE(s.find("== Overall accuracy, 120 samples (first) =="), std::string::npos);
  EXPECT_NE(s.find("== Accuracies, 100 samples (random(5)), 5 Fold CV =="), std::string::npos);
  EXPECT_NE(s.find("== Performance measures, Test/Train Split =="), std::string::npos);
  EXPECT_NE(s.find(" +/- "), std::string::npos);
  EXPECT_NE(s.find("1:Caucasian"), std::string::npos);

  std::istringstream missing("model\tstatus\n");
  EXPECT_THROW(mll::read_tsv(missing), mll::ParseError);
  std::istringstream ragged(tsv.str() + "1\t2\n");
  EXPECT_THROW(mll::read_tsv(ragged), mll::ParseError);
}

}  // namespace
