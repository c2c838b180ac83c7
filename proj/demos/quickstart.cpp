// Builds a small multi-label dataset in memory, trains a classifier chain of
// Naive Bayes models, and prints its 5-fold CV report and one prediction.

#include <cmath>
#include <iostream>

#include "mll/mll.hpp"

int main() {
  using mll::Attribute;

  mll::AttributeSchema schema({mll::binary_label("sunny"), mll::binary_label("warm"), Attribute::numeric("hour"),
                               Attribute::numeric("temperature"), Attribute::nominal("season", {"winter", "summer"})},
                              {0, 1});
  std::vector<mll::Instance> rows;
  mll::Rng rng(1);
  for (std::size_t i = 0; i < 400; ++i) {
    const double hour = std::floor(rng.uniform() * 24);
    const std::size_t summer = rng.uniform() < 0.5 ? 1 : 0;
    const double temp = 5 + 15 * summer + 8 * std::sin((hour - 6) / 24 * 6.283) + 3 * rng.uniform();
    const bool sunny = hour > 7 && hour < 19 && rng.uniform() < 0.8;
    const bool warm = temp > 16;
    rows.push_back({{mll::Cell::category(sunny), mll::Cell::category(warm), mll::Cell::number(hour),
                     mll::Cell::number(temp), mll::Cell::category(summer)},
                    i});
  }
  const mll::MultiLabelDataset ds("weather", schema, rows);

  mll::ModelSpec spec;
  spec.transform = mll::Transform::CC;
  spec.base = {mll::NaiveBayesParams{}, 1};

  const auto cv = mll::cross_validate(ds, spec, 5, 42);
  std::cout << spec.name() << ", 5-fold CV on " << ds.size() << " instances\n";
  for (std::size_t f = 0; f < mll::kMetricFields.size(); ++f)
    std::cout << "  " << mll::kMetricFields[f].name << " = " << cv.aggregate.fields[f].mean << " +- "
              << cv.aggregate.fields[f].std << '\n';

  const auto model = mll::train_model(ds, spec);
  const std::vector<mll::Cell> noon_in_summer = {mll::Cell::missing(), mll::Cell::missing(), mll::Cell::number(12),
                                                 mll::Cell::number(27), mll::Cell::category(1)};
  const auto p = mll::predict(model, noon_in_summer, model.threshold);
  std::cout << "noon in summer: sunny " << p.confidences[0] << ", warm " << p.confidences[1] << '\n';
}
