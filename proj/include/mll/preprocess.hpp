#pragma once

// Demographic-label preprocessing for the "Diabetes 130-US hospitals" table.

#include <algorithm>
#include <array>
#include <set>
#include <fstream>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "mll/dataset.hpp"

namespace mll {

struct DroppedColumn {
  std::string name;
  std::string reason;
  double missing_fraction = 0.0;
};

struct PreprocessReport {
  std::size_t rows_in = 0;
  std::size_t rows_dropped_missing_race = 0;
  std::size_t rows_dropped_invalid_gender = 0;
  std::size_t rows_out = 0;
  std::size_t attributes_out = 0;
  std::size_t labels_out = 0;
  std::vector<DroppedColumn> columns_dropped;
  std::vector<std::string> columns_imputed;

  // Published outcome of the original preprocessing, kept for comparison.
  static constexpr std::size_t reference_rows = 98054;
  static constexpr std::size_t reference_attributes = 45;
};

inline constexpr std::array<const char*, 5> kRaceLabels = {"Caucasian", "AfricanAmerican", "Hispanic", "Asian", "Other"};
inline constexpr std::array<const char*, 2> kGenderLabels = {"Male", "Female"};

/// Drops weight, payer_code, encounter_id and patient_nbr; fills missing
/// medical_specialty with "missing"; drops rows with missing race or a
/// gender other than Male/Female; replaces race and gender with seven
/// leading binary labels (five races, then Male, Female).
inline std::pair<MultiLabelDataset, PreprocessReport> preprocess_diabetes(const MultiLabelDataset& raw) {
  const auto& schema = raw.schema();
  auto require = [&](const char* name) {
    auto idx = schema.index_of(name);
    if (!idx) throw PreprocessError(std::string("required column '") + name + "' is absent");
    return *idx;
  };
  const auto race = require("race");
  const auto gender = require("gender");
  const auto weight = require("weight");
  const auto payer = require("payer_code");
  const auto specialty = require("medical_specialty");
  const auto encounter = require("encounter_id");
  const auto patient = require("patient_nbr");

  const auto& race_attr = schema.attribute(race);
  const auto& gender_attr = schema.attribute(gender);
  if (!race_attr.is_nominal()) throw PreprocessError("column 'race' must be nominal");
  if (!gender_attr.is_nominal()) throw PreprocessError("column 'gender' must be nominal");

  // race category index -> label position
  std::vector<int> race_map(race_attr.categories.size(), -1);
  for (std::size_t c = 0; c < race_attr.categories.size(); ++c) {
    for (std::size_t r = 0; r < kRaceLabels.size(); ++r)
      if (race_attr.categories[c] == kRaceLabels[r]) race_map[c] = static_cast<int>(r);
    if (race_map[c] < 0) throw PreprocessError("unrecognized race value '" + race_attr.categories[c] + "'");
  }
  std::vector<int> gender_map(gender_attr.categories.size(), -1);
  for (std::size_t c = 0; c < gender_attr.categories.size(); ++c)
    for (std::size_t g = 0; g < kGenderLabels.size(); ++g)
      if (gender_attr.categories[c] == kGenderLabels[g]) gender_map[c] = static_cast<int>(g);

  PreprocessReport report;
  report.rows_in = raw.size();

  auto missing_fraction = [&](std::size_t col) {
    if (raw.empty()) return 0.0;
    std::size_t miss = 0;
    for (const auto& inst : raw.instances()) miss += inst.values[col].is_missing() ? 1 : 0;
    return static_cast<double>(miss) / static_cast<double>(raw.size());
  };
  report.columns_dropped = {
      {"weight", "too sparse", missing_fraction(weight)},
      {"payer_code", "mostly missing and not relevant", missing_fraction(payer)},
      {"encounter_id", "identifier removed for de-identification", missing_fraction(encounter)},
      {"patient_nbr", "identifier removed for de-identification", missing_fraction(patient)},
  };

  // Output schema: 7 labels, then every kept feature in original order.
  std::vector<Attribute> attributes;
  for (auto* name : kRaceLabels) attributes.push_back(binary_label(name));
  for (auto* name : kGenderLabels) attributes.push_back(binary_label(name));
  std::vector<std::size_t> kept;
  std::size_t specialty_missing_category = 0;
  bool specialty_numeric = false;
  for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
    if (a == race || a == gender || a == weight || a == payer || a == encounter || a == patient) continue;
    auto attr = schema.attribute(a);
    for (std::size_t j = 0; j < 7; ++j)
      if (attributes[j].name == attr.name)
        throw PreprocessError("feature column '" + attr.name + "' collides with a label name");
    if (a == specialty) {
      if (attr.is_numeric()) {
        // Numeric-typed (e.g. all-missing) specialty is recoded as text categories.
        std::set<std::string> cats;
        for (const auto& inst : raw.instances())
          if (!inst.values[a].is_missing()) cats.insert(format_number(inst.values[a].number()));
        attr = Attribute::nominal(attr.name, std::vector<std::string>(cats.begin(), cats.end()));
        specialty_numeric = true;
      }
      auto idx = attr.category_index("missing");
      if (!idx) {
        attr.categories.push_back("missing");
        idx = attr.categories.size() - 1;
      }
      specialty_missing_category = *idx;
      report.columns_imputed.push_back(attr.name);
    }
    attributes.push_back(std::move(attr));
    kept.push_back(a);
  }

  std::vector<Instance> rows;
  rows.reserve(raw.size());
  for (const auto& inst : raw.instances()) {
    const auto& rc = inst.values[race];
    if (rc.is_missing()) {
      ++report.rows_dropped_missing_race;
      continue;
    }
    const auto& gc = inst.values[gender];
    if (gc.is_missing() || gender_map[gc.category()] < 0) {
      ++report.rows_dropped_invalid_gender;
      continue;
    }
    Instance out;
    out.row_id = inst.row_id;
    out.values.reserve(attributes.size());
    const int r = race_map[rc.category()];
    const int g = gender_map[gc.category()];
    for (int j = 0; j < 5; ++j) out.values.push_back(Cell::category(j == r ? 1 : 0));
    for (int j = 0; j < 2; ++j) out.values.push_back(Cell::category(j == g ? 1 : 0));
    for (std::size_t f = 0; f < kept.size(); ++f) {
      const auto a = kept[f];
      auto cell = inst.values[a];
      if (a == specialty) {
        if (cell.is_missing())
          cell = Cell::category(specialty_missing_category);
        else if (specialty_numeric)
          cell = Cell::category(*attributes[7 + f].category_index(format_number(cell.number())));
      }
      out.values.push_back(cell);
    }
    rows.push_back(std::move(out));
  }
  report.rows_out = rows.size();
  report.attributes_out = attributes.size();
  report.labels_out = 7;

  std::vector<std::size_t> labels = {0, 1, 2, 3, 4, 5, 6};
  MultiLabelDataset ds(raw.name(), AttributeSchema(std::move(attributes), std::move(labels)), std::move(rows));
  return {std::move(ds), std::move(report)};
}

/// Flat key=value rendering.
inline void write_report(std::ostream& out, const PreprocessReport& r) {
  out << "rows_in=" << r.rows_in << '\n'
      << "rows_dropped_missing_race=" << r.rows_dropped_missing_race << '\n'
      << "rows_dropped_invalid_gender=" << r.rows_dropped_invalid_gender << '\n'
      << "rows_out=" << r.rows_out << '\n'
      << "attributes_out=" << r.attributes_out << '\n'
      << "labels_out=" << r.labels_out << '\n'
      << "features_out=" << (r.attributes_out - r.labels_out) << '\n';
  for (const auto& c : r.columns_dropped) {
    out << "dropped." << c.name << ".reason=" << c.reason << '\n';
    out << "dropped." << c.name << ".missing_fraction=" << format_number(c.missing_fraction) << '\n';
  }
  for (const auto& c : r.columns_imputed) out << "imputed." << c << "=missing\n";
  out << "reference_rows=" << PreprocessReport::reference_rows << '\n'
      << "reference_attributes=" << PreprocessReport::reference_attributes << '\n';
}

}  // namespace mll
