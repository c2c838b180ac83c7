#pragma once

// Core tabular types: attributes, schemas, cells, instances, datasets.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mll/error.hpp"

namespace mll {

/// One table cell: a category index, a numeric value, or Missing.
/// Stored as a double; NaN encodes Missing.
class Cell {
 public:
  constexpr Cell() : value_(std::numeric_limits<double>::quiet_NaN()) {}

  static constexpr Cell missing() { return Cell(); }
  static constexpr Cell category(std::size_t index) { return Cell(static_cast<double>(index)); }
  static constexpr Cell number(double v) { return Cell(v); }

  bool is_missing() const { return std::isnan(value_); }
  std::size_t category() const { return static_cast<std::size_t>(value_); }
  double number() const { return value_; }
  double raw() const { return value_; }

  friend bool operator==(const Cell& a, const Cell& b) {
    return (a.is_missing() && b.is_missing()) || a.value_ == b.value_;
  }

 private:
  constexpr explicit Cell(double v) : value_(v) {}
  double value_;
};

struct Attribute {
  enum class Kind { Nominal, Numeric };

  std::string name;
  Kind kind = Kind::Numeric;
  std::vector<std::string> categories;  // nominal only

  static Attribute nominal(std::string name, std::vector<std::string> categories) {
    return Attribute{std::move(name), Kind::Nominal, std::move(categories)};
  }
  static Attribute numeric(std::string name) { return Attribute{std::move(name), Kind::Numeric, {}}; }

  bool is_nominal() const { return kind == Kind::Nominal; }
  bool is_numeric() const { return kind == Kind::Numeric; }

  std::optional<std::size_t> category_index(std::string_view value) const {
    auto it = std::find(categories.begin(), categories.end(), value);
    if (it == categories.end()) return std::nullopt;
    return static_cast<std::size_t>(it - categories.begin());
  }

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Binary label attribute {0, 1}.
inline Attribute binary_label(std::string name) { return Attribute::nominal(std::move(name), {"0", "1"}); }

inline bool is_binary_label_attribute(const Attribute& a) {
  if (!a.is_nominal() || a.categories.size() != 2) return false;
  return (a.categories[0] == "0" && a.categories[1] == "1") || (a.categories[0] == "1" && a.categories[1] == "0");
}

/// Ordered attributes plus the positions that hold labels.
class AttributeSchema {
 public:
  AttributeSchema() = default;

  AttributeSchema(std::vector<Attribute> attributes, std::vector<std::size_t> label_indices)
      : attributes_(std::move(attributes)), label_indices_(std::move(label_indices)) {
    validate();
    is_label_.assign(attributes_.size(), false);
    for (auto i : label_indices_) is_label_[i] = true;
    for (std::size_t i = 0; i < attributes_.size(); ++i)
      if (!is_label_[i]) feature_indices_.push_back(i);
    for (auto i : label_indices_) positive_category_.push_back(*attributes_[i].category_index("1"));
  }

  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(std::size_t i) const { return attributes_.at(i); }
  std::size_t attribute_count() const { return attributes_.size(); }

  const std::vector<std::size_t>& label_indices() const { return label_indices_; }
  std::size_t label_count() const { return label_indices_.size(); }
  const std::vector<std::size_t>& feature_indices() const { return feature_indices_; }
  bool is_label(std::size_t attribute_index) const { return is_label_.at(attribute_index); }

  /// Category index of "1" for label j.
  std::size_t positive_category(std::size_t label) const { return positive_category_.at(label); }

  std::vector<std::string> label_names() const {
    std::vector<std::string> out;
    for (auto i : label_indices_) out.push_back(attributes_[i].name);
    return out;
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
      if (attributes_[i].name == name) return i;
    return std::nullopt;
  }

  /// Stable 64-bit FNV-1a hash over names, kinds, categories and label positions.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::string_view s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
      }
      h ^= 0xff;
      h *= 1099511628211ull;
    };
    for (const auto& a : attributes_) {
      mix(a.name);
      mix(a.is_nominal() ? "nominal" : "numeric");
      for (const auto& c : a.categories) mix(c);
      mix("|");
    }
    for (auto i : label_indices_) mix(std::to_string(i));
    return h;
  }

  friend bool operator==(const AttributeSchema& a, const AttributeSchema& b) {
    return a.attributes_ == b.attributes_ && a.label_indices_ == b.label_indices_;
  }

 private:
  void validate() const {
    std::unordered_set<std::string> names;
    for (const auto& a : attributes_) {
      if (!names.insert(a.name).second) throw ConfigError("duplicate attribute name '" + a.name + "'");
      if (a.is_nominal()) {
        if (a.categories.empty()) throw ConfigError("nominal attribute '" + a.name + "' has no categories");
        std::unordered_set<std::string> cats(a.categories.begin(), a.categories.end());
        if (cats.size() != a.categories.size())
          throw ConfigError("nominal attribute '" + a.name + "' has duplicate categories");
      }
    }
    std::unordered_set<std::size_t> seen;
    for (auto i : label_indices_) {
      if (i >= attributes_.size()) throw ConfigError("label index " + std::to_string(i) + " out of range");
      if (!seen.insert(i).second) throw ConfigError("label index " + std::to_string(i) + " repeated");
      if (!is_binary_label_attribute(attributes_[i]))
        throw ConfigError("label attribute '" + attributes_[i].name + "' must be nominal {0,1}");
    }
  }

  std::vector<Attribute> attributes_;
  std::vector<std::size_t> label_indices_;
  std::vector<std::size_t> feature_indices_;
  std::vector<std::size_t> positive_category_;
  std::vector<bool> is_label_;
};

/// One row. row_id is the original position in the source file; it is used
/// for partition checks and never as a feature.
struct Instance {
  std::vector<Cell> values;
  std::size_t row_id = 0;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Immutable table of instances over a shared schema.
class MultiLabelDataset {
 public:
  MultiLabelDataset() : schema_(std::make_shared<AttributeSchema>()) {}

  MultiLabelDataset(std::string name, AttributeSchema schema, std::vector<Instance> instances)
      : MultiLabelDataset(std::move(name), std::make_shared<const AttributeSchema>(std::move(schema)),
                          std::move(instances)) {}

  MultiLabelDataset(std::string name, std::shared_ptr<const AttributeSchema> schema, std::vector<Instance> instances)
      : name_(std::move(name)), schema_(std::move(schema)), instances_(std::move(instances)) {
    const auto m = schema_->attribute_count();
    for (std::size_t r = 0; r < instances_.size(); ++r) {
      const auto& inst = instances_[r];
      if (inst.values.size() != m)
        throw ConfigError("instance " + std::to_string(r) + " has " + std::to_string(inst.values.size()) +
                          " values, schema has " + std::to_string(m));
      for (std::size_t a = 0; a < m; ++a) {
        const auto& cell = inst.values[a];
        const auto& attr = schema_->attribute(a);
        if (cell.is_missing()) {
          if (schema_->is_label(a)) throw ConfigError("label '" + attr.name + "' is missing in instance " + std::to_string(r));
          continue;
        }
        if (attr.is_nominal()) {
          double v = cell.raw();
          if (v < 0 || v != std::floor(v) || cell.category() >= attr.categories.size())
            throw ConfigError("invalid category for attribute '" + attr.name + "' in instance " + std::to_string(r));
        }
      }
    }
  }

  const std::string& name() const { return name_; }
  const AttributeSchema& schema() const { return *schema_; }
  const std::shared_ptr<const AttributeSchema>& schema_ptr() const { return schema_; }
  const std::vector<Instance>& instances() const { return instances_; }
  const Instance& instance(std::size_t i) const { return instances_.at(i); }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  std::size_t label_count() const { return schema_->label_count(); }

  bool label_bit(std::size_t row, std::size_t label) const {
    const auto& cell = instances_[row].values[schema_->label_indices()[label]];
    return cell.category() == schema_->positive_category(label);
  }

  /// Relevant label bits of one instance.
  std::vector<std::uint8_t> label_bits(std::size_t row) const {
    std::vector<std::uint8_t> out(label_count());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = label_bit(row, j) ? 1 : 0;
    return out;
  }

  /// New dataset holding the rows at the given positions, in that order.
  MultiLabelDataset subset(std::span<const std::size_t> positions) const {
    std::vector<Instance> rows;
    rows.reserve(positions.size());
    for (auto p : positions) rows.push_back(instances_.at(p));
    MultiLabelDataset out;
    out.name_ = name_;
    out.schema_ = schema_;
    out.instances_ = std::move(rows);
    return out;
  }

  /// Same rows sorted by row_id.
  MultiLabelDataset canonical() const {
    std::vector<std::size_t> order(instances_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return instances_[a].row_id < instances_[b].row_id; });
    return subset(order);
  }

 private:
  std::string name_;
  std::shared_ptr<const AttributeSchema> schema_;
  std::vector<Instance> instances_;
};

/// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Parses the whole string as a finite double.
inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace mll
