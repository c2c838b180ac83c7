#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mll/dataset.hpp"

namespace mll {

namespace detail {

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_no) + ": unterminated quoted field");
  out.push_back(std::move(field));
  return out;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

/// Reads a header-first CSV. Columns named in `labels` become binary label
/// attributes (label j = labels[j]); the others are Numeric when every
/// non-missing cell parses as a number and Nominal (sorted categories)
/// otherwise. Cells equal to `missing_marker` become Missing.
inline MultiLabelDataset parse_csv(std::istream& in, const std::vector<std::string>& labels,
                                   const std::string& missing_marker = "?", std::string name = "dataset") {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.empty()) continue;
    header = detail::split_csv_line(line, line_no);
    break;
  }
  if (header.empty()) throw ParseError("empty CSV input");
  const std::size_t m = header.size();

  std::vector<std::vector<std::string>> raw;
  std::vector<std::size_t> raw_lines;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line, line_no);
    if (fields.size() != m)
      throw ParseError("row at line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                       " fields, header has " + std::to_string(m));
    raw.push_back(std::move(fields));
    raw_lines.push_back(line_no);
  }

  std::vector<std::size_t> label_indices;
  for (const auto& l : labels) {
    auto it = std::find(header.begin(), header.end(), l);
    if (it == header.end()) throw ConfigError("label column '" + l + "' not found in CSV header");
    label_indices.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<bool> is_label(m, false);
  for (auto i : label_indices) is_label[i] = true;

  std::vector<Attribute> attributes;
  attributes.reserve(m);
  for (std::size_t c = 0; c < m; ++c) {
    if (is_label[c]) {
      for (std::size_t r = 0; r < raw.size(); ++r) {
        const auto& v = raw[r][c];
        if (v != "0" && v != "1")
          throw ConfigError("label column '" + header[c] + "' has non-binary value '" + v + "' at line " +
                            std::to_string(raw_lines[r]));
      }
      attributes.push_back(binary_label(header[c]));
      continue;
    }
    bool numeric = true;
    bool any = false;
    std::set<std::string> cats;
    for (const auto& row : raw) {
      const auto& v = row[c];
      if (v == missing_marker) continue;
      any = true;
      if (numeric && !parse_number(v)) numeric = false;
      cats.insert(v);
    }
    // All-missing columns carry no categories, so they are typed Numeric.
    if (numeric || !any)
      attributes.push_back(Attribute::numeric(header[c]));
    else
      attributes.push_back(Attribute::nominal(header[c], std::vector<std::string>(cats.begin(), cats.end())));
  }

  std::vector<std::map<std::string, std::size_t, std::less<>>> lookup(m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t k = 0; k < attributes[c].categories.size(); ++k) lookup[c][attributes[c].categories[k]] = k;

  std::vector<Instance> instances;
  instances.reserve(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    Instance inst;
    inst.row_id = r;
    inst.values.reserve(m);
    for (std::size_t c = 0; c < m; ++c) {
      const auto& v = raw[r][c];
      if (!is_label[c] && v == missing_marker) {
        inst.values.push_back(Cell::missing());
      } else if (attributes[c].is_numeric()) {
        inst.values.push_back(Cell::number(*parse_number(v)));
      } else {
        inst.values.push_back(Cell::category(lookup[c].find(v)->second));
      }
    }
    instances.push_back(std::move(inst));
  }
  return MultiLabelDataset(std::move(name), AttributeSchema(std::move(attributes), std::move(label_indices)),
                           std::move(instances));
}

inline MultiLabelDataset read_csv_file(const std::string& path, const std::vector<std::string>& labels,
                                       const std::string& missing_marker = "?") {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  auto stem = path.substr(path.find_last_of("/\\") + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem.resize(dot);
  return parse_csv(in, labels, missing_marker, stem);
}

}  // namespace mll
