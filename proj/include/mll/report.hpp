#pragma once

// Result files: TSV (one row per grid cell), aligned plain-text tables, and
// flat key=value metric blocks.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "mll/eval.hpp"

namespace mll {

/// Untyped TSV contents: header plus string cells.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    return std::nullopt;
  }

  const std::string& at(std::size_t row, std::string_view name) const {
    auto c = column(name);
    if (!c) throw ParseError("result table has no column '" + std::string(name) + "'");
    return rows.at(row).at(*c);
  }

  /// Label names, from the "acc:<label>" columns.
  std::vector<std::string> label_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns)
      if (c.starts_with("acc:") && !c.ends_with("_std")) out.push_back(c.substr(4));
    return out;
  }
};

namespace detail {

inline std::string tsv_number(double v) { return std::isnan(v) ? "nan" : format_number(v); }

inline std::string tsv_text(std::string s) {
  for (auto& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace detail

inline std::vector<std::string> result_columns(const std::vector<std::string>& label_names) {
  std::vector<std::string> cols = {"cell", "sample_size", "sampling", "model", "transform", "learner", "evaluation",
                                   "status", "error"};
  for (const auto& f : kMetricFields) {
    cols.emplace_back(f.name);
    cols.push_back(std::string(f.name) + "_std");
  }
  for (const auto& l : label_names) {
    cols.push_back("acc:" + l);
    cols.push_back("acc:" + l + "_std");
  }
  return cols;
}

inline std::vector<std::string> result_row(const GridRow& r, std::size_t label_count) {
  using detail::tsv_number;
  std::vector<std::string> row = {std::to_string(r.cell),
                                  std::to_string(r.sample.size),
                                  r.sample.name(),
                                  r.model.name(),
                                  to_string(r.model.transform),
                                  r.model.base.name(),
                                  r.method.name(),
                                  r.ok ? "ok" : "failed",
                                  detail::tsv_text(r.error)};
  for (std::size_t f = 0; f < kMetricFields.size(); ++f) {
    if (!r.ok) {
      row.insert(row.end(), {"", ""});
      continue;
    }
    row.push_back(tsv_number(r.report.*(kMetricFields[f].member)));
    row.push_back(r.aggregate ? tsv_number(r.aggregate->fields[f].std) : "");
  }
  for (std::size_t j = 0; j < label_count; ++j) {
    if (!r.ok) {
      row.insert(row.end(), {"", ""});
      continue;
    }
    row.push_back(tsv_number(r.report.per_label_accuracy.at(j)));
    row.push_back(r.aggregate ? tsv_number(r.aggregate->per_label_accuracy.at(j).std) : "");
  }
  return row;
}

inline void write_tsv_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "\t" : "") << cells[i];
  out << '\n';
}

inline ResultTable read_tsv(std::istream& in) {
  ResultTable t;
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      auto tab = s.find('\t', start);
      out.push_back(s.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.columns.empty()) {
      t.columns = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.columns.size())
      throw ParseError("line " + std::to_string(line_no) + ": " + std::to_string(cells.size()) + " fields, expected " +
                       std::to_string(t.columns.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.columns.empty()) throw ParseError("empty results file");
  for (const char* required : {"sample_size", "sampling", "model", "evaluation", "status", "accuracy"})
    if (!t.column(required)) throw ParseError(std::string("results file lacks column '") + required + "'");
  return t;
}

namespace detail {

inline std::string fixed3(const std::string& v) {
  if (v.empty()) return "";
  if (v == "nan") return "n/a";
  auto d = parse_number(v);
  if (!d) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *d);
  return buf;
}

/// "0.533 +/- 0.027", or just the mean when there is no spread column value.
inline std::string cell_text(const ResultTable& t, std::size_t row, const std::string& metric) {
  if (t.at(row, "status") != "ok") return "FAILED";
  auto mean = fixed3(t.at(row, metric));
  auto sd = t.column(metric + "_std") ? fixed3(t.at(row, metric + "_std")) : "";
  return sd.empty() || mean == "n/a" ? mean : mean + " +/- " + sd;
}

inline void write_aligned(std::ostream& out, const std::vector<std::vector<std::string>>& grid) {
  std::vector<std::size_t> width;
  for (const auto& r : grid)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  for (const auto& r : grid) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
    }
    out << line << '\n';
  }
}

template <typename T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace detail

/// Three table families: overall accuracy per evaluation method, per-label
/// accuracies per (sample, method), and the remaining measures per method.
inline void write_text_tables(std::ostream& out, const ResultTable& t) {
  using detail::cell_text;
  using detail::push_unique;
  using Key = std::pair<std::string, std::string>;  // (sample_size, sampling)
  std::vector<Key> samples;
  std::vector<std::string> methods, models;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    push_unique(samples, Key{t.at(r, "sample_size"), t.at(r, "sampling")});
    push_unique(methods, t.at(r, "evaluation"));
    push_unique(models, t.at(r, "model"));
  }
  auto find_row = [&](const Key& s, const std::string& model, const std::string& method) -> std::optional<std::size_t> {
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      if (t.at(r, "sample_size") == s.first && t.at(r, "sampling") == s.second && t.at(r, "model") == model &&
          t.at(r, "evaluation") == method)
        return r;
    return std::nullopt;
  };
  auto title = [](const Key& s) { return s.first + " samples (" + s.second + ")"; };
  const auto labels = t.label_names();
  bool first_block = true;
  auto heading = [&](const std::string& text) {
    if (!first_block) out << '\n';
    first_block = false;
    out << "== " << text << " ==\n";
  };

  for (const auto& s : samples) {
    heading("Overall accuracy, " + title(s));
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> head = {"Model"};
    head.insert(head.end(), methods.begin(), methods.end());
    grid.push_back(head);
    for (const auto& m : models) {
      std::vector<std::string> line = {m};
      bool any = false;
      for (const auto& e : methods) {
        auto r = find_row(s, m, e);
        line.push_back(r ? cell_text(t, *r, "accuracy") : "");
        any = any || r.has_value();
      }
      if (any) grid.push_back(line);
    }
    detail::write_aligned(out, grid);
  }

  for (const auto& s : samples)
    for (const auto& e : methods) {
      std::vector<std::vector<std::string>> grid;
      std::vector<std::string> head = {"Model", "Overall"};
      for (std::size_t j = 0; j < labels.size(); ++j) head.push_back(std::to_string(j + 1) + ":" + labels[j]);
      grid.push_back(head);
      for (const auto& m : models) {
        auto r = find_row(s, m, e);
        if (!r) continue;
        std::vector<std::string> line = {m, cell_text(t, *r, "accuracy")};
        for (const auto& l : labels) line.push_back(cell_text(t, *r, "acc:" + l));
        grid.push_back(line);
      }
      if (grid.size() == 1) continue;
      heading("Accuracies, " + title(s) + ", " + e);
      detail::write_aligned(out, grid);
    }

  const std::vector<std::pair<std::string, std::string>> measures = {
      {"exact_match", "Exact Match"},       {"hamming_score", "Hamming Score"}, {"harmonic_score", "Harmonic Score"},
      {"f1_micro", "F1 Micro Average"},     {"ranking_loss", "Rank Loss"},      {"one_error", "One Error"},
      {"hamming_loss", "Hamming Loss"},     {"zero_one_loss", "Zero One Loss"}};
  for (const auto& e : methods) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> head = {"Model"};
    for (const auto& [key, label] : measures) head.push_back(label);
    grid.push_back(head);
    for (const auto& s : samples)
      for (const auto& m : models) {
        auto r = find_row(s, m, e);
        if (!r) continue;
        std::vector<std::string> line = {m + " / " + s.first};
        for (const auto& [key, label] : measures) line.push_back(cell_text(t, *r, key));
        grid.push_back(line);
      }
    if (grid.size() == 1) continue;
    heading("Performance measures, " + e);
    detail::write_aligned(out, grid);
  }
}

/// Flat key=value block for one report.
inline void write_metric_report(std::ostream& out, const MetricReport& r, const std::vector<std::string>& label_names) {
  for (const auto& f : kMetricFields) out << f.name << '=' << detail::tsv_number(r.*(f.member)) << '\n';
  for (std::size_t j = 0; j < r.per_label_accuracy.size(); ++j)
    out << "acc." << (j < label_names.size() ? label_names[j] : std::to_string(j)) << '='
        << detail::tsv_number(r.per_label_accuracy[j]) << '\n';
}

}  // namespace mll
