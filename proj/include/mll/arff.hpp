#pragma once

// ARFF reader/writer. Labels are the first k attributes; on output the
// relation name carries the "-C k" suffix used by multi-label ARFF tooling.

#include <cctype>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <unordered_map>

#include "mll/csv.hpp"
#include "mll/dataset.hpp"
#include "mll/log.hpp"

namespace mll {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Reads one token from `s` at `pos`: a quoted string ('..' or "..", with
/// backslash escapes) or a run up to whitespace / one of `stops`.
inline std::string next_token(std::string_view s, std::size_t& pos, std::string_view stops, std::size_t line_no) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  std::string out;
  if (pos < s.size() && (s[pos] == '\'' || s[pos] == '"')) {
    char q = s[pos++];
    while (pos < s.size() && s[pos] != q) {
      if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
      out.push_back(s[pos++]);
    }
    if (pos >= s.size()) throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
    ++pos;
    return out;
  }
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && stops.find(s[pos]) == std::string_view::npos)
    out.push_back(s[pos++]);
  return out;
}

/// Splits a comma-separated list honoring ARFF quoting. Returns (value, was_quoted).
inline std::vector<std::pair<std::string, bool>> split_arff_values(std::string_view s, std::size_t line_no) {
  std::vector<std::pair<std::string, bool>> out;
  std::size_t pos = 0;
  while (true) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    bool quoted = pos < s.size() && (s[pos] == '\'' || s[pos] == '"');
    std::string tok;
    if (quoted) {
      tok = next_token(s, pos, ",", line_no);
    } else {
      std::size_t start = pos;
      while (pos < s.size() && s[pos] != ',') ++pos;
      tok = std::string(trim(s.substr(start, pos - start)));
    }
    out.emplace_back(std::move(tok), quoted);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos >= s.size()) break;
    if (s[pos] != ',') throw ParseError("line " + std::to_string(line_no) + ": expected ','");
    ++pos;
  }
  return out;
}

inline std::string quote_arff(std::string_view v) {
  bool needs = v.empty() || v == "?";
  for (char c : v)
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '\'' || c == '"' || c == '{' || c == '}' ||
        c == '%' || c == '\\')
      needs = true;
  if (!needs) return std::string(v);
  std::string out = "'";
  for (char c : v) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

/// Splits a relation name into (base name, "-C k" value if present).
inline std::pair<std::string, std::optional<long>> split_relation(const std::string& relation) {
  static const std::regex option(R"(-C\s+(-?\d+))");
  std::smatch m;
  if (!std::regex_search(relation, m, option)) return {relation, std::nullopt};
  long k = std::stol(m[1].str());
  std::string base = relation;
  if (auto colon = relation.rfind(':', static_cast<std::size_t>(m.position(0))); colon != std::string::npos)
    base = relation.substr(0, colon);
  else
    base = relation.substr(0, static_cast<std::size_t>(m.position(0)));
  return {std::string(trim(base)), k};
}

struct ArffDocument {
  std::string relation;
  std::optional<long> relation_label_count;
  std::vector<Attribute> attributes;
  std::vector<Instance> instances;
};

inline ArffDocument read_arff_document(std::istream& in) {
  ArffDocument doc;
  std::string line;
  std::size_t line_no = 0;
  bool in_data = false;
  bool saw_relation = false;
  std::vector<std::unordered_map<std::string, std::size_t>> lookup;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    if (!in_data) {
      if (t.front() != '@') throw ParseError("line " + std::to_string(line_no) + ": expected a declaration");
      std::size_t pos = 0;
      auto keyword = lower(next_token(t, pos, "", line_no));
      if (keyword == "@relation") {
        auto rest = trim(t.substr(pos));
        std::size_t rpos = 0;
        std::string relation = (!rest.empty() && (rest.front() == '\'' || rest.front() == '"'))
                                   ? next_token(rest, rpos, "", line_no)
                                   : std::string(rest);
        auto [base, k] = split_relation(relation);
        doc.relation = base;
        doc.relation_label_count = k;
        saw_relation = true;
      } else if (keyword == "@attribute") {
        auto name = next_token(t, pos, "{", line_no);
        if (name.empty()) throw ParseError("line " + std::to_string(line_no) + ": attribute without a name");
        while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
        if (pos < t.size() && t[pos] == '{') {
          auto close = t.rfind('}');
          if (close == std::string_view::npos || close < pos)
            throw ParseError("line " + std::to_string(line_no) + ": unterminated nominal list");
          std::vector<std::string> cats;
          for (auto& [v, q] : split_arff_values(t.substr(pos + 1, close - pos - 1), line_no)) cats.push_back(v);
          doc.attributes.push_back(Attribute::nominal(std::move(name), std::move(cats)));
        } else {
          auto type = lower(next_token(t, pos, "", line_no));
          if (type == "numeric" || type == "real" || type == "integer")
            doc.attributes.push_back(Attribute::numeric(std::move(name)));
          else
            throw ParseError("line " + std::to_string(line_no) + ": unsupported attribute type '" + type + "'");
        }
      } else if (keyword == "@data") {
        if (!saw_relation) throw ParseError("missing @relation before @data");
        in_data = true;
        lookup.resize(doc.attributes.size());
        for (std::size_t a = 0; a < doc.attributes.size(); ++a)
          for (std::size_t c = 0; c < doc.attributes[a].categories.size(); ++c)
            lookup[a][doc.attributes[a].categories[c]] = c;
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": unknown declaration '" + keyword + "'");
      }
      continue;
    }
    if (t.front() == '{') throw ParseError("line " + std::to_string(line_no) + ": sparse ARFF rows are not supported");
    auto values = split_arff_values(t, line_no);
    if (values.size() != doc.attributes.size())
      throw ParseError("line " + std::to_string(line_no) + ": " + std::to_string(values.size()) + " values, expected " +
                       std::to_string(doc.attributes.size()));
    Instance inst;
    inst.row_id = doc.instances.size();
    inst.values.reserve(values.size());
    for (std::size_t a = 0; a < values.size(); ++a) {
      const auto& [v, quoted] = values[a];
      if (!quoted && v == "?") {
        inst.values.push_back(Cell::missing());
        continue;
      }
      if (doc.attributes[a].is_numeric()) {
        auto num = parse_number(v);
        if (!num) throw ParseError("line " + std::to_string(line_no) + ": '" + v + "' is not numeric");
        inst.values.push_back(Cell::number(*num));
      } else {
        auto it = lookup[a].find(v);
        if (it == lookup[a].end())
          throw ParseError("line " + std::to_string(line_no) + ": value '" + v + "' not declared for attribute '" +
                           doc.attributes[a].name + "'");
        inst.values.push_back(Cell::category(it->second));
      }
    }
    doc.instances.push_back(std::move(inst));
  }
  if (!saw_relation) throw ParseError("empty or invalid ARFF input");
  if (!in_data) throw ParseError("ARFF input has no @data section");
  return doc;
}

}  // namespace detail

/// Parses ARFF text whose first `label_count` attributes are binary labels.
inline MultiLabelDataset parse_arff(std::istream& in, std::size_t label_count) {
  if (label_count == 0) throw ConfigError("label_count must be at least 1");
  auto doc = detail::read_arff_document(in);
  if (doc.relation_label_count && *doc.relation_label_count != static_cast<long>(label_count))
    log::warn("relation '" + doc.relation + "' declares -C " + std::to_string(*doc.relation_label_count) +
              " but label_count is " + std::to_string(label_count) + "; using " + std::to_string(label_count));
  if (label_count > doc.attributes.size())
    throw ConfigError("label_count " + std::to_string(label_count) + " exceeds attribute count " +
                      std::to_string(doc.attributes.size()));
  std::vector<std::size_t> labels(label_count);
  for (std::size_t j = 0; j < label_count; ++j) {
    if (!is_binary_label_attribute(doc.attributes[j]))
      throw ConfigError("label attribute '" + doc.attributes[j].name + "' must be nominal {0,1}");
    labels[j] = j;
  }
  return MultiLabelDataset(doc.relation, AttributeSchema(std::move(doc.attributes), std::move(labels)),
                           std::move(doc.instances));
}

/// Parses ARFF using the relation's "-C k" suffix for the label count.
inline MultiLabelDataset parse_arff(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto text = buffer.str();
  std::istringstream probe(text);
  auto doc = detail::read_arff_document(probe);
  if (!doc.relation_label_count || *doc.relation_label_count <= 0)
    throw ConfigError("relation '" + doc.relation + "' has no positive -C suffix; label count required");
  std::istringstream again(text);
  return parse_arff(again, static_cast<std::size_t>(*doc.relation_label_count));
}

/// Writes labels first, then features, in schema order within each group.
inline void write_arff(std::ostream& out, const MultiLabelDataset& ds) {
  const auto& schema = ds.schema();
  std::vector<std::size_t> order = schema.label_indices();
  for (auto f : schema.feature_indices()) order.push_back(f);

  out << "@relation " << detail::quote_arff(ds.name() + ": -C " + std::to_string(schema.label_count())) << "\n\n";
  for (auto a : order) {
    const auto& attr = schema.attribute(a);
    out << "@attribute " << detail::quote_arff(attr.name) << ' ';
    if (attr.is_numeric()) {
      out << "numeric\n";
    } else {
      out << '{';
      for (std::size_t c = 0; c < attr.categories.size(); ++c) {
        if (c) out << ',';
        out << detail::quote_arff(attr.categories[c]);
      }
      out << "}\n";
    }
  }
  out << "\n@data\n";
  std::string row;
  for (const auto& inst : ds.instances()) {
    row.clear();
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i) row.push_back(',');
      const auto& cell = inst.values[order[i]];
      const auto& attr = schema.attribute(order[i]);
      if (cell.is_missing())
        row.push_back('?');
      else if (attr.is_numeric())
        row += format_number(cell.number());
      else
        row += detail::quote_arff(attr.categories[cell.category()]);
    }
    out << row << '\n';
  }
}

inline MultiLabelDataset read_arff_file(const std::string& path, std::optional<std::size_t> label_count = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return label_count ? parse_arff(in, *label_count) : parse_arff(in);
}

inline void write_arff_file(const std::string& path, const MultiLabelDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  write_arff(out, ds);
  if (!out) throw ParseError("error writing '" + path + "'");
}

}  // namespace mll
