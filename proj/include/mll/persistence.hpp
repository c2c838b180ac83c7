#pragma once

// Versioned JSON model files. Doubles are written in shortest round-trip
// form, so a reloaded model predicts bit-identically.

#include <fstream>
#include <iomanip>
#include <sstream>

#include "mll/multilabel.hpp"

namespace mll {

inline constexpr int kModelFormatVersion = 1;

inline std::string fingerprint_hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

inline json schema_to_json(const AttributeSchema& s) {
  json attrs = json::array();
  for (const auto& a : s.attributes()) attrs.push_back(attribute_to_json(a));
  return {{"attributes", attrs}, {"labels", s.label_indices()}};
}

inline AttributeSchema schema_from_json(const json& j) {
  std::vector<Attribute> attrs;
  for (const auto& a : j.at("attributes")) attrs.push_back(attribute_from_json(a));
  return AttributeSchema(std::move(attrs), j.at("labels").get<std::vector<std::size_t>>());
}

inline json model_to_json(const MultiLabelModel& m) {
  json learners = json::array();
  for (const auto& l : m.learners) learners.push_back(l ? learner_to_json(*l) : json(nullptr));
  json parents = json::array();
  for (const auto& p : m.parents) parents.push_back(p ? json(*p) : json(nullptr));
  json edges = json::array();
  for (const auto& e : m.tree_edges) edges.push_back({e.a, e.b, e.weight});
  return {{"format_version", kModelFormatVersion},
          {"schema_fingerprint", fingerprint_hex(m.schema.fingerprint())},
          {"schema", schema_to_json(m.schema)},
          {"model",
           {{"kind", to_string(m.kind)},
            {"label_names", m.label_names()},
            {"threshold", m.threshold},
            {"order", m.order},
            {"parents", parents},
            {"tree_edges", edges},
            {"labelsets", m.labelsets},
            {"learners", learners}}}};
}

inline MultiLabelModel model_from_json(const json& j) {
  try {
    const auto version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw ParseError("unsupported model format_version " + std::to_string(version));
    MultiLabelModel m;
    m.schema = schema_from_json(j.at("schema"));
    if (fingerprint_hex(m.schema.fingerprint()) != j.at("schema_fingerprint").get<std::string>())
      throw ParseError("model file schema does not match its recorded fingerprint");
    const auto& body = j.at("model");
    m.kind = transform_from_string(body.at("kind").get<std::string>());
    m.threshold = body.at("threshold").get<double>();
    m.order = body.at("order").get<std::vector<std::size_t>>();
    for (const auto& p : body.at("parents"))
      m.parents.push_back(p.is_null() ? std::nullopt : std::optional<std::size_t>(p.get<std::size_t>()));
    for (const auto& e : body.at("tree_edges"))
      m.tree_edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>()});
    m.labelsets = body.at("labelsets").get<std::vector<std::vector<std::uint8_t>>>();
    for (const auto& l : body.at("learners")) m.learners.push_back(l.is_null() ? nullptr : learner_from_json(l));

    const auto k = m.schema.label_count();
    if (m.kind == Transform::LP) {
      if (m.labelsets.empty() || m.learners.size() > 1) throw ParseError("malformed LP model");
    } else {
      if (m.learners.size() != k || m.order.size() != k) throw ParseError("model does not hold one learner per label");
      if (m.kind == Transform::BCC && m.parents.size() != k) throw ParseError("BCC model lacks a parent per label");
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const std::string& path, const MultiLabelModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << model_to_json(m).dump(1) << '\n';
  if (!out) throw ParseError("failed writing '" + path + "'");
}

inline MultiLabelModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

/// Throws SchemaMismatchError unless `data` matches the model's training schema.
inline void require_schema(const MultiLabelModel& m, const AttributeSchema& data) {
  if (data.fingerprint() != m.schema.fingerprint() || !(data == m.schema))
    throw SchemaMismatchError("data schema fingerprint " + fingerprint_hex(data.fingerprint()) +
                              " does not match model schema fingerprint " + fingerprint_hex(m.schema.fingerprint()));
}

}  // namespace mll
