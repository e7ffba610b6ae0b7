#include <cstdlib>
#include <fstream>
#include <sstream>

#include "detail.hpp"

namespace cotran::harness {
namespace detail {

const Json& require_field(const Json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) fail(path + "." + key, "missing required field");
  return obj.at(key);
}

std::string require_string(const Json& obj, const std::string& path, const std::string& key) {
  const Json& j = require_field(obj, path, key);
  if (!j.is_string()) fail(path + "." + key, "expected a string");
  return j.get<std::string>();
}

double require_number(const Json& obj, const std::string& path, const std::string& key) {
  const Json& j = require_field(obj, path, key);
  if (!j.is_number()) fail(path + "." + key, "expected a number");
  return j.get<double>();
}

std::int64_t require_int(const Json& obj, const std::string& path, const std::string& key) {
  const Json& j = require_field(obj, path, key);
  if (!j.is_number_integer()) fail(path + "." + key, "expected an integer");
  return j.get<std::int64_t>();
}

double optional_number(const Json& obj, const std::string& key, double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw SpecError(key + ": expected a number");
  return obj.at(key).get<double>();
}

Mat parse_mat(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a square matrix as nested arrays");
  const std::size_t n = j.size();
  Mat m(static_cast<int>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || row.size() != n)
      fail(path, "expected a square matrix (row " + std::to_string(r) + " has wrong length)");
    for (std::size_t c = 0; c < n; ++c) {
      if (!row.at(c).is_number())
        fail(path, "matrix entry (" + std::to_string(r) + "," + std::to_string(c) +
                       ") is not a number");
      m(static_cast<int>(r), static_cast<int>(c)) = row.at(c).get<double>();
    }
  }
  m.validate();
  return m;
}

std::vector<Mat> parse_mat_list(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of matrices");
  std::vector<Mat> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_mat(j.at(i), path + "[" + std::to_string(i) + "]"));
  for (const Mat& m : out)
    if (m.dim() != out.front().dim()) fail(path, "matrices have mixed dimensions");
  return out;
}

GroupElement parse_element(const Json& j, const GroupHandle& g, const std::string& path) {
  switch (g.kind()) {
    case GroupKind::Z:
    case GroupKind::GridR:
      if (!j.is_number_integer()) fail(path, "expected an integer element");
      return GroupElement::from_int(j.get<std::int64_t>());
    case GroupKind::Zk: {
      if (!j.is_array() || static_cast<int>(j.size()) != g.lattice_dim())
        fail(path, "expected an array of " + std::to_string(g.lattice_dim()) + " integers");
      std::vector<std::int64_t> v;
      for (const Json& c : j) {
        if (!c.is_number_integer()) fail(path, "lattice coordinates must be integers");
        v.push_back(c.get<std::int64_t>());
      }
      return GroupElement::from_vec(std::move(v));
    }
    case GroupKind::Free: {
      if (!j.is_object() || !j.contains("word") || !j.at("word").is_array())
        fail(path, "expected {\"word\": [signed letters]}");
      std::vector<std::int32_t> letters;
      for (const Json& s : j.at("word")) {
        if (!s.is_number_integer()) fail(path, "word letters must be integers");
        const std::int64_t v = s.get<std::int64_t>();
        if (v == 0 || std::abs(v) > g.generator_count())
          fail(path, "word letter out of generator range");
        letters.push_back(static_cast<std::int32_t>(v));
      }
      return GroupElement::from_word(reduce_word(std::move(letters)));
    }
    case GroupKind::Finite: {
      if (!j.is_object() || !j.contains("index") || !j.at("index").is_number_integer())
        fail(path, "expected {\"index\": i}");
      const std::int64_t i = j.at("index").get<std::int64_t>();
      if (i < 0 || static_cast<std::size_t>(i) >= g.finite_order())
        fail(path, "element index out of range");
      return GroupElement::from_index(static_cast<std::uint32_t>(i));
    }
  }
  fail(path, "unsupported group kind for element literals");
}

GroupHandle parse_group(const Json& j, const std::string& path) {
  const std::string kind = require_string(j, path, "kind");
  if (kind == "Z") return GroupHandle::integers();
  if (kind == "Zk") {
    const std::int64_t k = require_int(j, path, "k");
    if (k < 1 || k > 6) fail(path + ".k", "lattice dimension must be in 1..6");
    return GroupHandle::integer_lattice(static_cast<int>(k));
  }
  if (kind == "free") {
    const std::int64_t n = require_int(j, path, "n");
    if (n < 1 || n > 4) fail(path + ".n", "free rank must be in 1..4");
    return GroupHandle::free_group(static_cast<int>(n));
  }
  if (kind == "finite") {
    const Json& tj = require_field(j, path, "table");
    if (!tj.is_array() || tj.empty()) fail(path + ".table", "expected a non-empty square table");
    std::vector<std::vector<std::uint32_t>> table;
    for (const Json& row : tj) {
      if (!row.is_array() || row.size() != tj.size())
        fail(path + ".table", "multiplication table must be square");
      std::vector<std::uint32_t> r;
      for (const Json& c : row) {
        if (!c.is_number_integer() || c.get<std::int64_t>() < 0 ||
            c.get<std::uint64_t>() >= tj.size())
          fail(path + ".table", "table entries must be element indices");
        r.push_back(c.get<std::uint32_t>());
      }
      table.push_back(std::move(r));
    }
    std::vector<RelationWord> relations;
    if (j.contains("relations")) {
      for (const Json& rel : j.at("relations")) {
        RelationWord w;
        for (const Json& s : rel) {
          if (!s.is_number_integer()) fail(path + ".relations", "letters must be integers");
          w.push_back(s.get<std::int32_t>());
        }
        relations.push_back(std::move(w));
      }
    }
    std::vector<std::uint32_t> generators;
    if (j.contains("generators")) {
      for (const Json& gi : j.at("generators")) {
        if (!gi.is_number_integer() || gi.get<std::int64_t>() < 0 ||
            gi.get<std::uint64_t>() >= tj.size())
          fail(path + ".generators", "generators must be element indices");
        generators.push_back(gi.get<std::uint32_t>());
      }
    }
    return GroupHandle::finite(std::move(table), std::move(relations), std::move(generators));
  }
  fail(path + ".kind", "unknown group kind '" + kind + "'");
}

void check_dim_cap(int dim, int cap, const std::string& path) {
  if (dim > cap)
    fail(path, "dimension " + std::to_string(dim) + " exceeds the COTRANS_MAX_DIM cap " +
                   std::to_string(cap));
}

}  // namespace detail

namespace {

using detail::fail;

// Structural validator for the subset of JSON Schema used by the shipped
// schema: type, enum, required, properties, additionalProperties (boolean),
// items (single schema), minimum, minItems, and local $ref.
void validate_node(const Json& doc, const Json& node, const std::string& path,
                   const Json& root) {
  if (node.contains("$ref")) {
    const std::string ref = node.at("$ref").get<std::string>();
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) fail(path, "unsupported $ref '" + ref + "'");
    const std::string name = ref.substr(prefix.size());
    if (!root.contains("definitions") || !root.at("definitions").contains(name))
      fail(path, "dangling $ref '" + ref + "'");
    validate_node(doc, root.at("definitions").at(name), path, root);
    return;
  }
  if (node.contains("type")) {
    const std::string t = node.at("type").get<std::string>();
    const bool ok = (t == "object" && doc.is_object()) || (t == "array" && doc.is_array()) ||
                    (t == "string" && doc.is_string()) || (t == "number" && doc.is_number()) ||
                    (t == "integer" && doc.is_number_integer()) ||
                    (t == "boolean" && doc.is_boolean());
    if (!ok) fail(path, "expected " + t);
  }
  if (node.contains("enum")) {
    bool hit = false;
    for (const Json& v : node.at("enum")) hit = hit || v == doc;
    if (!hit) fail(path, "value " + doc.dump() + " is not one of " + node.at("enum").dump());
  }
  if (node.contains("minimum") && doc.is_number()) {
    if (doc.get<double>() < node.at("minimum").get<double>())
      fail(path, "value below minimum " + node.at("minimum").dump());
  }
  if (node.contains("required") && doc.is_object()) {
    for (const Json& k : node.at("required"))
      if (!doc.contains(k.get<std::string>()))
        fail(path + "." + k.get<std::string>(), "missing required field");
  }
  if (node.contains("properties") && doc.is_object()) {
    for (auto it = node.at("properties").begin(); it != node.at("properties").end(); ++it)
      if (doc.contains(it.key()))
        validate_node(doc.at(it.key()), it.value(), path + "." + it.key(), root);
    if (node.contains("additionalProperties") &&
        node.at("additionalProperties").is_boolean() &&
        !node.at("additionalProperties").get<bool>()) {
      for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!node.at("properties").contains(it.key()))
          fail(path + "." + it.key(), "unknown field");
    }
  }
  if (node.contains("minItems") && doc.is_array()) {
    if (doc.size() < node.at("minItems").get<std::size_t>())
      fail(path, "array shorter than minItems " + node.at("minItems").dump());
  }
  if (node.contains("items") && doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i)
      validate_node(doc.at(i), node.at("items"), path + "[" + std::to_string(i) + "]", root);
  }
}

// Kept in sync with schema/problem_spec.schema.json (asserted by a test).
constexpr const char* kSchemaText = R"JSON({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "cotranslation problem spec",
  "type": "object",
  "required": ["command"],
  "additionalProperties": false,
  "properties": {
    "schema_version": { "type": "integer", "minimum": 1 },
    "command": {
      "type": "string",
      "enum": ["verify", "complete", "evolve", "skew-roundtrip", "generator"]
    },
    "group": {
      "type": "object",
      "required": ["kind"],
      "properties": {
        "kind": { "type": "string", "enum": ["Z", "Zk", "free", "finite"] },
        "k": { "type": "integer", "minimum": 1 },
        "n": { "type": "integer", "minimum": 1 },
        "table": { "type": "array", "minItems": 1 },
        "relations": { "type": "array" },
        "generators": { "type": "array" }
      }
    },
    "cotranslation": { "$ref": "#/definitions/kinded" },
    "partial": { "$ref": "#/definitions/kinded" },
    "hull": { "$ref": "#/definitions/kinded" },
    "ode": {
      "type": "object",
      "required": ["coeff", "t0", "t1", "h"],
      "properties": {
        "coeff": {
          "type": "object",
          "required": ["family"],
          "properties": { "family": { "type": "string" } }
        },
        "t0": { "type": "number" },
        "t1": { "type": "number" },
        "h": { "type": "number" },
        "h_fd": { "type": "number" }
      }
    },
    "radius": { "type": "integer", "minimum": 1 },
    "seed": { "type": "integer", "minimum": 0 },
    "tolerances": { "type": "object" }
  },
  "definitions": {
    "kinded": {
      "type": "object",
      "required": ["kind"],
      "properties": { "kind": { "type": "string" } }
    }
  }
})JSON";

int env_dim_cap() {
  const char* env = std::getenv("COTRANS_MAX_DIM");
  if (!env || !*env) return 16;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (!end || *end != '\0' || v < 1 || v > 4096)
    throw SpecError("COTRANS_MAX_DIM: expected a positive integer");
  return static_cast<int>(v);
}

}  // namespace

const Json& problem_spec_schema() {
  static const Json schema = Json::parse(kSchemaText);
  return schema;
}

void validate_against_schema(const Json& doc, const Json& schema) {
  validate_node(doc, schema, "spec", schema);
}

ProblemSpec spec_from_json(const Json& doc, const Options& opt) {
  validate_against_schema(doc, problem_spec_schema());

  int objects = 0;
  for (const char* key : {"cotranslation", "partial", "hull", "ode"})
    objects += doc.contains(key) ? 1 : 0;
  if (objects != 1)
    throw SpecError("spec: exactly one of cotranslation, partial, hull, ode is required");
  if (doc.contains("ode") && doc.contains("group"))
    throw SpecError("spec.group: not allowed with an ode object (the time grid provides it)");
  if (!doc.contains("ode") && !doc.contains("group"))
    throw SpecError("spec.group: required for this object kind");

  ProblemSpec spec;
  spec.doc = doc;
  spec.command = doc.at("command").get<std::string>();
  spec.radius = doc.contains("radius") ? doc.at("radius").get<int>() : 4;
  if (opt.radius) spec.radius = *opt.radius;
  if (spec.radius < 1) throw SpecError("radius: must be at least 1");
  if (spec.radius > 32) throw SpecError("radius: must be at most 32");
  spec.seed = doc.contains("seed") ? doc.at("seed").get<std::uint64_t>() : 0;
  if (opt.seed) spec.seed = *opt.seed;
  spec.max_dim = env_dim_cap();

  spec.tolerances = default_tolerances();
  auto apply = [&spec](const std::string& key, const Json& v, const std::string& origin) {
    if (!spec.tolerances.count(key))
      throw SpecError(origin + "." + key + ": unknown tolerance key");
    if (!v.is_number() || v.get<double>() < 0.0)
      throw SpecError(origin + "." + key + ": expected a non-negative number");
    spec.tolerances[key] = v.get<double>();
  };
  if (doc.contains("tolerances"))
    for (auto it = doc.at("tolerances").begin(); it != doc.at("tolerances").end(); ++it)
      apply(it.key(), it.value(), "spec.tolerances");
  for (const auto& [key, val] : opt.tol_overrides) apply(key, Json(val), "--tol");
  return spec;
}

ProblemSpec load_spec(const std::string& path, const Options& opt) {
  std::ifstream in(path);
  if (!in) throw SpecError("spec: cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    throw SpecError("spec: invalid JSON: " + msg);
  }
  return spec_from_json(doc, opt);
}

}  // namespace cotran::harness
