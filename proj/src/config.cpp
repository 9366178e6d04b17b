#include "cwstein/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cwstein/numerics.hpp"

namespace cwstein {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"analyze-measure", "ghs-check",     "minimize-g",
                                              "stein-bounds",    "simulate",      "exact",
                                              "rates",           "hubbard-check", "ursell-check"};
  return names;
}

namespace {

Json integer(double min, std::optional<double> dflt = std::nullopt) {
  Json j{{"type", "integer"}, {"minimum", min}};
  if (dflt) j["default"] = static_cast<long long>(*dflt);
  return j;
}

Json number(std::optional<double> dflt = std::nullopt) {
  Json j{{"type", "number"}};
  if (dflt) j["default"] = *dflt;
  return j;
}

Json positive(std::optional<double> dflt = std::nullopt) {
  Json j = number(dflt);
  j["exclusiveMinimum"] = 0.0;
  return j;
}

Json ref(const std::string& name) { return Json{{"$ref", "#/$defs/" + name}}; }

Json object(Json props, std::vector<std::string> required = {}) {
  Json j{{"type", "object"}, {"properties", std::move(props)}, {"additionalProperties", false}};
  if (!required.empty()) j["required"] = required;
  return j;
}

Json build_schema() {
  Json defs;
  defs["measure"] = object(
      {{"kind", {{"enum", {"bernoulli", "three_state", "trinomial", "uniform", "gibbs_density", "atomic"}}}},
       {"a", {{"type", "number"}, {"minimum", 0.0}, {"maximum", 1.0}}},
       {"half_width", positive()},
       {"coefficients", {{"type", "array"}, {"items", {{"type", "number"}}}}},
       {"cosh_coeff", {{"type", "number"}, {"minimum", 0.0}}},
       {"scale", positive()},
       {"atoms", {{"type", "array"},
                  {"minItems", 1},
                  {"items", object({{"x", number()}, {"w", positive()}}, {"x", "w"})}}},
       {"label", {{"type", "string"}}}},
      {"kind"});
  defs["law"] = object(
      {{"family", {{"enum", {"gaussian", "power", "critical_classic", "f_gamma", "mixed", "moment_normalized"}}}},
       {"variance", positive()},
       {"k", integer(1)},
       {"mu", positive()},
       {"beta", positive()},
       {"gamma", number()},
       {"c_w", positive()},
       {"m2k", positive()}},
      {"family"});
  defs["budget"] = object({{"max_compositions", positive(1e7)}, {"max_configurations", positive(1e7)}});
  defs["beta_seq"] = object({{"sign", {{"enum", {-1, 1}}, {"default", 1}}},
                             {"exponent", positive(0.5)},
                             {"gamma", {{"type", "number"}, {"minimum", 0.0}, {"default", 1.0}}}});
  defs["regime"] = object({{"kind", {{"enum", {"auto", "clt", "critical", "window"}}, {"default", "auto"}}},
                           {"center", number()},
                           {"k", integer(2)},
                           {"mu", positive()},
                           {"gamma", number()}});
  defs["constants"] = object({{"d1", number()}, {"d2", number()}, {"d3", number()}, {"d4", number()}},
                             {"d1", "d2", "d3", "d4"});

  const Json common{{"command", {{"type", "string"}}},
                    {"seed", integer(0, 1)},
                    {"workers", integer(1, 1)},
                    {"out", {{"type", "string"}, {"default", "out"}}}};
  auto command = [&](Json props, std::vector<std::string> required) {
    for (auto it = common.begin(); it != common.end(); ++it) props[it.key()] = it.value();
    required.insert(required.begin(), "command");
    return object(std::move(props), std::move(required));
  };
  const Json nonneg_beta{{"type", "number"}, {"minimum", 0.0}};
  const Json n_grid{{"type", "array"}, {"minItems", 1}, {"items", integer(1)}};

  defs["analyze-measure"] = command({{"measure", ref("measure")},
                                     {"s_max", positive(10.0)},
                                     {"grid", integer(2, 4096)},
                                     {"max_order", integer(2, 8)}},
                                    {"measure"});
  defs["ghs-check"] = command({{"measure", ref("measure")}, {"s_max", positive(10.0)}, {"grid", integer(2, 4096)}},
                              {"measure"});
  defs["minimize-g"] = command(
      {{"measure", ref("measure")}, {"beta", nonneg_beta}, {"search_half_width", {{"type", "number"}, {"minimum", 0.0}, {"default", 0.0}}}},
      {"measure", "beta"});
  defs["stein-bounds"] = command({{"law", ref("law")},
                                  {"z_points", integer(2, 512)},
                                  {"x_points", integer(2, 4096)},
                                  {"tail_points", {{"type", "array"}, {"items", positive()}, {"default", {0.5, 1.0, 2.0, 4.0, 8.0}}}},
                                  {"limit_x", positive(8.0)},
                                  {"limit_z", number(0.5)}},
                                 {"law"});
  defs["simulate"] = command({{"measure", ref("measure")},
                              {"beta", nonneg_beta},
                              {"n", integer(2)},
                              {"samples", integer(1, 20000)},
                              {"chains", integer(2, 32)},
                              {"burn_in", integer(-1, -1)},
                              {"thinning", integer(-1, -1)},
                              {"model", {{"enum", {"standard", "hat"}}, {"default", "standard"}}},
                              {"regime", ref("regime")},
                              {"bound_form", {{"enum", {"normal_fixed_variance", "normal_moment_matched", "general_density", "general_density_moment_matched"}}}},
                              {"constants", ref("constants")},
                              {"dump_pairs", {{"type", "boolean"}, {"default", false}}}},
                             {"measure", "beta", "n"});
  defs["exact"] = command({{"measure", ref("measure")},
                           {"beta", nonneg_beta},
                           {"n_grid", n_grid},
                           {"fields", {{"type", "array"}, {"items", {{"type", "number"}}}}},
                           {"budget", ref("budget")},
                           {"write_fixtures", {{"type", "boolean"}, {"default", true}}}},
                          {"measure", "beta", "n_grid"});
  defs["rates"] = command({{"measure", ref("measure")},
                           {"beta", nonneg_beta},
                           {"beta_seq", ref("beta_seq")},
                           {"center", number()},
                           {"n_grid", n_grid},
                           {"target_mode", {{"enum", {"auto", "moment_normalized", "fixed"}}, {"default", "auto"}}},
                           {"target", ref("law")},
                           {"method", {{"enum", {"auto", "exact", "mc"}}, {"default", "auto"}}},
                           {"metric", {{"enum", {"kolmogorov", "wasserstein"}}, {"default", "kolmogorov"}}},
                           {"mc_samples", integer(10000, 100000)},
                           {"chains", integer(2, 32)},
                           {"budget", ref("budget")},
                           {"title", {{"type", "string"}, {"default", "rate"}}}},
                          {"measure", "n_grid"});
  defs["hubbard-check"] = command({{"measure", ref("measure")},
                                   {"beta", positive()},
                                   {"n", integer(1)},
                                   {"mcenter", number(0.0)},
                                   {"gamma_exp", {{"type", "number"}, {"exclusiveMinimum", 0.0}, {"exclusiveMaximum", 1.0}}},
                                   {"grid", integer(2, 2001)}},
                                  {"measure", "beta", "n", "gamma_exp"});
  defs["ursell-check"] = command(
      {{"measure", ref("measure")},
       {"beta", nonneg_beta},
       {"n", integer(1)},
       {"sites", {{"type", "array"}, {"minItems", 4}, {"maxItems", 4}, {"items", integer(0)}, {"default", {0, 1, 2, 3}}}},
       {"fields", {{"type", "array"}, {"items", {{"type", "number"}}}}},
       {"fd_step", positive(1e-3)},
       {"ghs2_search", object({{"n_max", integer(1, 8)},
                               {"betas", {{"type", "array"}, {"items", nonneg_beta}, {"default", {0.1, 0.25, 0.5, 1.0, 1.5}}}},
                               {"fields", {{"type", "array"}, {"items", {{"type", "number"}}}, {"default", {0.0, 0.1, 0.3, 0.6, 1.0}}}}})},
       {"budget", ref("budget")}},
      {"measure", "beta", "n"});

  Json mapping = Json::object();
  for (const auto& c : command_names()) mapping[c] = "#/$defs/" + c;
  return Json{{"$schema", "http://json-schema.org/draft-07/schema#"},
              {"title", "cwstein experiment config"},
              {"type", "object"},
              {"required", {"command"}},
              {"properties", {{"command", {{"enum", command_names()}}}}},
              {"discriminator", {{"propertyName", "command"}, {"mapping", mapping}}},
              {"$defs", defs}};
}

std::string type_name(const Json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number_float()) return "number";
  return v.type_name();
}

bool type_matches(const std::string& t, const Json& v) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer() || v.is_number_unsigned()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  if (t == "null") return v.is_null();
  return false;
}

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

class Validator {
 public:
  explicit Validator(const Json& root) : root_(root) {}

  void run(const Json& schema, Json& value, const std::string& path) {
    if (schema.contains("$ref")) {
      run(resolve(schema["$ref"].get<std::string>()), value, path);
      return;
    }
    if (schema.contains("type")) {
      const std::string t = schema["type"].get<std::string>();
      if (!type_matches(t, value)) {
        fail(path, "expected " + t + ", got " + type_name(value));
        return;
      }
      if (t == "integer" && value.is_number_float()) value = static_cast<long long>(value.get<double>());
    }
    if (schema.contains("const") && value != schema["const"]) fail(path, "must equal " + schema["const"].dump());
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& e : schema["enum"]) found = found || e == value;
      if (!found) {
        std::string allowed;
        for (const auto& e : schema["enum"]) allowed += (allowed.empty() ? "" : ", ") + e.dump();
        fail(path, "value " + value.dump() + " not allowed; allowed values: " + allowed);
      }
    }
    if (value.is_number()) {
      const double x = value.get<double>();
      if (schema.contains("minimum") && x < schema["minimum"].get<double>())
        fail(path, "must be >= " + format_double(schema["minimum"].get<double>()));
      if (schema.contains("maximum") && x > schema["maximum"].get<double>())
        fail(path, "must be <= " + format_double(schema["maximum"].get<double>()));
      if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>())
        fail(path, "must be > " + format_double(schema["exclusiveMinimum"].get<double>()));
      if (schema.contains("exclusiveMaximum") && x >= schema["exclusiveMaximum"].get<double>())
        fail(path, "must be < " + format_double(schema["exclusiveMaximum"].get<double>()));
    }
    if (value.is_array()) {
      if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>())
        fail(path, "needs at least " + std::to_string(schema["minItems"].get<std::size_t>()) + " items");
      if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>())
        fail(path, "allows at most " + std::to_string(schema["maxItems"].get<std::size_t>()) + " items");
      if (schema.contains("items"))
        for (std::size_t i = 0; i < value.size(); ++i) run(schema["items"], value[i], path + "/" + std::to_string(i));
    }
    if (value.is_object()) object_rules(schema, value, path);
  }

  std::vector<SchemaIssue> issues;

 private:
  void object_rules(const Json& schema, Json& value, const std::string& path) {
    if (schema.contains("required"))
      for (const auto& r : schema["required"]) {
        const std::string key = r.get<std::string>();
        if (!value.contains(key)) fail(path + "/" + escape_pointer(key), "required field is missing");
      }
    if (schema.contains("discriminator")) {
      const Json& d = schema["discriminator"];
      const std::string prop = d["propertyName"].get<std::string>();
      if (value.contains(prop) && value[prop].is_string() && d["mapping"].contains(value[prop].get<std::string>())) {
        run(resolve(d["mapping"][value[prop].get<std::string>()].get<std::string>()), value, path);
        return;
      }
    }
    const Json props = schema.value("properties", Json::object());
    for (auto it = value.begin(); it != value.end(); ++it) {
      const std::string child = path + "/" + escape_pointer(it.key());
      if (props.contains(it.key())) {
        run(props[it.key()], it.value(), child);
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false &&
                 !schema.contains("discriminator")) {
        std::string allowed;
        for (auto p = props.begin(); p != props.end(); ++p) allowed += (allowed.empty() ? "" : ", ") + p.key();
        fail(child, "unknown field; allowed fields: " + allowed);
      }
    }
    for (auto p = props.begin(); p != props.end(); ++p) {
      if (value.contains(p.key())) continue;
      const Json& sub = p.value().contains("$ref") ? resolve(p.value()["$ref"].get<std::string>()) : p.value();
      if (sub.contains("default")) value[p.key()] = sub["default"];
    }
  }

  const Json& resolve(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0) throw InvalidArgument("schema: only local references are supported: " + ref);
    const Json::json_pointer ptr(ref.substr(1));
    if (!root_.contains(ptr)) throw InvalidArgument("schema: dangling reference " + ref);
    return root_.at(ptr);
  }

  void fail(const std::string& path, const std::string& message) {
    issues.push_back({path.empty() ? "/" : path, message});
  }

  const Json& root_;
};

void line_column(const std::string& text, std::size_t byte, std::size_t& line, std::size_t& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

}  // namespace

const Json& config_schema() {
  static const Json schema = build_schema();
  return schema;
}

std::vector<SchemaIssue> validate_and_fill(const Json& schema, Json& doc) {
  Validator v(schema);
  v.run(schema, doc, "");
  return v.issues;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& command_hint,
                                   const Overrides& overrides, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 0, col = 0;
    line_column(text, e.byte == 0 ? 0 : e.byte - 1, line, col);
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw InvalidArgument(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
  if (!doc.is_object()) throw InvalidArgument(source + ": top-level value must be an object");
  if (!command_hint.empty()) {
    if (!doc.contains("command")) {
      doc["command"] = command_hint;
    } else if (doc["command"] != command_hint) {
      throw InvalidArgument(source + ": /command is " + doc["command"].dump() + " but subcommand is '" +
                            command_hint + "'");
    }
  }
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.workers) doc["workers"] = *overrides.workers;
  if (overrides.out) doc["out"] = *overrides.out;
  const auto issues = validate_and_fill(config_schema(), doc);
  if (!issues.empty()) {
    std::ostringstream os;
    os << source << ": config does not match the schema";
    for (const auto& i : issues) os << "\n  " << i.path << ": " << i.message;
    throw InvalidArgument(os.str());
  }
  ExperimentConfig cfg;
  cfg.command = doc["command"].get<std::string>();
  cfg.effective = std::move(doc);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path, const std::string& command_hint, const Overrides& overrides) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), command_hint, overrides, path);
}

}  // namespace cwstein
