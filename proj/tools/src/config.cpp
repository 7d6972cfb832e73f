#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tentomo/ucp.hpp"

namespace tentomo::tools {

namespace {

using nlohmann::json;

struct Location {
  int line = 0;
  int column = 0;
};

Location location_of_offset(std::string_view text, std::size_t offset) {
  Location loc{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

// Position of the key `"name":` for a dotted path such as "grid.N",
// searching each component after the previous one.
Location locate_key(std::string_view text, const std::string& path) {
  std::size_t from = 0, found = std::string_view::npos;
  std::istringstream parts(path);
  std::string part;
  while (std::getline(parts, part, '.')) {
    const std::string quoted = "\"" + part + "\"";
    found = std::string_view::npos;
    for (std::size_t p = text.find(quoted, from); p != std::string_view::npos; p = text.find(quoted, p + 1)) {
      std::size_t q = p + quoted.size();
      while (q < text.size() && std::isspace(static_cast<unsigned char>(text[q]))) ++q;
      if (q < text.size() && text[q] == ':') {
        found = p;
        break;
      }
    }
    if (found == std::string_view::npos) return {};
    from = found + quoted.size();
  }
  return location_of_offset(text, found);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    const auto loc = locate_key(text_, path);
    throw ConfigError("field '" + path + "': " + message, loc.line, loc.column, path);
  }

  void check_keys(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : obj.items()) {
      if (allowed.count(key)) continue;
      std::string hint;
      for (const auto& a : allowed) hint += (hint.empty() ? "" : ", ") + a;
      fail(prefix + key, "unknown field (expected one of: " + hint + ")");
    }
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer, got " + std::string(v.type_name()));
    const auto x = v.get<std::int64_t>();
    if (x < -1000000 || x > 1000000) fail(path, "integer out of range");
    return static_cast<int>(x);
  }

  std::vector<int> int_list(const json& v, const std::string& path) const {
    if (v.is_array()) {
      if (v.empty()) fail(path, "expected a non-empty list of integers");
      std::vector<int> out;
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], path));
      return out;
    }
    if (!v.is_number_integer()) fail(path, "expected an integer or a list of integers, got " + std::string(v.type_name()));
    return {integer(v, path)};
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number, got " + std::string(v.type_name()));
    return v.get<double>();
  }

  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false, got " + std::string(v.type_name()));
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string, got " + std::string(v.type_name()));
    return v.get<std::string>();
  }

  Rational rational(const json& v, const std::string& path) const {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (!v.is_string()) fail(path, "expected an integer or a fraction string such as \"1/2\"");
    const auto text = v.get<std::string>();
    if (text.empty() || text.find_first_not_of("0123456789/-") != std::string::npos)
      fail(path, "malformed fraction '" + text + "'");
    try {
      return Rational(text);
    } catch (const std::exception&) {
      fail(path, "malformed fraction '" + text + "'");
    }
  }

  std::uint64_t seed(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

 private:
  std::string_view text_;
};

bool is_ucp(const std::string& suite) { return suite.rfind("ucp.", 0) == 0; }

std::vector<int> or_default(std::vector<int> v, std::vector<int> fallback) {
  return v.empty() ? fallback : v;
}

[[noreturn]] void precondition(const std::string& suite, const std::string& message) {
  throw PreconditionError(suite + ": " + message);
}

void require_each(const ExperimentConfig& c, const std::vector<int>& values, const char* name, int lo, int hi) {
  for (int v : values)
    if (v < lo || v > hi)
      precondition(c.suite, std::string(name) + "=" + std::to_string(v) + " is outside the supported range [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void require_s(const ExperimentConfig& c, int needed, const std::string& why) {
  if (c.s && *c.s < needed)
    precondition(c.suite, "field.s=" + std::to_string(*c.s) + " is too small: " + why + " needs s >= " +
                              std::to_string(needed));
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, int column, std::string field)
    : Error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message
                     : message),
      line_(line),
      column_(column),
      field_(std::move(field)) {}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "identities.algebra", "identities.ibp", "identities.john", "identities.prop-ray", "identities.mrt",
      "decompose",          "ucp.ray",        "ucp.mrt",         "ucp.trt"};
  return names;
}

bool known_suite(std::string_view name) {
  const auto& all = suite_names();
  return std::find(all.begin(), all.end(), name) != all.end();
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto loc = location_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    const auto colon = what.find(": ", what.find("parse error"));
    throw ConfigError("syntax error: " + (colon == std::string::npos ? what : what.substr(colon + 2)), loc.line,
                      loc.column);
  }
  Reader rd(text);
  if (!doc.is_object()) throw ConfigError("the config must be a JSON object", 1, 1);
  rd.check_keys(doc, "",
                {"suite", "seed", "n", "m", "k", "field", "rule_degrees", "grid", "samples", "tolerance",
                 "control_threshold", "potential", "output_dir", "timing"});

  ExperimentConfig c;
  if (!doc.contains("suite")) throw ConfigError("missing required field 'suite'", 0, 0, "suite");
  c.suite = rd.string(doc["suite"], "suite");
  if (!known_suite(c.suite)) {
    std::string all;
    for (const auto& s : suite_names()) all += (all.empty() ? "" : ", ") + s;
    rd.fail("suite", "unknown suite '" + c.suite + "' (known: " + all + ")");
  }
  if (doc.contains("seed")) c.seed = rd.seed(doc["seed"], "seed");
  if (doc.contains("n")) c.n = rd.int_list(doc["n"], "n");
  if (doc.contains("m")) c.m = rd.int_list(doc["m"], "m");
  if (doc.contains("k")) c.k = rd.int_list(doc["k"], "k");
  if (doc.contains("field")) {
    const auto& f = doc["field"];
    if (!f.is_object()) rd.fail("field", "expected an object {rho, s, degree}");
    rd.check_keys(f, "field.", {"rho", "s", "degree"});
    if (f.contains("rho")) c.rho = rd.rational(f["rho"], "field.rho");
    if (f.contains("s")) c.s = rd.integer(f["s"], "field.s");
    if (f.contains("degree")) c.degree = rd.integer(f["degree"], "field.degree");
  }
  if (doc.contains("rule_degrees")) c.rule_degrees = rd.int_list(doc["rule_degrees"], "rule_degrees");
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    if (!g.is_object()) rd.fail("grid", "expected an object {N, L}");
    rd.check_keys(g, "grid.", {"N", "L"});
    if (g.contains("N")) c.grid_N = rd.int_list(g["N"], "grid.N");
    if (g.contains("L")) c.grid_L = rd.number(g["L"], "grid.L");
  }
  if (doc.contains("samples")) c.samples = rd.integer(doc["samples"], "samples");
  if (doc.contains("tolerance")) c.tolerance = rd.number(doc["tolerance"], "tolerance");
  if (doc.contains("control_threshold")) c.control_threshold = rd.number(doc["control_threshold"], "control_threshold");
  if (doc.contains("potential")) c.potential = rd.boolean(doc["potential"], "potential");
  if (doc.contains("output_dir")) c.output_dir = rd.string(doc["output_dir"], "output_dir");
  if (doc.contains("timing")) c.timing = rd.boolean(doc["timing"], "timing");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", 0, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ExperimentConfig resolve(ExperimentConfig c) {
  const auto& s = c.suite;
  if (s == "identities.algebra") {
    c.n = or_default(c.n, {2, 3});
    c.m = or_default(c.m, {1, 2, 3});
    c.k = or_default(c.k, {1});
    if (!c.samples) c.samples = 9;
  } else if (s == "identities.ibp") {
    c.n = or_default(c.n, {2, 3});
    if (!c.s) c.s = 4;
    if (!c.samples) c.samples = 20;
  } else if (s == "identities.john") {
    c.n = or_default(c.n, {2});
    c.m = or_default(c.m, {0, 1, 2});
    if (!c.samples) c.samples = 20;
  } else if (s == "identities.prop-ray") {
    c.n = or_default(c.n, {2});
    c.m = or_default(c.m, {1, 2});
    c.rule_degrees = or_default(c.rule_degrees, {20, 40, 60});
    if (!c.samples) c.samples = 4;
  } else if (s == "identities.mrt") {
    c.n = or_default(c.n, {2});
    c.m = or_default(c.m, {1, 2});
    c.k = or_default(c.k, {0, 1, 2});
    c.rule_degrees = or_default(c.rule_degrees, {4, 8, 12, 20, 40, 60});
    if (!c.samples) c.samples = 3;
  } else if (s == "decompose") {
    c.n = or_default(c.n, {2});
    c.m = or_default(c.m, {1, 2});
    c.k = or_default(c.k, {0});
    c.grid_N = or_default(c.grid_N, {64, 128});
    c.rule_degrees = or_default(c.rule_degrees, {60});
    if (!c.s) c.s = 6;
    if (!c.samples) c.samples = 3;
  } else if (is_ucp(s)) {
    const bool trt = s == "ucp.trt";
    c.n = or_default(c.n, {trt ? 3 : 2});
    c.m = or_default(c.m, {s == "ucp.ray" ? 1 : 2});
    c.k = or_default(c.k, {1});
    c.rule_degrees = or_default(c.rule_degrees, {40});
    if (!c.s) c.s = 6;
    if (!c.samples) c.samples = 20;
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  const auto& s = c.suite;
  if (!known_suite(s)) precondition(s, "unknown suite");
  if (c.rho <= 0) precondition(s, "field.rho must be positive");
  if (c.degree < 0 || c.degree > 6) precondition(s, "field.degree must be in [0, 6]");
  if (c.samples && *c.samples < 1) precondition(s, "samples must be at least 1");
  if (c.tolerance && !(*c.tolerance >= 0.0)) precondition(s, "tolerance must be non-negative");
  for (int d : c.rule_degrees)
    if (d < 2 || d > 400) precondition(s, "rule_degrees entries must be in [2, 400]");
  const int max_m = c.m.empty() ? 0 : *std::max_element(c.m.begin(), c.m.end());

  if (s == "identities.algebra") {
    require_each(c, c.n, "n", 2, 3);
    require_each(c, c.m, "m", 1, 3);
    require_each(c, c.k, "k", 1, 2);
    require_s(c, max_m + 1, "R f of rank m");
  } else if (s == "identities.ibp") {
    require_each(c, c.n, "n", 2, 3);
    if (*c.s < 1 || *c.s > 6) precondition(s, "field.s (largest identity order) must be in [1, 6]");
  } else if (s == "identities.john") {
    require_each(c, c.n, "n", 2, 3);
    require_each(c, c.m, "m", 0, 3);
    require_s(c, std::max(2 * max_m + 1, 3), "the mixed second derivatives of the John operator");
  } else if (s == "identities.prop-ray") {
    require_each(c, c.n, "n", 2, 3);
    require_each(c, c.m, "m", 1, 3);
    require_s(c, max_m + 1, "R f and m derivatives of N f");
  } else if (s == "identities.mrt") {
    require_each(c, c.n, "n", 2, 3);
    require_each(c, c.m, "m", 1, 3);
    require_each(c, c.k, "k", 0, 3);
    for (int m : c.m)
      for (int k : c.k)
        if (k >= 1 && k <= m) require_s(c, m + k + 1, "the generalized identity at (m, k)");
  } else if (s == "decompose") {
    require_each(c, c.n, "n", 2, 2);
    require_each(c, c.m, "m", 1, 2);
    require_each(c, c.k, "k", 0, 2);
    require_each(c, c.grid_N, "grid.N", 8, 1024);
    for (int N : c.grid_N)
      if (N % 2) precondition(s, "grid.N must be even");
    if (!(c.grid_L > 2.0 * to_double(c.rho))) precondition(s, "grid.L must exceed the support diameter 2 rho");
    require_s(c, 3, "spectral derivatives of the sampled field");
    for (int k : c.k) require_s(c, k + 2, "the divergence δ^{k+1} N^k");
  } else if (is_ucp(s)) {
    const auto scenario = *parse_ucp_scenario(s.substr(4));
    for (int n : c.n)
      for (int m : c.m)
        for (int k : c.k) {
          UcpConfig u;
          u.n = n;
          u.m = m;
          u.k = k;
          u.rho = c.rho;
          u.s = *c.s;
          u.degree = c.degree;
          u.rule_degree = c.rule_degrees.front();
          u.samples = *c.samples;
          if (c.tolerance) u.tolerance = *c.tolerance;
          tentomo::validate(scenario, u);
        }
  }
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["suite"] = c.suite;
  j["seed"] = c.seed;
  j["n"] = c.n;
  j["m"] = c.m;
  j["k"] = c.k;
  j["field"] = {{"rho", c.rho.str()}, {"s", c.s ? nlohmann::ordered_json(*c.s) : nullptr}, {"degree", c.degree}};
  j["rule_degrees"] = c.rule_degrees;
  j["grid"] = {{"N", c.grid_N}, {"L", c.grid_L}};
  j["samples"] = c.samples ? nlohmann::ordered_json(*c.samples) : nullptr;
  j["tolerance"] = c.tolerance ? nlohmann::ordered_json(*c.tolerance) : nullptr;
  j["control_threshold"] = c.control_threshold;
  j["potential"] = c.potential;
  return j.dump();
}

}  // namespace tentomo::tools
