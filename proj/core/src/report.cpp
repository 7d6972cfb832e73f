#include "tentomo/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace tentomo {

namespace {

std::string format_number(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

bool check_passes(double value, double tolerance, bool lower_bound) {
  if (std::isnan(value)) return false;
  return lower_bound ? value >= tolerance : value <= tolerance;
}

Report::Report(std::string scenario, std::string config_json)
    : scenario_(std::move(scenario)), config_(std::move(config_json)) {}

Check& Report::add(std::string name, std::string parameters, double value, double tolerance,
                   bool lower_bound) {
  Check c;
  c.name = std::move(name);
  c.parameters = std::move(parameters);
  c.value = value;
  c.tolerance = tolerance;
  c.lower_bound = lower_bound;
  c.pass = check_passes(value, tolerance, lower_bound);
  checks_.push_back(std::move(c));
  return checks_.back();
}

Check& Report::add_info(std::string name, std::string parameters, double value, double tolerance) {
  Check& c = add(std::move(name), std::move(parameters), value, tolerance);
  c.informational = true;
  return c;
}

void Report::append(const Report& other) {
  checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
  total_seconds += other.total_seconds;
}

bool Report::passed() const { return failures() == 0; }

std::size_t Report::failures() const {
  std::size_t n = 0;
  for (const auto& c : checks_)
    if (!c.pass && !c.informational) ++n;
  return n;
}

std::string Report::to_json(bool with_timing) const {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["scenario"] = scenario_;
  j["config"] = nlohmann::ordered_json::parse(config_);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& c : checks_) {
    nlohmann::ordered_json r;
    r["name"] = c.name;
    r["parameters"] = c.parameters;
    if (std::isfinite(c.value)) r["value"] = c.value;
    else r["value"] = nullptr;
    r["tolerance"] = c.tolerance;
    r["pass"] = c.pass;
    if (c.lower_bound) r["lower_bound"] = true;
    if (c.informational) r["informational"] = true;
    if (with_timing && c.seconds) r["seconds"] = *c.seconds;
    rows.push_back(std::move(r));
  }
  j["residuals"] = std::move(rows);
  j["passed"] = passed();
  if (with_timing) j["timing"] = {{"total_seconds", total_seconds}};
  return j.dump(2) + "\n";
}

void Report::write_csv(std::ostream& out, bool with_timing) const {
  out << "check_name,parameters,residual,tolerance,pass,seconds\n";
  for (const auto& c : checks_) {
    out << csv_field(c.name) << ',' << csv_field(c.parameters) << ',' << format_number(c.value, "%.12e") << ','
        << format_number(c.tolerance, "%.3e") << ',' << (c.pass ? "true" : "false") << ',';
    if (with_timing && c.seconds) out << format_number(*c.seconds, "%.3f");
    out << '\n';
  }
}

std::string param_string(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v == std::floor(v) && std::abs(v) < 1e15 ? format_number(v, "%.0f") : format_number(v, "%g");
  }
  return out;
}

}  // namespace tentomo
