// tentomo: runs identity suites and unique-continuation experiments from a
// JSON config and writes <out>/<suite>.json and <out>/<suite>.csv.
//
// Exit codes: 0 all residuals within tolerance, 1 residual failure,
// 2 config parse error, 3 precondition violation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "suites.hpp"

namespace fs = std::filesystem;
using namespace tentomo;
using namespace tentomo::tools;

namespace {

enum Exit { kOk = 0, kResidualFailure = 1, kParseError = 2, kPrecondition = 3 };

int report_config_error(const std::string& path, const ConfigError& e) {
  std::cerr << "tentomo: config error in " << path;
  if (e.line() > 0) std::cerr << ':' << e.line() << ':' << e.column();
  std::cerr << ": ";
  // The message already carries the location prefix when one is known.
  const std::string what = e.what();
  const auto pos = e.line() > 0 ? what.find(": ") : std::string::npos;
  std::cerr << (pos == std::string::npos ? what : what.substr(pos + 2)) << '\n';
  return kParseError;
}

std::optional<ExperimentConfig> load(const std::string& path, int& code) {
  try {
    return load_config(path);
  } catch (const ConfigError& e) {
    code = report_config_error(path, e);
  }
  return std::nullopt;
}

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int run(const std::string& config_path, const std::optional<std::string>& suite,
        const std::optional<std::uint64_t>& seed, const std::optional<std::string>& out_flag) {
  int code = kOk;
  auto parsed = load(config_path, code);
  if (!parsed) return code;
  if (suite) {
    if (!known_suite(*suite)) {
      std::cerr << "tentomo: --suite: unknown suite '" << *suite << "'\n";
      return kParseError;
    }
    parsed->suite = *suite;
  }
  if (seed) parsed->seed = *seed;

  ExperimentConfig cfg = resolve(*parsed);
  try {
    validate(cfg);
  } catch (const PreconditionError& e) {
    std::cerr << "tentomo: precondition violated: " << e.what() << '\n';
    return kPrecondition;
  }

  std::string dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
  if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) dir = env;
  if (out_flag) dir = *out_flag;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    std::cerr << "tentomo: output directory '" << dir << "' is not writable\n";
    return kPrecondition;
  }

  Report report(cfg.suite);
  try {
    report = run_suite(cfg);
  } catch (const Error& e) {
    std::cerr << "tentomo: " << cfg.suite << " aborted: " << e.what() << '\n';
    return kPrecondition;
  }

  const fs::path json_path = fs::path(dir) / (cfg.suite + ".json");
  const fs::path csv_path = fs::path(dir) / (cfg.suite + ".csv");
  std::ostringstream csv;
  report.write_csv(csv, cfg.timing);
  if (!write_file(json_path, report.to_json(cfg.timing)) || !write_file(csv_path, csv.str())) {
    std::cerr << "tentomo: cannot write reports to '" << dir << "'\n";
    return kPrecondition;
  }

  std::size_t shown = 0;
  for (const auto& c : report.checks()) {
    if (c.pass || c.informational) continue;
    if (shown++ == 20) {
      std::cout << "  ...\n";
      break;
    }
    std::cout << "  FAIL " << c.name << " [" << c.parameters << "] value " << c.value
              << (c.lower_bound ? " < " : " > ") << c.tolerance << '\n';
  }
  std::printf("%s: %zu checks, %zu failed, %.2f s\n", cfg.suite.c_str(), report.checks().size(),
              report.failures(), report.total_seconds);
  std::cout << "wrote " << json_path.string() << " and " << csv_path.string() << '\n';
  return report.passed() ? kOk : kResidualFailure;
}

int validate_only(const std::string& config_path) {
  int code = kOk;
  auto parsed = load(config_path, code);
  if (!parsed) return code;
  const ExperimentConfig cfg = resolve(*parsed);
  try {
    validate(cfg);
  } catch (const PreconditionError& e) {
    std::cerr << "tentomo: precondition violated: " << e.what() << '\n';
    return kPrecondition;
  }
  std::cout << "config ok: " << config_to_json(cfg) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric tensor tomography identity suites and experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> suite, out_dir;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "Run the suite named in the config and write JSON/CSV reports");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  std::string suite_help = "Override the config's suite:";
  for (const auto& s : suite_names()) suite_help += " " + s;
  run_cmd->add_option("--suite", suite, suite_help);
  run_cmd->add_option("--seed", seed, "Override the config's random seed");
  run_cmd->add_option("--out", out_dir, "Output directory (overrides OUTPUT_DIR and the config)");

  auto* validate_cmd = app.add_subcommand("validate", "Parse and check a config without running it");
  validate_cmd->add_option("--config", config_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParseError;
  }

  if (*run_cmd) return run(config_path, suite, seed, out_dir);
  return validate_only(config_path);
}
