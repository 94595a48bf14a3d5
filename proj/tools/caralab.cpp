// Command line front end: runs the verification suite over a domain
// zoo, re-checks stored reports, and prints the built-in zoo config.
//
// Exit codes: 0 all checks pass, 1 at least one check failed,
// 2 usage or configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "caralab/harness.hpp"
#include "caralab/types.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw caralab::ConfigError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw caralab::ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw caralab::ConfigError("cannot write '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for invariant metric volume comparisons"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 20260814;
  long long samples = 1000000;
  long budget = 20000;
  std::string out_path = "report.json";
  std::string format = "json";

  CLI::App* run = app.add_subcommand(
      "run", "run every check on a domain zoo and write a report");
  run->add_option("--config", config_path,
                  "zoo config JSON (defaults to the built-in zoo)");
  run->add_option("--seed", seed, "root random seed");
  run->add_option("--samples", samples, "Monte Carlo samples per volume");
  run->add_option("--budget", budget, "optimizer evaluation budget");
  run->add_option("--out", out_path, "output report path");
  run->add_option("--format", format, "report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string report_path;
  CLI::App* check = app.add_subcommand(
      "check", "re-evaluate the verdicts stored in a JSON report");
  check->add_option("report", report_path, "report JSON path")->required();

  CLI::App* zoo =
      app.add_subcommand("zoo", "print the built-in zoo config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (zoo->parsed()) {
      std::cout << caralab::builtin_zoo_json() << "\n";
      return 0;
    }
    if (check->parsed()) {
      const caralab::InequalityReport report =
          caralab::report_from_json(read_file(report_path));
      const caralab::CheckSummary summary = caralab::check_report(report);
      std::cout << summary.text;
      return summary.exit_code;
    }
    const std::string config_text =
        config_path.empty() ? caralab::builtin_zoo_json()
                            : read_file(config_path);
    const std::vector<caralab::ZooEntry> entries =
        caralab::parse_domain_spec(config_text);
    caralab::SuiteParams params;
    params.seed = seed;
    params.samples = samples;
    params.budget = budget;
    const caralab::InequalityReport report =
        caralab::run_suite(entries, params);
    write_file(out_path, caralab::emit(report, format));
    const caralab::CheckSummary summary = caralab::check_report(report);
    std::cout << summary.text;
    std::cout << "report written to " << out_path << "\n";
    return summary.exit_code;
  } catch (const caralab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
