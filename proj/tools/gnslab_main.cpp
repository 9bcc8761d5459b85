#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "gnslab/error.hpp"
#include "gnslab/scenario.hpp"
#include "gnslab/suites.hpp"

namespace {

bool use_color() {
  static const bool on = isatty(fileno(stdout)) && std::getenv("NO_COLOR") == nullptr;
  return on;
}

std::string paint(const std::string& text, const char* code) {
  if (!use_color()) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string tag(const std::string& status) {
  if (status == "pass") return "[" + paint("pass", "32") + "]";
  if (status == "fail") return "[" + paint("fail", "31") + "]";
  return "[" + paint(status, "33") + "]";
}

int write_report(const nlohmann::ordered_json& report, const std::string& out) {
  if (out.empty()) return 0;
  if (out == "-") {
    std::cout << report.dump(2) << "\n";
    return 0;
  }
  std::ofstream file(out);
  if (!file) {
    std::cerr << "error: cannot write report to " << out << "\n";
    return 2;
  }
  file << report.dump(2) << "\n";
  return 0;
}

struct Options {
  std::string scenario;
  std::string out;
  std::string backend;
  double tol = 0.0;
  bool has_tol = false;
  bool normalize = false;
  std::uint64_t seed = gnslab::kDefaultSuiteSeed;
  std::string only;
};

gnslab::RunOptions run_options(const Options& o) {
  gnslab::RunOptions opts;
  if (!o.backend.empty()) opts.backend = o.backend;
  if (o.has_tol) opts.tol = o.tol;
  opts.normalize = o.normalize;
  return opts;
}

int do_run(const Options& o) {
  nlohmann::ordered_json report;
  try {
    gnslab::Scenario sc = gnslab::Scenario::from_file(o.scenario);
    report = sc.run(run_options(o));
  } catch (const gnslab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (int rc = write_report(report, o.out)) return rc;
  const auto& s = report["summary"];
  if (o.out == "-") return s["all_passed"].get<bool>() ? 0 : 1;
  for (const auto& rec : report["records"]) {
    std::printf("%s %s (%s) %.2f ms\n", tag(rec["status"].get<std::string>()).c_str(),
                rec["name"].get<std::string>().c_str(), rec["op"].get<std::string>().c_str(),
                rec["wall_ms"].get<double>());
    if (rec.contains("error"))
      std::printf("       %s: %s\n", rec["error"]["code"].get<std::string>().c_str(),
                  rec["error"]["message"].get<std::string>().c_str());
  }
  std::printf("%d commands: %d passed, %d failed, %d errors\n", s["commands"].get<int>(),
              s["passed"].get<int>(), s["failed"].get<int>(), s["errors"].get<int>());
  return s["all_passed"].get<bool>() ? 0 : 1;
}

int do_validate(const Options& o) {
  std::vector<gnslab::Diagnostic> diags;
  try {
    gnslab::Scenario sc = gnslab::Scenario::from_file(o.scenario);
    diags = sc.validate(run_options(o));
  } catch (const gnslab::Error& e) {
    diags.push_back({e.code(), o.scenario, e.what()});
  }
  nlohmann::ordered_json report = gnslab::validate_report(diags);
  if (int rc = write_report(report, o.out)) return rc;
  if (o.out == "-") return diags.empty() ? 0 : 1;
  for (const auto& d : diags)
    std::printf("%s: %s: %s\n", d.where.c_str(), d.code.c_str(), d.message.c_str());
  if (diags.empty())
    std::printf("scenario is valid\n");
  else
    std::printf("%zu diagnostic%s\n", diags.size(), diags.size() == 1 ? "" : "s");
  return diags.empty() ? 0 : 1;
}

int do_suite(const Options& o) {
  std::vector<gnslab::SuiteResult> results;
  if (!o.only.empty()) {
    const auto& known = gnslab::suite_names();
    if (std::find(known.begin(), known.end(), o.only) == known.end()) {
      std::cerr << "error: unknown suite \"" << o.only << "\"\n";
      return 2;
    }
    results.push_back(gnslab::run_suite(o.only, o.seed));
  } else {
    results = gnslab::run_all_suites(o.seed);
  }
  nlohmann::ordered_json report = gnslab::suite_report(results, o.seed);
  if (int rc = write_report(report, o.out)) return rc;
  int passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;
  if (o.out == "-") return passed == static_cast<int>(results.size()) ? 0 : 1;
  passed = 0;
  double total_ms = 0.0;
  for (const auto& r : results) {
    std::printf("%s %-13s %8.1f ms (%d checks)\n", tag(r.pass ? "pass" : "fail").c_str(),
                r.name.c_str(), r.wall_ms, r.checks);
    if (!r.pass) std::printf("       %s\n", r.detail.c_str());
    passed += r.pass ? 1 : 0;
    total_ms += r.wall_ms;
  }
  std::printf("%zu suites: %d passed, %d failed (%.1f ms)\n", results.size(), passed,
              static_cast<int>(results.size()) - passed, total_ms);
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GNS construction workbench for finite-dimensional *-algebras"};
  app.require_subcommand(1);
  Options o;

  CLI::App* run = app.add_subcommand("run", "evaluate a scenario and report per-command results");
  run->add_option("--scenario", o.scenario, "scenario file (JSON)")->required();
  run->add_option("--out", o.out, "write the JSON report here ('-' for stdout)");
  run->add_option("--backend", o.backend, "override the scenario backend")
      ->check(CLI::IsMember({"exact", "float"}));
  run->add_option("--tol", o.tol, "override all tolerances")->check(CLI::PositiveNumber);
  run->add_flag("--normalize", o.normalize, "normalize spectral distributions to total 1");

  CLI::App* validate = app.add_subcommand("validate", "statically check a scenario");
  validate->add_option("--scenario", o.scenario, "scenario file (JSON)")->required();
  validate->add_option("--out", o.out, "write the JSON report here ('-' for stdout)");
  validate->add_option("--backend", o.backend, "override the scenario backend")
      ->check(CLI::IsMember({"exact", "float"}));

  CLI::App* suite = app.add_subcommand("suite", "run the built-in property suites");
  suite->add_option("--out", o.out, "write the JSON report here ('-' for stdout)");
  suite->add_option("--seed", o.seed, "seed for the suite generators");
  suite->add_option("--only", o.only, "run a single suite by name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (o.has_tol = run->count("--tol") > 0; o.has_tol && o.tol <= 0.0) {
    std::cerr << "error: --tol must be positive\n";
    return 2;
  }

  if (run->parsed()) return do_run(o);
  if (validate->parsed()) return do_validate(o);
  return do_suite(o);
}
