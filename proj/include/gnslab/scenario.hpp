#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnslab/suites.hpp"

namespace gnslab {

// ---------------------------------------------------------------------------
// Scenario files ("gnslab-scenario/1"): a backend, optional tolerance
// overrides, an ordered list of named declarations, and a list of commands
// whose arguments reference earlier declarations by name. Reports
// ("gnslab-report/1") carry one record per command, in order; wall-clock
// times live outside the deterministic payload sections.

struct RunOptions {
  std::optional<std::string> backend;  // overrides the scenario backend
  std::optional<double> tol;           // overrides all three tolerances
  bool normalize = false;              // divide reported distributions by phi(1)
};

struct Diagnostic {
  std::string code;     // stable error code, e.g. "UnresolvedReference"
  std::string where;    // JSON path, e.g. "declarations[2].coords[1]"
  std::string message;
};

class Scenario {
 public:
  // Throws Error("ParseError", "<origin>:<line>:<column>: ...") on bad JSON.
  static Scenario from_file(const std::string& path);
  static Scenario from_text(const std::string& text, const std::string& origin = "<memory>");

  // The scenario's own backend field ("exact" or "float"), before overrides.
  std::string backend() const;

  // Full static check: structure, duplicate names, reference resolution,
  // shapes, and scalar-literal/backend consistency. Never executes commands.
  std::vector<Diagnostic> validate(const RunOptions& opts = {}) const;

  // Executes every command in order and returns the report. Structural
  // problems (the same ones validate reports) throw Error instead of
  // running; domain failures inside a command become "fail" records.
  nlohmann::ordered_json run(const RunOptions& opts = {}) const;

 private:
  nlohmann::json doc_;
  std::string origin_;
};

// Report fragments shared by the command-line front end.
nlohmann::ordered_json validate_report(const std::vector<Diagnostic>& diags);
nlohmann::ordered_json suite_report(const std::vector<SuiteResult>& results,
                                    std::uint64_t seed);

}  // namespace gnslab
