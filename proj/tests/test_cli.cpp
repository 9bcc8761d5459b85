#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "gnslab/scenario.hpp"
#include "gnslab/suites.hpp"
#include "test_support.hpp"

using gnslab::Diagnostic;
using gnslab::RunOptions;
using gnslab::Scenario;
using oj = nlohmann::ordered_json;

namespace {

std::string wrap(const std::string& backend, const std::string& decls,
                 const std::string& cmds) {
  return std::string("{\"version\": \"gnslab-scenario/1\", \"backend\": \"") + backend +
         "\", \"declarations\": [" + decls + "], \"commands\": [" + cmds + "]}";
}

const char* kQubitDecls =
    R"({"name": "m2", "kind": "matrix_algebra", "n": 2},
       {"name": "phi", "kind": "vectorial_state", "algebra": "m2", "vector": [1, 0]})";

}  // namespace

TEST_CASE("malformed JSON reports a parse error with a location") {
  std::string code = testsup::error_code_of(
      [] { Scenario::from_text("{\n  \"version\": oops\n}", "broken.json"); });
  CHECK(code == "ParseError");
  try {
    Scenario::from_text("{\n  \"version\": oops\n}", "broken.json");
  } catch (const gnslab::Error& e) {
    std::string what = e.what();
    CHECK(what.find("broken.json:2:") != std::string::npos);
  }
}

TEST_CASE("validate flags structural problems with one diagnostic each") {
  SUBCASE("dangling reference is named") {
    Scenario s = Scenario::from_text(
        wrap("exact", R"({"name": "m2", "kind": "matrix_algebra", "n": 2})",
             R"({"op": "gns", "state": "psi"})"));
    std::vector<Diagnostic> diags = s.validate();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "UnresolvedReference");
    CHECK(diags[0].where == "commands[0].state");
    CHECK(diags[0].message.find("\"psi\"") != std::string::npos);
  }
  SUBCASE("duplicate declaration names") {
    Scenario s = Scenario::from_text(
        wrap("exact",
             R"({"name": "a", "kind": "matrix_algebra", "n": 1},
                {"name": "a", "kind": "matrix_algebra", "n": 2})",
             ""));
    std::vector<Diagnostic> diags = s.validate();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "DuplicateLabel");
  }
  SUBCASE("exact scalar literal in a float scenario") {
    Scenario s = Scenario::from_text(
        wrap("float",
             R"({"name": "c1", "kind": "function_algebra", "points": ["p"]},
                {"name": "mu", "kind": "state", "algebra": "c1", "functional": ["1/2"]})",
             ""));
    std::vector<Diagnostic> diags = s.validate();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "BackendMismatch");
    CHECK(diags[0].where == "declarations[1].functional[0]");
  }
  SUBCASE("float literal in an exact scenario") {
    Scenario s = Scenario::from_text(
        wrap("exact",
             R"({"name": "c1", "kind": "function_algebra", "points": ["p"]},
                {"name": "mu", "kind": "state", "algebra": "c1", "functional": [0.5]})",
             ""));
    std::vector<Diagnostic> diags = s.validate();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "BackendMismatch");
  }
  SUBCASE("backend override changes which literals are acceptable") {
    Scenario s = Scenario::from_text(
        wrap("exact",
             R"({"name": "c1", "kind": "function_algebra", "points": ["p"]},
                {"name": "mu", "kind": "state", "algebra": "c1", "functional": [0.5]})",
             ""));
    RunOptions as_float;
    as_float.backend = "float";
    CHECK(s.validate(as_float).empty());
  }
  SUBCASE("shape mismatches are caught statically") {
    Scenario s = Scenario::from_text(
        wrap("exact",
             R"({"name": "m2", "kind": "matrix_algebra", "n": 2},
                {"name": "x", "kind": "element", "algebra": "m2", "coords": [1, 0]})",
             ""));
    std::vector<Diagnostic> diags = s.validate();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "ShapeMismatch");
  }
  SUBCASE("unknown op") {
    Scenario s = Scenario::from_text(wrap("exact", "", R"({"op": "frobnicate"})"));
    std::vector<Diagnostic> diags = s.validate();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "ParseError");
  }
  SUBCASE("wrong version string") {
    Scenario s = Scenario::from_text(
        R"({"version": "gnslab-scenario/9", "backend": "exact",
            "declarations": [], "commands": []})");
    std::vector<Diagnostic> diags = s.validate();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "ParseError");
    CHECK(diags[0].where == "version");
  }
}

TEST_CASE("run refuses structurally broken scenarios") {
  Scenario s = Scenario::from_text(
      wrap("exact", "", R"({"op": "gns", "state": "psi"})"), "t.json");
  std::string code = testsup::error_code_of([&] { s.run(); });
  CHECK(code == "UnresolvedReference");
}

TEST_CASE("run reports GNS data for a vector state on M2") {
  Scenario s = Scenario::from_text(
      wrap("exact", kQubitDecls,
           R"({"name": "space", "op": "gns", "state": "phi"},
              {"op": "is_positive", "state": "phi"})"));
  oj report = s.run();
  CHECK(report["version"] == "gnslab-report/1");
  CHECK(report["mode"] == "run");
  CHECK(report["backend"] == "exact");
  REQUIRE(report["records"].size() == 2);

  const oj& space = report["records"][0];
  CHECK(space["name"] == "space");
  CHECK(space["status"] == "pass");
  CHECK(space["payload"]["dim"] == 2);
  CHECK(space["payload"]["gram"] == oj::parse(R"([["1", "0"], ["0", "1"]])"));
  CHECK(space["payload"]["omega"] == oj::parse(R"(["1", "0"])"));

  const oj& pos = report["records"][1];
  CHECK(pos["name"] == "is_positive#1");
  CHECK(pos["payload"]["positive"] == true);
  CHECK(report["summary"]["all_passed"] == true);
}

TEST_CASE("domain failures become fail records, not crashes") {
  Scenario s = Scenario::from_text(
      wrap("exact",
           R"({"name": "c2", "kind": "function_algebra", "points": ["x0", "x1"]},
              {"name": "crooked", "kind": "state", "algebra": "c2", "functional": ["i", "1"]})",
           R"({"op": "gns", "state": "crooked"})"));
  oj report = s.run();
  const oj& rec = report["records"][0];
  CHECK(rec["status"] == "fail");
  CHECK(rec["error"]["code"] == "NotStarLinear");
  CHECK(report["summary"]["failed"] == 1);
  CHECK(report["summary"]["all_passed"] == false);
}

TEST_CASE("born weights normalize on request") {
  Scenario s = Scenario::from_text(
      wrap("float",
           R"({"name": "m2", "kind": "matrix_algebra", "n": 2},
              {"name": "sz", "kind": "element", "algebra": "m2", "coords": [1, 0, 0, -1]},
              {"name": "plus", "kind": "vectorial_state", "algebra": "m2", "vector": [1, 1]})",
           R"({"op": "born", "observable": "sz", "state": "plus"})"));
  oj plain = s.run();
  const oj& payload = plain["records"][0]["payload"];
  REQUIRE(payload["entries"].size() == 2);
  CHECK(payload["entries"][0]["eigenvalue"] == -1.0);
  CHECK(payload["entries"][0]["weight"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(payload["total"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

  RunOptions norm;
  norm.normalize = true;
  oj scaled = s.run(norm);
  const oj& np = scaled["records"][0]["payload"];
  CHECK(np["entries"][0]["weight"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(np["entries"][1]["weight"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(np["total"] == 1.0);
}

TEST_CASE("born on the exact backend fails with a backend error record") {
  Scenario s = Scenario::from_text(
      wrap("exact",
           R"({"name": "m2", "kind": "matrix_algebra", "n": 2},
              {"name": "sz", "kind": "element", "algebra": "m2", "coords": [1, 0, 0, -1]},
              {"name": "plus", "kind": "vectorial_state", "algebra": "m2", "vector": [1, 1]})",
           R"({"op": "born", "observable": "sz", "state": "plus"})"));
  oj report = s.run();
  CHECK(report["records"][0]["status"] == "fail");
  CHECK(report["records"][0]["error"]["code"] == "BackendError");
}

TEST_CASE("evolution composes pullbacks of stochastic maps") {
  Scenario s = Scenario::from_text(
      wrap("exact",
           R"({"name": "cx", "kind": "function_algebra", "points": ["a", "b"]},
              {"name": "cy", "kind": "function_algebra", "points": ["c", "d"]},
              {"name": "mu", "kind": "state", "algebra": "cx", "functional": ["1/3", "2/3"]},
              {"name": "dual", "kind": "linear_map", "dom": "cy", "cod": "cx",
               "matrix": [["1/2", "1/2"], ["0", "1"]]})",
           R"({"op": "evolve", "start": "mu", "maps": ["dual"]})"));
  oj report = s.run();
  const oj& payload = report["records"][0]["payload"];
  CHECK(payload["steps"] == 1);
  CHECK(payload["functional"] == oj::parse(R"(["1/6", "5/6"])"));
  CHECK(payload["normalization"] == "1");
}

TEST_CASE("reports carry wall time outside the payload") {
  Scenario s = Scenario::from_text(
      wrap("exact", kQubitDecls, R"({"op": "gns", "state": "phi"})"));
  oj report = s.run();
  const oj& rec = report["records"][0];
  CHECK(rec.contains("wall_ms"));
  CHECK(!rec["payload"].contains("wall_ms"));

  oj a = s.run();
  oj b = s.run();
  a["records"][0].erase("wall_ms");
  b["records"][0].erase("wall_ms");
  CHECK(a == b);
}

TEST_CASE("validate report and suite report have the pinned shapes") {
  std::vector<Diagnostic> diags = {{"UnresolvedReference", "commands[0].state", "x"}};
  oj vr = gnslab::validate_report(diags);
  CHECK(vr["version"] == "gnslab-report/1");
  CHECK(vr["mode"] == "validate");
  CHECK(vr["summary"]["count"] == 1);
  CHECK(vr["summary"]["valid"] == false);
  CHECK(gnslab::validate_report({})["summary"]["valid"] == true);

  gnslab::SuiteResult sr = gnslab::run_suite("born", 7);
  CHECK(sr.pass);
  oj rep = gnslab::suite_report({sr}, 7);
  CHECK(rep["mode"] == "suite");
  CHECK(rep["seed"] == 7);
  CHECK(rep["records"][0]["name"] == "born");
  CHECK(rep["records"][0]["status"] == "pass");
  CHECK(rep["summary"]["all_passed"] == true);

  std::string code = testsup::error_code_of([] { gnslab::run_suite("nope", 1); });
  CHECK(code == "UnresolvedReference");
}

TEST_CASE("suite names stay stable") {
  const std::vector<std::string>& names = gnslab::suite_names();
  REQUIRE(names.size() == 12);
  CHECK(names.front() == "functoriality");
  CHECK(names.back() == "scattering");
}
