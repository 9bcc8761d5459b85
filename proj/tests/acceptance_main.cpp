#include <cstdio>
#include <string>

#include "gnslab/suites.hpp"

// Acceptance gate: every randomized property suite must pass inside its time
// budget, deterministically under the default seed. One line per criterion.

int main() {
  struct Row {
    const char* name;
    const char* text;
    double budget_ms;
  };
  static const Row rows[] = {
      {"functoriality", "transports compose and preserve the form on 100 exact pairs", 10000},
      {"monoidality", "monoidal comparison unitary and natural on 50 exact pairs", 5000},
      {"stinespring", "Kraus maps dilate with zero/1e-9 residual on 50 probes", 20000},
      {"born", "qubit weights are 1/2 each; weights sum to phi(1) on 100 observables", 5000},
      {"ee_link", "eigenvector, variance and weight conditions agree on 100 probes", 10000},
      {"collapse", "conditioning reproduces phi(P), P.Omega and the action of P", 5000},
      {"duality", "kernel/CP duality roundtrips and reverses composition on 100 kernels", 5000},
      {"prism", "transport matches row-averaging on supports for 50 kernels", 5000},
      {"normalization", "cross-normalization rejected 100/100; witnesses multiply", 2000},
      {"symmetry", "regular S3 action gives a unitary, covariant 6-dim module", 5000},
      {"dinaturality", "presentation square commutes on 100 exact probes", 5000},
      {"scattering", "W-conjugation transports with bounded probabilities, 20 unitaries", 5000},
  };

  bool all_pass = true;
  double total_ms = 0.0;
  int index = 0;
  for (const Row& row : rows) {
    gnslab::SuiteResult r = gnslab::run_suite(row.name);
    bool in_budget = r.wall_ms < row.budget_ms;
    bool ok = r.pass && in_budget;
    all_pass = all_pass && ok;
    total_ms += r.wall_ms;
    std::printf("[%s] %2d %-13s %s (%d probes, %.0f ms)\n", ok ? "PASS" : "FAIL", ++index,
                row.name, row.text, r.checks, r.wall_ms);
    if (!r.pass) std::printf("       first failure: %s\n", r.detail.c_str());
    if (!in_budget) std::printf("       over budget: %.0f ms >= %.0f ms\n", r.wall_ms, row.budget_ms);
  }
  bool total_ok = total_ms < 60000.0;
  all_pass = all_pass && total_ok;
  std::printf("%s total %.0f ms across %d criteria\n", all_pass ? "[PASS]" : "[FAIL]",
              total_ms, index);
  return all_pass ? 0 : 1;
}
