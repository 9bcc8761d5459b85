#pragma once

namespace gnslab {

// Float-backend decision thresholds; ignored entirely in exact mode.
struct ToleranceConfig {
  double rank_tol = 1e-10;  // relative, for kernel/rank decisions
  double psd_tol = 1e-9;    // minimum-eigenvalue slack
  double spec_tol = 1e-8;   // eigenvalue clustering radius

  static ToleranceConfig uniform(double t) { return {t, t, t}; }
};

}  // namespace gnslab
