#pragma once

#include <cstdint>
#include <string>

#include "finalg/report.hpp"
#include "finalg/scenario.hpp"

namespace finalg {

// Knobs shared by every check suite.  tol_overridden switches every
// identity entry to tol_identity; otherwise each entry keeps its own
// default tolerance.
struct SuiteOptions {
  int samples = 20;
  uint64_t seed = 42;
  double tol_identity = 1e-8;
  double tol_integral = 1e-3;
  bool tol_overridden = false;
  double box_lo = -4.0;
  double box_hi = 4.0;
  int grid = 64;
  long long budget = 1LL << 24;
};

// Structural validation only: algebroid axioms, homogeneity,
// pseudoconvexity.  Used by the validate command.
ValidationReport validation_suites(const Scenario& sc, const SuiteOptions& o);

ValidationReport suite_algebroid(const Scenario& sc, const SuiteOptions& o);
ValidationReport suite_connection(const Scenario& sc, const SuiteOptions& o);
ValidationReport suite_laplace(const Scenario& sc, const SuiteOptions& o);
ValidationReport suite_forms(const Scenario& sc, const SuiteOptions& o);
ValidationReport suite_integrals(const Scenario& sc, const SuiteOptions& o);

// which: "all" or one of algebroid|connection|laplace|forms|integrals.
ValidationReport run_suites(const Scenario& sc, const std::string& which,
                            const SuiteOptions& o);

}  // namespace finalg
