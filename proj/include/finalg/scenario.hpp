#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "finalg/calculus.hpp"
#include "finalg/connection.hpp"
#include "finalg/finsler.hpp"
#include "finalg/forms.hpp"

namespace finalg {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fully compiled scenario file: the algebroid and metric are built during
// loading, so any structural problem surfaces as an exception with the
// offending field named.
struct Scenario {
  std::string id;  // source path, or a caller-supplied label
  AlgebroidSpec spec;
  Expr F;
  FinslerData fd;
  ConnectionData cd;
  std::map<std::string, Expr> named_functions;
  std::map<std::string, SectionField> named_sections;
  std::map<std::string, HorizontalForm> named_forms;
};

Scenario load_scenario_text(const std::string& text, const std::string& id);
Scenario load_scenario_file(const std::string& path);

// "1+2i", "-0.5i", "3", "1e-3-2e4i" -> complex value.
cplx parse_complex_literal(const std::string& s);

// "z1=1+0.5i,u1=2,u2=-1i" -> evaluation point; every coordinate not named
// defaults to zero.  Dimension-checked against (n, m).
EvalPoint parse_point(const std::string& s, int n, int m);

}  // namespace finalg
