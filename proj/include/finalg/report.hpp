#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

// Check reporting shared by validation routines and the CLI. Serialization
// uses insertion-ordered JSON with fixed key order so identical runs produce
// byte-identical reports.

namespace finalg {

struct CheckEntry {
  std::string suite;          // empty for module-level reports
  std::string name;           // identity being checked
  double residual = 0.0;      // max residual over samples
  bool has_residual = true;   // false => serialized as null (skipped checks)
  double tol = 0.0;
  int samples = 0;
  long long seed = -1;        // -1 => omitted from JSON
  bool pass = true;
  std::string note;           // empty => omitted

  static CheckEntry skipped(std::string suite, std::string name,
                            std::string reason);
};

struct ValidationReport {
  std::vector<CheckEntry> entries;

  bool overall_pass() const;
  CheckEntry* find(const std::string& name);
  nlohmann::ordered_json to_json() const;
};

nlohmann::ordered_json entry_to_json(const CheckEntry& e);
nlohmann::ordered_json cplx_to_json(std::complex<double> v);

}  // namespace finalg
