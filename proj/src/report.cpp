#include "finalg/report.hpp"

namespace finalg {

CheckEntry CheckEntry::skipped(std::string suite, std::string name,
                               std::string reason) {
  CheckEntry e;
  e.suite = std::move(suite);
  e.name = std::move(name);
  e.has_residual = false;
  e.pass = true;
  e.note = std::move(reason);
  return e;
}

bool ValidationReport::overall_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

CheckEntry* ValidationReport::find(const std::string& name) {
  for (auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

nlohmann::ordered_json entry_to_json(const CheckEntry& e) {
  nlohmann::ordered_json j;
  if (!e.suite.empty()) j["suite"] = e.suite;
  j["identity"] = e.name;
  if (e.has_residual)
    j["max_residual"] = e.residual;
  else
    j["max_residual"] = nullptr;
  j["tolerance"] = e.tol;
  j["samples"] = e.samples;
  if (e.seed >= 0) j["seed"] = e.seed;
  j["pass"] = e.pass;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

nlohmann::ordered_json ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) j["checks"].push_back(entry_to_json(e));
  j["overall_pass"] = overall_pass();
  return j;
}

nlohmann::ordered_json cplx_to_json(std::complex<double> v) {
  return nlohmann::ordered_json::array({v.real(), v.imag()});
}

}  // namespace finalg
