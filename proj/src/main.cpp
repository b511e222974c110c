#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "finalg/forms.hpp"
#include "finalg/quadrature.hpp"
#include "finalg/scenario.hpp"
#include "finalg/suites.hpp"

namespace {

using finalg::cplx;
using finalg::Expr;
using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<double, double> parse_box(const std::string& s) {
  auto pos = s.find("..");
  if (pos == std::string::npos || pos == 0 || pos + 2 >= s.size()) {
    throw UsageError("box must be written as 'lo..hi'");
  }
  double lo = 0, hi = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(s.substr(0, pos), &used);
    if (used != pos) throw std::invalid_argument(s);
    std::string tail = s.substr(pos + 2);
    hi = std::stod(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw UsageError("box must be written as 'lo..hi'");
  }
  if (!(lo < hi)) throw UsageError("box bounds must satisfy lo < hi");
  return {lo, hi};
}

ordered_json json_cplx(cplx v) { return ordered_json::array({v.real(), v.imag()}); }

ordered_json json_point(const finalg::EvalPoint& pt) {
  ordered_json out;
  out["z"] = ordered_json::array();
  for (cplx v : pt.z) out["z"].push_back(json_cplx(v));
  out["u"] = ordered_json::array();
  for (cplx v : pt.u) out["u"].push_back(json_cplx(v));
  return out;
}

ordered_json eval_matrix(const std::vector<std::vector<Expr>>& M,
                         const finalg::EvalPoint& pt) {
  ordered_json out = ordered_json::array();
  for (const auto& row : M) {
    ordered_json jrow = ordered_json::array();
    for (const Expr& e : row) jrow.push_back(json_cplx(finalg::eval_expr(e, pt)));
    out.push_back(std::move(jrow));
  }
  return out;
}

ordered_json eval_cube(const std::vector<std::vector<std::vector<Expr>>>& T,
                       const finalg::EvalPoint& pt) {
  ordered_json out = ordered_json::array();
  for (const auto& M : T) out.push_back(eval_matrix(M, pt));
  return out;
}

ordered_json eval_vector(const std::vector<Expr>& v,
                         const finalg::EvalPoint& pt) {
  ordered_json out = ordered_json::array();
  for (const Expr& e : v) out.push_back(json_cplx(finalg::eval_expr(e, pt)));
  return out;
}

std::string form_key(const std::vector<int>& A, const std::vector<int>& B) {
  std::string out;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(A[i]);
  }
  out += '|';
  for (std::size_t j = 0; j < B.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(B[j]);
  }
  return out;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_validate(const std::string& path) {
  finalg::Scenario sc = finalg::load_scenario_file(path);
  finalg::SuiteOptions o;
  finalg::ValidationReport rep = finalg::validation_suites(sc, o);
  ordered_json out;
  out["scenario"] = path;
  ordered_json body = rep.to_json();
  for (auto& [k, v] : body.items()) out[k] = v;
  emit(out);
  return rep.overall_pass() ? 0 : 1;
}

int cmd_tensors(const std::string& path, const std::string& at) {
  finalg::Scenario sc = finalg::load_scenario_file(path);
  finalg::EvalPoint pt = finalg::parse_point(at, sc.spec.n, sc.spec.m);
  ordered_json out;
  out["scenario"] = path;
  out["at"] = json_point(pt);
  out["h"] = eval_matrix(sc.fd.h, pt);
  out["h_inv"] = eval_matrix(sc.fd.h_inv, pt);
  out["det"] = json_cplx(finalg::eval_expr(sc.fd.det_h, pt));
  out["N"] = eval_matrix(sc.cd.N, pt);
  out["L"] = eval_cube(sc.cd.L, pt);
  out["C"] = eval_cube(sc.cd.C_lin, pt);
  out["R"] = eval_cube(sc.cd.R, pt);
  ordered_json traces;
  traces["L"] = eval_vector(sc.cd.trace_L, pt);
  traces["C"] = eval_vector(sc.cd.trace_C, pt);
  traces["S"] = eval_vector(sc.cd.trace_S, pt);
  out["traces"] = traces;
  emit(out);
  return 0;
}

int cmd_laplacian(const std::string& path, const std::string& fn,
                  const std::string& form, const std::string& kind,
                  const std::string& at) {
  if (fn.empty() == form.empty()) {
    throw UsageError("exactly one of --fn / --form is required");
  }
  finalg::Scenario sc = finalg::load_scenario_file(path);
  finalg::EvalPoint pt = finalg::parse_point(at, sc.spec.n, sc.spec.m);

  if (!fn.empty()) {
    Expr f;
    auto it = sc.named_functions.find(fn);
    if (it != sc.named_functions.end()) {
      f = it->second;
    } else {
      f = finalg::parse_expr(fn, sc.spec.n, sc.spec.m);
    }
    Expr result;
    if (kind == "h") {
      result = finalg::laplacian_h(f, sc.fd, sc.cd);
    } else if (kind == "v") {
      result = finalg::laplacian_v(f, sc.fd, sc.cd);
    } else {
      finalg::HorizontalForm scalar =
          finalg::HorizontalForm::scalar(sc.spec.m, f);
      finalg::HorizontalForm boxed =
          (kind == "box") ? finalg::box_h(scalar, sc.fd, sc.cd)
                          : finalg::box_h_kahler(scalar, sc.fd, sc.cd);
      result = boxed.get({}, {});
    }
    ordered_json out;
    out["scenario"] = path;
    out["kind"] = kind;
    out["fn"] = fn;
    out["at"] = json_point(pt);
    out["result_expr"] = finalg::to_string(result);
    out["value"] = json_cplx(finalg::eval_expr(result, pt));
    emit(out);
    return 0;
  }

  if (kind != "box" && kind != "box-kahler") {
    throw UsageError("--form requires --kind box or box-kahler");
  }
  auto it = sc.named_forms.find(form);
  if (it == sc.named_forms.end()) {
    throw UsageError("scenario has no form named '" + form + "'");
  }
  finalg::HorizontalForm boxed = (kind == "box")
                                     ? finalg::box_h(it->second, sc.fd, sc.cd)
                                     : finalg::box_h_kahler(it->second, sc.fd,
                                                            sc.cd);
  ordered_json out;
  out["scenario"] = path;
  out["kind"] = kind;
  out["form"] = form;
  out["p"] = boxed.p;
  out["q"] = boxed.q;
  out["at"] = json_point(pt);
  ordered_json comps;
  for (const auto& A : finalg::increasing_tuples(boxed.m, boxed.p)) {
    for (const auto& B : finalg::increasing_tuples(boxed.m, boxed.q)) {
      Expr e = boxed.get(A, B);
      ordered_json comp;
      comp["expr"] = finalg::to_string(e);
      comp["value"] = json_cplx(finalg::eval_expr(e, pt));
      comps[form_key(A, B)] = comp;
    }
  }
  out["components"] = comps;
  emit(out);
  return 0;
}

int cmd_check(const std::string& path, const std::string& suite,
              const finalg::SuiteOptions& o) {
  finalg::Scenario sc = finalg::load_scenario_file(path);
  finalg::ValidationReport rep = finalg::run_suites(sc, suite, o);
  ordered_json out;
  out["scenario"] = path;
  out["suite"] = suite;
  ordered_json body = rep.to_json();
  for (auto& [k, v] : body.items()) out[k] = v;
  emit(out);
  return rep.overall_pass() ? 0 : 1;
}

int cmd_integrate(const std::string& path, const std::string& field,
                  double lo, double hi, int grid, long long budget) {
  finalg::Scenario sc = finalg::load_scenario_file(path);
  auto it = sc.named_sections.find(field);
  if (it == sc.named_sections.end()) {
    throw UsageError("scenario has no section named '" + field + "'");
  }
  const finalg::SectionField& Z = it->second;
  const int m = sc.spec.m;
  if (static_cast<int>(Z.Zh.size()) != m) {
    throw UsageError("section '" + field + "' is not horizontal");
  }
  finalg::IntegrationDomain dom =
      finalg::IntegrationDomain::box(sc.spec.n, m, lo, hi, grid);
  dom.budget = budget;
  dom.check();

  Expr weight = finalg::volume_density(sc.fd).density;
  std::vector<Expr> trace_terms, plain_terms, ctrace_terms, cplain_terms;
  for (int a = 1; a <= m; a++) {
    trace_terms.push_back(finalg::delta_deriv(Z.Zh[a - 1], a, false, sc.cd));
    plain_terms.push_back(finalg::delta_deriv(Z.Zh[a - 1], a, false, sc.cd));
    ctrace_terms.push_back(
        finalg::delta_deriv(finalg::ex_conj(Z.Zh[a - 1]), a, true, sc.cd));
    cplain_terms.push_back(
        finalg::delta_deriv(finalg::ex_conj(Z.Zh[a - 1]), a, true, sc.cd));
    for (int e = 1; e <= m; e++) {
      Expr t = finalg::ex_mul(Z.Zh[e - 1], sc.cd.L[a - 1][e - 1][a - 1]);
      trace_terms.push_back(t);
      plain_terms.push_back(t);
      Expr ct = finalg::ex_mul(finalg::ex_conj(Z.Zh[e - 1]),
                               finalg::ex_conj(sc.cd.L[a - 1][e - 1][a - 1]));
      ctrace_terms.push_back(ct);
      cplain_terms.push_back(ct);
    }
  }
  for (int a = 0; a < m; a++) {
    trace_terms.push_back(
        finalg::ex_neg(finalg::ex_mul(Z.Zh[a], sc.cd.trace_L[a])));
    ctrace_terms.push_back(finalg::ex_neg(finalg::ex_mul(
        finalg::ex_conj(Z.Zh[a]), finalg::ex_conj(sc.cd.trace_L[a]))));
  }

  ordered_json out;
  out["scenario"] = path;
  out["field"] = field;
  out["box"] = ordered_json::array({lo, hi});
  out["grid"] = grid;
  out["integral"] =
      json_cplx(finalg::integrate(finalg::ex_sum(std::move(trace_terms)),
                                  weight, dom));
  out["conjugate_integral"] =
      json_cplx(finalg::integrate(finalg::ex_sum(std::move(ctrace_terms)),
                                  weight, dom));
  if (finalg::is_kahler(sc.cd, 20, 42, 1e-9)) {
    out["kahler_integral"] =
        json_cplx(finalg::integrate(finalg::ex_sum(std::move(plain_terms)),
                                    weight, dom));
    out["kahler_conjugate_integral"] =
        json_cplx(finalg::integrate(finalg::ex_sum(std::move(cplain_terms)),
                                    weight, dom));
  }
  out["tolerance_note"] =
      "midpoint rule on a uniform grid; for decaying sections the result "
      "should vanish to within the truncation floor of the box";
  emit(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chern-Finsler connection and Laplacian toolkit for "
               "holomorphic Lie algebroid scenarios"};
  app.require_subcommand(1);

  std::string path, at, fn, form, kind = "h", suite = "all", field, box_arg;
  finalg::SuiteOptions opts;
  double tol = 0;
  int grid = 64;
  long long budget = opts.budget;

  CLI::App* c_validate =
      app.add_subcommand("validate", "Run structural validation checks");
  c_validate->add_option("scenario", path, "scenario JSON file")->required();

  CLI::App* c_tensors = app.add_subcommand(
      "tensors", "Evaluate metric, connection, and curvature tensors");
  c_tensors->add_option("scenario", path, "scenario JSON file")->required();
  c_tensors->add_option("--at", at, "evaluation point, e.g. 'z1=1+2i,u1=1'")
      ->required();

  CLI::App* c_laplacian = app.add_subcommand(
      "laplacian", "Apply a Laplacian to a function or a stored form");
  c_laplacian->add_option("scenario", path, "scenario JSON file")->required();
  c_laplacian->add_option("--fn", fn,
                          "expression or named function to differentiate");
  c_laplacian->add_option("--form", form, "named (p,q)-form to box");
  c_laplacian->add_option("--kind", kind, "h, v, box, or box-kahler")
      ->check(CLI::IsMember({"h", "v", "box", "box-kahler"}));
  c_laplacian->add_option("--at", at, "evaluation point")->required();

  CLI::App* c_check = app.add_subcommand(
      "check", "Run identity suites and report pass/fail entries");
  c_check->add_option("scenario", path, "scenario JSON file")->required();
  c_check->add_option("--suite", suite,
                      "all, algebroid, connection, laplace, forms, integrals");
  c_check->add_option("--samples", opts.samples, "sample points per identity");
  c_check->add_option("--seed", opts.seed, "sampling seed");
  CLI::Option* tol_opt =
      c_check->add_option("--tol", tol, "override every entry tolerance");
  c_check->add_option("--box", box_arg, "integration box as 'lo..hi'");
  c_check->add_option("--grid", opts.grid, "grid points per axis");
  c_check->add_option("--budget", opts.budget, "max total grid points");

  CLI::App* c_integrate = app.add_subcommand(
      "integrate", "Integrate the divergence identity for a stored section");
  c_integrate->add_option("scenario", path, "scenario JSON file")->required();
  c_integrate->add_option("--field", field, "named horizontal section")
      ->required();
  c_integrate->add_option("--box", box_arg, "integration box as 'lo..hi'");
  c_integrate->add_option("--grid", grid, "grid points per axis");
  c_integrate->add_option("--budget", budget, "max total grid points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_validate->parsed()) return cmd_validate(path);
    if (c_tensors->parsed()) return cmd_tensors(path, at);
    if (c_laplacian->parsed()) return cmd_laplacian(path, fn, form, kind, at);
    if (c_check->parsed()) {
      if (tol_opt->count() > 0) {
        opts.tol_identity = tol;
        opts.tol_integral = tol;
        opts.tol_overridden = true;
      }
      if (!box_arg.empty()) {
        auto [lo, hi] = parse_box(box_arg);
        opts.box_lo = lo;
        opts.box_hi = hi;
      }
      return cmd_check(path, suite, opts);
    }
    if (c_integrate->parsed()) {
      double lo = -4.0, hi = 4.0;
      if (!box_arg.empty()) std::tie(lo, hi) = parse_box(box_arg);
      return cmd_integrate(path, field, lo, hi, grid, budget);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
