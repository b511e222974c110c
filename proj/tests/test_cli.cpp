#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "finalg/forms.hpp"
#include "finalg/scenario.hpp"
#include "testutil.hpp"

using namespace finalg;
using nlohmann::json;

namespace {

bool approx(cplx a, cplx b) { return testutil::approx(a, b, 1e-12); }

std::string cli_path() {
  const char* e = std::getenv("FINALG_BIN");
  return e ? e : "build/finalg";
}

std::string fixtures_dir() {
  const char* e = std::getenv("FINALG_FIXTURES");
  return e ? e : "tests/fixtures";
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  CliResult r;
  std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = "/tmp/" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("scenario files load with all named entities") {
  Scenario sc = load_scenario_file(fixtures_dir() + "/fixture_c.json");
  CHECK(sc.spec.n == 1);
  CHECK(sc.spec.m == 2);
  CHECK(sc.named_functions.count("zz") == 1);
  CHECK(sc.named_sections.count("gauss") == 1);
  CHECK(sc.named_sections.count("unit_x2") == 1);
  CHECK(sc.named_forms.count("phi01") == 1);
  const HorizontalForm& phi = sc.named_forms.at("phi01");
  CHECK(phi.p == 0);
  CHECK(phi.q == 1);
  EvalPoint pt{{cplx(2, 0)}, {cplx(0, 0), cplx(3, 0)}};
  CHECK(approx(eval_expr(phi.get({}, {2}), pt), cplx(6, 0)));
}

TEST_CASE("scenario parsing rejects malformed input") {
  CHECK_THROWS_AS(load_scenario_text("{not json", "t"), ScenarioError);
  CHECK_THROWS_AS(load_scenario_text("{\"n\": 1}", "t"), ScenarioError);
  // Anchor row count must equal m.
  CHECK_THROWS_AS(
      load_scenario_text("{\"n\":1,\"m\":2,\"anchor\":[[\"1\"]],"
                         "\"finsler\":\"u1*conj(u1)+u2*conj(u2)\"}",
                         "t"),
      ScenarioError);
  // Structure indices must satisfy alpha < beta.
  CHECK_THROWS_AS(
      load_scenario_text(
          "{\"n\":1,\"m\":2,\"anchor\":[[\"1\"],[\"1\"]],"
          "\"structure\":[{\"gamma\":1,\"alpha\":2,\"beta\":1,\"expr\":\"1\"}],"
          "\"finsler\":\"u1*conj(u1)+u2*conj(u2)\"}",
          "t"),
      ScenarioError);
  // Expression text is validated against the declared dimensions.
  CHECK_THROWS_AS(
      load_scenario_text("{\"n\":1,\"m\":1,\"anchor\":[[\"z2\"]],"
                         "\"finsler\":\"u1*conj(u1)\"}",
                         "t"),
      ScenarioError);
  // Section component count must equal m.
  CHECK_THROWS_AS(
      load_scenario_text("{\"n\":1,\"m\":1,\"anchor\":[[\"1\"]],"
                         "\"finsler\":\"u1*conj(u1)\",\"named_sections\":"
                         "{\"s\":{\"type\":\"horizontal\",\"components\":"
                         "[\"1\",\"1\"]}}}",
                         "t"),
      ScenarioError);
  // Form keys must contain exactly one '|' and valid indices.
  CHECK_THROWS_AS(
      load_scenario_text("{\"n\":1,\"m\":1,\"anchor\":[[\"1\"]],"
                         "\"finsler\":\"u1*conj(u1)\",\"named_forms\":"
                         "{\"f\":{\"p\":0,\"q\":1,\"coeffs\":{\"1\":\"1\"}}}}",
                         "t"),
      ScenarioError);
  CHECK_THROWS_AS(
      load_scenario_text("{\"n\":1,\"m\":1,\"anchor\":[[\"1\"]],"
                         "\"finsler\":\"u1*conj(u1)\",\"named_forms\":"
                         "{\"f\":{\"p\":0,\"q\":1,\"coeffs\":{\"|2\":\"1\"}}}}",
                         "t"),
      ScenarioError);
}

TEST_CASE("complex literals cover signs, exponents, and pure imaginaries") {
  CHECK(approx(parse_complex_literal("1+2i"), cplx(1, 2)));
  CHECK(approx(parse_complex_literal("-0.5i"), cplx(0, -0.5)));
  CHECK(approx(parse_complex_literal("3"), cplx(3, 0)));
  CHECK(approx(parse_complex_literal("1e-3-2e4i"), cplx(1e-3, -2e4)));
  CHECK(approx(parse_complex_literal("i"), cplx(0, 1)));
  CHECK(approx(parse_complex_literal("-i"), cplx(0, -1)));
  CHECK(approx(parse_complex_literal("2-i"), cplx(2, -1)));
  CHECK_THROWS_AS(parse_complex_literal("abc"), ScenarioError);
  CHECK_THROWS_AS(parse_complex_literal(""), ScenarioError);
  CHECK_THROWS_AS(parse_complex_literal("1+2j"), ScenarioError);
}

TEST_CASE("evaluation points parse by name with zero defaults") {
  EvalPoint pt = parse_point("z1=1+2i,u2=-1", 1, 2);
  CHECK(approx(pt.z[0], cplx(1, 2)));
  CHECK(approx(pt.u[0], cplx(0, 0)));
  CHECK(approx(pt.u[1], cplx(-1, 0)));
  CHECK_THROWS_AS(parse_point("w1=1", 1, 1), ScenarioError);
  CHECK_THROWS_AS(parse_point("z2=1", 1, 1), ScenarioError);
  CHECK_THROWS_AS(parse_point("z1", 1, 1), ScenarioError);
  CHECK_THROWS_AS(parse_point("z1=oops", 1, 1), ScenarioError);
}

TEST_CASE("validate command distinguishes sound and corrupted scenarios") {
  CliResult good = run_cli("validate " +
                           shell_quote(fixtures_dir() + "/fixture_c.json"));
  CHECK(good.exit_code == 0);
  json jg = json::parse(good.out);
  CHECK(jg["overall_pass"] == true);
  CHECK(jg["scenario"].get<std::string>().find("fixture_c") !=
        std::string::npos);

  CliResult bad = run_cli("validate " +
                          shell_quote(fixtures_dir() + "/fixture_c_bad.json"));
  CHECK(bad.exit_code == 1);
  json jb = json::parse(bad.out);
  CHECK(jb["overall_pass"] == false);
  double compat = -1;
  for (const auto& c : jb["checks"]) {
    if (c["identity"] == "anchor-compatibility")
      compat = c["max_residual"].get<double>();
  }
  CHECK(compat >= 0.5);

  CHECK(run_cli("validate /tmp/does_not_exist.json").exit_code == 2);
  std::string broken = write_temp("finalg_broken.json", "{not json");
  CHECK(run_cli("validate " + shell_quote(broken)).exit_code == 2);
}

TEST_CASE("tensors command reports connection data at a point") {
  CliResult r = run_cli("tensors " + shell_quote(fixtures_dir() + "/fixture_b.json") +
                        " --at 'z1=1,u1=1'");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["N"][0][0][0].get<double>() == doctest::Approx(1.0));
  CHECK(j["N"][0][0][1].get<double>() == doctest::Approx(0.0));
  CHECK(j["L"][0][0][0][0].get<double>() == doctest::Approx(1.0));
  CHECK(j["det"][0].get<double>() == doctest::Approx(2.718281828459045));

  CliResult rc = run_cli("tensors " + shell_quote(fixtures_dir() + "/fixture_c.json") +
                         " --at 'z1=1,u1=1,u2=1'");
  REQUIRE(rc.exit_code == 0);
  json jc = json::parse(rc.out);
  CHECK(jc["det"][0].get<double>() == doctest::Approx(7.38905609893065));
  // Structure-function trace for the rank-two bracket: (0, -1).
  CHECK(jc["traces"]["S"][0][0].get<double>() == doctest::Approx(0.0));
  CHECK(jc["traces"]["S"][1][0].get<double>() == doctest::Approx(-1.0));
}

TEST_CASE("laplacian command evaluates functions and stored forms") {
  CliResult flat = run_cli("laplacian " +
                           shell_quote(fixtures_dir() + "/fixture_a.json") +
                           " --fn zz --kind h --at 'z1=2,u1=1'");
  REQUIRE(flat.exit_code == 0);
  json jf = json::parse(flat.out);
  CHECK(jf["value"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-10));

  CliResult curved = run_cli("laplacian " +
                             shell_quote(fixtures_dir() + "/fixture_c.json") +
                             " --fn zz --kind h --at 'z1=1,u1=1,u2=1'");
  REQUIRE(curved.exit_code == 0);
  json jc = json::parse(curved.out);
  CHECK(jc["value"][0].get<double>() ==
        doctest::Approx(1.8393972058572117).epsilon(1e-10));

  CliResult boxed = run_cli("laplacian " +
                            shell_quote(fixtures_dir() + "/fixture_a.json") +
                            " --form phi01 --kind box --at 'z1=1,u1=1'");
  REQUIRE(boxed.exit_code == 0);
  json jb = json::parse(boxed.out);
  CHECK(jb["p"] == 0);
  CHECK(jb["q"] == 1);
  CHECK(jb["components"]["|1"]["value"][0].get<double>() ==
        doctest::Approx(-1.0).epsilon(1e-10));

  // An expression that is not a stored name parses directly.
  CliResult expr = run_cli("laplacian " +
                           shell_quote(fixtures_dir() + "/fixture_a.json") +
                           " --fn 'z1*conj(z1)*u1*conj(u1)' --kind v "
                           "--at 'z1=2,u1=1'");
  REQUIRE(expr.exit_code == 0);
  json je = json::parse(expr.out);
  CHECK(je["value"][0].get<double>() == doctest::Approx(4.0).epsilon(1e-10));

  CHECK(run_cli("laplacian " + shell_quote(fixtures_dir() + "/fixture_a.json") +
                " --fn zz --form phi01 --at 'z1=1,u1=1'")
            .exit_code == 2);
  CHECK(run_cli("laplacian " + shell_quote(fixtures_dir() + "/fixture_a.json") +
                " --form phi01 --kind h --at 'z1=1,u1=1'")
            .exit_code == 2);
  CHECK(run_cli("laplacian " + shell_quote(fixtures_dir() + "/fixture_a.json") +
                " --form nosuch --kind box --at 'z1=1,u1=1'")
            .exit_code == 2);
}

TEST_CASE("covariant route of the box agrees on symmetric data via the CLI") {
  std::string common = shell_quote(fixtures_dir() + "/fixture_b.json") +
                       " --fn zz --at 'z1=1,u1=1'";
  CliResult direct = run_cli("laplacian " + common + " --kind box");
  CliResult kahler = run_cli("laplacian " + common + " --kind box-kahler");
  REQUIRE(direct.exit_code == 0);
  REQUIRE(kahler.exit_code == 0);
  json jd = json::parse(direct.out);
  json jk = json::parse(kahler.out);
  CHECK(jd["value"][0].get<double>() ==
        doctest::Approx(jk["value"][0].get<double>()).epsilon(1e-10));
  CHECK(jd["value"][1].get<double>() ==
        doctest::Approx(jk["value"][1].get<double>()).epsilon(1e-10));
}

TEST_CASE("check command reports suite results deterministically") {
  CliResult a = run_cli("check " + shell_quote(fixtures_dir() + "/fixture_a.json") +
                        " --suite algebroid");
  REQUIRE(a.exit_code == 0);
  CHECK(json::parse(a.out)["overall_pass"] == true);

  std::string cmd = "check " + shell_quote(fixtures_dir() + "/fixture_c.json") +
                    " --suite connection --seed 7";
  CliResult r1 = run_cli(cmd);
  CliResult r2 = run_cli(cmd);
  CHECK(r1.exit_code == r2.exit_code);
  CHECK(r1.out == r2.out);
  CHECK(!r1.out.empty());

  CHECK(run_cli("check " + shell_quote(fixtures_dir() + "/fixture_a.json") +
                " --suite nosuch")
            .exit_code == 2);
}

TEST_CASE("check flags reach the integral suite") {
  // The curved scenario's vanishing integral fails at its true value, and a
  // coarse grid keeps the run fast.
  CliResult r = run_cli("check " + shell_quote(fixtures_dir() + "/fixture_b.json") +
                        " --suite integrals --grid 16");
  CHECK(r.exit_code == 1);
  json j = json::parse(r.out);
  double residual = -1;
  for (const auto& c : j["checks"]) {
    if (c["identity"] == "integral-vanishing")
      residual = c["max_residual"].get<double>();
  }
  CHECK(residual == doctest::Approx(2.4674011002723395).epsilon(1e-2));
}

TEST_CASE("integrate command reports near-zero totals on the flat scenario") {
  CliResult r = run_cli("integrate " +
                        shell_quote(fixtures_dir() + "/fixture_a.json") +
                        " --field gauss --grid 16");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(std::abs(j["integral"][0].get<double>()) < 1e-6);
  CHECK(std::abs(j["integral"][1].get<double>()) < 1e-6);
  CHECK(std::abs(j["conjugate_integral"][0].get<double>()) < 1e-6);
  CHECK(j.contains("kahler_integral"));
  CHECK(j.contains("tolerance_note"));
}

TEST_CASE("integrate command rejects bad requests") {
  CHECK(run_cli("integrate " + shell_quote(fixtures_dir() + "/fixture_a.json") +
                " --field nosuch --grid 8")
            .exit_code == 2);
  // Vertical sections have no horizontal divergence to integrate.
  std::string vertical = write_temp(
      "finalg_vertical.json",
      "{\"n\":1,\"m\":1,\"anchor\":[[\"1\"]],\"finsler\":\"u1*conj(u1)\","
      "\"named_sections\":{\"v\":{\"type\":\"vertical\",\"components\":"
      "[\"exp(0-z1*conj(z1)-u1*conj(u1))\"]}}}");
  CHECK(run_cli("integrate " + shell_quote(vertical) + " --field v --grid 8")
            .exit_code == 2);
  // Six real axes at this resolution exceed the default point budget.
  CHECK(run_cli("integrate " + shell_quote(fixtures_dir() + "/fixture_c.json") +
                " --field gauss --grid 64")
            .exit_code == 2);
  CHECK(run_cli("integrate " + shell_quote(fixtures_dir() + "/fixture_a.json") +
                " --field gauss --box '4..-4' --grid 8")
            .exit_code == 2);
}
