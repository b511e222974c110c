#include "finalg/scenario.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace finalg {

namespace {

using nlohmann::json;

std::string expect_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ScenarioError(where + ": expected a string");
  return j.get<std::string>();
}

int expect_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ScenarioError(where + ": expected an integer");
  return j.get<int>();
}

Expr parse_field_expr(const json& j, int n, int m, const std::string& where) {
  std::string text = expect_string(j, where);
  try {
    return parse_expr(text, n, m);
  } catch (const ExprError& e) {
    throw ScenarioError(where + ": " + e.what());
  }
}

// "a1,a2|b1,b2" -> the two multi-indices of a form coefficient key.
std::pair<std::vector<int>, std::vector<int>> parse_form_key(
    const std::string& key, const std::string& where) {
  auto bar = key.find('|');
  if (bar == std::string::npos || key.find('|', bar + 1) != std::string::npos) {
    throw ScenarioError(where + ": coefficient key must contain exactly one '|'");
  }
  auto parse_side = [&](const std::string& side) {
    std::vector<int> out;
    std::string token;
    std::istringstream in(side);
    while (std::getline(in, token, ',')) {
      if (token.empty()) {
        throw ScenarioError(where + ": empty index in coefficient key");
      }
      try {
        out.push_back(std::stoi(token));
      } catch (const std::exception&) {
        throw ScenarioError(where + ": bad index '" + token + "'");
      }
    }
    return out;
  };
  return {parse_side(key.substr(0, bar)), parse_side(key.substr(bar + 1))};
}

SectionField parse_section(const json& j, int n, int m,
                           const std::string& where) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  std::string type = expect_string(j.value("type", json()), where + ".type");
  const json& comps = j.contains("components") ? j.at("components") : json();
  if (!comps.is_array() || static_cast<int>(comps.size()) != m) {
    throw ScenarioError(where + ".components: expected " + std::to_string(m) +
                        " entries");
  }
  std::vector<Expr> exprs;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    exprs.push_back(parse_field_expr(comps[i], n, m,
                                     where + ".components[" +
                                         std::to_string(i) + "]"));
  }
  if (type == "horizontal") return SectionField::horizontal(std::move(exprs));
  if (type == "vertical") return SectionField::vertical(std::move(exprs));
  throw ScenarioError(where + ".type: expected 'horizontal' or 'vertical'");
}

HorizontalForm parse_form(const json& j, int n, int m,
                          const std::string& where) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  int p = expect_int(j.value("p", json()), where + ".p");
  int q = expect_int(j.value("q", json()), where + ".q");
  HorizontalForm out;
  try {
    out = HorizontalForm::zero(m, p, q);
  } catch (const FormError& e) {
    throw ScenarioError(where + ": " + e.what());
  }
  const json& coeffs = j.contains("coeffs") ? j.at("coeffs") : json::object();
  if (!coeffs.is_object()) {
    throw ScenarioError(where + ".coeffs: expected an object");
  }
  for (const auto& [key, val] : coeffs.items()) {
    auto [A, B] = parse_form_key(key, where + ".coeffs['" + key + "']");
    Expr e = parse_field_expr(val, n, m, where + ".coeffs['" + key + "']");
    try {
      out.set(A, B, e);
    } catch (const FormError& err) {
      throw ScenarioError(where + ".coeffs['" + key + "']: " + err.what());
    }
  }
  return out;
}

}  // namespace

Scenario load_scenario_text(const std::string& text, const std::string& id) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario: expected a JSON object");

  Scenario sc;
  sc.id = id;
  sc.spec.n = expect_int(doc.value("n", json()), "n");
  sc.spec.m = expect_int(doc.value("m", json()), "m");
  const int n = sc.spec.n, m = sc.spec.m;

  const json& anchor = doc.contains("anchor") ? doc.at("anchor") : json();
  if (!anchor.is_array() || static_cast<int>(anchor.size()) != m) {
    throw ScenarioError("anchor: expected " + std::to_string(m) + " rows");
  }
  for (int a = 0; a < m; ++a) {
    const json& row = anchor[static_cast<std::size_t>(a)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ScenarioError("anchor[" + std::to_string(a) + "]: expected " +
                          std::to_string(n) + " entries");
    }
    std::vector<Expr> out_row;
    for (int k = 0; k < n; ++k) {
      out_row.push_back(parse_field_expr(
          row[static_cast<std::size_t>(k)], n, m,
          "anchor[" + std::to_string(a) + "][" + std::to_string(k) + "]"));
    }
    sc.spec.anchor.push_back(std::move(out_row));
  }

  if (doc.contains("structure")) {
    const json& st = doc.at("structure");
    if (!st.is_array()) throw ScenarioError("structure: expected a list");
    for (std::size_t i = 0; i < st.size(); ++i) {
      const json& item = st[i];
      std::string where = "structure[" + std::to_string(i) + "]";
      if (!item.is_object()) throw ScenarioError(where + ": expected an object");
      int gamma = expect_int(item.value("gamma", json()), where + ".gamma");
      int alpha = expect_int(item.value("alpha", json()), where + ".alpha");
      int beta = expect_int(item.value("beta", json()), where + ".beta");
      Expr e = parse_field_expr(item.value("expr", json()), n, m,
                                where + ".expr");
      sc.spec.structure[{gamma, alpha, beta}] = e;
    }
  }

  try {
    sc.spec.check_shape();
  } catch (const AlgebroidError& e) {
    throw ScenarioError(std::string("algebroid: ") + e.what());
  }

  sc.F = parse_field_expr(doc.value("finsler", json()), n, m, "finsler");
  try {
    sc.fd = build_finsler(sc.spec, sc.F);
    sc.cd = build_connection(sc.spec, sc.fd);
  } catch (const FinslerError& e) {
    throw ScenarioError(std::string("finsler: ") + e.what());
  }

  if (doc.contains("named_functions")) {
    const json& fns = doc.at("named_functions");
    if (!fns.is_object()) {
      throw ScenarioError("named_functions: expected an object");
    }
    for (const auto& [name, val] : fns.items()) {
      sc.named_functions[name] =
          parse_field_expr(val, n, m, "named_functions['" + name + "']");
    }
  }
  if (doc.contains("named_sections")) {
    const json& secs = doc.at("named_sections");
    if (!secs.is_object()) {
      throw ScenarioError("named_sections: expected an object");
    }
    for (const auto& [name, val] : secs.items()) {
      sc.named_sections[name] =
          parse_section(val, n, m, "named_sections['" + name + "']");
    }
  }
  if (doc.contains("named_forms")) {
    const json& forms = doc.at("named_forms");
    if (!forms.is_object()) {
      throw ScenarioError("named_forms: expected an object");
    }
    for (const auto& [name, val] : forms.items()) {
      sc.named_forms[name] =
          parse_form(val, n, m, "named_forms['" + name + "']");
    }
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str(), path);
}

cplx parse_complex_literal(const std::string& s) {
  if (s.empty()) throw ScenarioError("empty complex literal");
  std::string t = s;
  bool has_imag_suffix = t.back() == 'i' || t.back() == 'I';
  if (has_imag_suffix) t.pop_back();

  // Locate a '+'/'-' that separates two components (not leading, not part
  // of an exponent).
  std::size_t split = std::string::npos;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if ((t[i] == '+' || t[i] == '-') &&
        t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
    }
  }
  auto to_double = [](const std::string& text, double fallback_unit) {
    if (text.empty() || text == "+") return fallback_unit;
    if (text == "-") return -fallback_unit;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ScenarioError("bad numeric literal '" + text + "'");
    }
    if (used != text.size()) {
      throw ScenarioError("bad numeric literal '" + text + "'");
    }
    return v;
  };

  if (!has_imag_suffix) {
    if (split != std::string::npos) {
      throw ScenarioError("bad complex literal '" + s + "'");
    }
    return cplx(to_double(t, 1.0), 0.0);
  }
  if (split == std::string::npos) {
    return cplx(0.0, to_double(t, 1.0));
  }
  return cplx(to_double(t.substr(0, split), 1.0),
              to_double(t.substr(split), 1.0));
}

EvalPoint parse_point(const std::string& s, int n, int m) {
  EvalPoint pt;
  pt.z.assign(static_cast<std::size_t>(n), cplx(0, 0));
  pt.u.assign(static_cast<std::size_t>(m), cplx(0, 0));
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError("point entry '" + item + "' is missing '='");
    }
    std::string name = item.substr(0, eq);
    cplx value = parse_complex_literal(item.substr(eq + 1));
    if (name.size() < 2 || (name[0] != 'z' && name[0] != 'u')) {
      throw ScenarioError("unknown coordinate '" + name + "'");
    }
    int idx = 0;
    std::size_t used = 0;
    try {
      idx = std::stoi(name.substr(1), &used);
    } catch (const std::exception&) {
      throw ScenarioError("unknown coordinate '" + name + "'");
    }
    if (used != name.size() - 1) {
      throw ScenarioError("unknown coordinate '" + name + "'");
    }
    if (name[0] == 'z') {
      if (idx < 1 || idx > n) {
        throw ScenarioError("coordinate '" + name + "' out of range");
      }
      pt.z[static_cast<std::size_t>(idx - 1)] = value;
    } else {
      if (idx < 1 || idx > m) {
        throw ScenarioError("coordinate '" + name + "' out of range");
      }
      pt.u[static_cast<std::size_t>(idx - 1)] = value;
    }
  }
  return pt;
}

}  // namespace finalg
