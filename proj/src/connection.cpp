#include "finalg/connection.hpp"

#include <cmath>
#include <functional>

#include "finalg/sampling.hpp"

namespace finalg {

ConnectionData build_connection(const AlgebroidSpec& spec, const FinslerData& fd) {
  spec.check_shape();
  int m = spec.m;
  if (static_cast<int>(fd.h.size()) != m ||
      static_cast<int>(fd.h_inv.size()) != m)
    throw FinslerError("metric data does not match the fiber rank");

  ConnectionData cd;
  cd.spec = spec;
  cd.fd = fd;

  // N^b_a = Σ_s h^{s̄b} ∂_a(∂̇_s̄ F)
  std::vector<Expr> dF_bar(m);
  for (int s = 1; s <= m; s++)
    dF_bar[s - 1] = wirtinger_deriv(fd.F, Var::Fiber, s, true);
  cd.N.assign(m, std::vector<Expr>(m));
  for (int a = 1; a <= m; a++)
    for (int b = 1; b <= m; b++) {
      std::vector<Expr> terms;
      for (int s = 1; s <= m; s++)
        terms.push_back(ex_mul(fd.h_inv[s - 1][b - 1],
                               anchor_derivative(spec, dF_bar[s - 1], a, false)));
      cd.N[a - 1][b - 1] = ex_sum(std::move(terms));
    }

  auto cube = [m]() {
    return std::vector<std::vector<std::vector<Expr>>>(
        m, std::vector<std::vector<Expr>>(m, std::vector<Expr>(m)));
  };
  cd.L = cube();
  cd.C_lin = cube();
  cd.R = cube();

  for (int g = 1; g <= m; g++)
    for (int a = 1; a <= m; a++)
      for (int b = 1; b <= m; b++) {
        std::vector<Expr> lt, ct;
        for (int s = 1; s <= m; s++) {
          Expr has = fd.h[a - 1][s - 1];
          lt.push_back(ex_mul(fd.h_inv[s - 1][g - 1],
                              delta_deriv(has, b, false, cd)));
          ct.push_back(ex_mul(fd.h_inv[s - 1][g - 1],
                              wirtinger_deriv(has, Var::Fiber, b, false)));
        }
        cd.L[g - 1][a - 1][b - 1] = ex_sum(std::move(lt));
        cd.C_lin[g - 1][a - 1][b - 1] = ex_sum(std::move(ct));
      }

  for (int g = 1; g <= m; g++)
    for (int a = 1; a <= m; a++)
      for (int b = 1; b <= m; b++) {
        std::vector<Expr> terms;
        for (int e = 1; e <= m; e++)
          terms.push_back(
              ex_mul(spec.structure_fn(e, a, b), cd.N[e - 1][g - 1]));
        terms.push_back(ex_neg(delta_deriv(cd.N[b - 1][g - 1], a, false, cd)));
        terms.push_back(delta_deriv(cd.N[a - 1][g - 1], b, false, cd));
        cd.R[g - 1][a - 1][b - 1] = ex_sum(std::move(terms));
      }

  cd.trace_L.resize(m);
  cd.trace_C.resize(m);
  cd.trace_S.resize(m);
  for (int a = 1; a <= m; a++) {
    std::vector<Expr> lt, ct, st;
    for (int b = 1; b <= m; b++) {
      lt.push_back(ex_sub(cd.L[b - 1][a - 1][b - 1], cd.L[b - 1][b - 1][a - 1]));
      ct.push_back(cd.C_lin[b - 1][a - 1][b - 1]);
      st.push_back(spec.structure_fn(b, a, b));
    }
    cd.trace_L[a - 1] = ex_sum(std::move(lt));
    cd.trace_C[a - 1] = ex_sum(std::move(ct));
    cd.trace_S[a - 1] = ex_sum(std::move(st));
  }
  return cd;
}

Expr delta_deriv(const Expr& e, int alpha, bool barred, const ConnectionData& cd) {
  if (!e) throw ExprError("null expression");
  if (alpha < 1 || alpha > cd.spec.m) throw ExprError("frame index out of range");
  std::vector<Expr> terms;
  terms.push_back(anchor_derivative(cd.spec, e, alpha, barred));
  for (int b = 1; b <= cd.spec.m; b++) {
    Expr coeff = cd.N[alpha - 1][b - 1];
    if (barred) coeff = ex_conj(coeff);
    terms.push_back(
        ex_neg(ex_mul(coeff, wirtinger_deriv(e, Var::Fiber, b, barred))));
  }
  return ex_sum(std::move(terms));
}

namespace {

using DerivOp = Expr (*)(const Expr&, int, const ConnectionData&);

Expr op_X(const Expr& e, int a, const ConnectionData& cd) {
  return delta_deriv(e, a, false, cd);
}
Expr op_Xbar(const Expr& e, int a, const ConnectionData& cd) {
  return delta_deriv(e, a, true, cd);
}
Expr op_V(const Expr& e, int a, const ConnectionData&) {
  return wirtinger_deriv(e, Var::Fiber, a, false);
}
Expr op_Vbar(const Expr& e, int a, const ConnectionData&) {
  return wirtinger_deriv(e, Var::Fiber, a, true);
}

}  // namespace

ValidationReport verify_brackets(const AlgebroidSpec& spec,
                                 const ConnectionData& cd,
                                 const std::vector<Expr>& testfns, int samples,
                                 uint64_t seed, double tol) {
  if (testfns.empty()) throw ExprError("need at least one test function");
  if (samples < 1) throw ExprError("samples must be >= 1");
  int m = spec.m;
  auto points = sample_points(spec.n, m, samples, seed);

  // RHS coefficient formulas per row; each returns the row's right-hand side
  // applied to f for the index pair (a, b).
  auto rhs_XX = [&](const Expr& f, int a, int b) {
    std::vector<Expr> terms;
    for (int g = 1; g <= m; g++) {
      terms.push_back(
          ex_mul(spec.structure_fn(g, a, b), delta_deriv(f, g, false, cd)));
      terms.push_back(ex_mul(cd.R[g - 1][a - 1][b - 1],
                             wirtinger_deriv(f, Var::Fiber, g, false)));
    }
    return ex_sum(std::move(terms));
  };
  auto rhs_XXbar = [&](const Expr& f, int a, int b) {
    std::vector<Expr> terms;
    for (int g = 1; g <= m; g++) {
      terms.push_back(ex_mul(delta_deriv(cd.N[a - 1][g - 1], b, true, cd),
                             wirtinger_deriv(f, Var::Fiber, g, false)));
      terms.push_back(ex_neg(
          ex_mul(delta_deriv(ex_conj(cd.N[b - 1][g - 1]), a, false, cd),
                 wirtinger_deriv(f, Var::Fiber, g, true))));
    }
    return ex_sum(std::move(terms));
  };
  auto rhs_XV = [&](const Expr& f, int a, int b) {
    std::vector<Expr> terms;
    for (int g = 1; g <= m; g++)
      terms.push_back(
          ex_mul(wirtinger_deriv(cd.N[a - 1][g - 1], Var::Fiber, b, false),
                 wirtinger_deriv(f, Var::Fiber, g, false)));
    return ex_sum(std::move(terms));
  };
  auto rhs_XVbar = [&](const Expr& f, int a, int b) {
    std::vector<Expr> terms;
    for (int g = 1; g <= m; g++)
      terms.push_back(
          ex_mul(wirtinger_deriv(cd.N[a - 1][g - 1], Var::Fiber, b, true),
                 wirtinger_deriv(f, Var::Fiber, g, false)));
    return ex_sum(std::move(terms));
  };
  auto rhs_zero = [&](const Expr&, int, int) { return ex_real(0.0); };

  struct Row {
    const char* name;
    DerivOp first;
    DerivOp second;
    std::function<Expr(const Expr&, int, int)> rhs;
  };
  std::vector<Row> rows = {
      {"bracket-XX", op_X, op_X, rhs_XX},
      {"bracket-XXbar", op_X, op_Xbar, rhs_XXbar},
      {"bracket-XV", op_X, op_V, rhs_XV},
      {"bracket-XVbar", op_X, op_Vbar, rhs_XVbar},
      {"bracket-VV", op_V, op_V, rhs_zero},
      {"bracket-VVbar", op_V, op_Vbar, rhs_zero},
  };

  ValidationReport report;
  for (const Row& row : rows) {
    CheckEntry entry;
    entry.name = row.name;
    entry.tol = tol;
    entry.samples = samples;
    entry.seed = static_cast<long long>(seed);
    double worst = 0.0;
    for (const Expr& f : testfns)
      for (int a = 1; a <= m; a++)
        for (int b = 1; b <= m; b++) {
          Expr lhs = ex_sub(row.first(row.second(f, b, cd), a, cd),
                            row.second(row.first(f, a, cd), b, cd));
          Expr rhs = row.rhs(f, a, b);
          Expr diff = ex_sub(lhs, rhs);
          for (const EvalPoint& p : points)
            worst = std::max(worst, std::abs(eval_expr(diff, p)));
        }
    entry.residual = worst;
    entry.pass = worst <= tol;
    report.entries.push_back(entry);
  }
  return report;
}

bool is_kahler(const ConnectionData& cd, int samples, uint64_t seed, double tol) {
  int m = cd.spec.m;
  auto points = sample_points(cd.spec.n, m, samples, seed);
  for (int s = 0; s < m; s++)
    for (int a = 0; a < m; a++)
      for (int g = a + 1; g < m; g++) {
        Expr diff = ex_sub(cd.L[s][a][g], cd.L[s][g][a]);
        for (const EvalPoint& p : points)
          if (std::abs(eval_expr(diff, p)) > tol) return false;
      }
  return true;
}

}  // namespace finalg
