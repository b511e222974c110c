#include "finalg/algebroid.hpp"

#include <cmath>

#include "finalg/sampling.hpp"

namespace finalg {

Expr AlgebroidSpec::structure_fn(int gamma, int alpha, int beta) const {
  if (alpha == beta) return ex_real(0.0);
  bool flip = alpha > beta;
  auto it = structure.find({gamma, flip ? beta : alpha, flip ? alpha : beta});
  if (it == structure.end()) return ex_real(0.0);
  return flip ? ex_neg(it->second) : it->second;
}

void AlgebroidSpec::check_shape() const {
  if (n < 1 || m < 1) throw AlgebroidError("dimensions must be positive");
  if (static_cast<int>(anchor.size()) != m)
    throw AlgebroidError("anchor must have one row per frame section (m rows)");
  for (const auto& row : anchor) {
    if (static_cast<int>(row.size()) != n)
      throw AlgebroidError("anchor rows must have n entries");
    for (const auto& entry : row)
      if (!entry) throw AlgebroidError("anchor entry is null");
  }
  for (const auto& [key, expr] : structure) {
    auto [gamma, alpha, beta] = key;
    if (!expr) throw AlgebroidError("structure function entry is null");
    if (gamma < 1 || gamma > m || alpha < 1 || alpha > m || beta < 1 || beta > m)
      throw AlgebroidError("structure function index out of range");
    if (alpha >= beta)
      throw AlgebroidError("structure functions are stored with alpha < beta");
  }
}

Expr anchor_derivative(const AlgebroidSpec& spec, const Expr& e, int alpha,
                       bool barred) {
  std::vector<Expr> terms;
  for (int k = 1; k <= spec.n; k++) {
    Expr coeff = barred ? ex_conj(spec.rho(k, alpha)) : spec.rho(k, alpha);
    Expr de = wirtinger_deriv(e, Var::Base, k, barred);
    terms.push_back(ex_mul(coeff, de));
  }
  return ex_sum(std::move(terms));
}

ValidationReport validate_algebroid(const AlgebroidSpec& spec, int samples,
                                    uint64_t seed, double tol) {
  spec.check_shape();
  if (samples < 1) throw AlgebroidError("samples must be >= 1");

  ValidationReport report;
  auto points = sample_points(spec.n, spec.m, samples, seed);

  // (a) holomorphy, symbolic and exact
  {
    CheckEntry e;
    e.name = "holomorphy";
    e.tol = tol;
    e.seed = static_cast<long long>(seed);
    int bad = 0, total = 0;
    for (const auto& row : spec.anchor)
      for (const auto& entry : row) {
        total++;
        if (!is_holomorphic(entry)) bad++;
      }
    for (const auto& [key, entry] : spec.structure) {
      (void)key;
      total++;
      if (!is_holomorphic(entry)) bad++;
    }
    e.samples = total;
    e.residual = bad ? 1.0 : 0.0;
    e.pass = e.residual <= e.tol;
    report.entries.push_back(e);
  }

  // (b) anchor compatibility:
  // rho^j_a d_j rho^k_b - rho^j_b d_j rho^k_a = C^g_{ab} rho^k_g
  {
    CheckEntry e;
    e.name = "anchor-compatibility";
    e.tol = tol;
    e.samples = samples;
    e.seed = static_cast<long long>(seed);
    double worst = 0.0;
    for (int a = 1; a <= spec.m; a++)
      for (int b = a + 1; b <= spec.m; b++)
        for (int k = 1; k <= spec.n; k++) {
          Expr lhs = ex_sub(anchor_derivative(spec, spec.rho(k, b), a, false),
                            anchor_derivative(spec, spec.rho(k, a), b, false));
          std::vector<Expr> rhs;
          for (int g = 1; g <= spec.m; g++)
            rhs.push_back(ex_mul(spec.structure_fn(g, a, b), spec.rho(k, g)));
          Expr resid = ex_sub(lhs, ex_sum(std::move(rhs)));
          for (const auto& p : points)
            worst = std::max(worst, std::abs(eval_expr(resid, p)));
        }
    e.residual = worst;
    e.pass = worst <= tol;
    report.entries.push_back(e);
  }

  // (c) Jacobi identity: cyclic sum over (a, b, g) of
  // [ rho^k_a d_k C^t_{bg} + C^e_{bg} C^t_{ae} ] = 0, per t
  {
    CheckEntry e;
    e.name = "jacobi";
    e.tol = tol;
    e.samples = samples;
    e.seed = static_cast<long long>(seed);
    double worst = 0.0;
    for (int a = 1; a <= spec.m; a++)
      for (int b = a + 1; b <= spec.m; b++)
        for (int g = b + 1; g <= spec.m; g++)
          for (int t = 1; t <= spec.m; t++) {
            std::vector<Expr> terms;
            int cyc[3][3] = {{a, b, g}, {b, g, a}, {g, a, b}};
            for (auto& tri : cyc) {
              terms.push_back(
                  anchor_derivative(spec, spec.structure_fn(t, tri[1], tri[2]), tri[0], false));
              for (int ee = 1; ee <= spec.m; ee++)
                terms.push_back(ex_mul(spec.structure_fn(ee, tri[1], tri[2]),
                                       spec.structure_fn(t, tri[0], ee)));
            }
            Expr resid = ex_sum(std::move(terms));
            for (const auto& p : points)
              worst = std::max(worst, std::abs(eval_expr(resid, p)));
          }
    e.residual = worst;
    e.pass = worst <= tol;
    if (spec.m < 3) e.note = "vacuous below rank 3";
    report.entries.push_back(e);
  }

  return report;
}

}  // namespace finalg
