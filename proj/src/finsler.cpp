#include "finalg/finsler.hpp"

#include <algorithm>
#include <cmath>

#include "finalg/sampling.hpp"

namespace finalg {

std::vector<std::vector<Expr>> fiber_hessian(const Expr& F, int m) {
  if (!F) throw FinslerError("finsler function is null");
  if (m < 1) throw FinslerError("fiber rank must be positive");
  std::vector<std::vector<Expr>> h(m, std::vector<Expr>(m));
  for (int a = 1; a <= m; a++) {
    Expr da = wirtinger_deriv(F, Var::Fiber, a, false);
    for (int s = 1; s <= m; s++)
      h[a - 1][s - 1] = wirtinger_deriv(da, Var::Fiber, s, true);
  }
  return h;
}

namespace {

Expr minor_det(const std::vector<std::vector<Expr>>& M, int skip_row,
               int skip_col) {
  std::vector<std::vector<Expr>> sub;
  for (int r = 0; r < static_cast<int>(M.size()); r++) {
    if (r == skip_row) continue;
    std::vector<Expr> row;
    for (int c = 0; c < static_cast<int>(M.size()); c++)
      if (c != skip_col) row.push_back(M[r][c]);
    sub.push_back(std::move(row));
  }
  return matrix_det(sub);
}

}  // namespace

Expr matrix_det(const std::vector<std::vector<Expr>>& M) {
  int m = static_cast<int>(M.size());
  if (m == 0) return ex_real(1.0);
  if (m == 1) return M[0][0];
  std::vector<Expr> terms;
  for (int c = 0; c < m; c++) {
    Expr t = ex_mul(M[0][c], minor_det(M, 0, c));
    terms.push_back(c % 2 ? ex_neg(t) : t);
  }
  return ex_sum(std::move(terms));
}

FinslerData build_finsler(const AlgebroidSpec& spec, const Expr& F) {
  spec.check_shape();
  if (!F) throw FinslerError("finsler function is null");
  if (spec.m > 4)
    throw FinslerError("fiber rank capped at 4 for the symbolic inverse");
  if (max_base_index(F) > spec.n || max_fiber_index(F) > spec.m)
    throw FinslerError("finsler function uses variables outside (n, m)");

  FinslerData fd;
  fd.spec = spec;
  fd.F = F;
  fd.h = fiber_hessian(F, spec.m);
  fd.det_h = matrix_det(fd.h);
  if (is_zero(fd.det_h))
    throw FinslerError("metric determinant is structurally zero");

  // h_inv = adjugate / det: h_inv[s][b] = (-1)^{s+b} minor(b, s) / det.
  int m = spec.m;
  fd.h_inv.assign(m, std::vector<Expr>(m));
  for (int s = 0; s < m; s++)
    for (int b = 0; b < m; b++) {
      Expr cof = minor_det(fd.h, b, s);
      if ((s + b) % 2) cof = ex_neg(cof);
      fd.h_inv[s][b] = ex_div(cof, fd.det_h);
    }
  return fd;
}

bool check_homogeneity(const Expr& F, int samples, uint64_t seed, double tol) {
  if (!F) throw FinslerError("finsler function is null");
  if (samples < 1) throw FinslerError("samples must be >= 1");
  int n = std::max(1, max_base_index(F));
  int m = std::max(1, max_fiber_index(F));
  Rng rng(seed);
  for (int i = 0; i < samples; i++) {
    EvalPoint p = random_point(rng, n, m);
    cplx lam = rng.annulus();
    EvalPoint q = p;
    for (auto& u : q.u) u *= lam;
    cplx scaled = eval_expr(F, q);
    cplx base = eval_expr(F, p);
    if (std::abs(scaled - std::norm(lam) * base) > tol * (1.0 + std::abs(base)))
      return false;
  }
  return true;
}

bool check_pseudoconvexity(const FinslerData& fd, int samples, uint64_t seed,
                           double tol) {
  if (samples < 1) throw FinslerError("samples must be >= 1");
  int m = fd.spec.m;
  if (static_cast<int>(fd.h.size()) != m)
    throw FinslerError("metric matrix does not match the fiber rank");
  Rng rng(seed);
  std::vector<std::vector<cplx>> H(m, std::vector<cplx>(m));
  for (int i = 0; i < samples; i++) {
    EvalPoint p = random_point(rng, fd.spec.n, m);
    double scale = 0.0;
    for (int a = 0; a < m; a++)
      for (int s = 0; s < m; s++) {
        H[a][s] = eval_expr(fd.h[a][s], p);
        scale = std::max(scale, std::abs(H[a][s]));
      }
    for (int a = 0; a < m; a++)
      for (int s = 0; s < m; s++)
        if (std::abs(H[a][s] - std::conj(H[s][a])) > tol * (1.0 + scale))
          return false;
    if (hermitian_min_eigenvalue(H) <= tol) return false;
  }
  return true;
}

double hermitian_min_eigenvalue(const std::vector<std::vector<cplx>>& H) {
  int m = static_cast<int>(H.size());
  if (m == 0) throw FinslerError("empty matrix");
  int d = 2 * m;
  std::vector<std::vector<double>> S(d, std::vector<double>(d, 0.0));
  double frob = 0.0;
  for (int a = 0; a < m; a++)
    for (int s = 0; s < m; s++) {
      double re = H[a][s].real(), im = H[a][s].imag();
      S[a][s] = re;
      S[a][s + m] = -im;
      S[a + m][s] = im;
      S[a + m][s + m] = re;
      frob += 2.0 * (re * re + im * im);
    }
  frob = std::sqrt(frob);

  for (int sweep = 0; sweep < 64; sweep++) {
    double off = 0.0;
    for (int p = 0; p < d; p++)
      for (int q = p + 1; q < d; q++) off += S[p][q] * S[p][q];
    if (std::sqrt(off) <= 1e-14 * (1.0 + frob)) break;
    for (int p = 0; p < d; p++)
      for (int q = p + 1; q < d; q++) {
        if (std::abs(S[p][q]) <= 1e-300) continue;
        double tau = (S[q][q] - S[p][p]) / (2.0 * S[p][q]);
        double t = (tau >= 0 ? 1.0 : -1.0) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < d; k++) {
          double skp = S[k][p], skq = S[k][q];
          S[k][p] = c * skp - s * skq;
          S[k][q] = s * skp + c * skq;
        }
        for (int k = 0; k < d; k++) {
          double spk = S[p][k], sqk = S[q][k];
          S[p][k] = c * spk - s * sqk;
          S[q][k] = s * spk + c * sqk;
        }
      }
  }
  double lo = S[0][0];
  for (int i = 1; i < d; i++) lo = std::min(lo, S[i][i]);
  return lo;
}

}  // namespace finalg
