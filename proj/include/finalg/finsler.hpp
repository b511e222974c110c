#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "finalg/algebroid.hpp"
#include "finalg/expr.hpp"

namespace finalg {

struct FinslerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Metric data derived from a Finsler function F(z, u):
//   h[a][s]     = h_{a s̄}  = ∂̇_a ∂̇_s̄ F
//   h_inv[s][b] = h^{s̄ b}   with  Σ_s h[a][s]·h_inv[s][b] = δ_ab
//   det_h       = det(h_{a s̄}), kept symbolic so frame derivatives of
//                 log-det and of the inverse stay exact.
struct FinslerData {
  AlgebroidSpec spec;
  Expr F;
  std::vector<std::vector<Expr>> h;
  std::vector<std::vector<Expr>> h_inv;
  Expr det_h;
};

// Fiber Hessian of F alone.  Exposed separately so diagnostics can look at
// metrics whose determinant vanishes (build_finsler refuses those).
std::vector<std::vector<Expr>> fiber_hessian(const Expr& F, int m);

// Determinant by cofactor expansion; intended for the small ranks we support.
Expr matrix_det(const std::vector<std::vector<Expr>>& M);

FinslerData build_finsler(const AlgebroidSpec& spec, const Expr& F);

// F(z, λu) = |λ|²·F(z, u) at sampled (z, u, λ), relative tolerance.
// Dimensions are inferred from the variable indices appearing in F.
bool check_homogeneity(const Expr& F, int samples, uint64_t seed, double tol);

// At every sample: h numerically Hermitian within tol and λ_min(h) > tol.
bool check_pseudoconvexity(const FinslerData& fd, int samples, uint64_t seed,
                           double tol);

// Smallest eigenvalue of a Hermitian matrix, via the real symmetric
// embedding [[X, -Y], [Y, X]] and cyclic Jacobi rotations.
double hermitian_min_eigenvalue(const std::vector<std::vector<cplx>>& H);

}  // namespace finalg
