#pragma once

#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "finalg/expr.hpp"
#include "finalg/report.hpp"

// Holomorphic Lie algebroid in a fixed local frame: anchor coefficients
// rho^k_alpha(z) and structure functions C^gamma_{alpha beta}(z). Structure
// functions are stored sparsely for alpha < beta only; the antisymmetric
// completion (and C^gamma_{alpha alpha} = 0) is applied at read time.

namespace finalg {

class AlgebroidError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AlgebroidSpec {
  int n = 0;                            // base dimension
  int m = 0;                            // fiber rank
  std::vector<std::vector<Expr>> anchor;  // anchor[alpha-1][k-1] = rho^k_alpha
  std::map<std::tuple<int, int, int>, Expr> structure;  // key (gamma, alpha, beta)

  Expr rho(int k, int alpha) const { return anchor.at(alpha - 1).at(k - 1); }
  Expr structure_fn(int gamma, int alpha, int beta) const;

  // Throws AlgebroidError when the anchor/structure shapes disagree with
  // (n, m) or a sparse key violates alpha < beta.
  void check_shape() const;
};

// Checks, at seeded random base points: holomorphy of all entries (symbolic),
// anchor compatibility against the structure functions, and the Jacobi
// identity (vacuous below rank 3).
ValidationReport validate_algebroid(const AlgebroidSpec& spec, int samples,
                                    uint64_t seed, double tol);

// d_alpha e = sum_k rho^k_alpha de/dz^k, or the conjugated-coefficient
// version sum_k conj(rho^k_alpha) de/dzbar^k when barred.
Expr anchor_derivative(const AlgebroidSpec& spec, const Expr& e, int alpha,
                       bool barred);

}  // namespace finalg
