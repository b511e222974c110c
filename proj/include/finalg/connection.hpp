#pragma once

#include <cstdint>
#include <vector>

#include "finalg/finsler.hpp"
#include "finalg/report.hpp"

namespace finalg {

// Nonlinear connection and the linear coefficients riding on it.  Index
// layout, with all indices 0-based in storage:
//   N[a][b]        = N^b_a        (row is the lower index)
//   L[g][a][b]     = L^g_{ab} = Σ_s h^{s̄g} δ_b(h_{as̄})
//   C_lin[g][a][b] = C^g_{ab} = Σ_s h^{s̄g} ∂̇_b(h_{as̄})
//   R[g][a][b]     = R^g_{ab} = Σ_e S^e_{ab} N^g_e − δ_a N^g_b + δ_b N^g_a
// where S are the algebroid structure functions.  Traces:
//   trace_L[a] = L^b_{ab} − L^b_{ba}
//   trace_C[a] = C^b_{ab}
//   trace_S[a] = S^b_{ab}
struct ConnectionData {
  AlgebroidSpec spec;
  FinslerData fd;
  std::vector<std::vector<Expr>> N;
  std::vector<std::vector<std::vector<Expr>>> L;
  std::vector<std::vector<std::vector<Expr>>> C_lin;
  std::vector<std::vector<std::vector<Expr>>> R;
  std::vector<Expr> trace_L;
  std::vector<Expr> trace_C;
  std::vector<Expr> trace_S;
};

ConnectionData build_connection(const AlgebroidSpec& spec, const FinslerData& fd);

// Horizontal frame derivative δ_a e = ∂_a e − Σ_b N^b_a ∂̇_b e; the barred
// variant conjugates both the anchor and the connection coefficients.
Expr delta_deriv(const Expr& e, int alpha, bool barred, const ConnectionData& cd);

// Checks each frame-bracket row as an operator identity on scalar test
// functions: the commutator of the two derivative operators against the
// coefficient formula applied to the same function.
ValidationReport verify_brackets(const AlgebroidSpec& spec,
                                 const ConnectionData& cd,
                                 const std::vector<Expr>& testfns, int samples,
                                 uint64_t seed, double tol);

// True iff L^s_{ag} and L^s_{ga} agree at every sample within tol.
bool is_kahler(const ConnectionData& cd, int samples, uint64_t seed, double tol);

}  // namespace finalg
