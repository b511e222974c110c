#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "finalg/calculus.hpp"

namespace finalg {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform tensor grid over the real coordinate box.  Axis order is fixed:
// (re z1..re zn, im z1..im zn, re u1..re um, im u1..im um).
struct IntegrationDomain {
  int n = 1, m = 1;
  std::vector<std::pair<double, double>> bounds;  // one per real axis
  int grid = 64;                                  // points per axis
  long long budget = 1LL << 24;                   // max total grid points

  static IntegrationDomain box(int n, int m, double lo, double hi, int grid);

  int axes() const { return 2 * (n + m); }
  // Total grid-point count; saturates at a sentinel above any budget.
  long long total_points() const;
  void check() const;
};

// Midpoint-rule integral of f · weight over the domain.  Work is split into
// fixed 4096-point chunks accumulated in index order; chunk sums are then
// combined by pairwise tree reduction, so the result is bit-identical
// whether or not the chunk loop runs in parallel.
cplx integrate(const Expr& f, const Expr& weight, const IntegrationDomain& dom);

// Reference implementation: same chunking and reduction, no parallelism.
// Kept for bitwise-equality testing and benchmarking against `integrate`.
cplx integrate_serial(const Expr& f, const Expr& weight,
                      const IntegrationDomain& dom);

// Integral-vanishing check for a horizontal section with decaying
// components: I = ∫ (Σ_a [δ_a Z^a + Σ_e Z^e L^a_{ea}] − Σ_a Z^a L_a) · det²
// over the box, plus the conjugate-route counterpart built from barred
// derivatives.  On data whose mixed coefficients are symmetric (L_a = 0 by
// the Kähler reduction) the variant without the L-trace is checked too;
// otherwise those entries are reported as skipped.  A boundary-vs-interior
// probe of Σ|Z^a|·|det²| guards against non-decaying sections: when the
// boundary magnitude is not negligible the check is reported as skipped
// rather than failed.
ValidationReport check_integral_identity(const SectionField& Z,
                                         const AlgebroidSpec& spec,
                                         const FinslerData& fd,
                                         const ConnectionData& cd,
                                         const IntegrationDomain& dom,
                                         double tol = 1e-3);

}  // namespace finalg
