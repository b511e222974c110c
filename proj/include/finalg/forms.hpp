#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finalg/calculus.hpp"
#include "finalg/connection.hpp"
#include "finalg/finsler.hpp"
#include "finalg/quadrature.hpp"

namespace finalg {

class FormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A (p,q)-form on the horizontal frame: coefficients are stored only at
// strictly increasing multi-indices (1-based); access at arbitrary index
// tuples resolves through antisymmetry (permutation sign, repeats give
// zero, absent keys give zero).
struct HorizontalForm {
  int m = 0;
  int p = 0;
  int q = 0;
  std::map<std::pair<std::vector<int>, std::vector<int>>, Expr> coeffs;

  static HorizontalForm scalar(int m, const Expr& f);
  static HorizontalForm zero(int m, int p, int q);

  Expr get(const std::vector<int>& A, const std::vector<int>& B) const;
  void set(const std::vector<int>& A, const std::vector<int>& B, const Expr& e);
  void check() const;
};

// All strictly increasing k-tuples drawn from 1..m, in lexicographic order.
std::vector<std::vector<int>> increasing_tuples(int m, int k);

HorizontalForm form_add(const HorizontalForm& a, const HorizontalForm& b);
HorizontalForm form_scale(const cplx& c, const HorizontalForm& a);

// Complex conjugate of a form; swaps the index types, so a (p,q)-form
// becomes a (q,p)-form whose coefficients are the conjugates.
HorizontalForm conj_form(const HorizontalForm& a);

// Raise every index through the inverse metric, keeping the container
// layout (entry at (A,B) holds the fully contravariant component).
HorizontalForm raise_all(const HorizontalForm& a, const FinslerData& fd);

// Pointwise Hermitian pairing <psi, phi>: contract psi against the fully
// raised conjugate of phi.
Expr inner_product_pointwise(const HorizontalForm& psi,
                             const HorizontalForm& phi, const FinslerData& fd);

// L2 pairing: the pointwise pairing integrated against the metric volume
// density over the given box.
cplx global_inner_product(const HorizontalForm& psi, const HorizontalForm& phi,
                          const FinslerData& fd, const IntegrationDomain& dom);

// Horizontal exterior derivatives built from the adapted frame derivative.
HorizontalForm del_h(const HorizontalForm& psi, const ConnectionData& cd);
HorizontalForm delbar_h(const HorizontalForm& psi, const ConnectionData& cd);

// Formal adjoint of delbar_h: contracts the leading barred index with the
// inverse metric outside the frame derivative.
HorizontalForm delbar_adjoint(const HorizontalForm& phi, const FinslerData& fd,
                              const ConnectionData& cd);

// Alternative route to the same adjoint: raise all indices, differentiate
// with a logarithmic-determinant correction, lower back.  Kept as an
// independent cross-check; the two routes agree only when the metric
// determinant is constant along the frame directions.
HorizontalForm delbar_adjoint_via_raising(const HorizontalForm& phi,
                                          const FinslerData& fd,
                                          const ConnectionData& cd);

// Adjoint of del_h, obtained by conjugating through delbar_adjoint.
HorizontalForm del_adjoint(const HorizontalForm& phi, const FinslerData& fd,
                           const ConnectionData& cd);

// Horizontal complex Laplacian, expanded form: second-derivative trace plus
// frame-commutator and derived-inverse-metric corrections on each barred
// index.  Agrees with box_h_composition identically.
HorizontalForm box_h(const HorizontalForm& phi, const FinslerData& fd,
                     const ConnectionData& cd);

// Two-term variant that keeps only the second-derivative trace and the
// frame-commutator correction.  Retained for comparison; it differs from
// the composition whenever the inverse metric varies along the frame.
HorizontalForm box_h_commutator_form(const HorizontalForm& phi,
                                     const FinslerData& fd,
                                     const ConnectionData& cd);

// The Laplacian assembled directly from the operators:
// delbar_h ∘ delbar_adjoint + delbar_adjoint ∘ delbar_h, with the edge
// degrees keeping only the summand that exists.
HorizontalForm box_h_composition(const HorizontalForm& phi,
                                 const FinslerData& fd,
                                 const ConnectionData& cd);

// Covariant-derivative expression of the Laplacian used in the torsion-free
// case: a covariant second-derivative trace plus covariant commutators on
// each barred index.
HorizontalForm box_h_kahler(const HorizontalForm& phi, const FinslerData& fd,
                            const ConnectionData& cd);

}  // namespace finalg
