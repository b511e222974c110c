#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

// Symbolic complex-expression kernel: immutable ASTs over base coordinates
// z1..zn and fiber coordinates u1..um (plus their conjugates), with a text
// parser, Wirtinger differentiation, numeric evaluation, and a
// finite-difference oracle. Variables and their conjugates are independent
// directions; conjugation is normalized away at construction time by
// distributing it down to the leaves.

namespace finalg {

using cplx = std::complex<double>;

enum class Kind {
  Constant,
  BaseVar,
  FiberVar,
  Sum,
  Difference,
  Product,
  Quotient,
  Power,
  Exp,
  Log,
  Conj,
  Negate,
};

struct ComplexExpr;
using Expr = std::shared_ptr<const ComplexExpr>;

struct ComplexExpr {
  Kind kind;
  cplx value{0.0, 0.0};    // Constant
  int index = 0;           // BaseVar/FiberVar, 1-based
  bool barred = false;     // BaseVar/FiberVar: conjugated coordinate
  long long exponent = 0;  // Power
  std::vector<Expr> kids;
};

struct EvalPoint {
  std::vector<cplx> z;
  std::vector<cplx> u;
};

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ExprError {
 public:
  ParseError(const std::string& what, size_t position)
      : ExprError(what), pos(position) {}
  size_t pos;  // byte offset into the source text
};

class EvalError : public ExprError {
 public:
  using ExprError::ExprError;
};

// --- constructors (light simplification: constant folding, 0/1 absorption,
// --- sum/product flattening, conj distribution) ---
Expr ex_const(cplx v);
Expr ex_real(double v);
Expr ex_base(int k, bool barred = false);
Expr ex_fiber(int alpha, bool barred = false);
Expr ex_sum(std::vector<Expr> terms);
Expr ex_add(const Expr& a, const Expr& b);
Expr ex_sub(const Expr& a, const Expr& b);
Expr ex_prod(std::vector<Expr> factors);
Expr ex_mul(const Expr& a, const Expr& b);
Expr ex_div(const Expr& a, const Expr& b);
Expr ex_pow(const Expr& a, long long k);
Expr ex_exp(const Expr& a);
Expr ex_log(const Expr& a);
Expr ex_conj(const Expr& a);
Expr ex_neg(const Expr& a);

inline Expr operator+(const Expr& a, const Expr& b) { return ex_add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return ex_sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return ex_mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return ex_div(a, b); }
inline Expr operator-(const Expr& a) { return ex_neg(a); }

bool is_zero(const Expr& e);
bool is_one(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);

// Highest variable index used (0 when absent); true if any barred leaf or
// conj node remains.
int max_base_index(const Expr& e);
int max_fiber_index(const Expr& e);
bool contains_barred(const Expr& e);

enum class Var { Base, Fiber };

// Grammar (ASCII): expr := term (('+'|'-') term)*; term := factor (('*'|'/')
// factor)*; factor := '-' factor | atom ('^' int)?; atom := number | 'i' |
// ident | func '(' expr ')' | '(' expr ')'; func in {exp, log, conj};
// ident := ('z'|'u') positive-int. '^' takes a literal (possibly negative)
// integer and binds tighter than unary minus. Variable indices are checked
// against (n, m).
Expr parse_expr(const std::string& text, int n, int m);

cplx eval_expr(const Expr& e, const EvalPoint& p);

// Exact symbolic d/d(var) or d/d(conj var); a coordinate and its conjugate
// are independent.
Expr wirtinger_deriv(const Expr& e, Var var, int index, bool barred);

// Central-difference oracle: 1/2 (d/dx - i d/dy) for unbarred, 1/2 (d/dx +
// i d/dy) for barred, where x+iy is the chosen coordinate.
cplx fd_deriv(const Expr& e, Var var, int index, bool barred,
              const EvalPoint& p, double step);

bool is_holomorphic(const Expr& e);

// Round-trippable text form (barred variables print as conj(zk)/conj(uk)).
std::string to_string(const Expr& e);

}  // namespace finalg
