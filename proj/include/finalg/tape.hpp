#pragma once

#include <cstdint>
#include <vector>

#include "finalg/expr.hpp"

// Flattens an expression DAG into a topologically ordered instruction tape
// for fast repeated evaluation (grid quadrature). Structural hashing merges
// repeated subtrees, which symbolic differentiation produces in bulk.

namespace finalg {

class CompiledExpr {
 public:
  explicit CompiledExpr(const Expr& e);

  // scratch must stay alive across calls for reuse; it is resized on demand.
  cplx eval(const EvalPoint& p, std::vector<cplx>& scratch) const;
  cplx eval(const cplx* z, const cplx* u, std::vector<cplx>& scratch) const;

  size_t size() const { return instrs_.size(); }

 private:
  enum class Op : uint8_t {
    Const, LoadZ, LoadZBar, LoadU, LoadUBar,
    Add, Sub, Mul, Div, Pow, Exp, Log, Conj, Neg,
  };
  struct Instr {
    Op op;
    int32_t a = -1;
    int32_t b = -1;
    int32_t var = 0;       // 1-based variable index for loads
    long long k = 0;       // power exponent
    cplx cval{0.0, 0.0};   // constant payload
  };

  struct Builder;
  int32_t compile(const Expr& e, Builder& b);
  int32_t emit(Instr in, Builder& b);

  std::vector<Instr> instrs_;
  int32_t root_ = -1;
};

}  // namespace finalg
