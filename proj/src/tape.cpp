#include "finalg/tape.hpp"

#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

namespace finalg {

namespace {

cplx ipow(cplx base, long long k) {
  if (k < 0) return cplx(1.0, 0.0) / ipow(base, -k);
  cplx acc(1.0, 0.0);
  cplx b = base;
  while (k > 0) {
    if (k & 1) acc *= b;
    b *= b;
    k >>= 1;
  }
  return acc;
}

// Signature key for structural hashing: op, operand slots, numeric payload.
using Sig = std::tuple<int, int32_t, int32_t, long long, double, double>;

}  // namespace

struct CompiledExpr::Builder {
  std::map<Sig, int32_t> seen;
  std::unordered_map<const ComplexExpr*, int32_t> node_slot;
};

int32_t CompiledExpr::emit(Instr in, Builder& b) {
  Sig sig{static_cast<int>(in.op), in.a, in.b,
          (in.op == Op::Pow) ? in.k : static_cast<long long>(in.var),
          in.cval.real(), in.cval.imag()};
  auto it = b.seen.find(sig);
  if (it != b.seen.end()) return it->second;
  int32_t slot = static_cast<int32_t>(instrs_.size());
  instrs_.push_back(in);
  b.seen.emplace(sig, slot);
  return slot;
}

int32_t CompiledExpr::compile(const Expr& e, Builder& b) {
  auto cached = b.node_slot.find(e.get());
  if (cached != b.node_slot.end()) return cached->second;

  Instr in;
  int32_t slot = -1;
  switch (e->kind) {
    case Kind::Constant:
      in.op = Op::Const;
      in.cval = e->value;
      slot = emit(in, b);
      break;
    case Kind::BaseVar:
      in.op = e->barred ? Op::LoadZBar : Op::LoadZ;
      in.var = e->index;
      slot = emit(in, b);
      break;
    case Kind::FiberVar:
      in.op = e->barred ? Op::LoadUBar : Op::LoadU;
      in.var = e->index;
      slot = emit(in, b);
      break;
    case Kind::Sum:
    case Kind::Product: {
      Op op = (e->kind == Kind::Sum) ? Op::Add : Op::Mul;
      slot = compile(e->kids[0], b);
      for (size_t i = 1; i < e->kids.size(); i++) {
        Instr bin;
        bin.op = op;
        bin.a = slot;
        bin.b = compile(e->kids[i], b);
        slot = emit(bin, b);
      }
      break;
    }
    case Kind::Difference:
    case Kind::Quotient: {
      in.op = (e->kind == Kind::Difference) ? Op::Sub : Op::Div;
      in.a = compile(e->kids[0], b);
      in.b = compile(e->kids[1], b);
      slot = emit(in, b);
      break;
    }
    case Kind::Power:
      in.op = Op::Pow;
      in.a = compile(e->kids[0], b);
      in.k = e->exponent;
      slot = emit(in, b);
      break;
    case Kind::Exp:
    case Kind::Log:
    case Kind::Conj:
    case Kind::Negate: {
      in.op = (e->kind == Kind::Exp)   ? Op::Exp
              : (e->kind == Kind::Log) ? Op::Log
              : (e->kind == Kind::Conj) ? Op::Conj
                                        : Op::Neg;
      in.a = compile(e->kids[0], b);
      slot = emit(in, b);
      break;
    }
  }
  b.node_slot.emplace(e.get(), slot);
  return slot;
}

CompiledExpr::CompiledExpr(const Expr& e) {
  Builder b;
  root_ = compile(e, b);
}

cplx CompiledExpr::eval(const EvalPoint& p, std::vector<cplx>& scratch) const {
  return eval(p.z.data(), p.u.data(), scratch);
}

cplx CompiledExpr::eval(const cplx* z, const cplx* u,
                        std::vector<cplx>& scratch) const {
  if (scratch.size() < instrs_.size()) scratch.resize(instrs_.size());
  cplx* s = scratch.data();
  for (size_t i = 0; i < instrs_.size(); i++) {
    const Instr& in = instrs_[i];
    switch (in.op) {
      case Op::Const: s[i] = in.cval; break;
      case Op::LoadZ: s[i] = z[in.var - 1]; break;
      case Op::LoadZBar: s[i] = std::conj(z[in.var - 1]); break;
      case Op::LoadU: s[i] = u[in.var - 1]; break;
      case Op::LoadUBar: s[i] = std::conj(u[in.var - 1]); break;
      case Op::Add: s[i] = s[in.a] + s[in.b]; break;
      case Op::Sub: s[i] = s[in.a] - s[in.b]; break;
      case Op::Mul: s[i] = s[in.a] * s[in.b]; break;
      case Op::Div: s[i] = s[in.a] / s[in.b]; break;
      case Op::Pow: s[i] = ipow(s[in.a], in.k); break;
      case Op::Exp: s[i] = std::exp(s[in.a]); break;
      case Op::Log: s[i] = std::log(s[in.a]); break;
      case Op::Conj: s[i] = std::conj(s[in.a]); break;
      case Op::Neg: s[i] = -s[in.a]; break;
    }
  }
  return s[root_];
}

}  // namespace finalg
