#include "finalg/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>
#include <utility>

namespace finalg {

namespace {

Expr make_node(ComplexExpr&& n) {
  return std::make_shared<const ComplexExpr>(std::move(n));
}

bool is_const(const Expr& e) { return e->kind == Kind::Constant; }

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

}  // namespace

Expr ex_const(cplx v) {
  ComplexExpr n;
  n.kind = Kind::Constant;
  n.value = v;
  return make_node(std::move(n));
}

Expr ex_real(double v) { return ex_const(cplx(v, 0.0)); }

Expr ex_base(int k, bool barred) {
  ComplexExpr n;
  n.kind = Kind::BaseVar;
  n.index = k;
  n.barred = barred;
  return make_node(std::move(n));
}

Expr ex_fiber(int alpha, bool barred) {
  ComplexExpr n;
  n.kind = Kind::FiberVar;
  n.index = alpha;
  n.barred = barred;
  return make_node(std::move(n));
}

bool is_zero(const Expr& e) {
  return is_const(e) && e->value == cplx(0.0, 0.0);
}

bool is_one(const Expr& e) {
  return is_const(e) && e->value == cplx(1.0, 0.0);
}

Expr ex_sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  cplx c(0.0, 0.0);
  for (auto& t : terms) {
    if (t->kind == Kind::Sum) {
      for (auto& k : t->kids) {
        if (is_const(k))
          c += k->value;
        else
          flat.push_back(k);
      }
    } else if (is_const(t)) {
      c += t->value;
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (c != cplx(0.0, 0.0) || flat.empty()) flat.insert(flat.begin(), ex_const(c));
  if (flat.size() == 1) return flat[0];
  ComplexExpr n;
  n.kind = Kind::Sum;
  n.kids = std::move(flat);
  return make_node(std::move(n));
}

Expr ex_add(const Expr& a, const Expr& b) { return ex_sum({a, b}); }

Expr ex_sub(const Expr& a, const Expr& b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return ex_neg(b);
  if (is_const(a) && is_const(b)) return ex_const(a->value - b->value);
  ComplexExpr n;
  n.kind = Kind::Difference;
  n.kids = {a, b};
  return make_node(std::move(n));
}

Expr ex_prod(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  cplx c(1.0, 0.0);
  for (auto& f : factors) {
    if (f->kind == Kind::Product) {
      for (auto& k : f->kids) {
        if (is_const(k))
          c *= k->value;
        else
          flat.push_back(k);
      }
    } else if (is_const(f)) {
      c *= f->value;
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (c == cplx(0.0, 0.0)) return ex_const(c);
  if (c != cplx(1.0, 0.0) || flat.empty()) flat.insert(flat.begin(), ex_const(c));
  if (flat.size() == 1) return flat[0];
  ComplexExpr n;
  n.kind = Kind::Product;
  n.kids = std::move(flat);
  return make_node(std::move(n));
}

Expr ex_mul(const Expr& a, const Expr& b) { return ex_prod({a, b}); }

Expr ex_div(const Expr& a, const Expr& b) {
  if (is_one(b)) return a;
  if (is_zero(a)) return a;
  if (is_const(a) && is_const(b) && b->value != cplx(0.0, 0.0))
    return ex_const(a->value / b->value);
  ComplexExpr n;
  n.kind = Kind::Quotient;
  n.kids = {a, b};
  return make_node(std::move(n));
}

Expr ex_pow(const Expr& a, long long k) {
  if (k == 0) return ex_real(1.0);
  if (k == 1) return a;
  if (is_const(a) && !(a->value == cplx(0.0, 0.0) && k < 0))
    return ex_const(ipow(a->value, k));
  ComplexExpr n;
  n.kind = Kind::Power;
  n.exponent = k;
  n.kids = {a};
  return make_node(std::move(n));
}

Expr ex_exp(const Expr& a) {
  if (is_const(a)) return ex_const(std::exp(a->value));
  ComplexExpr n;
  n.kind = Kind::Exp;
  n.kids = {a};
  return make_node(std::move(n));
}

Expr ex_log(const Expr& a) {
  if (is_const(a) && a->value != cplx(0.0, 0.0))
    return ex_const(std::log(a->value));
  ComplexExpr n;
  n.kind = Kind::Log;
  n.kids = {a};
  return make_node(std::move(n));
}

Expr ex_neg(const Expr& a) {
  if (is_const(a)) return ex_const(-a->value);
  if (a->kind == Kind::Negate) return a->kids[0];
  ComplexExpr n;
  n.kind = Kind::Negate;
  n.kids = {a};
  return make_node(std::move(n));
}

// Distributes conjugation down to the leaves, so no Conj node survives
// construction. Pushing through log assumes principal-branch arguments stay
// off the negative real axis (documented scenario contract).
Expr ex_conj(const Expr& a) {
  switch (a->kind) {
    case Kind::Constant:
      return ex_const(std::conj(a->value));
    case Kind::BaseVar:
      return ex_base(a->index, !a->barred);
    case Kind::FiberVar:
      return ex_fiber(a->index, !a->barred);
    case Kind::Sum: {
      std::vector<Expr> kids;
      kids.reserve(a->kids.size());
      for (auto& k : a->kids) kids.push_back(ex_conj(k));
      return ex_sum(std::move(kids));
    }
    case Kind::Difference:
      return ex_sub(ex_conj(a->kids[0]), ex_conj(a->kids[1]));
    case Kind::Product: {
      std::vector<Expr> kids;
      kids.reserve(a->kids.size());
      for (auto& k : a->kids) kids.push_back(ex_conj(k));
      return ex_prod(std::move(kids));
    }
    case Kind::Quotient:
      return ex_div(ex_conj(a->kids[0]), ex_conj(a->kids[1]));
    case Kind::Power:
      return ex_pow(ex_conj(a->kids[0]), a->exponent);
    case Kind::Exp:
      return ex_exp(ex_conj(a->kids[0]));
    case Kind::Log:
      return ex_log(ex_conj(a->kids[0]));
    case Kind::Conj:
      return a->kids[0];
    case Kind::Negate:
      return ex_neg(ex_conj(a->kids[0]));
  }
  throw ExprError("unreachable expression kind");
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Constant:
      if (a->value != b->value) return false;
      break;
    case Kind::BaseVar:
    case Kind::FiberVar:
      if (a->index != b->index || a->barred != b->barred) return false;
      break;
    case Kind::Power:
      if (a->exponent != b->exponent) return false;
      break;
    default:
      break;
  }
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); i++)
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

int max_base_index(const Expr& e) {
  int best = (e->kind == Kind::BaseVar) ? e->index : 0;
  for (auto& k : e->kids) best = std::max(best, max_base_index(k));
  return best;
}

int max_fiber_index(const Expr& e) {
  int best = (e->kind == Kind::FiberVar) ? e->index : 0;
  for (auto& k : e->kids) best = std::max(best, max_fiber_index(k));
  return best;
}

bool contains_barred(const Expr& e) {
  if ((e->kind == Kind::BaseVar || e->kind == Kind::FiberVar) && e->barred)
    return true;
  if (e->kind == Kind::Conj) return true;
  for (auto& k : e->kids)
    if (contains_barred(k)) return true;
  return false;
}

// --- parser ---

namespace {

struct Token {
  enum Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Type type;
  size_t pos;
  double num = 0.0;
  bool num_is_integer = false;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : src_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) i_++;
    tok_.pos = i_;
    tok_.text.clear();
    if (i_ >= src_.size()) {
      tok_.type = Token::End;
      return;
    }
    char c = src_[i_];
    switch (c) {
      case '+': tok_.type = Token::Plus; i_++; return;
      case '-': tok_.type = Token::Minus; i_++; return;
      case '*': tok_.type = Token::Star; i_++; return;
      case '/': tok_.type = Token::Slash; i_++; return;
      case '^': tok_.type = Token::Caret; i_++; return;
      case '(': tok_.type = Token::LParen; i_++; return;
      case ')': tok_.type = Token::RParen; i_++; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      size_t start = i_;
      bool integral = true;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) i_++;
      if (i_ < src_.size() && src_[i_] == '.') {
        integral = false;
        i_++;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) i_++;
      }
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        size_t save = i_;
        i_++;
        if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) i_++;
        if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
          integral = false;
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) i_++;
        } else {
          i_ = save;  // 'e' belongs to a following identifier, not the number
        }
      }
      tok_.type = Token::Number;
      tok_.text = src_.substr(start, i_ - start);
      tok_.num = std::strtod(tok_.text.c_str(), nullptr);
      tok_.num_is_integer = integral;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = i_;
      while (i_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[i_]))) i_++;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) i_++;
      tok_.type = Token::Ident;
      tok_.text = src_.substr(start, i_ - start);
      return;
    }
    throw ParseError(std::string("syntax error at position ") + std::to_string(i_) +
                         ": unexpected character '" + c + "'",
                     i_);
  }

  const std::string& src_;
  size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& s, int n, int m) : lex_(s), n_(n), m_(m) {}

  Expr run() {
    Expr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.type != Token::End)
      throw ParseError("syntax error at position " + std::to_string(t.pos) +
                           ": unexpected trailing input",
                       t.pos);
    return e;
  }

 private:
  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.type == Token::Plus) {
        lex_.take();
        e = ex_add(e, parse_term());
      } else if (t.type == Token::Minus) {
        lex_.take();
        e = ex_sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.type == Token::Star) {
        lex_.take();
        e = ex_mul(e, parse_factor());
      } else if (t.type == Token::Slash) {
        lex_.take();
        e = ex_div(e, parse_factor());
      } else {
        return e;
      }
    }
  }

  // '^' binds tighter than unary minus: -z1^2 is -(z1^2).
  Expr parse_factor() {
    if (lex_.peek().type == Token::Minus) {
      lex_.take();
      return ex_neg(parse_factor());
    }
    Expr a = parse_atom();
    if (lex_.peek().type == Token::Caret) {
      lex_.take();
      return ex_pow(a, parse_int_exponent());
    }
    return a;
  }

  long long parse_int_exponent() {
    bool negate = false;
    if (lex_.peek().type == Token::Minus) {
      lex_.take();
      negate = true;
    }
    Token t = lex_.peek();
    if (t.type != Token::Number || !t.num_is_integer)
      throw ParseError("non-integer exponent at position " + std::to_string(t.pos), t.pos);
    lex_.take();
    long long k = static_cast<long long>(t.num);
    return negate ? -k : k;
  }

  Expr parse_atom() {
    Token t = lex_.peek();
    switch (t.type) {
      case Token::Number:
        lex_.take();
        return ex_real(t.num);
      case Token::LParen: {
        lex_.take();
        Expr e = parse_sum();
        expect_rparen();
        return e;
      }
      case Token::Ident:
        lex_.take();
        return parse_ident(t);
      default:
        throw ParseError("syntax error at position " + std::to_string(t.pos) +
                             ": expected a number, variable, function, or '('",
                         t.pos);
    }
  }

  Expr parse_ident(const Token& t) {
    const std::string& s = t.text;
    if (s == "i") return ex_const(cplx(0.0, 1.0));
    if (s == "exp" || s == "log" || s == "conj") {
      if (lex_.peek().type != Token::LParen)
        throw ParseError("syntax error at position " + std::to_string(lex_.peek().pos) +
                             ": expected '(' after '" + s + "'",
                         lex_.peek().pos);
      lex_.take();
      Expr arg = parse_sum();
      expect_rparen();
      if (s == "exp") return ex_exp(arg);
      if (s == "log") return ex_log(arg);
      return ex_conj(arg);
    }
    size_t d = 0;
    while (d < s.size() && std::isalpha(static_cast<unsigned char>(s[d]))) d++;
    if (d == 1 && (s[0] == 'z' || s[0] == 'u') && d < s.size()) {
      long long idx = std::strtoll(s.c_str() + 1, nullptr, 10);
      int limit = (s[0] == 'z') ? n_ : m_;
      if (idx < 1 || idx > limit)
        throw ParseError("index out of range at position " + std::to_string(t.pos) +
                             ": " + s + " (valid range 1.." + std::to_string(limit) + ")",
                         t.pos);
      return (s[0] == 'z') ? ex_base(static_cast<int>(idx)) : ex_fiber(static_cast<int>(idx));
    }
    throw ParseError("unknown identifier at position " + std::to_string(t.pos) + ": '" + s + "'",
                     t.pos);
  }

  void expect_rparen() {
    const Token& t = lex_.peek();
    if (t.type != Token::RParen)
      throw ParseError("syntax error at position " + std::to_string(t.pos) + ": expected ')'",
                       t.pos);
    lex_.take();
  }

  Lexer lex_;
  int n_;
  int m_;
};

}  // namespace

Expr parse_expr(const std::string& text, int n, int m) {
  return Parser(text, n, m).run();
}

cplx eval_expr(const Expr& e, const EvalPoint& p) {
  switch (e->kind) {
    case Kind::Constant:
      return e->value;
    case Kind::BaseVar: {
      if (e->index < 1 || static_cast<size_t>(e->index) > p.z.size())
        throw EvalError("base variable index out of range for point");
      cplx v = p.z[e->index - 1];
      return e->barred ? std::conj(v) : v;
    }
    case Kind::FiberVar: {
      if (e->index < 1 || static_cast<size_t>(e->index) > p.u.size())
        throw EvalError("fiber variable index out of range for point");
      cplx v = p.u[e->index - 1];
      return e->barred ? std::conj(v) : v;
    }
    case Kind::Sum: {
      cplx acc(0.0, 0.0);
      for (auto& k : e->kids) acc += eval_expr(k, p);
      return acc;
    }
    case Kind::Difference:
      return eval_expr(e->kids[0], p) - eval_expr(e->kids[1], p);
    case Kind::Product: {
      cplx acc(1.0, 0.0);
      for (auto& k : e->kids) acc *= eval_expr(k, p);
      return acc;
    }
    case Kind::Quotient: {
      cplx den = eval_expr(e->kids[1], p);
      if (den == cplx(0.0, 0.0)) throw EvalError("division by zero");
      return eval_expr(e->kids[0], p) / den;
    }
    case Kind::Power: {
      cplx base = eval_expr(e->kids[0], p);
      if (base == cplx(0.0, 0.0) && e->exponent < 0)
        throw EvalError("division by zero");
      return ipow(base, e->exponent);
    }
    case Kind::Exp:
      return std::exp(eval_expr(e->kids[0], p));
    case Kind::Log: {
      cplx a = eval_expr(e->kids[0], p);
      if (a == cplx(0.0, 0.0)) throw EvalError("log of zero");
      return std::log(a);
    }
    case Kind::Conj:
      return std::conj(eval_expr(e->kids[0], p));
    case Kind::Negate:
      return -eval_expr(e->kids[0], p);
  }
  throw EvalError("unreachable expression kind");
}

namespace {

struct DerivCtx {
  Var var;
  int index;
  // Memoized per (node, barred) because differentiating through a Conj node
  // flips the conjugation of the direction.
  std::unordered_map<const ComplexExpr*, Expr> memo[2];

  Expr d(const Expr& e, bool barred) {
    auto& m = memo[barred ? 1 : 0];
    auto it = m.find(e.get());
    if (it != m.end()) return it->second;
    Expr r = compute(e, barred);
    m.emplace(e.get(), r);
    return r;
  }

  Expr compute(const Expr& e, bool barred) {
    switch (e->kind) {
      case Kind::Constant:
        return ex_real(0.0);
      case Kind::BaseVar:
        return (var == Var::Base && e->index == index && e->barred == barred)
                   ? ex_real(1.0)
                   : ex_real(0.0);
      case Kind::FiberVar:
        return (var == Var::Fiber && e->index == index && e->barred == barred)
                   ? ex_real(1.0)
                   : ex_real(0.0);
      case Kind::Sum: {
        std::vector<Expr> kids;
        kids.reserve(e->kids.size());
        for (auto& k : e->kids) kids.push_back(d(k, barred));
        return ex_sum(std::move(kids));
      }
      case Kind::Difference:
        return ex_sub(d(e->kids[0], barred), d(e->kids[1], barred));
      case Kind::Product: {
        std::vector<Expr> terms;
        for (size_t i = 0; i < e->kids.size(); i++) {
          Expr di = d(e->kids[i], barred);
          if (is_zero(di)) continue;
          std::vector<Expr> fac;
          fac.reserve(e->kids.size());
          for (size_t j = 0; j < e->kids.size(); j++)
            fac.push_back(i == j ? di : e->kids[j]);
          terms.push_back(ex_prod(std::move(fac)));
        }
        return ex_sum(std::move(terms));
      }
      case Kind::Quotient: {
        const Expr& a = e->kids[0];
        const Expr& b = e->kids[1];
        Expr da = d(a, barred);
        Expr db = d(b, barred);
        if (is_zero(db)) return ex_div(da, b);
        return ex_div(ex_sub(ex_mul(da, b), ex_mul(a, db)), ex_pow(b, 2));
      }
      case Kind::Power: {
        Expr da = d(e->kids[0], barred);
        if (is_zero(da)) return da;
        return ex_prod({ex_real(static_cast<double>(e->exponent)),
                        ex_pow(e->kids[0], e->exponent - 1), da});
      }
      case Kind::Exp: {
        Expr da = d(e->kids[0], barred);
        if (is_zero(da)) return da;
        return ex_mul(ex_exp(e->kids[0]), da);
      }
      case Kind::Log: {
        Expr da = d(e->kids[0], barred);
        if (is_zero(da)) return da;
        return ex_div(da, e->kids[0]);
      }
      case Kind::Conj:
        return ex_conj(d(e->kids[0], !barred));
      case Kind::Negate:
        return ex_neg(d(e->kids[0], barred));
    }
    throw ExprError("unreachable expression kind");
  }
};

}  // namespace

Expr wirtinger_deriv(const Expr& e, Var var, int index, bool barred) {
  DerivCtx ctx;
  ctx.var = var;
  ctx.index = index;
  return ctx.d(e, barred);
}

cplx fd_deriv(const Expr& e, Var var, int index, bool barred,
              const EvalPoint& p, double step) {
  if (step <= 0.0) throw ExprError("fd_deriv requires step > 0");
  auto shifted = [&](double dx, double dy) {
    EvalPoint q = p;
    cplx& c = (var == Var::Base) ? q.z.at(index - 1) : q.u.at(index - 1);
    c += cplx(dx, dy);
    return eval_expr(e, q);
  };
  cplx fx = (shifted(step, 0.0) - shifted(-step, 0.0)) / (2.0 * step);
  cplx fy = (shifted(0.0, step) - shifted(0.0, -step)) / (2.0 * step);
  cplx i(0.0, 1.0);
  return barred ? 0.5 * (fx + i * fy) : 0.5 * (fx - i * fy);
}

bool is_holomorphic(const Expr& e) {
  if (contains_barred(e)) return false;
  int nk = max_base_index(e);
  int na = max_fiber_index(e);
  for (int k = 1; k <= nk; k++)
    if (!is_zero(wirtinger_deriv(e, Var::Base, k, true))) return false;
  for (int a = 1; a <= na; a++)
    if (!is_zero(wirtinger_deriv(e, Var::Fiber, a, true))) return false;
  return true;
}

// --- printer ---

namespace {

// Precedence levels: 1 additive, 2 multiplicative, 3 unary minus, 4 power,
// 5 atom. A subexpression is parenthesized when its level is below the
// context's requirement.
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  if (std::strtod(buf, nullptr) == v) return buf;
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Printed {
  std::string text;
  int level;
};

Printed print_const(cplx v) {
  double re = v.real(), im = v.imag();
  if (im == 0.0) {
    std::string s = fmt_double(re);
    return {s, (re < 0.0) ? 3 : 5};
  }
  if (re == 0.0) {
    if (im == 1.0) return {"i", 5};
    if (im == -1.0) return {"-i", 3};
    return {fmt_double(im) + "*i", (im < 0.0) ? 3 : 2};
  }
  std::string s = "(" + fmt_double(re);
  if (im >= 0.0)
    s += "+" + fmt_double(im) + "*i)";
  else
    s += "-" + fmt_double(-im) + "*i)";
  return {s, 5};
}

Printed print_node(const Expr& e);

std::string print_at(const Expr& e, int min_level) {
  Printed p = print_node(e);
  if (p.level < min_level) return "(" + p.text + ")";
  return p.text;
}

Printed print_node(const Expr& e) {
  switch (e->kind) {
    case Kind::Constant:
      return print_const(e->value);
    case Kind::BaseVar: {
      std::string v = "z" + std::to_string(e->index);
      return {e->barred ? "conj(" + v + ")" : v, 5};
    }
    case Kind::FiberVar: {
      std::string v = "u" + std::to_string(e->index);
      return {e->barred ? "conj(" + v + ")" : v, 5};
    }
    case Kind::Sum: {
      std::string s;
      for (size_t i = 0; i < e->kids.size(); i++) {
        std::string part = print_at(e->kids[i], 1);
        if (i == 0) {
          s = part;
        } else if (!part.empty() && part[0] == '-') {
          s += part;  // "a+-b" is grammar-legal; avoid doubling the sign
        } else {
          s += "+" + part;
        }
      }
      return {s, 1};
    }
    case Kind::Difference:
      return {print_at(e->kids[0], 1) + "-" + print_at(e->kids[1], 2), 1};
    case Kind::Product: {
      std::string s;
      for (size_t i = 0; i < e->kids.size(); i++) {
        if (i) s += "*";
        s += print_at(e->kids[i], i == 0 ? 2 : 3);
      }
      return {s, 2};
    }
    case Kind::Quotient:
      return {print_at(e->kids[0], 2) + "/" + print_at(e->kids[1], 3), 2};
    case Kind::Power:
      return {print_at(e->kids[0], 5) + "^" + std::to_string(e->exponent), 4};
    case Kind::Exp:
      return {"exp(" + print_at(e->kids[0], 1) + ")", 5};
    case Kind::Log:
      return {"log(" + print_at(e->kids[0], 1) + ")", 5};
    case Kind::Conj:
      return {"conj(" + print_at(e->kids[0], 1) + ")", 5};
    case Kind::Negate:
      return {"-" + print_at(e->kids[0], 3), 3};
  }
  throw ExprError("unreachable expression kind");
}

}  // namespace

std::string to_string(const Expr& e) { return print_node(e).text; }

}  // namespace finalg
