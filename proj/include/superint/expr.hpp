#pragma once
// Immutable expression trees: construction with constant folding, a small
// recursive-descent parser, printing, substitution. No rewriting beyond
// constant folding — correctness of identities rests on evaluation.

#include <cctype>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "superint/common.hpp"

namespace superint {

enum class NodeKind { Constant, Variable, Sum, Product, Power, Quotient, Function, Derivative };

enum class Func { Sin, Cos, Tan, Cot, Sinh, Cosh, Exp, Log, Sqrt };

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Cot: return "cot";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

// Exact rational fast path for real constants. den > 0, gcd-reduced.
struct Rational {
  long long num = 0;
  long long den = 1;

  static std::optional<Rational> make(long long n, long long d) {
    if (d == 0) return std::nullopt;
    if (d < 0) { n = -n; d = -d; }
    long long g = std::abs(gcdll(n, d));
    if (g > 1) { n /= g; d /= g; }
    return Rational{n, d};
  }
  static long long gcdll(long long a, long long b) {
    a = std::abs(a); b = std::abs(b);
    while (b) { long long t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }
  double value() const { return double(num) / double(den); }
  bool is_integer() const { return den == 1; }
};

namespace detail {
inline bool mul_overflow(long long a, long long b, long long* out) {
  return __builtin_mul_overflow(a, b, out);
}
inline bool add_overflow(long long a, long long b, long long* out) {
  return __builtin_add_overflow(a, b, out);
}

inline std::optional<Rational> rat_add(const Rational& a, const Rational& b) {
  long long n1, n2, n, d;
  if (mul_overflow(a.num, b.den, &n1)) return std::nullopt;
  if (mul_overflow(b.num, a.den, &n2)) return std::nullopt;
  if (add_overflow(n1, n2, &n)) return std::nullopt;
  if (mul_overflow(a.den, b.den, &d)) return std::nullopt;
  return Rational::make(n, d);
}
inline std::optional<Rational> rat_mul(const Rational& a, const Rational& b) {
  long long n, d;
  if (mul_overflow(a.num, b.num, &n)) return std::nullopt;
  if (mul_overflow(a.den, b.den, &d)) return std::nullopt;
  return Rational::make(n, d);
}
inline std::optional<Rational> rat_div(const Rational& a, const Rational& b) {
  if (b.num == 0) return std::nullopt;
  long long n, d;
  if (mul_overflow(a.num, b.den, &n)) return std::nullopt;
  if (mul_overflow(a.den, b.num, &d)) return std::nullopt;
  return Rational::make(n, d);
}
inline std::optional<Rational> rat_pow(const Rational& a, long long e) {
  Rational r{1, 1};
  Rational base = a;
  bool neg = e < 0;
  unsigned long long k = neg ? -(unsigned long long)e : (unsigned long long)e;
  while (k) {
    if (k & 1) {
      auto t = rat_mul(r, base);
      if (!t) return std::nullopt;
      r = *t;
    }
    k >>= 1;
    if (k) {
      auto t = rat_mul(base, base);
      if (!t) return std::nullopt;
      base = *t;
    }
  }
  if (neg) {
    if (r.num == 0) return std::nullopt;
    return Rational::make(r.den, r.num);
  }
  return r;
}
}  // namespace detail

class Expr;
class ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

class ExprNode {
 public:
  NodeKind kind;
  // Constant
  cplx cval{};
  std::optional<Rational> rat;  // set iff the constant is an exact real rational
  // Variable / Derivative variable
  std::string name;
  // Function
  Func func = Func::Sin;
  // Derivative order
  int order = 1;
  // Children: Sum/Product (n-ary), Power (base, exponent), Quotient (num, den),
  // Function (arg), Derivative (arg).
  std::vector<Expr> kids;
};

class Expr {
 public:
  Expr();  // zero
  explicit Expr(ExprPtr p) : p_(std::move(p)) {}
  Expr(double v);
  Expr(int v);
  Expr(long long v);
  Expr(cplx v);

  const ExprNode& node() const { return *p_; }
  const ExprPtr& ptr() const { return p_; }
  NodeKind kind() const { return p_->kind; }

  bool is_const() const { return p_->kind == NodeKind::Constant; }
  bool is_zero() const { return is_const() && p_->cval == cplx(0.0, 0.0); }
  bool is_one() const { return is_const() && p_->cval == cplx(1.0, 0.0); }
  bool is_int_const() const { return is_const() && p_->rat && p_->rat->is_integer(); }
  long long int_value() const { return p_->rat->num; }
  cplx const_value() const { return p_->cval; }

  std::string str() const;

 private:
  ExprPtr p_;
};

// ---- constructors -----------------------------------------------------------

inline Expr make_const(cplx v, std::optional<Rational> rat = std::nullopt) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->cval = v;
  if (rat && v.imag() == 0.0 && rat->value() == v.real()) n->rat = rat;
  return Expr(ExprPtr(n));
}

inline Expr make_int(long long v) { return make_const(cplx(double(v), 0.0), Rational{v, 1}); }

inline Expr make_rational(long long num, long long den) {
  auto r = Rational::make(num, den);
  if (!r) throw std::invalid_argument("rational with zero denominator");
  return make_const(cplx(r->value(), 0.0), r);
}

inline Expr::Expr() { *this = make_int(0); }
inline Expr::Expr(double v) {
  double ip;
  if (std::modf(v, &ip) == 0.0 && std::abs(v) < 1e15)
    *this = make_int((long long)ip);
  else
    *this = make_const(cplx(v, 0.0));
}
inline Expr::Expr(int v) { *this = make_int(v); }
inline Expr::Expr(long long v) { *this = make_int(v); }
inline Expr::Expr(cplx v) {
  if (v.imag() == 0.0)
    *this = Expr(v.real());
  else
    *this = make_const(v);
}

inline Expr var(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Variable;
  n->name = std::move(name);
  return Expr(ExprPtr(n));
}

inline Expr imag_unit() { return make_const(cplx(0.0, 1.0)); }
inline Expr pi_const() { return make_const(cplx(kPi, 0.0)); }

inline Expr sum(std::vector<Expr> kids);
inline Expr prod(std::vector<Expr> kids);

namespace detail {
inline std::optional<cplx> const_of(const Expr& e) {
  if (e.is_const()) return e.const_value();
  return std::nullopt;
}
}  // namespace detail

inline Expr sum(std::vector<Expr> kids) {
  std::vector<Expr> flat;
  cplx cacc(0.0, 0.0);
  std::optional<Rational> racc = Rational{0, 1};
  bool has_const = false;
  std::vector<const std::vector<Expr>*> stack;
  auto absorb = [&](const Expr& e, auto&& self) -> void {
    if (e.kind() == NodeKind::Sum) {
      for (const auto& k : e.node().kids) self(k, self);
      return;
    }
    if (e.is_const()) {
      has_const = true;
      cacc += e.const_value();
      if (racc && e.node().rat)
        racc = detail::rat_add(*racc, *e.node().rat);
      else
        racc = std::nullopt;
      return;
    }
    flat.push_back(e);
  };
  for (const auto& e : kids) absorb(e, absorb);
  if (has_const && cacc != cplx(0.0, 0.0)) {
    if (racc)
      flat.push_back(make_const(cplx(racc->value(), 0.0), racc));
    else
      flat.push_back(make_const(cacc));
  }
  if (flat.empty()) return make_int(0);
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Sum;
  n->kids = std::move(flat);
  return Expr(ExprPtr(n));
}

inline Expr prod(std::vector<Expr> kids) {
  std::vector<Expr> flat;
  cplx cacc(1.0, 0.0);
  std::optional<Rational> racc = Rational{1, 1};
  bool has_const = false;
  auto absorb = [&](const Expr& e, auto&& self) -> void {
    if (e.kind() == NodeKind::Product) {
      for (const auto& k : e.node().kids) self(k, self);
      return;
    }
    if (e.is_const()) {
      has_const = true;
      cacc *= e.const_value();
      if (racc && e.node().rat)
        racc = detail::rat_mul(*racc, *e.node().rat);
      else
        racc = std::nullopt;
      return;
    }
    flat.push_back(e);
  };
  for (const auto& e : kids) absorb(e, absorb);
  if (has_const && cacc == cplx(0.0, 0.0)) return make_int(0);
  Expr cfactor = racc ? make_const(cplx(racc->value(), 0.0), racc) : make_const(cacc);
  if (has_const && !cfactor.is_one()) flat.insert(flat.begin(), cfactor);
  if (flat.empty()) return make_int(1);
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Product;
  n->kids = std::move(flat);
  return Expr(ExprPtr(n));
}

inline Expr quot(const Expr& a, const Expr& b) {
  if (b.is_const() && b.const_value() == cplx(0.0, 0.0))
    throw std::invalid_argument("division by constant zero");
  if (a.is_zero()) return make_int(0);
  if (b.is_one()) return a;
  if (a.is_const() && b.is_const()) {
    if (a.node().rat && b.node().rat) {
      if (auto r = detail::rat_div(*a.node().rat, *b.node().rat))
        return make_const(cplx(r->value(), 0.0), r);
    }
    return make_const(a.const_value() / b.const_value());
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Quotient;
  n->kids = {a, b};
  return Expr(ExprPtr(n));
}

inline Expr pow(const Expr& b, const Expr& e) {
  if (e.is_const()) {
    if (e.const_value() == cplx(0.0, 0.0)) return make_int(1);
    if (e.const_value() == cplx(1.0, 0.0)) return b;
    if (b.is_const() && e.is_int_const()) {
      long long k = e.int_value();
      if (b.node().rat) {
        if (auto r = detail::rat_pow(*b.node().rat, k))
          return make_const(cplx(r->value(), 0.0), r);
      }
      return make_const(std::pow(b.const_value(), cplx(double(k), 0.0)));
    }
    if (b.is_one()) return make_int(1);
    if (b.is_zero() && e.is_int_const() && e.int_value() > 0) return make_int(0);
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Power;
  n->kids = {b, e};
  return Expr(ExprPtr(n));
}

inline Expr pow(const Expr& b, long long k) { return pow(b, make_int(k)); }

inline Expr apply_func(Func f, const Expr& x) {
  if (x.is_zero()) {
    switch (f) {
      case Func::Sin: case Func::Tan: case Func::Sinh: case Func::Sqrt: return make_int(0);
      case Func::Cos: case Func::Cosh: case Func::Exp: return make_int(1);
      default: break;
    }
  }
  if (x.is_one() && f == Func::Log) return make_int(0);
  if (x.is_one() && f == Func::Sqrt) return make_int(1);
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Function;
  n->func = f;
  n->kids = {x};
  return Expr(ExprPtr(n));
}

// Formal derivative node: d^order/d name^order applied to arg. The node is
// kept unevaluated; jet evaluation resolves it.
inline Expr deriv(const Expr& arg, const std::string& name, int order = 1) {
  if (order == 0) return arg;
  if (order < 0) throw std::invalid_argument("negative derivative order");
  if (arg.is_const()) return make_int(0);
  if (arg.kind() == NodeKind::Variable) {
    if (arg.node().name == name) return order == 1 ? make_int(1) : make_int(0);
    return make_int(0);
  }
  // Merge nested derivatives in the same variable.
  if (arg.kind() == NodeKind::Derivative && arg.node().name == name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Derivative;
    n->name = name;
    n->order = order + arg.node().order;
    n->kids = {arg.node().kids[0]};
    return Expr(ExprPtr(n));
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Derivative;
  n->name = name;
  n->order = order;
  n->kids = {arg};
  return Expr(ExprPtr(n));
}

inline Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
inline Expr operator-(const Expr& a) { return prod({make_int(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return prod({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return quot(a, b); }

inline Expr sin(const Expr& x) { return apply_func(Func::Sin, x); }
inline Expr cos(const Expr& x) { return apply_func(Func::Cos, x); }
inline Expr tan(const Expr& x) { return apply_func(Func::Tan, x); }
inline Expr cot(const Expr& x) { return apply_func(Func::Cot, x); }
inline Expr sinh(const Expr& x) { return apply_func(Func::Sinh, x); }
inline Expr cosh(const Expr& x) { return apply_func(Func::Cosh, x); }
inline Expr exp(const Expr& x) { return apply_func(Func::Exp, x); }
inline Expr log(const Expr& x) { return apply_func(Func::Log, x); }
inline Expr sqrt(const Expr& x) { return apply_func(Func::Sqrt, x); }

// ---- queries ----------------------------------------------------------------

inline void collect_free_vars(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case NodeKind::Constant: return;
    case NodeKind::Variable: out.insert(e.node().name); return;
    case NodeKind::Derivative:
      out.insert(e.node().name);  // the direction must be bound to evaluate
      [[fallthrough]];
    default:
      for (const auto& k : e.node().kids) collect_free_vars(k, out);
  }
}

inline std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> s;
  collect_free_vars(e, s);
  return s;
}

inline std::size_t tree_size(const Expr& e) {
  std::size_t n = 1;
  for (const auto& k : e.node().kids) n += tree_size(k);
  return n;
}

// ---- substitution -----------------------------------------------------------

inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
  switch (e.kind()) {
    case NodeKind::Constant: return e;
    case NodeKind::Variable: {
      auto it = repl.find(e.node().name);
      return it == repl.end() ? e : it->second;
    }
    case NodeKind::Sum: {
      std::vector<Expr> ks;
      ks.reserve(e.node().kids.size());
      for (const auto& k : e.node().kids) ks.push_back(substitute(k, repl));
      return sum(std::move(ks));
    }
    case NodeKind::Product: {
      std::vector<Expr> ks;
      ks.reserve(e.node().kids.size());
      for (const auto& k : e.node().kids) ks.push_back(substitute(k, repl));
      return prod(std::move(ks));
    }
    case NodeKind::Power:
      return pow(substitute(e.node().kids[0], repl), substitute(e.node().kids[1], repl));
    case NodeKind::Quotient:
      return quot(substitute(e.node().kids[0], repl), substitute(e.node().kids[1], repl));
    case NodeKind::Function:
      return apply_func(e.node().func, substitute(e.node().kids[0], repl));
    case NodeKind::Derivative: {
      // Substituting the derivative variable itself is not supported; the
      // variable is a bound direction, not a value slot.
      if (repl.count(e.node().name))
        throw std::invalid_argument("cannot substitute the variable of a formal derivative");
      return deriv(substitute(e.node().kids[0], repl), e.node().name, e.node().order);
    }
  }
  throw std::logic_error("unreachable");
}

inline Expr substitute(const Expr& e, const std::string& name, const Expr& value) {
  return substitute(e, std::map<std::string, Expr>{{name, value}});
}

// ---- printing ---------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_const(const ExprNode& n) {
  if (n.rat) {
    if (n.rat->is_integer()) return std::to_string(n.rat->num);
    return std::to_string(n.rat->num) + "/" + std::to_string(n.rat->den);
  }
  const cplx v = n.cval;
  if (v.imag() == 0.0) return fmt_double(v.real());
  std::string im;
  if (v.imag() == 1.0) im = "I";
  else if (v.imag() == -1.0) im = "-I";
  else im = fmt_double(v.imag()) + "*I";
  if (v.real() == 0.0) return im;
  return "(" + fmt_double(v.real()) + (v.imag() > 0 || std::isnan(v.imag()) ? "+" : "") + im + ")";
}

// Precedence: sum 1, product/quotient 2, unary minus 2, power 3, atom 4.
inline void print_rec(const Expr& e, std::string& out, int parent_prec);

inline void paren_if(const Expr& e, std::string& out, int prec, int parent_prec) {
  if (prec < parent_prec) {
    out += '(';
    print_rec(e, out, 0);
    out += ')';
  } else {
    print_rec(e, out, parent_prec);
  }
}

inline void print_rec(const Expr& e, std::string& out, int parent_prec) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant: {
      std::string s = fmt_const(n);
      bool neg = !s.empty() && s[0] == '-';
      if (neg && parent_prec >= 2) { out += '(' + s + ')'; }
      else out += s;
      return;
    }
    case NodeKind::Variable: out += n.name; return;
    case NodeKind::Sum: {
      if (parent_prec > 1) out += '(';
      bool first = true;
      for (const auto& k : n.kids) {
        std::string piece;
        print_rec(k, piece, 1 + 1);  // children of a sum print at product level
        if (!first && !piece.empty() && piece[0] != '-') out += " + ";
        else if (!first) { out += " - "; piece = piece.substr(1); }
        out += piece;
        first = false;
      }
      if (parent_prec > 1) out += ')';
      return;
    }
    case NodeKind::Product: {
      if (parent_prec > 2) out += '(';
      bool first = true;
      for (const auto& k : n.kids) {
        if (!first) out += "*";
        std::string piece;
        print_rec(k, piece, 3);
        if (k.kind() == NodeKind::Sum || k.kind() == NodeKind::Quotient ||
            (k.is_const() && !piece.empty() && (piece[0] == '-' || k.node().rat && !k.node().rat->is_integer()))) {
          out += '(';
          piece.clear();
          print_rec(k, piece, 0);
          out += piece;
          out += ')';
        } else {
          out += piece;
        }
        first = false;
      }
      if (parent_prec > 2) out += ')';
      return;
    }
    case NodeKind::Quotient: {
      if (parent_prec > 2) out += '(';
      std::string a, b;
      print_rec(n.kids[0], a, 3);
      print_rec(n.kids[1], b, 4);
      if (n.kids[0].kind() == NodeKind::Sum || n.kids[0].kind() == NodeKind::Quotient) {
        a.clear(); a += '('; print_rec(n.kids[0], a, 0); a += ')';
        a = a;  // wrapped
      }
      if (n.kids[1].kind() != NodeKind::Variable && !n.kids[1].is_const()) {
        b.clear(); b += '('; print_rec(n.kids[1], b, 0); b += ')';
      } else if (n.kids[1].is_const() && b.find('/') != std::string::npos) {
        b = "(" + b + ")";
      }
      out += a + "/" + b;
      if (parent_prec > 2) out += ')';
      return;
    }
    case NodeKind::Power: {
      std::string b, x;
      if (n.kids[0].kind() == NodeKind::Variable || (n.kids[0].is_const() && n.kids[0].node().rat &&
                                                     n.kids[0].node().rat->is_integer() &&
                                                     n.kids[0].node().rat->num >= 0)) {
        print_rec(n.kids[0], b, 4);
      } else {
        b += '('; print_rec(n.kids[0], b, 0); b += ')';
      }
      if (n.kids[1].kind() == NodeKind::Variable || (n.kids[1].is_const() && n.kids[1].node().rat &&
                                                     n.kids[1].node().rat->is_integer() &&
                                                     n.kids[1].node().rat->num >= 0)) {
        print_rec(n.kids[1], x, 4);
      } else {
        x += '('; print_rec(n.kids[1], x, 0); x += ')';
      }
      out += b + "^" + x;
      return;
    }
    case NodeKind::Function: {
      out += func_name(n.func);
      out += '(';
      print_rec(n.kids[0], out, 0);
      out += ')';
      return;
    }
    case NodeKind::Derivative: {
      out += "diff(";
      print_rec(n.kids[0], out, 0);
      out += ", " + n.name;
      if (n.order != 1) out += ", " + std::to_string(n.order);
      out += ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string Expr::str() const {
  std::string out;
  detail::print_rec(*this, out, 0);
  return out;
}

// ---- parser -----------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), pos(pos) {}
  std::size_t pos;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (i_ < s_.size()) throw ParseError("unexpected trailing input", i_);
    return e;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;

  void skip_ws() {
    while (i_ < s_.size() && std::isspace((unsigned char)s_[i_])) ++i_;
  }
  bool eat(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) { ++i_; return true; }
    return false;
  }
  char peek() {
    skip_ws();
    return i_ < s_.size() ? s_[i_] : '\0';
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      if (eat('+')) e = e + parse_term();
      else if (eat('-')) e = e - parse_term();
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (eat('*')) e = e * parse_unary();
      else if (eat('/')) e = e / parse_unary();
      else return e;
    }
  }

  Expr parse_unary() {
    if (eat('-')) return -parse_unary();
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (eat('^')) {
      Expr ex = parse_unary();  // right-associative, allows a^-2 and a^b^c
      return pow(base, ex);
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (i_ >= s_.size()) throw ParseError("unexpected end of input", i_);
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      Expr e = parse_sum();
      if (!eat(')')) throw ParseError("expected ')'", i_);
      return e;
    }
    if (std::isdigit((unsigned char)c) || c == '.') return parse_number();
    if (std::isalpha((unsigned char)c) || c == '_') return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }

  Expr parse_number() {
    std::size_t start = i_;
    bool is_int = true;
    while (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) ++i_;
    if (i_ < s_.size() && s_[i_] == '.') {
      is_int = false;
      ++i_;
      while (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) ++i_;
    }
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      std::size_t save = i_;
      ++i_;
      if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
      if (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) {
        is_int = false;
        while (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) ++i_;
      } else {
        i_ = save;  // not an exponent, e.g. "2e" where e is an identifier: reject below
      }
    }
    std::string tok(s_.substr(start, i_ - start));
    if (tok == ".") throw ParseError("malformed number", start);
    if (is_int) {
      errno = 0;
      char* end = nullptr;
      long long v = std::strtoll(tok.c_str(), &end, 10);
      if (errno == 0 && end && *end == '\0') return make_int(v);
      return make_const(cplx(std::strtod(tok.c_str(), nullptr), 0.0));
    }
    return make_const(cplx(std::strtod(tok.c_str(), nullptr), 0.0));
  }

  Expr parse_ident() {
    std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum((unsigned char)s_[i_]) || s_[i_] == '_')) ++i_;
    std::string name(s_.substr(start, i_ - start));
    skip_ws();
    if (i_ < s_.size() && s_[i_] == '(') {
      ++i_;
      if (name == "diff") {
        Expr arg = parse_sum();
        if (!eat(',')) throw ParseError("diff expects diff(expr, var[, order])", i_);
        skip_ws();
        std::size_t vstart = i_;
        if (i_ >= s_.size() || !(std::isalpha((unsigned char)s_[i_]) || s_[i_] == '_'))
          throw ParseError("diff expects a variable name", i_);
        while (i_ < s_.size() && (std::isalnum((unsigned char)s_[i_]) || s_[i_] == '_')) ++i_;
        std::string vn(s_.substr(vstart, i_ - vstart));
        int order = 1;
        if (eat(',')) {
          skip_ws();
          std::size_t ostart = i_;
          while (i_ < s_.size() && std::isdigit((unsigned char)s_[i_])) ++i_;
          if (ostart == i_) throw ParseError("diff order must be a positive integer", i_);
          order = std::atoi(std::string(s_.substr(ostart, i_ - ostart)).c_str());
        }
        if (!eat(')')) throw ParseError("expected ')'", i_);
        return deriv(arg, vn, order);
      }
      static const std::map<std::string, Func> fns = {
          {"sin", Func::Sin}, {"cos", Func::Cos}, {"tan", Func::Tan},
          {"cot", Func::Cot}, {"sinh", Func::Sinh}, {"cosh", Func::Cosh},
          {"exp", Func::Exp}, {"log", Func::Log}, {"sqrt", Func::Sqrt}};
      auto it = fns.find(name);
      if (it == fns.end()) throw ParseError("unknown function '" + name + "'", start);
      Expr arg = parse_sum();
      if (!eat(')')) throw ParseError("expected ')'", i_);
      return apply_func(it->second, arg);
    }
    if (name == "I") return imag_unit();
    if (name == "pi") return pi_const();
    return var(name);
  }
};

}  // namespace detail

inline Expr parse_expr(std::string_view s) { return detail::Parser(s).parse(); }

}  // namespace superint
