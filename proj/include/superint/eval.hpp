#pragma once
// Jet evaluation of expression trees at a point. Formal-derivative nodes are
// resolved by locally enlarging the active-variable set and differentiating
// the child jet. Results are memoized per (node, context) within an Evaluator.

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "superint/expr.hpp"
#include "superint/jet.hpp"

namespace superint {

using Env = std::unordered_map<std::string, cplx>;

class Evaluator {
 public:
  explicit Evaluator(Env env, double den_guard = 1e-12)
      : env_(std::move(env)), guard_(den_guard) {}

  const Env& env() const { return env_; }
  double guard() const { return guard_; }

  void bind(const std::string& name, cplx v) { env_[name] = v; }

  // Jet of e in the given active variables (names) to the given degree.
  Jet jet(const Expr& e, const std::vector<std::string>& active, int degree) {
    if ((int)active.size() > kMaxJetVars)
      throw std::invalid_argument("more than 4 active jet variables");
    if (degree < 0 || degree > kMaxJetDegree)
      throw std::invalid_argument("requested jet degree out of range");
    Ctx ctx;
    ctx.active = active;
    ctx.deg = degree;
    ctx.lay = JetLayout::get((int)active.size(), degree);
    ctx.key = ctx_key(active, degree);
    return eval(e, ctx);
  }

  cplx value(const Expr& e) { return jet(e, {}, 0).value(); }

  // First partial derivative d e / d name at the point.
  cplx partial(const Expr& e, const std::string& name) {
    Jet j = jet(e, {name}, 1);
    MIdx m{1, 0, 0, 0};
    return j.coeff(m);
  }

 private:
  struct Ctx {
    std::vector<std::string> active;
    int deg = 0;
    std::shared_ptr<const JetLayout> lay;
    std::string key;
  };

  Env env_;
  double guard_;
  // memo keys hold owning pointers: a memoized node must stay alive, otherwise
  // a freed address could be recycled by a later tree and collide
  std::unordered_map<std::string, std::unordered_map<ExprPtr, Jet>> memo_;

  static std::string ctx_key(const std::vector<std::string>& active, int deg) {
    std::string k = std::to_string(deg);
    for (const auto& a : active) {
      k += '|';
      k += a;
    }
    return k;
  }

  cplx lookup(const std::string& name) const {
    auto it = env_.find(name);
    if (it != env_.end()) return it->second;
    if (name == "hbar") return cplx(1.0, 0.0);
    throw std::invalid_argument("unbound variable '" + name + "'");
  }

  Jet eval(const Expr& e, const Ctx& ctx) {
    auto& slot = memo_[ctx.key];
    auto it = slot.find(e.ptr());
    if (it != slot.end()) return it->second;
    Jet r = eval_raw(e, ctx);
    memo_[ctx.key].emplace(e.ptr(), r);
    return r;
  }

  Jet eval_raw(const Expr& e, const Ctx& ctx) {
    const ExprNode& n = e.node();
    switch (n.kind) {
      case NodeKind::Constant:
        return Jet::constant(ctx.lay, n.cval);
      case NodeKind::Variable: {
        for (int v = 0; v < (int)ctx.active.size(); ++v)
          if (ctx.active[v] == n.name) return Jet::variable(ctx.lay, v, lookup(n.name));
        return Jet::constant(ctx.lay, lookup(n.name));
      }
      case NodeKind::Sum: {
        Jet r(ctx.lay);
        for (const auto& k : n.kids) add_in_place(r, eval(k, ctx));
        return r;
      }
      case NodeKind::Product: {
        Jet r = Jet::constant(ctx.lay, cplx(1.0, 0.0));
        for (const auto& k : n.kids) r = r * eval(k, ctx);
        return r;
      }
      case NodeKind::Quotient:
        return jet_div(eval(n.kids[0], ctx), eval(n.kids[1], ctx), guard_);
      case NodeKind::Power: {
        const Expr& be = n.kids[0];
        const Expr& xe = n.kids[1];
        if (xe.is_int_const()) return jet_ipow(eval(be, ctx), xe.int_value(), guard_);
        Jet b = eval(be, ctx);
        Jet x = eval(xe, ctx);
        // principal branch b^x = exp(x log b)
        return jet_exp(x * jet_log(b, guard_));
      }
      case NodeKind::Function: {
        Jet u = eval(n.kids[0], ctx);
        switch (n.func) {
          case Func::Sin: return jet_sin(u);
          case Func::Cos: return jet_cos(u);
          case Func::Tan: return jet_div(jet_sin(u), jet_cos(u), guard_);
          case Func::Cot: return jet_div(jet_cos(u), jet_sin(u), guard_);
          case Func::Sinh: return jet_sinh(u);
          case Func::Cosh: return jet_cosh(u);
          case Func::Exp: return jet_exp(u);
          case Func::Log: return jet_log(u, guard_);
          case Func::Sqrt: return jet_sqrt(u, guard_);
        }
        throw std::logic_error("unreachable");
      }
      case NodeKind::Derivative: {
        const std::string& v = n.name;
        const int k = n.order;
        int vpos = -1;
        for (int i = 0; i < (int)ctx.active.size(); ++i)
          if (ctx.active[i] == v) vpos = i;
        Ctx sub;
        sub.active = ctx.active;
        if (vpos < 0) {
          sub.active.push_back(v);
          vpos = (int)sub.active.size() - 1;
        }
        if ((int)sub.active.size() > kMaxJetVars)
          throw std::invalid_argument("formal derivative exceeds 4 active jet variables");
        sub.deg = ctx.deg + k;
        if (sub.deg > kMaxJetDegreeHard)
          throw std::invalid_argument("formal derivative exceeds jet degree cap");
        sub.lay = JetLayout::get((int)sub.active.size(), sub.deg);
        sub.key = ctx_key(sub.active, sub.deg);
        Jet inner = eval(n.kids[0], sub);
        Jet d = jet_derivative(inner, vpos, k);
        // map back to the parent layout (dropping v if it was added)
        std::array<int, kMaxJetVars> varmap{-1, -1, -1, -1};
        for (int i = 0; i < (int)sub.active.size(); ++i) {
          varmap[i] = -1;
          for (int j = 0; j < (int)ctx.active.size(); ++j)
            if (ctx.active[j] == sub.active[i]) varmap[i] = j;
        }
        return jet_remap(d, ctx.lay, varmap);
      }
    }
    throw std::logic_error("unreachable");
  }
};

// Convenience one-shot evaluation.
inline cplx eval_at(const Expr& e, const Env& env, double guard = 1e-12) {
  Evaluator ev(env, guard);
  return ev.value(e);
}

// Gradient with respect to a list of variables (independent 1-var jets, so
// any number of variables is allowed).
inline std::vector<cplx> gradient(const Expr& e, const std::vector<std::string>& vars,
                                  const Env& env, double guard = 1e-12) {
  Evaluator ev(env, guard);
  std::vector<cplx> g;
  g.reserve(vars.size());
  for (const auto& v : vars) g.push_back(ev.partial(e, v));
  return g;
}

}  // namespace superint
