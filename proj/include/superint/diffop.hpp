#pragma once
// Linear differential operators with expression coefficients, kept in normal
// order (all coefficients to the left of the partials). Composition applies
// the Leibniz rule and leaves formal-derivative nodes on the right factor's
// coefficients. For high-order relation checks there is also a small operator
// expression tree that is applied to jets of test functions directly, without
// ever expanding the composition symbolically.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "superint/eval.hpp"
#include "superint/zerotest.hpp"

namespace superint {

inline constexpr int kMaxOperatorOrder = 12;

class DiffOperator {
 public:
  DiffOperator() = default;
  explicit DiffOperator(std::vector<std::string> vars) : vars_(std::move(vars)) {
    if (vars_.size() > kMaxJetVars) throw std::invalid_argument("operators support at most 4 variables");
  }

  static DiffOperator identity(std::vector<std::string> vars) {
    DiffOperator d(std::move(vars));
    d.add_term(MIdx{0, 0, 0, 0}, make_int(1));
    return d;
  }
  static DiffOperator mult(std::vector<std::string> vars, const Expr& f) {
    DiffOperator d(std::move(vars));
    d.add_term(MIdx{0, 0, 0, 0}, f);
    return d;
  }
  static DiffOperator partial(std::vector<std::string> vars, int i, int order = 1) {
    DiffOperator d(std::move(vars));
    MIdx m{0, 0, 0, 0};
    m[i] = (std::uint8_t)order;
    d.add_term(m, make_int(1));
    return d;
  }
  // p_j = -i hbar d/dx_j
  static DiffOperator momentum(std::vector<std::string> vars, int i) {
    DiffOperator d(std::move(vars));
    MIdx m{0, 0, 0, 0};
    m[i] = 1;
    d.add_term(m, prod({make_const(cplx(0.0, -1.0)), var("hbar")}));
    return d;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<std::uint32_t, Expr>& terms() const { return terms_; }
  bool structurally_zero() const { return terms_.empty(); }

  void add_term(const MIdx& m, const Expr& coeff) {
    if (coeff.is_zero()) return;
    const std::uint32_t key = pack_midx(m);
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(key, coeff);
    } else {
      Expr s = it->second + coeff;
      if (s.is_zero()) terms_.erase(it);
      else it->second = s;
    }
  }

  int order() const {
    int o = 0;
    for (const auto& [key, c] : terms_) o = std::max(o, midx_total(unpack(key)));
    return o;
  }

  static MIdx unpack(std::uint32_t key) {
    return MIdx{std::uint8_t(key & 31), std::uint8_t((key >> 5) & 31),
                std::uint8_t((key >> 10) & 31), std::uint8_t((key >> 15) & 31)};
  }
  static int midx_total(const MIdx& m) { return m[0] + m[1] + m[2] + m[3]; }

  DiffOperator scaled(const Expr& f) const {
    DiffOperator r(vars_);
    for (const auto& [key, c] : terms_) r.add_term(unpack(key), prod({f, c}));
    return r;
  }

  friend DiffOperator operator+(const DiffOperator& a, const DiffOperator& b) {
    DiffOperator r = a;
    for (const auto& [key, c] : b.terms_) r.add_term(unpack(key), c);
    return r;
  }
  friend DiffOperator operator-(const DiffOperator& a, const DiffOperator& b) {
    DiffOperator r = a;
    for (const auto& [key, c] : b.terms_) r.add_term(unpack(key), -c);
    return r;
  }

  // Normal-ordered product AB via the Leibniz rule. The right factor's
  // coefficients acquire formal-derivative nodes.
  friend DiffOperator compose(const DiffOperator& a, const DiffOperator& b) {
    DiffOperator r(a.vars_);
    const int n = (int)a.vars_.size();
    for (const auto& [ka, ca] : a.terms_) {
      const MIdx m = unpack(ka);
      for (const auto& [kb, cb] : b.terms_) {
        const MIdx l = unpack(kb);
        // sum over s <= m: binom(m, s) * ca * d^(m-s) cb * partial^(s+l)
        MIdx s{0, 0, 0, 0};
        iterate_sub(m, s, 0, n, [&](const MIdx& sv) {
          double bin = 1.0;
          for (int i = 0; i < n; ++i) bin *= binom(m[i], sv[i]);
          Expr c = cb;
          for (int i = 0; i < n; ++i)
            if (m[i] - sv[i] > 0) c = deriv(c, a.vars_[i], m[i] - sv[i]);
          if (c.is_zero()) return;
          MIdx out;
          int total = 0;
          for (int i = 0; i < kMaxJetVars; ++i) {
            out[i] = (std::uint8_t)(sv[i] + l[i]);
            total += out[i];
          }
          if (total > kMaxOperatorOrder)
            throw std::invalid_argument("operator composition exceeds order cap");
          r.add_term(out, prod({make_int((long long)(bin + 0.5)), ca, c}));
        });
      }
    }
    return r;
  }

  // Apply to an expression, producing coeff * diff(f, ...) terms.
  Expr apply_expr(const Expr& f) const {
    std::vector<Expr> terms;
    for (const auto& [key, c] : terms_) {
      const MIdx m = unpack(key);
      Expr d = f;
      for (int i = 0; i < (int)vars_.size(); ++i)
        if (m[i] > 0) d = deriv(d, vars_[i], m[i]);
      terms.push_back(prod({c, d}));
    }
    return sum(std::move(terms));
  }

  // Apply to a jet of a test function over exactly this operator's variables.
  // The input jet must have degree >= order(); the result has degree
  // in.deg - order().
  Jet apply_jet(const Jet& f, Evaluator& ev) const {
    const int ord = order();
    const int outdeg = f.layout().deg - ord;
    if (outdeg < 0) throw std::invalid_argument("test-function jet degree too small");
    auto outlay = JetLayout::get((int)vars_.size(), outdeg);
    Jet r(outlay);
    std::array<int, kMaxJetVars> idmap{0, 1, 2, 3};
    for (const auto& [key, c] : terms_) {
      const MIdx m = unpack(key);
      Jet df = f;
      for (int i = 0; i < (int)vars_.size(); ++i)
        if (m[i] > 0) df = jet_derivative(df, i, m[i]);
      Jet dft = jet_remap(df, outlay, idmap);
      Jet cj = ev.jet(c, vars_, outdeg);
      add_in_place(r, cj * dft);
    }
    return r;
  }

  std::string str() const {
    std::string s;
    bool first = true;
    for (const auto& [key, c] : terms_) {
      const MIdx m = unpack(key);
      if (!first) s += " + ";
      first = false;
      s += "(" + c.str() + ")";
      for (int i = 0; i < (int)vars_.size(); ++i)
        for (int k = 0; k < m[i]; ++k) s += "*d_" + vars_[i];
    }
    return s.empty() ? "0" : s;
  }

 private:
  template <typename F>
  static void iterate_sub(const MIdx& m, MIdx& s, int var, int nvars, F&& f) {
    if (var == nvars) {
      f(s);
      return;
    }
    for (int k = 0; k <= m[var]; ++k) {
      s[var] = (std::uint8_t)k;
      iterate_sub(m, s, var + 1, nvars, f);
    }
    s[var] = 0;
  }

  std::vector<std::string> vars_;
  std::map<std::uint32_t, Expr> terms_;
};

inline DiffOperator commutator(const DiffOperator& a, const DiffOperator& b) {
  return compose(a, b) - compose(b, a);
}
inline DiffOperator anticommutator(const DiffOperator& a, const DiffOperator& b) {
  return compose(a, b) + compose(b, a);
}
// Symmetrizer sums over all orderings (summed, not averaged): 6 terms for
// three factors, 24 for four.
inline DiffOperator symmetrizer(const std::vector<DiffOperator>& ops) {
  std::vector<int> idx(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) idx[i] = (int)i;
  std::sort(idx.begin(), idx.end());
  DiffOperator r(ops[0].vars());
  do {
    DiffOperator p = ops[idx[0]];
    for (std::size_t i = 1; i < idx.size(); ++i) p = compose(p, ops[idx[i]]);
    r = r + p;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return r;
}

// Symbol at a fixed order: partials replaced by (i p / hbar) per the
// convention p_j = -i hbar d_j, so d_j -> (i/hbar) p_j. Terms of other orders
// are dropped.
inline Expr symbol_at_order(const DiffOperator& op, int ord,
                            const std::vector<std::string>& momenta) {
  if (momenta.size() < op.vars().size())
    throw std::invalid_argument("momentum name list shorter than variable list");
  std::vector<Expr> terms;
  const Expr ih = quot(imag_unit(), var("hbar"));
  for (const auto& [key, c] : op.terms()) {
    const MIdx m = DiffOperator::unpack(key);
    if (DiffOperator::midx_total(m) != ord) continue;
    std::vector<Expr> fac{c};
    for (int i = 0; i < (int)op.vars().size(); ++i)
      if (m[i] > 0) fac.push_back(pow(prod({ih, var(momenta[i])}), (long long)m[i]));
    terms.push_back(prod(std::move(fac)));
  }
  return sum(std::move(terms));
}

inline Expr principal_symbol(const DiffOperator& op, const std::vector<std::string>& momenta) {
  return symbol_at_order(op, op.order(), momenta);
}

// ---- operator expression trees ------------------------------------------------

struct OpExpr;
using OpExprPtr = std::shared_ptr<const OpExpr>;

struct OpExpr {
  enum class K { Leaf, Sum, Prod, Sym, Scale };
  K k = K::Leaf;
  DiffOperator leaf;
  Expr coef;                    // Scale
  std::vector<OpExprPtr> kids;  // Sum / Prod / Sym / Scale(1)
};

inline OpExprPtr op_leaf(DiffOperator d) {
  auto n = std::make_shared<OpExpr>();
  n->k = OpExpr::K::Leaf;
  n->leaf = std::move(d);
  return n;
}
inline OpExprPtr op_sum(std::vector<OpExprPtr> kids) {
  auto n = std::make_shared<OpExpr>();
  n->k = OpExpr::K::Sum;
  n->kids = std::move(kids);
  return n;
}
inline OpExprPtr op_prod(std::vector<OpExprPtr> kids) {
  auto n = std::make_shared<OpExpr>();
  n->k = OpExpr::K::Prod;
  n->kids = std::move(kids);
  return n;
}
inline OpExprPtr op_sym(std::vector<OpExprPtr> kids) {
  auto n = std::make_shared<OpExpr>();
  n->k = OpExpr::K::Sym;
  n->kids = std::move(kids);
  return n;
}
inline OpExprPtr op_scale(const Expr& c, OpExprPtr kid) {
  auto n = std::make_shared<OpExpr>();
  n->k = OpExpr::K::Scale;
  n->coef = c;
  n->kids = {std::move(kid)};
  return n;
}
inline OpExprPtr op_commutator(OpExprPtr a, OpExprPtr b) {
  return op_sum({op_prod({a, b}), op_scale(make_int(-1), op_prod({b, a}))});
}
inline OpExprPtr op_anticommutator(OpExprPtr a, OpExprPtr b) {
  return op_sum({op_prod({a, b}), op_prod({b, a})});
}

inline int order_bound(const OpExprPtr& e) {
  switch (e->k) {
    case OpExpr::K::Leaf: return e->leaf.order();
    case OpExpr::K::Scale: return order_bound(e->kids[0]);
    case OpExpr::K::Sum: {
      int o = 0;
      for (const auto& k : e->kids) o = std::max(o, order_bound(k));
      return o;
    }
    case OpExpr::K::Prod:
    case OpExpr::K::Sym: {
      int o = 0;
      for (const auto& k : e->kids) o += order_bound(k);
      return o;
    }
  }
  return 0;
}

// Apply an operator expression to a jet of a test function (degree must be at
// least order_bound). Products apply right-to-left; symmetrizers sum over all
// orderings.
inline Jet opexpr_apply(const OpExprPtr& e, const Jet& f, Evaluator& ev) {
  switch (e->k) {
    case OpExpr::K::Leaf:
      return e->leaf.apply_jet(f, ev);
    case OpExpr::K::Scale: {
      // coordinate-independent scalar factors only; coordinate-dependent
      // scaling should use a Leaf multiplication operator
      Jet r = opexpr_apply(e->kids[0], f, ev);
      return r * ev.value(e->coef);
    }
    case OpExpr::K::Sum: {
      // degree bookkeeping: all children truncated to the weakest result
      int deg = f.layout().deg - order_bound(e);
      auto lay = JetLayout::get(f.layout().nv, deg);
      std::array<int, kMaxJetVars> idmap{0, 1, 2, 3};
      Jet r(lay);
      for (const auto& k : e->kids) add_in_place(r, jet_remap(opexpr_apply(k, f, ev), lay, idmap));
      return r;
    }
    case OpExpr::K::Prod: {
      Jet cur = f;
      for (auto it = e->kids.rbegin(); it != e->kids.rend(); ++it) cur = opexpr_apply(*it, cur, ev);
      return cur;
    }
    case OpExpr::K::Sym: {
      std::vector<int> idx(e->kids.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = (int)i;
      int deg = f.layout().deg - order_bound(e);
      auto lay = JetLayout::get(f.layout().nv, deg);
      std::array<int, kMaxJetVars> idmap{0, 1, 2, 3};
      Jet r(lay);
      do {
        Jet cur = f;
        for (auto it = idx.rbegin(); it != idx.rend(); ++it)
          cur = opexpr_apply(e->kids[*it], cur, ev);
        add_in_place(r, jet_remap(cur, lay, idmap));
      } while (std::next_permutation(idx.begin(), idx.end()));
      return r;
    }
  }
  throw std::logic_error("unreachable");
}

// ---- operator zero testing ----------------------------------------------------

// Random entire test function in the given variables:
//   f(x; w, c) = exp(sum w_j x_j) (1 + sum c_j x_j).
inline Expr default_test_function(const std::vector<std::string>& vars, Rng& rng) {
  std::vector<Expr> lin{make_int(1)}, arg;
  for (const auto& v : vars) {
    arg.push_back(prod({make_const(rng.annulus()), var(v)}));
    lin.push_back(prod({make_const(rng.annulus()), var(v)}));
  }
  return prod({exp(sum(std::move(arg))), sum(std::move(lin))});
}

using TestFunctionGen = std::function<Expr(const std::vector<std::string>&, Rng&)>;

struct OpZeroReport {
  Verdict verdict = Verdict::Inconclusive;
  double max_residual = 0.0;
  int trials_done = 0;
  int resamples = 0;
};

// Verify that an operator expression annihilates random test functions at
// random points. Top-level Sum children act as the additive terms for the
// residual normalization.
inline OpZeroReport opexpr_is_zero(const OpExprPtr& rel, const std::vector<std::string>& vars,
                                   const ZeroTestPolicy& policy = {},
                                   TestFunctionGen testgen = {}) {
  OpZeroReport rep;
  if (!testgen) testgen = [](const std::vector<std::string>& vs, Rng& r) {
    return default_test_function(vs, r);
  };
  // free variables of all coefficients (parameters + coordinates)
  std::set<std::string> fv;
  std::function<void(const OpExprPtr&)> collect = [&](const OpExprPtr& e) {
    if (e->k == OpExpr::K::Leaf) {
      for (const auto& [k, c] : e->leaf.terms()) collect_free_vars(c, fv);
      return;
    }
    if (e->k == OpExpr::K::Scale) collect_free_vars(e->coef, fv);
    for (const auto& k : e->kids) collect(k);
  };
  collect(rel);
  for (const auto& v : vars) fv.insert(v);
  std::vector<std::string> names;
  for (const auto& n : fv)
    if (!policy.fixed.count(n)) names.push_back(n);

  Sampler sampler = policy.sampler ? policy.sampler : default_sampler();
  Rng rng(policy.seed);
  const int D = order_bound(rel);
  if (D > kMaxJetDegree) throw std::invalid_argument("operator relation order exceeds jet degree cap");

  std::vector<OpExprPtr> terms;
  if (rel->k == OpExpr::K::Sum) terms = rel->kids;
  else terms = {rel};

  for (int t = 0; t < policy.trials; ++t) {
    bool evaluated = false;
    for (int r = 0; r <= policy.max_resamples; ++r) {
      Env env = sampler(rng, names);
      for (const auto& [k, v] : policy.fixed) env[k] = v;
      Expr f = testgen(vars, rng);
      try {
        Evaluator ev(env, policy.den_guard);
        Jet fj = ev.jet(f, vars, D);
        cplx total(0.0, 0.0);
        double maxterm = 0.0;
        for (const auto& term : terms) {
          const cplx v = opexpr_apply(term, fj, ev).value();
          total += v;
          maxterm = std::max(maxterm, std::abs(v));
        }
        rep.max_residual = std::max(rep.max_residual, std::abs(total) / std::max(1.0, maxterm));
        evaluated = true;
        break;
      } catch (const EvalDomainError&) {
        ++rep.resamples;
      }
    }
    if (!evaluated) {
      rep.verdict = Verdict::Inconclusive;
      return rep;
    }
    ++rep.trials_done;
    if (rep.max_residual > policy.tol) {
      rep.verdict = Verdict::Nonzero;
      return rep;
    }
  }
  rep.verdict = Verdict::Zero;
  return rep;
}

inline OpZeroReport is_zero_operator(const DiffOperator& op, const ZeroTestPolicy& policy = {},
                                     TestFunctionGen testgen = {}) {
  return opexpr_is_zero(op_leaf(op), op.vars(), policy, std::move(testgen));
}

}  // namespace superint
