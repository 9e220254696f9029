#pragma once
// Classical phase-space layer: canonical Poisson brackets as expression
// trees with formal-derivative nodes, plus functional-independence ranks.

#include <string>
#include <vector>

#include "superint/linalg.hpp"
#include "superint/zerotest.hpp"

namespace superint {

// Canonical chart: n positions q[i] paired with momenta p[i].
struct PhaseChart {
  std::vector<std::string> q;
  std::vector<std::string> p;

  int dof() const { return (int)q.size(); }

  std::vector<std::string> all() const {
    std::vector<std::string> v = q;
    v.insert(v.end(), p.begin(), p.end());
    return v;
  }
};

// Bracket convention used throughout: {A, B} = sum_j (dA/dp_j dB/dq_j -
// dA/dq_j dB/dp_j), i.e. {p_i, q_j} = delta_ij.
inline Expr poisson_bracket(const PhaseChart& chart, const Expr& a, const Expr& b) {
  std::vector<Expr> terms;
  for (int j = 0; j < chart.dof(); ++j) {
    terms.push_back(prod({deriv(a, chart.p[j]), deriv(b, chart.q[j])}));
    terms.push_back(prod({make_int(-1), deriv(a, chart.q[j]), deriv(b, chart.p[j])}));
  }
  return sum(std::move(terms));
}

// Numeric bracket value at a point (cheaper than building the tree when only
// values are needed).
inline cplx poisson_bracket_value(const PhaseChart& chart, const Expr& a, const Expr& b,
                                  Evaluator& ev) {
  cplx r(0.0, 0.0);
  for (int j = 0; j < chart.dof(); ++j) {
    r += ev.partial(a, chart.p[j]) * ev.partial(b, chart.q[j]);
    r -= ev.partial(a, chart.q[j]) * ev.partial(b, chart.p[j]);
  }
  return r;
}

// Functional independence: max over sample points of the numeric rank of the
// N x 2n Jacobian d(observables)/d(q,p).
struct IndependenceReport {
  int rank = 0;
  int points_used = 0;
  int resamples = 0;
};

inline IndependenceReport independence_rank(const PhaseChart& chart,
                                            const std::vector<Expr>& observables,
                                            const ZeroTestPolicy& policy = {}) {
  IndependenceReport rep;
  std::vector<std::string> vars = chart.all();
  std::set<std::string> freeset;
  for (const auto& e : observables) collect_free_vars(e, freeset);
  std::vector<std::string> names;
  for (const auto& n : freeset)
    if (!policy.fixed.count(n)) names.push_back(n);
  Sampler sampler = policy.sampler ? policy.sampler : default_sampler();
  Rng rng(policy.seed);
  const int N = (int)observables.size();
  for (int t = 0; t < policy.trials; ++t) {
    for (int r = 0; r <= policy.max_resamples; ++r) {
      Env env = sampler(rng, names);
      for (const auto& [k, v] : policy.fixed) env[k] = v;
      try {
        MatC jac(N, (int)vars.size());
        Evaluator ev(env, policy.den_guard);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < (int)vars.size(); ++j) jac(i, j) = ev.partial(observables[i], vars[j]);
        rep.rank = std::max(rep.rank, numeric_rank(jac, 1e-8));
        ++rep.points_used;
        break;
      } catch (const EvalDomainError&) {
        ++rep.resamples;
      }
    }
    if (rep.rank == N) break;  // cannot grow further
  }
  return rep;
}

}  // namespace superint
