#pragma once
// Probabilistic identity testing: evaluate an expression at random complex
// points and report a normalized residual. Zero within tolerance across all
// trials counts as an identity; denominator blowups trigger resampling and,
// past the retry budget, an inconclusive verdict.

#include <functional>
#include <string>
#include <vector>

#include "superint/eval.hpp"

namespace superint {

using Sampler = std::function<Env(Rng&, const std::vector<std::string>&)>;

inline Sampler default_sampler() {
  return [](Rng& rng, const std::vector<std::string>& names) {
    Env env;
    for (const auto& n : names) env[n] = rng.annulus();
    return env;
  };
}

struct ZeroTestPolicy {
  double tol = 1e-9;
  int trials = 20;
  int max_resamples = 20;
  double den_guard = 1e-6;
  std::uint64_t seed = 20260822ULL;
  Sampler sampler;                      // defaults to the annulus sampler
  std::map<std::string, cplx> fixed;    // variables pinned to given values
};

enum class Verdict { Zero, Nonzero, Inconclusive };

struct ZeroTestReport {
  Verdict verdict = Verdict::Inconclusive;
  double max_residual = 0.0;
  int trials_done = 0;
  int resamples = 0;
};

// Normalized residual of e at env: |sum of additive terms| divided by the
// largest term magnitude (floor 1).
inline double residual_at(const Expr& e, const Env& env, double den_guard) {
  Evaluator ev(env, den_guard);
  double maxterm = 0.0;
  cplx total(0.0, 0.0);
  if (e.kind() == NodeKind::Sum) {
    for (const auto& k : e.node().kids) {
      const cplx v = ev.value(k);
      maxterm = std::max(maxterm, std::abs(v));
      total += v;
    }
  } else {
    total = ev.value(e);
    maxterm = std::abs(total);
  }
  return std::abs(total) / std::max(1.0, maxterm);
}

inline ZeroTestReport is_identically_zero(const Expr& e, const ZeroTestPolicy& policy = {}) {
  ZeroTestReport rep;
  std::vector<std::string> names;
  for (const auto& n : free_vars(e))
    if (!policy.fixed.count(n)) names.push_back(n);
  Sampler sampler = policy.sampler ? policy.sampler : default_sampler();
  Rng rng(policy.seed);
  for (int t = 0; t < policy.trials; ++t) {
    bool evaluated = false;
    for (int r = 0; r <= policy.max_resamples; ++r) {
      Env env = sampler(rng, names);
      for (const auto& [k, v] : policy.fixed) env[k] = v;
      try {
        const double res = residual_at(e, env, policy.den_guard);
        rep.max_residual = std::max(rep.max_residual, res);
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

// Check that two expressions agree as functions.
inline ZeroTestReport exprs_equal(const Expr& a, const Expr& b, const ZeroTestPolicy& policy = {}) {
  return is_identically_zero(a - b, policy);
}

}  // namespace superint
