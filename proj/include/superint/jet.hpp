#pragma once
// Truncated multivariate Taylor series ("jets") over complex coefficients.
// A jet stores the Taylor coefficients (1/m!) d^m f of a function at a point
// for all multi-indices m with |m| <= degree in up to 4 active variables.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "superint/common.hpp"

namespace superint {

inline constexpr int kMaxJetVars = 4;
inline constexpr int kMaxJetDegree = 10;   // public cap
inline constexpr int kMaxJetDegreeHard = 20;  // internal cap (derivative bumps)

using MIdx = std::array<std::uint8_t, kMaxJetVars>;

inline std::uint32_t pack_midx(const MIdx& m) {
  return std::uint32_t(m[0]) | (std::uint32_t(m[1]) << 5) | (std::uint32_t(m[2]) << 10) |
         (std::uint32_t(m[3]) << 15);
}

// Canonical coefficient layout for (nvars, degree): multi-indices ordered by
// total degree then lexicographically. Layouts are interned per (nv, deg).
class JetLayout {
 public:
  int nv;
  int deg;
  std::vector<MIdx> exps;
  std::unordered_map<std::uint32_t, int> pos;

  static std::shared_ptr<const JetLayout> get(int nv, int deg) {
    if (nv < 0 || nv > kMaxJetVars) throw std::invalid_argument("jet supports at most 4 active variables");
    if (deg < 0 || deg > kMaxJetDegreeHard) throw std::invalid_argument("jet degree out of range");
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    auto key = std::make_pair(nv, deg);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto lay = std::make_shared<JetLayout>();
    lay->nv = nv;
    lay->deg = deg;
    MIdx m{0, 0, 0, 0};
    for (int total = 0; total <= deg; ++total) {
      // enumerate all m with |m| = total over nv vars, lexicographic
      std::vector<int> cur(std::max(nv, 1), 0);
      enumerate(lay.get(), nv, total, 0, total, m);
    }
    for (int i = 0; i < (int)lay->exps.size(); ++i) lay->pos[pack_midx(lay->exps[i])] = i;
    auto res = std::shared_ptr<const JetLayout>(lay);
    cache[key] = res;
    return res;
  }

  int index(const MIdx& m) const {
    auto it = pos.find(pack_midx(m));
    return it == pos.end() ? -1 : it->second;
  }

  std::size_t size() const { return exps.size(); }

 private:
  static void enumerate(JetLayout* lay, int nv, int total, int var, int remaining, MIdx m) {
    if (nv == 0) {
      if (total == 0) lay->exps.push_back(MIdx{0, 0, 0, 0});
      return;
    }
    if (var == nv - 1) {
      m[var] = (std::uint8_t)remaining;
      lay->exps.push_back(m);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      m[var] = (std::uint8_t)k;
      enumerate(lay, nv, total, var + 1, remaining - k, m);
    }
  }
};

class Jet {
 public:
  Jet() : lay_(JetLayout::get(0, 0)), c_(1, cplx(0.0, 0.0)) {}
  Jet(std::shared_ptr<const JetLayout> lay) : lay_(std::move(lay)), c_(lay_->size(), cplx(0.0, 0.0)) {}

  static Jet constant(std::shared_ptr<const JetLayout> lay, cplx v) {
    Jet j(std::move(lay));
    j.c_[0] = v;
    return j;
  }
  // variable with index vpos among the active variables, centered at x0
  static Jet variable(std::shared_ptr<const JetLayout> lay, int vpos, cplx x0) {
    Jet j(std::move(lay));
    j.c_[0] = x0;
    if (j.lay_->deg >= 1) {
      MIdx m{0, 0, 0, 0};
      m[vpos] = 1;
      int idx = j.lay_->index(m);
      if (idx >= 0) j.c_[idx] = cplx(1.0, 0.0);
    }
    return j;
  }

  const JetLayout& layout() const { return *lay_; }
  const std::shared_ptr<const JetLayout>& layout_ptr() const { return lay_; }
  cplx value() const { return c_[0]; }
  cplx& at(int i) { return c_[i]; }
  const cplx& at(int i) const { return c_[i]; }
  std::size_t size() const { return c_.size(); }

  cplx coeff(const MIdx& m) const {
    int i = lay_->index(m);
    return i < 0 ? cplx(0.0, 0.0) : c_[i];
  }

  std::vector<cplx>& data() { return c_; }
  const std::vector<cplx>& data() const { return c_; }

 private:
  std::shared_ptr<const JetLayout> lay_;
  std::vector<cplx> c_;
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.at(i) += b.at(i);
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.at(i) -= b.at(i);
  return r;
}
inline Jet operator*(const Jet& a, cplx s) {
  Jet r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.at(i) *= s;
  return r;
}
inline void add_in_place(Jet& a, const Jet& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a.at(i) += b.at(i);
}
inline void add_scaled_in_place(Jet& a, const Jet& b, cplx s) {
  for (std::size_t i = 0; i < a.size(); ++i) a.at(i) += s * b.at(i);
}

inline Jet operator*(const Jet& a, const Jet& b) {
  const JetLayout& L = a.layout();
  Jet r(a.layout_ptr());
  const int deg = L.deg;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.at(i) == cplx(0.0, 0.0)) continue;
    const MIdx& mi = L.exps[i];
    const int di = mi[0] + mi[1] + mi[2] + mi[3];
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b.at(j) == cplx(0.0, 0.0)) continue;
      const MIdx& mj = L.exps[j];
      const int dj = mj[0] + mj[1] + mj[2] + mj[3];
      if (di + dj > deg) break;  // exps sorted by total degree
      MIdx m{std::uint8_t(mi[0] + mj[0]), std::uint8_t(mi[1] + mj[1]),
             std::uint8_t(mi[2] + mj[2]), std::uint8_t(mi[3] + mj[3])};
      r.at(L.index(m)) += a.at(i) * b.at(j);
    }
  }
  return r;
}

// Power-series division a/b. Requires |b(0)| > guard, else EvalDomainError.
inline Jet jet_div(const Jet& a, const Jet& b, double guard) {
  const cplx b0 = b.value();
  if (std::abs(b0) < guard) throw EvalDomainError("denominator magnitude below guard");
  const JetLayout& L = a.layout();
  Jet q(a.layout_ptr());
  // process coefficients in layout order (graded): q[k] = (a[k] - sum b[j] q[k-j]) / b0
  for (std::size_t k = 0; k < a.size(); ++k) {
    cplx acc = a.at(k);
    const MIdx& mk = L.exps[k];
    // subtract contributions b[j]*q[i] with i+j = k, j != 0
    for (std::size_t j = 1; j < b.size(); ++j) {
      const MIdx& mj = L.exps[j];
      if (mj[0] > mk[0] || mj[1] > mk[1] || mj[2] > mk[2] || mj[3] > mk[3]) continue;
      if (b.at(j) == cplx(0.0, 0.0)) continue;
      MIdx mi{std::uint8_t(mk[0] - mj[0]), std::uint8_t(mk[1] - mj[1]),
              std::uint8_t(mk[2] - mj[2]), std::uint8_t(mk[3] - mj[3])};
      acc -= b.at(j) * q.at(L.index(mi));
    }
    q.at(k) = acc / b0;
  }
  return q;
}

// Compose a univariate analytic series sum_k a_k (u - u0)^k with the jet u.
inline Jet jet_univariate(const Jet& u, const std::vector<cplx>& a) {
  Jet du = u;
  du.at(0) = cplx(0.0, 0.0);
  Jet r = Jet::constant(u.layout_ptr(), a[0]);
  Jet p = Jet::constant(u.layout_ptr(), cplx(1.0, 0.0));
  const int deg = u.layout().deg;
  for (int k = 1; k <= deg && k < (int)a.size(); ++k) {
    p = p * du;
    add_scaled_in_place(r, p, a[k]);
  }
  return r;
}

inline Jet jet_exp(const Jet& u) {
  const int deg = u.layout().deg;
  const cplx e0 = std::exp(u.value());
  std::vector<cplx> a(deg + 1);
  double f = 1.0;
  for (int k = 0; k <= deg; ++k) {
    if (k > 0) f *= k;
    a[k] = e0 / f;
  }
  return jet_univariate(u, a);
}

inline Jet jet_log(const Jet& u, double guard) {
  if (std::abs(u.value()) < guard) throw EvalDomainError("log argument magnitude below guard");
  const int deg = u.layout().deg;
  const cplx u0 = u.value();
  std::vector<cplx> a(deg + 1);
  a[0] = std::log(u0);
  cplx invpow = 1.0;
  for (int k = 1; k <= deg; ++k) {
    invpow /= u0;
    a[k] = ((k % 2) ? 1.0 : -1.0) * invpow / double(k);
  }
  return jet_univariate(u, a);
}

inline Jet jet_sqrt(const Jet& u, double guard) {
  if (std::abs(u.value()) < guard) throw EvalDomainError("sqrt argument magnitude below guard");
  const int deg = u.layout().deg;
  const cplx u0 = u.value();
  const cplx s0 = std::sqrt(u0);
  std::vector<cplx> a(deg + 1);
  // a_k = binom(1/2, k) * u0^(1/2 - k)
  cplx coef = 1.0;
  cplx upow = s0;
  for (int k = 0; k <= deg; ++k) {
    a[k] = coef * upow;
    coef *= (cplx(0.5, 0.0) - cplx(double(k), 0.0)) / cplx(double(k + 1), 0.0);
    upow /= u0;
  }
  return jet_univariate(u, a);
}

inline Jet jet_sin(const Jet& u) {
  const int deg = u.layout().deg;
  const cplx s = std::sin(u.value()), c = std::cos(u.value());
  std::vector<cplx> a(deg + 1);
  double f = 1.0;
  for (int k = 0; k <= deg; ++k) {
    if (k > 0) f *= k;
    const cplx d = (k % 4 == 0) ? s : (k % 4 == 1) ? c : (k % 4 == 2) ? -s : -c;
    a[k] = d / f;
  }
  return jet_univariate(u, a);
}

inline Jet jet_cos(const Jet& u) {
  const int deg = u.layout().deg;
  const cplx s = std::sin(u.value()), c = std::cos(u.value());
  std::vector<cplx> a(deg + 1);
  double f = 1.0;
  for (int k = 0; k <= deg; ++k) {
    if (k > 0) f *= k;
    const cplx d = (k % 4 == 0) ? c : (k % 4 == 1) ? -s : (k % 4 == 2) ? -c : s;
    a[k] = d / f;
  }
  return jet_univariate(u, a);
}

inline Jet jet_sinh(const Jet& u) {
  const int deg = u.layout().deg;
  const cplx s = std::sinh(u.value()), c = std::cosh(u.value());
  std::vector<cplx> a(deg + 1);
  double f = 1.0;
  for (int k = 0; k <= deg; ++k) {
    if (k > 0) f *= k;
    a[k] = ((k % 2 == 0) ? s : c) / f;
  }
  return jet_univariate(u, a);
}

inline Jet jet_cosh(const Jet& u) {
  const int deg = u.layout().deg;
  const cplx s = std::sinh(u.value()), c = std::cosh(u.value());
  std::vector<cplx> a(deg + 1);
  double f = 1.0;
  for (int k = 0; k <= deg; ++k) {
    if (k > 0) f *= k;
    a[k] = ((k % 2 == 0) ? c : s) / f;
  }
  return jet_univariate(u, a);
}

// Integer power via binary exponentiation; negative exponents via division.
inline Jet jet_ipow(const Jet& u, long long e, double guard) {
  if (e == 0) return Jet::constant(u.layout_ptr(), cplx(1.0, 0.0));
  bool neg = e < 0;
  unsigned long long k = neg ? -(unsigned long long)e : (unsigned long long)e;
  Jet acc = Jet::constant(u.layout_ptr(), cplx(1.0, 0.0));
  Jet base = u;
  for (;;) {
    if (k & 1) acc = acc * base;
    k >>= 1;
    if (!k) break;
    base = base * base;
  }
  if (neg) return jet_div(Jet::constant(u.layout_ptr(), cplx(1.0, 0.0)), acc, guard);
  return acc;
}

// d^k/dv^k as a jet of the same layout, truncated at (deg - k) implicitly:
// coefficients above that are spurious and dropped by the caller's truncation.
inline Jet jet_derivative(const Jet& u, int vpos, int k) {
  const JetLayout& L = u.layout();
  Jet r(u.layout_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.at(i) == cplx(0.0, 0.0)) continue;
    const MIdx& m = L.exps[i];
    if (m[vpos] < k) continue;
    MIdx t = m;
    t[vpos] = (std::uint8_t)(m[vpos] - k);
    // Taylor bookkeeping: out_t = in_m * (m_v)! / (m_v - k)!
    double fac = 1.0;
    for (int j = 0; j < k; ++j) fac *= double(m[vpos] - j);
    r.at(L.index(t)) += u.at(i) * fac;
  }
  return r;
}

// Convert between layouts: copy coefficients whose multi-index (as mapped by
// varmap: position in src -> position in dst, or -1 to require exponent 0).
inline Jet jet_remap(const Jet& u, const std::shared_ptr<const JetLayout>& dst,
                     const std::array<int, kMaxJetVars>& varmap) {
  const JetLayout& Ls = u.layout();
  Jet r(dst);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.at(i) == cplx(0.0, 0.0)) continue;
    const MIdx& m = Ls.exps[i];
    MIdx t{0, 0, 0, 0};
    bool ok = true;
    for (int v = 0; v < Ls.nv; ++v) {
      if (varmap[v] < 0) {
        if (m[v] != 0) { ok = false; break; }
      } else {
        t[varmap[v]] = m[v];
      }
    }
    if (!ok) continue;
    int idx = dst->index(t);
    if (idx >= 0) r.at(idx) += u.at(i);
  }
  return r;
}

}  // namespace superint
