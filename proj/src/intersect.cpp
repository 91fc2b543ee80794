#include "cohft/intersect.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <tuple>

namespace cohft {

namespace {

template <class Key>
class MemoTable {
 public:
  bool lookup(const Key& k, Scalar& out) const {
    std::shared_lock lock(mutex_);
    auto it = table_.find(k);
    if (it == table_.end()) return false;
    out = it->second;
    return true;
  }
  void store(const Key& k, const Scalar& v) {
    std::unique_lock lock(mutex_);
    table_.emplace(k, v);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<Key, Scalar> table_;
};

int sum(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

void check_caps(int g, int points, int degree, const IntersectCaps& caps) {
  if (g > caps.gMax || points > caps.pointsMax || degree > caps.degreeMax)
    throw CapExceeded("intersection (g=" + std::to_string(g) + ", points=" + std::to_string(points) +
                      ", degree=" + std::to_string(degree) + ")");
}

using PsiKey = std::pair<int, std::vector<int>>;

MemoTable<PsiKey>& psi_memo() {
  static MemoTable<PsiKey> memo;
  return memo;
}

Scalar dvv(int g, const std::vector<int>& sortedPowers);

Scalar correlator_unchecked(int g, std::vector<int> powers) {
  const int n = static_cast<int>(powers.size());
  if (!is_stable(g, n)) return 0;
  for (int k : powers)
    if (k < 0) return 0;
  if (sum(powers) != 3 * g - 3 + n) return 0;
  std::sort(powers.begin(), powers.end(), std::greater<>());
  Scalar cached;
  if (psi_memo().lookup({g, powers}, cached)) return cached;
  const Scalar v = dvv(g, powers);
  psi_memo().store({g, powers}, v);
  return v;
}

// powers sorted decreasingly, dimension already matched.
Scalar dvv(int g, const std::vector<int>& p) {
  const int n = static_cast<int>(p.size());
  if (g == 0 && n == 3) return 1;
  if (g == 1 && n == 1) return Scalar(1, 24);
  if (p.back() == 0) {
    // String equation.
    std::vector<int> rest(p.begin(), p.end() - 1);
    Scalar s = 0;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      if (rest[j] == 0) continue;
      auto q = rest;
      --q[j];
      s += correlator_unchecked(g, q);
    }
    return s;
  }
  const int k = p[0] - 1;
  const std::vector<int> S(p.begin() + 1, p.end());
  Scalar total = 0;
  for (std::size_t j = 0; j < S.size(); ++j) {
    auto q = S;
    const int kj = q[j];
    q[j] = k + kj;
    total += double_factorial_odd(k + kj + 1) / double_factorial_odd(kj) * correlator_unchecked(g, q);
  }
  for (int r = 0; r <= k - 1; ++r) {
    const int s = k - 1 - r;
    const Scalar w = double_factorial_odd(r + 1) * double_factorial_odd(s + 1) / 2;
    if (g >= 1) {
      auto q = S;
      q.push_back(r);
      q.push_back(s);
      total += w * correlator_unchecked(g - 1, q);
    }
    const unsigned m = static_cast<unsigned>(S.size());
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> I{r}, J{s};
      for (unsigned i = 0; i < m; ++i) (mask & (1u << i) ? I : J).push_back(S[i]);
      for (int g1 = 0; g1 <= g; ++g1) {
        const Scalar a = correlator_unchecked(g1, I);
        if (a == 0) continue;
        total += w * a * correlator_unchecked(g - g1, J);
      }
    }
  }
  return total / double_factorial_odd(k + 2);
}

using KappaKey = std::tuple<int, std::vector<int>, std::vector<int>>;

MemoTable<KappaKey>& kappa_memo() {
  static MemoTable<KappaKey> memo;
  return memo;
}

}  // namespace

Scalar psi_correlator(int g, std::vector<int> powers, const IntersectCaps& caps) {
  const int n = static_cast<int>(powers.size());
  require_stable(g, n);
  for (int k : powers)
    if (k < 0) throw Error("negative psi power");
  check_caps(g, n, sum(powers), caps);
  return correlator_unchecked(g, std::move(powers));
}

Scalar genus0_closed_form(const std::vector<int>& powers) {
  const int n = static_cast<int>(powers.size());
  if (n < 3 || sum(powers) != n - 3) throw DimensionMismatch("genus-0 closed form needs sum k = n - 3");
  Scalar r = factorial(n - 3);
  for (int k : powers) r /= factorial(k);
  return r;
}

KappaPoly kappa_pushforward(const std::vector<int>& extraPowers) {
  KappaPoly poly{{{}, Scalar(1)}};
  // Forget the last extra point first. With psi_last^c (c >= 1) present, other psi
  // classes are pullbacks and kappa_a = p^* kappa_a + psi_last^a, so
  // p_*(prod_{i} kappa_{a_i} psi_last^c) = sum_S prod_{i not in S} kappa_{a_i} kappa_{c-1+sum_S a}.
  for (auto it = extraPowers.rbegin(); it != extraPowers.rend(); ++it) {
    const int c = *it;
    if (c < 1) throw Error("kappa_pushforward requires powers >= 1");
    KappaPoly next;
    for (const auto& [mono, coef] : poly) {
      const unsigned m = static_cast<unsigned>(mono.size());
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> kept;
        int merged = c - 1;
        for (unsigned i = 0; i < m; ++i) {
          if (mask & (1u << i)) merged += mono[i];
          else kept.push_back(mono[i]);
        }
        kept.push_back(merged);
        std::sort(kept.begin(), kept.end());
        next[kept] += coef;
      }
    }
    poly.clear();
    for (auto& [mono, coef] : next)
      if (coef != 0) poly.emplace(mono, coef);
  }
  return poly;
}

Scalar kappa_integral(int g, std::vector<int> a, std::vector<int> kappa, const IntersectCaps& caps) {
  const int n = static_cast<int>(a.size());
  require_stable(g, n);
  const int degree = sum(a) + sum(kappa);
  if (degree != 3 * g - 3 + n) return 0;
  check_caps(g, n + static_cast<int>(kappa.size()), degree, caps);
  if (kappa.empty()) return correlator_unchecked(g, a);
  std::sort(a.begin(), a.end());
  std::sort(kappa.begin(), kappa.end());
  Scalar cached;
  const KappaKey key{g, a, kappa};
  if (kappa_memo().lookup(key, cached)) return cached;

  // kappa_b = p_*(psi_{n+1}^{b+1}); projection formula with p^* kappa_c = kappa_c - psi_{n+1}^c.
  const int b = kappa.back();
  const std::vector<int> rest(kappa.begin(), kappa.end() - 1);
  const unsigned m = static_cast<unsigned>(rest.size());
  Scalar total = 0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> kept;
    int extra = b + 1;
    int sign = 1;
    for (unsigned i = 0; i < m; ++i) {
      if (mask & (1u << i)) {
        extra += rest[i];
        sign = -sign;
      } else {
        kept.push_back(rest[i]);
      }
    }
    auto a2 = a;
    a2.push_back(extra);
    total += sign * kappa_integral(g, a2, kept, caps);
  }
  kappa_memo().store(key, total);
  return total;
}

Scalar mixed_integral(int g, const std::vector<int>& a, const std::vector<int>& c, const IntersectCaps& caps) {
  const int n = static_cast<int>(a.size());
  require_stable(g, n);
  for (int x : c)
    if (x < 2) throw Error("translation powers start at 2");
  int degree = sum(a);
  for (int x : c) degree += x - 1;
  if (degree != 3 * g - 3 + n) return 0;
  check_caps(g, n + static_cast<int>(c.size()), degree, caps);
  if (c.empty()) return correlator_unchecked(g, a);
  Scalar total = 0;
  for (const auto& [mono, coef] : kappa_pushforward(c)) total += coef * kappa_integral(g, a, mono, caps);
  return total;
}

}  // namespace cohft
