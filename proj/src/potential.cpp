#include <algorithm>
#include <set>
#include <thread>

#include "cohft/fockvir.hpp"

namespace cohft {

Monomial add_variable(Monomial mono, const Variable& v) {
  mono.insert(std::upper_bound(mono.begin(), mono.end(), v), v);
  return mono;
}

std::optional<Monomial> remove_variable(const Monomial& mono, const Variable& v) {
  auto it = std::lower_bound(mono.begin(), mono.end(), v);
  if (it == mono.end() || *it != v) return std::nullopt;
  Monomial out(mono.begin(), it);
  out.insert(out.end(), std::next(it), mono.end());
  return out;
}

std::string monomial_string(const Monomial& mono) {
  if (mono.empty()) return "1";
  std::string out;
  for (std::size_t i = 0, j; i < mono.size(); i = j) {
    j = i;
    while (j < mono.size() && mono[j] == mono[i]) ++j;
    if (!out.empty()) out += "*";
    out += "t" + std::to_string(mono[i].first) + "_" + std::to_string(mono[i].second);
    if (j - i > 1) out += "^" + std::to_string(j - i);
  }
  return out;
}

namespace {

Scalar multiplicity_factorials(const Monomial& mono) {
  Scalar out = 1;
  for (std::size_t i = 0, j; i < mono.size(); i = j) {
    j = i;
    while (j < mono.size() && mono[j] == mono[i]) ++j;
    out *= factorial(static_cast<int>(j - i));
  }
  return out;
}

Monomial merge(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> powers_of(const Monomial& mono) {
  std::vector<int> out;
  for (const auto& v : mono) out.push_back(v.first);
  return out;
}

}  // namespace

bool TruncatedPotential::within_caps(int g, const Monomial& mono) const {
  if (g < 0 || g > caps.gMax || static_cast<int>(mono.size()) > caps.nMax) return false;
  for (const auto& [k, a] : mono)
    if (k < 0 || k > caps.K || a < 0 || a >= dim) return false;
  return true;
}

std::optional<Scalar> TruncatedPotential::correlator(int g, const Monomial& mono) const {
  if (!is_stable(g, static_cast<int>(mono.size()))) return Scalar(0);
  if (!within_caps(g, mono)) return std::nullopt;
  auto it = correlators.find(g);
  if (it == correlators.end()) return Scalar(0);
  auto jt = it->second.find(mono);
  return jt == it->second.end() ? Scalar(0) : jt->second;
}

Scalar TruncatedPotential::coefficient(int g, const Monomial& mono) const {
  const auto c = correlator(g, mono);
  if (!c) throw CapExceeded("potential coefficient outside caps: " + monomial_string(mono));
  return *c / multiplicity_factorials(mono);
}

PotentialSource point_source() {
  return {"point", 1, true, [](int g, const Monomial& mono) {
            return psi_correlator(g, powers_of(mono), IntersectCaps{2, 16, 16});
          }};
}

PotentialSource tft_source(const IdempotentDecomposition& dec) {
  const int dim = static_cast<int>(dec.unit.size());
  return {"tft", dim, true, [dec, dim](int g, const Monomial& mono) -> Scalar {
            std::vector<Vec> vs;
            for (const auto& [k, a] : mono) {
              Vec e(dim);
              e[a] = 1;
              vs.push_back(e);
            }
            const Scalar t = tft_correlator(dec, g, vs);
            if (t == 0) return 0;
            return t * psi_correlator(g, powers_of(mono), IntersectCaps{2, 16, 16});
          }};
}

PotentialSource raction_source(const IdempotentDecomposition& dec, const RMatrix& r, const RactionOptions& options) {
  const int dim = static_cast<int>(dec.unit.size());
  return {"raction", dim, false, [dec, r, options, dim](int g, const Monomial& mono) {
            std::vector<Insert> ins;
            for (const auto& [k, a] : mono) {
              Vec e(dim);
              e[a] = 1;
              ins.push_back({e, k});
            }
            return raction_correlator(dec, r, g, ins, options);
          }};
}

PotentialSource product_source(const XCorrelatorTable& table, const IdempotentDecomposition& yDec, const RMatrix& yR,
                               const RactionOptions& options) {
  const int dim = table.dim * static_cast<int>(yDec.unit.size());
  return {"product", dim, false, [table, yDec, yR, options, dim](int g, const Monomial& mono) {
            ProductSpec spec{&table, yDec, yR, g, {}};
            for (const auto& [k, a] : mono) {
              Vec e(dim);
              e[a] = 1;
              spec.inserts.push_back({e, k});
            }
            return product_correlator(spec, options);
          }};
}

TruncatedPotential assemble_potential(const PotentialSource& source, const PotentialCaps& caps) {
  if (caps.gMax < 0 || caps.nMax < 0 || caps.K < 0) throw CapExceeded("negative potential caps");
  TruncatedPotential out{source.label, source.dim, caps, {}};
  std::vector<Variable> vars;
  for (int k = 0; k <= caps.K; ++k)
    for (int a = 0; a < source.dim; ++a) vars.push_back({k, a});
  for (int g = 0; g <= caps.gMax; ++g)
    for (int n = 0; n <= caps.nMax; ++n) {
      if (!is_stable(g, n)) continue;
      const int dimension = 3 * g - 3 + n;
      Monomial mono;
      std::function<void(std::size_t, int)> rec = [&](std::size_t start, int degree) {
        if (static_cast<int>(mono.size()) == n) {
          if (source.homogeneous && degree != dimension) return;
          const Scalar value = source.correlator(g, mono);
          if (value != 0) out.correlators[g][mono] = value;
          return;
        }
        for (std::size_t i = start; i < vars.size(); ++i) {
          if (degree + vars[i].first > dimension) break;
          mono.push_back(vars[i]);
          rec(i, degree + vars[i].first);
          mono.pop_back();
        }
      };
      rec(0, 0);
    }
  return out;
}

HbarSeries multiply(const HbarSeries& a, const HbarSeries& b, int nMax, int weightMax) {
  HbarSeries out;
  for (const auto& [ka, va] : a)
    for (const auto& [kb, vb] : b) {
      const int h = ka.first + kb.first;
      const int n = static_cast<int>(ka.second.size() + kb.second.size());
      if (n > nMax || h + n > weightMax) continue;
      out[{h, merge(ka.second, kb.second)}] += va * vb;
    }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

HbarSeries exponentiate(const TruncatedPotential& potential, int weightMax) {
  HbarSeries f;
  for (const auto& [g, entries] : potential.correlators)
    for (const auto& [mono, value] : entries)
      if (g - 1 + static_cast<int>(mono.size()) <= weightMax) f[{g - 1, mono}] = value / multiplicity_factorials(mono);
  HbarSeries out{{{0, {}}, Scalar(1)}};
  HbarSeries term = out;
  for (int j = 1; !term.empty(); ++j) {
    term = multiply(term, f, potential.caps.nMax, weightMax);
    for (auto& [k, v] : term) {
      v /= j;
      out[k] += v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

int ResidualReport::complete_count() const {
  return static_cast<int>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.cls == ResidualClass::Complete; }));
}

int ResidualReport::boundary_count() const { return static_cast<int>(entries.size()) - complete_count(); }

std::vector<ResidualEntry> ResidualReport::failures() const {
  std::vector<ResidualEntry> out;
  for (const auto& e : entries)
    if (e.cls == ResidualClass::Complete && e.value != 0) out.push_back(e);
  return out;
}

CoefficientValue operator_coefficient(const QuantizedOperator& op, const CorrelatorLookup& lookup, int g,
                                      const Monomial& mono) {
  CoefficientValue out;
  auto look = [&](int gg, const Monomial& m) -> std::optional<Scalar> {
    if (!is_stable(gg, static_cast<int>(m.size()))) return Scalar(0);
    return lookup(gg, m);
  };
  auto accumulate = [&](const Scalar& c, const std::optional<Scalar>& v) {
    if (!v)
      out.complete = false;
    else
      out.value += c * *v;
  };
  for (const auto& [xy, c] : op.mixed) {
    const auto& [x, y] = xy;
    const auto lo = std::lower_bound(mono.begin(), mono.end(), x);
    const auto hi = std::upper_bound(lo, mono.end(), x);
    if (lo == hi) continue;
    accumulate(c * static_cast<long>(hi - lo), look(g, add_variable(*remove_variable(mono, x), y)));
  }
  for (const auto& [y, c] : op.linearDerivative) accumulate(c, look(g, add_variable(mono, y)));
  if (!op.quadraticDerivative.empty()) {
    // Distinct variables with multiplicities, for the splits of mono.
    std::vector<std::pair<Variable, int>> groups;
    for (const auto& v : mono) {
      if (groups.empty() || groups.back().first != v)
        groups.push_back({v, 1});
      else
        ++groups.back().second;
    }
    for (const auto& [xy, c] : op.quadraticDerivative) {
      const auto& [x, y] = xy;
      accumulate(c, look(g - 1, add_variable(add_variable(mono, x), y)));
      std::vector<int> take(groups.size(), 0);
      while (true) {
        Monomial left, right;
        Scalar weight = c;
        for (std::size_t i = 0; i < groups.size(); ++i) {
          weight *= binomial(groups[i].second, take[i]);
          left.insert(left.end(), take[i], groups[i].first);
          right.insert(right.end(), groups[i].second - take[i], groups[i].first);
        }
        left = add_variable(left, x);
        right = add_variable(right, y);
        for (int g1 = 0; g1 <= g; ++g1) {
          const auto a = look(g1, left);
          if (a && *a == 0) continue;
          const auto b = look(g - g1, right);
          if (b && *b == 0) continue;
          if (!a || !b)
            out.complete = false;
          else
            out.value += weight * *a * *b;
        }
        std::size_t i = 0;
        while (i < groups.size() && ++take[i] > groups[i].second) take[i++] = 0;
        if (i == groups.size()) break;
      }
    }
  }
  if (g == 0) {
    if (mono.size() == 2) {
      auto it = op.quadraticMultiplier.find({mono[0], mono[1]});
      if (it != op.quadraticMultiplier.end()) out.value += it->second * (mono[0] == mono[1] ? 2 : 1);
    }
    if (mono.size() == 1) {
      auto it = op.linearMultiplier.find(mono[0]);
      if (it != op.linearMultiplier.end()) out.value += it->second;
    }
    if (mono.empty()) out.value += op.inverseHbarConstant;
  }
  if (g == 1 && mono.empty()) out.value += op.constant;
  return out;
}

namespace {

using Candidate = std::pair<int, Monomial>;

std::set<Candidate> candidates(const TruncatedPotential& pot, const QuantizedOperator& op) {
  std::set<Candidate> out;
  auto push = [&](int g, const Monomial& m) {
    if (g >= 0 && g <= pot.caps.gMax && static_cast<int>(m.size()) <= pot.caps.nMax) out.insert({g, m});
  };
  for (const auto& [g, entries] : pot.correlators)
    for (const auto& [n, value] : entries) {
      for (const auto& [xy, c] : op.mixed)
        if (auto r = remove_variable(n, xy.second)) push(g, add_variable(*r, xy.first));
      for (const auto& [y, c] : op.linearDerivative)
        if (auto r = remove_variable(n, y)) push(g, *r);
      for (const auto& [xy, c] : op.quadraticDerivative)
        if (auto r = remove_variable(n, xy.first))
          if (auto s = remove_variable(*r, xy.second)) push(g + 1, *s);
    }
  for (const auto& [xy, c] : op.quadraticDerivative) {
    std::vector<Candidate> left, right;
    for (const auto& [g, entries] : pot.correlators)
      for (const auto& [n, value] : entries) {
        if (auto r = remove_variable(n, xy.first)) left.push_back({g, *r});
        if (auto r = remove_variable(n, xy.second)) right.push_back({g, *r});
      }
    for (const auto& [g1, m1] : left)
      for (const auto& [g2, m2] : right)
        if (static_cast<int>(m1.size() + m2.size()) <= pot.caps.nMax && g1 + g2 <= pot.caps.gMax)
          push(g1 + g2, merge(m1, m2));
  }
  for (const auto& [xy, c] : op.quadraticMultiplier) push(0, Monomial{xy.first, xy.second});
  for (const auto& [x, c] : op.linearMultiplier) push(0, Monomial{x});
  if (op.inverseHbarConstant != 0) push(0, {});
  if (op.constant != 0) push(1, {});
  return out;
}

}  // namespace

ResidualReport virasoro_check(const TruncatedPotential& potential, const std::vector<QuantizedOperator>& ops,
                              int threads) {
  const CorrelatorLookup lookup = [&](int g, const Monomial& m) { return potential.correlator(g, m); };
  ResidualReport rep;
  for (const auto& op : ops) {
    if (op.dim != potential.dim) throw DimensionMismatch("operator and potential dimensions differ");
    const auto cands = candidates(potential, op);
    const std::vector<Candidate> list(cands.begin(), cands.end());
    std::vector<ResidualEntry> out(list.size());
    auto work = [&](std::size_t begin, std::size_t step) {
      for (std::size_t i = begin; i < list.size(); i += step) {
        const auto v = operator_coefficient(op, lookup, list[i].first, list[i].second);
        out[i] = {op.m, list[i].first, list[i].second, v.value,
                  v.complete ? ResidualClass::Complete : ResidualClass::TruncationBoundary};
      }
    };
    const std::size_t t = static_cast<std::size_t>(std::max(1, threads));
    if (t == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < t; ++i) pool.emplace_back(work, i, t);
      for (auto& th : pool) th.join();
    }
    rep.entries.insert(rep.entries.end(), out.begin(), out.end());
  }
  return rep;
}

std::vector<QuantizedOperator> npoints_virasoro_operators(const Matrix& pairing, const Vec& unit, int mMax, int K) {
  const Matrix zero = Matrix::zero(pairing.rows());
  std::vector<QuantizedOperator> out;
  for (int m = -1; m <= mMax; ++m) out.push_back(quantize(lm_symbol(zero, zero, m, K), pairing, unit, K));
  return out;
}

std::vector<QuantizedOperator> point_virasoro_operators(int mMax, int K) {
  return npoints_virasoro_operators(Matrix::identity(1), Vec{1}, mMax, K);
}

std::map<std::pair<int, std::vector<int>>, Scalar> solve_point_virasoro(int gMax, int degreeMax) {
  using Key = std::pair<int, std::vector<int>>;
  std::map<Key, Scalar> table{{{0, {0, 0, 0}}, Scalar(1)}};
  const auto ops = point_virasoro_operators(std::max(degreeMax - 1, 0), degreeMax);
  auto toMono = [](const std::vector<int>& powers) {
    Monomial m;
    for (int k : powers) m.push_back({k, 0});
    return m;
  };
  for (int g = 0; g <= gMax; ++g)
    for (int n = 1; 3 * g - 3 + n <= degreeMax; ++n) {
      if (!is_stable(g, n)) continue;
      const int dimension = 3 * g - 3 + n;
      if (dimension < 0) continue;
      // Partitions of `dimension` into n nonnegative parts, sorted.
      std::vector<int> powers(n, 0);
      std::function<void(int, int, int)> rec = [&](int i, int left, int minPart) {
        if (i == n) {
          if (left != 0) return;
          const Key target{g, powers};
          if (table.count(target)) return;
          const int top = powers.back();
          const CorrelatorLookup lookup = [&](int gg, const Monomial& m) -> std::optional<Scalar> {
            int sum = 0;
            std::vector<int> p;
            for (const auto& v : m) sum += v.first, p.push_back(v.first);
            if (sum != 3 * gg - 3 + static_cast<int>(m.size())) return Scalar(0);
            auto it = table.find({gg, p});
            if (it == table.end()) return std::nullopt;
            return it->second;
          };
          const Monomial out = *remove_variable(toMono(powers), {top, 0});
          const auto& op = ops.at(top);  // L_{top - 1}
          table[target] = 0;
          const auto r0 = operator_coefficient(op, lookup, g, out);
          table[target] = 1;
          const auto r1 = operator_coefficient(op, lookup, g, out);
          if (!r0.complete || !r1.complete || r1.value == r0.value)
            throw Error("point constraint solve stalled at genus " + std::to_string(g));
          table[target] = -r0.value / (r1.value - r0.value);
          return;
        }
        for (int p = minPart; p <= left; ++p) {
          if (n - i > 1 && p * (n - i) > left) break;
          powers[i] = p;
          rec(i + 1, left - p, p);
        }
      };
      rec(0, dimension, 0);
    }
  return table;
}

}  // namespace cohft
