#include "cohft/fockvir.hpp"

#include <algorithm>
#include <climits>

namespace cohft {

GradingOperators build_mu_rho(const std::vector<std::pair<int, int>>& hodge, int complexDim, const Matrix& c1Matrix) {
  const std::size_t dim = hodge.size();
  if (complexDim < 0) throw GradingInconsistent("negative dimension");
  if (c1Matrix.rows() != dim || c1Matrix.cols() != dim)
    throw GradingInconsistent("c1 matrix is " + std::to_string(c1Matrix.rows()) + "x" +
                              std::to_string(c1Matrix.cols()) + ", expected " + std::to_string(dim));
  GradingOperators out{Matrix::zero(dim), c1Matrix};
  for (std::size_t a = 0; a < dim; ++a) {
    const auto [p, q] = hodge[a];
    if (p < 0 || q < 0 || p > complexDim || q > complexDim)
      throw GradingInconsistent("bidegree (" + std::to_string(p) + "," + std::to_string(q) + ") at basis index " +
                                std::to_string(a));
    out.mu(a, a) = Scalar(2 * p - complexDim, 2);
    out.mu(a, a).canonicalize();
  }
  Matrix pw = Matrix::identity(dim);
  for (std::size_t i = 0; i < dim; ++i) pw = pw * c1Matrix;
  if (!pw.is_zero()) throw GradingInconsistent("c1 matrix is not nilpotent");
  if (commutator(out.mu, c1Matrix) != c1Matrix) throw GradingInconsistent("[mu, rho] != rho");
  return out;
}

// ---------------------------------------------------------------------------
// LaurentOperator

std::map<int, Vec> LaurentOperator::apply(int k, const Vec& v) const {
  if (!covers(k)) throw CapExceeded("symbol range does not contain z^" + std::to_string(k));
  std::map<int, Vec> out;
  for (auto it = blocks.lower_bound({k, INT_MIN}); it != blocks.end() && it->first.first == k; ++it) {
    Vec w = it->second * v;
    auto& slot = out[k + it->first.second];
    slot = slot.empty() ? w : add(slot, w);
  }
  return out;
}

void LaurentOperator::prune() {
  for (auto it = blocks.begin(); it != blocks.end();) it = it->second.is_zero() ? blocks.erase(it) : std::next(it);
}

namespace {

LaurentOperator combine(const LaurentOperator& a, const LaurentOperator& b, const Scalar& sb) {
  if (a.dim != b.dim) throw DimensionMismatch("symbol dimensions differ");
  LaurentOperator out{a.dim, std::max(a.kMin, b.kMin), std::min(a.kMax, b.kMax), {}};
  for (const auto& [key, m] : a.blocks)
    if (out.covers(key.first)) out.blocks[key] = m;
  for (const auto& [key, m] : b.blocks) {
    if (!out.covers(key.first)) continue;
    auto it = out.blocks.find(key);
    if (it == out.blocks.end())
      out.blocks[key] = sb * m;
    else
      it->second += sb * m;
  }
  out.prune();
  return out;
}

}  // namespace

LaurentOperator operator+(const LaurentOperator& a, const LaurentOperator& b) { return combine(a, b, 1); }
LaurentOperator operator-(const LaurentOperator& a, const LaurentOperator& b) { return combine(a, b, -1); }

LaurentOperator operator*(const Scalar& s, const LaurentOperator& a) {
  LaurentOperator out = a;
  for (auto& [key, m] : out.blocks) m *= s;
  out.prune();
  return out;
}

LaurentOperator compose(const LaurentOperator& a, const LaurentOperator& b) {
  if (a.dim != b.dim) throw DimensionMismatch("symbol dimensions differ");
  LaurentOperator out{a.dim, 0, -1, {}};
  std::vector<int> ok;
  for (int k = b.kMin; k <= b.kMax; ++k) {
    bool inside = true;
    for (auto it = b.blocks.lower_bound({k, INT_MIN}); it != b.blocks.end() && it->first.first == k; ++it)
      inside = inside && a.covers(k + it->first.second);
    if (inside) ok.push_back(k);
  }
  if (ok.empty()) return out;
  // Keep the longest contiguous run so the result has an interval domain.
  std::size_t best = 0, bestLen = 0;
  for (std::size_t i = 0, j; i < ok.size(); i = j) {
    j = i + 1;
    while (j < ok.size() && ok[j] == ok[j - 1] + 1) ++j;
    if (j - i > bestLen) best = i, bestLen = j - i;
  }
  out.kMin = ok[best];
  out.kMax = ok[best + bestLen - 1];
  for (int k = out.kMin; k <= out.kMax; ++k)
    for (auto it = b.blocks.lower_bound({k, INT_MIN}); it != b.blocks.end() && it->first.first == k; ++it) {
      const int mid = k + it->first.second;
      for (auto jt = a.blocks.lower_bound({mid, INT_MIN}); jt != a.blocks.end() && jt->first.first == mid; ++jt) {
        const std::pair<int, int> key{k, it->first.second + jt->first.second};
        const Matrix prod = jt->second * it->second;
        auto slot = out.blocks.find(key);
        if (slot == out.blocks.end())
          out.blocks.emplace(key, prod);
        else
          slot->second += prod;
      }
    }
  out.prune();
  return out;
}

LaurentOperator z_power(int dim, int p, int kMin, int kMax) {
  LaurentOperator out{dim, kMin, kMax, {}};
  for (int k = kMin; k <= kMax; ++k) out.blocks[{k, p}] = Matrix::identity(dim);
  return out;
}

LaurentOperator tensor_left(const LaurentOperator& a, int dimB) {
  LaurentOperator out{a.dim * dimB, a.kMin, a.kMax, {}};
  for (const auto& [key, m] : a.blocks) out.blocks[key] = kronecker(m, Matrix::identity(dimB));
  return out;
}

LaurentOperator tensor_right(int dimA, const LaurentOperator& b) {
  LaurentOperator out{dimA * b.dim, b.kMin, b.kMax, {}};
  for (const auto& [key, m] : b.blocks) out.blocks[key] = kronecker(Matrix::identity(dimA), m);
  return out;
}

LaurentOperator restrict_range(const LaurentOperator& a, int kMin, int kMax) {
  if (kMin < a.kMin || kMax > a.kMax) throw CapExceeded("restriction outside the symbol range");
  LaurentOperator out{a.dim, kMin, kMax, {}};
  for (const auto& [key, m] : a.blocks)
    if (out.covers(key.first)) out.blocks[key] = m;
  return out;
}

VirasoroSymbol lm_symbol(const Matrix& mu, const Matrix& rho, int m, int kMin, int kMax) {
  if (m < -1) throw Error("l_m needs m >= -1");
  const int dim = static_cast<int>(mu.rows());
  VirasoroSymbol out{m, mu, rho, LaurentOperator{dim, kMin, kMax, {}}};
  const Matrix id = Matrix::identity(dim);
  for (int k = kMin; k <= kMax; ++k) {
    // Twice the exponent -> coefficient; starts at z^{k - 1/2}.
    std::map<int, Matrix> poly{{2 * k - 1, id}};
    for (int step = 0; step <= m; ++step) {
      std::map<int, Matrix> next;
      for (const auto& [e2, coef] : poly) {
        Scalar e1(e2 + 2, 2);
        e1.canonicalize();
        const Matrix up = (e1 * id - mu) * coef;
        auto it = next.find(e2 + 2);
        if (it == next.end())
          next.emplace(e2 + 2, up);
        else
          it->second += up;
        const Matrix same = rho * coef;
        it = next.find(e2);
        if (it == next.end())
          next.emplace(e2, same);
        else
          it->second += same;
      }
      poly = std::move(next);
    }
    for (const auto& [e2, coef] : poly)
      if (!coef.is_zero()) out.op.blocks[{k, (e2 - 1) / 2 - k}] = coef;
  }
  return out;
}

VirasoroSymbol lm_symbol(const Matrix& mu, const Matrix& rho, int m, int K) {
  return lm_symbol(mu, rho, m, -K - std::max(m, 0) - 3, K + 1);
}

// ---------------------------------------------------------------------------
// Quantization

namespace {

// Darboux coordinate: type 0 = q_k^a (from e_a z^k), type 1 = p_{k,a} (from e^a (-z)^{-1-k}).
struct Coord {
  int type;
  int k;
  int a;
  auto operator<=>(const Coord&) const = default;
};

}  // namespace

QuantizedOperator quantize_operator(const LaurentOperator& a, const Matrix& pairing, const Vec& unit, int K) {
  const int dim = a.dim;
  if (static_cast<int>(pairing.rows()) != dim || static_cast<int>(unit.size()) != dim)
    throw DimensionMismatch("quantize: pairing or unit does not match the symbol");
  const auto etaInv = inverse(pairing);
  if (!etaInv) throw Error("degenerate pairing");
  int jMax = 0;
  for (const auto& [key, m] : a.blocks) jMax = std::max(jMax, key.second);
  const int pMax = K + jMax + 1;
  if (!a.covers(-1 - pMax) || !a.covers(K))
    throw CapExceeded("symbol range [" + std::to_string(a.kMin) + "," + std::to_string(a.kMax) + "] too small for K=" +
                      std::to_string(K));

  // h = 1/2 sum_c [p_c(f) q_c(Af) - q_c(f) p_c(Af)] as a quadratic form in Darboux coordinates.
  std::map<std::pair<Coord, Coord>, Scalar> h;
  const Scalar half(1, 2);
  auto addTerm = [&](Coord x, Coord y, const Scalar& c) {
    if (c == 0) return;
    if (y < x) std::swap(x, y);
    h[{x, y}] += c;
  };
  auto collect = [&](const Coord& source, int exponent, const Vec& w) {
    for (const auto& [e, image] : a.apply(exponent, w)) {
      if (e >= 0) {
        for (int b = 0; b < dim; ++b) addTerm(Coord{1, e, b}, source, half * image[b]);
      } else {
        const int l = -1 - e;
        const Vec lowered = pairing * image;
        const Scalar sign = (l + 1) % 2 ? -1 : 1;
        for (int b = 0; b < dim; ++b) addTerm(Coord{0, l, b}, source, -half * sign * lowered[b]);
      }
    }
  };
  for (int l = 0; l <= K; ++l)
    for (int b = 0; b < dim; ++b) {
      Vec e(dim);
      e[b] = 1;
      collect(Coord{0, l, b}, l, e);
    }
  for (int l = 0; l <= pMax; ++l)
    for (int b = 0; b < dim; ++b) {
      Vec dual(dim);
      for (int c = 0; c < dim; ++c) dual[c] = (*etaInv)(c, b);
      collect(Coord{1, l, b}, -1 - l, scale(dual, (l + 1) % 2 ? Scalar(-1) : Scalar(1)));
    }

  QuantizedOperator out;
  out.dim = dim;
  out.K = K;
  auto shift = [&](const Coord& x) -> Scalar { return x.type == 0 && x.k == 1 ? unit[x.a] : Scalar(0); };
  auto var = [](const Coord& x) { return Variable{x.k, x.a}; };
  for (const auto& [xy, c] : h) {
    if (c == 0) continue;
    const auto& [x, y] = xy;
    if (x.type == 0 && y.type == 0) {
      // c (t_x - s_x)(t_y - s_y) / hbar
      if (x.k <= K && y.k <= K) out.quadraticMultiplier[{var(x), var(y)}] += c;
      if (x.k <= K) out.linearMultiplier[var(x)] -= c * shift(y);
      if (y.k <= K) out.linearMultiplier[var(y)] -= c * shift(x);
      out.inverseHbarConstant += c * shift(x) * shift(y);
    } else if (x.type == 0) {
      if (x.k <= K) out.mixed[{var(x), var(y)}] += c;
      out.linearDerivative[var(y)] -= c * shift(x);
    } else {
      out.quadraticDerivative[{var(x), var(y)}] += c;
    }
  }
  auto prune = [](auto& m) {
    for (auto it = m.begin(); it != m.end();) it = it->second == 0 ? m.erase(it) : std::next(it);
  };
  prune(out.linearDerivative);
  prune(out.linearMultiplier);
  prune(out.mixed);
  prune(out.quadraticDerivative);
  prune(out.quadraticMultiplier);
  return out;
}

QuantizedOperator quantize(const VirasoroSymbol& symbol, const Matrix& pairing, const Vec& unit, int K) {
  QuantizedOperator out = quantize_operator(symbol.op, pairing, unit, K);
  out.m = symbol.m;
  if (symbol.m == 0) {
    out.traceConstant = (symbol.mu * eta_adjoint(symbol.mu, pairing)).trace() / 4;
    out.orderingConstant = Scalar(out.dim, 16);
    out.orderingConstant.canonicalize();
    out.constant = out.traceConstant + out.orderingConstant;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grading identities

namespace {

void identity_residuals(ValidationReport& rep, const std::string& prefix, const Matrix& mu, const Matrix& muSource,
                        const Matrix& rho, const Matrix& a, const InverseSeries& s, const RMatrix& r, int n) {
  auto witness = [](const Matrix& m) {
    std::string out = "residual [";
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out += (i + j ? "," : "") + to_string(m(i, j));
    return out + "]";
  };
  for (int k = 0; k < n; ++k) {
    const Matrix res = Scalar(k) * r[k] + mu * r[k] - r[k] * muSource + commutator(a, r[k + 1]);
    rep.add(prefix + "R order " + std::to_string(k), res.is_zero(), res.is_zero() ? "" : witness(res));
  }
  for (int k = 1; k <= n; ++k) {
    const Matrix res = Scalar(-k) * s[k] + commutator(mu, s[k]) + a * s[k - 1] - s[k - 1] * rho;
    rep.add(prefix + "S order " + std::to_string(k), res.is_zero(), res.is_zero() ? "" : witness(res));
  }
}

void check_input(const GradingCheckInput& in, int n) {
  if (n < 0) throw InsufficientOrder("negative order");
  if (in.r.order() < n) throw InsufficientOrder("R has order " + std::to_string(in.r.order()) + " < " + std::to_string(n));
  if (static_cast<int>(in.s.size()) <= n)
    throw InsufficientOrder("S has order " + std::to_string(static_cast<int>(in.s.size()) - 1) + " < " +
                            std::to_string(n));
  const std::size_t dim = in.mu.rows();
  if (in.s.at(0) != Matrix::identity(dim)) throw Error("S_0 must be the identity");
  if (in.r[0] != Matrix::identity(dim)) throw Error("R_0 must be the identity");
}

}  // namespace

ValidationReport grading_conjugation_check(const GradingCheckInput& input, int orderN) {
  check_input(input, orderN);
  ValidationReport rep;
  identity_residuals(rep, "", input.mu, Matrix::zero(input.mu.rows()), input.rho, input.quantumRho, input.s, input.r,
                     orderN);
  return rep;
}

ValidationReport grading_conjugation_check(const GradingCheckInput& input, int orderN, const Matrix& muX,
                                           const Matrix& rhoX) {
  ValidationReport rep = grading_conjugation_check(input, orderN);
  const int dx = static_cast<int>(muX.rows());
  const Matrix idX = Matrix::identity(dx), idY = Matrix::identity(input.mu.rows());
  auto lift = [&](const Matrix& y) { return kronecker(idX, y); };
  const Matrix mu = kronecker(muX, idY) + lift(input.mu);
  const Matrix rho = kronecker(rhoX, idY) + lift(input.rho);
  const Matrix a = kronecker(rhoX, idY) + lift(input.quantumRho);
  InverseSeries s;
  for (const auto& m : input.s) s.push_back(lift(m));
  RMatrix r;
  for (const auto& m : input.r.coeffs) r.coeffs.push_back(lift(m));
  identity_residuals(rep, "product ", mu, kronecker(muX, idY), rho, a, s, r, orderN);
  return rep;
}

}  // namespace cohft
