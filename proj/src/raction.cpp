#include "cohft/raction.hpp"

#include <algorithm>
#include <map>

#include "graph_sum.hpp"

namespace cohft {

RMatrix RMatrix::identity(int dim, int order) {
  RMatrix r;
  r.coeffs.assign(order + 1, Matrix::zero(dim));
  r.coeffs[0] = Matrix::identity(dim);
  return r;
}

Matrix eta_adjoint(const Matrix& a, const Matrix& pairing) {
  const auto inv = inverse(pairing);
  if (!inv) throw Error("degenerate pairing");
  return *inv * a.transpose() * pairing;
}

MatrixSeries series_multiply(const MatrixSeries& a, const MatrixSeries& b, int order) {
  const std::size_t n = a.at(0).rows();
  MatrixSeries c(order + 1, Matrix::zero(n));
  for (int i = 0; i <= order && i < static_cast<int>(a.size()); ++i)
    for (int j = 0; i + j <= order && j < static_cast<int>(b.size()); ++j) {
      if (a[i].is_zero() || b[j].is_zero()) continue;
      c[i + j] += a[i] * b[j];
    }
  return c;
}

MatrixSeries series_exp(const MatrixSeries& a, int order) {
  const std::size_t n = a.at(0).rows();
  if (!a[0].is_zero()) throw Error("series_exp needs a vanishing constant term");
  MatrixSeries result(order + 1, Matrix::zero(n));
  MatrixSeries term(order + 1, Matrix::zero(n));
  term[0] = Matrix::identity(n);
  for (int p = 0; p <= order; ++p) {
    for (int k = 0; k <= order; ++k) result[k] += term[k];
    term = series_multiply(term, a, order);
    for (auto& m : term) m *= Scalar(1, p + 1);
  }
  return result;
}

MatrixSeries invert(const RMatrix& r) {
  const int n = r.dim(), K = r.order();
  MatrixSeries inv(K + 1, Matrix::zero(n));
  inv[0] = Matrix::identity(n);
  for (int k = 1; k <= K; ++k) {
    Matrix s = Matrix::zero(n);
    for (int j = 1; j <= k; ++j) s += r[j] * inv[k - j];
    inv[k] = -s;
  }
  return inv;
}

ValidationReport validate_symplectic(const RMatrix& r, const Matrix& pairing) {
  ValidationReport rep;
  const int n = r.dim(), K = r.order();
  rep.add("R_0 = Id", r[0] == Matrix::identity(n));
  std::vector<Matrix> adj;
  for (int k = 0; k <= K; ++k) adj.push_back(eta_adjoint(r[k], pairing));
  for (int k = 1; k <= K; ++k) {
    Matrix res = Matrix::zero(n);
    for (int i = 0; i <= k; ++i) {
      const Matrix t = r[i] * adj[k - i];
      if ((k - i) % 2) res -= t;
      else res += t;
    }
    std::string detail;
    if (!res.is_zero()) {
      detail = "residual [";
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) detail += (a || b ? "," : "") + to_string(res(a, b));
      detail += "]";
    }
    rep.add("order " + std::to_string(k), res.is_zero(), detail);
  }
  const auto inv = invert(r);
  bool invOk = true;
  int firstBad = -1;
  for (int k = 0; k <= K && invOk; ++k) {
    Matrix expect = adj[k];
    if (k % 2) expect = -expect;
    if (inv[k] != expect) invOk = false, firstBad = k;
  }
  rep.add("inverse is adjoint at -z", invOk, invOk ? "" : "first mismatch at order " + std::to_string(firstBad));
  return rep;
}

TranslationSeries translation(const RMatrix& r, const Vec& unit) {
  const auto inv = invert(r);
  const int K = r.order();
  TranslationSeries t;
  t.coeffs.assign(K + 2, Vec(r.dim()));
  // T(z) = z 1 - z R^{-1}(z) 1
  std::vector<Vec> full(K + 2, Vec(r.dim()));
  full[1] = unit;
  for (int k = 0; k <= K; ++k) full[k + 1] = add(full[k + 1], scale(inv[k] * unit, -1));
  if (!is_zero(full[0]) || !is_zero(full[1])) throw NonvanishingLowOrder();
  for (int c = 2; c <= K + 1; ++c) t.coeffs[c] = full[c];
  return t;
}

EdgeSeries edge_series(const RMatrix& r, const Matrix& pairing) {
  const int n = r.dim(), K = r.order();
  const auto etaInv = inverse(pairing);
  if (!etaInv) throw Error("degenerate pairing");
  const auto inv = invert(r);
  // Numerator N(x, y) = eta^{-1} - R^{-1}(x) eta^{-1} R^{-1}(y)^T, coefficients N[i][j] for i + j <= K.
  std::vector<std::vector<Matrix>> N(K + 1);
  for (int i = 0; i <= K; ++i)
    for (int j = 0; i + j <= K; ++j) {
      Matrix m = -(inv[i] * *etaInv * inv[j].transpose());
      if (i == 0 && j == 0) m += *etaInv;
      N[i].push_back(std::move(m));
    }
  if (!N[0][0].is_zero()) throw NotDivisible("constant term");
  EdgeSeries e;
  e.order = K;
  e.coef.assign(K, {});
  for (int k = 0; k < K; ++k) e.coef[k].assign(K - k, Matrix::zero(n));
  // (x + y) Q = N, solved along each anti-diagonal d = i + j.
  for (int d = 1; d <= K; ++d) {
    e.coef[d - 1][0] = N[d][0];
    for (int l = 1; l <= d - 1; ++l) e.coef[d - 1 - l][l] = N[d - l][l] - e.coef[d - l][l - 1];
    if (e.coef[0][d - 1] != N[0][d]) throw NotDivisible("degree " + std::to_string(d));
  }
  return e;
}

RMatrix random_symplectic(const Matrix& pairing, int order, std::mt19937_64& rng, int logDegree, int range) {
  const int n = static_cast<int>(pairing.rows());
  const Matrix etaInv = *inverse(pairing);
  std::uniform_int_distribution<int> dist(-range, range);
  MatrixSeries a(order + 1, Matrix::zero(n));
  for (int k = 1; k <= std::min(logDegree, order); ++k) {
    // a_k = eta^{-1} B: B symmetric makes a_k self-adjoint (odd k), antisymmetric makes it skew (even k).
    Matrix b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        if (i == j && k % 2 == 0) continue;
        Scalar x(dist(rng), 1 + (dist(rng) + range) % 2);
        x.canonicalize();
        b(i, j) = x;
        b(j, i) = k % 2 ? x : Scalar(-x);
      }
    a[k] = etaInv * b;
  }
  RMatrix r;
  r.coeffs = series_exp(a, order);
  return r;
}


Scalar raction_correlator(const IdempotentDecomposition& dec, const RMatrix& r, int g, const std::vector<Insert>& inserts,
                          const RactionOptions& options) {
  const int n = static_cast<int>(inserts.size());
  require_stable(g, n);
  const int dim = static_cast<int>(dec.unit.size());
  if (r.dim() != dim) throw DimensionMismatch("R-matrix vs target");
  for (const auto& ins : inserts) {
    if (static_cast<int>(ins.vector.size()) != dim) throw DimensionMismatch("insert vector");
    if (ins.psi < 0) throw Error("negative psi power");
  }
  int external = 0;
  for (const auto& ins : inserts) external += ins.psi;
  const int free = 3 * g - 3 + n - external;
  if (free < 0) return 0;
  if (r.order() < free) throw CapExceeded("R-matrix order " + std::to_string(r.order()) + " < " + std::to_string(free));

  const detail::SectorData sec = detail::sectors(dec);
  const int rank = sec.rank;
  const auto inv = invert(r);
  const auto T = translation(r, dec.unit);
  const auto E = edge_series(r, dec.pairing);

  // Edge bivectors in sector coordinates: C E C^T.
  std::vector<std::vector<Matrix>> Es(E.coef.size());
  for (std::size_t k = 0; k < E.coef.size(); ++k)
    for (const auto& m : E.coef[k]) Es[k].push_back(sec.coord * m * sec.coord.transpose());
  // legCoord[j][s][i] = coord_i(R^{-1}_s v_j)
  std::vector<std::vector<Vec>> legCoord(n);
  for (int j = 0; j < n; ++j)
    for (int s = 0; s <= free; ++s) legCoord[j].push_back(sec.coord * (inv[s] * inserts[j].vector));
  std::vector<Vec> tCoord;
  for (const auto& t : T.coeffs) tCoord.push_back(sec.coord * t);

  // F[(g, sorted a)][i] = sum over translation multisets of weight * mixed integral.
  std::map<std::pair<int, std::vector<int>>, Vec> vertexCache;
  auto vertexFactor = [&](int gv, std::vector<int> a) -> const Vec& {
    std::sort(a.begin(), a.end());
    auto key = std::make_pair(gv, a);
    if (auto it = vertexCache.find(key); it != vertexCache.end()) return it->second;
    int used = 0;
    for (int x : a) used += x;
    const int rest = 3 * gv - 3 + static_cast<int>(a.size()) - used;
    Vec f(rank);
    detail::for_each_translation_multiset(rest, options.maxTranslationLegs, [&](const std::vector<int>& c, const Scalar& w) {
      const Scalar integral = mixed_integral(gv, a, c, options.intersectCaps);
      if (integral == 0) return;
      for (int i = 0; i < rank; ++i) {
        Scalar p = w * integral;
        for (int x : c) p *= tCoord.at(x)[i];
        f[i] += p;
      }
    });
    for (int i = 0; i < rank; ++i) f[i] *= power(sec.norms[i], 1 - gv);
    return vertexCache.emplace(std::move(key), std::move(f)).first->second;
  };

  Scalar total = 0;
  for (const auto& gr : enumerate(g, n, options.graphCaps).graphs) {
    const int nv = gr.vertex_count(), nh = gr.half_edge_count();
    std::vector<int> ext(nh, 0), legIndex(nh, -1);
    for (int h = 0; h < nh; ++h)
      if (gr.is_leg(h)) {
        legIndex[h] = gr.legMarking[h] - 1;
        ext[h] = inserts[legIndex[h]].psi;
      }
    const auto edges = gr.edges();
    Scalar graphSum = 0;
    detail::for_each_series_assignment(gr, ext, [&](const std::vector<int>& series) {
      std::vector<Vec> vval(nv, Vec(rank, 1));
      for (int v = 0; v < nv; ++v) {
        std::vector<int> a;
        for (int h : gr.half_edges_at(v)) a.push_back(series[h] + ext[h]);
        const Vec& f = vertexFactor(gr.vertexGenus[v], a);
        for (int i = 0; i < rank; ++i) vval[v][i] = f[i];
      }
      for (int h = 0; h < nh; ++h)
        if (legIndex[h] >= 0)
          for (int i = 0; i < rank; ++i) vval[gr.halfEdgeVertex[h]][i] *= legCoord[legIndex[h]][series[h]][i];
      for (int v = 0; v < nv; ++v)
        if (is_zero(vval[v])) return;
      std::vector<const Matrix*> em;
      for (const auto& [h1, h2] : edges) em.push_back(&Es[series[h1]][series[h2]]);
      const Scalar sum = detail::contract_sectors(gr, vval, em);
      graphSum += sum;
    });
    const int aut = automorphism_order(gr);
    graphSum /= aut;
    if (options.trace) options.trace->push_back({canonical_form(gr), aut, graphSum});
    total += graphSum;
  }
  return total;
}

}  // namespace cohft
