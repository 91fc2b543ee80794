#include "cohft/product.hpp"

#include <algorithm>
#include <sstream>

#include "graph_sum.hpp"

namespace cohft {

namespace {

XCorrelatorTable::Key make_key(int g, std::vector<XInsert> inserts, std::vector<int> kappa) {
  std::sort(inserts.begin(), inserts.end());
  std::sort(kappa.begin(), kappa.end());
  return {g, std::move(inserts), std::move(kappa)};
}

IntersectCaps integral_caps(const XCorrelatorTable::Caps& caps) {
  return {caps.gMax, caps.nMax + caps.degreeMax, caps.degreeMax};
}

}  // namespace

std::string XCorrelatorTable::key_string(const Key& key) {
  const auto& [g, ins, kappa] = key;
  std::ostringstream os;
  os << "{g:" << g << ", inserts:[";
  for (std::size_t i = 0; i < ins.size(); ++i) os << (i ? "," : "") << "[" << ins[i].first << "," << ins[i].second << "]";
  os << "], kappa:[";
  for (std::size_t i = 0; i < kappa.size(); ++i) os << (i ? "," : "") << kappa[i];
  os << "]}";
  return os.str();
}

Scalar XCorrelatorTable::lookup(int g, std::vector<XInsert> inserts, std::vector<int> kappa) const {
  Key key = make_key(g, std::move(inserts), std::move(kappa));
  const auto& [kg, ins, kap] = key;
  const int n = static_cast<int>(ins.size());
  int degree = 0;
  for (const auto& [x, d] : ins) {
    if (x < 0 || x >= dim || d < 0) throw MissingTableEntry(key_string(key));
    degree += d;
  }
  for (int b : kap) degree += b;
  if (!is_stable(kg, n) || kg > caps.gMax || n > caps.nMax || degree > caps.degreeMax)
    throw MissingTableEntry(key_string(key));
  if (generator_) {
    {
      std::lock_guard lock(memo_->mutex);
      if (auto it = memo_->values.find(key); it != memo_->values.end()) return it->second;
    }
    const Scalar v = generator_(kg, ins, kap);
    std::lock_guard lock(memo_->mutex);
    memo_->values.emplace(key, v);
    return v;
  }
  auto it = entries_.find(key);
  return it == entries_.end() ? Scalar(0) : it->second;
}

void XCorrelatorTable::set(int g, std::vector<XInsert> inserts, std::vector<int> kappa, const Scalar& value) {
  Key key = make_key(g, std::move(inserts), std::move(kappa));
  auto [it, fresh] = entries_.emplace(key, value);
  if (!fresh && it->second != value) conflicts_.push_back(key);
}

XCorrelatorTable XCorrelatorTable::from_generator(std::string label, const Matrix& pairing, const Vec& unit,
                                                  const Caps& caps, Generator gen) {
  XCorrelatorTable t;
  t.label = std::move(label);
  t.dim = static_cast<int>(pairing.rows());
  t.pairing = pairing;
  t.unit = unit;
  t.caps = caps;
  t.generator_ = std::move(gen);
  t.memo_ = std::make_shared<Memo>();
  return t;
}

XCorrelatorTable XCorrelatorTable::point(const Caps& caps) {
  const IntersectCaps ic = integral_caps(caps);
  return from_generator("point", Matrix::identity(1), Vec{1}, caps,
                        [ic](int g, const std::vector<XInsert>& ins, const std::vector<int>& kappa) -> Scalar {
                          std::vector<int> a;
                          for (const auto& p : ins) a.push_back(p.second);
                          return kappa_integral(g, a, kappa, ic);
                        });
}

XCorrelatorTable XCorrelatorTable::tft(const FrobeniusData& data, const Caps& caps) {
  const IntersectCaps ic = integral_caps(caps);
  auto dec = std::make_shared<IdempotentDecomposition>(idempotent_basis(data));
  const int dim = data.dim;
  return from_generator(data.label, data.pairing, data.unit, caps,
                        [ic, dec, dim](int g, const std::vector<XInsert>& ins, const std::vector<int>& kappa) -> Scalar {
                          std::vector<int> a;
                          std::vector<Vec> vs;
                          for (const auto& [x, d] : ins) {
                            a.push_back(d);
                            Vec v(dim);
                            v[x] = 1;
                            vs.push_back(std::move(v));
                          }
                          const Scalar integral = kappa_integral(g, a, kappa, ic);
                          if (integral == 0) return integral;
                          return integral * tft_correlator(*dec, g, vs);
                        });
}

XCorrelatorTable XCorrelatorTable::npoints(int n, const std::vector<Scalar>& norms, const Caps& caps) {
  return tft(FrobeniusData::npoints(n, norms), caps);
}

namespace {

/// Calls f on every sorted multiset of n (index, psi) pairs with indices < dim and psi sum `total`.
void for_each_insert_multiset(int dim, int n, int total, const std::function<void(const std::vector<XInsert>&)>& f) {
  std::vector<XInsert> cur;
  std::function<void(int, int, int)> rec = [&](int left, int minX, int minD) {
    if (static_cast<int>(cur.size()) == n) {
      if (left == 0) f(cur);
      return;
    }
    for (int x = minX; x < dim; ++x)
      for (int d = (x == minX ? minD : 0); d <= left; ++d) {
        cur.push_back({x, d});
        rec(left - d, x, d);
        cur.pop_back();
      }
  };
  rec(total, 0, 0);
}

}  // namespace

ValidationReport validate_table(const XCorrelatorTable& t) {
  ValidationReport rep;
  const bool shapeOk = t.dim > 0 && static_cast<int>(t.pairing.rows()) == t.dim &&
                       static_cast<int>(t.pairing.cols()) == t.dim && static_cast<int>(t.unit.size()) == t.dim;
  rep.add("shape", shapeOk);
  if (!shapeOk) return rep;
  rep.add("symmetric", t.conflicts().empty(),
          t.conflicts().empty() ? "" : "witness " + XCorrelatorTable::key_string(t.conflicts().front()));

  auto withUnit = [&](int g, const std::vector<XInsert>& ins, int psi) {
    Scalar s = 0;
    for (int c = 0; c < t.dim; ++c) {
      if (t.unit[c] == 0) continue;
      auto w = ins;
      w.push_back({c, psi});
      s += t.unit[c] * t.lookup(g, w, {});
    }
    return s;
  };

  std::string unitWitness;
  if (t.caps.nMax >= 3)
    for (int a = 0; a < t.dim && unitWitness.empty(); ++a)
      for (int b = 0; b < t.dim && unitWitness.empty(); ++b)
        if (withUnit(0, {{a, 0}, {b, 0}}, 0) != t.pairing(a, b))
          unitWitness = "witness (" + std::to_string(a) + "," + std::to_string(b) + ")";
  rep.add("unit pairing", unitWitness.empty(), unitWitness);

  std::string stringWitness, dilatonWitness;
  for (int g = 0; g <= t.caps.gMax; ++g)
    for (int n = 0; n + 1 <= t.caps.nMax; ++n) {
      if (!is_stable(g, n)) continue;
      const int dim = 3 * g - 3 + n;
      if (dim + 1 <= t.caps.degreeMax && stringWitness.empty())
        for_each_insert_multiset(t.dim, n, dim + 1, [&](const std::vector<XInsert>& ins) {
          if (!stringWitness.empty()) return;
          Scalar rhs = 0;
          for (std::size_t j = 0; j < ins.size(); ++j) {
            if (ins[j].second == 0) continue;
            auto low = ins;
            --low[j].second;
            rhs += t.lookup(g, low, {});
          }
          if (withUnit(g, ins, 0) != rhs) stringWitness = "witness " + XCorrelatorTable::key_string({g, ins, {}});
        });
      if (dim + 1 <= t.caps.degreeMax && dilatonWitness.empty())
        for_each_insert_multiset(t.dim, n, dim, [&](const std::vector<XInsert>& ins) {
          if (!dilatonWitness.empty()) return;
          if (withUnit(g, ins, 1) != (2 * g - 2 + n) * t.lookup(g, ins, {}))
            dilatonWitness = "witness " + XCorrelatorTable::key_string({g, ins, {}});
        });
    }
  rep.add("string equation", stringWitness.empty(), stringWitness);
  rep.add("dilaton equation", dilatonWitness.empty(), dilatonWitness);
  return rep;
}

Scalar x_contraction(const XCorrelatorTable& table, const StableGraph& gr, const XDecorations& dec) {
  const int nh = gr.half_edge_count(), nv = gr.vertex_count(), dim = table.dim;
  if (static_cast<int>(dec.halfEdgePsi.size()) != nh || static_cast<int>(dec.vertexKappa.size()) != nv ||
      static_cast<int>(dec.legVectors.size()) != gr.leg_count())
    throw DimensionMismatch("x_contraction decorations");
  const auto etaInv = inverse(table.pairing);
  if (!etaInv) throw Error("degenerate X pairing");

  // Each vertex becomes a tensor over its edge half-edges (legs summed against their vectors);
  // vertices are then merged one at a time, contracting every edge whose ends are both placed.
  using Tensor = std::map<std::vector<int>, Scalar>;  // indices follow `open`
  std::vector<int> open;
  Tensor state{{{}, Scalar(1)}};
  std::vector<char> placed(nv, 0);
  for (int v = 0; v < nv; ++v) {
    const auto hs = gr.half_edges_at(v);
    std::vector<int> edgeHalves;
    for (int h : hs)
      if (!gr.is_leg(h)) edgeHalves.push_back(h);
    Tensor local;
    std::vector<int> idx(hs.size(), 0);
    while (true) {
      Scalar w = 1;
      for (std::size_t p = 0; p < hs.size() && w != 0; ++p)
        if (gr.is_leg(hs[p])) w *= dec.legVectors.at(gr.legMarking[hs[p]] - 1).at(idx[p]);
      if (w != 0) {
        std::vector<XInsert> ins;
        for (std::size_t p = 0; p < hs.size(); ++p) ins.push_back({idx[p], dec.halfEdgePsi[hs[p]]});
        Scalar s = 0;
        for (const auto& [mono, coef] : dec.vertexKappa[v])
          if (coef != 0) s += coef * table.lookup(gr.vertexGenus[v], ins, mono);
        if (s != 0) {
          std::vector<int> key;
          for (std::size_t p = 0; p < hs.size(); ++p)
            if (!gr.is_leg(hs[p])) key.push_back(idx[p]);
          local[key] += w * s;
        }
      }
      std::size_t p = 0;
      while (p < idx.size() && ++idx[p] == dim) idx[p++] = 0;
      if (p == idx.size()) break;
    }
    placed[v] = 1;
    // Merge: new open list = old open + this vertex's edge halves, then contract closed edges.
    std::vector<int> merged = open;
    merged.insert(merged.end(), edgeHalves.begin(), edgeHalves.end());
    std::vector<int> pos(nh, -1);
    for (std::size_t i = 0; i < merged.size(); ++i) pos[merged[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> closing;  // positions in `merged`
    std::vector<int> keep;
    for (int h : merged) {
      const int o = gr.involution[h];
      if (pos[o] >= 0) {
        if (h < o) closing.emplace_back(pos[h], pos[o]);
      } else {
        keep.push_back(pos[h]);
      }
    }
    Tensor next;
    for (const auto& [ka, va] : state)
      for (const auto& [kb, vb] : local) {
        std::vector<int> full = ka;
        full.insert(full.end(), kb.begin(), kb.end());
        Scalar w = va * vb;
        for (const auto& [p1, p2] : closing) {
          w *= (*etaInv)(full[p1], full[p2]);
          if (w == 0) break;
        }
        if (w == 0) continue;
        std::vector<int> key;
        for (int p : keep) key.push_back(full[p]);
        next[key] += w;
      }
    std::vector<int> newOpen;
    for (int p : keep) newOpen.push_back(merged[p]);
    open = std::move(newOpen);
    state = std::move(next);
  }
  Scalar total = 0;
  for (const auto& [k, v] : state) total += v;
  return total;
}

Vec tensor_vector(const Vec& x, const Vec& y) {
  Vec t(x.size() * y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) t[i * y.size() + j] = x[i] * y[j];
  return t;
}

Scalar product_correlator(const ProductSpec& spec, const RactionOptions& options) {
  if (!spec.xTable) throw Error("product spec without X table");
  const XCorrelatorTable& X = *spec.xTable;
  const int g = spec.genus;
  const int n = static_cast<int>(spec.inserts.size());
  require_stable(g, n);
  const int dimX = X.dim, dimY = static_cast<int>(spec.yDec.unit.size());
  if (spec.yR.dim() != dimY) throw DimensionMismatch("R-matrix vs Y target");
  int external = 0;
  for (const auto& ins : spec.inserts) {
    if (static_cast<int>(ins.vector.size()) != dimX * dimY) throw DimensionMismatch("product insert vector");
    if (ins.psi < 0) throw Error("negative psi power");
    external += ins.psi;
  }
  const int free = 3 * g - 3 + n - external;
  if (free < 0) return 0;
  if (spec.yR.order() < free)
    throw CapExceeded("R-matrix order " + std::to_string(spec.yR.order()) + " < " + std::to_string(free));

  const detail::SectorData sec = detail::sectors(spec.yDec);
  const int rank = sec.rank;
  const auto inv = invert(spec.yR);
  const auto T = translation(spec.yR, spec.yDec.unit);
  const auto E = edge_series(spec.yR, spec.yDec.pairing);
  std::vector<std::vector<Matrix>> Es(E.coef.size());
  for (std::size_t k = 0; k < E.coef.size(); ++k)
    for (const auto& m : E.coef[k]) Es[k].push_back(sec.coord * m * sec.coord.transpose());
  std::vector<Vec> tCoord;
  for (const auto& t : T.coeffs) tCoord.push_back(sec.coord * t);

  // legCoord[j][s][i][x] = coord_i(R^{-1}_s applied to the Y slice of insert j at X index x)
  std::vector<std::vector<std::vector<Vec>>> legCoord(n);
  for (int j = 0; j < n; ++j) {
    legCoord[j].assign(free + 1, std::vector<Vec>(rank, Vec(dimX)));
    for (int x = 0; x < dimX; ++x) {
      Vec slice(spec.inserts[j].vector.begin() + x * dimY, spec.inserts[j].vector.begin() + (x + 1) * dimY);
      if (is_zero(slice)) continue;
      for (int s = 0; s <= free; ++s) {
        const Vec c = sec.coord * (inv[s] * slice);
        for (int i = 0; i < rank; ++i) legCoord[j][s][i][x] = c[i];
      }
    }
  }

  // Per vertex (g, sorted psi) and sector: Delta^{1-g} sum_C w(C) prod T_c * pushforward(C).
  std::map<std::pair<int, std::vector<int>>, std::vector<KappaPoly>> vertexCache;
  auto vertexKappa = [&](int gv, std::vector<int> a) -> const std::vector<KappaPoly>& {
    std::sort(a.begin(), a.end());
    auto key = std::make_pair(gv, a);
    if (auto it = vertexCache.find(key); it != vertexCache.end()) return it->second;
    int used = 0;
    for (int x : a) used += x;
    const int rest = 3 * gv - 3 + static_cast<int>(a.size()) - used;
    std::vector<KappaPoly> polys(rank);
    detail::for_each_translation_multiset(rest, options.maxTranslationLegs, [&](const std::vector<int>& c, const Scalar& w) {
      const KappaPoly push = kappa_pushforward(c);
      for (int i = 0; i < rank; ++i) {
        Scalar p = w * power(sec.norms[i], 1 - gv);
        for (int x : c) p *= tCoord.at(x)[i];
        if (p == 0) continue;
        for (const auto& [mono, coef] : push) polys[i][mono] += p * coef;
      }
    });
    return vertexCache.emplace(std::move(key), std::move(polys)).first->second;
  };

  Scalar total = 0;
  for (const auto& gr : enumerate(g, n, options.graphCaps).graphs) {
    const int nv = gr.vertex_count(), nh = gr.half_edge_count();
    std::vector<int> ext(nh, 0), legIndex(nh, -1);
    for (int h = 0; h < nh; ++h)
      if (gr.is_leg(h)) {
        legIndex[h] = gr.legMarking[h] - 1;
        ext[h] = spec.inserts[legIndex[h]].psi;
      }
    const auto edges = gr.edges();
    Scalar graphSum = 0;
    detail::for_each_series_assignment(gr, ext, [&](const std::vector<int>& series) {
      XDecorations deco;
      deco.halfEdgePsi.resize(nh);
      for (int h = 0; h < nh; ++h) deco.halfEdgePsi[h] = series[h] + ext[h];
      std::vector<const std::vector<KappaPoly>*> vk(nv);
      for (int v = 0; v < nv; ++v) {
        std::vector<int> a;
        for (int h : gr.half_edges_at(v)) a.push_back(deco.halfEdgePsi[h]);
        vk[v] = &vertexKappa(gr.vertexGenus[v], a);
      }
      deco.vertexKappa.resize(nv);
      deco.legVectors.assign(n, Vec());
      std::vector<int> label(nv, 0);
      while (true) {
        Scalar edgeFactor = 1;
        for (std::size_t e = 0; e < edges.size() && edgeFactor != 0; ++e) {
          const auto [h1, h2] = edges[e];
          edgeFactor *= Es[series[h1]][series[h2]](label[gr.halfEdgeVertex[h1]], label[gr.halfEdgeVertex[h2]]);
        }
        bool live = edgeFactor != 0;
        for (int v = 0; v < nv && live; ++v) {
          deco.vertexKappa[v] = (*vk[v])[label[v]];
          live = !deco.vertexKappa[v].empty();
        }
        for (int h = 0; h < nh && live; ++h)
          if (legIndex[h] >= 0) {
            deco.legVectors[legIndex[h]] = legCoord[legIndex[h]][series[h]][label[gr.halfEdgeVertex[h]]];
            live = !is_zero(deco.legVectors[legIndex[h]]);
          }
        if (live) graphSum += edgeFactor * x_contraction(X, gr, deco);
        int p = 0;
        while (p < nv && ++label[p] == rank) label[p++] = 0;
        if (p == nv) break;
      }
    });
    const int aut = automorphism_order(gr);
    graphSum /= aut;
    if (options.trace) options.trace->push_back({canonical_form(gr), aut, graphSum});
    total += graphSum;
  }
  return total;
}

}  // namespace cohft
