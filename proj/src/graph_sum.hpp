#pragma once

// Shared bookkeeping for the stable-graph sums of raction and product.

#include <functional>
#include <map>
#include <vector>

#include "cohft/frobenius.hpp"
#include "cohft/intersect.hpp"
#include "cohft/stable_graphs.hpp"

namespace cohft::detail {

/// Assigns a series index to every half-edge: s for legs, (k, l) across edges, so that
/// each vertex keeps series + external psi degree within 3g(v) - 3 + n(v).
/// `external[h]` is the external psi power on leg h (0 on edge halves).
inline void for_each_series_assignment(const StableGraph& gr, const std::vector<int>& external,
                                       const std::function<void(const std::vector<int>&)>& f) {
  const int nh = gr.half_edge_count();
  std::vector<int> budget(gr.vertex_count());
  for (int v = 0; v < gr.vertex_count(); ++v) budget[v] = 3 * gr.vertexGenus[v] - 3 + gr.valence(v);
  for (int h = 0; h < nh; ++h) budget[gr.halfEdgeVertex[h]] -= external[h];
  for (int b : budget)
    if (b < 0) return;
  std::vector<int> order;  // legs, then the lower half of each edge
  for (int h = 0; h < nh; ++h)
    if (gr.is_leg(h) || gr.involution[h] > h) order.push_back(h);
  std::vector<int> series(nh, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == order.size()) return f(series);
    const int h = order[i];
    const int u = gr.halfEdgeVertex[h];
    if (gr.is_leg(h)) {
      for (int s = 0; s <= budget[u]; ++s) {
        series[h] = s;
        budget[u] -= s;
        rec(i + 1);
        budget[u] += s;
      }
      series[h] = 0;
      return;
    }
    const int h2 = gr.involution[h];
    const int w = gr.halfEdgeVertex[h2];
    for (int k = 0; k <= budget[u]; ++k) {
      budget[u] -= k;
      for (int l = 0; l <= budget[w]; ++l) {
        series[h] = k;
        series[h2] = l;
        budget[w] -= l;
        rec(i + 1);
        budget[w] += l;
      }
      budget[u] += k;
    }
    series[h] = series[h2] = 0;
  };
  rec(0);
}

/// Multisets of translation powers c_j >= 2 with sum (c_j - 1) = r, each with weight 1 / prod mult!.
/// Parts are listed in nondecreasing order.
inline void for_each_translation_multiset(int r, int maxParts,
                                          const std::function<void(const std::vector<int>&, const Scalar&)>& f) {
  std::vector<int> parts;
  std::function<void(int, int)> rec = [&](int left, int minPart) {
    if (left == 0) {
      Scalar w = 1;
      for (std::size_t i = 0, j; i < parts.size(); i = j) {
        j = i;
        while (j < parts.size() && parts[j] == parts[i]) ++j;
        w /= factorial(static_cast<int>(j - i));
      }
      std::vector<int> c(parts);
      for (int& x : c) x += 1;
      f(c, w);
      return;
    }
    if (static_cast<int>(parts.size()) == maxParts) throw CapExceeded("translation legs per vertex");
    for (int p = minPart; p <= left; ++p) {
      parts.push_back(p);
      rec(left - p, p);
      parts.pop_back();
    }
  };
  rec(r, 1);
}

struct SectorData {
  int rank = 0;
  Matrix coord;  // coord(i, a) = coordinate of e_a along idempotent i
  Vec norms;
};

inline SectorData sectors(const IdempotentDecomposition& dec) {
  SectorData s;
  s.rank = dec.rank();
  const int dim = static_cast<int>(dec.unit.size());
  s.coord = Matrix(s.rank, dim);
  for (int a = 0; a < dim; ++a) {
    Vec e(dim);
    e[a] = 1;
    const Vec c = dec.coordinates(e);
    for (int i = 0; i < s.rank; ++i) s.coord(i, a) = c[i];
  }
  s.norms = dec.norms;
  return s;
}

/// Sum over sector labels i_v of prod_v vertex[v][i_v] * prod_e edge[e](i_{v(h)}, i_{v(iota h)}),
/// eliminating vertices one at a time and keeping only labels of vertices with unplaced neighbours.
inline Scalar contract_sectors(const StableGraph& gr, const std::vector<Vec>& vertex,
                               const std::vector<const Matrix*>& edgeMatrix) {
  const int nv = gr.vertex_count();
  const int rank = static_cast<int>(vertex.at(0).size());
  const auto edges = gr.edges();
  std::vector<std::vector<int>> incident(nv);  // edge ids
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int a = gr.halfEdgeVertex[edges[e].first], b = gr.halfEdgeVertex[edges[e].second];
    incident[a].push_back(static_cast<int>(e));
    if (b != a) incident[b].push_back(static_cast<int>(e));
  }
  std::vector<int> frontier;  // placed vertices still carrying a label
  std::vector<char> placed(nv, 0);
  std::map<std::vector<int>, Scalar> state{{{}, Scalar(1)}};
  for (int v = 0; v < nv; ++v) {
    placed[v] = 1;
    std::vector<int> pos(nv, -1);
    for (std::size_t i = 0; i < frontier.size(); ++i) pos[frontier[i]] = static_cast<int>(i);
    std::vector<int> merged = frontier;
    merged.push_back(v);
    std::vector<char> stays(merged.size(), 0);
    for (std::size_t i = 0; i < merged.size(); ++i)
      for (int e : incident[merged[i]]) {
        const int a = gr.halfEdgeVertex[edges[e].first], b = gr.halfEdgeVertex[edges[e].second];
        if (!placed[a] || !placed[b]) stays[i] = 1;
      }
    std::map<std::vector<int>, Scalar> next;
    for (const auto& [labels, value] : state)
      for (int i = 0; i < rank; ++i) {
        Scalar w = value * vertex[v][i];
        if (w == 0) continue;
        for (int e : incident[v]) {
          const int a = gr.halfEdgeVertex[edges[e].first], b = gr.halfEdgeVertex[edges[e].second];
          if (!placed[a] || !placed[b]) continue;
          const int la = a == v ? i : labels[pos[a]];
          const int lb = b == v ? i : labels[pos[b]];
          w *= (*edgeMatrix[e])(la, lb);
          if (w == 0) break;
        }
        if (w == 0) continue;
        std::vector<int> key;
        for (std::size_t k = 0; k < merged.size(); ++k)
          if (stays[k]) key.push_back(k < frontier.size() ? labels[k] : i);
        next[key] += w;
      }
    std::vector<int> nf;
    for (std::size_t k = 0; k < merged.size(); ++k)
      if (stays[k]) nf.push_back(merged[k]);
    frontier = std::move(nf);
    state = std::move(next);
    if (state.empty()) return 0;
  }
  Scalar total = 0;
  for (const auto& [k, x] : state) total += x;
  return total;
}

}  // namespace cohft::detail
