#include "cohft/stable_graphs.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace cohft {

std::vector<std::pair<int, int>> StableGraph::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int h = 0; h < half_edge_count(); ++h)
    if (involution[h] > h) e.emplace_back(h, involution[h]);
  return e;
}

std::vector<int> StableGraph::legs() const {
  std::vector<int> l;
  for (int h = 0; h < half_edge_count(); ++h)
    if (is_leg(h)) l.push_back(h);
  std::sort(l.begin(), l.end(), [&](int a, int b) { return legMarking[a] < legMarking[b]; });
  return l;
}

std::vector<int> StableGraph::half_edges_at(int v) const {
  std::vector<int> hs;
  for (int h = 0; h < half_edge_count(); ++h)
    if (halfEdgeVertex[h] == v) hs.push_back(h);
  return hs;
}

int StableGraph::valence(int v) const {
  return static_cast<int>(std::count(halfEdgeVertex.begin(), halfEdgeVertex.end(), v));
}

int StableGraph::genus() const {
  const int e = static_cast<int>(edges().size());
  return std::accumulate(vertexGenus.begin(), vertexGenus.end(), 0) + e - vertex_count() + 1;
}

int StableGraph::leg_count() const {
  int n = 0;
  for (int h = 0; h < half_edge_count(); ++h) n += is_leg(h);
  return n;
}

StableGraph StableGraph::trivial(int g, int n) {
  StableGraph s;
  s.vertexGenus = {g};
  for (int i = 0; i < n; ++i) {
    s.halfEdgeVertex.push_back(0);
    s.involution.push_back(i);
    s.legMarking.push_back(i + 1);
  }
  return s;
}

namespace {

struct CanonicalResult {
  std::string form;
  int vertexSymmetries = 0;
};

CanonicalResult canonicalize(const StableGraph& gr) {
  const int nv = gr.vertex_count();
  using Key = std::tuple<int, int, std::vector<int>, int>;
  std::vector<Key> keys(nv);
  for (int v = 0; v < nv; ++v) {
    std::vector<int> marks;
    int loops = 0;
    for (int h : gr.half_edges_at(v)) {
      if (gr.is_leg(h)) marks.push_back(gr.legMarking[h]);
      else if (gr.halfEdgeVertex[gr.involution[h]] == v) ++loops;
    }
    std::sort(marks.begin(), marks.end());
    keys[v] = Key{gr.vertexGenus[v], gr.valence(v), marks, loops / 2};
  }
  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  // Blocks of vertices sharing a refinement key; only these may be permuted.
  std::vector<std::pair<int, int>> blocks;
  for (int i = 0; i < nv;) {
    int j = i;
    while (j < nv && keys[order[j]] == keys[order[i]]) ++j;
    blocks.emplace_back(i, j);
    i = j;
  }
  const auto edges = gr.edges();
  const auto legs = gr.legs();

  auto encode = [&](const std::vector<int>& ord) {
    std::vector<int> pos(nv);
    for (int i = 0; i < nv; ++i) pos[ord[i]] = i;
    std::ostringstream os;
    os << "g";
    for (int i = 0; i < nv; ++i) os << (i ? "," : ":") << gr.vertexGenus[ord[i]];
    os << "|l";
    for (std::size_t i = 0; i < legs.size(); ++i) os << (i ? "," : ":") << pos[gr.halfEdgeVertex[legs[i]]];
    std::vector<std::pair<int, int>> ep;
    for (const auto& [a, b] : edges) {
      int x = pos[gr.halfEdgeVertex[a]], y = pos[gr.halfEdgeVertex[b]];
      if (x > y) std::swap(x, y);
      ep.emplace_back(x, y);
    }
    std::sort(ep.begin(), ep.end());
    os << "|e";
    for (std::size_t i = 0; i < ep.size(); ++i) os << (i ? "," : ":") << ep[i].first << "-" << ep[i].second;
    return os.str();
  };

  CanonicalResult best;
  std::vector<int> cur = order;
  // Odometer over permutations inside each block.
  std::function<void(std::size_t)> walk = [&](std::size_t b) {
    if (b == blocks.size()) {
      std::string f = encode(cur);
      if (best.vertexSymmetries == 0 || f < best.form) {
        best.form = std::move(f);
        best.vertexSymmetries = 1;
      } else if (f == best.form) {
        ++best.vertexSymmetries;
      }
      return;
    }
    auto first = cur.begin() + blocks[b].first, last = cur.begin() + blocks[b].second;
    std::sort(first, last);
    do {
      walk(b + 1);
    } while (std::next_permutation(first, last));
  };
  walk(0);
  return best;
}

StableGraph add_self_loop(const StableGraph& g, int v) {
  StableGraph r = g;
  const int h = r.half_edge_count();
  r.vertexGenus[v] -= 1;
  r.halfEdgeVertex.insert(r.halfEdgeVertex.end(), {v, v});
  r.involution.insert(r.involution.end(), {h + 1, h});
  r.legMarking.insert(r.legMarking.end(), {0, 0});
  return r;
}

StableGraph split_vertex(const StableGraph& g, int v, const std::vector<int>& moved, int g1, int g2) {
  StableGraph r = g;
  const int w = r.vertex_count();
  r.vertexGenus[v] = g1;
  r.vertexGenus.push_back(g2);
  for (int h : moved) r.halfEdgeVertex[h] = w;
  const int h = r.half_edge_count();
  r.halfEdgeVertex.insert(r.halfEdgeVertex.end(), {v, w});
  r.involution.insert(r.involution.end(), {h + 1, h});
  r.legMarking.insert(r.legMarking.end(), {0, 0});
  return r;
}

}  // namespace

std::string canonical_form(const StableGraph& graph) { return canonicalize(graph).form; }

int automorphism_order(const StableGraph& graph) {
  int order = canonicalize(graph).vertexSymmetries;
  std::map<std::pair<int, int>, int> mult;
  for (const auto& [a, b] : graph.edges()) {
    int x = graph.halfEdgeVertex[a], y = graph.halfEdgeVertex[b];
    if (x > y) std::swap(x, y);
    ++mult[{x, y}];
  }
  for (const auto& [vv, m] : mult) {
    for (int i = 2; i <= m; ++i) order *= i;
    if (vv.first == vv.second) order <<= m;  // flip each self-edge
  }
  return order;
}

ValidationReport validate(const StableGraph& gr) {
  ValidationReport rep;
  const int nh = gr.half_edge_count(), nv = gr.vertex_count();
  bool shape = static_cast<int>(gr.involution.size()) == nh && static_cast<int>(gr.legMarking.size()) == nh && nv > 0;
  for (int h = 0; shape && h < nh; ++h)
    if (gr.halfEdgeVertex[h] < 0 || gr.halfEdgeVertex[h] >= nv || gr.involution[h] < 0 || gr.involution[h] >= nh)
      shape = false;
  rep.add("shape", shape);
  if (!shape) return rep;

  bool invol = true;
  for (int h = 0; h < nh; ++h)
    if (gr.involution[gr.involution[h]] != h) invol = false;
  rep.add("involution", invol);

  std::vector<int> marks;
  bool legsOk = true;
  for (int h = 0; h < nh; ++h) {
    if (gr.is_leg(h)) marks.push_back(gr.legMarking[h]);
    else if (gr.legMarking[h] != 0) legsOk = false;
  }
  std::sort(marks.begin(), marks.end());
  for (std::size_t i = 0; i < marks.size(); ++i)
    if (marks[i] != static_cast<int>(i) + 1) legsOk = false;
  rep.add("legs are fixed points with markings 1..n", legsOk);

  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& [a, b] : gr.edges()) parent[find(gr.halfEdgeVertex[a])] = find(gr.halfEdgeVertex[b]);
  int components = 0;
  for (int v = 0; v < nv; ++v) components += find(v) == v;
  rep.add("connected", components == 1, components == 1 ? "" : std::to_string(components) + " components");

  std::string unstable;
  for (int v = 0; v < nv; ++v)
    if (!is_stable(gr.vertexGenus[v], gr.valence(v))) unstable += (unstable.empty() ? "vertex " : ",") + std::to_string(v);
  rep.add("stable vertices", unstable.empty(), unstable);
  rep.add("genus", true, std::to_string(gr.genus()));
  return rep;
}

const GraphSet& enumerate(int g, int n, const GraphCaps& caps) {
  require_stable(g, n);
  if (g > caps.gMax || n > caps.nMax)
    throw CapExceeded("graph enumeration (g=" + std::to_string(g) + ", n=" + std::to_string(n) + ")");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, GraphSet> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find({g, n}); it != cache.end()) return it->second;

  // Every stable graph is reached from the trivial one by repeated one-edge
  // degenerations: a self-node at a positive-genus vertex or a vertex split.
  std::map<std::string, StableGraph> found;
  std::vector<StableGraph> frontier{StableGraph::trivial(g, n)};
  found.emplace(canonical_form(frontier[0]), frontier[0]);
  while (!frontier.empty()) {
    std::vector<StableGraph> next;
    auto offer = [&](StableGraph cand) {
      std::string f = canonical_form(cand);
      if (found.emplace(f, cand).second) next.push_back(std::move(cand));
    };
    for (const auto& gr : frontier) {
      for (int v = 0; v < gr.vertex_count(); ++v) {
        const int gv = gr.vertexGenus[v];
        if (gv >= 1) offer(add_self_loop(gr, v));
        const auto hs = gr.half_edges_at(v);
        const int k = static_cast<int>(hs.size());
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
          std::vector<int> moved;
          for (int i = 0; i < k; ++i)
            if (mask & (1u << i)) moved.push_back(hs[i]);
          const int na = k - static_cast<int>(moved.size()) + 1, nb = static_cast<int>(moved.size()) + 1;
          for (int g1 = 0; g1 <= gv; ++g1) {
            const int g2 = gv - g1;
            if (is_stable(g1, na) && is_stable(g2, nb)) offer(split_vertex(gr, v, moved, g1, g2));
          }
        }
      }
    }
    frontier = std::move(next);
  }
  GraphSet set;
  set.genus = g;
  set.nLegs = n;
  std::vector<std::pair<std::pair<std::size_t, std::string>, StableGraph>> sorted;
  for (auto& [f, gr] : found) sorted.push_back({{gr.edges().size(), f}, gr});
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [key, gr] : sorted) {
    set.canonicalForms.push_back(key.second);
    set.graphs.push_back(std::move(gr));
  }
  return cache.emplace(std::pair{g, n}, std::move(set)).first->second;
}

}  // namespace cohft
