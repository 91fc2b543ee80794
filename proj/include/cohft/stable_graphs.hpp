#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cohft/report.hpp"
#include "cohft/scalar.hpp"

namespace cohft {

/// Dual graph of a stable nodal curve. Half-edges are 0..H-1; vertices 0..V-1.
struct StableGraph {
  std::vector<int> vertexGenus;
  std::vector<int> halfEdgeVertex;  // vertex of each half-edge
  std::vector<int> involution;      // iota; fixed points are legs
  std::vector<int> legMarking;      // marking 1..n for legs, 0 for edge halves

  int vertex_count() const { return static_cast<int>(vertexGenus.size()); }
  int half_edge_count() const { return static_cast<int>(halfEdgeVertex.size()); }
  bool is_leg(int h) const { return involution[h] == h; }

  /// Edges as ordered half-edge pairs (h, iota(h)) with h < iota(h).
  std::vector<std::pair<int, int>> edges() const;
  /// Leg half-edges ordered by marking.
  std::vector<int> legs() const;
  /// Half-edges incident to v, increasing.
  std::vector<int> half_edges_at(int v) const;
  int valence(int v) const;
  int genus() const;
  int leg_count() const;

  /// Single vertex of genus g carrying legs 1..n.
  static StableGraph trivial(int g, int n);
};

/// Isomorphism-invariant encoding (vertex genus, leg placement, edge multiset).
std::string canonical_form(const StableGraph& graph);

int automorphism_order(const StableGraph& graph);

ValidationReport validate(const StableGraph& graph);

struct GraphSet {
  int genus = 0;
  int nLegs = 0;
  std::vector<StableGraph> graphs;
  std::vector<std::string> canonicalForms;
};

struct GraphCaps {
  int gMax = 2;
  int nMax = 8;
};

/// All stable graphs of genus g with n legs, duplicate-free, ordered by
/// (edge count, canonical form). Results are memoized per process.
const GraphSet& enumerate(int g, int n, const GraphCaps& caps = {});

}  // namespace cohft
