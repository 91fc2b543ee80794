#include "doctest.h"

#include <random>

#include "cohft/product.hpp"

using namespace cohft;

namespace {

Vec basis(int dim, int a) {
  Vec v(dim);
  v[a] = 1;
  return v;
}

KappaPoly plain(std::vector<int> mono = {}) { return KappaPoly{{std::move(mono), Scalar(1)}}; }

/// Degree-zero class table of a TFT: every entry is the TFT value, whatever the psi/kappa degree.
XCorrelatorTable class_table(const FrobeniusData& d) {
  auto dec = idempotent_basis(d);
  XCorrelatorTable::Caps caps;
  caps.nMax = 12;
  return XCorrelatorTable::from_generator("tft classes", d.pairing, d.unit, caps,
                                          [dec, dim = d.dim](int g, const std::vector<XInsert>& ins, const std::vector<int>&) -> Scalar {
                                            std::vector<Vec> vs;
                                            for (const auto& p : ins) vs.push_back(basis(dim, p.first));
                                            return tft_correlator(dec, g, vs);
                                          });
}

StableGraph one_edge_tree(const std::vector<int>& left, const std::vector<int>& right) {
  StableGraph s;
  s.vertexGenus = {0, 0};
  for (int m : left) s.halfEdgeVertex.push_back(0), s.legMarking.push_back(m);
  for (int m : right) s.halfEdgeVertex.push_back(1), s.legMarking.push_back(m);
  const int h = static_cast<int>(s.halfEdgeVertex.size());
  for (int i = 0; i < h; ++i) s.involution.push_back(i);
  s.halfEdgeVertex.insert(s.halfEdgeVertex.end(), {0, 1});
  s.involution.insert(s.involution.end(), {h + 1, h});
  s.legMarking.insert(s.legMarking.end(), {0, 0});
  return s;
}

XDecorations flat(const StableGraph& gr, std::vector<Vec> legs) {
  XDecorations d;
  d.halfEdgePsi.assign(gr.half_edge_count(), 0);
  d.vertexKappa.assign(gr.vertex_count(), plain());
  d.legVectors = std::move(legs);
  return d;
}

}  // namespace

TEST_CASE("built-in tables validate") {
  XCorrelatorTable::Caps small{2, 4, 8};
  CHECK(validate_table(XCorrelatorTable::point(small)).ok());
  CHECK(validate_table(XCorrelatorTable::npoints(2, {3, Scalar(1, 2)}, small)).ok());
  CHECK(validate_table(XCorrelatorTable::tft(FrobeniusData::p1_q1(), small)).ok());
}

TEST_CASE("user tables: sparse lookup, caps and validation") {
  XCorrelatorTable t;
  t.label = "point by hand";
  t.dim = 1;
  t.pairing = Matrix::identity(1);
  t.unit = Vec{1};
  t.caps = {1, 3, 2};
  t.set(0, {{0, 0}, {0, 0}, {0, 0}}, {}, 1);
  t.set(1, {{0, 1}}, {}, Scalar(1, 24));
  t.set(1, {{0, 0}}, {1}, Scalar(1, 24));
  t.set(1, {{0, 1}, {0, 0}}, {}, Scalar(1, 24));
  t.set(1, {{0, 1}, {0, 1}}, {}, Scalar(1, 24));
  t.set(1, {{0, 2}, {0, 0}}, {}, Scalar(1, 24));
  t.set(1, {{0, 1}, {0, 0}, {0, 0}}, {}, Scalar(1, 12));
  t.set(1, {{0, 2}, {0, 0}, {0, 0}}, {}, Scalar(1, 12));
  t.set(1, {{0, 0}, {0, 0}, {0, 0}}, {}, 0);
  CHECK(t.lookup(0, {{0, 0}, {0, 0}, {0, 0}}, {}) == 1);
  CHECK(t.lookup(0, {{0, 1}, {0, 0}, {0, 0}}, {}) == 0);
  CHECK_THROWS_AS(t.lookup(2, {{0, 4}}, {}), MissingTableEntry);
  try {
    t.lookup(1, {{0, 3}}, {});
    FAIL("expected MissingTableEntry");
  } catch (const MissingTableEntry& e) {
    CHECK(std::string(e.what()).find("{g:1, inserts:[[0,3]], kappa:[]}") != std::string::npos);
  }
  CHECK(validate_table(t).ok());

  auto broken = t;
  broken.set(1, {{0, 1}}, {}, Scalar(1, 25));
  CHECK_FALSE(validate_table(broken).find("symmetric")->passed);

  auto noString = t;
  noString.set(1, {{0, 1}, {0, 0}, {0, 0}}, {}, Scalar(1, 13));
  XCorrelatorTable fresh = t;
  CHECK(validate_table(fresh).ok());
  XCorrelatorTable wrongDilaton;
  wrongDilaton = t;
  // rebuild with a bad dilaton value
  XCorrelatorTable bad;
  bad.label = "bad";
  bad.dim = 1;
  bad.pairing = Matrix::identity(1);
  bad.unit = Vec{1};
  bad.caps = {1, 3, 2};
  for (const auto& [key, value] : t.entries()) {
    const auto& [g, ins, kappa] = key;
    Scalar v = value;
    if (g == 1 && ins == std::vector<XInsert>{{0, 1}, {0, 1}}) v = Scalar(1, 12);
    bad.set(g, ins, kappa, v);
  }
  CHECK_FALSE(validate_table(bad).find("dilaton equation")->passed);
}

TEST_CASE("x_contraction with X = point is a product of vertex integrals") {
  const auto X = XCorrelatorTable::point();
  const auto& g04 = enumerate(0, 4).graphs;
  for (const auto& gr : g04) {
    const auto d = flat(gr, std::vector<Vec>(4, Vec{1}));
    CHECK(x_contraction(X, gr, d) == (gr.vertex_count() == 1 ? 0 : 1));
  }
  auto d = flat(g04[0], std::vector<Vec>(4, Vec{2}));
  d.vertexKappa[0] = plain({1});
  CHECK(x_contraction(X, g04[0], d) == 16);
  // Self-edge on a genus-0 vertex under the genus-1 one-leg type: <tau_0^3>_0 = 1.
  const auto& g11 = enumerate(1, 1).graphs;
  CHECK(x_contraction(X, g11[1], flat(g11[1], {Vec{1}})) == 1);
}

TEST_CASE("single-edge tree on N points collapses to a diagonal sum") {
  const std::vector<Scalar> norms{3, Scalar(1, 2)};
  const auto X = XCorrelatorTable::npoints(2, norms);
  const auto gr = one_edge_tree({1, 2}, {3, 4});
  for (int w = 0; w < 16; ++w) {
    std::vector<Vec> legs;
    std::vector<int> idx;
    for (int j = 0; j < 4; ++j) idx.push_back((w >> j) & 1), legs.push_back(basis(2, idx.back()));
    const bool same = idx[0] == idx[1] && idx[1] == idx[2] && idx[2] == idx[3];
    // sum_k eta^{kk} (Delta_k)(Delta_k) over the sector shared by all legs
    CHECK(x_contraction(X, gr, flat(gr, legs)) == (same ? norms[idx[0]] : Scalar(0)));
  }
}

TEST_CASE("associativity: the two 2+2 trees agree on a TFT") {
  const auto d = FrobeniusData::p1_q1();
  const auto X = class_table(d);
  const auto a = one_edge_tree({1, 2}, {3, 4}), b = one_edge_tree({1, 3}, {2, 4});
  for (int w = 0; w < 16; ++w) {
    std::vector<Vec> legs;
    for (int j = 0; j < 4; ++j) legs.push_back(basis(2, (w >> j) & 1));
    CHECK(x_contraction(X, a, flat(a, legs)) == x_contraction(X, b, flat(b, legs)));
  }
}

TEST_CASE("gluing consistency of TFT contractions on every graph") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (const auto& d : {FrobeniusData::p1_q1(), FrobeniusData::npoints(3, {1, -2, Scalar(1, 3)})}) {
    const auto X = class_table(d);
    const auto dec = idempotent_basis(d);
    for (int g = 0; g <= 2; ++g)
      for (int n = 0; n <= 4; ++n) {
        if (!is_stable(g, n)) continue;
        // Contraction is multilinear in the legs, so two generic integer words per type suffice.
        for (int t = 0; t < 2; ++t) {
          std::vector<Vec> legs;
          for (int j = 0; j < n; ++j) {
            Vec v(d.dim);
            for (auto& x : v) x = coef(rng);
            legs.push_back(v);
          }
          const Scalar expect = tft_correlator(dec, g, legs);
          for (const auto& gr : enumerate(g, n).graphs) {
            CAPTURE(canonical_form(gr));
            CHECK(x_contraction(X, gr, flat(gr, legs)) == expect);
          }
        }
      }
  }
}

TEST_CASE("product with X = point equals the R-action") {
  std::mt19937_64 rng(77);
  const auto X = XCorrelatorTable::point();
  for (const auto& yd : {FrobeniusData::p1_q1(), FrobeniusData::npoints(2, {2, Scalar(-1, 3)})}) {
    const auto dec = idempotent_basis(yd);
    const auto R = random_symplectic(yd.pairing, 5, rng);
    for (auto [g, n] : std::vector<std::pair<int, int>>{{0, 3}, {0, 4}, {1, 1}, {1, 2}, {2, 0}, {2, 1}}) {
      std::uniform_int_distribution<int> pick(0, yd.dim - 1);
      std::vector<Insert> yins;
      ProductSpec spec{&X, dec, R, g, {}};
      for (int j = 0; j < n; ++j) {
        Vec v = basis(yd.dim, pick(rng));
        const int psi = j == 0 ? 1 : 0;
        yins.push_back({v, psi});
        spec.inserts.push_back({tensor_vector(Vec{1}, v), psi});
      }
      CAPTURE(g);
      CAPTURE(n);
      CHECK(product_correlator(spec) == raction_correlator(dec, R, g, yins));
    }
  }
}

TEST_CASE("product with trivial rank-1 Y returns the X table") {
  const auto X = XCorrelatorTable::tft(FrobeniusData::p1_q1());
  const auto Y = idempotent_basis(FrobeniusData::point());
  for (auto [g, psis] : std::vector<std::pair<int, std::vector<int>>>{{0, {0, 0, 0}}, {0, {1, 0, 0, 0}}, {1, {1}}, {1, {0, 2}}, {2, {2, 2}}}) {
    for (int w = 0; w < (1 << psis.size()); ++w) {
      ProductSpec spec{&X, Y, RMatrix::identity(1, 6), g, {}};
      std::vector<XInsert> key;
      for (std::size_t j = 0; j < psis.size(); ++j) {
        const int x = (w >> j) & 1;
        spec.inserts.push_back({basis(2, x), psis[j]});
        key.push_back({x, psis[j]});
      }
      CHECK(product_correlator(spec) == X.lookup(g, key, {}));
    }
  }
}

TEST_CASE("two-sector instance: X = point, Y = 2 points, g = 1, (1 (x) e_1) psi -> 1/24") {
  const auto X = XCorrelatorTable::point();
  ProductSpec spec{&X, idempotent_basis(FrobeniusData::npoints(2)), RMatrix::identity(2, 2), 1,
                   {{tensor_vector(Vec{1}, basis(2, 1)), 1}}};
  CHECK(product_correlator(spec) == Scalar(1, 24));
}

TEST_CASE("factorization for R = Id over a TFT") {
  const auto xd = FrobeniusData::p1_q1();
  const auto X = XCorrelatorTable::tft(xd);
  const auto yd = FrobeniusData::npoints(2, {5, Scalar(-1, 2)});
  const auto dec = idempotent_basis(yd);
  for (auto [g, psis] : std::vector<std::pair<int, std::vector<int>>>{{0, {1, 0, 0, 0}}, {1, {0, 1}}, {2, {3, 1}}}) {
    const int n = static_cast<int>(psis.size());
    for (int w = 0; w < (1 << (2 * n)); ++w) {
      ProductSpec spec{&X, dec, RMatrix::identity(2, 6), g, {}};
      std::vector<XInsert> key;
      std::vector<int> ys;
      for (int j = 0; j < n; ++j) {
        const int x = (w >> (2 * j)) & 1, y = (w >> (2 * j + 1)) & 1;
        spec.inserts.push_back({tensor_vector(basis(2, x), basis(2, y)), psis[j]});
        key.push_back({x, psis[j]});
        ys.push_back(y);
      }
      Scalar expect = 0;
      for (int i = 0; i < 2; ++i) {
        Scalar c = power(dec.norms[i], 1 - g);
        for (int y : ys) c *= dec.coordinate(i, basis(2, y));
        expect += c;
      }
      expect *= X.lookup(g, key, {});
      CHECK(product_correlator(spec) == expect);
    }
  }
}

TEST_CASE("product: string, dilaton, symmetry and linearity with random R") {
  std::mt19937_64 rng(31);
  const auto X = XCorrelatorTable::tft(FrobeniusData::p1_q1());
  const auto yd = FrobeniusData::p1_q1();
  const auto dec = idempotent_basis(yd);
  const auto R = random_symplectic(yd.pairing, 5, rng);
  const Vec unit = tensor_vector(X.unit, yd.unit);
  auto corr = [&](int g, std::vector<ProductInsert> ins) {
    return product_correlator(ProductSpec{&X, dec, R, g, std::move(ins)});
  };
  const Vec a = tensor_vector(basis(2, 1), basis(2, 0)), b = tensor_vector(basis(2, 0), basis(2, 1));
  const Vec c = tensor_vector(Vec{1, 2}, Vec{-1, 3});
  // string on (1,2) -> (1,3)
  CHECK(corr(1, {{a, 2}, {b, 0}, {unit, 0}}) == corr(1, {{a, 1}, {b, 0}}));
  CHECK(corr(0, {{a, 1}, {b, 0}, {c, 0}, {unit, 0}}) == corr(0, {{a, 0}, {b, 0}, {c, 0}}));
  // dilaton on (1,1) -> (1,2)
  CHECK(corr(1, {{c, 1}, {unit, 1}}) == corr(1, {{c, 1}}));
  CHECK(corr(0, {{a, 0}, {b, 0}, {c, 0}, {unit, 1}}) == corr(0, {{a, 0}, {b, 0}, {c, 0}}));
  // symmetry
  CHECK(corr(0, {{a, 1}, {b, 0}, {c, 0}, {a, 0}}) == corr(0, {{c, 0}, {a, 0}, {b, 0}, {a, 1}}));
  // multilinearity
  CHECK(corr(1, {{add(scale(a, 3), c), 0}, {b, 1}}) == 3 * corr(1, {{a, 0}, {b, 1}}) + corr(1, {{c, 0}, {b, 1}}));
}
