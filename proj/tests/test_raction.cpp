#include "doctest.h"

#include <chrono>

#include "cohft/raction.hpp"

using namespace cohft;

namespace {

Matrix mat(int n, std::initializer_list<Scalar> xs) {
  Matrix m(n, n);
  int i = 0;
  for (const auto& x : xs) m(i / n, i % n) = x, ++i;
  return m;
}

RMatrix rank1_exp(const std::vector<Scalar>& logCoeffs, int order) {
  MatrixSeries a(order + 1, Matrix::zero(1));
  for (std::size_t k = 0; k < logCoeffs.size() && static_cast<int>(k) + 1 <= order; ++k) a[k + 1](0, 0) = logCoeffs[k];
  return RMatrix{series_exp(a, order)};
}

Vec basis(int dim, int a) {
  Vec v(dim);
  v[a] = 1;
  return v;
}

}  // namespace

TEST_CASE("series exp on rank 1 matches the scalar exponential") {
  const auto r = rank1_exp({Scalar(3)}, 5);
  for (int k = 0; k <= 5; ++k) CHECK(r[k](0, 0) == power(3, k) / factorial(k));
}

TEST_CASE("validate_symplectic") {
  const Matrix eta1 = Matrix::identity(1);
  CHECK(validate_symplectic(RMatrix::identity(2, 4), FrobeniusData::p1_q1().pairing).ok());
  // exp(r1 z + r3 z^3) truncated at K = 4: log odd.
  const auto odd = rank1_exp({Scalar(2), 0, Scalar(-1, 3)}, 4);
  CHECK(validate_symplectic(odd, eta1).ok());
  const auto even = rank1_exp({0, Scalar(1)}, 4);
  const auto rep = validate_symplectic(even, eta1);
  CHECK_FALSE(rep.ok());
  CHECK_FALSE(rep.find("order 2")->passed);

  // R_1 not eta-self-adjoint: residual R_1 - R_1^*.
  const Matrix eta = FrobeniusData::p1_q1().pairing;
  RMatrix bad = RMatrix::identity(2, 2);
  bad.coeffs[1] = mat(2, {1, 0, 0, 0});
  const auto rep2 = validate_symplectic(bad, eta);
  REQUIRE_FALSE(rep2.find("order 1")->passed);
  const Matrix res = bad[1] - eta_adjoint(bad[1], eta);
  CHECK(rep2.find("order 1")->detail ==
        "residual [" + to_string(res(0, 0)) + "," + to_string(res(0, 1)) + "," + to_string(res(1, 0)) + "," +
            to_string(res(1, 1)) + "]");
}

TEST_CASE("invert") {
  const auto id = invert(RMatrix::identity(2, 3));
  for (int k = 0; k <= 3; ++k) CHECK(id[k] == (k ? Matrix::zero(2) : Matrix::identity(2)));
  RMatrix r = RMatrix::identity(2, 5);
  r.coeffs[1] = mat(2, {1, 2, Scalar(1, 3), -1});
  const auto inv = invert(r);
  Matrix p = Matrix::identity(2);
  for (int k = 0; k <= 5; ++k) {
    CHECK(inv[k] == (k % 2 ? -p : p));
    p = p * r[1];
  }
  std::mt19937_64 rng(11);
  const Matrix eta = FrobeniusData::p1_q1().pairing;
  const auto s = random_symplectic(eta, 6, rng);
  const auto si = invert(s);
  for (int k = 0; k <= 6; ++k) {
    Matrix adj = eta_adjoint(s[k], eta);
    CHECK(si[k] == (k % 2 ? -adj : adj));
  }
}

TEST_CASE("random_symplectic passes validation") {
  std::mt19937_64 rng(5);
  for (const auto& d : {FrobeniusData::point(), FrobeniusData::p1_q1(), FrobeniusData::npoints(3, {1, 2, Scalar(-1, 2)})}) {
    const auto r = random_symplectic(d.pairing, 6, rng);
    CHECK(validate_symplectic(r, d.pairing).ok());
  }
}

TEST_CASE("translation") {
  const Vec unit{1, 0};
  const auto t0 = translation(RMatrix::identity(2, 4), unit);
  for (const auto& c : t0.coeffs) CHECK(is_zero(c));
  RMatrix r = RMatrix::identity(2, 2);
  r.coeffs[1] = mat(2, {1, 2, 3, 4});
  CHECK(translation(r, unit).coeffs[2] == r[1] * unit);
  const auto t1 = translation(rank1_exp({Scalar(5)}, 4), Vec{1});
  CHECK(t1.coeffs[2] == Vec{5});
  // T_c = -(R^{-1})_{c-1} 1 = -(-5)^{c-1}/(c-1)!
  CHECK(t1.coeffs[3] == Vec{Scalar(-25, 2)});
  CHECK(t1.coeffs[4] == Vec{Scalar(125, 6)});
}

TEST_CASE("edge_series") {
  const Matrix eta = FrobeniusData::p1_q1().pairing;
  const Matrix etaInv = *inverse(eta);
  const auto e0 = edge_series(RMatrix::identity(2, 4), eta);
  for (const auto& row : e0.coef)
    for (const auto& m : row) CHECK(m.is_zero());
  std::mt19937_64 rng(3);
  const auto r = random_symplectic(eta, 5, rng);
  const auto e = edge_series(r, eta);
  CHECK(e.at(0, 0) == r[1] * etaInv);
  for (int k = 0; k < 5; ++k)
    for (int l = 0; k + l < 5; ++l) CHECK(e.at(k, l) == e.at(l, k).transpose());
  // Multiply back: (x + y) E(x, y) equals the numerator.
  const auto inv = invert(r);
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; i + j <= 5; ++j) {
      if (i + j == 0) continue;
      Matrix lhs = Matrix::zero(2);
      if (i >= 1) lhs += e.at(i - 1, j);
      if (j >= 1) lhs += e.at(i, j - 1);
      CHECK(lhs == -(inv[i] * etaInv * inv[j].transpose()));
    }
  RMatrix bad = r;
  bad.coeffs[2] = bad[2] + mat(2, {1, 0, 0, 0});
  CHECK_THROWS_AS(edge_series(bad, eta), NotDivisible);
}

TEST_CASE("R = Id reduces to TFT times point integrals") {
  for (const auto& d : {FrobeniusData::point(), FrobeniusData::p1_q1(), FrobeniusData::npoints(2, {3, Scalar(1, 2)})}) {
    const auto dec = idempotent_basis(d);
    const auto id = RMatrix::identity(d.dim, 6);
    for (int g = 0; g <= 2; ++g)
      for (int n = 0; n <= 3; ++n) {
        if (!is_stable(g, n)) continue;
        const int dim = 3 * g - 3 + n;
        // Put the whole degree on the first insert, or spread it, over all basis words.
        std::vector<std::vector<int>> psiChoices{std::vector<int>(n, 0)};
        if (n) {
          std::vector<int> p(n, 0);
          p[0] = dim;
          psiChoices.push_back(p);
          std::vector<int> q(n, 0);
          for (int i = 0; i < dim; ++i) ++q[i % n];
          psiChoices.push_back(q);
        }
        for (const auto& psi : psiChoices) {
          int total = 0;
          for (int x : psi) total += x;
          std::vector<int> word(n, 0);
          while (true) {
            std::vector<Insert> ins;
            std::vector<Vec> vs;
            for (int i = 0; i < n; ++i) {
              ins.push_back({d.basis_vector(word[i]), psi[i]});
              vs.push_back(d.basis_vector(word[i]));
            }
            const Scalar expect = total == dim ? tft_correlator(dec, g, vs) * psi_correlator(g, psi) : Scalar(0);
            CHECK(raction_correlator(dec, id, g, ins) == expect);
            int p = 0;
            while (p < n && ++word[p] == d.dim) word[p++] = 0;
            if (p == n) break;
          }
        }
      }
  }
  // Rank 1, g = 1, psi^1 -> 1/24.
  CHECK(raction_correlator(idempotent_basis(FrobeniusData::point()), RMatrix::identity(1, 2), 1, {{Vec{1}, 1}}) ==
        Scalar(1, 24));
}

TEST_CASE("rank-1 hand expansions for R = exp(r z)") {
  const auto dec = idempotent_basis(FrobeniusData::point());
  for (const Scalar r : {Scalar(1), Scalar(-2, 3), Scalar(5)}) {
    const auto R = rank1_exp({r}, 4);
    // (0,4): the ψ-leg terms give -4r, the T-leg term +r, the three one-edge trees +r each.
    CHECK(raction_correlator(dec, R, 0, std::vector<Insert>(4, {Vec{1}, 0})) == 0);
    // (1,1): vertex graph -r/24 + r/24, self-edge graph r/2.
    std::vector<GraphContribution> trace;
    RactionOptions opt;
    opt.trace = &trace;
    CHECK(raction_correlator(dec, R, 1, {{Vec{1}, 0}}, opt) == r / 2);
    REQUIRE(trace.size() == 2);
    CHECK(trace[0].value == 0);
    CHECK(trace[1].automorphisms == 2);
    CHECK(trace[1].value == r / 2);
  }
}

TEST_CASE("R-matrix order must cover the dimension") {
  const auto dec = idempotent_basis(FrobeniusData::point());
  CHECK_THROWS_AS(raction_correlator(dec, rank1_exp({Scalar(1)}, 1), 1, {{Vec{1}, 0}, {Vec{1}, 0}}), CapExceeded);
}

TEST_CASE("string, dilaton and pairing on random R") {
  std::mt19937_64 rng(2024);
  std::vector<FrobeniusData> targets{FrobeniusData::point(), FrobeniusData::p1_q1(),
                                     FrobeniusData::npoints(3, {1, 2, Scalar(-1, 2)})};
  for (const auto& d : targets) {
    const auto dec = idempotent_basis(d);
    const auto R = random_symplectic(d.pairing, 6, rng, 4, 2);
    REQUIRE(validate_symplectic(R, d.pairing).ok());
    std::uniform_int_distribution<int> pick(0, d.dim - 1);
    // Pairing normalization.
    for (int a = 0; a < d.dim; ++a)
      for (int b = 0; b < d.dim; ++b)
        CHECK(raction_correlator(dec, R, 0, {{d.basis_vector(a), 0}, {d.basis_vector(b), 0}, {d.unit, 0}}) ==
              d.pairing(a, b));
    for (auto [g, n] : std::vector<std::pair<int, int>>{{0, 3}, {1, 1}, {1, 2}, {2, 1}}) {
      const int dim = 3 * g - 3 + n;
      std::vector<Insert> ins;
      std::vector<int> psi(n, 0);
      psi[n - 1] = 1;
      for (int i = 0; i < dim; ++i) ++psi[i % n];
      for (int i = 0; i < n; ++i) ins.push_back({d.basis_vector(pick(rng)), psi[i]});
      // String.
      auto withUnit = ins;
      withUnit.push_back({d.unit, 0});
      Scalar rhs = 0;
      for (int i = 0; i < n; ++i) {
        if (ins[i].psi == 0) continue;
        auto lowered = ins;
        --lowered[i].psi;
        rhs += raction_correlator(dec, R, g, lowered);
      }
      CAPTURE(g);
      CAPTURE(n);
      CHECK(raction_correlator(dec, R, g, withUnit) == rhs);
      // Dilaton.
      auto base = ins;
      --base.back().psi;
      auto withDil = base;
      withDil.push_back({d.unit, 1});
      CHECK(raction_correlator(dec, R, g, withDil) == (2 * g - 2 + n) * raction_correlator(dec, R, g, base));
    }
  }
}

TEST_CASE("linearity in an insert") {
  std::mt19937_64 rng(9);
  const auto d = FrobeniusData::p1_q1();
  const auto dec = idempotent_basis(d);
  const auto R = random_symplectic(d.pairing, 4, rng);
  const Vec u{2, -3}, v{Scalar(1, 2), 5};
  auto corr = [&](const Vec& x) { return raction_correlator(dec, R, 1, {{x, 0}, {basis(2, 1), 1}}); };
  CHECK(corr(add(scale(u, 3), v)) == 3 * corr(u) + corr(v));
}
