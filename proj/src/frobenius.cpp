#include "cohft/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace cohft {

Vec FrobeniusData::product(const Vec& x, const Vec& y) const {
  Vec r(dim);
  for (int a = 0; a < dim; ++a) {
    if (x[a] == 0) continue;
    for (int b = 0; b < dim; ++b) {
      if (y[b] == 0) continue;
      const Scalar xy = x[a] * y[b];
      for (int k = 0; k < dim; ++k)
        if (c(a, b, k) != 0) r[k] += xy * c(a, b, k);
    }
  }
  return r;
}

Matrix FrobeniusData::multiplication_matrix(const Vec& x) const {
  Matrix m(dim, dim);
  for (int b = 0; b < dim; ++b) {
    const Vec col = product(x, basis_vector(b));
    for (int k = 0; k < dim; ++k) m(k, b) = col[k];
  }
  return m;
}

Scalar FrobeniusData::eta(const Vec& x, const Vec& y) const {
  Scalar s = 0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      if (pairing(a, b) != 0) s += x[a] * pairing(a, b) * y[b];
  return s;
}

Vec FrobeniusData::basis_vector(int a) const {
  Vec v(dim);
  v[a] = 1;
  return v;
}

FrobeniusData FrobeniusData::point() {
  FrobeniusData d;
  d.label = "point";
  d.dim = 1;
  d.pairing = Matrix::identity(1);
  d.structure = {Scalar(1)};
  d.unit = {Scalar(1)};
  return d;
}

FrobeniusData FrobeniusData::npoints(int n, const std::vector<Scalar>& norms) {
  FrobeniusData d;
  d.label = std::to_string(n) + "-points";
  d.dim = n;
  d.pairing = Matrix(n, n);
  d.structure.assign(static_cast<std::size_t>(n) * n * n, 0);
  d.unit.assign(n, 1);
  for (int i = 0; i < n; ++i) {
    d.pairing(i, i) = norms.empty() ? Scalar(1) : norms.at(i);
    d.c(i, i, i) = 1;
  }
  return d;
}

FrobeniusData FrobeniusData::p1_q1() {
  FrobeniusData d;
  d.label = "P1-q1";
  d.dim = 2;
  d.pairing = Matrix(2, 2);
  d.pairing(0, 1) = d.pairing(1, 0) = 1;
  d.structure.assign(8, 0);
  d.c(0, 0, 0) = 1;
  d.c(0, 1, 1) = d.c(1, 0, 1) = 1;
  d.c(1, 1, 0) = 1;  // H * H = q = 1
  d.unit = {Scalar(1), Scalar(0)};
  return d;
}

namespace {

std::string triple(int a, int b, int c) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
}

}  // namespace

ValidationReport validate_frobenius(const FrobeniusData& d) {
  ValidationReport rep;
  const bool shaped = d.dim >= 1 && d.pairing.rows() == static_cast<std::size_t>(d.dim) &&
                      d.pairing.cols() == static_cast<std::size_t>(d.dim) &&
                      d.structure.size() == static_cast<std::size_t>(d.dim) * d.dim * d.dim &&
                      d.unit.size() == static_cast<std::size_t>(d.dim);
  rep.add("shape", shaped, shaped ? "" : "dimensions of pairing/structure/unit disagree with dim");
  if (!shaped) return rep;

  bool symmetric = true;
  std::string witness;
  for (int a = 0; a < d.dim && symmetric; ++a)
    for (int b = 0; b < d.dim; ++b)
      if (d.pairing(a, b) != d.pairing(b, a)) {
        symmetric = false;
        witness = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
        break;
      }
  rep.add("pairing symmetric", symmetric, witness);
  const bool invertible = inverse(d.pairing).has_value();
  rep.add("pairing invertible", invertible);

  auto check_triples = [&](const std::string& name, auto&& holds) {
    for (int a = 0; a < d.dim; ++a)
      for (int b = 0; b < d.dim; ++b)
        for (int c = 0; c < d.dim; ++c)
          if (!holds(a, b, c)) {
            rep.add(name, false, "witness " + triple(a, b, c));
            return;
          }
    rep.add(name, true);
  };

  check_triples("commutative", [&](int a, int b, int k) { return d.c(a, b, k) == d.c(b, a, k); });
  check_triples("associative", [&](int a, int b, int c) {
    const Vec ab = d.product(d.basis_vector(a), d.basis_vector(b));
    const Vec bc = d.product(d.basis_vector(b), d.basis_vector(c));
    return d.product(ab, d.basis_vector(c)) == d.product(d.basis_vector(a), bc);
  });
  bool unitOk = true;
  for (int a = 0; a < d.dim; ++a)
    if (d.product(d.unit, d.basis_vector(a)) != d.basis_vector(a)) {
      unitOk = false;
      rep.add("unit", false, "witness basis vector " + std::to_string(a));
      break;
    }
  if (unitOk) rep.add("unit", true);
  check_triples("frobenius compatibility", [&](int a, int b, int c) {
    const Vec ea = d.basis_vector(a), eb = d.basis_vector(b), ec = d.basis_vector(c);
    return d.eta(d.product(ea, eb), ec) == d.eta(ea, d.product(eb, ec));
  });
  return rep;
}

ValidationReport validate_graded(const GradedTargetData& t) {
  ValidationReport rep = validate_frobenius(t.base);
  const auto n = static_cast<std::size_t>(t.base.dim);
  const bool shaped = t.mu.rows() == n && t.mu.cols() == n && t.rho.rows() == n && t.rho.cols() == n;
  rep.add("grading shape", shaped);
  if (!shaped) return rep;

  bool diagonal = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && t.mu(i, j) != 0) diagonal = false;
  if (diagonal) {
    bool half = true;
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar twice = 2 * t.mu(i, i);
      if (twice.get_den() != 1) half = false;
    }
    rep.add("mu eigenvalues in (1/2)Z", half);
  } else {
    rep.add("mu eigenvalues in (1/2)Z", true, "not checked: mu not supplied in an eigenbasis");
  }

  Matrix p = Matrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) p = p * t.rho;
  rep.add("rho nilpotent", p.is_zero());
  rep.add("[mu, rho] = rho", commutator(t.mu, t.rho) == t.rho);
  const Matrix skew = t.mu.transpose() * t.base.pairing + t.base.pairing * t.mu;
  rep.add("mu eta-anti-self-adjoint", skew.is_zero());
  return rep;
}

Scalar IdempotentDecomposition::coordinate(int i, const Vec& v) const {
  const Vec& e = idempotents[i];
  Scalar s = 0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (v[a] == 0) continue;
    for (std::size_t b = 0; b < e.size(); ++b)
      if (pairing(a, b) != 0) s += v[a] * pairing(a, b) * e[b];
  }
  return s / norms[i];
}

Vec IdempotentDecomposition::coordinates(const Vec& v) const {
  Vec r(idempotents.size());
  for (int i = 0; i < rank(); ++i) r[i] = coordinate(i, v);
  return r;
}

namespace {

/// Characteristic polynomial coefficients c_0..c_n (monic, c_n = 1) by Faddeev-LeVerrier.
std::vector<Scalar> characteristic_polynomial(const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<Scalar> c(n + 1);
  c[n] = 1;
  Matrix m = Matrix::zero(n);
  const Matrix id = Matrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m + c[n - k + 1] * id;
    c[n - k] = -(a * m).trace() / Scalar(static_cast<long>(k));
  }
  return c;
}

Scalar evaluate(const std::vector<Scalar>& p, const Scalar& x) {
  Scalar r = 0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

/// Distinct rational roots of p, located numerically (Aberth iteration) and certified exactly.
/// Returns fewer than deg roots when p does not split into distinct rational factors.
std::vector<Scalar> rational_roots(const std::vector<Scalar>& p) {
  const int n = static_cast<int>(p.size()) - 1;
  // Integer-root form: with L = lcm of denominators, x = y / L turns p into a monic
  // integer polynomial in y whose rational roots are integers.
  mpz_class lcm = 1;
  for (const auto& c : p) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den().get_mpz_t());
  std::vector<Scalar> q(n + 1);
  Scalar lpow = 1;
  for (int i = n; i >= 0; --i) {
    q[i] = p[i] * lpow;
    lpow *= Scalar(lcm);
  }
  using C = std::complex<long double>;
  std::vector<C> coef(n + 1);
  for (int i = 0; i <= n; ++i) coef[i] = C(static_cast<long double>(q[i].get_d()), 0);
  long double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(coef[i].real()));
  bound = 1 + bound;
  std::vector<C> z(n);
  for (int i = 0; i < n; ++i) z[i] = std::polar(bound * 0.5L + 0.4L, 2.0L * 3.14159265358979L * i / n + 0.25L);
  auto horner = [&](C x, C& d) {
    C v = coef[n];
    d = 0;
    for (int i = n - 1; i >= 0; --i) {
      d = d * x + v;
      v = v * x + coef[i];
    }
    return v;
  };
  for (int iter = 0; iter < 2000; ++iter) {
    long double move = 0;
    for (int i = 0; i < n; ++i) {
      C d;
      const C v = horner(z[i], d);
      if (v == C(0)) continue;
      const C ratio = v / d;
      C s = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += C(1) / (z[i] - z[j]);
      const C w = ratio / (C(1) - ratio * s);
      z[i] -= w;
      move = std::max(move, std::abs(w) / (1 + std::abs(z[i])));
    }
    if (move < 1e-17L) break;
  }
  std::vector<Scalar> roots;
  for (const auto& r : z) {
    const long double guess = std::round(r.real());
    for (long double off = -2; off <= 2; off += 1) {
      const long double y = guess + off;
      if (std::fabs(y) > 9.0e18L) continue;
      const Scalar cand(mpz_class(std::to_string(static_cast<long long>(y)), 10));
      if (evaluate(q, cand) == 0) {
        const Scalar x = cand / Scalar(lcm);
        if (std::find(roots.begin(), roots.end(), x) == roots.end()) roots.push_back(x);
        break;
      }
    }
  }
  return roots;
}

/// Tries to split the algebra with multiplication by x; empty on failure.
std::vector<Vec> split_with(const FrobeniusData& d, const Vec& x) {
  const Matrix m = d.multiplication_matrix(x);
  const auto roots = rational_roots(characteristic_polynomial(m));
  if (static_cast<int>(roots.size()) != d.dim) return {};
  std::vector<Vec> idem;
  for (const auto& lambda : roots) {
    const auto kernel = null_space(m - lambda * Matrix::identity(d.dim));
    if (kernel.size() != 1) return {};
    const Vec& v = kernel[0];
    const Vec vv = d.product(v, v);
    // v is a multiple a*e of an idempotent, so v*v = a*v.
    std::size_t pivot = 0;
    while (pivot < v.size() && v[pivot] == 0) ++pivot;
    const Scalar a = vv[pivot] / v[pivot];
    if (a == 0) return {};
    Vec e = scale(v, Scalar(1) / a);
    if (d.product(e, e) != e) return {};
    idem.push_back(std::move(e));
  }
  return idem;
}

}  // namespace

IdempotentDecomposition idempotent_basis(const FrobeniusData& d, int perturbationBound) {
  std::vector<Vec> candidates;
  for (int a = 0; a < d.dim; ++a) candidates.push_back(d.basis_vector(a));
  // Unit-perturbed points on the moment curve sum_a k^a e_a: generic for all but
  // finitely many k, so a bounded search suffices for split algebras.
  const int extra = perturbationBound + d.dim * d.dim * d.dim;
  for (int k = 1; k <= extra; ++k) {
    Vec x = d.unit;
    Scalar w = 1;
    for (int a = 0; a < d.dim; ++a) {
      w *= k;
      x[a] += w;
    }
    candidates.push_back(std::move(x));
  }
  for (const auto& x : candidates) {
    auto idem = split_with(d, x);
    if (idem.empty()) continue;
    std::sort(idem.begin(), idem.end());
    IdempotentDecomposition dec;
    dec.pairing = d.pairing;
    dec.unit = d.unit;
    for (auto& e : idem) {
      const Scalar norm = d.eta(e, e);
      if (norm == 0) throw NotSemisimpleOverBaseField(d.label);
      dec.norms.push_back(norm);
      dec.idempotents.push_back(std::move(e));
    }
    Vec sum(d.dim);
    for (const auto& e : dec.idempotents) sum = add(sum, e);
    if (sum != d.unit) throw NotSemisimpleOverBaseField(d.label);
    return dec;
  }
  throw NotSemisimpleOverBaseField(d.label);
}

Scalar tft_correlator(const IdempotentDecomposition& dec, int g, const std::vector<Vec>& inserts) {
  const int n = static_cast<int>(inserts.size());
  require_stable(g, n);
  Scalar total = 0;
  for (int i = 0; i < dec.rank(); ++i) {
    Scalar term = power(dec.norms[i], 1 - g);
    for (const auto& v : inserts) {
      if (term == 0) break;
      term *= dec.coordinate(i, v);
    }
    total += term;
  }
  return total;
}

FrobeniusData tensor_frobenius(const FrobeniusData& a, const FrobeniusData& b) {
  FrobeniusData t;
  t.label = a.label + "x" + b.label;
  t.dim = a.dim * b.dim;
  t.pairing = kronecker(a.pairing, b.pairing);
  t.structure.assign(static_cast<std::size_t>(t.dim) * t.dim * t.dim, 0);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      for (int k = 0; k < a.dim; ++k) {
        if (a.c(i, j, k) == 0) continue;
        for (int p = 0; p < b.dim; ++p)
          for (int q = 0; q < b.dim; ++q)
            for (int r = 0; r < b.dim; ++r)
              if (b.c(p, q, r) != 0)
                t.c(i * b.dim + p, j * b.dim + q, k * b.dim + r) = a.c(i, j, k) * b.c(p, q, r);
      }
  t.unit.assign(t.dim, 0);
  for (int i = 0; i < a.dim; ++i)
    for (int p = 0; p < b.dim; ++p) t.unit[i * b.dim + p] = a.unit[i] * b.unit[p];
  return t;
}

std::vector<Scalar> structure_from_idempotents(const IdempotentDecomposition& dec) {
  const int n = static_cast<int>(dec.unit.size());
  // Change of basis: column i of P is e_i; e_a = sum_i (P^{-1})_{i a} e_i.
  Matrix p(n, n);
  for (int i = 0; i < dec.rank(); ++i)
    for (int a = 0; a < n; ++a) p(a, i) = dec.idempotents[i][a];
  const auto pinv = inverse(p);
  if (!pinv) throw Error("idempotents are not a basis");
  std::vector<Scalar> s(static_cast<std::size_t>(n) * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < dec.rank(); ++i) {
        const Scalar w = (*pinv)(i, a) * (*pinv)(i, b);
        if (w == 0) continue;
        for (int k = 0; k < n; ++k) s[(static_cast<std::size_t>(a) * n + b) * n + k] += w * dec.idempotents[i][k];
      }
  return s;
}

}  // namespace cohft
