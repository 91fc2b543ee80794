#pragma once

#include <random>
#include <string>
#include <vector>

#include "cohft/frobenius.hpp"
#include "cohft/intersect.hpp"
#include "cohft/stable_graphs.hpp"

namespace cohft {

class NotDivisible : public Error {
 public:
  explicit NotDivisible(const std::string& what) : Error("edge numerator not divisible by (x + y): " + what) {}
};

class NonvanishingLowOrder : public Error {
 public:
  NonvanishingLowOrder() : Error("translation series has a z^0 or z^1 term") {}
};

/// Coefficients of a End(V)-valued power series in z.
using MatrixSeries = std::vector<Matrix>;

/// R(z) = Id + R_1 z + ... + R_K z^K.
struct RMatrix {
  MatrixSeries coeffs;  // coeffs[0] is the identity

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  int dim() const { return static_cast<int>(coeffs.at(0).rows()); }
  const Matrix& operator[](int k) const { return coeffs.at(k); }

  static RMatrix identity(int dim, int order);
};

/// Adjoint with respect to the pairing: eta^{-1} a^T eta.
Matrix eta_adjoint(const Matrix& a, const Matrix& pairing);

ValidationReport validate_symplectic(const RMatrix& r, const Matrix& pairing);

/// Formal inverse to the order of r.
MatrixSeries invert(const RMatrix& r);

struct TranslationSeries {
  std::vector<Vec> coeffs;  // coeffs[c] for c = 0..K+1; entries 0 and 1 vanish
};

TranslationSeries translation(const RMatrix& r, const Vec& unit);

struct EdgeSeries {
  int order = 0;                         // K; terms k + l <= K - 1 are stored
  std::vector<std::vector<Matrix>> coef;  // coef[k][l]

  const Matrix& at(int k, int l) const { return coef.at(k).at(l); }
};

EdgeSeries edge_series(const RMatrix& r, const Matrix& pairing);

struct Insert {
  Vec vector;
  int psi = 0;
};

struct GraphContribution {
  std::string canonicalForm;
  int automorphisms = 1;
  Scalar value;  // already divided by automorphisms
};

struct RactionOptions {
  GraphCaps graphCaps;
  IntersectCaps intersectCaps{2, 16, 16};
  int maxTranslationLegs = 6;
  std::vector<GraphContribution>* trace = nullptr;
};

/// Correlator of R.omega (unit-preserving action on the TFT of `dec`) against prod v_i psi^{d_i}.
Scalar raction_correlator(const IdempotentDecomposition& dec, const RMatrix& r, int g, const std::vector<Insert>& inserts,
                          const RactionOptions& options = {});

/// exp(a(z)) with deg a <= logDegree and a_k + (-1)^k a_k^* = 0, entries drawn from [-range, range].
RMatrix random_symplectic(const Matrix& pairing, int order, std::mt19937_64& rng, int logDegree = 4, int range = 2);

/// exp of a series with zero constant term, truncated at `order`.
MatrixSeries series_exp(const MatrixSeries& a, int order);

MatrixSeries series_multiply(const MatrixSeries& a, const MatrixSeries& b, int order);

}  // namespace cohft
