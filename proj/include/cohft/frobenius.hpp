#pragma once

#include <string>
#include <vector>

#include "cohft/linalg.hpp"
#include "cohft/report.hpp"

namespace cohft {

class NotSemisimpleOverBaseField : public Error {
 public:
  explicit NotSemisimpleOverBaseField(const std::string& label)
      : Error("algebra '" + label + "' does not split into rational idempotents") {}
};

/// Finite-dimensional commutative Frobenius algebra in a fixed basis e_0..e_{dim-1}.
struct FrobeniusData {
  std::string label;
  int dim = 0;
  Matrix pairing;                 // eta(e_a, e_b)
  std::vector<Scalar> structure;  // coefficient of e_k in e_a * e_b at (a*dim + b)*dim + k
  Vec unit;

  Scalar& c(int a, int b, int k) { return structure[(static_cast<std::size_t>(a) * dim + b) * dim + k]; }
  const Scalar& c(int a, int b, int k) const {
    return structure[(static_cast<std::size_t>(a) * dim + b) * dim + k];
  }

  Vec product(const Vec& x, const Vec& y) const;
  /// Matrix of y -> x * y.
  Matrix multiplication_matrix(const Vec& x) const;
  Scalar eta(const Vec& x, const Vec& y) const;
  Vec basis_vector(int a) const;

  static FrobeniusData point();
  /// Diagonal algebra Q^n; pairing diag(norms) (all ones by default).
  static FrobeniusData npoints(int n, const std::vector<Scalar>& norms = {});
  /// Basis {1, H} with H*H = 1 and eta(1, H) = 1.
  static FrobeniusData p1_q1();
};

struct IdempotentDecomposition {
  std::vector<Vec> idempotents;  // e_i in the original basis
  std::vector<Scalar> norms;     // Delta_i = eta(e_i, e_i)
  Matrix pairing;
  Vec unit;

  int rank() const { return static_cast<int>(idempotents.size()); }
  /// Coordinate of v along e_i: eta(v, e_i) / Delta_i.
  Scalar coordinate(int i, const Vec& v) const;
  Vec coordinates(const Vec& v) const;
};

/// Mu, rho grading data on top of a Frobenius algebra.
struct GradedTargetData {
  FrobeniusData base;
  Matrix mu;
  Matrix rho;
};

ValidationReport validate_frobenius(const FrobeniusData& data);
ValidationReport validate_graded(const GradedTargetData& data);

/// Rational idempotent basis, sorted lexicographically by coordinate vector.
/// `perturbationBound` bounds the search for a generic element.
IdempotentDecomposition idempotent_basis(const FrobeniusData& data, int perturbationBound = 5);

/// omega_{g,n}(inserts) = sum_i Delta_i^{1-g} prod_j coord_i(insert_j).
Scalar tft_correlator(const IdempotentDecomposition& dec, int g, const std::vector<Vec>& inserts);

FrobeniusData tensor_frobenius(const FrobeniusData& a, const FrobeniusData& b);

/// Rebuilds the structure tensor from e_i * e_j = delta_ij e_i.
std::vector<Scalar> structure_from_idempotents(const IdempotentDecomposition& dec);

}  // namespace cohft
