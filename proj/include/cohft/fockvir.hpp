#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cohft/product.hpp"
#include "cohft/raction.hpp"

namespace cohft {

class GradingInconsistent : public Error {
 public:
  explicit GradingInconsistent(const std::string& what) : Error("inconsistent grading data: " + what) {}
};

class InsufficientOrder : public Error {
 public:
  explicit InsufficientOrder(const std::string& what) : Error("series order too low: " + what) {}
};

// ---------------------------------------------------------------------------
// Grading operators and Virasoro symbols

struct GradingOperators {
  Matrix mu;
  Matrix rho;
};

/// mu = diag(p_a - D/2); rho = c1Matrix. Checks nilpotency and [mu, rho] = rho.
GradingOperators build_mu_rho(const std::vector<std::pair<int, int>>& hodge, int complexDim, const Matrix& c1Matrix);

/// Linear operator on V((z)) given on z^k V for k in [kMin, kMax]:
/// z^k v -> sum_j z^{k+j} blocks[{k, j}] v.
struct LaurentOperator {
  int dim = 0;
  int kMin = 0;
  int kMax = -1;
  std::map<std::pair<int, int>, Matrix> blocks;

  bool covers(int k) const { return kMin <= k && k <= kMax; }
  /// Image of z^k v as exponent -> vector.
  std::map<int, Vec> apply(int k, const Vec& v) const;
  /// Drops zero blocks.
  void prune();

  friend bool operator==(const LaurentOperator& a, const LaurentOperator& b) {
    return a.dim == b.dim && a.kMin == b.kMin && a.kMax == b.kMax && a.blocks == b.blocks;
  }
};

LaurentOperator operator+(const LaurentOperator& a, const LaurentOperator& b);
LaurentOperator operator-(const LaurentOperator& a, const LaurentOperator& b);
LaurentOperator operator*(const Scalar& s, const LaurentOperator& a);
/// a after b, on the exponents k of b's range whose images lie in a's range.
LaurentOperator compose(const LaurentOperator& a, const LaurentOperator& b);
/// Multiplication by z^p (any range).
LaurentOperator z_power(int dim, int p, int kMin, int kMax);
/// a (x) Id_{dimB}  and  Id_{dimA} (x) b on the common range.
LaurentOperator tensor_left(const LaurentOperator& a, int dimB);
LaurentOperator tensor_right(int dimA, const LaurentOperator& b);
/// Restriction to [kMin, kMax].
LaurentOperator restrict_range(const LaurentOperator& a, int kMin, int kMax);

struct VirasoroSymbol {
  int m = -1;
  Matrix mu;
  Matrix rho;
  LaurentOperator op;
};

/// l_m = z^{-1/2} (z d/dz z - mu z + rho)^{m+1} z^{-1/2} on exponents [kMin, kMax].
VirasoroSymbol lm_symbol(const Matrix& mu, const Matrix& rho, int m, int kMin, int kMax);
/// Range wide enough for quantize at psi cap K.
VirasoroSymbol lm_symbol(const Matrix& mu, const Matrix& rho, int m, int K);

// ---------------------------------------------------------------------------
// Quantization

/// (psi power k, basis index a).
using Variable = std::pair<int, int>;
using VariablePair = std::pair<Variable, Variable>;

/// Differential operator in t_k^a with hbar bookkeeping; multipliers only carry indices k <= K.
struct QuantizedOperator {
  int m = -1;
  int dim = 0;
  int K = 0;
  Scalar constant;             // hbar^0, traceConstant + orderingConstant
  Scalar traceConstant;        // delta_{m,0}/4 tr(mu mu^*)
  Scalar orderingConstant;     // delta_{m,0} dim/16
  Scalar inverseHbarConstant;  // hbar^{-1}
  std::map<Variable, Scalar> linearDerivative;           // d/dt_y
  std::map<Variable, Scalar> linearMultiplier;           // t_x / hbar
  std::map<VariablePair, Scalar> mixed;                  // t_x d/dt_y
  std::map<VariablePair, Scalar> quadraticDerivative;    // hbar d^2/dt_x dt_y, x <= y
  std::map<VariablePair, Scalar> quadraticMultiplier;    // t_x t_y / hbar, x <= y

  friend bool operator==(const QuantizedOperator&, const QuantizedOperator&) = default;
};

/// Quantization of h(f) = Omega(f, A f)/2 with dilaton shift, no constant terms added.
QuantizedOperator quantize_operator(const LaurentOperator& a, const Matrix& pairing, const Vec& unit, int K);
/// quantize_operator plus the m = 0 constants.
QuantizedOperator quantize(const VirasoroSymbol& symbol, const Matrix& pairing, const Vec& unit, int K);

// ---------------------------------------------------------------------------
// Potentials

/// Sorted list of variables, with repetition.
using Monomial = std::vector<Variable>;

struct PotentialCaps {
  int gMax = 2;
  int nMax = 6;
  int K = 7;
};

struct TruncatedPotential {
  std::string label;
  int dim = 0;
  PotentialCaps caps;
  /// Nonzero correlators <prod tau_k(e_a)>_g within caps.
  std::map<int, std::map<Monomial, Scalar>> correlators;

  bool within_caps(int g, const Monomial& mono) const;
  /// 0 for unstable or absent entries; nullopt outside caps.
  std::optional<Scalar> correlator(int g, const Monomial& mono) const;
  /// Coefficient of t^mono in F_g: correlator / prod mult!.
  Scalar coefficient(int g, const Monomial& mono) const;
};

struct PotentialSource {
  std::string label;
  int dim = 0;
  bool homogeneous = true;  // only sum k = 3g - 3 + n can be nonzero
  std::function<Scalar(int, const Monomial&)> correlator;
};

PotentialSource point_source();
/// Semisimple TFT with R = Id.
PotentialSource tft_source(const IdempotentDecomposition& dec);
PotentialSource raction_source(const IdempotentDecomposition& dec, const RMatrix& r, const RactionOptions& options = {});
/// Product with basis index x * dimY + y.
PotentialSource product_source(const XCorrelatorTable& table, const IdempotentDecomposition& yDec, const RMatrix& yR,
                               const RactionOptions& options = {});

TruncatedPotential assemble_potential(const PotentialSource& source, const PotentialCaps& caps);

/// hbar power -> monomial -> coefficient.
using HbarSeries = std::map<std::pair<int, Monomial>, Scalar>;

/// exp(sum_g hbar^{g-1} F_g) modulo |monomial| > nMax and (hbar power + |monomial|) > weightMax.
/// Every term of F has weight >= 1, so both conditions cut out ideals.
HbarSeries exponentiate(const TruncatedPotential& potential, int weightMax);
HbarSeries multiply(const HbarSeries& a, const HbarSeries& b, int nMax, int weightMax);

/// Multiset operations on monomials.
Monomial add_variable(Monomial mono, const Variable& v);
/// Removes one copy; std::nullopt if absent.
std::optional<Monomial> remove_variable(const Monomial& mono, const Variable& v);
std::string monomial_string(const Monomial& mono);

// ---------------------------------------------------------------------------
// Constraint checking

enum class ResidualClass { Complete, TruncationBoundary };

struct ResidualEntry {
  int m = -1;
  int genus = 0;
  Monomial monomial;
  Scalar value;
  ResidualClass cls = ResidualClass::Complete;
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;  // every coefficient that can be nonzero, sorted

  int complete_count() const;
  int boundary_count() const;
  /// COMPLETE entries with nonzero value.
  std::vector<ResidualEntry> failures() const;
  bool ok() const { return failures().empty(); }
};

/// Correlator lookup: value, or std::nullopt when not known.
using CorrelatorLookup = std::function<std::optional<Scalar>(int, const Monomial&)>;

struct CoefficientValue {
  Scalar value;
  bool complete = true;
};

/// Coefficient of hbar^{g-1} t^mono / prod mult! in (L Z)/Z.
CoefficientValue operator_coefficient(const QuantizedOperator& op, const CorrelatorLookup& lookup, int g,
                                      const Monomial& mono);

ResidualReport virasoro_check(const TruncatedPotential& potential, const std::vector<QuantizedOperator>& ops,
                              int threads = 1);

/// Point Virasoro operators L_{-1}..L_{mMax} at cap K.
std::vector<QuantizedOperator> point_virasoro_operators(int mMax, int K);
/// L_m for mu = rho = 0 on a rank-N diagonal target with the given pairing.
std::vector<QuantizedOperator> npoints_virasoro_operators(const Matrix& pairing, const Vec& unit, int mMax, int K);

/// Point correlators <tau_{k_1} ... tau_{k_n}>_g, g <= gMax, sum k <= degreeMax, solved from the
/// quantized constraints seeded by <tau_0^3>_0 = 1. Keys are sorted powers.
std::map<std::pair<int, std::vector<int>>, Scalar> solve_point_virasoro(int gMax, int degreeMax);

// ---------------------------------------------------------------------------
// Grading identities

/// Coefficients of S = Id + S_1/z + ...
using InverseSeries = std::vector<Matrix>;

struct GradingCheckInput {
  Matrix mu;
  Matrix rho;
  Matrix quantumRho;  // quantum multiplication by c_1
  InverseSeries s;
  RMatrix r;
};

/// Per order k:  k R_k + mu R_k + [A, R_{k+1}] = 0  (k < N)  and
/// -k S_k + [mu, S_k] + A S_{k-1} - S_{k-1} rho = 0  (1 <= k <= N), A = quantumRho.
/// The product form repeats both on (X graded by muX, rhoX) (x) Y with R = Id (x) R, S = Id (x) S.
ValidationReport grading_conjugation_check(const GradingCheckInput& input, int orderN);
ValidationReport grading_conjugation_check(const GradingCheckInput& input, int orderN, const Matrix& muX,
                                           const Matrix& rhoX);

}  // namespace cohft
