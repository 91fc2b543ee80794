#pragma once

#include <optional>
#include <string>

#include "cohft/fockvir.hpp"
#include "cohft/product.hpp"

namespace cohft {

/// Malformed input; `pointer` is the JSON pointer of the offending value.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : Error((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer(std::move(pointer)) {}
  std::string pointer;
};

/// Well-formed input that fails a structural check.
class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport rep) : Error(first_failure(rep)), report(std::move(rep)) {}
  ValidationReport report;

 private:
  static std::string first_failure(const ValidationReport& rep) {
    for (const auto& e : rep.entries)
      if (!e.passed) return "validation failed: " + e.check + (e.detail.empty() ? "" : " (" + e.detail + ")");
    return "validation failed";
  }
};

struct TargetFile {
  FrobeniusData frobenius;
  std::optional<Matrix> mu;
  std::optional<Matrix> rho;
  std::optional<std::vector<std::pair<int, int>>> hodge;
  std::optional<int> complexDim;
  std::optional<RMatrix> rmatrix;
  std::optional<InverseSeries> smatrix;

  bool graded() const { return mu && rho; }
  /// Quantum multiplication by rho(1).
  Matrix quantum_rho() const;
};

/// Parses and validates (Frobenius axioms, grading, symplectic R, S_0 = Id).
TargetFile parse_target(const std::string& text);
TargetFile read_target(const std::string& path);
/// Canonical form: fixed key order, two-space indent, trailing newline.
std::string serialize_target(const TargetFile& target);

XCorrelatorTable parse_table(const std::string& text);
std::string serialize_table(const XCorrelatorTable& table);

std::string read_file(const std::string& path);

}  // namespace cohft
