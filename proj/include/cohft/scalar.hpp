#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cohft {

/// Exact rational number. All engine arithmetic goes through this type.
using Scalar = mpq_class;

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UnstablePair : public Error {
 public:
  UnstablePair(int g, int n)
      : Error("unstable pair (g=" + std::to_string(g) + ", n=" + std::to_string(n) + ")") {}
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& what) : Error("cap exceeded: " + what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

/// 2g - 2 + n > 0.
inline bool is_stable(int g, int n) { return g >= 0 && n >= 0 && 2 * g - 2 + n > 0; }

inline void require_stable(int g, int n) {
  if (!is_stable(g, n)) throw UnstablePair(g, n);
}

/// Parses "p/q", "p" or "-p/q". Throws Error on malformed input or zero denominator.
Scalar parse_scalar(const std::string& text);

/// Lowest terms with positive denominator; integers print without "/1".
std::string to_string(const Scalar& x);

Scalar factorial(int n);
/// (2k-1)!! with (-1)!! = 1.
Scalar double_factorial_odd(int k);
Scalar binomial(int n, int k);
Scalar power(const Scalar& base, int exponent);

}  // namespace cohft
