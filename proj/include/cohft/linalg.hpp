#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cohft/scalar.hpp"

namespace cohft {

using Vec = std::vector<Scalar>;

/// Dense row-major matrix over the rationals. Sizes here are tiny (rank <= ~16).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n);
  static Matrix zero(std::size_t n) { return Matrix(n, n); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transpose() const;
  bool is_zero() const;
  Scalar trace() const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(const Scalar& s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Matrix a, const Scalar& s);
Matrix operator*(const Scalar& s, Matrix a);
Vec operator*(const Matrix& a, const Vec& v);

Vec add(Vec a, const Vec& b);
Vec scale(Vec a, const Scalar& s);
bool is_zero(const Vec& v);

/// Gauss-Jordan inverse; std::nullopt when singular.
std::optional<Matrix> inverse(const Matrix& m);

/// Basis of the right null space {x : m x = 0}, in reduced form.
std::vector<Vec> null_space(const Matrix& m);

/// Kronecker product a (x) b, with index (i, j) -> i * b.rows() + j.
Matrix kronecker(const Matrix& a, const Matrix& b);

/// Commutator ab - ba.
Matrix commutator(const Matrix& a, const Matrix& b);

}  // namespace cohft
