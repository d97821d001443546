#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace suffreduce {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Used for observation tables (n x p) and
/// eigenvector bases; symmetric parameters live in SymMatrix.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return v_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return v_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {v_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {v_.data() + i * cols_, cols_};
  }

  std::span<double> data() noexcept { return v_; }
  std::span<const double> data() const noexcept { return v_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> v_;
};

Matrix multiply(const Matrix& a, const Matrix& b);

/// Real symmetric p x p matrix. Only the upper triangle is stored (row-major
/// packed), so entry(i,j) and entry(j,i) are the same memory cell.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t p, double fill = 0.0);

  static SymMatrix identity(std::size_t p);
  static SymMatrix ones(std::size_t p);
  static SymMatrix diagonal(std::span<const double> d);

  std::size_t dim() const noexcept { return p_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return v_[index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return v_[index(i, j)]; }

  /// Packed upper triangle, row by row. Off-diagonal cells appear once.
  std::span<const double> packed() const noexcept { return v_; }
  std::span<double> packed() noexcept { return v_; }

  Vector diag() const;
  Matrix to_dense() const;

  /// Principal submatrix on the given (ordered) index set.
  SymMatrix principal(std::span<const std::size_t> idx) const;

  template <class F>
  SymMatrix map(F&& f) const {
    SymMatrix out(*this);
    for (double& x : out.v_) x = f(x);
    return out;
  }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  bool operator==(const SymMatrix&) const = default;

private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return i * p_ - i * (i + 1) / 2 + j;
  }

  std::size_t p_ = 0;
  std::vector<double> v_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

/// Symmetrize a square array, averaging each (i,j)/(j,i) pair. Throws
/// InvalidArgument if the array is not square, holds a non-finite value, or
/// has |a(i,j) - a(j,i)| > asym_tol for some pair.
SymMatrix from_dense(const Matrix& values, double asym_tol = 1e-9);

/// (1/n) V^T V for an n x p observation table. For +-1/0 vote codes this is
/// (#agreements - #disagreements) / n per pair.
SymMatrix uncentered_covariance(const Matrix& observations);

/// Entrywise product. Throws InvalidArgument on dimension mismatch.
SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b);

/// Trace inner product <A, B> = sum_ij A_ij B_ij over the full matrix.
double inner(const SymMatrix& a, const SymMatrix& b);
double frobenius_norm(const SymMatrix& a);
double max_abs(const SymMatrix& a);
double max_abs_diff(const SymMatrix& a, const SymMatrix& b);
SymMatrix abs(const SymMatrix& a);

/// Entrywise l1 norm over the full matrix (off-diagonal pairs count twice).
double l1_norm(const SymMatrix& a);

bool is_binary(const SymMatrix& a);

enum class EigenMethod {
  Jacobi,      ///< cyclic Jacobi rotations
  Tridiagonal  ///< Householder reduction followed by implicit QL
};

struct EigenDecomposition {
  Vector values;  ///< sorted descending
  Matrix basis;   ///< column k is the eigenvector of values[k]

  SymMatrix reconstruct() const;

  /// basis * diag(f(values)) * basis^T
  template <class F>
  SymMatrix spectral_map(F&& f) const {
    Vector g(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) g[k] = f(values[k]);
    return synthesize(g);
  }

  SymMatrix synthesize(std::span<const double> spectrum) const;
};

/// Symmetric eigendecomposition. Deterministic for identical input; each
/// eigenvector is sign-normalized so its largest-magnitude component is
/// positive. Throws ConvergenceError when the iteration budget (100 Jacobi
/// sweeps, or 60 QL steps per eigenvalue) is exhausted.
EigenDecomposition eigh(const SymMatrix& x, EigenMethod method = EigenMethod::Tridiagonal);

double min_eigenvalue(const SymMatrix& x);

/// Cholesky-based inverse; nullopt if the matrix is not numerically positive definite.
std::optional<SymMatrix> inverse_spd(const SymMatrix& x);

/// log det via Cholesky; nullopt if not positive definite.
std::optional<double> log_det_spd(const SymMatrix& x);

} // namespace suffreduce
