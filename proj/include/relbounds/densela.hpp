#pragma once

// Dense real linear algebra used throughout the library: a row-major matrix,
// a symmetric strong type, a cyclic Jacobi eigensolver with a relative
// stopping rule, Cholesky, Householder QR and one-sided Jacobi SVD.

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace relbounds {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);
  static Matrix column_vector(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transpose() const;
  Matrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
               std::size_t ncols) const;
  Matrix columns(std::size_t first, std::size_t count) const {
    return block(0, first, rows_, count);
  }
  std::vector<double> column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
/// max |a_ij - a_ji| / max(‖A‖_F, tiny)
double relative_asymmetry(const Matrix& a);

/// Real symmetric matrix. Construction from a general square matrix replaces
/// it by (A + Aᵀ)/2.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Matrix& a);
  SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SymmetricMatrix(Matrix(rows)) {}

  static SymmetricMatrix identity(std::size_t n);
  static SymmetricMatrix diagonal(std::span<const double> values);

  std::size_t size() const noexcept { return a_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
  const Matrix& matrix() const noexcept { return a_; }
  operator const Matrix&() const noexcept { return a_; }

  SymmetricMatrix scaled(double s) const;
  /// Congruence Tᵀ·A·T.
  SymmetricMatrix congruence(const Matrix& t) const;
  /// Smallest eigenvalue > 0 (computed on demand).
  bool is_positive_definite() const;

 private:
  Matrix a_;
};

enum class NormKind { spectral, frobenius, trace };

std::string_view to_string(NormKind kind);
NormKind parse_norm_kind(std::string_view name);

struct Eigensystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j belongs to values[j]
};

/// Cyclic Jacobi. A pair (p, q) is considered converged when
/// |a_pq| ≤ 1e-14·sqrt(|a_pp·a_qq|) or |a_pq| ≤ 1e-24·‖A‖_F, which gives
/// eigenvalues with small relative error for graded positive-definite input.
/// At most 100 sweeps.
Eigensystem sym_eig(const SymmetricMatrix& a);

/// A·v = λ·B·v with B positive definite; vectors are B-orthonormal.
/// Reduction through the Cholesky factor of B.
Eigensystem gen_sym_eig(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// A^{-1/2} for positive-definite A through its eigendecomposition.
SymmetricMatrix inv_sqrt(const SymmetricMatrix& a);

/// Singular values, descending, min(rows, cols) of them. One-sided Jacobi.
std::vector<double> singular_values(const Matrix& a);

double ui_norm(const Matrix& a, NormKind kind);
double ui_norm_diagonal(std::span<const double> values, NormKind kind);
inline double spectral_norm(const Matrix& a) { return ui_norm(a, NormKind::spectral); }

double trace(const Matrix& a);

class Cholesky {
 public:
  /// Throws NotPositiveDefinite naming the failing pivot.
  explicit Cholesky(const SymmetricMatrix& a);

  std::size_t size() const noexcept { return l_.rows(); }
  const Matrix& lower() const noexcept { return l_; }

  std::vector<double> solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;
  /// L^{-1}·B
  Matrix forward(const Matrix& b) const;
  /// L^{-T}·B
  Matrix backward(const Matrix& b) const;

 private:
  Matrix l_;
};

struct QrDecomposition {
  Matrix q;  // rows×rows orthogonal
  Matrix r;  // rows×cols upper triangular, nonnegative diagonal
};

/// Householder QR of a tall (rows ≥ cols) matrix.
QrDecomposition householder_qr(const Matrix& a);

/// Orthonormal basis of the orthogonal complement of span(basis); basis has
/// orthonormal columns.
Matrix orthonormal_completion(const Matrix& basis);

// Text format: first line "n m", then n rows of m values; lines whose first
// non-blank character is '#' are comments.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& a);

}  // namespace relbounds
