#include "relbounds/densela.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "relbounds/errors.hpp"

namespace relbounds {

namespace {

constexpr double kJacobiRelTol = 1e-14;
constexpr double kJacobiAbsTol = 1e-24;
constexpr int kMaxSweeps = 100;

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    require(row.size() == cols_, "Matrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::column_vector(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                     std::size_t ncols) const {
  require(row0 + nrows <= rows_ && col0 + ncols <= cols_, "Matrix::block out of range");
  Matrix b(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < ncols; ++j) b(i, j) = (*this)(row0 + i, col0 + j);
  return b;
}

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void Matrix::set_column(std::size_t j, std::span<const double> values) {
  require(values.size() == rows_, "Matrix::set_column size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "Matrix +: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "Matrix -: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "Matrix *: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "Matrix * vector: shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: size mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double relative_asymmetry(const Matrix& a) {
  require(a.rows() == a.cols(), "relative_asymmetry: matrix not square");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  const double nrm = frobenius_norm(a);
  return nrm == 0.0 ? 0.0 : worst / nrm;
}

double trace(const Matrix& a) {
  require(a.rows() == a.cols(), "trace: matrix not square");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

// ---------------------------------------------------------------------------

SymmetricMatrix::SymmetricMatrix(const Matrix& a) : a_(a) {
  require(a.rows() == a.cols(), "SymmetricMatrix: matrix not square");
  for (std::size_t i = 0; i < a_.rows(); ++i)
    for (std::size_t j = i + 1; j < a_.cols(); ++j) {
      const double avg = 0.5 * (a_(i, j) + a_(j, i));
      a_(i, j) = avg;
      a_(j, i) = avg;
    }
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
  return SymmetricMatrix(Matrix::identity(n));
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> values) {
  return SymmetricMatrix(Matrix::diagonal(values));
}

SymmetricMatrix SymmetricMatrix::scaled(double s) const { return SymmetricMatrix(a_ * s); }

SymmetricMatrix SymmetricMatrix::congruence(const Matrix& t) const {
  return SymmetricMatrix(t.transpose() * (a_ * t));
}

bool SymmetricMatrix::is_positive_definite() const {
  if (size() == 0) return true;
  return sym_eig(*this).values.front() > 0.0;
}

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::spectral: return "spectral";
    case NormKind::frobenius: return "frobenius";
    case NormKind::trace: return "trace";
  }
  return "?";
}

NormKind parse_norm_kind(std::string_view name) {
  if (name == "spectral") return NormKind::spectral;
  if (name == "frobenius" || name == "hs") return NormKind::frobenius;
  if (name == "trace") return NormKind::trace;
  throw InvalidArgument("unknown norm kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

Eigensystem sym_eig(const SymmetricMatrix& input) {
  const std::size_t n = input.size();
  Matrix a = input.matrix();
  Matrix v = Matrix::identity(n);
  const double abs_floor = kJacobiAbsTol * frobenius_norm(a);

  auto pair_converged = [&](std::size_t p, std::size_t q) {
    const double apq = std::abs(a(p, q));
    return apq <= abs_floor ||
           apq <= kJacobiRelTol * std::sqrt(std::abs(a(p, p) * a(q, q)));
  };

  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (pair_converged(p, q)) continue;
        converged = false;
        const double apq = a(p, q);
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(p, r) = a(r, p);
          a(r, q) = s * arp + c * arq;
          a(q, r) = a(r, q);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        if (p != q) off += a(p, q) * a(p, q);
    throw ConvergenceError("sym_eig: Jacobi did not converge in 100 sweeps, off-diagonal norm " +
                               std::to_string(std::sqrt(off)),
                           std::sqrt(off));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  Eigensystem out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

Eigensystem gen_sym_eig(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  require(a.size() == b.size(), "gen_sym_eig: size mismatch");
  const Cholesky chol(b);
  // C = L^{-1} A L^{-T}
  const Matrix la = chol.forward(a.matrix());
  const Matrix c = chol.forward(la.transpose());
  Eigensystem es = sym_eig(SymmetricMatrix(c));
  es.vectors = chol.backward(es.vectors);
  return es;
}

SymmetricMatrix inv_sqrt(const SymmetricMatrix& a) {
  const Eigensystem es = sym_eig(a);
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(es.values[k] > 0.0)) {
      throw NotPositiveDefinite(
          "inv_sqrt: matrix has nonpositive eigenvalue " + std::to_string(es.values[k]), k,
          es.values[k]);
    }
  }
  Matrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = 1.0 / std::sqrt(es.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = es.vectors(i, k) * f;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * es.vectors(j, k);
    }
  }
  return SymmetricMatrix(r);
}

std::vector<double> singular_values(const Matrix& input) {
  // One-sided Jacobi on the columns of a tall matrix.
  Matrix a = input.rows() >= input.cols() ? input : input.transpose();
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const double eps = std::numeric_limits<double>::epsilon();
  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= m * eps * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
      }
    }
  }
  if (!converged)
    throw ConvergenceError("singular_values: one-sided Jacobi did not converge", 0.0);
  std::vector<double> s(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> col = a.column(j);
    s[j] = norm2(col);
  }
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

double ui_norm_diagonal(std::span<const double> values, NormKind kind) {
  switch (kind) {
    case NormKind::spectral: {
      double m = 0.0;
      for (double v : values) m = std::max(m, std::abs(v));
      return m;
    }
    case NormKind::frobenius: return norm2(values);
    case NormKind::trace: {
      double s = 0.0;
      for (double v : values) s += std::abs(v);
      return s;
    }
  }
  return 0.0;
}

double ui_norm(const Matrix& a, NormKind kind) {
  if (kind == NormKind::frobenius) return frobenius_norm(a);
  const std::vector<double> s = singular_values(a);
  return ui_norm_diagonal(s, kind);
}

// ---------------------------------------------------------------------------

Cholesky::Cholesky(const SymmetricMatrix& a) : l_(a.size(), a.size()) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > 0.0)) {
      throw NotPositiveDefinite("Cholesky: nonpositive pivot " + std::to_string(d) +
                                    " at index " + std::to_string(j),
                                j, d);
    }
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / ljj;
    }
  }
}

Matrix Cholesky::forward(const Matrix& b) const {
  require(b.rows() == size(), "Cholesky::forward: size mismatch");
  Matrix x = b;
  const std::size_t n = size();
  for (std::size_t c = 0; c < x.cols(); ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x(k, c);
      x(i, c) = s / l_(i, i);
    }
  return x;
}

Matrix Cholesky::backward(const Matrix& b) const {
  require(b.rows() == size(), "Cholesky::backward: size mismatch");
  Matrix x = b;
  const std::size_t n = size();
  for (std::size_t c = 0; c < x.cols(); ++c)
    for (std::size_t i = n; i-- > 0;) {
      double s = x(i, c);
      for (std::size_t k = i + 1; k < n; ++k) s -= l_(k, i) * x(k, c);
      x(i, c) = s / l_(i, i);
    }
  return x;
}

Matrix Cholesky::solve(const Matrix& b) const { return backward(forward(b)); }

std::vector<double> Cholesky::solve(std::span<const double> b) const {
  return solve(Matrix::column_vector(b)).column(0);
}

// ---------------------------------------------------------------------------

QrDecomposition householder_qr(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  require(m >= n, "householder_qr: matrix must be tall");
  Matrix r = a;
  Matrix q = Matrix::identity(m);
  std::vector<double> v(m);
  for (std::size_t k = 0; k < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k; i < m; ++i) alpha = std::hypot(alpha, r(i, k));
    if (alpha == 0.0) continue;
    if (r(k, k) > 0.0) alpha = -alpha;
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k; i < m; ++i) v[i] = r(i, k);
    v[k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += v[i] * r(i, j);
      s = 2.0 * s / vnorm2;
      for (std::size_t i = k; i < m; ++i) r(i, j) -= s * v[i];
    }
    // Q ← Q·(I − 2vvᵀ/vᵀv)
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t l = k; l < m; ++l) s += q(i, l) * v[l];
      s = 2.0 * s / vnorm2;
      for (std::size_t l = k; l < m; ++l) q(i, l) -= s * v[l];
    }
  }
  // Make diag(R) nonnegative.
  for (std::size_t k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) {
      for (std::size_t j = 0; j < n; ++j) r(k, j) = -r(k, j);
      for (std::size_t i = 0; i < m; ++i) q(i, k) = -q(i, k);
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < std::min(i, n); ++j) r(i, j) = 0.0;
  return {std::move(q), std::move(r)};
}

Matrix orthonormal_completion(const Matrix& basis) {
  const std::size_t n = basis.rows();
  const std::size_t m = basis.cols();
  const QrDecomposition qr = householder_qr(basis);
  return qr.q.columns(m, n - m);
}

// ---------------------------------------------------------------------------

namespace {

bool is_comment_or_blank(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::vector<double> parse_numbers(const std::string& line, std::size_t lineno) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    pos = line.find_first_not_of(" \t\r", pos);
    if (pos == std::string::npos) break;
    const std::size_t end = line.find_first_of(" \t\r", pos);
    const std::string token = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    std::size_t consumed = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != token.size()) {
      throw ParseError("invalid number '" + token + "' at line " + std::to_string(lineno) +
                           ", column " + std::to_string(pos + 1),
                       lineno, pos + 1);
    }
    out.push_back(value);
    if (end == std::string::npos) break;
    pos = end;
  }
  return out;
}

}  // namespace

Matrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::size_t rows = 0, cols = 0, filled = 0;
  Matrix m;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    const std::vector<double> values = parse_numbers(line, lineno);
    if (!have_header) {
      if (values.size() != 2 || values[0] < 0 || values[1] < 0 ||
          values[0] != std::floor(values[0]) || values[1] != std::floor(values[1])) {
        throw ParseError("expected header 'n m' at line " + std::to_string(lineno), lineno, 1);
      }
      rows = static_cast<std::size_t>(values[0]);
      cols = static_cast<std::size_t>(values[1]);
      m = Matrix(rows, cols);
      have_header = true;
      continue;
    }
    if (filled == rows) {
      throw ParseError("unexpected extra row at line " + std::to_string(lineno), lineno, 1);
    }
    if (values.size() != cols) {
      throw ParseError("expected " + std::to_string(cols) + " values at line " +
                           std::to_string(lineno) + ", found " + std::to_string(values.size()),
                       lineno, 1);
    }
    for (std::size_t j = 0; j < cols; ++j) m(filled, j) = values[j];
    ++filled;
  }
  if (!have_header) throw ParseError("missing header 'n m'", lineno + 1, 1);
  if (filled != rows) {
    throw ParseError("expected " + std::to_string(rows) + " rows, found " + std::to_string(filled),
                     lineno + 1, 1);
  }
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open '" + path + "'");
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& a) {
  std::ostringstream os;
  os.precision(17);
  os << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) os << ' ';
      os << a(i, j);
    }
    os << '\n';
  }
  out << os.str();
}

}  // namespace relbounds
