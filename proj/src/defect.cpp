#include "relbounds/defect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relbounds/errors.hpp"

namespace relbounds {

namespace {

constexpr double kOrthonormalTol = 1e-12;
constexpr double kInvertibleTol = 1e-12;

// (V·diag(f)·Vᵀ)·X for an eigensystem V.
Matrix spectral_apply(const Eigensystem& es, std::span<const double> f, const Matrix& x) {
  Matrix vtx = es.vectors.transpose() * x;
  for (std::size_t k = 0; k < vtx.rows(); ++k)
    for (std::size_t j = 0; j < vtx.cols(); ++j) vtx(k, j) *= f[k];
  return es.vectors * vtx;
}

}  // namespace

TestSubspace::TestSubspace(Matrix basis) : basis_(std::move(basis)) {
  const std::size_t n = basis_.rows();
  const std::size_t m = basis_.cols();
  if (m < 1 || m >= n) {
    throw InvalidArgument("TestSubspace: need 1 <= m < n, got m=" + std::to_string(m) +
                          ", n=" + std::to_string(n));
  }
  const Matrix gram = basis_.transpose() * basis_;
  const double err = max_abs(gram - Matrix::identity(m));
  if (err > kOrthonormalTol) {
    throw InvalidArgument("TestSubspace: basis not orthonormal (max |BᵀB − I| = " +
                          std::to_string(err) + ")");
  }
}

TestSubspace TestSubspace::orthonormalized(const Matrix& columns, double* adjustment) {
  if (columns.cols() < 1 || columns.cols() >= columns.rows()) {
    throw InvalidArgument("TestSubspace: need 1 <= m < n");
  }
  const QrDecomposition qr = householder_qr(columns);
  const double rmin = [&] {
    double r = std::abs(qr.r(0, 0));
    for (std::size_t k = 1; k < columns.cols(); ++k) r = std::min(r, std::abs(qr.r(k, k)));
    return r;
  }();
  if (rmin <= 1e-12 * std::max(1.0, max_abs(qr.r))) {
    throw InvalidArgument("TestSubspace: basis columns are linearly dependent");
  }
  Matrix q = qr.q.columns(0, columns.cols());
  if (adjustment) *adjustment = frobenius_norm(q - columns);
  return TestSubspace(std::move(q));
}

TestSubspace TestSubspace::lowest(const SymmetricMatrix& a, std::size_t k) {
  const Eigensystem es = sym_eig(a);
  return TestSubspace(es.vectors.columns(0, k));
}

std::string_view to_string(DefectRoute route) {
  return route == DefectRoute::schur_block ? "schur_block" : "moments";
}

double DefectSpectrum::sum_squares() const {
  double s = 0.0;
  for (double e : etas) s += e * e;
  return s;
}

RitzData ritz(const SymmetricMatrix& h, const TestSubspace& s) {
  if (h.size() != s.ambient_dim()) throw InvalidArgument("ritz: dimension mismatch");
  const SymmetricMatrix projected = h.congruence(s.basis());
  const Eigensystem es = sym_eig(projected);
  if (!(es.values.front() > 0.0)) {
    throw NotPositiveDefinite(
        "ritz: projected matrix is not positive definite (smallest Ritz value " +
            std::to_string(es.values.front()) + ")",
        0, es.values.front());
  }
  RitzData rd;
  rd.mu = es.values;
  rd.vectors = s.basis() * es.vectors;
  rd.xi = SymmetricMatrix::diagonal(rd.mu);
  return rd;
}

SplitOperator p_diagonal_split(const SymmetricMatrix& h, const TestSubspace& s) {
  const RitzData rd = ritz(h, s);
  const std::size_t n = s.ambient_dim();
  const std::size_t m = s.dim();
  const Matrix complement = orthonormal_completion(s.basis());

  SplitOperator split;
  split.mu = rd.mu;
  split.basis = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) split.basis(i, j) = rd.vectors(i, j);
    for (std::size_t j = 0; j < n - m; ++j) split.basis(i, m + j) = complement(i, j);
  }
  const Matrix hc = h.matrix() * complement;
  split.w = SymmetricMatrix(complement.transpose() * hc);
  split.k = hc.transpose() * rd.vectors;

  // H_P = U·diag(μ)·Uᵀ + C·W·Cᵀ
  Matrix u_mu = rd.vectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) u_mu(i, j) *= rd.mu[j];
  split.h_p = SymmetricMatrix(u_mu * rd.vectors.transpose() +
                              complement * (split.w.matrix() * complement.transpose()));

  Matrix k_s = inv_sqrt(split.w) * split.k;
  for (std::size_t i = 0; i < n - m; ++i)
    for (std::size_t j = 0; j < m; ++j) k_s(i, j) /= std::sqrt(rd.mu[j]);
  split.k_s = std::move(k_s);
  return split;
}

DefectSpectrum etas_schur(const SplitOperator& split) {
  DefectSpectrum out;
  out.route = DefectRoute::schur_block;
  out.etas = singular_values(split.k_s);
  out.etas.resize(split.dim(), 0.0);
  std::sort(out.etas.begin(), out.etas.end());
  return out;
}

MomentMatrices moment_matrices(const SymmetricMatrix& h, const RitzData& rd) {
  // With r_i = H·u_i − μ_i·u_i ⊥ R(P), H^{-1}u_i = (u_i − H^{-1}r_i)/μ_i gives
  // Ω_ij = (r_i, H^{-1}r_j)/(μ_i·μ_j), free of the cancellation in Ψ − D_μ.
  const std::size_t m = rd.mu.size();
  Matrix res = h.matrix() * rd.vectors;
  for (std::size_t i = 0; i < res.rows(); ++i)
    for (std::size_t j = 0; j < m; ++j) res(i, j) -= rd.mu[j] * rd.vectors(i, j);
  const Matrix y = Cholesky(h).forward(res);  // L^{-1}R, so RᵀH^{-1}R = YᵀY
  Matrix omega = y.transpose() * y;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) omega(i, j) /= rd.mu[i] * rd.mu[j];
  MomentMatrices mm;
  mm.omega = SymmetricMatrix(omega);
  Matrix psi = omega;
  for (std::size_t i = 0; i < m; ++i) psi(i, i) += 1.0 / rd.mu[i];
  mm.psi = SymmetricMatrix(psi);
  return mm;
}

DefectSpectrum etas_moments(const SymmetricMatrix& psi, const SymmetricMatrix& omega) {
  if (psi.size() != omega.size()) throw InvalidArgument("etas_moments: size mismatch");
  const Eigensystem es = gen_sym_eig(omega, psi);
  DefectSpectrum out;
  out.route = DefectRoute::moments;
  out.etas.reserve(es.values.size());
  for (double v : es.values) out.etas.push_back(std::sqrt(std::max(0.0, v)));
  std::sort(out.etas.begin(), out.etas.end());
  return out;
}

double dl_measure(const SymmetricMatrix& psi, std::span<const double> mu) {
  const std::size_t m = mu.size();
  if (psi.size() != m) throw InvalidArgument("dl_measure: size mismatch");
  Matrix scaled(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double dev = psi(i, j) - (i == j ? 1.0 / mu[i] : 0.0);
      scaled(i, j) = std::sqrt(mu[i]) * dev * std::sqrt(mu[j]);
    }
  return spectral_norm(scaled);
}

double dl_measure(const MomentMatrices& mm, std::span<const double> mu) {
  const std::size_t m = mu.size();
  if (mm.omega.size() != m) throw InvalidArgument("dl_measure: size mismatch");
  Matrix scaled(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      scaled(i, j) = std::sqrt(mu[i]) * mm.omega(i, j) * std::sqrt(mu[j]);
  return spectral_norm(scaled);
}

SymmetricMatrix wilkinson_schur(const SymmetricMatrix& a, const Matrix& x,
                                const SymmetricMatrix& b) {
  if (x.rows() != a.size() || x.cols() != b.size()) {
    throw InvalidArgument("wilkinson_schur: block shapes do not match");
  }
  if (b.size() == 0) return a;
  const Eigensystem es = sym_eig(b);
  double smallest = std::abs(es.values.front());
  double largest = 0.0;
  for (double v : es.values) {
    smallest = std::min(smallest, std::abs(v));
    largest = std::max(largest, std::abs(v));
  }
  if (smallest <= kInvertibleTol * largest) {
    throw SingularMatrix("wilkinson_schur: B is numerically singular (smallest |eigenvalue| " +
                             std::to_string(smallest) + ")",
                         smallest);
  }
  std::vector<double> inv(es.values.size());
  for (std::size_t k = 0; k < inv.size(); ++k) inv[k] = 1.0 / es.values[k];
  const Matrix binv_xt = spectral_apply(es, inv, x.transpose());
  return SymmetricMatrix(a.matrix() - x * binv_xt);
}

SymmetricMatrix relative_resolvent(const SymmetricMatrix& w, double lambda) {
  const Eigensystem es = sym_eig(w);
  std::vector<double> d(es.values.size());
  double smallest = INFINITY, largest = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = 1.0 - lambda / es.values[k];
    smallest = std::min(smallest, std::abs(d[k]));
    largest = std::max(largest, std::abs(d[k]));
  }
  if (!d.empty() && smallest <= kInvertibleTol * largest) {
    throw SingularMatrix("I − λW^{-1} is singular: λ = " + std::to_string(lambda) +
                             " collides with spec(W)",
                         smallest);
  }
  for (double& v : d) v = 1.0 / v;
  return SymmetricMatrix(spectral_apply(es, d, Matrix::identity(w.size())));
}

ResidualIdentity relative_residual_identity(const SplitOperator& split, const RitzData& rd,
                                            double lambda_q) {
  const std::size_t m = rd.mu.size();
  if (split.dim() != m) throw InvalidArgument("relative_residual_identity: size mismatch");
  std::vector<double> lhs_diag(m);
  for (std::size_t i = 0; i < m; ++i) lhs_diag[i] = 1.0 - lambda_q / rd.mu[i];
  ResidualIdentity out;
  out.lhs = SymmetricMatrix::diagonal(lhs_diag);
  const SymmetricMatrix resolvent = relative_resolvent(split.w, lambda_q);
  out.rhs = SymmetricMatrix(split.k_s.transpose() * (resolvent.matrix() * split.k_s));
  out.defect = frobenius_norm(out.lhs.matrix() - out.rhs.matrix());
  return out;
}

double defect_quotient(const SymmetricMatrix& h, const TestSubspace& s,
                       std::span<const double> coords) {
  const std::vector<double> psi = s.basis() * coords;
  const std::vector<double> hinv_psi = Cholesky(h).solve(psi);
  const double full = dot(psi, hinv_psi);
  const SymmetricMatrix projected = h.congruence(s.basis());
  const std::vector<double> pinv_c = Cholesky(projected).solve(coords);
  const double galerkin = dot(coords, pinv_c);
  return (full - galerkin) / full;
}

}  // namespace relbounds
