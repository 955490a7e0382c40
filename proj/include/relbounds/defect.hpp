#pragma once

// Rayleigh–Ritz data, the P-diagonal split of a positive-definite matrix with
// respect to a test subspace, and the approximation defects η_i computed
// either from the scaled coupling block (Schur route) or from the moment
// matrices Ψ, Ω (moments route).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "relbounds/densela.hpp"

namespace relbounds {

/// Orthonormal basis of an m-dimensional test subspace of R^n, 1 ≤ m < n.
class TestSubspace {
 public:
  /// Throws InvalidArgument unless BᵀB = I to 1e-12 and 1 ≤ m < n.
  explicit TestSubspace(Matrix basis);

  /// Orthonormalizes arbitrary independent columns by Householder QR.
  /// `adjustment` receives ‖Q − columns‖_F.
  static TestSubspace orthonormalized(const Matrix& columns, double* adjustment = nullptr);

  /// Span of the eigenvectors of `a` belonging to its k smallest eigenvalues.
  static TestSubspace lowest(const SymmetricMatrix& a, std::size_t k);

  std::size_t ambient_dim() const noexcept { return basis_.rows(); }
  std::size_t dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

 private:
  Matrix basis_;
};

struct RitzData {
  std::vector<double> mu;  // ascending
  Matrix vectors;          // n×m, column i is u_i
  SymmetricMatrix xi;      // Rayleigh quotient in the Ritz basis, = diag(mu)
};

enum class DefectRoute { schur_block, moments };

std::string_view to_string(DefectRoute route);

struct DefectSpectrum {
  std::vector<double> etas;  // ascending
  DefectRoute route = DefectRoute::schur_block;

  double largest() const { return etas.empty() ? 0.0 : etas.back(); }
  double sum_squares() const;
};

/// H written in the adapted orthonormal basis [u_1 … u_m | completion]:
///   [ Ξ  Kᵀ ]
///   [ K  W  ]
/// H_P = diag(Ξ, W) and K_s = W^{-1/2}·K·Ξ^{-1/2}.
struct SplitOperator {
  Matrix basis;           // n×n orthogonal, Ritz vectors first
  std::vector<double> mu; // Ritz values
  SymmetricMatrix h_p;    // P-diagonal part in the original coordinates
  Matrix k;               // (n−m)×m unscaled coupling block
  Matrix k_s;             // (n−m)×m scaled coupling block
  SymmetricMatrix w;      // (n−m)×(n−m) compression to the complement

  std::size_t dim() const noexcept { return mu.size(); }
};

struct MomentMatrices {
  SymmetricMatrix psi;    // Ψ_ij = (u_i, H^{-1} u_j)
  SymmetricMatrix omega;  // Ω = Ψ − diag(1/μ_i)
};

struct ResidualIdentity {
  SymmetricMatrix lhs;  // I − λ·Ξ^{-1}
  SymmetricMatrix rhs;  // K_sᵀ (I − λ W^{-1})^{-1} K_s
  double defect = 0.0;  // ‖lhs − rhs‖_F
};

RitzData ritz(const SymmetricMatrix& h, const TestSubspace& s);

SplitOperator p_diagonal_split(const SymmetricMatrix& h, const TestSubspace& s);

/// η = singular values of K_s, zero-padded to m, ascending.
DefectSpectrum etas_schur(const SplitOperator& split);

/// Ω = Ψ − D_μ evaluated as (r_i, H^{-1}r_j)/(μ_i μ_j) from the Ritz
/// residuals (Cholesky solves with H), then Ψ = D_μ + Ω.
MomentMatrices moment_matrices(const SymmetricMatrix& h, const RitzData& rd);

/// η_i² = i-th eigenvalue of the pencil (Ω, Ψ).
DefectSpectrum etas_moments(const SymmetricMatrix& psi, const SymmetricMatrix& omega);

/// ‖D_μ^{-1/2}(Ψ − D_μ)D_μ^{-1/2}‖ with D_μ = diag(1/μ_i).
double dl_measure(const SymmetricMatrix& psi, std::span<const double> mu);
/// Same measure read off Ω = Ψ − D_μ, without forming the difference.
double dl_measure(const MomentMatrices& mm, std::span<const double> mu);

/// Schur complement A − X·B^{-1}·Xᵀ. B must be invertible: smallest
/// |eigenvalue| > 1e-12·‖B‖, otherwise SingularMatrix.
SymmetricMatrix wilkinson_schur(const SymmetricMatrix& a, const Matrix& x,
                                const SymmetricMatrix& b);

/// (I − λW^{-1})^{-1} through the eigendecomposition of W. Throws
/// SingularMatrix when λ is within 1e-12 (relative) of spec(W).
SymmetricMatrix relative_resolvent(const SymmetricMatrix& w, double lambda);

ResidualIdentity relative_residual_identity(const SplitOperator& split, const RitzData& rd,
                                            double lambda_q);

/// ((ψ,H^{-1}ψ) − (ψ,H_P^{-1}ψ)) / (ψ,H^{-1}ψ) for ψ ∈ R(P), given as
/// coordinates in the subspace basis. Used by the variational checks.
double defect_quotient(const SymmetricMatrix& h, const TestSubspace& s,
                       std::span<const double> coords);

}  // namespace relbounds
