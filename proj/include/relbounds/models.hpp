#pragma once

// Exactly analyzable model problems with reference values:
//  * a 3×3 positive-definite family H_κ with test vector e1,
//  * −u'' + κ²·χ_[1,∞) u on the half line, its lowest Dirichlet-like mode
//    and the test function √2·sin(πx) on [0, 1],
//  * −ψ'' − αψ on [0, 2π] with anti-periodic boundary conditions (θ = π),
//    discretized by P1 finite elements, with H^{-1} moments by Fourier series.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "relbounds/defect.hpp"
#include "relbounds/densela.hpp"

namespace relbounds {

// --- 3×3 family ------------------------------------------------------------

/// [[1/101, 0, −1/101], [0, 1/100, 0], [−1/101, 0, 1 + κ²]]
SymmetricMatrix hkappa_matrix(double kappa);

struct KappaReference {
  double mu = 0.0;        // (e1, H e1) = 1/101
  double res_norm = 0.0;  // ‖H e1 − μ e1‖ = 1/101
  double eta = 0.0;       // defect of span{e1}: 1/√(101(1 + κ²))
  /// (1/κ)·√2/√(101κ⁻² + 100). Kept for comparison only; it is not the
  /// defect of span{e1} (larger by √(2·101(1+κ²)/(101 + 100κ²)) → √2.02).
  double eta_quoted = 0.0;
};

KappaReference hkappa_reference(double kappa);

// --- half-line Schrödinger operator -----------------------------------------

/// λ_q solving √(κ² − λ) = −√λ·cot √λ, by bisection in s = √λ on
/// ((q − 1/2)π, min(qπ, κ)). Throws HypothesisError if the bracket has no
/// sign change (mode q not bound at this κ).
double schrodinger_lambda(double kappa, std::size_t q = 1);

/// Four-term expansion of (π² − λ_1)/π² in 1/κ.
double schrodinger_taylor(double kappa);

/// η² of the test function √2·sin(πx)·χ_[0,1]: 2/(3 + κ).
double schrodinger_eta2(double kappa);

/// Finite-difference oracle for schrodinger_eta2: central differences on
/// [0, L] with n intervals, homogeneous Dirichlet at both ends, potential
/// κ²/2 at a node sitting exactly at x = 1, trapezoidal inner products.
/// `scale` multiplies the operator (relative output must not depend on it).
double schrodinger_eta2_fd(double kappa, double length = 10.0, std::size_t n = 20000,
                           double scale = 1.0);

/// D(κ) = (1 − √(2/(3+κ)))·4π², a lower bound for λ_2 when κ ≥ 5.
double schrodinger_d(double kappa);

struct SchrodingerBounds {
  double lower = 0.0;  // 2/(3+κ)
  double upper = 0.0;  // (D + π²)/(D − π²)·2/(3+κ)
};

/// Two-sided bound for (π² − λ_1)/π². Throws HypothesisError if D(κ) ≤ π².
SchrodingerBounds schrodinger_bounds(double kappa);

// --- anti-periodic problem -------------------------------------------------

struct PeriodicMode {
  double lambda = 0.0;     // (k + θ/2π)² − α
  double frequency = 0.0;  // k + θ/2π
};

/// The `count` lowest modes over k ∈ ℤ, ascending (ties by frequency).
/// Throws InvalidArgument if any returned eigenvalue is ≤ 0.
std::vector<PeriodicMode> periodic_exact(double theta, double alpha, std::size_t count);

struct FemMatrices {
  SymmetricMatrix stiffness;  // ∫ψ'φ'
  SymmetricMatrix mass;       // ∫ψφ
  SymmetricMatrix form;       // stiffness − α·mass
  double h = 0.0;
};

/// P1 elements on the uniform N-mesh of [0, 2π]; the last element couples
/// node N−1 to node 0 with a sign flip (ψ(2π) = −ψ(0)). Only θ = π.
FemMatrices fem_assemble(std::size_t n, double theta, double alpha);

struct FemRitz {
  std::vector<double> mu;    // the m lowest generalized eigenvalues
  Matrix coeffs;             // N×m nodal coefficients, mass-orthonormal
  std::vector<double> rest;  // the remaining generalized eigenvalues
  double h = 0.0;
};

/// Generalized eigenpairs of (form, mass), split into the m lowest and the
/// rest, from the discrete Fourier modes of the skew-circulant pair.
/// `scale` multiplies the form.
FemRitz fem_ritz(std::size_t n, double alpha = 0.2499, std::size_t m = 2, double scale = 1.0);

struct MomentValue {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the discarded frequencies
};

/// Σ over ν = k + 1/2, −K−1 ≤ k ≤ K, of conj(a_ν)·b_ν/(scale·(ν² − α)).
/// a, b are indexed by k + K + 1.
double fourier_moment(std::span<const std::complex<double>> a,
                      std::span<const std::complex<double>> b, double alpha,
                      double scale = 1.0);

/// Fourier coefficients (ψ, e^{iνt}/√(2π)) of the P1 function with nodal
/// values c, ν = k + 1/2, −K−1 ≤ k ≤ K.
std::vector<std::complex<double>> p1_fourier_coefficients(std::span<const double> c,
                                                          std::size_t k_trunc);

/// (ψ, H^{-1}φ) for P1 functions ψ, φ given by nodal values, θ = π.
/// Tail bound 32‖c‖₁‖d‖₁/(5π h² (K+1)⁵) (for α ≤ (K+3/2)²/2). Throws
/// InvalidArgument suggesting a larger K if the bound exceeds `tolerance`.
MomentValue periodic_hinv_moment(std::span<const double> psi, std::span<const double> phi,
                                 double theta, double alpha, std::size_t k_trunc,
                                 double tolerance = 1e-10, double scale = 1.0);

/// The m×m matrix Ψ_ij = (u_i, H^{-1}u_j) for the columns of `coeffs`.
SymmetricMatrix periodic_hinv_gram(const Matrix& coeffs, double alpha, std::size_t k_trunc,
                                   double* tail_bound = nullptr, double scale = 1.0);

struct Table1Row {
  std::size_t n = 0;
  double lower = 0.0;   // ‖diag(η²)‖_F
  double middle = 0.0;  // ‖I − λΞ^{-1}‖_F
  double upper = 0.0;   // (η_m/𝔤)·‖diag(η)‖_F
  std::vector<double> mu;
  std::vector<double> etas;
  double g_q = 0.0;
  double gamma_s = 0.0;
  bool cluster_hypothesis = false;
  double tail_bound = 0.0;
};

/// One row of the FEM experiment: θ = π, α = 0.2499, λ = 1e-4, m = 2. 𝔤 is
/// taken over the FEM generalized eigenvalues μ_3..μ_N. `scale` multiplies
/// the operator (and λ); the row must not depend on it.
Table1Row table1_row(std::size_t n, std::size_t k_trunc = 20000, double scale = 1.0);

inline constexpr double kPeriodicAlpha = 0.2499;
inline constexpr double kPeriodicLambda = 1e-4;

}  // namespace relbounds
