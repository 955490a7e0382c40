#pragma once

// Relative a-posteriori bounds built from the defects η_i and gap data:
// gap measures, first-order and quadratic cluster bounds, the two-sided
// sandwiches and the classical absolute bounds they are compared against.
//
// Conventions: +infinity stands for a missing neighbour (λ_0 := 0 gives an
// infinite left gap, an empty unwanted spectrum gives 𝔤 = ∞) and c/∞ = 0.

#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "relbounds/defect.hpp"
#include "relbounds/densela.hpp"

namespace relbounds {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Theorem {
  first_order,
  cluster_T33,
  sandwich_T34,
  trace_T34,
  prop_36,
  classical_TK,
  abs_cluster,
};

std::string_view to_string(Theorem t);
Theorem parse_theorem(std::string_view name);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x, double slack = 0.0) const {
    return lower - slack <= x && x <= upper + slack;
  }
};

struct GapData {
  double g_q = kInfinity;      // relative gap 𝔤_q
  double gamma_s = 1.0;        // γ_s(λ_q)
  std::size_t q = 1;
  double lambda_qm1 = 0.0;     // λ_{q−1}, 0 for q = 1
  double lambda_qpm = kInfinity;  // λ_{q+m}
  double mu_1 = 0.0;
  double mu_m = 0.0;
};

/// min over μ ∈ spec_rest of |λ_q − μ|/μ; +∞ for an empty list.
double relative_gap_gq(std::span<const double> spec_rest, double lambda_q);

/// min{(λ_{q+m} − μ_m)/(λ_{q+m} + μ_m), (μ_1 − λ_{q−1})/(μ_1 + λ_{q−1})}.
/// λ_{q−1} = 0 and λ_{q+m} = ∞ make the corresponding branch 1.
double gamma_s(double lambda_qm1, double lambda_qpm, double mu1, double mum);

/// Lower bound on 𝔤_q from the defects and neighbouring eigenvalues, valid
/// when η_m/(1 − η_m) < γ_s. Throws InvalidArgument if η_m ∉ [0, 1).
double gq_lower_bound_lemma(double eta_m, double mu1, double mum, double lambda_qm1,
                            double lambda_qpm);

/// Hypothesis of the quadratic cluster bound: η_m/(1 − η_m) < γ_s.
bool cluster_hypothesis(double eta_m, double gamma);

/// μ − ‖Hψ − μψ‖²/(λ_2 − μ). Throws HypothesisError if λ_2 ≤ μ.
double classical_temple_kato(double mu, double res_norm_sq, double lambda2_lb);

/// [(1 − η)μ, (1 + η)μ].
Interval first_order_bounds(double mu, double eta);

/// The first-order interval localizes λ_1 when η < (λ_2 − μ)/(λ_2 + μ).
bool first_order_localizes(double mu, double eta, double lambda2);

/// (η_m/𝔤_q)·|||diag(η)|||, an upper bound for |||I − λ_q Ξ^{-1}|||.
/// Returns 0 for vanishing defects; otherwise throws HypothesisError if 𝔤_q ≤ 0.
double cluster_upper_bound(const DefectSpectrum& etas, double g_q, NormKind kind);

/// [|||diag(η²)|||, |||diag(η²)|||/𝔤_1] for |||I − λ Ξ^{-1}|||.
Interval sandwich_bounds(const DefectSpectrum& etas, double g1, NormKind kind);

/// Per-index form: (μ_i − λ)/μ_i ∈ [η_i², η_i²/𝔤_1], both sides ascending.
std::vector<Interval> sandwich_per_index(const DefectSpectrum& etas, double g1);

/// [Σ η_i², Σ η_i²/𝔤_1] for Σ (μ_i − λ_i)/μ_i.
Interval trace_sandwich(const DefectSpectrum& etas, double g1);

/// (λ_{m+1} − μ_m)/(λ_{m+1} + μ_m); 1 for λ_{m+1} = ∞. Throws HypothesisError
/// if λ_{m+1} ≤ μ_m.
double g1_from_spectral_gap(double lambda_mp1, double mum);

/// ratio_i = ‖Hu_i − μ_i u_i‖²_{H^{-1}} / ‖Hu_i‖²_{H^{-1}} = μ_i·Ω_ii.
std::vector<double> residual_ratios(const MomentMatrices& mm, std::span<const double> mu);

/// (μ_1/(2μ_m))·Σ ratio_i, a lower bound for Σ (μ_i − λ_i)/μ_i when 2η_m < 1.
double prop_lower_bound(std::span<const double> mu, std::span<const double> ratios);

/// [Σ ratio_i/(1 + 𝔇_l), Σ ratio_i] for Σ η_i².
Interval residual_eta_sandwich(std::span<const double> ratios, double dl);

struct AbsClusterBounds {
  double norm_bound = 0.0;   // bound on |||diag(μ_i − λ)|||
  double trace_bound = 0.0;  // bound on Σ |μ_i − λ|
};

/// |||K|||·‖K‖/(λ_{m+1} − μ_m − ‖K‖) and Σ‖r_i‖²/(λ_{m+1} − μ_m − ‖K‖) for
/// the unscaled coupling block K (column i is the residual of u_i).
/// Throws HypothesisError unless ‖K‖ < λ_{m+1} − μ_m, except for K = 0.
AbsClusterBounds abs_cluster_bounds(const Matrix& k_block, std::span<const double> mu,
                                    double lambda_mp1, NormKind kind);

/// 1 + tr(λ·K_sᵀ (W − λ)^{-1} K_s)/Σ η_i². Equals Σ(μ_i − λ)/μ_i / Σ η_i² when
/// λ is the exact cluster eigenvalue. Throws InvalidArgument for Σ η_i² = 0
/// and SingularMatrix if λ collides with spec(W).
double exactness_ratio(const SplitOperator& split, double lambda_q);

/// (μ_i − λ_i)/μ_i
std::vector<double> relative_errors(std::span<const double> mu,
                                    std::span<const double> lambda);

}  // namespace relbounds
