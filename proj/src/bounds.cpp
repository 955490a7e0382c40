#include "relbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "relbounds/errors.hpp"

namespace relbounds {

namespace {

constexpr double kInvertibleTol = 1e-12;

std::vector<double> squares(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return x * x; });
  return out;
}

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void require_gap(double g, const char* what) {
  if (!(g > 0.0)) throw HypothesisError(std::string(what) + ": gap " + std::to_string(g) +
                                        " is not positive");
}

}  // namespace

std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::first_order: return "first_order";
    case Theorem::cluster_T33: return "cluster_T33";
    case Theorem::sandwich_T34: return "sandwich_T34";
    case Theorem::trace_T34: return "trace_T34";
    case Theorem::prop_36: return "prop_36";
    case Theorem::classical_TK: return "classical_TK";
    case Theorem::abs_cluster: return "abs_cluster";
  }
  return "?";
}

Theorem parse_theorem(std::string_view name) {
  for (Theorem t : {Theorem::first_order, Theorem::cluster_T33, Theorem::sandwich_T34,
                    Theorem::trace_T34, Theorem::prop_36, Theorem::classical_TK,
                    Theorem::abs_cluster}) {
    if (to_string(t) == name) return t;
  }
  throw InvalidArgument("unknown theorem tag '" + std::string(name) + "'");
}

double relative_gap_gq(std::span<const double> spec_rest, double lambda_q) {
  double g = kInfinity;
  for (double mu : spec_rest) {
    if (!(mu > 0.0)) throw InvalidArgument("relative_gap_gq: spectrum must be positive");
    g = std::min(g, std::abs(lambda_q - mu) / mu);
  }
  return g;
}

double gamma_s(double lambda_qm1, double lambda_qpm, double mu1, double mum) {
  const double right =
      std::isinf(lambda_qpm) ? 1.0 : (lambda_qpm - mum) / (lambda_qpm + mum);
  const double left = lambda_qm1 == 0.0 ? 1.0 : (mu1 - lambda_qm1) / (mu1 + lambda_qm1);
  return std::min(left, right);
}

double gq_lower_bound_lemma(double eta_m, double mu1, double mum, double lambda_qm1,
                            double lambda_qpm) {
  if (!(eta_m >= 0.0 && eta_m < 1.0)) {
    throw InvalidArgument("gq_lower_bound_lemma: need 0 <= eta_m < 1, got " +
                          std::to_string(eta_m));
  }
  const double e = eta_m / (1.0 - eta_m);
  const double left = lambda_qm1 == 0.0
                          ? kInfinity
                          : (mu1 * (1.0 - eta_m) - (1.0 + e) * lambda_qm1) /
                                ((1.0 + e) * lambda_qm1);
  const double right = std::isinf(lambda_qpm)
                           ? 1.0
                           : ((1.0 - e) * lambda_qpm - (1.0 + eta_m) * mum) /
                                 ((1.0 - e) * lambda_qpm);
  return std::min(left, right);
}

bool cluster_hypothesis(double eta_m, double gamma) {
  return eta_m < 1.0 && eta_m / (1.0 - eta_m) < gamma;
}

double classical_temple_kato(double mu, double res_norm_sq, double lambda2_lb) {
  if (!(lambda2_lb > mu)) {
    throw HypothesisError("classical_temple_kato: need lambda2 > mu (lambda2 = " +
                          std::to_string(lambda2_lb) + ", mu = " + std::to_string(mu) + ")");
  }
  return mu - res_norm_sq / (lambda2_lb - mu);
}

Interval first_order_bounds(double mu, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw InvalidArgument("first_order_bounds: need 0 <= eta < 1, got " + std::to_string(eta));
  }
  return {(1.0 - eta) * mu, (1.0 + eta) * mu};
}

bool first_order_localizes(double mu, double eta, double lambda2) {
  if (std::isinf(lambda2)) return eta < 1.0;
  return eta < (lambda2 - mu) / (lambda2 + mu);
}

double cluster_upper_bound(const DefectSpectrum& etas, double g_q, NormKind kind) {
  if (all_zero(etas.etas)) return 0.0;
  require_gap(g_q, "cluster_upper_bound");
  if (std::isinf(g_q)) return 0.0;
  return etas.largest() / g_q * ui_norm_diagonal(etas.etas, kind);
}

Interval sandwich_bounds(const DefectSpectrum& etas, double g1, NormKind kind) {
  const double lower = ui_norm_diagonal(squares(etas.etas), kind);
  if (lower == 0.0) return {0.0, 0.0};
  require_gap(g1, "sandwich_bounds");
  return {lower, lower / g1};
}

std::vector<Interval> sandwich_per_index(const DefectSpectrum& etas, double g1) {
  std::vector<Interval> out;
  out.reserve(etas.etas.size());
  for (double e : etas.etas) {
    const double e2 = e * e;
    if (e2 == 0.0) {
      out.push_back({0.0, 0.0});
      continue;
    }
    require_gap(g1, "sandwich_per_index");
    out.push_back({e2, e2 / g1});
  }
  return out;
}

Interval trace_sandwich(const DefectSpectrum& etas, double g1) {
  const double s = etas.sum_squares();
  if (s == 0.0) return {0.0, 0.0};
  require_gap(g1, "trace_sandwich");
  return {s, s / g1};
}

double g1_from_spectral_gap(double lambda_mp1, double mum) {
  if (std::isinf(lambda_mp1)) return 1.0;
  if (!(lambda_mp1 > mum)) {
    throw HypothesisError("g1_from_spectral_gap: need lambda_{m+1} > mu_m (" +
                          std::to_string(lambda_mp1) + " vs " + std::to_string(mum) + ")");
  }
  return (lambda_mp1 - mum) / (lambda_mp1 + mum);
}

std::vector<double> residual_ratios(const MomentMatrices& mm, std::span<const double> mu) {
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out[i] = std::max(0.0, mu[i] * mm.omega(i, i));
  return out;
}

double prop_lower_bound(std::span<const double> mu, std::span<const double> ratios) {
  if (mu.empty()) throw InvalidArgument("prop_lower_bound: empty Ritz list");
  const double total = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  return mu.front() / (2.0 * mu.back()) * total;
}

Interval residual_eta_sandwich(std::span<const double> ratios, double dl) {
  if (!(dl >= 0.0)) throw InvalidArgument("residual_eta_sandwich: dl must be >= 0");
  const double total = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  return {total / (1.0 + dl), total};
}

AbsClusterBounds abs_cluster_bounds(const Matrix& k_block, std::span<const double> mu,
                                    double lambda_mp1, NormKind kind) {
  if (mu.empty() || k_block.cols() != mu.size()) {
    throw InvalidArgument("abs_cluster_bounds: K must have one column per Ritz value");
  }
  const double k_spec = spectral_norm(k_block);
  if (k_spec == 0.0) return {};
  const double denom = lambda_mp1 - mu.back() - k_spec;
  if (!(denom > 0.0)) {
    throw HypothesisError("abs_cluster_bounds: need ||K|| < lambda_{m+1} - mu_m (||K|| = " +
                          std::to_string(k_spec) + ", gap = " +
                          std::to_string(lambda_mp1 - mu.back()) + ")");
  }
  if (std::isinf(denom)) return {};
  const double res_sq = frobenius_norm(k_block) * frobenius_norm(k_block);
  return {ui_norm(k_block, kind) * k_spec / denom, res_sq / denom};
}

double exactness_ratio(const SplitOperator& split, double lambda_q) {
  const double eta2 = frobenius_norm(split.k_s) * frobenius_norm(split.k_s);
  if (eta2 == 0.0) throw InvalidArgument("exactness_ratio: zero defect, ratio undefined");
  const Eigensystem es = sym_eig(split.w);
  const Matrix proj = es.vectors.transpose() * split.k_s;
  double largest = 0.0, smallest = kInfinity;
  for (double w : es.values) {
    const double d = std::abs(1.0 - lambda_q / w);
    largest = std::max(largest, d);
    smallest = std::min(smallest, d);
  }
  if (smallest <= kInvertibleTol * largest) {
    throw SingularMatrix("exactness_ratio: lambda collides with spec(W)", smallest);
  }
  double tr = 0.0;
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    double row = 0.0;
    for (std::size_t j = 0; j < proj.cols(); ++j) row += proj(k, j) * proj(k, j);
    tr += lambda_q / (es.values[k] - lambda_q) * row;
  }
  return 1.0 + tr / eta2;
}

std::vector<double> relative_errors(std::span<const double> mu,
                                    std::span<const double> lambda) {
  if (mu.size() != lambda.size()) throw InvalidArgument("relative_errors: size mismatch");
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out[i] = (mu[i] - lambda[i]) / mu[i];
  return out;
}

}  // namespace relbounds
