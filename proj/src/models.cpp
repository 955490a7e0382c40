#include "relbounds/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "relbounds/bounds.hpp"
#include "relbounds/errors.hpp"

namespace relbounds {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

// --- 3×3 family ------------------------------------------------------------

SymmetricMatrix hkappa_matrix(double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("hkappa_matrix: kappa must be positive");
  return SymmetricMatrix{{1.0 / 101, 0.0, -1.0 / 101},
                         {0.0, 1.0 / 100, 0.0},
                         {-1.0 / 101, 0.0, 1.0 + kappa * kappa}};
}

KappaReference hkappa_reference(double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("hkappa_reference: kappa must be positive");
  KappaReference r;
  r.mu = 1.0 / 101;
  r.res_norm = 1.0 / 101;
  r.eta = 1.0 / std::sqrt(101.0 * (1.0 + kappa * kappa));
  r.eta_quoted = (1.0 / kappa) * std::sqrt(2.0) / std::sqrt(101.0 / (kappa * kappa) + 100.0);
  return r;
}

// --- half-line Schrödinger operator -----------------------------------------

double schrodinger_lambda(double kappa, std::size_t q) {
  if (q < 1) throw InvalidArgument("schrodinger_lambda: q must be >= 1");
  const double nudge = 1e-9;
  const auto f = [kappa](double s) {
    return std::sqrt(std::max(0.0, kappa * kappa - s * s)) + s / std::tan(s);
  };
  double a = (static_cast<double>(q) - 0.5) * kPi + nudge;
  double b = std::min(static_cast<double>(q) * kPi, kappa) - nudge;
  if (!(a < b) || !(f(a) > 0.0) || !(f(b) < 0.0)) {
    throw HypothesisError("schrodinger_lambda: mode " + std::to_string(q) +
                          " is not bound at kappa = " + std::to_string(kappa));
  }
  // bisect down to adjacent doubles
  while (true) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (f(mid) > 0.0) a = mid;
    else b = mid;
  }
  const double s = 0.5 * (a + b);
  return s * s;
}

double schrodinger_taylor(double kappa) {
  const double k = kappa;
  const double pi2 = kPi * kPi;
  return 2.0 / k - 3.0 / (k * k) + 8.0 * (0.5 + pi2 / 24.0) / (k * k * k) -
         10.0 * (0.5 + 4.0 * pi2 / 24.0) / (k * k * k * k);
}

double schrodinger_eta2(double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("schrodinger_eta2: kappa must be positive");
  return 2.0 / (3.0 + kappa);
}

double schrodinger_eta2_fd(double kappa, double length, std::size_t n, double scale) {
  if (!(length > 1.0) || n < 4) throw InvalidArgument("schrodinger_eta2_fd: need L > 1, n >= 4");
  const double h = length / static_cast<double>(n);
  const std::size_t unknowns = n - 1;
  // tridiagonal a·(−1, 2, −1) + scale·V with a = scale/h²
  const double a = scale / (h * h);
  std::vector<double> pot(unknowns), rhs(unknowns);
  for (std::size_t i = 0; i < unknowns; ++i) {
    const double x = static_cast<double>(i + 1) * h;
    double v = 0.0;
    if (std::abs(x - 1.0) < 0.5 * h) v = 0.5 * kappa * kappa;
    else if (x > 1.0) v = kappa * kappa;
    pot[i] = scale * v;
    rhs[i] = x < 1.0 ? std::sqrt(2.0) * std::sin(kPi * x) : 0.0;
  }
  // Thomas elimination keeping the pivot excess g_i = d_i − a, which obeys
  // g_i = scale·v_i + a·g_{i−1}/(a + g_{i−1}) with only positive terms.
  // Forming d_i = 2a + scale·v_i − a²/d_{i−1} instead loses ~eps·i² in g_i.
  std::vector<double> ratio(unknowns), w(unknowns);
  double g = a + pot[0];
  double prev = 0.0;
  for (std::size_t i = 0; i < unknowns; ++i) {
    if (i > 0) g = pot[i] + a * g / (a + g);
    const double d = a + g;
    ratio[i] = a / d;
    prev = (rhs[i] + a * prev) / d;
    w[i] = prev;
  }
  for (std::size_t i = unknowns - 1; i-- > 0;) w[i] += ratio[i] * w[i + 1];
  double ip = 0.0;
  for (std::size_t i = 0; i < unknowns; ++i) ip += rhs[i] * w[i];
  ip *= h;
  const double inv_mu = 1.0 / (scale * kPi * kPi);
  return (ip - inv_mu) / ip;
}

double schrodinger_d(double kappa) {
  return (1.0 - std::sqrt(2.0 / (3.0 + kappa))) * 4.0 * kPi * kPi;
}

SchrodingerBounds schrodinger_bounds(double kappa) {
  const double d = schrodinger_d(kappa);
  const double pi2 = kPi * kPi;
  if (!(d > pi2)) {
    throw HypothesisError("schrodinger_bounds: D(kappa) = " + std::to_string(d) +
                          " does not exceed pi^2");
  }
  const double eta2 = schrodinger_eta2(kappa);
  return {eta2, (d + pi2) / (d - pi2) * eta2};
}

// --- anti-periodic problem -------------------------------------------------

std::vector<PeriodicMode> periodic_exact(double theta, double alpha, std::size_t count) {
  const double shift = theta / (2.0 * kPi);
  const long reach = static_cast<long>(count) + 2;
  std::vector<PeriodicMode> modes;
  for (long k = -reach; k <= reach; ++k) {
    const double f = static_cast<double>(k) + shift;
    modes.push_back({f * f - alpha, f});
  }
  std::sort(modes.begin(), modes.end(), [](const PeriodicMode& a, const PeriodicMode& b) {
    return a.lambda != b.lambda ? a.lambda < b.lambda : a.frequency < b.frequency;
  });
  modes.resize(count);
  for (const PeriodicMode& m : modes) {
    if (!(m.lambda > 0.0)) {
      throw InvalidArgument("periodic_exact: nonpositive eigenvalue " + std::to_string(m.lambda) +
                            " at frequency " + std::to_string(m.frequency));
    }
  }
  return modes;
}

FemMatrices fem_assemble(std::size_t n, double theta, double alpha) {
  if (std::abs(theta - kPi) > 1e-15) {
    throw InvalidArgument("fem_assemble: only theta = pi (real anti-periodic case) is supported");
  }
  if (n < 4) throw InvalidArgument("fem_assemble: need N >= 4");
  const double h = 2.0 * kPi / static_cast<double>(n);
  Matrix k(n, n), m(n, n);
  const double ke[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
  const double me[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t idx[2] = {e, (e + 1) % n};
    const double sign[2] = {1.0, e + 1 == n ? -1.0 : 1.0};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        k(idx[i], idx[j]) += sign[i] * sign[j] * ke[i][j];
        m(idx[i], idx[j]) += sign[i] * sign[j] * me[i][j];
      }
  }
  FemMatrices out;
  out.stiffness = SymmetricMatrix(k);
  out.mass = SymmetricMatrix(m);
  out.form = SymmetricMatrix(k - alpha * m);
  out.h = h;
  return out;
}

FemRitz fem_ritz(std::size_t n, double alpha, std::size_t m, double scale) {
  const FemMatrices fm = fem_assemble(n, kPi, alpha);
  if (m < 1 || m >= n) throw InvalidArgument("fem_ritz: need 1 <= m < N");
  // Anti-periodic coupling makes (stiffness, mass) skew-circulant: cos(x·j)
  // and sin(x·j) with x = (r + 1/2)h are eigenvectors, with eigenvalue
  // (6/h²)(1 − cos x)/(2 + cos x). The closed form avoids the conditioning
  // of the small eigenvalue of the shifted form.
  const double h = fm.h;
  struct Mode {
    double value;
    double x;
    bool sine;
  };
  std::vector<Mode> modes;
  for (std::size_t r = 0; 2 * r < n; ++r) {
    const double x = (static_cast<double>(r) + 0.5) * h;
    const double s = std::sin(0.5 * x);
    const double value = scale * (12.0 * s * s / (h * h * (2.0 + std::cos(x))) - alpha);
    modes.push_back({value, x, false});
    if (2 * r + 1 < n) modes.push_back({value, x, true});
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const Mode& a, const Mode& b) { return a.value < b.value; });
  FemRitz out;
  out.h = h;
  out.coeffs = Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= m) {
      out.rest.push_back(modes[i].value);
      continue;
    }
    out.mu.push_back(modes[i].value);
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = modes[i].x * static_cast<double>(j);
      c[j] = modes[i].sine ? std::sin(t) : std::cos(t);
    }
    const std::vector<double> mc = fm.mass.matrix() * std::span<const double>(c);
    const double norm = std::sqrt(dot(c, mc));
    for (std::size_t j = 0; j < n; ++j) out.coeffs(j, i) = c[j] / norm;
  }
  return out;
}

double fourier_moment(std::span<const std::complex<double>> a,
                      std::span<const std::complex<double>> b, double alpha, double scale) {
  if (a.size() != b.size() || a.size() % 2 != 0) {
    throw InvalidArgument("fourier_moment: coefficient arrays must have equal even length");
  }
  const long kk = static_cast<long>(a.size() / 2) - 1;
  double sum = 0.0;
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    const double nu = static_cast<double>(static_cast<long>(idx) - kk - 1) + 0.5;
    sum += (std::conj(a[idx]) * b[idx]).real() / (scale * (nu * nu - alpha));
  }
  return sum;
}

std::vector<std::complex<double>> p1_fourier_coefficients(std::span<const double> c,
                                                          std::size_t k_trunc) {
  const std::size_t n = c.size();
  const double h = 2.0 * kPi / static_cast<double>(n);
  // e^{−iνt_j} only depends on k mod N, ν = k + 1/2
  std::vector<std::complex<double>> by_residue(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::complex<double> s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = (static_cast<double>(r) + 0.5) * static_cast<double>(j) * h;
      s += c[j] * std::polar(1.0, -phase);
    }
    by_residue[r] = s;
  }
  const long kk = static_cast<long>(k_trunc);
  const long nn = static_cast<long>(n);
  const double norm = h / std::sqrt(2.0 * kPi);
  std::vector<std::complex<double>> out(2 * k_trunc + 2);
  for (long k = -kk - 1; k <= kk; ++k) {
    const double nu = static_cast<double>(k) + 0.5;
    const double x = 0.5 * nu * h;
    const double sinc = std::sin(x) / x;
    const long r = ((k % nn) + nn) % nn;
    out[static_cast<std::size_t>(k + kk + 1)] = norm * sinc * sinc * by_residue[r];
  }
  return out;
}

namespace {

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double tail_bound(double l1a, double l1b, double h, std::size_t k_trunc, double scale) {
  const double kp1 = static_cast<double>(k_trunc) + 1.0;
  return 32.0 * l1a * l1b / (5.0 * kPi * h * h * std::pow(kp1, 5)) / scale;
}

void check_alpha(double alpha, std::size_t k_trunc) {
  const double nu = static_cast<double>(k_trunc) + 1.5;
  if (!(alpha < 0.25) || alpha > 0.5 * nu * nu) {
    throw InvalidArgument("periodic moments: need alpha < 1/4 (positive spectrum)");
  }
}

}  // namespace

MomentValue periodic_hinv_moment(std::span<const double> psi, std::span<const double> phi,
                                 double theta, double alpha, std::size_t k_trunc,
                                 double tolerance, double scale) {
  if (std::abs(theta - kPi) > 1e-15) {
    throw InvalidArgument("periodic_hinv_moment: only theta = pi is supported");
  }
  if (psi.size() != phi.size() || psi.size() < 4) {
    throw InvalidArgument("periodic_hinv_moment: nodal vectors must match, N >= 4");
  }
  check_alpha(alpha, k_trunc);
  const double h = 2.0 * kPi / static_cast<double>(psi.size());
  MomentValue mv;
  mv.tail_bound = tail_bound(l1(psi), l1(phi), h, k_trunc, scale);
  if (mv.tail_bound > tolerance) {
    throw InvalidArgument("periodic_hinv_moment: truncation tail bound " +
                          std::to_string(mv.tail_bound) + " exceeds tolerance " +
                          std::to_string(tolerance) + "; increase K_trunc");
  }
  const auto a = p1_fourier_coefficients(psi, k_trunc);
  const auto b = p1_fourier_coefficients(phi, k_trunc);
  mv.value = fourier_moment(a, b, alpha, scale);
  return mv;
}

SymmetricMatrix periodic_hinv_gram(const Matrix& coeffs, double alpha, std::size_t k_trunc,
                                   double* tail, double scale) {
  check_alpha(alpha, k_trunc);
  const std::size_t m = coeffs.cols();
  const double h = 2.0 * kPi / static_cast<double>(coeffs.rows());
  std::vector<std::vector<std::complex<double>>> fc(m);
  std::vector<double> norms(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto col = coeffs.column(i);
    fc[i] = p1_fourier_coefficients(col, k_trunc);
    norms[i] = l1(col);
  }
  Matrix psi(m, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      psi(i, j) = psi(j, i) = fourier_moment(fc[i], fc[j], alpha, scale);
      worst = std::max(worst, tail_bound(norms[i], norms[j], h, k_trunc, scale));
    }
  if (tail) *tail = worst;
  return SymmetricMatrix(psi);
}

Table1Row table1_row(std::size_t n, std::size_t k_trunc, double scale) {
  if (n < 8) throw InvalidArgument("table1_row: need N >= 8");
  const double lambda = scale * kPeriodicLambda;
  const FemRitz fr = fem_ritz(n, kPeriodicAlpha, 2, scale);
  Table1Row row;
  row.n = n;
  row.mu = fr.mu;
  const SymmetricMatrix psi =
      periodic_hinv_gram(fr.coeffs, kPeriodicAlpha, k_trunc, &row.tail_bound, scale);
  Matrix omega = psi.matrix();
  for (std::size_t i = 0; i < 2; ++i) omega(i, i) -= 1.0 / fr.mu[i];
  const DefectSpectrum etas = etas_moments(psi, SymmetricMatrix(omega));
  row.etas = etas.etas;
  std::vector<double> eta2(2), rel(2);
  for (std::size_t i = 0; i < 2; ++i) {
    eta2[i] = etas.etas[i] * etas.etas[i];
    rel[i] = 1.0 - lambda / fr.mu[i];
  }
  row.lower = ui_norm_diagonal(eta2, NormKind::frobenius);
  row.middle = ui_norm_diagonal(rel, NormKind::frobenius);
  row.g_q = relative_gap_gq(fr.rest, lambda);
  row.upper = cluster_upper_bound(etas, row.g_q, NormKind::frobenius);
  const double lambda3 = scale * periodic_exact(kPi, kPeriodicAlpha, 3)[2].lambda;
  row.gamma_s = gamma_s(0.0, lambda3, fr.mu[0], fr.mu[1]);
  row.cluster_hypothesis = cluster_hypothesis(etas.largest(), row.gamma_s);
  return row;
}

}  // namespace relbounds
