#pragma once

// Random instance generators and small independent oracles shared by the
// test executables.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "relbounds/densela.hpp"

namespace testing {

using relbounds::Matrix;
using relbounds::SymmetricMatrix;

inline Matrix gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix a(rows, cols);
  for (double& x : a.data()) x = nd(rng);
  return a;
}

inline Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  return relbounds::householder_qr(gaussian(n, n, rng)).q;
}

/// Q·diag(values)·Qᵀ with a random orthogonal Q.
inline SymmetricMatrix with_spectrum(std::span<const double> values, const Matrix& q) {
  return SymmetricMatrix(q * Matrix::diagonal(values) * q.transpose());
}

/// Eigenvalues log-uniform in [lo, hi].
inline std::vector<double> log_uniform(std::size_t n, double lo, double hi,
                                       std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> v(n);
  for (double& x : v) x = std::exp(u(rng));
  return v;
}

inline SymmetricMatrix random_spd(std::size_t n, std::mt19937_64& rng, double lo = 0.1,
                                  double hi = 10.0) {
  const auto values = log_uniform(n, lo, hi, rng);
  return with_spectrum(values, random_orthogonal(n, rng));
}

/// SPD matrix whose lowest eigenvalue `lambda` has multiplicity m; the rest
/// lie in [gap·lambda, top]. Returns the eigenvectors in `q` (columns
/// 0..m−1 span the lowest eigenspace) and the sorted spectrum in `spectrum`.
struct ClusterInstance {
  SymmetricMatrix h;
  Matrix q;
  std::vector<double> spectrum;
};

inline ClusterInstance cluster_instance(std::size_t n, std::size_t m, double lambda,
                                        double gap, double top, std::mt19937_64& rng) {
  ClusterInstance ci;
  ci.spectrum.assign(m, lambda);
  const auto rest = log_uniform(n - m, gap * lambda, top, rng);
  ci.spectrum.insert(ci.spectrum.end(), rest.begin(), rest.end());
  ci.q = random_orthogonal(n, rng);
  ci.h = with_spectrum(ci.spectrum, ci.q);
  std::sort(ci.spectrum.begin(), ci.spectrum.end());
  return ci;
}

/// Orthonormal basis of span(V + eps·G), V = given columns.
inline Matrix perturbed_basis(const Matrix& v, double eps, std::mt19937_64& rng) {
  Matrix g = gaussian(v.rows(), v.cols(), rng);
  g *= eps;
  return relbounds::householder_qr(v + g).q.columns(0, v.cols());
}

/// Orthonormal basis of a uniformly random m-dimensional subspace of R^n.
inline Matrix householder_basis(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  return relbounds::householder_qr(gaussian(n, m, rng)).q.columns(0, m);
}

/// Rotation of the plane (i, j) by angle t applied to the identity.
inline Matrix givens(std::size_t n, std::size_t i, std::size_t j, double t) {
  Matrix g = Matrix::identity(n);
  g(i, i) = std::cos(t);
  g(j, j) = std::cos(t);
  g(i, j) = -std::sin(t);
  g(j, i) = std::sin(t);
  return g;
}

/// Real roots of x³ + c2·x² + c1·x + c0 (three real roots assumed), ascending,
/// by bisection on the monotone pieces between the critical points.
inline std::array<double, 3> cubic_roots(double c2, double c1, double c0) {
  const auto p = [&](double x) { return ((x + c2) * x + c1) * x + c0; };
  const double disc = std::max(0.0, 4 * c2 * c2 - 12 * c1);
  const double s = std::sqrt(disc);
  const double d1 = (-2 * c2 - s) / 6;
  const double d2 = (-2 * c2 + s) / 6;
  const double bound = 1 + std::max({std::abs(c2), std::abs(c1), std::abs(c0)});
  const auto bisect = [&](double a, double b) {
    double fa = p(a);
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double fm = p(mid);
      if (fm == 0) return mid;
      if ((fm < 0) == (fa < 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };
  return {bisect(-bound, d1), bisect(d1, d2), bisect(d2, bound)};
}

/// Characteristic polynomial coefficients of a 3×3 symmetric matrix.
inline std::array<double, 3> charpoly3(const SymmetricMatrix& a) {
  const double tr = a(0, 0) + a(1, 1) + a(2, 2);
  const double minors = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1) + a(0, 0) * a(2, 2) -
                        a(0, 2) * a(0, 2) + a(1, 1) * a(2, 2) - a(1, 2) * a(1, 2);
  const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(1, 2)) -
                     a(0, 1) * (a(0, 1) * a(2, 2) - a(1, 2) * a(0, 2)) +
                     a(0, 2) * (a(0, 1) * a(1, 2) - a(1, 1) * a(0, 2));
  return {-tr, minors, -det};
}

/// max |a_i − b_i| / max(|b_i|, floor)
inline double max_rel_diff(std::span<const double> a, std::span<const double> b,
                           double floor = 1e-300) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), floor));
  return worst;
}

}  // namespace testing

namespace testing {

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(3.141592653589793 * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace testing
