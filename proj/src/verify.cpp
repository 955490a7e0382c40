#include "relbounds/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "relbounds/bounds.hpp"
#include "relbounds/defect.hpp"
#include "relbounds/densela.hpp"
#include "relbounds/errors.hpp"
#include "relbounds/models.hpp"
#include "relbounds/report.hpp"

namespace relbounds {

namespace {

using Rng = std::mt19937_64;

Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> nd;
  Matrix a(rows, cols);
  for (double& x : a.data()) x = nd(rng);
  return a;
}

Matrix random_orthogonal(std::size_t n, Rng& rng) { return householder_qr(gaussian(n, n, rng)).q; }

SymmetricMatrix with_spectrum(const std::vector<double>& values, const Matrix& q) {
  Matrix qd = q;
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) qd(i, j) *= values[j];
  return SymmetricMatrix(qd * q.transpose());
}

std::vector<double> log_uniform(std::size_t n, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> v(n);
  for (double& x : v) x = std::exp(u(rng));
  return v;
}

SymmetricMatrix random_spd(std::size_t n, Rng& rng) {
  return with_spectrum(log_uniform(n, 0.1, 10.0, rng), random_orthogonal(n, rng));
}

struct Cluster {
  SymmetricMatrix h;
  Matrix q;
};

// lowest eigenvalue λ of multiplicity m, the rest in [3λ, 20]
Cluster cluster(std::size_t n, std::size_t m, double lambda, Rng& rng) {
  std::vector<double> spec(m, lambda);
  const auto rest = log_uniform(n - m, 3.0 * lambda, 20.0, rng);
  spec.insert(spec.end(), rest.begin(), rest.end());
  Cluster c;
  c.q = random_orthogonal(n, rng);
  c.h = with_spectrum(spec, c.q);
  return c;
}

TestSubspace perturbed(const Matrix& v, double eps, Rng& rng) {
  return TestSubspace::orthonormalized(v + eps * gaussian(v.rows(), v.cols(), rng));
}

TestSubspace random_subspace(std::size_t n, std::size_t m, Rng& rng) {
  return TestSubspace::orthonormalized(gaussian(n, m, rng));
}

std::string fmt(const char* label, double worst, double tol) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s %.3e (tol %.1e)", label, worst, tol);
  return buf;
}

struct Check {
  double worst = 0.0;
  void see(double x) { worst = std::max(worst, std::isnan(x) ? INFINITY : x); }
};

PropertyResult within(std::string name, const char* label, const Check& c, double tol) {
  return {std::move(name), c.worst <= tol, fmt(label, c.worst, tol)};
}

double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace

std::vector<PropertyResult> run_verify(const VerifyOptions& options) {
  std::vector<PropertyResult> out;
  Rng rng(options.seed);
  constexpr double pi = std::numbers::pi;

  // --- densela ---------------------------------------------------------------
  {
    Check res, orth;
    for (int t = 0; t < 10; ++t) {
      const SymmetricMatrix a = random_spd(12, rng);
      const Eigensystem es = sym_eig(a);
      const Matrix r = a.matrix() * es.vectors - es.vectors * Matrix::diagonal(es.values);
      res.see(max_abs(r) / spectral_norm(a));
      orth.see(max_abs(es.vectors.transpose() * es.vectors - Matrix::identity(12)));
    }
    out.push_back(within("sym_eig residual", "max |AV - VL|/|A|", res, 1e-10));
    out.push_back(within("sym_eig orthonormality", "max |VtV - I|", orth, 1e-12));
  }
  {
    Check c;
    for (int t = 0; t < 10; ++t) {
      const SymmetricMatrix a = random_spd(5, rng), b = random_spd(5, rng);
      const SymmetricMatrix r = inv_sqrt(b);
      const auto ref = sym_eig(a.congruence(r)).values;
      const auto got = gen_sym_eig(a, b).values;
      for (std::size_t i = 0; i < 5; ++i) c.see(rel_diff(ref[i], got[i]));
    }
    out.push_back(within("gen_sym_eig vs inverse-square-root reduction", "max rel diff", c, 1e-10));
  }
  {
    Check c;
    for (int t = 0; t < 10; ++t) {
      const Matrix a = gaussian(6, 4, rng);
      const Matrix u = random_orthogonal(6, rng), v = random_orthogonal(4, rng);
      for (NormKind k : {NormKind::spectral, NormKind::frobenius, NormKind::trace})
        c.see(rel_diff(ui_norm(a, k), ui_norm(u * a * v, k)));
    }
    out.push_back(within("unitarily invariant norms", "max rel change", c, 1e-10));
  }

  // --- defect ----------------------------------------------------------------
  {
    Check c;
    for (int t = 0; t < 20; ++t) {
      const SymmetricMatrix h = random_spd(8, rng);
      const Eigensystem es = sym_eig(h);
      const TestSubspace s = perturbed(es.vectors.columns(0, 3), 0.1, rng);
      const RitzData rd = ritz(h, s);
      MomentMatrices mm = moment_matrices(h, rd);
      if (options.mutate_moments) {
        Matrix om = mm.psi.matrix();
        for (std::size_t i = 0; i < 3; ++i) om(i, i) += 1.0 / rd.mu[i];
        mm.omega = SymmetricMatrix(om);
      }
      const auto a = etas_schur(p_diagonal_split(h, s)).etas;
      const auto b = etas_moments(mm.psi, mm.omega).etas;
      for (std::size_t i = 0; i < 3; ++i) c.see(std::abs(a[i] - b[i]));
    }
    out.push_back(within("eta route equivalence", "max |eta_schur - eta_moments|", c, 1e-10));
  }
  {
    bool ok = true;
    Check scale;
    for (int t = 0; t < 20; ++t) {
      const SymmetricMatrix h = random_spd(9, rng);
      const TestSubspace s = random_subspace(9, 1 + t % 4, rng);
      const auto e = etas_schur(p_diagonal_split(h, s)).etas;
      ok = ok && std::is_sorted(e.begin(), e.end()) && e.back() < 1.0 && e.front() >= 0.0;
      const double c = std::exp(std::uniform_real_distribution<double>(-18.0, 18.0)(rng));
      const auto ec = etas_schur(p_diagonal_split(h.scaled(c), s)).etas;
      for (std::size_t i = 0; i < e.size(); ++i) scale.see(std::abs(e[i] - ec[i]));
    }
    out.push_back({"eta ascending in [0, 1)", ok, ok ? "all instances" : "violated"});
    out.push_back(within("eta scaling invariance", "max |eta(cH) - eta(H)|", scale, 1e-12));
  }
  {
    Check c;
    for (int t = 0; t < 20; ++t) {
      const std::size_t m = 1 + t % 3;
      const Cluster cl = cluster(10, m, 0.7, rng);
      const TestSubspace s = perturbed(cl.q.columns(0, m), 0.05, rng);
      const SplitOperator split = p_diagonal_split(cl.h, s);
      const ResidualIdentity id = relative_residual_identity(split, ritz(cl.h, s), 0.7);
      c.see(id.defect / spectral_norm(cl.h));
    }
    out.push_back(within("relative residual identity", "max defect/|H|", c, 1e-10));
  }
  {
    Check c;
    for (int t = 0; t < 20; ++t) {
      const std::size_t n = 7, m = 1 + t % 3;
      std::vector<double> d(n, 0.0);
      const auto b = log_uniform(n - m, 0.5, 5.0, rng);
      std::copy(b.begin(), b.end(), d.begin() + static_cast<long>(m));
      const Matrix s = gaussian(n, n, rng);
      const Matrix mm = s * Matrix::diagonal(d) * s.transpose();
      const SymmetricMatrix a(mm.block(0, 0, m, m));
      const SymmetricMatrix bb(mm.block(m, m, n - m, n - m));
      const Matrix x = mm.block(0, m, m, n - m);
      c.see(frobenius_norm(wilkinson_schur(a, x, bb)) / spectral_norm(mm));
    }
    out.push_back(within("Wilkinson zero complement", "max |complement|/|M|", c, 1e-10));
  }
  {
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      const SymmetricMatrix h = random_spd(8, rng);
      const TestSubspace s = random_subspace(8, 2, rng);
      const RitzData rd = ritz(h, s);
      const MomentMatrices mm = moment_matrices(h, rd);
      const double eta2 = etas_schur(p_diagonal_split(h, s)).sum_squares();
      const Interval iv =
          residual_eta_sandwich(residual_ratios(mm, rd.mu), dl_measure(mm, rd.mu));
      ok = ok && iv.contains(eta2, 1e-12);
    }
    out.push_back({"residual ratios bracket the defect sum", ok, ok ? "all instances" : "violated"});
  }

  // --- bounds ----------------------------------------------------------------
  {
    std::size_t checked = 0, failed = 0;
    std::string first_failure;
    std::uniform_real_distribution<double> eps(1e-3, 3e-2);
    for (int t = 0; t < 30; ++t) {
      const std::size_t m = 1 + t % 3;
      const Cluster cl = cluster(9, m, 1.0, rng);
      const TestSubspace s = perturbed(cl.q.columns(0, m), eps(rng), rng);
      for (NormKind k : {NormKind::spectral, NormKind::frobenius, NormKind::trace}) {
        const BoundReport r = analyze(cl.h, s, {k, 1});
        for (const BoundEntry& b : r.bounds) {
          if (!b.hypothesis_ok || !b.actual) continue;
          const double slack = 1e-12 * std::max(1.0, std::abs(*b.actual));
          const bool lo = !b.lower || *b.lower <= *b.actual + slack;
          const bool hi = !b.upper || *b.actual <= *b.upper + slack;
          ++checked;
          if (!(lo && hi)) {
            if (failed++ == 0) first_failure = b.quantity + "/" + std::string(to_string(b.theorem));
          }
        }
      }
    }
    out.push_back({"bounds bracket the exact errors", failed == 0 && checked > 0,
                   std::to_string(checked) + " bounds checked" +
                       (failed ? ", first failure " + first_failure : "")});
  }
  {
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      const Cluster cl = cluster(8, 2, 1.0, rng);
      const TestSubspace s = perturbed(cl.q.columns(0, 2), 0.2, rng);
      const BoundReport r = analyze(cl.h, s);
      ok = ok && *r.scalar("g_q") >= 0.0 && *r.scalar("gamma_s") <= 1.0;
    }
    out.push_back({"gap quantities in range", ok, ok ? "g_q >= 0, gamma_s <= 1" : "violated"});
  }

  // --- models ----------------------------------------------------------------
  {
    bool ok = true;
    double prev = INFINITY;
    for (double kappa : {10.0, 100.0, 1000.0}) {
      const SymmetricMatrix h = hkappa_matrix(kappa);
      const KappaReference ref = hkappa_reference(kappa);
      const double lam = sym_eig(h).values.front();
      const double dev = std::abs((ref.mu - lam) / ref.mu / (ref.eta * ref.eta) - 1.0);
      ok = ok && dev < prev;
      prev = dev;
    }
    out.push_back({"3x3 family exactness ratio tends to 1", ok && prev <= 5e-2,
                   fmt("|ratio - 1| at kappa=1000", prev, 5e-2)});
  }
  {
    bool ok = true;
    for (double kappa : {5.0, 10.0, 100.0, 1000.0}) {
      const double q = (pi * pi - schrodinger_lambda(kappa)) / (pi * pi);
      const SchrodingerBounds b = schrodinger_bounds(kappa);
      ok = ok && b.lower <= q && q <= b.upper;
    }
    out.push_back({"Schroedinger two-sided bound", ok, "kappa in {5, 10, 100, 1000}"});
    const double err = std::abs((pi * pi - schrodinger_lambda(1000)) / (pi * pi) -
                                schrodinger_taylor(1000));
    out.push_back({"Schroedinger Taylor expansion", err <= 1e-12,
                   fmt("|bisection - Taylor| at kappa=1000", err, 1e-12)});
  }
  {
    const Table1Row a = table1_row(40), b = table1_row(40);
    const bool ordered = a.lower <= a.middle && a.middle <= a.upper;
    const bool same = a.lower == b.lower && a.middle == b.middle && a.upper == b.upper;
    out.push_back({"periodic FEM sandwich (N=40)", ordered, fmt("upper - middle", a.upper - a.middle, 0)});
    out.push_back({"model determinism", same, same ? "bit-identical" : "differs"});
  }

  // --- serialization ---------------------------------------------------------
  {
    bool ok = true;
    for (int t = 0; t < 5; ++t) {
      const Cluster cl = cluster(6, 2, 0.5, rng);
      const BoundReport r = analyze(cl.h, perturbed(cl.q.columns(0, 2), 0.1, rng));
      std::ostringstream c1, j1, c2, j2;
      write_report_csv(c1, r);
      write_report_json(j1, r);
      std::istringstream ci(c1.str()), ji(j1.str());
      write_report_csv(c2, read_report_csv(ci));
      write_report_json(j2, read_report_json(ji));
      ok = ok && c1.str() == c2.str() && j1.str() == j2.str();
    }
    out.push_back({"report round trip", ok, ok ? "CSV and JSON byte-identical" : "differs"});
  }
  return out;
}

}  // namespace relbounds
