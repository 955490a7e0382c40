#pragma once

// BoundReport: every bound the library can evaluate for one (H, subspace)
// pair, next to the reference value it bounds, with hypothesis flags.
//
// CSV layout (one table, parsed back by read_report_csv):
//   # relbounds report n=<n> m=<m> q=<q> norm=<kind>
//   quantity,index,theorem,lower,upper,actual,hypothesis_ok
// Scalar rows (mu, eta, lambda, lambda_prev, lambda_next, g_q, gamma_s,
// g_lemma, g1, dl, exactness) keep the value in `actual` and leave theorem
// and hypothesis_ok empty. Flag rows are named flag.<name> and only fill
// hypothesis_ok. Missing values are empty cells, infinity is "inf".
//
// JSON layout: a flat object with the same information, keys
//   n, m, q, norm, mu.<i>, eta.<i>, lambda.<i>, <scalar>, flag.<name>,
//   bound.<k>.{quantity,index,theorem,lower,upper,actual,hypothesis_ok}
// with missing values as null and infinity as the string "inf".

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relbounds/bounds.hpp"
#include "relbounds/defect.hpp"
#include "relbounds/densela.hpp"

namespace relbounds {

struct BoundEntry {
  std::string quantity;  // rel_error, rel_error_norm, rel_error_sum, eta_sq_sum,
                         // abs_error_norm, abs_error_sum
  std::size_t index = 0; // 1-based Ritz index, 0 for aggregates
  Theorem theorem = Theorem::first_order;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> actual;
  bool hypothesis_ok = false;

  friend bool operator==(const BoundEntry&, const BoundEntry&) = default;
};

struct ReportScalar {
  std::string name;
  std::size_t index = 0;
  std::optional<double> value;

  friend bool operator==(const ReportScalar&, const ReportScalar&) = default;
};

struct ReportFlag {
  std::string name;
  bool ok = false;

  friend bool operator==(const ReportFlag&, const ReportFlag&) = default;
};

struct BoundReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t q = 1;
  NormKind norm = NormKind::spectral;
  std::vector<ReportScalar> scalars;
  std::vector<ReportFlag> flags;
  std::vector<BoundEntry> bounds;

  std::optional<double> scalar(const std::string& name, std::size_t index = 0) const;
  /// Throws InvalidArgument for an unknown flag.
  bool flag(const std::string& name) const;
  std::vector<const BoundEntry*> find(const std::string& quantity, Theorem theorem) const;

  friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

struct AnalyzeOptions {
  NormKind norm = NormKind::spectral;
  std::size_t q = 1;  // index of the first eigenvalue of the target cluster
  // λ_q … λ_{q+m−1} count as one eigenvalue when their spread is below
  // cluster_tol·λ_{q+m−1}
  double cluster_tol = 1e-10;
};

/// Reference eigenvalues come from sym_eig(H). Hypothesis failures are
/// recorded in the flags, never thrown.
BoundReport analyze(const SymmetricMatrix& h, const TestSubspace& s,
                    const AnalyzeOptions& options = {});

void write_report_csv(std::ostream& out, const BoundReport& r);
BoundReport read_report_csv(std::istream& in);

void write_report_json(std::ostream& out, const BoundReport& r);
BoundReport read_report_json(std::istream& in);

/// Human-readable table, numbers in %.4e.
void write_report_table(std::ostream& out, const BoundReport& r);

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite.
std::string format_double(double x);

}  // namespace relbounds
