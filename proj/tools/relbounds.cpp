// relbounds command-line driver.
//
// Exit codes: 0 success, 1 other errors, 2 file not found, 3 parse error,
// 4 matrix not positive definite, 5 hypothesis failure under --strict,
// 6 a verify property failed. CLI11 usage errors keep CLI11's codes.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relbounds/bounds.hpp"
#include "relbounds/defect.hpp"
#include "relbounds/densela.hpp"
#include "relbounds/errors.hpp"
#include "relbounds/models.hpp"
#include "relbounds/report.hpp"
#include "relbounds/verify.hpp"

using namespace relbounds;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitNotFound = 2;
constexpr int kExitParse = 3;
constexpr int kExitNotPd = 4;
constexpr int kExitHypothesis = 5;
constexpr int kExitVerify = 6;

struct Output {
  std::string path;
  std::string format;
};

// Writes to --out if given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw FileNotFound("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string sci4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", x);
  return buf;
}

void write_rows(std::ostream& out, const std::string& format,
                const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  if (format == "csv") {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
      out << '\n';
    }
    return;
  }
  char buf[64];
  for (const auto& h : header) {
    std::snprintf(buf, sizeof buf, "%12s ", h.c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& row : rows) {
    for (double v : row) {
      std::snprintf(buf, sizeof buf, "%12s ", sci4(v).c_str());
      out << buf;
    }
    out << '\n';
  }
}

void require_positive(const std::vector<double>& values, const char* what) {
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument(std::string(what) + " must be positive and finite");
}

// --- bounds ----------------------------------------------------------------

struct BoundsArgs {
  std::string matrix;
  std::string subspace;
  std::string precond;
  std::string norm = "spectral";
  std::size_t q = 1;
  bool strict = false;
  Output out{"", "table"};
};

TestSubspace load_subspace(const BoundsArgs& a, std::size_t n) {
  for (const char* prefix : {"lowest-k:", "lowest:"}) {
    const std::string p(prefix);
    if (a.subspace.rfind(p, 0) == 0) {
      const std::string count = a.subspace.substr(p.size());
      std::size_t k = 0;
      try {
        k = std::stoul(count);
      } catch (const std::exception&) {
        throw InvalidArgument("bad subspace selector '" + a.subspace + "'");
      }
      if (a.precond.empty()) {
        throw InvalidArgument("--subspace " + a.subspace + " needs --precond");
      }
      const SymmetricMatrix pre(read_matrix_file(a.precond));
      if (pre.size() != n) throw InvalidArgument("--precond dimension does not match --matrix");
      if (k < 1 || k >= n) throw InvalidArgument("lowest-k: need 1 <= k < n");
      return TestSubspace::lowest(pre, k);
    }
  }
  const Matrix cols = read_matrix_file(a.subspace);
  if (cols.rows() != n) {
    throw InvalidArgument("subspace has " + std::to_string(cols.rows()) + " rows, matrix is " +
                          std::to_string(n) + "x" + std::to_string(n));
  }
  double adjustment = 0.0;
  TestSubspace s = TestSubspace::orthonormalized(cols, &adjustment);
  if (adjustment > 1e-8) {
    std::cerr << "warning: subspace basis orthonormalized (adjustment " << sci4(adjustment)
              << ")\n";
  }
  return s;
}

int run_bounds(const BoundsArgs& a) {
  const Matrix raw = read_matrix_file(a.matrix);
  if (raw.rows() != raw.cols()) throw InvalidArgument("matrix must be square");
  if (relative_asymmetry(raw) > 1e-12) {
    throw InvalidArgument("matrix is not symmetric (relative asymmetry " +
                          sci4(relative_asymmetry(raw)) + ")");
  }
  const SymmetricMatrix h(raw);
  Cholesky{h};  // rejects non-PD input with the failing pivot
  const TestSubspace s = load_subspace(a, h.size());
  const BoundReport r = analyze(h, s, {parse_norm_kind(a.norm), a.q});

  Sink sink(a.out.path);
  if (a.out.format == "csv") write_report_csv(sink.stream(), r);
  else if (a.out.format == "json") write_report_json(sink.stream(), r);
  else write_report_table(sink.stream(), r);

  if (a.strict) {
    bool ok = true;
    for (const BoundEntry& b : r.bounds) {
      if (!b.hypothesis_ok) {
        std::cerr << "hypothesis not satisfied: " << b.quantity << " (" << to_string(b.theorem)
                  << (b.index ? ", index " + std::to_string(b.index) : std::string()) << ")\n";
        ok = false;
      }
    }
    if (!ok) return kExitHypothesis;
  }
  return 0;
}

// --- models ----------------------------------------------------------------

int run_kappa(const std::vector<double>& kappas, const Output& out) {
  require_positive(kappas, "kappa");
  std::vector<std::vector<double>> rows;
  for (double kappa : kappas) {
    const KappaReference ref = hkappa_reference(kappa);
    const double lam = sym_eig(hkappa_matrix(kappa)).values.front();
    const double rel = (ref.mu - lam) / ref.mu;
    rows.push_back({kappa, ref.mu, ref.res_norm, ref.eta, ref.eta_quoted, rel,
                    rel / (ref.eta * ref.eta)});
  }
  Sink sink(out.path);
  write_rows(sink.stream(), out.format,
             {"kappa", "mu", "res_norm", "eta", "eta_quoted", "rel_error", "ratio"}, rows);
  return 0;
}

int run_schrodinger(const std::vector<double>& kappas, const std::vector<double>& fd,
                    const Output& out) {
  require_positive(kappas, "kappa");
  if (!fd.empty()) {
    if (fd.size() != 2 || !(fd[0] > 1.0) || !(fd[1] >= 10.0) || fd[1] != std::floor(fd[1])) {
      throw InvalidArgument("--oracle-fd needs L > 1 and an integer n >= 10");
    }
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  std::vector<std::future<std::vector<double>>> jobs;
  for (double kappa : kappas) {
    jobs.push_back(std::async(std::launch::async, [kappa, &fd, pi2] {
      const SchrodingerBounds b = schrodinger_bounds(kappa);
      std::vector<double> row{kappa, schrodinger_eta2(kappa), schrodinger_taylor(kappa), b.lower,
                              b.upper, (pi2 - schrodinger_lambda(kappa)) / pi2};
      if (!fd.empty()) {
        row.push_back(schrodinger_eta2_fd(kappa, fd[0], static_cast<std::size_t>(fd[1])));
      }
      return row;
    }));
  }
  std::vector<std::vector<double>> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  std::vector<std::string> header{"kappa", "eta2", "taylor", "lower", "upper", "exact"};
  if (!fd.empty()) header.push_back("eta2_fd");
  Sink sink(out.path);
  write_rows(sink.stream(), out.format, header, rows);
  return 0;
}

int run_fem(const std::vector<std::size_t>& ns, std::size_t k_trunc, const Output& out) {
  for (std::size_t n : ns)
    if (n < 8) throw InvalidArgument("--n-list: every N must be >= 8");
  if (k_trunc < 1) throw InvalidArgument("--k-trunc must be >= 1");
  std::vector<std::future<Table1Row>> jobs;
  for (std::size_t n : ns)
    jobs.push_back(std::async(std::launch::async, [n, k_trunc] { return table1_row(n, k_trunc); }));
  std::vector<std::vector<double>> rows;
  for (auto& j : jobs) {
    const Table1Row r = j.get();
    rows.push_back({static_cast<double>(r.n), r.lower, r.middle, r.upper});
  }
  Sink sink(out.path);
  if (out.format == "csv") {
    sink.stream() << "N,lower,middle,upper\n";
    for (const auto& row : rows) {
      sink.stream() << static_cast<std::size_t>(row[0]) << ',' << format_double(row[1]) << ','
                    << format_double(row[2]) << ',' << format_double(row[3]) << '\n';
    }
  } else {
    write_rows(sink.stream(), out.format, {"N", "lower", "middle", "upper"}, rows);
  }
  return 0;
}

int run_verify_cmd(const VerifyOptions& opt) {
  const auto results = run_verify(opt);
  std::size_t failed = 0;
  for (const PropertyResult& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    if (!r.passed) ++failed;
  }
  std::cout << results.size() - failed << "/" << results.size() << " properties passed\n";
  return failed ? kExitVerify : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative a-posteriori eigenvalue bounds from a Ritz test subspace"};
  app.require_subcommand(1);

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Bound report for a matrix and a test subspace");
  bounds->add_option("--matrix", ba.matrix, "Symmetric positive-definite matrix file")
      ->required();
  bounds->add_option("--subspace", ba.subspace,
                     "Basis file (columns, orthonormalized on load) or lowest-k:K")
      ->required();
  bounds->add_option("--precond", ba.precond, "Matrix whose lowest K eigenvectors give lowest-k:K");
  bounds->add_option("--norm", ba.norm, "Unitarily invariant norm")
      ->check(CLI::IsMember({"spectral", "frobenius", "trace"}))
      ->capture_default_str();
  bounds->add_option("--q", ba.q, "Index of the first eigenvalue of the target cluster")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bounds->add_option("--out", ba.out.path, "Output file (default stdout)");
  bounds->add_option("--format", ba.out.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "table"}))
      ->capture_default_str();
  bounds->add_flag("--strict", ba.strict, "Exit with status 5 if any hypothesis fails");

  std::vector<double> kd_kappas{10, 100, 1000};
  Output kd_out{"", "csv"};
  auto* kappa = app.add_subcommand("kappa-demo", "3x3 family: Ritz value, defect, exactness ratio");
  kappa->add_option("--kappas", kd_kappas, "Comma-separated kappa values")
      ->delimiter(',')
      ->capture_default_str();
  kappa->add_option("--out", kd_out.path, "Output file (default stdout)");
  kappa->add_option("--format", kd_out.format, "Output format")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();

  std::vector<double> sc_kappas{5, 10, 100, 1000};
  std::vector<double> sc_fd;
  Output sc_out{"", "csv"};
  auto* schr = app.add_subcommand("schrodinger", "Ground state of -u'' + kappa^2 chi_(1,inf) u");
  schr->add_option("--kappas", sc_kappas, "Comma-separated kappa values")
      ->delimiter(',')
      ->capture_default_str();
  schr->add_option("--oracle-fd", sc_fd, "Also run the finite-difference defect with L n")
      ->expected(2);
  schr->add_option("--out", sc_out.path, "Output file (default stdout)");
  schr->add_option("--format", sc_out.format, "Output format")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();

  std::vector<std::size_t> fem_ns{40, 60, 80, 100, 120};
  std::size_t k_trunc = 20000;
  Output fem_out{"", "csv"};
  auto* fem = app.add_subcommand("fem-periodic", "P1 elements for the anti-periodic problem");
  fem->add_option("--n-list", fem_ns, "Comma-separated element counts")
      ->delimiter(',')
      ->capture_default_str();
  fem->add_option("--k-trunc", k_trunc, "Fourier truncation for the H^-1 moments")
      ->capture_default_str();
  fem->add_option("--out", fem_out.path, "Output file (default stdout)");
  fem->add_option("--format", fem_out.format, "Output format")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_option("--seed", vo.seed, "Random seed")->capture_default_str();
  verify->add_flag("--mutate-moments", vo.mutate_moments,
                   "Flip the sign of D_mu in the moment matrix (must make verify fail)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bounds) return run_bounds(ba);
    if (*kappa) return run_kappa(kd_kappas, kd_out);
    if (*schr) return run_schrodinger(sc_kappas, sc_fd, sc_out);
    if (*fem) return run_fem(fem_ns, k_trunc, fem_out);
    if (*verify) return run_verify_cmd(vo);
  } catch (const FileNotFound& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotFound;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const NotPositiveDefinite& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotPd;
  } catch (const HypothesisError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
