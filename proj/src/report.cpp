#include "relbounds/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "relbounds/errors.hpp"

namespace relbounds {

namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<double> try_eval(auto&& f) {
  try {
    return f();
  } catch (const HypothesisError&) {
    return std::nullopt;
  } catch (const SingularMatrix&) {
    return std::nullopt;
  }
}

std::string cell(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

std::optional<double> parse_cell(const std::string& s, std::size_t line, std::size_t col) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("invalid number '" + s + "'", line, col);
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

ordered_json json_number(const std::optional<double>& x) {
  if (!x) return nullptr;
  if (std::isinf(*x)) return *x > 0 ? "inf" : "-inf";
  return *x;
}

std::optional<double> json_to_number(const ordered_json& j, const std::string& key) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw ParseError("key '" + key + "': expected a number, got '" + s + "'", 0, 0);
  }
  if (!j.is_number()) throw ParseError("key '" + key + "': expected a number", 0, 0);
  return j.get<double>();
}

// "mu.2" → ("mu", 2); "g_q" → ("g_q", 0)
std::pair<std::string, std::size_t> split_indexed(const std::string& key) {
  const auto dot = key.rfind('.');
  if (dot == std::string::npos) return {key, 0};
  const std::string tail = key.substr(dot + 1);
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), idx);
  if (ec != std::errc() || ptr != tail.data() + tail.size() || tail.empty()) return {key, 0};
  return {key.substr(0, dot), idx};
}

std::string scalar_key(const ReportScalar& s) {
  return s.index == 0 ? s.name : s.name + "." + std::to_string(s.index);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

std::optional<double> BoundReport::scalar(const std::string& name, std::size_t index) const {
  for (const ReportScalar& s : scalars)
    if (s.name == name && s.index == index) return s.value;
  return std::nullopt;
}

bool BoundReport::flag(const std::string& name) const {
  for (const ReportFlag& f : flags)
    if (f.name == name) return f.ok;
  throw InvalidArgument("BoundReport: unknown flag '" + name + "'");
}

std::vector<const BoundEntry*> BoundReport::find(const std::string& quantity,
                                                 Theorem theorem) const {
  std::vector<const BoundEntry*> out;
  for (const BoundEntry& b : bounds)
    if (b.quantity == quantity && b.theorem == theorem) out.push_back(&b);
  return out;
}

BoundReport analyze(const SymmetricMatrix& h, const TestSubspace& s,
                    const AnalyzeOptions& options) {
  const std::size_t n = h.size();
  const std::size_t m = s.dim();
  const std::size_t q = options.q;
  if (q < 1 || q + m - 1 > n) {
    throw InvalidArgument("analyze: need 1 <= q and q + m - 1 <= n");
  }
  const RitzData rd = ritz(h, s);
  const SplitOperator split = p_diagonal_split(h, s);
  DefectSpectrum etas = etas_schur(split);
  // defects at rounding level are exact zeros (e.g. any subspace of c·I)
  const double zero_tol = 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  const bool invariant = etas.largest() <= zero_tol;
  if (invariant) std::fill(etas.etas.begin(), etas.etas.end(), 0.0);
  const MomentMatrices mm = moment_matrices(h, rd);
  const std::vector<double> ratios = residual_ratios(mm, rd.mu);
  const double dl = dl_measure(mm, rd.mu);
  const std::vector<double> lam_all = sym_eig(h).values;
  const std::vector<double> spec_w = sym_eig(split.w).values;

  const std::vector<double> lam(lam_all.begin() + static_cast<long>(q - 1),
                                lam_all.begin() + static_cast<long>(q - 1 + m));
  const double lam_prev = q > 1 ? lam_all[q - 2] : 0.0;
  const double lam_next = q + m <= n ? lam_all[q + m - 1] : kInfinity;
  const double mu1 = rd.mu.front(), mum = rd.mu.back();
  const double eta_m = etas.largest();

  BoundReport r;
  r.n = n;
  r.m = m;
  r.q = q;
  r.norm = options.norm;

  const double g_q = relative_gap_gq(spec_w, lam.front());
  const double gam = gamma_s(lam_prev, lam_next, mu1, mum);
  const std::optional<double> g_lemma = eta_m < 1.0 ? std::optional<double>(gq_lower_bound_lemma(
                                                          eta_m, mu1, mum, lam_prev, lam_next))
                                                    : std::nullopt;
  const std::optional<double> g1 = try_eval([&] { return g1_from_spectral_gap(lam_next, mum); });
  const std::optional<double> exactness = [&]() -> std::optional<double> {
    if (eta_m == 0.0) return std::nullopt;
    return try_eval([&] { return exactness_ratio(split, lam.front()); });
  }();

  for (std::size_t i = 0; i < m; ++i) r.scalars.push_back({"mu", i + 1, rd.mu[i]});
  for (std::size_t i = 0; i < m; ++i) r.scalars.push_back({"eta", i + 1, etas.etas[i]});
  for (std::size_t i = 0; i < m; ++i) r.scalars.push_back({"lambda", i + 1, lam[i]});
  r.scalars.push_back({"lambda_prev", 0, lam_prev});
  r.scalars.push_back({"lambda_next", 0, lam_next});
  r.scalars.push_back({"g_q", 0, g_q});
  r.scalars.push_back({"gamma_s", 0, gam});
  r.scalars.push_back({"g_lemma", 0, g_lemma});
  r.scalars.push_back({"g1", 0, g1});
  r.scalars.push_back({"dl", 0, dl});
  r.scalars.push_back({"exactness", 0, exactness});

  const bool exact_cluster = lam.back() - lam.front() <= options.cluster_tol * lam.back();
  const bool cluster_ok = cluster_hypothesis(eta_m, gam);
  const bool localizes = eta_m < 1.0 && first_order_localizes(mum, eta_m, lam_next);
  const bool spectral_gap = lam_next > mum;
  const double k_spec = invariant ? 0.0 : spectral_norm(split.k);
  const bool abs_gap = k_spec < lam_next - mum;

  r.flags = {{"exact_cluster", exact_cluster},
             {"cluster_hypothesis", cluster_ok},
             {"first_order_localizes", localizes},
             {"spectral_gap", spectral_gap},
             {"abs_cluster_gap", abs_gap}};

  std::vector<double> rel(m), abs_err(m);
  for (std::size_t i = 0; i < m; ++i) {
    rel[i] = (rd.mu[i] - lam[i]) / rd.mu[i];
    abs_err[i] = rd.mu[i] - lam[i];
  }
  double rel_sum = 0.0, eta_sq_sum = etas.sum_squares();
  for (double x : rel) rel_sum += x;
  const double rel_norm = ui_norm_diagonal(rel, options.norm);

  // first-order localization: |μ_i − λ|/μ_i ≤ η_m
  for (std::size_t i = 0; i < m; ++i) {
    BoundEntry b{"rel_error", i + 1, Theorem::first_order, {}, {}, rel[i], localizes};
    if (eta_m < 1.0) {
      const Interval iv = first_order_bounds(rd.mu[i], eta_m);
      b.lower = (rd.mu[i] - iv.upper) / rd.mu[i];
      b.upper = (rd.mu[i] - iv.lower) / rd.mu[i];
    }
    r.bounds.push_back(b);
  }

  if (m == 1) {
    const double res_sq = invariant ? 0.0 : frobenius_norm(split.k) * frobenius_norm(split.k);
    BoundEntry b{"rel_error", 1, Theorem::classical_TK, 0.0, {}, rel[0], q == 1 && spectral_gap};
    if (res_sq == 0.0) {
      b.upper = 0.0;
    } else if (auto lb = try_eval([&] { return classical_temple_kato(mu1, res_sq, lam_next); })) {
      b.upper = (mu1 - *lb) / mu1;
    }
    r.bounds.push_back(b);
  }

  {
    BoundEntry b{"rel_error_norm", 0, Theorem::cluster_T33, {}, {}, rel_norm,
                 cluster_ok && exact_cluster};
    b.upper = try_eval([&] { return cluster_upper_bound(etas, g_q, options.norm); });
    r.bounds.push_back(b);
  }

  const double g1v = g1.value_or(0.0);
  const bool sandwich_ok = exact_cluster && spectral_gap;
  {
    BoundEntry b{"rel_error_norm", 0, Theorem::sandwich_T34, {}, {}, rel_norm, sandwich_ok};
    if (auto iv = try_eval([&] { return sandwich_bounds(etas, g1v, options.norm).upper; })) {
      b.lower = sandwich_bounds(etas, g1v, options.norm).lower;
      b.upper = *iv;
    }
    r.bounds.push_back(b);
  }
  {
    std::vector<Interval> per;
    try {
      per = sandwich_per_index(etas, g1v);
    } catch (const HypothesisError&) {
    }
    for (std::size_t i = 0; i < m; ++i) {
      BoundEntry b{"rel_error", i + 1, Theorem::sandwich_T34, {}, {}, rel[i], sandwich_ok};
      if (!per.empty()) {
        b.lower = per[i].lower;
        b.upper = per[i].upper;
      }
      r.bounds.push_back(b);
    }
  }
  {
    BoundEntry b{"rel_error_sum", 0, Theorem::trace_T34, {}, {}, rel_sum, sandwich_ok};
    if (auto iv = try_eval([&] { return trace_sandwich(etas, g1v).upper; })) {
      b.lower = trace_sandwich(etas, g1v).lower;
      b.upper = *iv;
    }
    r.bounds.push_back(b);
  }

  {
    const bool ok = q == 1 && spectral_gap;
    r.bounds.push_back({"rel_error_sum", 0, Theorem::prop_36, prop_lower_bound(rd.mu, ratios),
                        std::nullopt, rel_sum, ok});
    const Interval iv = residual_eta_sandwich(ratios, dl);
    r.bounds.push_back({"eta_sq_sum", 0, Theorem::prop_36, iv.lower, iv.upper, eta_sq_sum, true});
  }

  {
    BoundEntry norm_b{"abs_error_norm", 0, Theorem::abs_cluster, {}, {},
                      ui_norm_diagonal(abs_err, options.norm), abs_gap};
    double abs_sum = 0.0;
    for (double x : abs_err) abs_sum += std::abs(x);
    BoundEntry sum_b{"abs_error_sum", 0, Theorem::abs_cluster, {}, {}, abs_sum, abs_gap};
    try {
      const AbsClusterBounds ab =
          invariant ? AbsClusterBounds{}
                    : abs_cluster_bounds(split.k, rd.mu, lam_next, options.norm);
      norm_b.upper = ab.norm_bound;
      sum_b.upper = ab.trace_bound;
    } catch (const HypothesisError&) {
    }
    r.bounds.push_back(norm_b);
    r.bounds.push_back(sum_b);
  }
  return r;
}

// --- CSV -------------------------------------------------------------------

void write_report_csv(std::ostream& out, const BoundReport& r) {
  out << "# relbounds report n=" << r.n << " m=" << r.m << " q=" << r.q
      << " norm=" << to_string(r.norm) << '\n';
  out << "quantity,index,theorem,lower,upper,actual,hypothesis_ok\n";
  for (const ReportScalar& s : r.scalars)
    out << s.name << ',' << s.index << ",,,," << cell(s.value) << ",\n";
  for (const ReportFlag& f : r.flags)
    out << "flag." << f.name << ",0,,,,," << (f.ok ? "true" : "false") << '\n';
  for (const BoundEntry& b : r.bounds) {
    out << b.quantity << ',' << b.index << ',' << to_string(b.theorem) << ',' << cell(b.lower)
        << ',' << cell(b.upper) << ',' << cell(b.actual) << ','
        << (b.hypothesis_ok ? "true" : "false") << '\n';
  }
}

BoundReport read_report_csv(std::istream& in) {
  BoundReport r;
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty report", 1, 1);
  ++lineno;
  {
    std::istringstream hs(line);
    std::string hash, tag1, tag2;
    hs >> hash >> tag1 >> tag2;
    if (hash != "#" || tag1 != "relbounds" || tag2 != "report") {
      throw ParseError("expected '# relbounds report' header", 1, 1);
    }
    std::string kv;
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError("bad header field '" + kv + "'", 1, 1);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "norm") {
        r.norm = parse_norm_kind(val);
        continue;
      }
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc() || ptr != val.data() + val.size()) {
        throw ParseError("bad header value '" + kv + "'", 1, 1);
      }
      if (key == "n") r.n = v;
      else if (key == "m") r.m = v;
      else if (key == "q") r.q = v;
      else throw ParseError("unknown header field '" + key + "'", 1, 1);
    }
  }
  if (!std::getline(in, line) || line != "quantity,index,theorem,lower,upper,actual,hypothesis_ok") {
    throw ParseError("expected CSV column header", 2, 1);
  }
  ++lineno;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 7) throw ParseError("expected 7 fields", lineno, 1);
    std::size_t index = 0;
    {
      const auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), index);
      if (ec != std::errc() || ptr != f[1].data() + f[1].size()) {
        throw ParseError("bad index '" + f[1] + "'", lineno, 2);
      }
    }
    const auto parse_bool = [&](const std::string& s) {
      if (s == "true") return true;
      if (s == "false") return false;
      throw ParseError("expected true/false, got '" + s + "'", lineno, 7);
    };
    if (f[0].rfind("flag.", 0) == 0) {
      r.flags.push_back({f[0].substr(5), parse_bool(f[6])});
    } else if (f[2].empty()) {
      r.scalars.push_back({f[0], index, parse_cell(f[5], lineno, 6)});
    } else {
      BoundEntry b;
      b.quantity = f[0];
      b.index = index;
      try {
        b.theorem = parse_theorem(f[2]);
      } catch (const InvalidArgument&) {
        throw ParseError("unknown theorem tag '" + f[2] + "'", lineno, 3);
      }
      b.lower = parse_cell(f[3], lineno, 4);
      b.upper = parse_cell(f[4], lineno, 5);
      b.actual = parse_cell(f[5], lineno, 6);
      b.hypothesis_ok = parse_bool(f[6]);
      r.bounds.push_back(b);
    }
  }
  return r;
}

// --- JSON ------------------------------------------------------------------

void write_report_json(std::ostream& out, const BoundReport& r) {
  ordered_json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["q"] = r.q;
  j["norm"] = std::string(to_string(r.norm));
  for (const ReportScalar& s : r.scalars) j[scalar_key(s)] = json_number(s.value);
  for (const ReportFlag& f : r.flags) j["flag." + f.name] = f.ok;
  for (std::size_t k = 0; k < r.bounds.size(); ++k) {
    const BoundEntry& b = r.bounds[k];
    const std::string p = "bound." + std::to_string(k + 1) + ".";
    j[p + "quantity"] = b.quantity;
    j[p + "index"] = b.index;
    j[p + "theorem"] = std::string(to_string(b.theorem));
    j[p + "lower"] = json_number(b.lower);
    j[p + "upper"] = json_number(b.upper);
    j[p + "actual"] = json_number(b.actual);
    j[p + "hypothesis_ok"] = b.hypothesis_ok;
  }
  out << j.dump(2) << '\n';
}

BoundReport read_report_json(std::istream& in) {
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, e.byte);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", 0, 0);
  BoundReport r;
  std::vector<BoundEntry> bounds;
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "n") r.n = val.get<std::size_t>();
      else if (key == "m") r.m = val.get<std::size_t>();
      else if (key == "q") r.q = val.get<std::size_t>();
      else if (key == "norm") r.norm = parse_norm_kind(val.get<std::string>());
      else if (key.rfind("flag.", 0) == 0) r.flags.push_back({key.substr(5), val.get<bool>()});
      else if (key.rfind("bound.", 0) == 0) {
        const auto dot = key.find('.', 6);
        if (dot == std::string::npos) throw ParseError("bad key '" + key + "'", 0, 0);
        const std::size_t k = std::stoul(key.substr(6, dot - 6));
        if (k == 0) throw ParseError("bad key '" + key + "'", 0, 0);
        if (bounds.size() < k) bounds.resize(k);
        BoundEntry& b = bounds[k - 1];
        const std::string field = key.substr(dot + 1);
        if (field == "quantity") b.quantity = val.get<std::string>();
        else if (field == "index") b.index = val.get<std::size_t>();
        else if (field == "theorem") b.theorem = parse_theorem(val.get<std::string>());
        else if (field == "lower") b.lower = json_to_number(val, key);
        else if (field == "upper") b.upper = json_to_number(val, key);
        else if (field == "actual") b.actual = json_to_number(val, key);
        else if (field == "hypothesis_ok") b.hypothesis_ok = val.get<bool>();
        else throw ParseError("unknown bound field '" + field + "'", 0, 0);
      } else {
        const auto [name, idx] = split_indexed(key);
        r.scalars.push_back({name, idx, json_to_number(val, key)});
      }
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("unexpected JSON value: ") + e.what(), 0, 0);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0, 0);
  }
  r.bounds = std::move(bounds);
  return r;
}

// --- table -----------------------------------------------------------------

void write_report_table(std::ostream& out, const BoundReport& r) {
  const auto num = [](const std::optional<double>& x) {
    if (!x) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", *x);
    return std::string(buf);
  };
  char line[256];
  out << "n = " << r.n << ", m = " << r.m << ", q = " << r.q << ", norm = " << to_string(r.norm)
      << '\n';
  for (const ReportScalar& s : r.scalars) {
    std::snprintf(line, sizeof line, "  %-14s %s\n", scalar_key(s).c_str(), num(s.value).c_str());
    out << line;
  }
  for (const ReportFlag& f : r.flags) {
    std::snprintf(line, sizeof line, "  %-22s %s\n", f.name.c_str(), f.ok ? "yes" : "no");
    out << line;
  }
  std::snprintf(line, sizeof line, "%-15s %5s %-13s %12s %12s %12s  %s\n", "quantity", "index",
                "theorem", "lower", "upper", "actual", "hyp");
  out << line;
  for (const BoundEntry& b : r.bounds) {
    std::snprintf(line, sizeof line, "%-15s %5zu %-13s %12s %12s %12s  %s\n", b.quantity.c_str(),
                  b.index, std::string(to_string(b.theorem)).c_str(), num(b.lower).c_str(),
                  num(b.upper).c_str(), num(b.actual).c_str(), b.hypothesis_ok ? "ok" : "-");
    out << line;
  }
}

}  // namespace relbounds
