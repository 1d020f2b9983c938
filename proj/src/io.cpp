#include "plrs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>

namespace plrs::io {
namespace {

struct Digits {
  bool negative = false;
  std::string mantissa;  // value = 0.mantissa * 10^exponent
  long exponent = 0;
};

Digits digits_of(const Real& x, int significant) {
  mp_exp_t exp = 0;
  std::unique_ptr<char, void (*)(void*)> raw(
      mpf_get_str(nullptr, &exp, 10, static_cast<std::size_t>(significant), x.get_mpf_t()),
      std::free);
  Digits d;
  std::string s = raw.get();
  if (!s.empty() && s[0] == '-') {
    d.negative = true;
    s.erase(0, 1);
  }
  d.mantissa = std::move(s);
  d.exponent = exp;
  return d;
}

std::string scientific(const Digits& d, int significant) {
  if (d.mantissa.empty()) return "0";
  std::string m = d.mantissa;
  m.resize(static_cast<std::size_t>(significant), '0');
  std::string out = d.negative ? "-" : "";
  out += m[0];
  if (m.size() > 1) out += "." + m.substr(1);
  const long e = d.exponent - 1;
  out += e < 0 ? "e-" : "e+";
  const std::string mag = std::to_string(e < 0 ? -e : e);
  out += (mag.size() < 2 ? "0" : "") + mag;
  return out;
}

std::string readable(const Digits& d) {
  if (d.mantissa.empty()) return "0";
  if (d.exponent < -3 || d.exponent > 12) return scientific(d, static_cast<int>(d.mantissa.size()));
  std::string out = d.negative ? "-" : "";
  if (d.exponent <= 0) {
    out += "0." + std::string(static_cast<std::size_t>(-d.exponent), '0') + d.mantissa;
  } else if (static_cast<std::size_t>(d.exponent) >= d.mantissa.size()) {
    out += d.mantissa + std::string(d.exponent - d.mantissa.size(), '0');
  } else {
    out += d.mantissa.substr(0, d.exponent) + "." + d.mantissa.substr(d.exponent);
  }
  return out;
}

int full_digits(const Real& x) {
  return std::max(1, static_cast<int>(std::floor(x.get_prec() * std::log10(2.0))) - 1);
}

Json real_json(const Real& x) { return decimal(x); }

}  // namespace

std::string rational(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string integer(const mpz_class& z) { return z.get_str(); }

std::string decimal(const Real& x) {
  const int digits = full_digits(x);
  return scientific(digits_of(x, digits), digits);
}

std::string decimal(const Real& x, int significant) { return readable(digits_of(x, significant)); }

std::string decimal(const mpq_class& q, int significant) {
  return decimal(to_real(q, 64 + 4 * static_cast<unsigned>(significant)), significant);
}

Json to_json(const RecurrenceSpec& spec) {
  Json j;
  j["coefficients"] = Json::array();
  for (Coeff c : spec.coefficients()) j["coefficients"].push_back(c);
  j["S"] = spec.size();
  j["L"] = spec.length();
  return j;
}

Json to_json(const Block& block) {
  return Json{{"kind", block.kind == BlockKind::type1 ? "type1" : "type2"},
              {"coefficients", block.coefficients},
              {"size", block.size},
              {"length", block.length()}};
}

Json to_json(const BlockCatalog& catalog) {
  Json j;
  j["spec"] = catalog.spec().to_string();
  j["type2"] = Json::array();
  for (const Block& b : catalog.type2_blocks()) j["type2"].push_back(to_json(b));
  j["type1"] = Json::array();
  for (const Block& b : catalog.type1_blocks()) j["type1"].push_back(to_json(b));
  j["lengths"] = Json::array();
  for (std::size_t l : catalog.length_table()) j["lengths"].push_back(l);
  return j;
}

Json to_json(const SequenceTable& table, std::size_t n) {
  Json j;
  j["spec"] = table.spec().to_string();
  j["terms"] = Json::array();
  for (std::size_t i = 1; i <= n; ++i) j["terms"].push_back(integer(table.term(i)));
  return j;
}

Json to_json(const SequenceTable& table, const Decomposition& d) {
  Json j;
  j["value"] = integer(value(table, d));
  j["coefficients"] = Json(std::vector<Coeff>(d.coefficients().begin(), d.coefficients().end()));
  j["indices"] = summand_indices(d);
  j["blocks"] = parse_blocks(d.spec(), d).to_string();
  j["summands"] = summand_count(d);
  return j;
}

Json to_json(const SummandPolynomial& poly) {
  Json coeffs = Json::array();
  for (const mpz_class& c : poly.coeffs) coeffs.push_back(integer(c));
  return Json{{"n", poly.n}, {"coeffs", std::move(coeffs)}};
}

Json to_json(const EnsembleStats& s) {
  return Json{{"n", s.n},
              {"cardinality", integer(s.cardinality)},
              {"mean", rational(s.mean)},
              {"variance", rational(s.variance)},
              {"central3", rational(s.central3)},
              {"central4", rational(s.central4)}};
}

Json to_json(const ZDistribution& z) {
  Json rows = Json::array();
  for (std::size_t t = 0; t < z.probabilities.size(); ++t) {
    Json row{{"t", t}, {"length", z.lengths[t]}, {"probability", rational(z.probabilities[t])}};
    if (z.empirical) row["empirical"] = rational((*z.empirical)[t]);
    rows.push_back(std::move(row));
  }
  Json j{{"n", z.n}, {"rows", std::move(rows)}};
  if (z.empirical) j["empirical_matches"] = z.empirical_matches();
  return j;
}

Json to_json(const IdentityCheck& c) {
  return Json{{"n", c.n}, {"lhs", rational(c.lhs)}, {"rhs", rational(c.rhs)}, {"holds", c.holds()}};
}

Json to_json(const ConditionalRow& r) {
  return Json{{"t", r.t},
              {"probability", rational(r.probability)},
              {"split_probability", rational(r.split_probability)},
              {"mean_lhs", rational(r.mean_lhs)},
              {"mean_rhs", rational(r.mean_rhs)},
              {"second_lhs", rational(r.second_lhs)},
              {"second_rhs", rational(r.second_rhs)},
              {"polynomial_match", r.polynomial_match},
              {"holds", r.holds()}};
}

Json to_json(const GaussianRow& r) {
  return Json{{"n", r.n},
              {"skewness_squared", rational(r.skewness_squared)},
              {"excess_kurtosis", rational(r.excess_kurtosis)},
              {"skewness", real_json(r.skewness)},
              {"excess_kurtosis_decimal", real_json(r.excess_kurtosis_real)}};
}

Json to_json(const GrowthEstimate& g) {
  Json f = Json::object();
  for (std::size_t n = 1; n < g.f_table.size(); ++n) f[std::to_string(n)] = real_json(g.f_table[n]);
  return Json{{"n_max", g.n_max},
              {"precision_bits", g.precision_bits},
              {"a_est", real_json(g.a_est)},
              {"b_est", real_json(g.b_est)},
              {"window", {g.window_begin, g.window_end}},
              {"convergence_gap", real_json(g.convergence_gap)},
              {"f", std::move(f)}};
}

Json to_json(const TheoremReport& r) {
  Json j;
  j["spec"] = r.spec;
  j["S"] = r.size;
  j["L"] = r.length;
  j["n_max"] = r.n_max;
  j["precision_bits"] = r.precision_bits;
  j["a_est"] = real_json(r.a_est);
  j["b_est"] = real_json(r.b_est);
  j["convergence_gap"] = real_json(r.convergence_gap);
  j["threshold_N"] = r.threshold_N;
  j["y_bound"] = real_json(r.y_bound);

  Json y = Json::array();
  for (const YStatistics& row : r.y_rows) {
    y.push_back(Json{{"n", row.n},
                     {"mean", real_json(row.mean)},
                     {"variance", real_json(row.variance)},
                     {"f_n", real_json(row.f_n)},
                     {"tolerance", real_json(row.tolerance)},
                     {"mean_matches_f", row.mean_matches_f},
                     {"above_bound", row.variance > r.y_bound}});
  }
  j["var_y"] = std::move(y);

  Json candidates = Json::array();
  for (const CCandidate& cand : r.c.candidates) {
    Json entry{{"term", cand.n == 0 ? std::string("a^2/(2SL)")
                                    : "Var[K_" + std::to_string(cand.n) + "]/" +
                                          std::to_string(cand.n)},
               {"value", real_json(cand.value)}};
    if (cand.exact) entry["exact"] = rational(*cand.exact);
    candidates.push_back(std::move(entry));
  }
  j["c"] = Json{{"value", real_json(r.c.value)},
                {"exact", r.c.exact ? Json(rational(*r.c.exact)) : Json(nullptr)},
                {"argmin", r.c.provenance()},
                {"budget", real_json(r.c_budget)},
                {"candidates", std::move(candidates)}};

  Json verdicts = Json::array();
  for (const VarianceVerdict& v : r.verdicts) {
    verdicts.push_back(Json{{"n", v.n},
                            {"mean", rational(v.mean)},
                            {"variance", rational(v.variance)},
                            {"c_times_n", real_json(v.c_times_n)},
                            {"margin", real_json(v.margin)},
                            {"pass", v.pass}});
  }
  j["per_n_verdicts"] = std::move(verdicts);

  j["slope_C_est"] = real_json(r.slope_C_est);
  j["slope_tolerance"] = real_json(r.slope_tolerance);
  j["intercept_d_est"] = real_json(r.intercept_d_est);
  j["slope_consistent"] = r.slope_consistent();

  Json gauss = Json::array();
  for (const GaussianRow& g : r.gaussian) gauss.push_back(to_json(g));
  j["gaussian_table"] = std::move(gauss);
  j["all_pass"] = r.all_pass();
  return j;
}

void write_csv_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (std::string_view f : fields) {
    if (!first) out << ',';
    first = false;
    if (f.find_first_of(",\"\n") == std::string_view::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (char ch : f) {
      if (ch == '"') out << '"';
      out << ch;
    }
    out << '"';
  }
  out << '\n';
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  bool first = true;
  for (const std::string& f : fields) {
    if (!first) out << ',';
    first = false;
    std::ostringstream one;
    write_csv_row(one, {std::string_view(f)});
    std::string s = one.str();
    s.pop_back();
    out << s;
  }
  out << '\n';
}

void write_csv(std::ostream& out, const SummandPolynomial& poly) {
  write_csv_row(out, {"k", "count"});
  for (std::size_t k = 0; k < poly.coeffs.size(); ++k) {
    write_csv_row(out, {std::to_string(k), integer(poly.coeffs[k])});
  }
}

void write_csv(std::ostream& out, const TheoremReport& r) {
  write_csv_row(out, {"n", "mean", "variance", "c*n", "margin", "pass"});
  for (const VarianceVerdict& v : r.verdicts) {
    write_csv_row(out, {std::to_string(v.n), rational(v.mean), rational(v.variance),
                        decimal(v.c_times_n), decimal(v.margin), v.pass ? "true" : "false"});
  }
}

std::string polynomial_string(const Polynomial& p) {
  std::string out;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0) continue;
    if (!out.empty()) out += " + ";
    const bool unit = p[k] == 1 && k > 0;
    if (!unit) out += integer(p[k]);
    if (k >= 1) out += "x";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

}  // namespace plrs::io
