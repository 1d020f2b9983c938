#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "plrs/distributions.hpp"
#include "plrs/error.hpp"
#include "plrs/io.hpp"
#include "plrs/recurrence.hpp"
#include "plrs/zeckendorf.hpp"

namespace plrs::cli {
namespace {

using io::Json;

const std::map<std::string, Format> kFormats{
    {"table", Format::table}, {"csv", Format::csv}, {"json", Format::json}};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Left-aligned columns separated by two spaces.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out, const std::string& indent = "") const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
      width.resize(std::max(width.size(), row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    for (const auto& row : rows_) {
      std::string line = indent;
      for (std::size_t i = 0; i < row.size(); ++i) {
        line += row[i];
        if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
      }
      out << line << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }
std::string bool_text(bool b) { return b ? "true" : "false"; }

void print_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

std::string joined(std::span<const std::size_t> v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

std::string rational_with_decimal(const mpq_class& q) {
  return io::rational(q) + "  (" + io::decimal(q, 12) + ")";
}

void require_n(const RunConfig& cfg) {
  if (cfg.n == 0) throw UsageError(cfg.subcommand + ": a positive n is required");
}

// ---------------------------------------------------------------------------

int cmd_seq(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  require_n(cfg);
  const SequenceTable table = sequence_terms(spec, cfg.n);
  switch (cfg.format) {
    case Format::json:
      print_json(out, io::to_json(table, cfg.n));
      break;
    case Format::csv:
      io::write_csv_row(out, {"n", "H"});
      for (std::size_t i = 1; i <= cfg.n; ++i) {
        io::write_csv_row(out, {std::to_string(i), io::integer(table.term(i))});
      }
      break;
    case Format::table: {
      TextTable t({"n", "H_n"});
      for (std::size_t i = 1; i <= cfg.n; ++i) t.add({std::to_string(i), io::integer(table.term(i))});
      t.print(out);
      break;
    }
  }
  return kExitOk;
}

int cmd_blocks(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  const BlockCatalog catalog(spec);
  switch (cfg.format) {
    case Format::json:
      print_json(out, io::to_json(catalog));
      break;
    case Format::csv:
      io::write_csv_row(out, {"kind", "size", "length", "block"});
      for (const Block& b : catalog.type2_blocks()) {
        io::write_csv_row(out, {"type2", std::to_string(b.size), std::to_string(b.length()),
                                b.to_string()});
      }
      for (const Block& b : catalog.type1_blocks()) {
        io::write_csv_row(out, {"type1", std::to_string(b.size), std::to_string(b.length()),
                                b.to_string()});
      }
      break;
    case Format::table: {
      out << "spec " << spec.to_string() << "  (S = " << spec.size() << ", L = " << spec.length()
          << ")\n";
      out << "Type 2 blocks (size t, length l(t)):\n";
      TextTable t2({"t", "l(t)", "block"});
      for (const Block& b : catalog.type2_blocks()) {
        t2.add({std::to_string(b.size), std::to_string(b.length()), b.to_string()});
      }
      t2.print(out, "  ");
      out << "Type 1 blocks (final position only):\n";
      TextTable t1({"size", "length", "block"});
      for (const Block& b : catalog.type1_blocks()) {
        t1.add({std::to_string(b.size), std::to_string(b.length()), b.to_string()});
      }
      t1.print(out, "  ");
      break;
    }
  }
  return kExitOk;
}

int cmd_decompose(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  mpz_class m;
  if (cfg.argument.empty() || m.set_str(cfg.argument, 10) != 0) {
    throw UsageError("decompose: expected a positive integer, got '" + cfg.argument + "'");
  }
  SequenceTable table(spec);
  if (m > 0) table.extend_past(m);
  const Decomposition d = decompose(table, m);
  switch (cfg.format) {
    case Format::json:
      print_json(out, io::to_json(table, d));
      break;
    case Format::csv:
      io::write_csv_row(out, {"value", "coefficients", "indices", "blocks", "K"});
      io::write_csv_row(out, {io::integer(m), format_coefficients(d.coefficients()),
                              joined(summand_indices(d), " "), parse_blocks(spec, d).to_string(),
                              std::to_string(summand_count(d))});
      break;
    case Format::table: {
      const bool fibonacci = spec == validate_spec({1, 1});
      out << (fibonacci ? "F" : "H") << "-indices: " << joined(summand_indices(d)) << "; blocks "
          << parse_blocks(spec, d).to_string() << "; K=" << summand_count(d) << '\n';
      break;
    }
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  std::vector<Coeff> coeffs;
  try {
    coeffs = parse_coefficients(cfg.argument);
  } catch (const Error& e) {
    throw UsageError(std::string("validate: ") + e.what());
  }
  if (coeffs.empty()) throw UsageError("validate: no coefficients given");
  const Legality verdict = is_legal(spec, coeffs);

  std::optional<Decomposition> d;
  SequenceTable table(spec, coeffs.size());
  if (verdict) d.emplace(spec, coeffs);

  switch (cfg.format) {
    case Format::json: {
      Json j{{"coefficients", coeffs}, {"legal", verdict.legal}};
      if (d) {
        j["value"] = io::integer(value(table, *d));
        j["blocks"] = parse_blocks(spec, *d).to_string();
        j["summands"] = summand_count(*d);
      } else {
        j["position"] = verdict.position;
        j["reason"] = verdict.reason;
      }
      print_json(out, j);
      break;
    }
    case Format::csv:
      io::write_csv_row(out, {"coefficients", "legal", "position", "reason", "value", "blocks"});
      io::write_csv_row(out, {format_coefficients(coeffs), bool_text(verdict.legal),
                              d ? "" : std::to_string(verdict.position), verdict.reason,
                              d ? io::integer(value(table, *d)) : "",
                              d ? parse_blocks(spec, *d).to_string() : ""});
      break;
    case Format::table:
      if (d) {
        out << "legal: value " << value(table, *d) << "; blocks " << parse_blocks(spec, *d).to_string()
            << "; K=" << summand_count(*d) << '\n';
      } else {
        out << "illegal at position " << verdict.position << ": " << verdict.reason << '\n';
      }
      break;
  }
  return verdict ? kExitOk : kExitVerificationFailed;
}

int cmd_enumerate(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  require_n(cfg);
  const std::vector<Decomposition> all = enumerate_omega(spec, cfg.n, cfg.cap);
  const SequenceTable table(spec, cfg.n + 1);
  switch (cfg.format) {
    case Format::json: {
      Json elements = Json::array();
      for (const Decomposition& d : all) elements.push_back(io::to_json(table, d));
      print_json(out, Json{{"n", cfg.n}, {"count", all.size()}, {"elements", std::move(elements)}});
      break;
    }
    case Format::csv:
      io::write_csv_row(out, {"value", "coefficients", "blocks", "K"});
      for (const Decomposition& d : all) {
        io::write_csv_row(out, {io::integer(value(table, d)), format_coefficients(d.coefficients()),
                                parse_blocks(spec, d).to_string(), std::to_string(summand_count(d))});
      }
      break;
    case Format::table: {
      TextTable t({"value", "coefficients", "blocks", "K"});
      for (const Decomposition& d : all) {
        t.add({io::integer(value(table, d)), format_coefficients(d.coefficients()),
               parse_blocks(spec, d).to_string(), std::to_string(summand_count(d))});
      }
      t.print(out);
      out << "|Omega_" << cfg.n << "| = " << all.size() << '\n';
      break;
    }
  }
  return kExitOk;
}

int cmd_poly(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  require_n(cfg);
  const SummandPolynomial poly = summand_polynomial(spec, cfg.n);
  switch (cfg.format) {
    case Format::json:
      print_json(out, io::to_json(poly));
      break;
    case Format::csv:
      io::write_csv(out, poly);
      break;
    case Format::table:
      out << "P_" << cfg.n << "(x) = " << io::polynomial_string(poly.coeffs) << '\n';
      out << "P_" << cfg.n << "(1) = |Omega_" << cfg.n << "| = " << poly.total() << '\n';
      break;
  }
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  require_n(cfg);
  const EnsembleStats s = stats_from_polynomial(summand_polynomial(spec, cfg.n));
  switch (cfg.format) {
    case Format::json:
      print_json(out, io::to_json(s));
      break;
    case Format::csv:
      io::write_csv_row(out, {"n", "cardinality", "mean", "variance", "central3", "central4"});
      io::write_csv_row(out, {std::to_string(s.n), io::integer(s.cardinality), io::rational(s.mean),
                              io::rational(s.variance), io::rational(s.central3),
                              io::rational(s.central4)});
      break;
    case Format::table: {
      TextTable t({"quantity", "value"});
      t.add({"|Omega_n|", io::integer(s.cardinality)});
      t.add({"E[K_n]", rational_with_decimal(s.mean)});
      t.add({"Var[K_n]", rational_with_decimal(s.variance)});
      t.add({"mu_3", rational_with_decimal(s.central3)});
      t.add({"mu_4", rational_with_decimal(s.central4)});
      out << "n = " << s.n << '\n';
      t.print(out);
      break;
    }
  }
  return kExitOk;
}

int cmd_zdist(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  require_n(cfg);
  const ZDistribution z = z_distribution(spec, cfg.n, cfg.cap);
  const bool ok = !z.empirical || z.empirical_matches();
  switch (cfg.format) {
    case Format::json:
      print_json(out, io::to_json(z));
      break;
    case Format::csv:
      io::write_csv_row(out, {"t", "length", "probability", "empirical"});
      for (std::size_t t = 0; t < z.probabilities.size(); ++t) {
        io::write_csv_row(out, {std::to_string(t), std::to_string(z.lengths[t]),
                                io::rational(z.probabilities[t]),
                                z.empirical ? io::rational((*z.empirical)[t]) : ""});
      }
      break;
    case Format::table: {
      TextTable t({"t", "l(t)", "P(Z_n = t)", "decimal", "enumerated"});
      for (std::size_t k = 0; k < z.probabilities.size(); ++k) {
        t.add({std::to_string(k), std::to_string(z.lengths[k]), io::rational(z.probabilities[k]),
               io::decimal(z.probabilities[k], 12),
               z.empirical ? io::rational((*z.empirical)[k]) : "-"});
      }
      out << "n = " << z.n << '\n';
      t.print(out);
      if (z.empirical) {
        out << "enumeration " << (ok ? "matches" : "DOES NOT match") << " the closed form\n";
      } else {
        out << "enumeration skipped (|Omega_n| above the cap)\n";
      }
      break;
    }
  }
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_identities(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  require_n(cfg);
  const SummandDistributions dist(spec, cfg.n);
  const std::vector<ConditionalRow> rows = conditional_identities(dist, cfg.n);
  const IdentityCheck first = total_expectation_identity(dist, cfg.n);
  const IdentityCheck second = total_second_moment_identity(dist, cfg.n);

  bool enumerated = false;
  bool enumeration_ok = true;
  if (dist.table().omega_size(cfg.n) <= cfg.cap) {
    enumerated = true;
    const OmegaCensus census = omega_census(dist.catalog(), cfg.n);
    for (const ConditionalRow& row : rows) {
      enumeration_ok = enumeration_ok &&
                       conditional_check_from_census(census, dist, row.t, Moment::first).holds() &&
                       conditional_check_from_census(census, dist, row.t, Moment::second).holds();
    }
  }
  bool ok = first.holds() && second.holds() && enumeration_ok;
  for (const ConditionalRow& row : rows) ok = ok && row.holds();

  switch (cfg.format) {
    case Format::json: {
      Json conditional = Json::array();
      for (const ConditionalRow& row : rows) conditional.push_back(io::to_json(row));
      Json enumeration{{"checked", enumerated}};
      if (enumerated) enumeration["holds"] = enumeration_ok;
      print_json(out, Json{{"n", cfg.n},
                           {"conditional", std::move(conditional)},
                           {"expectation", io::to_json(first)},
                           {"second_moment", io::to_json(second)},
                           {"enumeration", std::move(enumeration)},
                           {"all_hold", ok}});
      break;
    }
    case Format::csv:
      io::write_csv_row(out, {"identity", "t", "lhs", "rhs", "holds"});
      for (const ConditionalRow& row : rows) {
        const std::string t = std::to_string(row.t);
        io::write_csv_row(out, {"probability", t, io::rational(row.split_probability),
                                io::rational(row.probability),
                                bool_text(row.split_probability == row.probability)});
        io::write_csv_row(out, {"conditional_mean", t, io::rational(row.mean_lhs),
                                io::rational(row.mean_rhs), bool_text(row.mean_lhs == row.mean_rhs)});
        io::write_csv_row(out, {"conditional_second", t, io::rational(row.second_lhs),
                                io::rational(row.second_rhs),
                                bool_text(row.second_lhs == row.second_rhs)});
      }
      io::write_csv_row(out, {"expectation", "", io::rational(first.lhs), io::rational(first.rhs),
                              bool_text(first.holds())});
      io::write_csv_row(out, {"second_moment", "", io::rational(second.lhs),
                              io::rational(second.rhs), bool_text(second.holds())});
      break;
    case Format::table: {
      out << "n = " << cfg.n << '\n';
      out << "Conditioning on the second-to-last block size t:\n";
      TextTable t({"t", "P(Z_n = t)", "E[K_n | Z_n = t]", "E[K_{n-l(t)}] + t", "split = x^t P",
                   "ok"});
      for (const ConditionalRow& row : rows) {
        t.add({std::to_string(row.t), io::rational(row.probability), io::rational(row.mean_lhs),
               io::rational(row.mean_rhs), yes_no(row.polynomial_match), yes_no(row.holds())});
      }
      t.print(out, "  ");
      out << "Total expectation:    " << (first.holds() ? "holds" : "FAILS") << "  (E[K_n] = "
          << io::rational(first.rhs) << ")\n";
      out << "Total second moment:  " << (second.holds() ? "holds" : "FAILS") << "  (E[K_n^2] = "
          << io::rational(second.rhs) << ")\n";
      out << "Enumeration cross-check: "
          << (enumerated ? (enumeration_ok ? "holds" : "FAILS") : "skipped (|Omega_n| above the cap)")
          << '\n';
      break;
    }
  }
  return ok ? kExitOk : kExitVerificationFailed;
}

void print_report_table(std::ostream& out, const TheoremReport& r) {
  out << "spec " << r.spec << "  (S = " << r.size << ", L = " << r.length << "), n_max = " << r.n_max
      << ", " << r.precision_bits << "-bit estimation\n";
  TextTable summary({"quantity", "value"});
  summary.add({"a_est", io::decimal(r.a_est, 20)});
  summary.add({"b_est", io::decimal(r.b_est, 20)});
  summary.add({"convergence gap", io::decimal(r.convergence_gap, 6)});
  summary.add({"a_est^2/(2S)", io::decimal(r.y_bound, 20)});
  summary.add({"threshold N", std::to_string(r.threshold_N)});
  summary.add({"c", io::decimal(r.c.value, 20) + "  from " + r.c.provenance()});
  summary.add({"c budget", io::decimal(r.c_budget, 6)});
  summary.add({"slope C est", io::decimal(r.slope_C_est, 20)});
  summary.add({"intercept d est", io::decimal(r.intercept_d_est, 20)});
  summary.add({"slope >= c - tol", yes_no(r.slope_consistent())});
  summary.print(out);

  out << "\nVar[K_n] against c n:\n";
  TextTable verdicts({"n", "mean", "variance", "c*n", "margin", "pass"});
  for (const VarianceVerdict& v : r.verdicts) {
    verdicts.add({std::to_string(v.n), io::decimal(v.mean, 12), io::decimal(v.variance, 12),
                  io::decimal(v.c_times_n, 12), io::decimal(v.margin, 12), yes_no(v.pass)});
  }
  verdicts.print(out, "  ");

  out << "\nShape of K_n:\n";
  TextTable gauss({"n", "skewness", "excess kurtosis"});
  for (const GaussianRow& g : r.gaussian) {
    gauss.add({std::to_string(g.n), io::decimal(g.skewness, 12),
               io::decimal(g.excess_kurtosis_real, 12)});
  }
  gauss.print(out, "  ");
  out << '\n';
}

int cmd_verify(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out,
               std::ostream& err) {
  const SummandDistributions dist(spec, cfg.n_max);
  VerifyOptions options;
  options.precision_bits = cfg.precision_bits;
  options.threads = cfg.threads;
  options.throw_on_violation = false;

  std::ostream& status = cfg.format == Format::table ? out : err;
  TheoremReport report;
  try {
    report = verify_variance_bound(dist, cfg.n_max, options);
  } catch (const Error& e) {
    if (e.code() != Errc::no_threshold_in_range) throw;
    status << e.what() << '\n';
    return kExitVerificationFailed;
  }

  switch (cfg.format) {
    case Format::json:
      print_json(out, io::to_json(report));
      break;
    case Format::csv:
      io::write_csv(out, report);
      break;
    case Format::table:
      print_report_table(out, report);
      break;
  }
  if (auto bad = report.first_violation()) {
    status << "variance bound violated at n = " << *bad << '\n';
    return kExitVerificationFailed;
  }
  if (!report.slope_consistent()) {
    status << "variance slope estimate below c - tolerance\n";
    return kExitVerificationFailed;
  }
  status << "all variance bounds hold\n";
  return kExitOk;
}

int cmd_gauss(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  if (cfg.n_list.empty()) throw UsageError("gauss: --n-list is empty");
  const std::size_t top = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  const SummandDistributions dist(spec, top);
  const std::vector<GaussianRow> rows = gaussian_diagnostics(dist, cfg.n_list, cfg.precision_bits);
  const bool trend = gaussian_trend_holds(rows);
  switch (cfg.format) {
    case Format::json: {
      Json arr = Json::array();
      for (const GaussianRow& g : rows) arr.push_back(io::to_json(g));
      print_json(out, Json{{"rows", std::move(arr)}, {"trend_holds", trend}});
      break;
    }
    case Format::csv:
      io::write_csv_row(out, {"n", "skewness_squared", "excess_kurtosis", "skewness",
                              "excess_kurtosis_decimal"});
      for (const GaussianRow& g : rows) {
        io::write_csv_row(out, {std::to_string(g.n), io::rational(g.skewness_squared),
                                io::rational(g.excess_kurtosis), io::decimal(g.skewness),
                                io::decimal(g.excess_kurtosis_real)});
      }
      break;
    case Format::table: {
      TextTable t({"n", "skewness", "excess kurtosis"});
      for (const GaussianRow& g : rows) {
        t.add({std::to_string(g.n), io::decimal(g.skewness, 12),
               io::decimal(g.excess_kurtosis_real, 12)});
      }
      t.print(out);
      out << "both magnitudes smaller at the largest n: " << yes_no(trend) << '\n';
      break;
    }
  }
  return kExitOk;
}

int cmd_sample(const RunConfig& cfg, const RecurrenceSpec& spec, std::ostream& out) {
  require_n(cfg);
  if (cfg.samples == 0) throw UsageError("sample: --samples must be positive");
  const SequenceTable table(spec, cfg.n + 1);
  UniformSampler sampler(table, cfg.n, cfg.seed);

  std::vector<mpz_class> values;
  std::vector<Decomposition> draws;
  values.reserve(cfg.samples);
  draws.reserve(cfg.samples);
  mpz_class total = 0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    values.push_back(sampler.next_value());
    draws.push_back(decompose(table, values.back()));
    total += summand_count(draws.back());
  }
  mpq_class mean(total, cfg.samples);
  mean.canonicalize();

  switch (cfg.format) {
    case Format::json: {
      Json arr = Json::array();
      for (std::size_t i = 0; i < draws.size(); ++i) {
        arr.push_back(Json{{"value", io::integer(values[i])},
                           {"summands", summand_count(draws[i])},
                           {"coefficients", format_coefficients(draws[i].coefficients())}});
      }
      print_json(out, Json{{"n", cfg.n},
                           {"seed", cfg.seed},
                           {"samples", std::move(arr)},
                           {"mean_summands", io::rational(mean)}});
      break;
    }
    case Format::csv:
      io::write_csv_row(out, {"index", "value", "K", "coefficients"});
      for (std::size_t i = 0; i < draws.size(); ++i) {
        io::write_csv_row(out, {std::to_string(i), io::integer(values[i]),
                                std::to_string(summand_count(draws[i])),
                                format_coefficients(draws[i].coefficients())});
      }
      break;
    case Format::table: {
      TextTable t({"index", "K", "value"});
      for (std::size_t i = 0; i < draws.size(); ++i) {
        t.add({std::to_string(i), std::to_string(summand_count(draws[i])), io::integer(values[i])});
      }
      t.print(out);
      const EnsembleStats exact = stats_from_polynomial(summand_polynomial(spec, cfg.n));
      out << "sample mean of K = " << io::decimal(mean, 12) << ", exact E[K_" << cfg.n
          << "] = " << io::decimal(exact.mean, 12) << '\n';
      break;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

// --config must be honoured before the other flags bind their defaults.
std::optional<std::string> find_config_path(std::span<const std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  RecurrenceSpec spec = [&] {
    try {
      return parse_spec(cfg.coefficients);
    } catch (const Error& e) {
      throw UsageError(std::string("--coeffs: ") + e.what());
    }
  }();
  const std::string& c = cfg.subcommand;
  if (c == "seq") return cmd_seq(cfg, spec, out);
  if (c == "blocks") return cmd_blocks(cfg, spec, out);
  if (c == "decompose") return cmd_decompose(cfg, spec, out);
  if (c == "validate") return cmd_validate(cfg, spec, out);
  if (c == "enumerate") return cmd_enumerate(cfg, spec, out);
  if (c == "poly") return cmd_poly(cfg, spec, out);
  if (c == "stats") return cmd_stats(cfg, spec, out);
  if (c == "zdist") return cmd_zdist(cfg, spec, out);
  if (c == "identities") return cmd_identities(cfg, spec, out);
  if (c == "verify") return cmd_verify(cfg, spec, out, err);
  if (c == "gauss") return cmd_gauss(cfg, spec, out);
  if (c == "sample") return cmd_sample(cfg, spec, out);
  throw UsageError(c.empty() ? "no subcommand given (try --help)" : "unknown subcommand '" + c + "'");
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j, RunConfig base) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "coefficients") {
      base.coefficients = v.is_array() ? [&] {
        std::string s;
        for (const auto& c : v) s += (s.empty() ? "" : ",") + std::to_string(c.get<std::int64_t>());
        return s;
      }()
                                       : v.get<std::string>();
    } else if (key == "subcommand") {
      base.subcommand = v.get<std::string>();
    } else if (key == "n") {
      base.n = v.get<std::size_t>();
    } else if (key == "n_max") {
      base.n_max = v.get<std::size_t>();
    } else if (key == "argument") {
      base.argument = v.is_string() ? v.get<std::string>() : v.dump();
    } else if (key == "n_list") {
      base.n_list = v.get<std::vector<std::size_t>>();
    } else if (key == "format") {
      const auto it = kFormats.find(v.get<std::string>());
      if (it == kFormats.end()) throw UsageError("config: unknown format " + v.dump());
      base.format = it->second;
    } else if (key == "seed") {
      base.seed = v.get<std::uint64_t>();
    } else if (key == "samples") {
      base.samples = v.get<std::size_t>();
    } else if (key == "cap") {
      base.cap = v.get<std::uint64_t>();
    } else if (key == "precision_bits") {
      base.precision_bits = v.get<unsigned>();
    } else if (key == "threads") {
      base.threads = v.get<unsigned>();
    } else if (key == "output") {
      base.output = v.get<std::string>();
    } else {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
  return base;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    if (auto path = find_config_path(args)) cfg = load_config_file(*path);
    // Precedence: flag, then PLRS_ENUM_CAP, then config file, then the default.
    cfg.cap = enumeration_cap_from_env(cfg.cap);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Summand statistics for positive linear recurrence sequences", "plrs"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--coeffs", cfg.coefficients, "recurrence coefficients c_1,...,c_L")
      ->capture_default_str();
  app.add_option("--format", cfg.format, "output format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  app.add_option("--threads", cfg.threads, "worker threads, 0 = available parallelism");
  app.add_option("--config", config_path, "JSON RunConfig file; flags override its fields");
  app.add_option("--precision", cfg.precision_bits, "mantissa bits for estimated reals")
      ->check(CLI::Range(32u, 1u << 16));
  app.add_option("--cap", cfg.cap, "largest |Omega_n| that may be enumerated")
      ->check(CLI::PositiveNumber);
  app.add_option("--output,-o", cfg.output, "write to this file instead of stdout");

  auto n_command = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("n", cfg.n, "index n")->check(CLI::PositiveNumber);
    return sub;
  };
  n_command("seq", "print H_1..H_n");
  app.add_subcommand("blocks", "print the block catalog and the l(t) table");
  app.add_subcommand("decompose", "legal decomposition of M")
      ->add_option("M", cfg.argument, "positive integer");
  app.add_subcommand("validate", "check a coefficient string for legality")
      ->add_option("coefficients", cfg.argument, "\"a_1 a_2 ... a_n\"");
  n_command("enumerate", "list Omega_n");
  n_command("poly", "summand polynomial P_n");
  n_command("stats", "exact moments of K_n");
  n_command("zdist", "distribution of the second-to-last block size");
  n_command("identities", "exact conditional-expectation identities at n");
  app.add_subcommand("verify", "verify Var[K_n] >= c n up to --n-max")
      ->add_option("--n-max", cfg.n_max, "largest n")
      ->check(CLI::PositiveNumber);
  app.add_subcommand("gauss", "skewness and excess kurtosis of K_n")
      ->add_option("--n-list", cfg.n_list, "indices, e.g. 50,100,200,400")
      ->delimiter(',');
  CLI::App* sample = n_command("sample", "uniform draws from Omega_n");
  sample->add_option("--samples", cfg.samples, "number of draws");
  sample->add_option("--seed", cfg.seed, "random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (!app.get_subcommands().empty()) cfg.subcommand = app.get_subcommands().front()->get_name();

  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kExitUsage;
    }
  }
  std::ostream& sink = cfg.output.empty() ? out : file;

  try {
    return dispatch(cfg, sink, err);
  } catch (const BoundViolated& e) {
    err << "error: " << e.what() << " (n = " << e.n() << ")\n";
    return kExitVerificationFailed;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace plrs::cli
