// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "plrs/distributions.hpp"
#include "plrs/ensemble.hpp"
#include "plrs/io.hpp"
#include "plrs/verifier.hpp"
#include "plrs/zeckendorf.hpp"

using namespace plrs;

namespace {

constexpr std::size_t kCardinalityMaxN = 20;
constexpr std::size_t kUniquenessMaxN = 16;
constexpr long kRoundTripMax = 100000;
constexpr std::size_t kZMaxN = 22;
constexpr std::size_t kNMax = 400;
constexpr std::size_t kThresholdLimit = 60;
constexpr double kSlopeTarget = 0.2763932;
constexpr double kSlopeTolerance = 1e-3;
constexpr double kGapLimit = 1e-6;
constexpr std::size_t kMonteCarloN = 200;
constexpr std::size_t kMonteCarloSamples = 10000;
constexpr double kStandardErrors = 5.0;
constexpr std::uint64_t kNoCap = std::numeric_limits<std::uint64_t>::max();

const std::vector<RecurrenceSpec>& specs() {
  static const std::vector<RecurrenceSpec> all{validate_spec({1, 1}), validate_spec({2, 2, 0, 2}),
                                               validate_spec({1, 2}), validate_spec({3, 0, 1})};
  return all;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    if (!detail.empty()) detail += "; ";
    detail += why;
    pass = false;
  }
};

std::string spec_name(const RecurrenceSpec& s) { return "(" + s.to_string() + ")"; }

std::string seconds_since(std::chrono::steady_clock::time_point start) {
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream out;
  out.precision(3);
  out << s << " s";
  return out.str();
}

// Censuses for every fixture spec and n <= 22, shared by the cardinality and
// Z-distribution criteria.
std::map<std::pair<std::size_t, std::size_t>, OmegaCensus>& censuses() {
  static std::map<std::pair<std::size_t, std::size_t>, OmegaCensus> cache;
  return cache;
}

const OmegaCensus& census(std::size_t spec_index, std::size_t n) {
  auto& cache = censuses();
  const auto key = std::make_pair(spec_index, n);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, omega_census(BlockCatalog(specs()[spec_index]), n)).first;
  }
  return it->second;
}

const SummandDistributions& dist400(std::size_t spec_index) {
  static std::map<std::size_t, SummandDistributions> cache;
  auto it = cache.find(spec_index);
  if (it == cache.end()) it = cache.emplace(spec_index, SummandDistributions(specs()[spec_index], kNMax)).first;
  return it->second;
}

// ---------------------------------------------------------------------------

Outcome cardinality() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < specs().size(); ++i) {
    const RecurrenceSpec& spec = specs()[i];
    const SummandDistributions dist(spec, kCardinalityMaxN);
    for (std::size_t n = 1; n <= kCardinalityMaxN; ++n) {
      const mpz_class closed = dist.table().omega_size(n);
      const mpz_class grammar(census(i, n).count);
      std::uint64_t walked = 0;
      for_each_by_integer_walk(dist.table(), n, kNoCap,
                               [&](std::span<const Coeff>, std::uint64_t) { ++walked; });
      const mpz_class poly = dist.polynomial(n).total();
      if (grammar != closed || poly != closed || mpz_class(walked) != closed) {
        o.fail(spec_name(spec) + " n=" + std::to_string(n) + ": grammar " + grammar.get_str() +
               ", H_{n+1}-H_n " + closed.get_str() + ", P_n(1) " + poly.get_str() +
               ", integer walk " + std::to_string(walked));
      }
    }
  }
  if (o.pass) o.detail = "4 specs, n <= 20, four counts equal (" + seconds_since(start) + ")";
  return o;
}

Outcome uniqueness() {
  Outcome o;
  std::uint64_t checked = 0;
  for (const RecurrenceSpec& spec : specs()) {
    const BlockCatalog cat(spec);
    const SequenceTable table(spec, kUniquenessMaxN + 1);
    for (std::size_t n = 1; n <= kUniquenessMaxN; ++n) {
      const std::vector<std::uint64_t> h = detail::small_terms(table, n, kNoCap);
      const std::uint64_t low = h[n - 1];
      const std::uint64_t width = h[n] - low;
      std::vector<bool> seen(width, false);
      std::uint64_t duplicates = 0, outside = 0, visits = 0;
      for_each_omega(cat, n, [&](const OmegaLeaf& leaf) {
        ++visits;
        std::uint64_t v = 0;
        for (std::size_t k = 0; k < n; ++k) v += leaf.coefficients[k] * h[n - 1 - k];
        if (v < low || v - low >= width) {
          ++outside;
          return;
        }
        if (seen[v - low]) ++duplicates;
        seen[v - low] = true;
      });
      const bool covered = std::find(seen.begin(), seen.end(), false) == seen.end();
      checked += visits;
      if (duplicates || outside || !covered || visits != width) {
        o.fail(spec_name(spec) + " n=" + std::to_string(n) + ": " + std::to_string(duplicates) +
               " duplicates, " + std::to_string(outside) + " outside the interval");
      }
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " decompositions, each interval hit exactly once";
  return o;
}

Outcome round_trip() {
  Outcome o;
  for (const RecurrenceSpec& spec : specs()) {
    SequenceTable table(spec);
    table.extend_past(kRoundTripMax);
    for (long m = 1; m <= kRoundTripMax; ++m) {
      const Decomposition d = decompose(table, m);
      if (value(table, d) != m || !is_legal(spec, d.coefficients())) {
        o.fail(spec_name(spec) + " m=" + std::to_string(m));
        break;
      }
    }
  }
  if (o.pass) o.detail = "m <= 100000 on 4 specs";
  return o;
}

Outcome golden_fixtures() {
  Outcome o;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) o.fail(what);
  };
  const RecurrenceSpec fib = validate_spec({1, 1});
  const SequenceTable fib_table(fib, 8);
  const Decomposition twelve = decompose(fib_table, 12);
  expect(parse_blocks(fib, twelve).to_string() == "[1 0][1 0][1]", "blocks of 12");
  const BlockRemoval fib_removed = remove_second_to_last_block(fib, twelve);
  expect(summand_indices(fib_removed.result) == std::vector<std::size_t>{3, 1},
         "12 reduces to F_3 + F_1");

  const RecurrenceSpec ex2 = validate_spec({2, 2, 0, 2});
  const SequenceTable ex2_table(ex2, 8);
  const Decomposition d601 = decompose(ex2_table, 601);
  expect(parse_blocks(ex2, d601).to_string() == "[1][0][0][2 0][0][1]", "blocks of 601");
  const BlockRemoval ex2_removed = remove_second_to_last_block(ex2, d601);
  expect(summand_indices(ex2_removed.result) == std::vector<std::size_t>{6, 3, 3, 1},
         "601 reduces to H_6 + 2H_3 + H_1");
  expect(value(ex2_table, ex2_removed.result) == 215, "reduced value 215");

  auto listing = [](std::span<const Block> blocks) {
    std::string s;
    for (const Block& b : blocks) s += (s.empty() ? "" : " ") + b.to_string();
    return s;
  };
  const BlockCatalog fib_cat(fib), ex2_cat(ex2);
  expect(listing(fib_cat.type2_blocks()) == "[0] [1 0]", "Fibonacci Type 2 blocks");
  expect(listing(fib_cat.type1_blocks()) == "[1]", "Fibonacci Type 1 blocks");
  expect(listing(ex2_cat.type2_blocks()) == "[0] [1] [2 0] [2 1] [2 2 0 0] [2 2 0 1]",
         "(2,2,0,2) Type 2 blocks");
  expect(listing(ex2_cat.type1_blocks()) == "[2] [2 2] [2 2 0]", "(2,2,0,2) Type 1 blocks");
  if (o.pass) o.detail = "12 -> [1 0][1 0][1] -> F_3+F_1; 601 -> [1][0][0][2 0][0][1] -> 215; catalogs match";
  return o;
}

Outcome z_distribution_check() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::size_t rows = 0;
  for (std::size_t i = 0; i < specs().size(); ++i) {
    const RecurrenceSpec& spec = specs()[i];
    const BlockCatalog cat(spec);
    const SequenceTable table(spec, kZMaxN + 1);
    for (std::size_t n = 2 * spec.length() + 1; n <= kZMaxN; ++n) {
      const OmegaCensus& c = census(i, n);
      const std::string where = spec_name(spec) + " n=" + std::to_string(n);
      mpq_class previous = 2;
      for (std::uint64_t t = 0; t < spec.size(); ++t) {
        mpq_class empirical(c.z_count[t], c.count);
        empirical.canonicalize();
        const std::size_t ell = cat.length_table()[t];
        mpq_class closed(table.omega_size(n - ell), table.omega_size(n));
        closed.canonicalize();
        if (empirical != closed) o.fail(where + " t=" + std::to_string(t) + ": enumerated " +
                                        io::rational(empirical) + " vs " + io::rational(closed));
        if (closed > previous) o.fail(where + ": not non-increasing at t=" + std::to_string(t));
        if (t == 0 && closed < mpq_class(1, spec.size())) o.fail(where + ": P(Z=0) < 1/S");
        previous = closed;
        ++rows;
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(rows) + " (n, t) pairs exact, monotone, P(Z=0) >= 1/S (" +
               seconds_since(start) + ")";
  }
  return o;
}

Outcome conditional_identities_check() {
  Outcome o;
  std::size_t dp_checks = 0, enum_checks = 0;
  for (std::size_t i = 0; i < specs().size(); ++i) {
    const RecurrenceSpec& spec = specs()[i];
    const SummandDistributions& dist = dist400(i);
    for (std::size_t n = 2 * spec.length() + 1; n <= kNMax; ++n) {
      const std::string where = spec_name(spec) + " n=" + std::to_string(n);
      if (!total_expectation_identity(dist, n).holds()) o.fail(where + " first moment");
      if (!total_second_moment_identity(dist, n).holds()) o.fail(where + " second moment");
      for (const ConditionalRow& row : conditional_identities(dist, n)) {
        if (!row.holds()) o.fail(where + " t=" + std::to_string(row.t));
      }
      dp_checks += 2;
      if (n <= kCardinalityMaxN) {
        const OmegaCensus& c = census(i, n);
        for (std::uint64_t t = 0; t < spec.size(); ++t) {
          if (!conditional_check_from_census(c, dist, t, Moment::first).holds() ||
              !conditional_check_from_census(c, dist, t, Moment::second).holds()) {
            o.fail(where + " enumeration t=" + std::to_string(t));
          }
          enum_checks += 2;
        }
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(dp_checks) + " exact DP identities to n=400, " +
               std::to_string(enum_checks) + " enumeration cross-checks to n=20";
  }
  return o;
}

Outcome growth_constants() {
  Outcome o;
  const GrowthEstimate g = estimate_growth(dist400(0), kNMax);
  // Independent target 1/(phi^2 + 1) in the same precision.
  Real five(5, g.precision_bits), phi(0, g.precision_bits), classical(0, g.precision_bits);
  phi = (1 + sqrt(five)) / 2;
  classical = 1 / (phi * phi + 1);
  const Real target(kSlopeTarget, g.precision_bits);
  const Real off_target = abs(g.a_est - target);
  const Real off_classical = abs(g.a_est - classical);
  if (off_target >= Real(kSlopeTolerance)) o.fail("a_est " + io::decimal(g.a_est, 12) + " off 0.2763932");
  if (off_classical >= Real(kSlopeTolerance)) o.fail("a_est off 1/(phi^2+1)");
  if (g.convergence_gap >= Real(kGapLimit)) o.fail("gap " + io::decimal(g.convergence_gap, 6));
  if (o.pass) {
    o.detail = "a_est = " + io::decimal(g.a_est, 16) + ", |a_est - 1/(phi^2+1)| = " +
               io::decimal(off_classical, 3) + ", gap = " + io::decimal(g.convergence_gap, 3);
  }
  return o;
}

Outcome lemma_threshold() {
  Outcome o;
  std::string summary;
  for (std::size_t i = 0; i < specs().size(); ++i) {
    const RecurrenceSpec& spec = specs()[i];
    const GrowthEstimate g = estimate_growth(dist400(i), kNMax);
    try {
      const ThresholdSweep sweep = find_threshold(dist400(i), g, kNMax);
      for (const YStatistics& row : sweep.rows) {
        if (row.n > sweep.threshold && !sweep.passes(row)) {
          o.fail(spec_name(spec) + " n=" + std::to_string(row.n));
        }
      }
      if (sweep.threshold > kThresholdLimit) {
        o.fail(spec_name(spec) + " N=" + std::to_string(sweep.threshold) + " > 60");
      }
      summary += (summary.empty() ? "" : ", ") + spec_name(spec) + " N=" +
                 std::to_string(sweep.threshold);
    } catch (const Error& e) {
      o.fail(spec_name(spec) + ": " + e.what());
    }
  }
  if (o.pass) o.detail = "Var[Y_n] > a^2/(2S) on (N, 400]: " + summary;
  return o;
}

Outcome variance_bound() {
  Outcome o;
  std::string summary;
  for (std::size_t i = 0; i < specs().size(); ++i) {
    const RecurrenceSpec& spec = specs()[i];
    const auto start = std::chrono::steady_clock::now();
    VerifyOptions options;
    options.throw_on_violation = false;
    const TheoremReport r = verify_variance_bound(dist400(i), kNMax, options);
    if (auto bad = r.first_violation()) o.fail(spec_name(spec) + " violated at n=" + std::to_string(*bad));
    if (r.verdicts.size() != kNMax - spec.length()) o.fail(spec_name(spec) + " incomplete sweep");
    if (!r.slope_consistent()) o.fail(spec_name(spec) + " slope below c");

    const std::vector<std::string> args{"--coeffs", spec.to_string(), "verify", "--n-max",
                                        std::to_string(kNMax)};
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0 || out.str().find("all variance bounds hold") == std::string::npos) {
      o.fail(spec_name(spec) + " verify exit " + std::to_string(code));
    }
    summary += (summary.empty() ? "" : ", ") + spec_name(spec) + " c=" +
               io::decimal(r.c.value, 4) + " [" + r.c.provenance() + ", budget " +
               io::decimal(r.c_budget, 2) + "] " + seconds_since(start);
  }
  if (o.pass) o.detail = "Var[K_n] >= c n for L < n <= 400, verify exits 0: " + summary;
  return o;
}

Outcome gaussian_trend() {
  Outcome o;
  std::string summary;
  const std::vector<std::size_t> ns{50, kNMax};
  for (std::size_t i = 0; i < specs().size(); ++i) {
    const RecurrenceSpec& spec = specs()[i];
    const auto rows = gaussian_diagnostics(dist400(i), ns);
    const GaussianRow& small = rows[0];
    const GaussianRow& large = rows[1];
    const bool skew = large.skewness_squared < small.skewness_squared;
    const bool kurt = abs(large.excess_kurtosis) < abs(small.excess_kurtosis);
    const std::string row = spec_name(spec) + " skew " + io::decimal(small.skewness, 3) + " -> " +
                            io::decimal(large.skewness, 3) + ", kurt " +
                            io::decimal(small.excess_kurtosis_real, 3) + " -> " +
                            io::decimal(large.excess_kurtosis_real, 3);
    summary += (summary.empty() ? "" : "; ") + row;
    if (!skew) {
      o.fail(spec_name(spec) + " |skewness| not smaller at n=400" +
             (small.skewness_squared == 0 && large.skewness_squared == 0
                  ? " (exactly 0 at both: K_n is symmetric)"
                  : ""));
    }
    if (!kurt) o.fail(spec_name(spec) + " |excess kurtosis| not smaller at n=400");
  }
  if (o.pass) {
    o.detail = summary;
  } else {
    o.detail += " | " + summary;
  }
  return o;
}

Outcome determinism_and_sampling() {
  Outcome o;
  std::string summary;
  for (std::size_t i = 0; i < specs().size(); ++i) {
    const RecurrenceSpec& spec = specs()[i];
    const std::vector<std::string> args{"--coeffs", spec.to_string(), "--format", "csv", "sample",
                                        std::to_string(kMonteCarloN), "--samples",
                                        std::to_string(kMonteCarloSamples), "--seed", "20241016"};
    std::ostringstream a, b, err;
    const int code_a = cli::run(args, a, err);
    const int code_b = cli::run(args, b, err);
    if (code_a != 0 || code_b != 0 || a.str() != b.str() || a.str().empty()) {
      o.fail(spec_name(spec) + " sample output not reproducible");
      continue;
    }

    // Mean of the K column against the exact mean.
    std::istringstream lines(a.str());
    std::string line;
    std::getline(lines, line);  // header
    mpz_class total = 0;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
      const auto first = line.find(',');
      const auto second = line.find(',', first + 1);
      const auto third = line.find(',', second + 1);
      total += mpz_class(line.substr(second + 1, third - second - 1));
      ++count;
    }
    const EnsembleStats& exact = dist400(i).stats(kMonteCarloN);
    mpq_class mean(total, count);
    mean.canonicalize();
    const double se = std::sqrt(exact.variance.get_d() / static_cast<double>(count));
    const double z = mpq_class(mean - exact.mean).get_d() / se;
    if (count != kMonteCarloSamples) o.fail(spec_name(spec) + " sample count " + std::to_string(count));
    if (std::abs(z) >= kStandardErrors) {
      o.fail(spec_name(spec) + " Monte Carlo mean " + std::to_string(z) + " standard errors off");
    }
    std::ostringstream zs;
    zs.precision(3);
    zs << z;
    summary += (summary.empty() ? "" : ", ") + spec_name(spec) + " z=" + zs.str();
  }
  if (o.pass) o.detail = "byte-identical reruns; 10^4 draws at n=200 within 5 SE: " + summary;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"cardinality identity", cardinality},
      {"uniqueness oracle", uniqueness},
      {"round trip", round_trip},
      {"golden fixtures", golden_fixtures},
      {"Z-distribution", z_distribution_check},
      {"conditional identities", conditional_identities_check},
      {"growth constants", growth_constants},
      {"Var[Y_n] threshold", lemma_threshold},
      {"variance lower bound", variance_bound},
      {"Gaussian trend", gaussian_trend},
      {"determinism and sampling", determinism_and_sampling},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
