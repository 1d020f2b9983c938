#include "plrs/verifier.hpp"

#include <algorithm>

#include "plrs/error.hpp"
#include "plrs/parallel.hpp"

namespace plrs {
namespace {

// Every Real below is created through these so that it carries the requested
// precision; gmpxx copy-assignment keeps the destination's precision, move
// assignment swaps it in.
Real real_zero(unsigned bits) { return Real(0, bits); }

Real real_from(std::uint64_t v, unsigned bits) {
  Real r(0, bits);
  mpf_set_ui(r.get_mpf_t(), v);
  return r;
}

// 2^-(bits - 32) * (1 + n): rounding allowance for sums of O(n)-sized terms.
Real rounding_allowance(unsigned bits, std::size_t n) {
  Real eps = real_from(1 + n, bits);
  mpf_div_2exp(eps.get_mpf_t(), eps.get_mpf_t(), bits > 40 ? bits - 32 : 8);
  return eps;
}

void require_built(const SummandDistributions& dist, std::size_t n) {
  if (n > dist.n_max()) {
    throw Error(Errc::invalid_argument, "exact distributions built only to n = " +
                                            std::to_string(dist.n_max()) + ", need " +
                                            std::to_string(n));
  }
}

void require_beyond_two_blocks(const SummandDistributions& dist, std::size_t n) {
  const std::size_t len = dist.spec().length();
  if (n <= 2 * len) {
    throw Error(Errc::index_too_small,
                "need n > 2L = " + std::to_string(2 * len) + ", got " + std::to_string(n));
  }
  require_built(dist, n);
}

mpq_class z_probability(const SummandDistributions& dist, std::size_t n, std::uint64_t t) {
  const std::size_t m = n - dist.catalog().length_table()[t];
  mpq_class p(dist.table().omega_size(m), dist.table().omega_size(n));
  p.canonicalize();
  return p;
}

}  // namespace

Real to_real(const mpq_class& q, unsigned bits) {
  Real r(0, bits);
  mpf_set_q(r.get_mpf_t(), q.get_mpq_t());
  return r;
}

const Real& GrowthEstimate::f(std::size_t n) const {
  if (n == 0 || n >= f_table.size()) {
    throw Error(Errc::missing_f_value, "f(" + std::to_string(n) + ") outside the table [1, " +
                                           std::to_string(f_table.size() - 1) + "]");
  }
  return f_table[n];
}

GrowthEstimate estimate_growth(const SummandDistributions& dist, std::size_t n_max,
                               unsigned bits) {
  const std::size_t len = dist.spec().length();
  if (n_max < 4 * len + 8) {
    throw Error(Errc::window_too_small, "n_max = " + std::to_string(n_max) + " < 4L + 8 = " +
                                            std::to_string(4 * len + 8));
  }
  require_built(dist, n_max);

  GrowthEstimate g;
  g.n_max = n_max;
  g.precision_bits = bits;

  const mpq_class step = dist.stats(n_max).mean - dist.stats(n_max - 1).mean;
  const mpq_class previous = dist.stats(n_max - 1).mean - dist.stats(n_max - 2).mean;
  g.a_est = to_real(step, bits);
  g.convergence_gap = to_real(abs(step - previous), bits);

  g.window_end = n_max;
  g.window_begin = n_max - n_max / 4 + 1;
  Real sum = real_zero(bits);
  for (std::size_t n = g.window_begin; n <= g.window_end; ++n) {
    sum += to_real(dist.stats(n).mean, bits) - g.a_est * n;
  }
  Real b = real_zero(bits);
  b = sum / (g.window_end - g.window_begin + 1);
  g.b_est = std::move(b);

  g.f_table.reserve(n_max + 1);
  g.f_table.push_back(real_zero(bits));
  for (std::size_t n = 1; n <= n_max; ++n) {
    Real f = real_zero(bits);
    f = to_real(dist.stats(n).mean, bits) - g.a_est * n - g.b_est;
    g.f_table.push_back(std::move(f));
  }
  return g;
}

Real y_variance_bound(const GrowthEstimate& growth, std::uint64_t size) {
  Real bound = real_zero(growth.precision_bits);
  bound = growth.a_est * growth.a_est / (2 * size);
  return bound;
}

YStatistics y_statistics(const SummandDistributions& dist, std::size_t n,
                         const GrowthEstimate& growth) {
  require_beyond_two_blocks(dist, n);
  const unsigned bits = growth.precision_bits;
  const auto lengths = dist.catalog().length_table();

  Real mean = real_zero(bits);
  Real second = real_zero(bits);
  Real y = real_zero(bits);
  Real p = real_zero(bits);
  for (std::uint64_t t = 0; t < lengths.size(); ++t) {
    const std::size_t ell = lengths[t];
    p = to_real(z_probability(dist, n, t), bits);
    y = real_from(t, bits) + growth.f(n - ell) - growth.a_est * ell;
    mean += p * y;
    second += p * y * y;
  }

  YStatistics row;
  row.n = n;
  Real variance = real_zero(bits);
  variance = second - mean * mean;
  row.variance = std::move(variance);
  row.f_n = Real(growth.f(n));
  Real tolerance = real_zero(bits);
  tolerance = 10 * growth.convergence_gap * dist.spec().length() + rounding_allowance(bits, n);
  Real error = real_zero(bits);
  error = abs(mean - row.f_n);
  row.mean_matches_f = error <= tolerance;
  row.tolerance = std::move(tolerance);
  row.mean = std::move(mean);
  return row;
}

ThresholdSweep find_threshold(const SummandDistributions& dist, const GrowthEstimate& growth,
                              std::size_t n_max, unsigned threads) {
  const std::size_t first = 2 * dist.spec().length() + 1;
  if (n_max < first) {
    throw Error(Errc::no_threshold_in_range, "no index above 2L up to n_max = " +
                                                 std::to_string(n_max));
  }
  ThresholdSweep sweep;
  sweep.bound = y_variance_bound(growth, dist.spec().size());
  sweep.rows.resize(n_max - first + 1);
  parallel_for(first, n_max + 1, threads,
               [&](std::size_t n) { sweep.rows[n - first] = y_statistics(dist, n, growth); });

  std::size_t last_failure = 0;
  for (const YStatistics& row : sweep.rows) {
    if (!sweep.passes(row)) last_failure = row.n;
  }
  if (last_failure == n_max) {
    throw Error(Errc::no_threshold_in_range,
                "Var[Y_n] <= a^2/(2S) at n = n_max = " + std::to_string(n_max));
  }
  sweep.threshold = std::max(first, last_failure);
  return sweep;
}

std::string CChoice::provenance() const {
  if (argmin_n == 0) return "a^2/(2SL)";
  return "Var[K_" + std::to_string(argmin_n) + "]/" + std::to_string(argmin_n);
}

CChoice compute_c(const SummandDistributions& dist, const GrowthEstimate& growth, std::size_t N) {
  const std::size_t len = dist.spec().length();
  const std::uint64_t size = dist.spec().size();
  const unsigned bits = growth.precision_bits;
  if (N <= len) {
    throw Error(Errc::invalid_argument,
                "N = " + std::to_string(N) + " <= L leaves no variance terms");
  }
  require_built(dist, N);

  CChoice choice;
  for (std::size_t n = len + 1; n <= N; ++n) {
    mpq_class ratio = dist.stats(n).variance / n;
    CCandidate cand;
    cand.n = n;
    cand.value = to_real(ratio, bits);
    cand.exact = std::move(ratio);
    choice.candidates.push_back(std::move(cand));
  }
  CCandidate a_term;
  a_term.n = 0;
  Real a_value = real_zero(bits);
  a_value = growth.a_est * growth.a_est / (2 * size * len);
  a_term.value = std::move(a_value);
  choice.candidates.push_back(std::move(a_term));

  const CCandidate* best = &choice.candidates.front();
  for (const CCandidate& cand : choice.candidates) {
    if (cand.value < best->value) best = &cand;
  }
  choice.value = Real(best->value);
  choice.exact = best->exact;
  choice.argmin_n = best->n;
  if (choice.value <= 0) {
    throw Error(Errc::non_positive_c, "c = " + choice.provenance() + " is not positive");
  }
  return choice;
}

std::vector<GaussianRow> gaussian_diagnostics(const SummandDistributions& dist,
                                              std::span<const std::size_t> n_list,
                                              unsigned bits) {
  std::vector<GaussianRow> rows;
  for (std::size_t n : n_list) {
    require_built(dist, n);
    const EnsembleStats& s = dist.stats(n);
    if (s.variance == 0) {
      throw Error(Errc::degenerate_variance, "Var[K_" + std::to_string(n) + "] = 0");
    }
    GaussianRow row;
    row.n = n;
    const mpq_class var2 = s.variance * s.variance;
    row.skewness_squared = s.central3 * s.central3 / (var2 * s.variance);
    row.excess_kurtosis = s.central4 / var2 - 3;
    Real skew = real_zero(bits);
    skew = sqrt(to_real(row.skewness_squared, bits));
    if (s.central3 < 0) skew = -skew;
    row.skewness = std::move(skew);
    row.excess_kurtosis_real = to_real(row.excess_kurtosis, bits);
    rows.push_back(std::move(row));
  }
  return rows;
}

bool gaussian_trend_holds(std::span<const GaussianRow> rows) {
  if (rows.size() < 2) return false;
  auto by_n = [](const GaussianRow& a, const GaussianRow& b) { return a.n < b.n; };
  const GaussianRow& small = *std::min_element(rows.begin(), rows.end(), by_n);
  const GaussianRow& large = *std::max_element(rows.begin(), rows.end(), by_n);
  return large.skewness_squared < small.skewness_squared &&
         abs(large.excess_kurtosis) < abs(small.excess_kurtosis);
}

bool TheoremReport::slope_consistent() const { return slope_C_est >= c.value - slope_tolerance; }

bool TheoremReport::all_pass() const { return !first_violation() && slope_consistent(); }

std::optional<std::size_t> TheoremReport::first_violation() const {
  for (const VarianceVerdict& v : verdicts) {
    if (!v.pass) return v.n;
  }
  return std::nullopt;
}

TheoremReport verify_variance_bound(const SummandDistributions& dist, std::size_t n_max,
                                    const VerifyOptions& options) {
  const unsigned bits = options.precision_bits;
  const std::size_t len = dist.spec().length();
  const std::uint64_t size = dist.spec().size();

  GrowthEstimate growth = estimate_growth(dist, n_max, bits);
  ThresholdSweep sweep = find_threshold(dist, growth, n_max, options.threads);
  const std::size_t N = sweep.threshold;
  if (n_max < N + 10) {
    throw Error(Errc::window_too_small, "n_max = " + std::to_string(n_max) +
                                            " < N + 10 with N = " + std::to_string(N));
  }

  TheoremReport report;
  report.spec = dist.spec().to_string();
  report.size = size;
  report.length = len;
  report.n_max = n_max;
  report.precision_bits = bits;
  report.threshold_N = N;
  report.c = compute_c(dist, growth, N);

  // c = a^2/(2SL) moves by a/(SL) per unit change of a.
  Real budget = real_zero(bits);
  if (!report.c.exact) budget = growth.a_est * growth.convergence_gap / (size * len);
  budget += rounding_allowance(bits, n_max);
  report.c_budget = std::move(budget);

  report.verdicts.resize(n_max - len);
  parallel_for(len + 1, n_max + 1, options.threads, [&](std::size_t n) {
    const EnsembleStats& s = dist.stats(n);
    VarianceVerdict v;
    v.n = n;
    v.mean = s.mean;
    v.variance = s.variance;
    if (report.c.exact) {
      const mpq_class cn = *report.c.exact * n;
      const mpq_class margin = s.variance - cn;
      v.c_times_n = to_real(cn, bits);
      v.margin = to_real(margin, bits);
      v.pass = margin >= 0;
    } else {
      Real cn = real_zero(bits);
      cn = report.c.value * n;
      Real margin = real_zero(bits);
      margin = to_real(s.variance, bits) - cn;
      v.pass = margin >= 0;
      v.c_times_n = std::move(cn);
      v.margin = std::move(margin);
    }
    report.verdicts[n - len - 1] = std::move(v);
  });

  const mpq_class slope = dist.stats(n_max).variance - dist.stats(n_max - 1).variance;
  const mpq_class previous = dist.stats(n_max - 1).variance - dist.stats(n_max - 2).variance;
  report.slope_C_est = to_real(slope, bits);
  Real slope_tol = real_zero(bits);
  slope_tol = 10 * to_real(abs(slope - previous), bits) + rounding_allowance(bits, n_max);
  report.slope_tolerance = std::move(slope_tol);
  report.intercept_d_est = to_real(dist.stats(n_max).variance - slope * n_max, bits);

  std::vector<std::size_t> gauss_n = options.gaussian_n;
  if (gauss_n.empty()) {
    for (std::size_t n : {n_max / 8, n_max / 4, n_max / 2, n_max}) {
      if (n > len && (gauss_n.empty() || gauss_n.back() != n)) gauss_n.push_back(n);
    }
  }
  report.gaussian = gaussian_diagnostics(dist, gauss_n, bits);

  report.a_est = std::move(growth.a_est);
  report.b_est = std::move(growth.b_est);
  report.convergence_gap = std::move(growth.convergence_gap);
  report.y_bound = std::move(sweep.bound);
  report.y_rows = std::move(sweep.rows);

  if (options.throw_on_violation) {
    if (auto bad = report.first_violation()) {
      throw BoundViolated(*bad, "Var[K_" + std::to_string(*bad) + "] < c * " +
                                    std::to_string(*bad) + " with c = " + report.c.provenance());
    }
  }
  return report;
}

TheoremReport verify_variance_bound(const RecurrenceSpec& spec, std::size_t n_max,
                                    const VerifyOptions& options) {
  const SummandDistributions dist(spec, n_max);
  return verify_variance_bound(dist, n_max, options);
}

IdentityCheck total_expectation_identity(const SummandDistributions& dist, std::size_t n) {
  require_beyond_two_blocks(dist, n);
  const auto lengths = dist.catalog().length_table();
  IdentityCheck check;
  check.n = n;
  check.lhs = 0;
  for (std::uint64_t t = 0; t < lengths.size(); ++t) {
    const EnsembleStats& shorter = dist.stats(n - lengths[t]);
    check.lhs += z_probability(dist, n, t) * (shorter.mean + mpq_class(mpz_class(t)));
  }
  check.rhs = dist.stats(n).mean;
  return check;
}

IdentityCheck total_second_moment_identity(const SummandDistributions& dist, std::size_t n) {
  require_beyond_two_blocks(dist, n);
  const auto lengths = dist.catalog().length_table();
  IdentityCheck check;
  check.n = n;
  check.lhs = 0;
  for (std::uint64_t t = 0; t < lengths.size(); ++t) {
    const EnsembleStats& shorter = dist.stats(n - lengths[t]);
    const mpq_class tq{mpz_class(t)};
    check.lhs +=
        z_probability(dist, n, t) * (shorter.second_moment() + 2 * tq * shorter.mean + tq * tq);
  }
  check.rhs = dist.stats(n).second_moment();
  return check;
}

std::vector<ConditionalRow> conditional_identities(const SummandDistributions& dist,
                                                   std::size_t n) {
  require_beyond_two_blocks(dist, n);
  const auto lengths = dist.catalog().length_table();
  const std::vector<Polynomial> split = dist.split_by_second_to_last(n);
  const mpz_class omega = dist.table().omega_size(n);

  std::vector<ConditionalRow> rows;
  for (std::uint64_t t = 0; t < lengths.size(); ++t) {
    ConditionalRow row;
    row.t = t;
    row.probability = z_probability(dist, n, t);

    const PowerSums sums = power_sums(split[t]);
    if (sums.count == 0) {
      throw Error(Errc::empty_conditional_event,
                  "no element of Omega_" + std::to_string(n) + " has Z = " + std::to_string(t));
    }
    row.split_probability = mpq_class(sums.count, omega);
    row.split_probability.canonicalize();
    row.mean_lhs = mpq_class(sums.s1, sums.count);
    row.mean_lhs.canonicalize();
    row.second_lhs = mpq_class(sums.s2, sums.count);
    row.second_lhs.canonicalize();

    const std::size_t m = n - lengths[t];
    const EnsembleStats& shorter = dist.stats(m);
    const mpq_class tq{mpz_class(t)};
    row.mean_rhs = shorter.mean + tq;
    row.second_rhs = shorter.second_moment() + 2 * tq * shorter.mean + tq * tq;

    Polynomial shifted;
    add_shifted(shifted, dist.polynomial(m).coeffs, t);
    row.polynomial_match = shifted == split[t];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace plrs
