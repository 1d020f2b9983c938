#pragma once

/*
 * Numerical verification of the variance lower bound Var[K_n] >= c n.
 *
 * Exact layer: E[K_n], Var[K_n] and the central moments are rationals taken
 * from SummandDistributions, and the two conditional identities
 *
 *   sum_t P(Z_n = t) (E[K_{n-l(t)}] + t)                                = E[K_n]
 *   sum_t P(Z_n = t) (E[K_{n-l(t)}^2] + 2t E[K_{n-l(t)}] + t^2)         = E[K_n^2]
 *
 * are checked with zero tolerance, independently of the growth constants.
 *
 * Estimation layer (precision-bits floats): a and b in E[K_n] = an + b + f(n)
 * are read off the exact means by differencing, f(n) := E[K_n] - an - b, and
 *
 *   Y_n = Z_n + f(n - L_n) - a L_n,   E[Y_n] = f(n),   Var[Y_n] > a^2 / (2S)
 *
 * for n beyond a threshold N. Then
 *
 *   c = min{ Var[K_{L+1}]/(L+1), ..., Var[K_N]/N, a^2/(2SL) }
 *
 * and Var[K_n] >= c n is checked for every L < n <= n_max.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "plrs/distributions.hpp"
#include "plrs/recurrence.hpp"

namespace plrs {

using Real = mpf_class;

inline constexpr unsigned kDefaultPrecisionBits = 128;
inline constexpr std::size_t kDefaultNMax = 400;

/// q rounded to a float carrying at least `bits` of mantissa.
Real to_real(const mpq_class& q, unsigned bits);

struct GrowthEstimate {
  std::size_t n_max = 0;
  unsigned precision_bits = kDefaultPrecisionBits;
  Real a_est;
  Real b_est;
  std::size_t window_begin = 0;  ///< b_est averages n in [window_begin, window_end]
  std::size_t window_end = 0;
  Real convergence_gap;  ///< |a_est - (E[K_{n_max-1}] - E[K_{n_max-2}])|

  /// f(n) = E[K_n] - a_est n - b_est for 1 <= n <= n_max; throws MissingFValue.
  const Real& f(std::size_t n) const;

  std::vector<Real> f_table;  ///< index n, entry 0 unused
};

/// Throws WindowTooSmall unless n_max >= 4L + 8.
GrowthEstimate estimate_growth(const SummandDistributions& dist, std::size_t n_max,
                               unsigned precision_bits = kDefaultPrecisionBits);

struct YStatistics {
  std::size_t n = 0;
  Real mean;
  Real variance;
  Real f_n;
  Real tolerance;  ///< budget for |E[Y_n] - f(n)|
  bool mean_matches_f = false;
};

/// Throws IndexTooSmall (n <= 2L) and MissingFValue.
YStatistics y_statistics(const SummandDistributions& dist, std::size_t n,
                         const GrowthEstimate& growth);

/// a_est^2 / (2S).
Real y_variance_bound(const GrowthEstimate& growth, std::uint64_t size);

struct ThresholdSweep {
  std::size_t threshold = 0;  ///< N
  Real bound;                 ///< a_est^2 / (2S)
  std::vector<YStatistics> rows;  ///< every n in (2L, n_max]

  bool passes(const YStatistics& row) const { return row.variance > bound; }
};

/// Smallest N > 2L with Var[Y_n] > a_est^2/(2S) on all of (N, n_max].
/// Throws NoThresholdInRange when the last index fails.
ThresholdSweep find_threshold(const SummandDistributions& dist, const GrowthEstimate& growth,
                              std::size_t n_max, unsigned threads = 0);

struct CCandidate {
  std::size_t n = 0;  ///< 0 for the a^2/(2SL) term
  Real value;
  std::optional<mpq_class> exact;
};

struct CChoice {
  Real value;
  std::optional<mpq_class> exact;  ///< set when a variance ratio is the minimum
  std::size_t argmin_n = 0;        ///< 0 when a^2/(2SL) is the minimum
  std::vector<CCandidate> candidates;

  std::string provenance() const;
};

/// Throws InvalidArgument for N <= L and NonPositiveC.
CChoice compute_c(const SummandDistributions& dist, const GrowthEstimate& growth, std::size_t N);

struct VarianceVerdict {
  std::size_t n = 0;
  mpq_class mean;
  mpq_class variance;
  Real c_times_n;
  Real margin;  ///< Var[K_n] - c n
  bool pass = false;
};

struct GaussianRow {
  std::size_t n = 0;
  mpq_class skewness_squared;  ///< mu_3^2 / sigma^6
  mpq_class excess_kurtosis;   ///< mu_4 / sigma^4 - 3
  Real skewness;
  Real excess_kurtosis_real;
};

/// Throws DegenerateVariance when Var[K_n] = 0.
std::vector<GaussianRow> gaussian_diagnostics(const SummandDistributions& dist,
                                              std::span<const std::size_t> n_list,
                                              unsigned precision_bits = kDefaultPrecisionBits);

/// Both |skewness| and |excess kurtosis| are strictly smaller at the largest n
/// of the table than at the smallest.
bool gaussian_trend_holds(std::span<const GaussianRow> rows);

struct TheoremReport {
  std::string spec;
  std::uint64_t size = 0;
  std::size_t length = 0;
  std::size_t n_max = 0;
  unsigned precision_bits = kDefaultPrecisionBits;

  Real a_est;
  Real b_est;
  Real convergence_gap;

  std::size_t threshold_N = 0;
  Real y_bound;
  std::vector<YStatistics> y_rows;

  CChoice c;
  Real c_budget;  ///< first-order effect of the error in a_est on c
  std::vector<VarianceVerdict> verdicts;  ///< every L < n <= n_max

  Real slope_C_est;  ///< Var[K_{n_max}] - Var[K_{n_max-1}], estimates C
  Real slope_tolerance;
  Real intercept_d_est;  ///< Var[K_{n_max}] - slope_C_est n_max, estimates d

  std::vector<GaussianRow> gaussian;

  bool all_pass() const;
  std::optional<std::size_t> first_violation() const;
  bool slope_consistent() const;
};

struct VerifyOptions {
  unsigned precision_bits = kDefaultPrecisionBits;
  unsigned threads = 0;
  std::vector<std::size_t> gaussian_n;  ///< empty: quarter points of n_max
  bool throw_on_violation = true;
};

/// Builds the whole report. Throws WindowTooSmall unless n_max >= N + 10,
/// and BoundViolated (with the first failing n) when throw_on_violation.
TheoremReport verify_variance_bound(const SummandDistributions& dist, std::size_t n_max,
                                    const VerifyOptions& options = {});
TheoremReport verify_variance_bound(const RecurrenceSpec& spec, std::size_t n_max,
                                    const VerifyOptions& options = {});

struct IdentityCheck {
  std::size_t n = 0;
  mpq_class lhs;
  mpq_class rhs;

  bool holds() const { return lhs == rhs; }
};

/// sum_t P(Z_n = t)(E[K_{n-l(t)}] + t) against E[K_n]; n > 2L.
IdentityCheck total_expectation_identity(const SummandDistributions& dist, std::size_t n);

/// sum_t P(Z_n = t)(E[K_{n-l(t)}^2] + 2t E[K_{n-l(t)}] + t^2) against E[K_n^2]; n > 2L.
IdentityCheck total_second_moment_identity(const SummandDistributions& dist, std::size_t n);

/// Per-t comparison of the split of Omega_n by second-to-last block size
/// (SummandDistributions::split_by_second_to_last) with the shorter ensemble.
struct ConditionalRow {
  std::uint64_t t = 0;
  mpq_class probability;        ///< closed form from the sequence terms
  mpq_class split_probability;  ///< |split_t| / |Omega_n|
  mpq_class mean_lhs, mean_rhs;      ///< E[K_n | Z_n = t], E[K_{n-l(t)}] + t
  mpq_class second_lhs, second_rhs;  ///< E[K_n^2 | Z_n = t], E[(K_{n-l(t)} + t)^2]
  bool polynomial_match = false;     ///< split_t == x^t P_{n-l(t)}

  bool holds() const {
    return probability == split_probability && mean_lhs == mean_rhs &&
           second_lhs == second_rhs && polynomial_match;
  }
};

std::vector<ConditionalRow> conditional_identities(const SummandDistributions& dist,
                                                   std::size_t n);

}  // namespace plrs
