#pragma once

/*
 * Exact distribution of the summand count K_n over Omega_n.
 *
 * Legal strings are sequences of Type 2 blocks optionally closed by one
 * Type 1 block. Writing x^size for a block, the tail polynomials
 *
 *   Q_0 = 1,   Q_r = sum_{t : l(t) <= r} x^t Q_{r - l(t)}  +  [r < L] x^{c_1 + ... + c_r}
 *
 * count legal strings of length r by summands (leading zeros allowed), and
 *
 *   P_n = sum_{t >= 1, l(t) <= n} x^t Q_{n - l(t)}  +  [n < L] x^{c_1 + ... + c_n}
 *
 * restricts the first block to a positive leading coefficient, so
 * [x^k] P_n = #{omega in Omega_n : K_n(omega) = k}. Every shift is by a block
 * size, so building P_1..P_N costs O(N^2 S) big-integer additions.
 *
 * A second family with Type 2 blocks only (B_r, and A_p with positive leading
 * block) gives the split of Omega_n by the size of the second-to-last block
 * without going through the removal bijection.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "plrs/recurrence.hpp"

namespace plrs {

using Polynomial = std::vector<mpz_class>;

/// coeffs[k] = #{omega in Omega_n : K_n(omega) = k}.
struct SummandPolynomial {
  std::size_t n = 0;
  Polynomial coeffs;

  /// P_n(1) = |Omega_n|.
  mpz_class total() const;

  bool operator==(const SummandPolynomial&) const = default;
};

/// sum_k k^j coeffs[k] for j = 0..4.
struct PowerSums {
  mpz_class count, s1, s2, s3, s4;
};

PowerSums power_sums(std::span<const mpz_class> coeffs);

/// Moments of K_n under the uniform measure on Omega_n, all exact.
struct EnsembleStats {
  std::size_t n = 0;
  mpz_class cardinality;
  mpq_class mean;
  mpq_class variance;
  mpq_class central3;
  mpq_class central4;

  /// E[K_n^2].
  mpq_class second_moment() const { return variance + mean * mean; }
};

/// Throws EmptyDistribution when every coefficient is zero.
EnsembleStats stats_from_polynomial(const SummandPolynomial& p);

class SummandDistributions {
 public:
  /// Builds P_1..P_{n_max}; the sequence table is kept to H_{n_max + 1}.
  explicit SummandDistributions(const RecurrenceSpec& spec, std::size_t n_max = 1);

  const RecurrenceSpec& spec() const noexcept { return catalog_.spec(); }
  const BlockCatalog& catalog() const noexcept { return catalog_; }
  const SequenceTable& table() const noexcept { return table_; }
  std::size_t n_max() const noexcept { return polys_.size(); }

  void extend_to(std::size_t n_max);

  /// P_n, 1 <= n <= n_max.
  const SummandPolynomial& polynomial(std::size_t n) const;
  const EnsembleStats& stats(std::size_t n) const;

  /// Q_r, 0 <= r <= n_max.
  const Polynomial& tail(std::size_t r) const;

  /// Index t: summand polynomial of {omega in Omega_n with at least two
  /// blocks and second-to-last block of size t}.
  std::vector<Polynomial> split_by_second_to_last(std::size_t n) const;

 private:
  BlockCatalog catalog_;
  SequenceTable table_;
  std::vector<Polynomial> tails_;        // Q_r
  std::vector<Polynomial> type2_tails_;  // B_r
  std::vector<Polynomial> type2_heads_;  // A_p, index p - 1
  std::vector<SummandPolynomial> polys_;
  std::vector<EnsembleStats> stats_;
};

/// Standalone P_n.
SummandPolynomial summand_polynomial(const RecurrenceSpec& spec, std::size_t n);

/// Adds x^shift * src into dst, growing dst as needed.
void add_shifted(Polynomial& dst, const Polynomial& src, std::uint64_t shift);

}  // namespace plrs
