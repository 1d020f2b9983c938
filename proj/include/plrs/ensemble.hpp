#pragma once

/*
 * The outcome space Omega_n: legal decompositions of the integers in
 * [H_n, H_{n+1}), each weighted 1 / (H_{n+1} - H_n).
 *
 * Two independent enumerators are provided. for_each_omega walks the block
 * grammar (Type 2 blocks, optionally closed by a Type 1 block). At each step
 * the candidates are taken in increasing block size with the Type 1 block
 * last, which is also increasing numeric order, so both enumerators emit
 * Omega_n sorted by value. for_each_by_integer_walk applies the greedy digit
 * rule to every integer of the interval, sharing work between integers with a
 * common leading digit string.
 */

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "plrs/distributions.hpp"
#include "plrs/error.hpp"
#include "plrs/recurrence.hpp"
#include "plrs/zeckendorf.hpp"

namespace plrs {

inline constexpr std::uint64_t kDefaultEnumerationCap = 50'000'000;

/// PLRS_ENUM_CAP if set to a positive integer, else `fallback`.
std::uint64_t enumeration_cap_from_env(std::uint64_t fallback = kDefaultEnumerationCap);

/// One element of Omega_n as seen by the grammar enumerator.
struct OmegaLeaf {
  std::span<const Coeff> coefficients;
  std::span<const std::uint64_t> block_sizes;
  bool ends_with_type1 = false;
  std::uint64_t summands = 0;

  /// Size of the second-to-last block, if there are at least two blocks.
  std::optional<std::uint64_t> second_to_last() const noexcept {
    if (block_sizes.size() < 2) return std::nullopt;
    return block_sizes[block_sizes.size() - 2];
  }
};

namespace detail {

template <class Visitor>
class GrammarWalk {
 public:
  GrammarWalk(const BlockCatalog& catalog, std::size_t n, Visitor& visit)
      : catalog_(catalog), n_(n), visit_(visit), coeffs_(n), sizes_() {
    sizes_.reserve(n);
  }

  void run() {
    if (n_ > 0) descend(0, 0);
  }

 private:
  void descend(std::size_t pos, std::uint64_t summands) {
    const std::size_t remaining = n_ - pos;
    if (remaining == 0) {
      visit_(OmegaLeaf{coeffs_, sizes_, false, summands});
      return;
    }
    const auto lengths = catalog_.length_table();
    const auto blocks = catalog_.type2_blocks();
    // l is non-decreasing in t, so the first block that does not fit ends the scan.
    for (std::uint64_t t = pos == 0 ? 1 : 0; t < blocks.size() && lengths[t] <= remaining; ++t) {
      place(blocks[t], pos);
      sizes_.push_back(t);
      descend(pos + lengths[t], summands + t);
      sizes_.pop_back();
    }
    if (const Block* last = catalog_.type1_of_length(remaining)) {
      place(*last, pos);
      sizes_.push_back(last->size);
      visit_(OmegaLeaf{coeffs_, sizes_, true, summands + last->size});
      sizes_.pop_back();
    }
  }

  void place(const Block& b, std::size_t pos) {
    for (std::size_t i = 0; i < b.coefficients.size(); ++i) coeffs_[pos + i] = b.coefficients[i];
  }

  const BlockCatalog& catalog_;
  std::size_t n_;
  Visitor& visit_;
  std::vector<Coeff> coeffs_;
  std::vector<std::uint64_t> sizes_;
};

template <class Visitor>
class IntegerWalk {
 public:
  IntegerWalk(std::span<const std::uint64_t> terms, std::size_t n, Visitor& visit)
      : terms_(terms), n_(n), visit_(visit), digits_(n) {}

  void run(std::uint64_t lo, std::uint64_t hi) { descend(n_, lo, hi, 0); }

 private:
  // Remainders in [lo, hi) still to be written with H_j, ..., H_1. The greedy
  // digit at H_j is floor(rest / H_j); integers sharing it form a sub-range.
  void descend(std::size_t j, std::uint64_t lo, std::uint64_t hi, std::uint64_t base) {
    const std::size_t slot = n_ - j;
    if (j == 1) {
      for (std::uint64_t d = lo; d < hi; ++d) {
        digits_[slot] = static_cast<Coeff>(d);
        visit_(std::span<const Coeff>(digits_), base + d);
      }
      return;
    }
    const std::uint64_t h = terms_[j - 1];
    const std::uint64_t first = lo / h;
    const std::uint64_t last = (hi - 1) / h;
    for (std::uint64_t d = first; d <= last; ++d) {
      const std::uint64_t start = d * h;
      const std::uint64_t sub_lo = lo > start ? lo - start : 0;
      const std::uint64_t sub_hi = hi < start + h ? hi - start : h;
      digits_[slot] = static_cast<Coeff>(d);
      descend(j - 1, sub_lo, sub_hi, base + start);
    }
  }

  std::span<const std::uint64_t> terms_;
  std::size_t n_;
  Visitor& visit_;
  std::vector<Coeff> digits_;
};

/// H_1..H_{n+1} as machine words; throws CapExceeded when |Omega_n| > cap or
/// H_{n+1} does not fit.
std::vector<std::uint64_t> small_terms(const SequenceTable& table, std::size_t n,
                                       std::uint64_t cap);

}  // namespace detail

/// Every legal string of length n with a_1 >= 1, each once, in increasing
/// value. `visit` receives an OmegaLeaf whose spans are valid only during the
/// call.
template <class Visitor>
void for_each_omega(const BlockCatalog& catalog, std::size_t n, Visitor&& visit) {
  detail::GrammarWalk<std::remove_reference_t<Visitor>> walk(catalog, n, visit);
  walk.run();
}

/// decompose(m) for every m in [H_n, H_{n+1}); `visit(coefficients, m)`.
template <class Visitor>
void for_each_by_integer_walk(const SequenceTable& table, std::size_t n, std::uint64_t cap,
                              Visitor&& visit) {
  const std::vector<std::uint64_t> terms = detail::small_terms(table, n, cap);
  detail::IntegerWalk<std::remove_reference_t<Visitor>> walk(terms, n, visit);
  walk.run(terms[n - 1], terms[n]);
}

/// Collecting forms; throw CapExceeded above `cap` elements.
std::vector<Decomposition> enumerate_omega(const RecurrenceSpec& spec, std::size_t n,
                                           std::uint64_t cap = kDefaultEnumerationCap);
std::vector<Decomposition> enumerate_by_integer_walk(const SequenceTable& table, std::size_t n,
                                                     std::uint64_t cap = kDefaultEnumerationCap);

/// One grammar pass over Omega_n collecting everything the exact checks need.
struct OmegaCensus {
  std::size_t n = 0;
  std::uint64_t count = 0;
  std::vector<std::uint64_t> summand_histogram;  ///< index K
  std::uint64_t single_block = 0;                ///< elements with one block
  std::vector<std::uint64_t> z_count;            ///< index t = second-to-last size
  std::vector<std::uint64_t> z_sum_k;
  std::vector<std::uint64_t> z_sum_k2;
};

OmegaCensus omega_census(const BlockCatalog& catalog, std::size_t n);

/// The same census through for_each_omega, one visitor call per element.
OmegaCensus omega_census_by_leaves(const BlockCatalog& catalog, std::size_t n);

bool operator==(const OmegaCensus& a, const OmegaCensus& b);

struct ZDistribution {
  std::size_t n = 0;
  std::vector<mpq_class> probabilities;  ///< P(Z_n = t), index t
  std::vector<std::size_t> lengths;      ///< l(t), index t
  std::vector<mpq_class> length_probabilities;  ///< P(L_n = l), index l (0 unused)
  std::optional<std::vector<mpq_class>> empirical;

  bool empirical_matches() const;
};

/// Closed form (H_{n-l(t)+1} - H_{n-l(t)}) / (H_{n+1} - H_n), plus enumerated
/// frequencies when |Omega_n| <= cap. Throws IndexTooSmall for n <= 2L.
ZDistribution z_distribution(const RecurrenceSpec& spec, std::size_t n,
                             std::uint64_t cap = kDefaultEnumerationCap);

enum class Moment { first, second };

struct ConditionalCheck {
  mpq_class lhs;  ///< E[K_n^j | Z_n = t] by enumeration
  mpq_class rhs;  ///< E[(K_{n-l(t)} + t)^j] from the exact distribution
  bool holds() const { return lhs == rhs; }
};

/// Throws IndexTooSmall, EmptyConditionalEvent, CapExceeded.
ConditionalCheck conditional_mean_check(const SummandDistributions& dist, std::size_t n,
                                        std::uint64_t t, Moment moment = Moment::first,
                                        std::uint64_t cap = kDefaultEnumerationCap);

/// Same comparison from an existing census.
ConditionalCheck conditional_check_from_census(const OmegaCensus& census,
                                               const SummandDistributions& dist, std::uint64_t t,
                                               Moment moment);

/// Uniform draws from Omega_n: an integer uniform on [H_n, H_{n+1}), decomposed.
class UniformSampler {
 public:
  UniformSampler(const SequenceTable& table, std::size_t n, std::uint64_t seed);

  Decomposition next();
  mpz_class next_value();

 private:
  SequenceTable table_;
  mpz_class low_;
  mpz_class width_;
  gmp_randclass rng_;
};

std::vector<Decomposition> sample_uniform(const SequenceTable& table, std::size_t n,
                                          std::size_t count, std::uint64_t seed);

}  // namespace plrs
