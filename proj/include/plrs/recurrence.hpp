#pragma once

/*
 * Positive linear recurrence sequences.
 *
 *   H_{n+1} = c_1 H_n + c_2 H_{n-1} + ... + c_L H_{n+1-L},   c_1, c_L > 0, c_i >= 0
 *
 * with the initial conditions H_1 = 1 and, for 1 <= n < L,
 *
 *   H_{n+1} = c_1 H_n + ... + c_n H_1 + 1.
 *
 * S = c_1 + ... + c_L is the size of the recurrence and L its length.
 *
 * Legal decompositions split into blocks. A Type 1 block is a proper prefix
 * (c_1 .. c_m), m < L, and may only end a decomposition. A Type 2 block is
 * (c_1 .. c_{s-1}, a_s) with a_s < c_s; its size t = c_1 + ... + c_{s-1} + a_s
 * ranges over [0, S) and determines the block, so its length is a function
 * l(t) of the size.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace plrs {

using Coeff = std::uint32_t;

class RecurrenceSpec {
 public:
  std::span<const Coeff> coefficients() const noexcept { return coeffs_; }

  /// c_i with 1-based i, 1 <= i <= L.
  Coeff coefficient(std::size_t i) const { return coeffs_.at(i - 1); }

  std::size_t length() const noexcept { return coeffs_.size(); }
  std::uint64_t size() const noexcept { return size_; }

  /// Comma separated form, "2,2,0,2".
  std::string to_string() const;

  bool operator==(const RecurrenceSpec&) const = default;

 private:
  friend RecurrenceSpec validate_spec(std::span<const std::int64_t> coefficients);

  explicit RecurrenceSpec(std::vector<Coeff> coeffs);

  std::vector<Coeff> coeffs_;
  std::uint64_t size_ = 0;
};

/// Throws Error with EmptyCoefficients, NegativeCoefficient,
/// LeadingCoefficientZero or TrailingCoefficientZero.
RecurrenceSpec validate_spec(std::span<const std::int64_t> coefficients);
RecurrenceSpec validate_spec(std::initializer_list<std::int64_t> coefficients);

/// Parses "2,2,0,2" (whitespace around entries tolerated) and validates it.
RecurrenceSpec parse_spec(std::string_view text);

/// Exact terms H_1..H_n. Extending reuses the cached prefix.
class SequenceTable {
 public:
  explicit SequenceTable(RecurrenceSpec spec, std::size_t n = 1);

  const RecurrenceSpec& spec() const noexcept { return spec_; }
  std::size_t count() const noexcept { return terms_.size(); }

  /// H_i, 1-based.
  const mpz_class& term(std::size_t i) const;
  std::span<const mpz_class> terms() const noexcept { return terms_; }

  /// |Omega_n| = H_{n+1} - H_n; needs n + 1 cached terms.
  mpz_class omega_size(std::size_t n) const;

  void extend_to(std::size_t n);
  SequenceTable extended_to(std::size_t n) const;

  /// Extends until H_count > m.
  void extend_past(const mpz_class& m);

 private:
  RecurrenceSpec spec_;
  std::vector<mpz_class> terms_;
};

SequenceTable sequence_terms(const RecurrenceSpec& spec, std::size_t n);

enum class BlockKind { type1, type2 };

struct Block {
  BlockKind kind = BlockKind::type2;
  std::vector<Coeff> coefficients;
  std::uint64_t size = 0;

  std::size_t length() const noexcept { return coefficients.size(); }

  /// Bracket form, "[2 2 0 1]".
  std::string to_string() const;

  bool operator==(const Block&) const = default;
};

class BlockCatalog {
 public:
  explicit BlockCatalog(const RecurrenceSpec& spec);

  const RecurrenceSpec& spec() const noexcept { return spec_; }

  /// Type 1 blocks ordered by length 1..L-1.
  std::span<const Block> type1_blocks() const noexcept { return type1_; }

  /// Type 2 blocks indexed by size 0..S-1.
  std::span<const Block> type2_blocks() const noexcept { return type2_; }

  const Block& type2(std::uint64_t size) const;

  /// The Type 1 block of length m, or nullptr when m == 0 or m >= L.
  const Block* type1_of_length(std::size_t m) const noexcept;

  /// l(t) for t in [0, S).
  std::span<const std::size_t> length_table() const noexcept { return lengths_; }

 private:
  RecurrenceSpec spec_;
  std::vector<Block> type1_;
  std::vector<Block> type2_;
  std::vector<std::size_t> lengths_;
};

BlockCatalog block_catalog(const RecurrenceSpec& spec);

/// l(t); throws SizeOutOfRange unless 0 <= t < S.
std::size_t block_length(const BlockCatalog& catalog, std::uint64_t t);

}  // namespace plrs
