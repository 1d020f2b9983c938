#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "plrs/recurrence.hpp"

namespace plrs {

/// Whether the first coefficient of a string must be positive. Remainders in
/// the Condition 2 recursion may start with size-0 blocks; whole
/// decompositions may not.
enum class Leading { positive, any };

struct Legality {
  bool legal = true;
  std::size_t position = 0;  ///< 1-based index of the first offending coefficient
  std::string reason;

  explicit operator bool() const noexcept { return legal; }
};

/// Condition 1 / Condition 2 check, applied left to right.
Legality is_legal(const RecurrenceSpec& spec, std::span<const Coeff> coefficients,
                  Leading leading = Leading::positive);

/// a_1 .. a_m, a_1 multiplying H_m and a_m multiplying H_1.
///
/// Always holds a legal string. Strings produced by block insertion in front
/// of a single-block decomposition may start with a zero ([0][1]); those are
/// legal remainders rather than elements of some Omega_m, which canonical()
/// distinguishes.
class Decomposition {
 public:
  /// Throws IllegalDecomposition if the string is not legal with Leading::any,
  /// or is empty.
  Decomposition(RecurrenceSpec spec, std::vector<Coeff> coefficients);

  const RecurrenceSpec& spec() const noexcept { return spec_; }
  std::span<const Coeff> coefficients() const noexcept { return coeffs_; }
  std::size_t length() const noexcept { return coeffs_.size(); }

  /// a_1 >= 1.
  bool canonical() const noexcept { return coeffs_.front() != 0; }

  bool operator==(const Decomposition&) const = default;

 private:
  RecurrenceSpec spec_;
  std::vector<Coeff> coeffs_;
};

/// Greedy: repeatedly take the largest H_j not exceeding the remainder.
/// Extends a private copy of the table if m is beyond its cached range.
Decomposition decompose(const SequenceTable& table, const mpz_class& m);

/// Sum of a_i H_{m+1-i}; throws SpecMismatch.
mpz_class value(const SequenceTable& table, const Decomposition& d);

/// Number of summands a_1 + ... + a_m.
std::uint64_t summand_count(const Decomposition& d) noexcept;
std::uint64_t summand_count(std::span<const Coeff> coefficients) noexcept;

/// Indices j (with multiplicity, descending) such that the value is the sum of H_j.
std::vector<std::size_t> summand_indices(const Decomposition& d);

struct BlockParse {
  std::vector<Block> blocks;

  std::vector<Coeff> concatenated() const;
  /// "[1 0][1 0][1]".
  std::string to_string() const;
};

/// Left to right split at the Condition 2 points. Throws IllegalDecomposition.
BlockParse parse_blocks(const RecurrenceSpec& spec, std::span<const Coeff> coefficients);
BlockParse parse_blocks(const RecurrenceSpec& spec, const Decomposition& d);

struct BlockRemoval {
  Decomposition result;
  std::uint64_t removed_size;
};

/// h_t: drop the second-to-last block (always Type 2) and shift the blocks in
/// front of it down by l(t). Throws TooFewBlocks for a single-block string.
BlockRemoval remove_second_to_last_block(const RecurrenceSpec& spec, const Decomposition& d);

/// Inverse of removal: place the size-t Type 2 block in front of the last
/// block. Throws SizeOutOfRange.
Decomposition insert_block_before_last(const RecurrenceSpec& spec, const Decomposition& d,
                                       std::uint64_t t);

/// Space separated, most significant first: "1 0 1 0 1".
std::string format_coefficients(std::span<const Coeff> coefficients);

/// Inverse of format_coefficients; also accepts commas and bracket groups.
std::vector<Coeff> parse_coefficients(std::string_view text);

}  // namespace plrs
