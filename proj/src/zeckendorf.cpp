#include "plrs/zeckendorf.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <optional>

#include "plrs/error.hpp"

namespace plrs {
namespace {

struct BlockScan {
  std::size_t length = 0;
  BlockKind kind = BlockKind::type2;
  bool ok = true;
  std::size_t fail_offset = 0;  // offset inside the block, 0-based
  std::string reason;
};

// Reads the block starting at `pos`. The first coefficient that differs from
// c_j decides: smaller ends a Type 2 block, larger is illegal. Matching the
// whole remainder with fewer than L entries is a Type 1 block.
BlockScan scan_block(std::span<const Coeff> c, std::span<const Coeff> a, std::size_t pos) {
  const std::size_t remaining = a.size() - pos;
  const std::size_t limit = std::min(remaining, c.size());
  for (std::size_t j = 0; j < limit; ++j) {
    const Coeff x = a[pos + j];
    if (x < c[j]) return {j + 1, BlockKind::type2, true, 0, {}};
    if (x > c[j]) {
      return {0, BlockKind::type2, false, j,
              "a = " + std::to_string(x) + " exceeds c_" + std::to_string(j + 1) + " = " +
                  std::to_string(c[j])};
    }
  }
  if (remaining < c.size()) return {remaining, BlockKind::type1, true, 0, {}};
  return {0, BlockKind::type2, false, c.size() - 1,
          "coefficients c_1..c_L appear in full, so the recurrence could reduce them"};
}

struct BlockSpan {
  std::size_t length;
  BlockKind kind;
};

std::vector<BlockSpan> split_or_throw(const RecurrenceSpec& spec, std::span<const Coeff> a) {
  std::vector<BlockSpan> spans;
  std::size_t pos = 0;
  while (pos < a.size()) {
    BlockScan scan = scan_block(spec.coefficients(), a, pos);
    if (!scan.ok) {
      throw Error(Errc::illegal_decomposition,
                  "position " + std::to_string(pos + scan.fail_offset + 1) + ": " + scan.reason);
    }
    spans.push_back({scan.length, scan.kind});
    pos += scan.length;
  }
  return spans;
}

}  // namespace

Legality is_legal(const RecurrenceSpec& spec, std::span<const Coeff> a, Leading leading) {
  if (leading == Leading::positive) {
    if (a.empty()) return {false, 0, "empty decomposition"};
    if (a.front() == 0) return {false, 1, "leading coefficient a_1 must be positive"};
  }
  std::size_t pos = 0;
  while (pos < a.size()) {
    BlockScan scan = scan_block(spec.coefficients(), a, pos);
    if (!scan.ok) return {false, pos + scan.fail_offset + 1, std::move(scan.reason)};
    pos += scan.length;
  }
  return {};
}

Decomposition::Decomposition(RecurrenceSpec spec, std::vector<Coeff> coefficients)
    : spec_(std::move(spec)), coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw Error(Errc::illegal_decomposition, "empty coefficient string");
  Legality check = is_legal(spec_, coeffs_, Leading::any);
  if (!check) {
    throw Error(Errc::illegal_decomposition,
                "position " + std::to_string(check.position) + ": " + check.reason);
  }
}

Decomposition decompose(const SequenceTable& table, const mpz_class& m) {
  if (m <= 0) throw Error(Errc::non_positive_input, "cannot decompose " + m.get_str());

  std::optional<SequenceTable> extended;
  if (table.terms().back() <= m) {
    extended = table;
    extended->extend_past(m);
  }
  const SequenceTable* terms = extended ? &*extended : &table;

  // Largest n with H_n <= m; the table is strictly increasing.
  const auto all = terms->terms();
  const auto above = std::upper_bound(all.begin(), all.end(), m);
  const std::size_t n = static_cast<std::size_t>(above - all.begin());

  std::vector<Coeff> digits(n, 0);
  mpz_class rest = m;
  mpz_class q;
  for (std::size_t j = n; j >= 1; --j) {
    const mpz_class& h = terms->term(j);
    if (rest >= h) {
      mpz_fdiv_qr(q.get_mpz_t(), rest.get_mpz_t(), rest.get_mpz_t(), h.get_mpz_t());
      digits[n - j] = static_cast<Coeff>(q.get_ui());
    }
  }
  return Decomposition(table.spec(), std::move(digits));
}

mpz_class value(const SequenceTable& table, const Decomposition& d) {
  if (!(d.spec() == table.spec())) {
    throw Error(Errc::spec_mismatch, "decomposition over (" + d.spec().to_string() +
                                         ") evaluated with table for (" +
                                         table.spec().to_string() + ")");
  }
  const std::size_t m = d.length();
  std::optional<SequenceTable> extended;
  if (table.count() < m) extended = table.extended_to(m);
  const SequenceTable* terms = extended ? &*extended : &table;
  mpz_class total = 0;
  const auto a = d.coefficients();
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i] != 0) total += terms->term(m - i) * a[i];
  }
  return total;
}

std::uint64_t summand_count(std::span<const Coeff> coefficients) noexcept {
  return std::accumulate(coefficients.begin(), coefficients.end(), std::uint64_t{0});
}

std::uint64_t summand_count(const Decomposition& d) noexcept {
  return summand_count(d.coefficients());
}

std::vector<std::size_t> summand_indices(const Decomposition& d) {
  std::vector<std::size_t> out;
  const auto a = d.coefficients();
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.insert(out.end(), a[i], a.size() - i);
  }
  return out;
}

std::vector<Coeff> BlockParse::concatenated() const {
  std::vector<Coeff> out;
  for (const Block& b : blocks) out.insert(out.end(), b.coefficients.begin(), b.coefficients.end());
  return out;
}

std::string BlockParse::to_string() const {
  std::string out;
  for (const Block& b : blocks) out += b.to_string();
  return out;
}

BlockParse parse_blocks(const RecurrenceSpec& spec, std::span<const Coeff> a) {
  const auto spans = split_or_throw(spec, a);
  BlockParse parse;
  parse.blocks.reserve(spans.size());
  std::size_t pos = 0;
  for (const BlockSpan& span : spans) {
    Block b;
    b.kind = span.kind;
    b.coefficients.assign(a.begin() + static_cast<std::ptrdiff_t>(pos),
                          a.begin() + static_cast<std::ptrdiff_t>(pos + span.length));
    b.size = summand_count(b.coefficients);
    parse.blocks.push_back(std::move(b));
    pos += span.length;
  }
  return parse;
}

BlockParse parse_blocks(const RecurrenceSpec& spec, const Decomposition& d) {
  return parse_blocks(spec, d.coefficients());
}

BlockRemoval remove_second_to_last_block(const RecurrenceSpec& spec, const Decomposition& d) {
  const auto spans = split_or_throw(spec, d.coefficients());
  if (spans.size() < 2) {
    throw Error(Errc::too_few_blocks, "need at least two blocks, found " +
                                          std::to_string(spans.size()));
  }
  const auto a = d.coefficients();
  const std::size_t last_len = spans.back().length;
  const std::size_t removed_len = spans[spans.size() - 2].length;
  const std::size_t start = a.size() - last_len - removed_len;

  std::vector<Coeff> out(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(start));
  const auto removed = a.subspan(start, removed_len);
  out.insert(out.end(), a.end() - static_cast<std::ptrdiff_t>(last_len), a.end());
  return {Decomposition(spec, std::move(out)), summand_count(removed)};
}

Decomposition insert_block_before_last(const RecurrenceSpec& spec, const Decomposition& d,
                                       std::uint64_t t) {
  if (t >= spec.size()) {
    throw Error(Errc::size_out_of_range, "block size " + std::to_string(t) + " outside [0, " +
                                             std::to_string(spec.size()) + ")");
  }
  const auto spans = split_or_throw(spec, d.coefficients());
  const BlockCatalog catalog(spec);
  const Block& block = catalog.type2(t);
  const auto a = d.coefficients();
  const std::size_t split = a.size() - spans.back().length;

  std::vector<Coeff> out(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(split));
  out.insert(out.end(), block.coefficients.begin(), block.coefficients.end());
  out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(split), a.end());
  return Decomposition(spec, std::move(out));
}

std::string format_coefficients(std::span<const Coeff> coefficients) {
  std::string out;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (i != 0) out += ' ';
    out += std::to_string(coefficients[i]);
  }
  return out;
}

std::vector<Coeff> parse_coefficients(std::string_view text) {
  std::vector<Coeff> out;
  std::size_t i = 0;
  auto is_sep = [](char ch) {
    return ch == ' ' || ch == '\t' || ch == ',' || ch == '[' || ch == ']' || ch == '\n';
  };
  while (i < text.size()) {
    if (is_sep(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_sep(text[j])) ++j;
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(text.data() + i, text.data() + j, v);
    if (ec != std::errc{} || end != text.data() + j || v > std::numeric_limits<Coeff>::max()) {
      throw Error(Errc::invalid_argument,
                  "not a non-negative coefficient: \"" + std::string(text.substr(i, j - i)) + "\"");
    }
    out.push_back(static_cast<Coeff>(v));
    i = j;
  }
  return out;
}

}  // namespace plrs
