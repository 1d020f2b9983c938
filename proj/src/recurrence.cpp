#include "plrs/recurrence.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "plrs/error.hpp"

namespace plrs {

RecurrenceSpec::RecurrenceSpec(std::vector<Coeff> coeffs)
    : coeffs_(std::move(coeffs)),
      size_(std::accumulate(coeffs_.begin(), coeffs_.end(), std::uint64_t{0})) {}

std::string RecurrenceSpec::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i != 0) out += ',';
    out += std::to_string(coeffs_[i]);
  }
  return out;
}

RecurrenceSpec validate_spec(std::span<const std::int64_t> coefficients) {
  if (coefficients.empty()) {
    throw Error(Errc::empty_coefficients, "a recurrence needs at least one coefficient");
  }
  std::vector<Coeff> coeffs;
  coeffs.reserve(coefficients.size());
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const std::int64_t c = coefficients[i];
    if (c < 0) {
      throw Error(Errc::negative_coefficient,
                  "c_" + std::to_string(i + 1) + " = " + std::to_string(c));
    }
    if (c > std::numeric_limits<Coeff>::max()) {
      throw Error(Errc::invalid_argument, "c_" + std::to_string(i + 1) + " is too large");
    }
    coeffs.push_back(static_cast<Coeff>(c));
  }
  if (coeffs.front() == 0) {
    throw Error(Errc::leading_coefficient_zero, "c_1 must be positive");
  }
  if (coeffs.back() == 0) {
    throw Error(Errc::trailing_coefficient_zero,
                "c_" + std::to_string(coeffs.size()) + " must be positive");
  }
  return RecurrenceSpec(std::move(coeffs));
}

RecurrenceSpec validate_spec(std::initializer_list<std::int64_t> coefficients) {
  return validate_spec(std::span<const std::int64_t>(coefficients.begin(), coefficients.size()));
}

RecurrenceSpec parse_spec(std::string_view text) {
  std::vector<std::int64_t> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.remove_prefix(1);
    while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.remove_suffix(1);
    if (item.empty()) {
      if (text.find_first_not_of(" \t") == std::string_view::npos) break;
      throw Error(Errc::invalid_argument, "empty entry in coefficient list \"" +
                                              std::string(text) + "\"");
    }
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || end != item.data() + item.size()) {
      throw Error(Errc::invalid_argument, "not an integer: \"" + std::string(item) + "\"");
    }
    values.push_back(v);
    pos = comma + 1;
  }
  return validate_spec(values);
}

// ---------------------------------------------------------------------------

SequenceTable::SequenceTable(RecurrenceSpec spec, std::size_t n) : spec_(std::move(spec)) {
  terms_.emplace_back(1);
  extend_to(n);
}

const mpz_class& SequenceTable::term(std::size_t i) const {
  if (i == 0 || i > terms_.size()) {
    throw Error(Errc::invalid_argument, "H_" + std::to_string(i) + " is not cached (have " +
                                            std::to_string(terms_.size()) + " terms)");
  }
  return terms_[i - 1];
}

mpz_class SequenceTable::omega_size(std::size_t n) const { return term(n + 1) - term(n); }

void SequenceTable::extend_to(std::size_t n) {
  const std::size_t len = spec_.length();
  const auto c = spec_.coefficients();
  terms_.reserve(n);
  while (terms_.size() < n) {
    // Next index is k + 1 where k = current count.
    const std::size_t k = terms_.size();
    mpz_class next = 0;
    const std::size_t span = k < len ? k : len;
    for (std::size_t i = 0; i < span; ++i) {
      if (c[i] != 0) next += terms_[k - 1 - i] * c[i];
    }
    if (k < len) next += 1;
    terms_.push_back(std::move(next));
  }
}

SequenceTable SequenceTable::extended_to(std::size_t n) const {
  SequenceTable copy = *this;
  copy.extend_to(n);
  return copy;
}

void SequenceTable::extend_past(const mpz_class& m) {
  while (terms_.back() <= m) extend_to(terms_.size() + 1);
}

SequenceTable sequence_terms(const RecurrenceSpec& spec, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "need n >= 1 sequence terms");
  return SequenceTable(spec, n);
}

// ---------------------------------------------------------------------------

std::string Block::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (i != 0) out += ' ';
    out += std::to_string(coefficients[i]);
  }
  out += ']';
  return out;
}

BlockCatalog::BlockCatalog(const RecurrenceSpec& spec) : spec_(spec) {
  const auto c = spec.coefficients();
  const std::size_t len = spec.length();

  std::uint64_t prefix_sum = 0;
  for (std::size_t m = 1; m < len; ++m) {
    prefix_sum += c[m - 1];
    Block b;
    b.kind = BlockKind::type1;
    b.coefficients.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(m));
    b.size = prefix_sum;
    type1_.push_back(std::move(b));
  }

  // The block of size t ends at the unique s with P_{s-1} <= t < P_s, where
  // P_s = c_1 + ... + c_s. Indices with c_s = 0 give an empty range.
  const std::uint64_t total = spec.size();
  type2_.reserve(total);
  lengths_.reserve(total);
  std::size_t s = 1;
  std::uint64_t before = 0;  // P_{s-1}
  for (std::uint64_t t = 0; t < total; ++t) {
    while (t >= before + c[s - 1]) {
      before += c[s - 1];
      ++s;
    }
    Block b;
    b.kind = BlockKind::type2;
    b.coefficients.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(s - 1));
    b.coefficients.push_back(static_cast<Coeff>(t - before));
    b.size = t;
    type2_.push_back(std::move(b));
    lengths_.push_back(s);
  }
}

const Block& BlockCatalog::type2(std::uint64_t size) const {
  if (size >= type2_.size()) {
    throw Error(Errc::size_out_of_range, "block size " + std::to_string(size) +
                                             " outside [0, " + std::to_string(type2_.size()) +
                                             ")");
  }
  return type2_[size];
}

const Block* BlockCatalog::type1_of_length(std::size_t m) const noexcept {
  if (m == 0 || m > type1_.size()) return nullptr;
  return &type1_[m - 1];
}

BlockCatalog block_catalog(const RecurrenceSpec& spec) { return BlockCatalog(spec); }

std::size_t block_length(const BlockCatalog& catalog, std::uint64_t t) {
  return catalog.type2(t).length();
}

}  // namespace plrs
