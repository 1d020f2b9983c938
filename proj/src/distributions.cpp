#include "plrs/distributions.hpp"

#include <string>

#include "plrs/error.hpp"

namespace plrs {
namespace {

void trim(Polynomial& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

}  // namespace

void add_shifted(Polynomial& dst, const Polynomial& src, std::uint64_t shift) {
  if (src.empty()) return;
  const std::size_t need = src.size() + static_cast<std::size_t>(shift);
  if (dst.size() < need) dst.resize(need);
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (src[k] != 0) dst[k + shift] += src[k];
  }
}

mpz_class SummandPolynomial::total() const {
  mpz_class sum = 0;
  for (const auto& c : coeffs) sum += c;
  return sum;
}

PowerSums power_sums(std::span<const mpz_class> coeffs) {
  PowerSums p{0, 0, 0, 0, 0};
  mpz_class term;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0) continue;
    term = coeffs[k];
    p.count += term;
    term *= k;
    p.s1 += term;
    term *= k;
    p.s2 += term;
    term *= k;
    p.s3 += term;
    term *= k;
    p.s4 += term;
  }
  return p;
}

EnsembleStats stats_from_polynomial(const SummandPolynomial& poly) {
  const PowerSums p = power_sums(poly.coeffs);
  if (p.count == 0) {
    throw Error(Errc::empty_distribution, "P_" + std::to_string(poly.n) + " is zero");
  }
  EnsembleStats s;
  s.n = poly.n;
  s.cardinality = p.count;
  // The two-argument constructor leaves the fraction unreduced.
  mpq_class e1(p.s1, p.count), e2(p.s2, p.count), e3(p.s3, p.count), e4(p.s4, p.count);
  e1.canonicalize();
  e2.canonicalize();
  e3.canonicalize();
  e4.canonicalize();

  const mpq_class mu2 = e1 * e1;
  s.mean = e1;
  s.variance = e2 - mu2;
  s.central3 = e3 - 3 * e1 * e2 + 2 * mu2 * e1;
  s.central4 = e4 - 4 * e1 * e3 + 6 * mu2 * e2 - 3 * mu2 * mu2;
  return s;
}

// ---------------------------------------------------------------------------

SummandDistributions::SummandDistributions(const RecurrenceSpec& spec, std::size_t n_max)
    : catalog_(spec), table_(spec, 2) {
  tails_.push_back(Polynomial{1});
  type2_tails_.push_back(Polynomial{1});
  extend_to(n_max);
}

void SummandDistributions::extend_to(std::size_t n_max) {
  const auto lengths = catalog_.length_table();
  const std::uint64_t size = spec().size();
  table_.extend_to(n_max + 1);

  for (std::size_t r = tails_.size(); r <= n_max; ++r) {
    Polynomial q, b;
    for (std::uint64_t t = 0; t < size && lengths[t] <= r; ++t) {
      add_shifted(q, tails_[r - lengths[t]], t);
      add_shifted(b, type2_tails_[r - lengths[t]], t);
    }
    if (const Block* last = catalog_.type1_of_length(r)) {
      if (q.size() <= last->size) q.resize(last->size + 1);
      q[last->size] += 1;
    }
    trim(q);
    trim(b);
    tails_.push_back(std::move(q));
    type2_tails_.push_back(std::move(b));
  }

  for (std::size_t n = polys_.size() + 1; n <= n_max; ++n) {
    Polynomial p, a;
    for (std::uint64_t t = 1; t < size && lengths[t] <= n; ++t) {
      add_shifted(p, tails_[n - lengths[t]], t);
      add_shifted(a, type2_tails_[n - lengths[t]], t);
    }
    if (const Block* only = catalog_.type1_of_length(n)) {
      if (p.size() <= only->size) p.resize(only->size + 1);
      p[only->size] += 1;
    }
    trim(p);
    trim(a);
    type2_heads_.push_back(std::move(a));
    polys_.push_back(SummandPolynomial{n, std::move(p)});
    stats_.push_back(stats_from_polynomial(polys_.back()));
  }
}

const SummandPolynomial& SummandDistributions::polynomial(std::size_t n) const {
  if (n == 0 || n > polys_.size()) {
    throw Error(Errc::invalid_argument, "P_" + std::to_string(n) + " not built (n_max = " +
                                            std::to_string(polys_.size()) + ")");
  }
  return polys_[n - 1];
}

const EnsembleStats& SummandDistributions::stats(std::size_t n) const {
  polynomial(n);
  return stats_[n - 1];
}

const Polynomial& SummandDistributions::tail(std::size_t r) const {
  if (r >= tails_.size()) {
    throw Error(Errc::invalid_argument, "Q_" + std::to_string(r) + " not built");
  }
  return tails_[r];
}

std::vector<Polynomial> SummandDistributions::split_by_second_to_last(std::size_t n) const {
  polynomial(n);
  const auto lengths = catalog_.length_table();
  const std::uint64_t size = spec().size();

  // Final blocks: every Type 2 block and every Type 1 block.
  struct Final {
    std::size_t length;
    std::uint64_t size;
  };
  std::vector<Final> finals;
  for (std::uint64_t u = 0; u < size; ++u) finals.push_back({lengths[u], u});
  for (const Block& b : catalog_.type1_blocks()) finals.push_back({b.length(), b.size});

  std::vector<Polynomial> split(size);
  for (std::uint64_t t = 0; t < size; ++t) {
    if (lengths[t] >= n) continue;
    const std::size_t before_final = n - lengths[t];
    Polynomial acc;
    for (const Final& f : finals) {
      if (f.length > before_final) continue;
      const std::size_t prefix = before_final - f.length;
      if (prefix == 0) {
        // Block t opens the string, so it carries the positive leading coefficient.
        if (t == 0) continue;
        add_shifted(acc, Polynomial{1}, f.size);
      } else {
        add_shifted(acc, type2_heads_[prefix - 1], f.size);
      }
    }
    Polynomial shifted;
    add_shifted(shifted, acc, t);
    trim(shifted);
    split[t] = std::move(shifted);
  }
  return split;
}

SummandPolynomial summand_polynomial(const RecurrenceSpec& spec, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  return SummandDistributions(spec, n).polynomial(n);
}

}  // namespace plrs
