#include "plrs/ensemble.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace plrs {

std::uint64_t enumeration_cap_from_env(std::uint64_t fallback) {
  const char* raw = std::getenv("PLRS_ENUM_CAP");
  if (raw == nullptr) return fallback;
  std::uint64_t v = 0;
  const char* end = raw + std::strlen(raw);
  auto [ptr, ec] = std::from_chars(raw, end, v);
  if (ec != std::errc{} || ptr != end || v == 0) {
    throw Error(Errc::invalid_argument,
                "PLRS_ENUM_CAP must be a positive integer, got \"" + std::string(raw) + "\"");
  }
  return v;
}

namespace detail {

std::vector<std::uint64_t> small_terms(const SequenceTable& table, std::size_t n,
                                       std::uint64_t cap) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  const SequenceTable full = table.count() > n ? table : table.extended_to(n + 1);
  const mpz_class omega = full.omega_size(n);
  if (omega > cap) {
    throw Error(Errc::cap_exceeded, "|Omega_" + std::to_string(n) + "| = " + omega.get_str() +
                                        " exceeds the enumeration cap " + std::to_string(cap));
  }
  if (!full.term(n + 1).fits_ulong_p()) {
    throw Error(Errc::cap_exceeded, "H_" + std::to_string(n + 1) + " does not fit in 64 bits");
  }
  std::vector<std::uint64_t> out;
  out.reserve(n + 1);
  for (std::size_t i = 1; i <= n + 1; ++i) out.push_back(full.term(i).get_ui());
  return out;
}

}  // namespace detail

namespace {

void check_cap(const SequenceTable& table, std::size_t n, std::uint64_t cap) {
  const mpz_class omega = table.omega_size(n);
  if (omega > cap) {
    throw Error(Errc::cap_exceeded, "|Omega_" + std::to_string(n) + "| = " + omega.get_str() +
                                        " exceeds the enumeration cap " + std::to_string(cap));
  }
}

}  // namespace

std::vector<Decomposition> enumerate_omega(const RecurrenceSpec& spec, std::size_t n,
                                           std::uint64_t cap) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  check_cap(SequenceTable(spec, n + 1), n, cap);
  const BlockCatalog catalog(spec);
  std::vector<Decomposition> out;
  for_each_omega(catalog, n, [&](const OmegaLeaf& leaf) {
    out.emplace_back(spec, std::vector<Coeff>(leaf.coefficients.begin(), leaf.coefficients.end()));
  });
  return out;
}

std::vector<Decomposition> enumerate_by_integer_walk(const SequenceTable& table, std::size_t n,
                                                     std::uint64_t cap) {
  std::vector<Decomposition> out;
  for_each_by_integer_walk(table, n, cap, [&](std::span<const Coeff> digits, std::uint64_t) {
    out.emplace_back(table.spec(), std::vector<Coeff>(digits.begin(), digits.end()));
  });
  return out;
}

namespace {

// Census walk. Blocks are laid down recursively until at most `reach_`
// positions remain; each of those endings is then finished from a table of
// every legal tail of that length (leading zeros allowed), so every element is
// still visited exactly once but the innermost levels are a flat loop.
class CensusWalk {
 public:
  CensusWalk(const BlockCatalog& catalog, std::size_t n, OmegaCensus& census)
      : catalog_(catalog), n_(n), census_(census) {
    // Tail tables up to a length whose table stays small.
    const SequenceTable terms(catalog.spec(), n + 1);
    std::size_t reach = 0;
    while (reach + 1 < n && terms.term(reach + 2) <= kMaxTailTable) ++reach;
    reach_ = reach;
    tails_.resize(reach_ + 1);
    std::vector<std::uint64_t> sizes;
    for (std::size_t r = 1; r <= reach_; ++r) collect_tails(r, 0, 0, sizes, tails_[r]);
    stride_ = census_.summand_histogram.size();
    joint_.assign((catalog.spec().size() + 1) * stride_, 0);
  }

  void run() {
    descend(0, 0, kNone, kNone);
    const std::uint64_t size = catalog_.spec().size();
    for (std::size_t row = 0; row <= size; ++row) {
      for (std::size_t k = 0; k < stride_; ++k) {
        const std::uint64_t c = joint_[row * stride_ + k];
        if (c == 0) continue;
        census_.count += c;
        census_.summand_histogram[k] += c;
        if (row == 0) {
          census_.single_block += c;
        } else {
          census_.z_count[row - 1] += c;
          census_.z_sum_k[row - 1] += c * k;
          census_.z_sum_k2[row - 1] += c * k * k;
        }
      }
    }
  }

 private:
  static constexpr std::uint64_t kMaxTailTable = 1 << 16;
  static constexpr std::int64_t kNone = -1;

  struct Tail {
    std::uint32_t summands;
    std::int32_t second_to_last;  // size inside the tail, or -1: the prefix's last block
  };

  void collect_tails(std::size_t r, std::size_t filled, std::uint64_t summands,
                     std::vector<std::uint64_t>& sizes, std::vector<Tail>& out) {
    const std::size_t remaining = r - filled;
    if (remaining == 0) {
      const std::int32_t z =
          sizes.size() >= 2 ? static_cast<std::int32_t>(sizes[sizes.size() - 2]) : -1;
      out.push_back({static_cast<std::uint32_t>(summands), z});
      return;
    }
    const auto lengths = catalog_.length_table();
    for (std::uint64_t t = 0; t < lengths.size() && lengths[t] <= remaining; ++t) {
      sizes.push_back(t);
      collect_tails(r, filled + lengths[t], summands + t, sizes, out);
      sizes.pop_back();
    }
    if (const Block* last = catalog_.type1_of_length(remaining)) {
      sizes.push_back(last->size);
      collect_tails(r, r, summands + last->size, sizes, out);
      sizes.pop_back();
    }
  }

  // One counter per element: joint_[(z + 1) * stride_ + k], z = -1 for single blocks.
  void record(std::uint64_t k, std::int64_t z) {
    ++joint_[static_cast<std::size_t>(z + 1) * stride_ + k];
  }

  // `last` and `before_last` are the sizes of the two most recent blocks.
  void descend(std::size_t pos, std::uint64_t summands, std::int64_t last,
               std::int64_t before_last) {
    const std::size_t remaining = n_ - pos;
    if (remaining == 0) {
      record(summands, before_last);
      return;
    }
    if (pos != 0 && remaining <= reach_) {
      for (const Tail& tail : tails_[remaining]) {
        record(summands + tail.summands, tail.second_to_last >= 0 ? tail.second_to_last : last);
      }
      return;
    }
    const auto lengths = catalog_.length_table();
    for (std::uint64_t t = pos == 0 ? 1 : 0; t < lengths.size() && lengths[t] <= remaining; ++t) {
      descend(pos + lengths[t], summands + t, static_cast<std::int64_t>(t), last);
    }
    if (const Block* block = catalog_.type1_of_length(remaining)) {
      record(summands + block->size, last);
    }
  }

  const BlockCatalog& catalog_;
  std::size_t n_;
  OmegaCensus& census_;
  std::size_t reach_ = 0;
  std::vector<std::vector<Tail>> tails_;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> joint_;
};

}  // namespace

OmegaCensus omega_census(const BlockCatalog& catalog, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  const std::uint64_t size = catalog.spec().size();
  OmegaCensus census;
  census.n = n;
  census.z_count.assign(size, 0);
  census.z_sum_k.assign(size, 0);
  census.z_sum_k2.assign(size, 0);
  // K <= n * max c_i.
  std::uint64_t max_c = 0;
  for (Coeff c : catalog.spec().coefficients()) max_c = std::max<std::uint64_t>(max_c, c);
  census.summand_histogram.assign(n * max_c + 1, 0);

  CensusWalk(catalog, n, census).run();

  while (census.summand_histogram.size() > 1 && census.summand_histogram.back() == 0) {
    census.summand_histogram.pop_back();
  }
  return census;
}

OmegaCensus omega_census_by_leaves(const BlockCatalog& catalog, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  const std::uint64_t size = catalog.spec().size();
  OmegaCensus census;
  census.n = n;
  census.z_count.assign(size, 0);
  census.z_sum_k.assign(size, 0);
  census.z_sum_k2.assign(size, 0);
  std::uint64_t max_c = 0;
  for (Coeff c : catalog.spec().coefficients()) max_c = std::max<std::uint64_t>(max_c, c);
  census.summand_histogram.assign(n * max_c + 1, 0);

  for_each_omega(catalog, n, [&](const OmegaLeaf& leaf) {
    const std::uint64_t k = leaf.summands;
    ++census.count;
    ++census.summand_histogram[k];
    const auto z = leaf.second_to_last();
    if (!z) {
      ++census.single_block;
      return;
    }
    ++census.z_count[*z];
    census.z_sum_k[*z] += k;
    census.z_sum_k2[*z] += k * k;
  });
  while (census.summand_histogram.size() > 1 && census.summand_histogram.back() == 0) {
    census.summand_histogram.pop_back();
  }
  return census;
}

bool operator==(const OmegaCensus& a, const OmegaCensus& b) {
  return a.n == b.n && a.count == b.count && a.summand_histogram == b.summand_histogram &&
         a.single_block == b.single_block && a.z_count == b.z_count && a.z_sum_k == b.z_sum_k &&
         a.z_sum_k2 == b.z_sum_k2;
}

bool ZDistribution::empirical_matches() const {
  return empirical.has_value() && *empirical == probabilities;
}

ZDistribution z_distribution(const RecurrenceSpec& spec, std::size_t n, std::uint64_t cap) {
  const std::size_t len = spec.length();
  if (n <= 2 * len) {
    throw Error(Errc::index_too_small,
                "Z_n needs n > 2L = " + std::to_string(2 * len) + ", got " + std::to_string(n));
  }
  const SequenceTable table(spec, n + 1);
  const BlockCatalog catalog(spec);
  const mpz_class omega = table.omega_size(n);

  ZDistribution z;
  z.n = n;
  z.lengths.assign(catalog.length_table().begin(), catalog.length_table().end());
  z.length_probabilities.assign(len + 1, mpq_class(0));
  for (std::uint64_t t = 0; t < spec.size(); ++t) {
    const std::size_t m = n - z.lengths[t];
    mpq_class p(table.omega_size(m), omega);
    p.canonicalize();
    z.length_probabilities[z.lengths[t]] += p;
    z.probabilities.push_back(std::move(p));
  }

  if (omega <= cap) {
    const OmegaCensus census = omega_census(catalog, n);
    std::vector<mpq_class> freq;
    for (std::uint64_t t = 0; t < spec.size(); ++t) {
      mpq_class p{mpz_class(census.z_count[t]), mpz_class(census.count)};
      p.canonicalize();
      freq.push_back(std::move(p));
    }
    z.empirical = std::move(freq);
  }
  return z;
}

ConditionalCheck conditional_check_from_census(const OmegaCensus& census,
                                               const SummandDistributions& dist, std::uint64_t t,
                                               Moment moment) {
  const std::size_t n = census.n;
  const std::size_t len = dist.spec().length();
  if (n <= 2 * len) {
    throw Error(Errc::index_too_small, "need n > 2L = " + std::to_string(2 * len));
  }
  if (t >= census.z_count.size()) {
    throw Error(Errc::size_out_of_range, "block size " + std::to_string(t));
  }
  if (census.z_count[t] == 0) {
    throw Error(Errc::empty_conditional_event,
                "no element of Omega_" + std::to_string(n) + " has Z = " + std::to_string(t));
  }
  const std::uint64_t sum = moment == Moment::first ? census.z_sum_k[t] : census.z_sum_k2[t];
  ConditionalCheck check;
  check.lhs = mpq_class(mpz_class(sum), mpz_class(census.z_count[t]));
  check.lhs.canonicalize();

  const EnsembleStats& shorter = dist.stats(n - dist.catalog().length_table()[t]);
  const mpq_class shift{mpz_class(t)};
  if (moment == Moment::first) {
    check.rhs = shorter.mean + shift;
  } else {
    check.rhs = shorter.second_moment() + 2 * shift * shorter.mean + shift * shift;
  }
  return check;
}

ConditionalCheck conditional_mean_check(const SummandDistributions& dist, std::size_t n,
                                        std::uint64_t t, Moment moment, std::uint64_t cap) {
  const std::size_t len = dist.spec().length();
  if (n <= 2 * len) {
    throw Error(Errc::index_too_small, "need n > 2L = " + std::to_string(2 * len));
  }
  if (n > dist.n_max()) {
    throw Error(Errc::invalid_argument, "distribution built only to n = " +
                                            std::to_string(dist.n_max()));
  }
  check_cap(dist.table(), n, cap);
  return conditional_check_from_census(omega_census(dist.catalog(), n), dist, t, moment);
}

UniformSampler::UniformSampler(const SequenceTable& table, std::size_t n, std::uint64_t seed)
    : table_(table.count() > n ? table : table.extended_to(n + 1)), rng_(gmp_randinit_mt) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  low_ = table_.term(n);
  width_ = table_.omega_size(n);
  rng_.seed(mpz_class(std::to_string(seed)));
}

mpz_class UniformSampler::next_value() { return low_ + rng_.get_z_range(width_); }

Decomposition UniformSampler::next() { return decompose(table_, next_value()); }

std::vector<Decomposition> sample_uniform(const SequenceTable& table, std::size_t n,
                                          std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(Errc::invalid_argument, "sample count must be positive");
  UniformSampler sampler(table, n, seed);
  std::vector<Decomposition> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace plrs
