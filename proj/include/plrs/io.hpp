#pragma once

// JSON and CSV forms of the library results. Exact rationals are always
// written as "p/q" strings (integers as "p/1"), big integers as decimal
// strings; estimated reals as fixed-width scientific strings.

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "plrs/distributions.hpp"
#include "plrs/ensemble.hpp"
#include "plrs/recurrence.hpp"
#include "plrs/verifier.hpp"
#include "plrs/zeckendorf.hpp"

namespace plrs::io {

using Json = nlohmann::ordered_json;

std::string rational(const mpq_class& q);
std::string integer(const mpz_class& z);

/// Scientific notation with as many significant digits as the precision holds.
std::string decimal(const Real& x);
/// Shorter human form for tables.
std::string decimal(const Real& x, int significant);
std::string decimal(const mpq_class& q, int significant);

Json to_json(const RecurrenceSpec& spec);
Json to_json(const Block& block);
Json to_json(const BlockCatalog& catalog);
Json to_json(const SequenceTable& table, std::size_t n);
Json to_json(const SequenceTable& table, const Decomposition& d);
Json to_json(const SummandPolynomial& poly);
Json to_json(const EnsembleStats& stats);
Json to_json(const ZDistribution& z);
Json to_json(const IdentityCheck& check);
Json to_json(const ConditionalRow& row);
Json to_json(const GaussianRow& row);
Json to_json(const GrowthEstimate& growth);
Json to_json(const TheoremReport& report);

/// One CSV record; fields containing a comma, quote or newline are quoted.
void write_csv_row(std::ostream& out, std::initializer_list<std::string_view> fields);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

/// Columns k,count.
void write_csv(std::ostream& out, const SummandPolynomial& poly);
/// Columns n,mean,variance,c*n,margin,pass.
void write_csv(std::ostream& out, const TheoremReport& report);

/// "x + 2x^2".
std::string polynomial_string(const Polynomial& p);

}  // namespace plrs::io
