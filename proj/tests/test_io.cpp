#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "plrs/io.hpp"

using namespace plrs;

namespace {

const RecurrenceSpec kFib = validate_spec({1, 1});

bool is_rational_string(const io::Json& j) {
  if (!j.is_string()) return false;
  const std::string s = j.get<std::string>();
  const auto slash = s.find('/');
  return slash != std::string::npos && slash > 0 && slash + 1 < s.size();
}

}  // namespace

TEST_CASE("rationals are always p/q") {
  CHECK(io::rational(mpq_class(5, 3)) == "5/3");
  CHECK(io::rational(mpq_class(2)) == "2/1");
  CHECK(io::rational(mpq_class(-2, 27)) == "-2/27");
  CHECK(io::integer(mpz_class("123456789012345678901234567890")) ==
        "123456789012345678901234567890");
}

TEST_CASE("decimal forms") {
  CHECK(io::decimal(mpq_class(1, 4), 6) == "0.25");
  CHECK(io::decimal(mpq_class(-5, 2), 6) == "-2.5");
  CHECK(io::decimal(mpq_class(123456), 6) == "123456");
  CHECK(io::decimal(mpq_class(0), 6) == "0");
  CHECK(io::decimal(mpq_class(1, 1000000), 3) == "1e-06");
  CHECK(io::decimal(to_real(mpq_class(1, 3), 64)).rfind("3.33333333333333333", 0) == 0);
  CHECK(io::decimal(to_real(mpq_class(-1, 8), 64)).rfind("-1.25", 0) == 0);
  CHECK(io::decimal(to_real(mpq_class(-1, 8), 64)).find("e-01") != std::string::npos);
}

TEST_CASE("polynomial JSON and CSV") {
  const SummandPolynomial p = summand_polynomial(kFib, 4);
  CHECK(io::to_json(p).dump() == R"({"n":4,"coeffs":["0","1","2"]})");
  std::ostringstream csv;
  io::write_csv(csv, p);
  CHECK(csv.str() == "k,count\n0,0\n1,1\n2,2\n");
  CHECK(io::polynomial_string(p.coeffs) == "x + 2x^2");
  CHECK(io::polynomial_string({mpz_class(3), mpz_class(0), mpz_class(1)}) == "3 + x^2");
  CHECK(io::polynomial_string({}) == "0");
}

TEST_CASE("stats JSON") {
  const EnsembleStats s = stats_from_polynomial(summand_polynomial(kFib, 4));
  CHECK(io::to_json(s).dump() ==
        R"({"n":4,"cardinality":"3","mean":"5/3","variance":"2/9","central3":"-2/27","central4":"2/27"})");
}

TEST_CASE("CSV quoting") {
  std::ostringstream out;
  io::write_csv_row(out, {"plain", "a,b", "say \"hi\""});
  CHECK(out.str() == "plain,\"a,b\",\"say \"\"hi\"\"\"\n");
  std::ostringstream out2;
  const std::vector<std::string> fields{"x", "1,2"};
  io::write_csv_row(out2, fields);
  CHECK(out2.str() == "x,\"1,2\"\n");
}

TEST_CASE("catalog and decomposition JSON") {
  const io::Json cat = io::to_json(BlockCatalog(validate_spec({2, 2, 0, 2})));
  CHECK(cat["type2"].size() == 6);
  CHECK(cat["type1"].size() == 3);
  CHECK(cat["lengths"].dump() == "[1,1,2,2,4,4]");
  CHECK(cat["type2"][4]["coefficients"].dump() == "[2,2,0,0]");

  const SequenceTable table(kFib, 6);
  const io::Json d = io::to_json(table, decompose(table, 12));
  CHECK(d["value"] == "12");
  CHECK(d["blocks"] == "[1 0][1 0][1]");
  CHECK(d["indices"].dump() == "[5,3,1]");
  CHECK(d["summands"] == 3);
}

TEST_CASE("theorem report serialization") {
  const SummandDistributions dist(kFib, 60);
  const TheoremReport r = verify_variance_bound(dist, 60);
  const io::Json j = io::to_json(r);
  CHECK(j["spec"] == "1,1");
  CHECK(j["S"] == 2);
  CHECK(j["L"] == 2);
  CHECK(j["threshold_N"] == r.threshold_N);
  CHECK(j["all_pass"] == true);
  REQUIRE(j["per_n_verdicts"].size() == 58);
  for (const auto& v : j["per_n_verdicts"]) {
    CHECK(is_rational_string(v["mean"]));
    CHECK(is_rational_string(v["variance"]));
    CHECK(v["c_times_n"].is_string());
    CHECK(v["pass"] == true);
  }
  for (const auto& g : j["gaussian_table"]) {
    CHECK(is_rational_string(g["skewness_squared"]));
    CHECK(is_rational_string(g["excess_kurtosis"]));
  }
  CHECK(j["c"]["argmin"] == r.c.provenance());
  CHECK(j["c"]["candidates"].size() == r.c.candidates.size());

  std::ostringstream csv;
  io::write_csv(csv, r);
  const std::string text = csv.str();
  CHECK(text.rfind("n,mean,variance,c*n,margin,pass\n3,3/2,1/4,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 59);
}

TEST_CASE("growth and identity JSON") {
  const SummandDistributions dist(kFib, 40);
  const GrowthEstimate g = estimate_growth(dist, 40);
  const io::Json gj = io::to_json(g);
  CHECK(gj["window"].dump() == "[31,40]");
  CHECK(gj["f"].size() == 40);
  const io::Json ij = io::to_json(total_expectation_identity(dist, 5));
  CHECK(ij.dump() == R"({"n":5,"lhs":"2/1","rhs":"2/1","holds":true})");
}
