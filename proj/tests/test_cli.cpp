#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = plrs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  const char* dir = std::getenv("TMPDIR");
  return std::string(dir ? dir : "/tmp") + "/plrs_cli_test_" + name;
}

}  // namespace

TEST_CASE("decompose prints indices, blocks and summand count") {
  const Result fib = run({"--coeffs", "1,1", "decompose", "12"});
  CHECK(fib.code == 0);
  CHECK(fib.out == "F-indices: 5,3,1; blocks [1 0][1 0][1]; K=3\n");

  const Result ex2 = run({"--coeffs", "2,2,0,2", "decompose", "601"});
  CHECK(ex2.out == "H-indices: 7,4,4,1; blocks [1][0][0][2 0][0][1]; K=4\n");
}

TEST_CASE("blocks lists the catalog") {
  const Result r = run({"--coeffs", "2,2,0,2", "blocks"});
  CHECK(r.code == 0);
  for (const char* b : {"[0]", "[1]", "[2 0]", "[2 1]", "[2 2 0 0]", "[2 2 0 1]", "[2]", "[2 2]",
                        "[2 2 0]"}) {
    CHECK(r.out.find(b) != std::string::npos);
  }
  const Result csv = run({"--coeffs", "1,1", "blocks", "--format", "csv"});
  CHECK(csv.out == "kind,size,length,block\ntype2,0,1,[0]\ntype2,1,2,[1 0]\ntype1,1,1,[1]\n");
}

TEST_CASE("verify reports success") {
  const Result r = run({"--coeffs", "1,1", "verify", "--n-max", "100"});
  CHECK(r.code == 0);
  CHECK(r.out.find("all variance bounds hold") != std::string::npos);

  const Result csv = run({"--coeffs", "1,1", "--format", "csv", "verify", "--n-max", "50"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("n,mean,variance,c*n,margin,pass\n", 0) == 0);
  CHECK(csv.out.find("all variance") == std::string::npos);
  CHECK(csv.err.find("all variance bounds hold") != std::string::npos);
}

TEST_CASE("golden csv and json") {
  CHECK(run({"--coeffs", "1,1", "poly", "4", "--format", "csv"}).out == "k,count\n0,0\n1,1\n2,2\n");
  CHECK(run({"--coeffs", "1,1", "zdist", "5", "--format", "csv"}).out ==
        "t,length,probability,empirical\n0,1,3/5,3/5\n1,2,2/5,2/5\n");
  CHECK(run({"--coeffs", "1,1", "enumerate", "4", "--format", "csv"}).out ==
        "value,coefficients,blocks,K\n5,1 0 0 0,[1 0][0][0],1\n6,1 0 0 1,[1 0][0][1],2\n"
        "7,1 0 1 0,[1 0][1 0],2\n");
  CHECK(run({"--coeffs", "2,2,0,2", "seq", "7", "--format", "json"}).out ==
        "{\n  \"spec\": \"2,2,0,2\",\n  \"terms\": [\n    \"1\",\n    \"3\",\n    \"9\",\n"
        "    \"25\",\n    \"70\",\n    \"196\",\n    \"550\"\n  ]\n}\n");
  CHECK(run({"--coeffs", "1,1", "stats", "4", "--format", "csv"}).out ==
        "n,cardinality,mean,variance,central3,central4\n4,3,5/3,2/9,-2/27,2/27\n");
}

TEST_CASE("table output for the small commands") {
  CHECK(run({"--coeffs", "1,1", "poly", "4"}).out == "P_4(x) = x + 2x^2\nP_4(1) = |Omega_4| = 3\n");
  const Result seq = run({"seq", "6"});
  CHECK(seq.out.find("\n6  13\n") != std::string::npos);
  const Result ids = run({"--coeffs", "2,2,0,2", "identities", "12"});
  CHECK(ids.code == 0);
  CHECK(ids.out.find("Total expectation:    holds") != std::string::npos);
  CHECK(ids.out.find("Enumeration cross-check: holds") != std::string::npos);
  const Result gauss = run({"--coeffs", "1,1", "gauss"});
  CHECK(gauss.code == 0);
  CHECK(gauss.out.find("both magnitudes smaller at the largest n: yes") != std::string::npos);
}

TEST_CASE("validate") {
  const Result ok = run({"validate", "1 0 1"});
  CHECK(ok.code == 0);
  CHECK(ok.out == "legal: value 4; blocks [1 0][1]; K=2\n");
  const Result bad = run({"validate", "1 1"});
  CHECK(bad.code == 1);
  CHECK(bad.out.rfind("illegal at position", 0) == 0);
  CHECK(run({"validate", "1 x"}).code == 2);
}

TEST_CASE("sample is deterministic for a fixed seed") {
  const std::vector<std::string> args{"--coeffs", "2,2,0,2", "--format", "csv", "sample", "40",
                                      "--samples", "200", "--seed", "17"};
  const Result a = run(args);
  const Result b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 201);
  auto json_args = args;
  json_args[3] = "json";
  CHECK(run(json_args).out == run(json_args).out);
  auto other = args;
  other.back() = "18";
  CHECK(run(other).out != a.out);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--coeffs", "0,1", "seq", "3"}).code == 2);
  CHECK(run({"--coeffs", "1,1,0", "seq", "3"}).code == 2);
  CHECK(run({"poly"}).code == 2);
  CHECK(run({"poly", "0"}).code == 2);
  CHECK(run({"--format", "xml", "poly", "3"}).code == 2);
  CHECK(run({"decompose", "abc"}).code == 2);
  CHECK(run({"decompose", "0"}).code == 2);
  CHECK(run({"zdist", "4"}).code == 2);
  CHECK(run({"verify", "--n-max", "10"}).code == 2);
  const Result help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("verify") != std::string::npos);
}

TEST_CASE("enumeration cap from flag and environment") {
  CHECK(run({"--coeffs", "2,2,0,2", "--cap", "100", "enumerate", "6"}).code == 2);
  setenv("PLRS_ENUM_CAP", "100", 1);
  CHECK(run({"--coeffs", "2,2,0,2", "enumerate", "6"}).code == 2);
  CHECK(run({"--coeffs", "2,2,0,2", "--cap", "100000", "enumerate", "6"}).code == 0);
  setenv("PLRS_ENUM_CAP", "bogus", 1);
  CHECK(run({"seq", "3"}).code == 2);
  unsetenv("PLRS_ENUM_CAP");
}

TEST_CASE("config file and output file") {
  const std::string config = temp_path("config.json");
  const std::string output = temp_path("out.csv");
  {
    std::ofstream f(config);
    f << R"({"coefficients": [1, 1], "subcommand": "poly", "n": 4, "format": "csv"})";
  }
  const Result from_config = run({"--config", config});
  CHECK(from_config.code == 0);
  CHECK(from_config.out == "k,count\n0,0\n1,1\n2,2\n");

  // Flags override the file.
  const Result overridden = run({"--config", config, "--format", "json", "poly", "3"});
  CHECK(overridden.out == "{\n  \"n\": 3,\n  \"coeffs\": [\n    \"0\",\n    \"1\",\n    \"1\"\n  ]\n}\n");

  const Result to_file = run({"--config", config, "--output", output});
  CHECK(to_file.code == 0);
  CHECK(to_file.out.empty());
  std::ifstream in(output);
  std::stringstream written;
  written << in.rdbuf();
  CHECK(written.str() == "k,count\n0,0\n1,1\n2,2\n");

  {
    std::ofstream f(config);
    f << R"({"coefficients": "1,1", "mystery": 3})";
  }
  CHECK(run({"--config", config, "seq", "3"}).code == 2);
  CHECK(run({"--config", temp_path("missing.json"), "seq", "3"}).code == 2);
  std::remove(config.c_str());
  std::remove(output.c_str());
}

TEST_CASE("config parsing") {
  const auto cfg = plrs::cli::config_from_json(
      nlohmann::json::parse(R"({"coefficients": "2,2,0,2", "n_max": 300, "seed": 9,
                                "n_list": [10, 20], "precision_bits": 256, "threads": 1})"));
  CHECK(cfg.coefficients == "2,2,0,2");
  CHECK(cfg.n_max == 300);
  CHECK(cfg.seed == 9);
  CHECK(cfg.n_list == std::vector<std::size_t>{10, 20});
  CHECK(cfg.precision_bits == 256);
  CHECK(cfg.threads == 1);
}
