#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "plrs/ensemble.hpp"
#include "plrs/verifier.hpp"

namespace plrs::cli {

enum class Format { table, csv, json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Everything a run depends on. Loaded from --config, then overridden by flags.
struct RunConfig {
  std::string coefficients = "1,1";
  std::string subcommand;
  std::size_t n = 0;
  std::size_t n_max = kDefaultNMax;
  std::string argument;  ///< M for decompose, the coefficient string for validate
  std::vector<std::size_t> n_list{50, 100, 200, 400};
  Format format = Format::table;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  std::uint64_t cap = kDefaultEnumerationCap;
  unsigned precision_bits = kDefaultPrecisionBits;
  unsigned threads = 0;
  std::string output;
};

/// Fields present in `j` replace those of `base`. Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// `args` excludes the program name. Returns the process exit code.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace plrs::cli
