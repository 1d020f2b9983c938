#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace plrs {

enum class Errc {
  empty_coefficients,
  leading_coefficient_zero,
  trailing_coefficient_zero,
  negative_coefficient,
  invalid_argument,
  size_out_of_range,
  non_positive_input,
  spec_mismatch,
  illegal_decomposition,
  too_few_blocks,
  cap_exceeded,
  empty_distribution,
  index_too_small,
  empty_conditional_event,
  window_too_small,
  missing_f_value,
  no_threshold_in_range,
  non_positive_c,
  bound_violated,
  degenerate_variance,
};

/// Stable CamelCase name of an error code, e.g. "LeadingCoefficientZero".
std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised when Var[K_n] >= c*n fails; carries the offending index.
class BoundViolated : public Error {
 public:
  BoundViolated(std::size_t n, const std::string& message)
      : Error(Errc::bound_violated, message), n_(n) {}

  std::size_t n() const noexcept { return n_; }

 private:
  std::size_t n_;
};

}  // namespace plrs
