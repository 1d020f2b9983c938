#include "plrs/error.hpp"

namespace plrs {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::empty_coefficients: return "EmptyCoefficients";
    case Errc::leading_coefficient_zero: return "LeadingCoefficientZero";
    case Errc::trailing_coefficient_zero: return "TrailingCoefficientZero";
    case Errc::negative_coefficient: return "NegativeCoefficient";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::size_out_of_range: return "SizeOutOfRange";
    case Errc::non_positive_input: return "NonPositiveInput";
    case Errc::spec_mismatch: return "SpecMismatch";
    case Errc::illegal_decomposition: return "IllegalDecomposition";
    case Errc::too_few_blocks: return "TooFewBlocks";
    case Errc::cap_exceeded: return "CapExceeded";
    case Errc::empty_distribution: return "EmptyDistribution";
    case Errc::index_too_small: return "IndexTooSmall";
    case Errc::empty_conditional_event: return "EmptyConditionalEvent";
    case Errc::window_too_small: return "WindowTooSmall";
    case Errc::missing_f_value: return "MissingFValue";
    case Errc::no_threshold_in_range: return "NoThresholdInRange";
    case Errc::non_positive_c: return "NonPositiveC";
    case Errc::bound_violated: return "BoundViolated";
    case Errc::degenerate_variance: return "DegenerateVariance";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace plrs
