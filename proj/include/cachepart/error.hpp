#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cachepart {

enum class Errc {
  invalid_argument,
  normalization_failure,
  invalid_cdf,
  capacity_exceeds_catalog,
  no_convergence,
  domain,
  infeasible_split,
  stalled,
  too_large,
  parse_error,
  validation_error,
  unknown_figure,
  io_error,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "INVALID_ARGUMENT";
    case Errc::normalization_failure: return "NORMALIZATION_FAILURE";
    case Errc::invalid_cdf: return "INVALID_CDF";
    case Errc::capacity_exceeds_catalog: return "CAPACITY_EXCEEDS_CATALOG";
    case Errc::no_convergence: return "NO_CONVERGENCE";
    case Errc::domain: return "DOMAIN";
    case Errc::infeasible_split: return "INFEASIBLE_SPLIT";
    case Errc::stalled: return "STALLED";
    case Errc::too_large: return "TOO_LARGE";
    case Errc::parse_error: return "PARSE_ERROR";
    case Errc::validation_error: return "VALIDATION_ERROR";
    case Errc::unknown_figure: return "UNKNOWN_FIGURE";
    case Errc::io_error: return "IO_ERROR";
  }
  return "UNKNOWN";
}

// Every failure in the library surfaces as an Error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace cachepart
