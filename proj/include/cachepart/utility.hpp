#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "cachepart/error.hpp"

namespace cachepart {

// Alpha-fair utility of a hit rate, scaled by a weight.
//
// The family is U(h) = (h^(1-a) - 1) / (1 - a), with log h at a = 1. The named kinds are the
// members used most often: linear (a = 0), log (a = 1) and negative inverse (a = 2). All of
// them, including the linear kind, carry the "-1" offset of the closed form so that the
// family is continuous in alpha.
struct UtilitySpec {
  enum class Kind { alpha_fair, log, linear, neg_inverse };

  Kind kind = Kind::log;
  double alpha = 1.0;
  double weight = 1.0;

  static UtilitySpec linear(double w = 1.0) { return {Kind::linear, 0.0, w}; }
  static UtilitySpec logarithmic(double w = 1.0) { return {Kind::log, 1.0, w}; }
  static UtilitySpec neg_inverse(double w = 1.0) { return {Kind::neg_inverse, 2.0, w}; }
  static UtilitySpec alpha_fair(double a, double w = 1.0) { return {Kind::alpha_fair, a, w}; }

  double effective_alpha() const {
    switch (kind) {
      case Kind::linear: return 0.0;
      case Kind::log: return 1.0;
      case Kind::neg_inverse: return 2.0;
      case Kind::alpha_fair: return alpha;
    }
    return alpha;
  }

  void validate() const {
    require(effective_alpha() >= 0.0 && std::isfinite(effective_alpha()), Errc::invalid_argument,
            "utility alpha must be finite and >= 0");
    require(weight >= 0.0 && std::isfinite(weight), Errc::invalid_argument,
            "utility weight must be finite and >= 0");
  }

  bool operator==(const UtilitySpec&) const = default;
};

inline std::string_view to_string(UtilitySpec::Kind kind) {
  switch (kind) {
    case UtilitySpec::Kind::alpha_fair: return "alpha_fair";
    case UtilitySpec::Kind::log: return "log";
    case UtilitySpec::Kind::linear: return "linear";
    case UtilitySpec::Kind::neg_inverse: return "neg_inverse";
  }
  return "?";
}

namespace detail {

inline bool is_log_alpha(double a) { return a == 1.0; }

inline void check_domain(double a, double h) {
  require(std::isfinite(h), Errc::domain, "hit rate must be finite");
  if (a >= 1.0)
    require(h > 0.0, Errc::domain, "hit rate must be > 0 for alpha >= 1");
  else
    require(h >= 0.0, Errc::domain, "hit rate must be >= 0");
}

}  // namespace detail

inline double u_eval(const UtilitySpec& spec, double h) {
  const double a = spec.effective_alpha();
  detail::check_domain(a, h);
  if (detail::is_log_alpha(a)) return spec.weight * std::log(h);
  if (a == 0.0) return spec.weight * (h - 1.0);
  // (h^(1-a) - 1)/(1-a) written via expm1 so alpha close to 1 stays accurate.
  const double s = 1.0 - a;
  return spec.weight * std::expm1(s * std::log(h)) / s;
}

inline double u_prime(const UtilitySpec& spec, double h) {
  const double a = spec.effective_alpha();
  detail::check_domain(a, h);
  if (a == 0.0) return spec.weight;
  if (h == 0.0) return std::numeric_limits<double>::infinity();
  return spec.weight * std::pow(h, -a);
}

// Inverse of U' on (0, inf), used by the market best response. Returns +inf for linear.
inline double u_prime_inverse(const UtilitySpec& spec, double slope) {
  const double a = spec.effective_alpha();
  require(slope > 0.0, Errc::domain, "slope must be > 0");
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  if (spec.weight == 0.0) return 0.0;
  return std::pow(slope / spec.weight, -1.0 / a);
}

// U without its constant term: w h^(1-a)/(1-a), w log h or w h. Same derivatives as U. For
// large alpha, U itself is dominated by the constant and differences vanish in rounding.
inline double u_eval_unshifted(const UtilitySpec& spec, double h) {
  const double a = spec.effective_alpha();
  if (h <= 0.0 && a >= 1.0)
    return spec.weight == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  detail::check_domain(a, h);
  if (detail::is_log_alpha(a)) return spec.weight * std::log(h);
  if (a == 0.0) return spec.weight * h;
  return spec.weight * std::pow(h, 1.0 - a) / (1.0 - a);
}

// Like u_eval but maps an out-of-domain zero hit rate to -inf instead of throwing.
inline double u_eval_or_neg_inf(const UtilitySpec& spec, double h) {
  if (h <= 0.0 && spec.effective_alpha() >= 1.0)
    return spec.weight == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return u_eval(spec, h);
}

// Convex, non-decreasing penalty on excess capacity x = sum(C) - C_base; zero for x <= 0.
struct PenaltySpec {
  enum class Kind { linear, quadratic };

  Kind kind = Kind::linear;
  double slope = 0.0;      // eta = P'(0+)
  double curvature = 0.0;  // quadratic coefficient
  double base_capacity = 0.0;

  void validate() const {
    require(slope >= 0.0 && curvature >= 0.0 && base_capacity >= 0.0, Errc::invalid_argument,
            "penalty parameters must be >= 0");
  }

  double value_at_excess(double x) const {
    if (x <= 0.0) return 0.0;
    return kind == Kind::linear ? slope * x : slope * x + 0.5 * curvature * x * x;
  }

  // Right derivative, so P'(0) = eta as the online controller expects.
  double derivative_at_excess(double x) const {
    if (x < 0.0) return 0.0;
    return kind == Kind::linear ? slope : slope + curvature * x;
  }

  double value(double total_size) const { return value_at_excess(total_size - base_capacity); }
  double derivative(double total_size) const {
    return derivative_at_excess(total_size - base_capacity);
  }
};

// W = sum_k w_k U_k(h_k) - P(sum C - C_base).
inline double objective(std::span<const UtilitySpec> specs, std::span<const double> hit_rates,
                        const PenaltySpec& penalty, std::span<const double> sizes) {
  require(specs.size() == hit_rates.size(), Errc::invalid_argument,
          "one utility per hit rate required");
  double total = 0.0;
  for (double c : sizes) {
    require(c >= 0.0, Errc::invalid_argument, "partition sizes must be >= 0");
    total += c;
  }
  double w = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) w += u_eval(specs[k], hit_rates[k]);
  return w - penalty.value(total);
}

// Utility sum without a penalty term.
inline double utility_sum(std::span<const UtilitySpec> specs, std::span<const double> hit_rates) {
  require(specs.size() == hit_rates.size(), Errc::invalid_argument,
          "one utility per hit rate required");
  double w = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) w += u_eval_or_neg_inf(specs[k], hit_rates[k]);
  return w;
}

}  // namespace cachepart
