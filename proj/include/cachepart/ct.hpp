#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "cachepart/error.hpp"

namespace cachepart {

// LRU partition under the characteristic-time approximation: per-file request rates and a
// real-valued capacity in files.
struct CtProblem {
  std::vector<double> rates;
  double capacity = 0.0;
};

struct CtSolution {
  double characteristic_time = 0.0;
  std::vector<double> hit_probabilities;
  double hit_rate = 0.0;
};

inline constexpr double kDefaultCtTolerance = 1e-12;
inline constexpr int kCtIterationCap = 200;

namespace detail {

// 1 - exp(-x) without cancellation for small x.
inline double one_minus_exp(double x) { return -std::expm1(-x); }

inline void check_rates(std::span<const double> rates) {
  for (double r : rates)
    require(r > 0.0 && std::isfinite(r), Errc::invalid_argument, "request rates must be > 0");
}

inline double capacity_used(std::span<const double> rates, double t) {
  double s = 0.0;
  for (double r : rates) s += one_minus_exp(r * t);
  return s;
}

inline double capacity_slope(std::span<const double> rates, double t) {
  double s = 0.0;
  for (double r : rates) s += r * std::exp(-r * t);
  return s;
}

// Root of sum(1 - e^{-r_i T}) = capacity. The map is strictly increasing and concave in T, so
// Newton steps from below never overshoot; a bracket guards the steps taken from above.
inline double solve_time(std::span<const double> rates, double capacity, double rel_tol) {
  require(rel_tol > 0.0 && rel_tol <= 1e-3, Errc::invalid_argument,
          "rel_tol must lie in (0, 1e-3]");
  require(capacity >= 0.0 && std::isfinite(capacity), Errc::invalid_argument,
          "capacity must be >= 0");
  const double n = static_cast<double>(rates.size());
  if (capacity >= n)
    fail(Errc::capacity_exceeds_catalog, "capacity " + std::to_string(capacity) +
                                             " has no finite characteristic time for " +
                                             std::to_string(rates.size()) + " files");
  if (capacity == 0.0) return 0.0;

  double total_rate = 0.0;
  for (double r : rates) total_rate += r;
  const double tol = rel_tol * std::max(capacity, 1.0);

  // Seed from the uniform-popularity closed form T = -(n/lambda) ln(1 - C/n).
  double t = -(n / total_rate) * std::log1p(-capacity / n);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double f = capacity_used(rates, t) - capacity;
  if (f < 0.0) lo = t; else hi = t;
  while (!std::isfinite(hi)) {
    const double probe = std::max(2.0 * lo, 1.0 / total_rate);
    const double fp = capacity_used(rates, probe) - capacity;
    if (fp >= 0.0) {
      hi = probe;
    } else {
      lo = probe;
      t = probe;
      f = fp;
    }
    require(lo < 1e300, Errc::no_convergence, "could not bracket the characteristic time");
  }

  for (int it = 0; it < kCtIterationCap; ++it) {
    if (std::abs(f) <= tol) return t;
    if (f < 0.0) lo = t; else hi = t;
    const double slope = capacity_slope(rates, t);
    double next = slope > 0.0 ? t - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return t;
    t = next;
    f = capacity_used(rates, t) - capacity;
  }
  if (std::abs(f) <= tol) return t;
  fail(Errc::no_convergence, "characteristic time did not converge in 200 iterations");
}

}  // namespace detail

inline CtSolution solve_ct(const CtProblem& problem, double rel_tol = kDefaultCtTolerance) {
  detail::check_rates(problem.rates);
  CtSolution s;
  s.characteristic_time = detail::solve_time(problem.rates, problem.capacity, rel_tol);
  s.hit_probabilities.reserve(problem.rates.size());
  for (double r : problem.rates) {
    const double q = detail::one_minus_exp(r * s.characteristic_time);
    s.hit_probabilities.push_back(q);
    s.hit_rate += r * q;
  }
  return s;
}

// h = sum_i r_i (1 - e^{-r_i T}).
inline double hit_rate(const CtProblem& problem, const CtSolution& solution) {
  double h = 0.0;
  for (double r : problem.rates)
    h += r * detail::one_minus_exp(r * solution.characteristic_time);
  return h;
}

// dh/dC with dT/dC eliminated: sum r^2 e^{-rT} / sum r e^{-rT}. At C = 0 this is the analytic
// limit sum r^2 / sum r.
inline double d_hit_rate_dC(const CtProblem& problem, const CtSolution& solution) {
  require(problem.capacity < static_cast<double>(problem.rates.size()),
          Errc::capacity_exceeds_catalog, "derivative undefined at a saturated partition");
  const double t = solution.characteristic_time;
  double num = 0.0;
  double den = 0.0;
  for (double r : problem.rates) {
    const double e = std::exp(-r * t);
    num += r * r * e;
    den += r * e;
  }
  return num / den;
}

// Hit rate with C >= n allowed: a partition holding its whole catalog hits everything.
inline double saturating_hit_rate(std::span<const double> rates, double capacity,
                                  double rel_tol = kDefaultCtTolerance) {
  if (capacity >= static_cast<double>(rates.size())) {
    double s = 0.0;
    for (double r : rates) s += r;
    return s;
  }
  const double t = detail::solve_time(rates, capacity, rel_tol);
  double h = 0.0;
  for (double r : rates) h += r * detail::one_minus_exp(r * t);
  return h;
}

struct MultiRateHits {
  CtSolution aggregate;
  std::vector<double> per_provider;
};

// One partition fed by several providers: the CT is solved on the aggregate per-file rates and
// provider k receives sum_i r_{k,i} (1 - e^{-r_i T}).
inline MultiRateHits multi_rate_hit_rates(const std::vector<std::vector<double>>& provider_rates,
                                          double capacity,
                                          double rel_tol = kDefaultCtTolerance) {
  require(!provider_rates.empty(), Errc::invalid_argument, "need at least one provider");
  const std::size_t n = provider_rates.front().size();
  CtProblem aggregate{std::vector<double>(n, 0.0), capacity};
  for (const auto& v : provider_rates) {
    require(v.size() == n, Errc::invalid_argument, "provider rate vectors differ in length");
    for (std::size_t i = 0; i < n; ++i) {
      require(v[i] >= 0.0, Errc::invalid_argument, "provider rates must be >= 0");
      aggregate.rates[i] += v[i];
    }
  }
  MultiRateHits out;
  out.aggregate = solve_ct(aggregate, rel_tol);
  for (const auto& v : provider_rates) {
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) h += v[i] * out.aggregate.hit_probabilities[i];
    out.per_provider.push_back(h);
  }
  return out;
}

}  // namespace cachepart
