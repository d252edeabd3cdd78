#pragma once

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "cachepart/cachepart.hpp"

// Asserts that `stmt` throws cachepart::Error with the given code.
#define EXPECT_ERRC(stmt, errc)                                              \
  do {                                                                       \
    bool thrown_ = false;                                                    \
    try {                                                                    \
      stmt;                                                                  \
    } catch (const cachepart::Error& e_) {                                   \
      thrown_ = true;                                                        \
      EXPECT_EQ(e_.code(), errc) << e_.what();                               \
    }                                                                        \
    EXPECT_TRUE(thrown_) << "expected " << cachepart::to_string(errc);       \
  } while (0)

namespace testing_support {

inline std::vector<cachepart::Provider> base_providers() {
  return cachepart::scenario::base_providers();
}

inline cachepart::Provider zipf_provider(double rate, double z, std::size_t n,
                                         cachepart::UtilitySpec u = cachepart::UtilitySpec::logarithmic()) {
  cachepart::Provider p;
  p.arrival_rate = rate;
  p.popularity = cachepart::ZipfPopularity{z, n};
  p.utility = u;
  return p;
}

// Dirichlet(1) draw of length n.
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& v : p) s += (v = e(rng));
  for (double& v : p) v /= s;
  return p;
}

// Independent CT oracle: plain bisection on sum(1 - exp(-r T)) = C.
inline double bisect_ct(const std::vector<double>& rates, double c) {
  double lo = 0.0, hi = 1.0;
  auto occ = [&](double t) {
    double s = 0.0;
    for (double r : rates) s += 1.0 - std::exp(-r * t);
    return s;
  };
  while (occ(hi) < c) hi *= 2.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (occ(mid) < c ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double oracle_hit_rate(const std::vector<double>& rates, double c) {
  if (c >= static_cast<double>(rates.size())) {
    double s = 0.0;
    for (double r : rates) s += r;
    return s;
  }
  const double t = bisect_ct(rates, c);
  double h = 0.0;
  for (double r : rates) h += r * (1.0 - std::exp(-r * t));
  return h;
}

}  // namespace testing_support
