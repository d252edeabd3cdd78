#include "support.hpp"

using namespace cachepart;
using testing_support::bisect_ct;

TEST(Ct, UniformClosedForm) {
  const std::size_t n = 1000;
  const double lambda = 7.0;
  const std::vector<double> rates(n, lambda / n);
  for (double c : {1.0, 100.0, 500.0, 999.0}) {
    const auto s = solve_ct({rates, c});
    const double t = -(n / lambda) * std::log(1.0 - c / n);
    EXPECT_NEAR(s.characteristic_time, t, 1e-9 * t);
    EXPECT_NEAR(s.hit_rate, lambda * c / n, 1e-9);
  }
}

TEST(Ct, MatchesBisectionOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const double z = std::uniform_real_distribution<double>(0.2, 1.3)(rng);
    const std::size_t n = 500 + 300 * static_cast<std::size_t>(trial);
    const auto p = zipf_probabilities(z, n);
    std::vector<double> rates;
    for (double v : p) rates.push_back(4.0 * v);
    const double c = std::uniform_real_distribution<double>(1.0, n - 1.0)(rng);
    const auto s = solve_ct({rates, c});
    const double t = bisect_ct(rates, c);
    EXPECT_NEAR(s.characteristic_time, t, 1e-9 * t) << "z=" << z << " n=" << n << " c=" << c;
    double used = 0.0;
    for (double q : s.hit_probabilities) used += q;
    EXPECT_NEAR(used, c, 1e-9 * c);
  }
}

TEST(Ct, EdgeCases) {
  const std::vector<double> rates{0.5, 0.3, 0.2};
  EXPECT_EQ(solve_ct({rates, 0.0}).characteristic_time, 0.0);
  EXPECT_EQ(solve_ct({rates, 0.0}).hit_rate, 0.0);
  EXPECT_ERRC(solve_ct({rates, 3.0}), Errc::capacity_exceeds_catalog);
  EXPECT_ERRC(solve_ct({{0.5, 0.0}, 1.0}), Errc::invalid_argument);
  EXPECT_ERRC(solve_ct({rates, 1.0}, 0.0), Errc::invalid_argument);
  EXPECT_ERRC(solve_ct({rates, 1.0}, 1e-2), Errc::invalid_argument);
  EXPECT_DOUBLE_EQ(saturating_hit_rate(rates, 5.0), 1.0);
}

TEST(Ct, DerivativeMatchesCentralDifference) {
  std::vector<double> rates;
  for (double v : zipf_probabilities(0.8, 2000)) rates.push_back(10.0 * v);
  for (double c : {5.0, 100.0, 1000.0, 1900.0}) {
    const CtProblem prob{rates, c};
    const double d = d_hit_rate_dC(prob, solve_ct(prob));
    const double e = 1e-3 * c;
    const double fd = (solve_ct({rates, c + e}).hit_rate - solve_ct({rates, c - e}).hit_rate) / (2 * e);
    EXPECT_NEAR(d, fd, 1e-4 * d) << c;
  }
  // At C = 0 the derivative is sum r^2 / sum r.
  const CtProblem zero{{0.5, 0.3, 0.2}, 0.0};
  EXPECT_NEAR(d_hit_rate_dC(zero, solve_ct(zero)), 0.38, 1e-15);
}

TEST(Ct, HitRateConcaveInCapacity) {
  std::vector<double> rates;
  for (double v : zipf_probabilities(0.6, 1000)) rates.push_back(3.0 * v);
  double prev2 = 0.0, prev1 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double h = solve_ct({rates, 9.9 * i}).hit_rate;
    if (i >= 2) EXPECT_LE(h - 2 * prev1 + prev2, 1e-8);
    prev2 = prev1;
    prev1 = h;
  }
}

TEST(Ct, MultiProviderShares) {
  const std::vector<std::vector<double>> r{{0.4, 0.1, 0.0, 0.2}, {0.0, 0.3, 0.5, 0.1}};
  const auto m = multi_rate_hit_rates(r, 2.0);
  EXPECT_NEAR(m.per_provider[0] + m.per_provider[1], m.aggregate.hit_rate, 1e-14);
  const std::vector<double> agg{0.4, 0.4, 0.5, 0.3};
  const double t = bisect_ct(agg, 2.0);
  double h0 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) h0 += r[0][i] * (1.0 - std::exp(-agg[i] * t));
  EXPECT_NEAR(m.per_provider[0], h0, 1e-10);
}
