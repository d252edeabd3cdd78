#include "support.hpp"

using namespace cachepart;

TEST(Utility, TabulatedValues) {
  EXPECT_DOUBLE_EQ(u_eval(UtilitySpec::linear(), 3.0), 2.0);
  EXPECT_DOUBLE_EQ(u_prime(UtilitySpec::linear(), 3.0), 1.0);
  EXPECT_NEAR(u_eval(UtilitySpec::logarithmic(), std::exp(1.0)), 1.0, 1e-15);
  EXPECT_NEAR(u_prime(UtilitySpec::logarithmic(), std::exp(1.0)), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(u_eval(UtilitySpec::alpha_fair(2.0), 2.0), 0.5, 1e-15);
  EXPECT_NEAR(u_prime(UtilitySpec::alpha_fair(2.0), 2.0), 0.25, 1e-15);
  EXPECT_NEAR(u_eval(UtilitySpec::neg_inverse(), 2.0), 0.5, 1e-15);
}

TEST(Utility, WeightScales) {
  const auto u = UtilitySpec::alpha_fair(0.5, 3.0);
  EXPECT_NEAR(u_eval(u, 4.0), 3.0 * (2.0 - 1.0) / 0.5, 1e-12);
  EXPECT_NEAR(u_prime(u, 4.0), 3.0 * 0.5, 1e-12);
}

TEST(Utility, DomainAtZero) {
  EXPECT_ERRC(u_eval(UtilitySpec::logarithmic(), 0.0), Errc::domain);
  EXPECT_ERRC(u_eval(UtilitySpec::neg_inverse(), 0.0), Errc::domain);
  EXPECT_DOUBLE_EQ(u_eval(UtilitySpec::alpha_fair(0.5), 0.0), -2.0);
  EXPECT_ERRC(u_eval(UtilitySpec::linear(), -1.0), Errc::domain);
}

TEST(Utility, IncreasingAndConcave) {
  for (double a : {0.0, 0.3, 1.0, 2.0, 5.0}) {
    const auto u = UtilitySpec::alpha_fair(a);
    for (double h = 0.2; h < 20.0; h *= 1.3) {
      const double d = 1e-3 * h;
      const double lo = u_eval(u, h - d), mid = u_eval(u, h), hi = u_eval(u, h + d);
      EXPECT_GT(hi, mid) << "a=" << a << " h=" << h;
      if (a > 0.0) EXPECT_LT(hi - 2.0 * mid + lo, 0.0) << "a=" << a << " h=" << h;
      EXPECT_NEAR((hi - lo) / (2.0 * d), u_prime(u, h), 1e-5 * u_prime(u, h));
    }
  }
}

TEST(Utility, ContinuousAcrossLog) {
  // U_a - log h = (1-a)(log h)^2/2 + O((1-a)^2).
  for (double h = 0.1; h <= 10.0; h *= 1.25) {
    const double l = std::log(h);
    for (double eps : {1e-4, -1e-4}) {
      const double diff = u_eval(UtilitySpec::alpha_fair(1.0 + eps), h) - l;
      EXPECT_NEAR(diff, -eps * l * l / 2.0, 1e-7) << h;
    }
    for (double eps : {1e-7, -1e-7})
      EXPECT_NEAR(u_eval(UtilitySpec::alpha_fair(1.0 + eps), h), l, 1e-6);
  }
}

TEST(Utility, PenaltyConvexAndZeroBelowBase) {
  for (auto kind : {PenaltySpec::Kind::linear, PenaltySpec::Kind::quadratic}) {
    PenaltySpec p{kind, 0.7, 0.2, 100.0};
    EXPECT_EQ(p.value(50.0), 0.0);
    EXPECT_EQ(p.value(100.0), 0.0);
    EXPECT_DOUBLE_EQ(p.derivative(100.0), 0.7);
    for (double x = 80.0; x < 140.0; x += 0.5) {
      const double second = p.value(x + 0.5) - 2.0 * p.value(x) + p.value(x - 0.5);
      EXPECT_GE(second, -1e-12);
      EXPECT_GE(p.value(x + 0.5), p.value(x));
    }
  }
}

TEST(Utility, ObjectiveAtBaseHasNoPenalty) {
  const std::vector<UtilitySpec> u{UtilitySpec::logarithmic(), UtilitySpec::logarithmic()};
  const PenaltySpec p{PenaltySpec::Kind::quadratic, 1.0, 1.0, 10.0};
  const std::vector<double> h{2.0, 3.0};
  const std::vector<double> c{4.0, 6.0};
  EXPECT_DOUBLE_EQ(objective(u, h, p, c), std::log(2.0) + std::log(3.0));
  const std::vector<double> hs{3.0, 2.0};
  const std::vector<double> cs{6.0, 4.0};
  EXPECT_DOUBLE_EQ(objective(u, hs, p, cs), objective(u, h, p, c));
  const std::vector<double> over{6.0, 6.0};
  EXPECT_DOUBLE_EQ(objective(u, h, p, over), std::log(6.0) - (2.0 + 2.0));
}
