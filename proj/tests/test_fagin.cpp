#include "support.hpp"

using namespace cachepart;
using namespace cachepart::fagin;

namespace {

// Midpoint-rule oracle for int_0^1 g(F'(x)) dx.
template <class G>
double quadrature(const PiecewiseCdf& f, G g, int points = 200000) {
  double s = 0.0;
  for (int i = 0; i < points; ++i) s += g(f.density((i + 0.5) / points));
  return s / points;
}

const PiecewiseCdf kTwoPiece = PiecewiseCdf::from_slopes({0.3, 0.7}, {2.0, 0.4 / 0.7});

}  // namespace

TEST(Fagin, BetaAndMuMatchQuadrature) {
  for (double tau : {0.1, 1.0, 3.0, 10.0}) {
    const double b = quadrature(kTwoPiece, [&](double d) { return 1.0 - std::exp(-d * tau); });
    const double m = quadrature(kTwoPiece, [&](double d) { return d * std::exp(-d * tau); });
    EXPECT_NEAR(beta_of_tau(kTwoPiece, tau), b, 1e-9);
    EXPECT_NEAR(mu_of_tau(kTwoPiece, tau), m, 1e-9);
  }
}

TEST(Fagin, UniformClosedForm) {
  const auto u = PiecewiseCdf::uniform();
  for (double beta : {0.1, 0.5, 0.9}) {
    const double tau = solve_tau(u, beta);
    EXPECT_NEAR(tau, -std::log(1.0 - beta), 1e-10);
    EXPECT_NEAR(mu_of_tau(u, tau), 1.0 - beta, 1e-10);
  }
}

TEST(Fagin, SolveTauInverts) {
  for (double beta : {0.05, 0.3, 0.6, 0.95}) {
    const double tau = solve_tau(kTwoPiece, beta);
    EXPECT_NEAR(beta_of_tau(kTwoPiece, tau), beta, 1e-12);
  }
  EXPECT_ERRC(solve_tau(kTwoPiece, 1.0), Errc::invalid_argument);
}

TEST(Fagin, SharedLimitAgreesWithMergedCdf) {
  AsymptoticWorkload w;
  w.classes.push_back({kTwoPiece, 1.0, 0.6});
  w.classes.push_back({PiecewiseCdf::uniform(), 2.0, 0.3});
  w.classes.push_back({PiecewiseCdf::from_slopes({0.5, 0.5}, {1.5, 0.5}), 1.5, 0.1});
  for (double beta : {0.1, 0.4, 0.7}) {
    w.beta = beta;
    const auto a = shared_limit(w);
    const auto b = shared_limit_via_merged_cdf(w);
    EXPECT_NEAR(a.miss_probability, b.miss_probability, 1e-10);
    EXPECT_NEAR(a.tau, b.tau, 1e-8 * a.tau);
  }
}

TEST(Fagin, SharingEquivalentSplitReproducesShared) {
  AsymptoticWorkload w;
  w.classes.push_back({kTwoPiece, 1.0, 0.6});
  w.classes.push_back({PiecewiseCdf::uniform(), 3.0, 0.4});
  w.beta = 0.35;
  const auto shared = shared_limit(w);
  const auto split = sharing_equivalent_split(w);
  double cached = 0.0, miss = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    cached += w.classes[k].mass * split.beta[k];
    miss += w.classes[k].rate_share * split.miss[k];
  }
  EXPECT_NEAR(cached / w.total_mass(), w.beta, 1e-10);
  EXPECT_NEAR(miss, shared.miss_probability, 1e-10);
}

TEST(Fagin, LimitMatchesLargeCatalogCt) {
  // One class, n files with p_i = F(i/n) - F((i-1)/n): the CT miss probability tends to mu.
  const std::size_t n = 100000;
  const auto p = materialize(kTwoPiece, n);
  const double beta = 0.2;
  const auto s = solve_ct({p, beta * n});
  EXPECT_NEAR(1.0 - s.hit_rate, mu_of_tau(kTwoPiece, solve_tau(kTwoPiece, beta)), 1e-4);
  // Characteristic time scales as tau * n.
  EXPECT_NEAR(s.characteristic_time / n, solve_tau(kTwoPiece, beta), 1e-3);
}

TEST(Fagin, CounterexampleValues) {
  const auto w = s2_over_s3_counterexample();
  const auto s2 = optimize_strategy(w, Strategy::s2);
  const auto s3 = optimize_strategy(w, Strategy::s3);
  EXPECT_NEAR(s2.hit_probability, 0.816, 0.005);
  EXPECT_NEAR(s3.hit_probability, 0.804, 0.005);
  EXPECT_GT(s2.hit_probability, s3.hit_probability);
  double used = 0.0;
  for (double b : s3.split) used += b;
  EXPECT_NEAR(used, w.beta, 1e-12);
}

TEST(Fagin, InfeasibleSplit) {
  const auto w = s2_over_s3_counterexample();
  const std::vector<double> bad{0.5, 0.5};
  EXPECT_ERRC(evaluate_strategy(w, Strategy::s2, bad), Errc::infeasible_split);
  const std::vector<double> wrong_len{0.2};
  EXPECT_ERRC(evaluate_strategy(w, Strategy::s3, wrong_len), Errc::infeasible_split);
}

namespace {

// Finite-n version of the counterexample solved by the grouped optimizer with linear utilities,
// which maximizes the aggregate hit rate.
double finite_strategy_hit(const SharedSetWorkload& w, Strategy s, std::size_t n) {
  std::array<std::vector<double>, 2> shared, own;
  for (std::size_t k = 0; k < 2; ++k) {
    shared[k] = materialize(w.shared_cdf[k], n);
    own[k] = materialize(w.own_cdf[k], n);
  }
  OverlapWorkload ow;
  ow.provider_rates = {w.shared_rate[0] + w.own_rate[0], w.shared_rate[1] + w.own_rate[1]};
  if (s == Strategy::s2) {
    for (std::size_t k = 0; k < 2; ++k) {
      ContentSet set;
      set.providers = {k};
      set.count = 2 * n;
      set.rates = {ow.provider_rates[k]};
      std::vector<double> p;
      for (double v : shared[k]) p.push_back(v * w.shared_rate[k] / ow.provider_rates[k]);
      for (double v : own[k]) p.push_back(v * w.own_rate[k] / ow.provider_rates[k]);
      set.popularity = {p};
      ow.sets.push_back(set);
    }
  } else {
    for (std::size_t k = 0; k < 2; ++k) {
      ContentSet set;
      set.providers = {k};
      set.count = n;
      set.rates = {w.own_rate[k]};
      set.popularity = {own[k]};
      ow.sets.push_back(set);
    }
    ContentSet common;
    common.providers = {0, 1};
    common.count = n;
    common.rates = {w.shared_rate[0], w.shared_rate[1]};
    common.popularity = {shared[0], shared[1]};
    ow.sets.push_back(common);
  }
  const auto groups = group_contents(ow);
  const std::vector<UtilitySpec> u{UtilitySpec::linear(), UtilitySpec::linear()};
  const auto r = optimize_grouped(groups, u, w.beta * 3.0 * n);
  return (r.hit_rates[0] + r.hit_rates[1]) / w.total_rate();
}

}  // namespace

TEST(Fagin, CounterexampleAgreesWithFiniteCatalog) {
  const auto w = s2_over_s3_counterexample();
  for (auto s : {Strategy::s2, Strategy::s3}) {
    const double limit = optimize_strategy(w, s).hit_probability;
    EXPECT_NEAR(finite_strategy_hit(w, s, 3000), limit, 2e-3) << to_string(s);
  }
}
