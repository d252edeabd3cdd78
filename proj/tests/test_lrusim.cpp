#include "support.hpp"

using namespace cachepart;
using namespace cachepart::sim;

namespace {

std::vector<ContentGroup> single_group(const std::vector<double>& p, double rate = 1.0) {
  Provider prov;
  prov.arrival_rate = rate;
  prov.popularity = ExplicitPopularity{p};
  return group_contents(distinct_workload({prov}));
}

HitCounters run_single(const std::vector<double>& p, double capacity, std::uint64_t requests,
                       std::uint64_t seed) {
  SimConfig cfg;
  cfg.groups = single_group(p);
  cfg.sizes = {capacity};
  cfg.measurement_requests = requests;
  cfg.seed = seed;
  return simulate(cfg);
}

}  // namespace

TEST(LruList, KeepsRecencyOrder) {
  LruList l(5, 3);
  EXPECT_FALSE(l.access(0));
  EXPECT_FALSE(l.access(1));
  EXPECT_FALSE(l.access(2));
  EXPECT_TRUE(l.access(0));
  EXPECT_EQ(l.contents(), (std::vector<std::size_t>{0, 2, 1}));
  EXPECT_FALSE(l.access(3));  // evicts 1
  EXPECT_FALSE(l.contains(1));
  EXPECT_EQ(l.contents(), (std::vector<std::size_t>{3, 0, 2}));
  l.resize(1);
  EXPECT_EQ(l.contents(), (std::vector<std::size_t>{3}));
  EXPECT_EQ(l.size(), 1u);
}

TEST(LruList, ZeroCapacityNeverHits) {
  LruList l(3, 0);
  EXPECT_FALSE(l.access(1));
  EXPECT_FALSE(l.access(1));
  EXPECT_EQ(l.size(), 0u);
}

TEST(LruSim, SingleSlotHitProbability) {
  const std::vector<double> p{0.5, 0.3, 0.2};
  const auto c = run_single(p, 1.0, 1'000'000, 3);
  EXPECT_NEAR(c.hit_probability(), 0.38, 0.005);
  EXPECT_NEAR(exact_small_lru(p, 1), 0.38, 1e-12);
}

TEST(LruSim, MatchesExactEnumeration) {
  const std::vector<double> p{0.4, 0.3, 0.2, 0.1};
  const std::uint64_t n = 1'000'000;
  const auto c = run_single(p, 2.0, n, 11);
  const double exact = exact_small_lru(p, 2);
  const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
  EXPECT_NEAR(c.hit_probability(), exact, 3.0 * se);
}

TEST(LruSim, FullCacheAlwaysHits) {
  const std::vector<double> p{0.25, 0.25, 0.5};
  const auto c = run_single(p, 3.0, 10000, 5);
  EXPECT_EQ(c.total_hits(), c.total_requests());
  EXPECT_DOUBLE_EQ(exact_small_lru(p, 5), 1.0);
}

TEST(LruSim, SameSeedSameCounts) {
  const std::vector<double> p{0.4, 0.3, 0.2, 0.1};
  EXPECT_EQ(run_single(p, 2.0, 50000, 9), run_single(p, 2.0, 50000, 9));
  EXPECT_NE(run_single(p, 2.0, 50000, 9).hits, run_single(p, 2.0, 50000, 10).hits);
}

TEST(LruSim, ExactRejectsLargeCatalog) {
  const std::vector<double> p(9, 1.0 / 9.0);
  EXPECT_ERRC(exact_small_lru(p, 2), Errc::too_large);
  const std::vector<double> bad{0.5, 0.2};
  EXPECT_ERRC(exact_small_lru(bad, 1), Errc::normalization_failure);
}

TEST(LruSim, ElapsedTimeFollowsRate) {
  SimConfig cfg;
  cfg.groups = single_group({0.5, 0.5}, 4.0);
  cfg.sizes = {1.0};
  cfg.measurement_requests = 1000;
  const auto c = simulate(cfg);
  EXPECT_DOUBLE_EQ(c.elapsed, 250.0);
  const auto m = c.hit_rate_matrix();
  EXPECT_NEAR(m[0][0], static_cast<double>(c.total_hits()) / 250.0, 1e-12);
}

TEST(LruSim, PartitionCountersSeparateProviders) {
  const std::vector<Provider> ps{testing_support::zipf_provider(2.0, 0.8, 50),
                                 testing_support::zipf_provider(1.0, 0.8, 80)};
  const auto groups = group_contents(distinct_workload(ps));
  const std::vector<std::size_t> sizes{10, 20};
  PartitionedLru cache(groups, 2, sizes, 1);
  const auto c = cache.measure(30000);
  EXPECT_EQ(c.request_count(0, 1), 0u);
  EXPECT_EQ(c.request_count(1, 0), 0u);
  EXPECT_NEAR(static_cast<double>(c.request_count(0, 0)) / 30000.0, 2.0 / 3.0, 0.02);
}

TEST(LruSim, RoundSizesKeepsTotal) {
  const std::vector<double> a{1.5, 2.5, 3.2};
  const auto ra = round_sizes(a);
  EXPECT_EQ(ra, (std::vector<std::size_t>{2, 2, 3}));
  const std::vector<double> b{0.5, 0.5, 0.5, 0.5};
  const auto rb = round_sizes(b);
  EXPECT_EQ(std::accumulate(rb.begin(), rb.end(), std::size_t{0}), 2u);
  const std::vector<double> bad{-1.0};
  EXPECT_ERRC(round_sizes(bad), Errc::invalid_argument);
}

TEST(LruSim, CtAgreesAtModerateScale) {
  ScalingWorkload w{{0.8}, {1.0}, {1.0}, {0.1}};
  const std::vector<std::size_t> grid{2000};
  const auto rows = ct_vs_sim_report(w, grid, 2'000'000, 4);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LT(rows[0].gap, 0.01);
}
