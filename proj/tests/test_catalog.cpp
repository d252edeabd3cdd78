#include "support.hpp"

using namespace cachepart;

TEST(Catalog, ZipfNormalizedAndOrdered) {
  const auto p = zipf_probabilities(0.8, 20000);
  EXPECT_NEAR(stable_sum(p), 1.0, 1e-13);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_LT(p[i], p[i - 1]);
  EXPECT_NEAR(p[0] / p[1], std::pow(2.0, 0.8), 1e-12);
  const auto flat = zipf_probabilities(0.0, 4);
  for (double v : flat) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Catalog, CdfMaterialization) {
  const auto f = PiecewiseCdf::from_slopes({0.5, 0.5}, {1.6, 0.4});
  const auto p = materialize(f, 10);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(p[i], 0.16, 1e-15);
  for (std::size_t i = 5; i < 10; ++i) EXPECT_NEAR(p[i], 0.04, 1e-15);
  EXPECT_NEAR(f(0.25), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(f.density(0.75), 0.4);
  const auto u = materialize(PiecewiseCdf::uniform(), 8);
  for (double v : u) EXPECT_DOUBLE_EQ(v, 0.125);
}

TEST(Catalog, InvalidInputs) {
  EXPECT_ERRC(PiecewiseCdf({0.0, 0.5, 1.0}, {0.0, 0.7, 0.6}), Errc::invalid_cdf);
  EXPECT_ERRC(PiecewiseCdf({0.0, 1.0}, {0.0, 0.9}), Errc::invalid_cdf);
  EXPECT_ERRC(PiecewiseCdf::from_slopes({0.5, 0.5}, {1.0, 2.0}), Errc::invalid_cdf);
  EXPECT_ERRC(materialize(ExplicitPopularity{{0.5, 0.6}}, 2), Errc::normalization_failure);
  EXPECT_ERRC(materialize(ExplicitPopularity{{0.5, 0.5}}, 3), Errc::invalid_argument);
  EXPECT_ERRC(materialize(ZipfPopularity{0.5, 10}, 11), Errc::invalid_argument);
  EXPECT_ERRC(zipf_probabilities(-0.1, 10), Errc::invalid_argument);
}

TEST(Catalog, ProviderRates) {
  const auto p = testing_support::zipf_provider(15.0, 0.6, 1000);
  const auto r = p.rates();
  EXPECT_EQ(r.size(), 1000u);
  EXPECT_NEAR(stable_sum(r), 15.0, 1e-11);
}

namespace {

ContentSet set_of(std::vector<std::size_t> members, std::size_t count, std::vector<double> rates) {
  ContentSet s;
  s.providers = std::move(members);
  s.count = count;
  s.rates = std::move(rates);
  for (std::size_t m = 0; m < s.providers.size(); ++m)
    s.popularity.push_back(std::vector<double>(count, 1.0 / static_cast<double>(count)));
  return s;
}

}  // namespace

TEST(Catalog, GroupsByServingSubset) {
  OverlapWorkload w;
  w.provider_rates = {3.0, 5.0, 2.0};
  w.sets.push_back(set_of({0}, 4, {1.0}));
  w.sets.push_back(set_of({0, 1}, 2, {2.0, 1.0}));
  w.sets.push_back(set_of({1}, 3, {4.0}));
  w.sets.push_back(set_of({2}, 1, {2.0}));
  const auto groups = group_contents(w);
  ASSERT_EQ(groups.size(), 4u);
  EXPECT_EQ(groups[0].serving, (std::vector<std::size_t>{0}));
  EXPECT_EQ(groups[1].serving, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(groups[1].file_count(), 2u);
  EXPECT_DOUBLE_EQ(groups[1].aggregate_rates[0], 1.5);
  EXPECT_DOUBLE_EQ(groups[1].provider_rates[1][1], 0.5);
  double total = 0.0;
  for (const auto& g : groups)
    for (double r : g.aggregate_rates) total += r;
  EXPECT_NEAR(total, 10.0, 1e-12);
  std::size_t files = 0;
  for (const auto& g : groups) files += g.file_count();
  EXPECT_EQ(files, 10u);
}

TEST(Catalog, WorkloadValidation) {
  OverlapWorkload w;
  w.provider_rates = {3.0, 5.0};
  w.sets.push_back(set_of({0}, 4, {3.0}));
  w.sets.push_back(set_of({1}, 4, {4.0}));  // provider 1 short by 1
  EXPECT_ERRC(w.validate(), Errc::invalid_argument);
  w.sets[1].rates = {5.0};
  EXPECT_NO_THROW(w.validate());
  w.sets.push_back(set_of({1, 0}, 1, {0.0, 0.0}));
  EXPECT_ERRC(w.validate(), Errc::invalid_argument);
}

TEST(Catalog, DistinctWorkloadOneGroupPerProvider) {
  const auto ps = testing_support::base_providers();
  const auto groups = group_contents(distinct_workload(ps));
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].file_count(), 10000u);
  EXPECT_EQ(groups[1].file_count(), 20000u);
  EXPECT_NEAR(stable_sum(groups[1].aggregate_rates), 10.0, 1e-10);
}
