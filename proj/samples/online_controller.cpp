// Online controller driven by exact hit rates, converging to the offline optimum.
#include <cstdio>
#include <memory>

#include "cachepart/onlinectl.hpp"

int main() {
  using namespace cachepart;
  std::vector<Provider> providers(2);
  providers[0].arrival_rate = 15.0;
  providers[0].popularity = ZipfPopularity{0.6, 10000};
  providers[1].arrival_rate = 10.0;
  providers[1].popularity = ZipfPopularity{0.8, 20000};
  const auto groups = group_contents(distinct_workload(providers));
  const std::vector<UtilitySpec> utilities{UtilitySpec::logarithmic(), UtilitySpec::neg_inverse()};

  online::ControllerConfig config;
  config.step = 1e7;
  const std::vector<double> start{5000, 5000};
  auto model = std::make_shared<const GroupedCacheModel>(groups, 2);
  const auto trace = online::run_controller(online::ControllerKind::distinct, utilities, config,
                                            start, online::exact_source(model), 200);
  for (const auto& row : trace.rows)
    std::printf("%3d  C1=%8.1f  C2=%8.1f  W=%.6f\n", row.iteration, row.sizes[0], row.sizes[1],
                row.objective);
  const auto best = optimize_grouped(groups, utilities, 1e4);
  std::printf("offline optimum: C1=%.1f C2=%.1f\n", best.plan.sizes[0], best.plan.sizes[1]);
}
