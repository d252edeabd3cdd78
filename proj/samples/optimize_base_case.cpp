// Optimal partition of a 10^4-file cache between two providers, against a shared LRU.
#include <cstdio>

#include "cachepart/optimizer.hpp"

int main() {
  using namespace cachepart;
  std::vector<Provider> providers(2);
  providers[0].arrival_rate = 15.0;
  providers[0].popularity = ZipfPopularity{0.6, 10000};
  providers[0].utility = UtilitySpec::logarithmic();
  providers[1].arrival_rate = 10.0;
  providers[1].popularity = ZipfPopularity{0.8, 20000};
  providers[1].utility = UtilitySpec::linear();

  const double capacity = 1e4;
  const auto best = optimize_distinct(providers, capacity);
  const auto groups = group_contents(distinct_workload(providers));
  const auto shared = sharing_equivalent_plan(groups, capacity);
  const double shared_value = evaluate_objective(groups, utilities_of(providers), shared.sizes);

  std::printf("partitioned: C1=%.1f C2=%.1f utility=%.4f\n", best.plan.sizes[0],
              best.plan.sizes[1], best.objective);
  std::printf("shared LRU:  C1=%.1f C2=%.1f utility=%.4f\n", shared.sizes[0], shared.sizes[1],
              shared_value);
  std::printf("gain: %.1f%%\n", 100.0 * (best.objective - shared_value) / shared_value);
}
