// Characteristic-time prediction vs. simulated LRU for one Zipf catalog.
#include <cstdio>

#include "cachepart/ct.hpp"
#include "cachepart/lrusim.hpp"

int main() {
  using namespace cachepart;
  Provider p;
  p.arrival_rate = 1.0;
  p.popularity = ZipfPopularity{0.8, 5000};
  const auto groups = group_contents(distinct_workload({p}));

  for (double size : {50.0, 500.0, 2500.0}) {
    const auto ct = solve_ct({groups[0].aggregate_rates, size});
    sim::SimConfig cfg;
    cfg.groups = groups;
    cfg.sizes = {size};
    cfg.measurement_requests = 2'000'000;
    cfg.seed = 42;
    const auto counters = sim::simulate(cfg);
    std::printf("C=%6.0f  T=%10.1f  CT hit=%.4f  simulated=%.4f\n", size, ct.characteristic_time,
                ct.hit_rate, counters.hit_probability());
  }
  // Exact answer for a tiny catalog.
  const std::vector<double> tiny{0.4, 0.3, 0.2, 0.1};
  std::printf("exact LRU, n=4, C=2: %.6f\n", sim::exact_small_lru(tiny, 2));
}
