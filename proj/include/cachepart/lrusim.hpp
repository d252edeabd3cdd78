#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "cachepart/catalog.hpp"
#include "cachepart/ct.hpp"
#include "cachepart/error.hpp"

namespace cachepart::sim {

// Fixed-capacity LRU over local file ids [0, catalog). Doubly linked through index arrays so
// lookup and move-to-front are O(1).
class LruList {
 public:
  LruList(std::size_t catalog, std::size_t capacity)
      : prev_(catalog, kNone), next_(catalog, kNone), cached_(catalog, 0), capacity_(capacity) {
    require(catalog < kNone, Errc::too_large, "catalog too large for 32-bit ids");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return size_; }
  std::size_t catalog() const { return cached_.size(); }
  bool contains(std::size_t id) const { return cached_[id] != 0; }

  // Returns true on a hit. A miss inserts at the head and evicts the tail when full.
  bool access(std::size_t id) {
    const auto v = static_cast<std::uint32_t>(id);
    if (cached_[v]) {
      if (head_ != v) {
        unlink(v);
        push_front(v);
      }
      return true;
    }
    if (capacity_ == 0) return false;
    if (size_ == capacity_) evict_tail();
    push_front(v);
    cached_[v] = 1;
    ++size_;
    return false;
  }

  void resize(std::size_t capacity) {
    capacity_ = capacity;
    while (size_ > capacity_) evict_tail();
  }

  // Most recent first.
  std::vector<std::size_t> contents() const {
    std::vector<std::size_t> out;
    for (std::uint32_t v = head_; v != kNone; v = next_[v]) out.push_back(v);
    return out;
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  void unlink(std::uint32_t v) {
    if (prev_[v] != kNone) next_[prev_[v]] = next_[v]; else head_ = next_[v];
    if (next_[v] != kNone) prev_[next_[v]] = prev_[v]; else tail_ = prev_[v];
    prev_[v] = next_[v] = kNone;
  }

  void push_front(std::uint32_t v) {
    prev_[v] = kNone;
    next_[v] = head_;
    if (head_ != kNone) prev_[head_] = v;
    head_ = v;
    if (tail_ == kNone) tail_ = v;
  }

  void evict_tail() {
    const std::uint32_t v = tail_;
    unlink(v);
    cached_[v] = 0;
    --size_;
  }

  std::vector<std::uint32_t> prev_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint8_t> cached_;
  std::uint32_t head_ = kNone;
  std::uint32_t tail_ = kNone;
  std::size_t capacity_ = 0;
  std::size_t size_ = 0;
};

// K x P matrix of (hits, requests), plus the elapsed model time of the window.
struct HitCounters {
  std::size_t providers = 0;
  std::size_t partitions = 0;
  std::vector<std::uint64_t> hits;
  std::vector<std::uint64_t> requests;
  double elapsed = 0.0;

  HitCounters() = default;
  HitCounters(std::size_t k, std::size_t p)
      : providers(k), partitions(p), hits(k * p, 0), requests(k * p, 0) {}

  std::uint64_t hit_count(std::size_t k, std::size_t p) const { return hits[k * partitions + p]; }
  std::uint64_t request_count(std::size_t k, std::size_t p) const {
    return requests[k * partitions + p];
  }

  std::uint64_t total_hits() const { return std::accumulate(hits.begin(), hits.end(), std::uint64_t{0}); }
  std::uint64_t total_requests() const {
    return std::accumulate(requests.begin(), requests.end(), std::uint64_t{0});
  }
  double hit_probability() const {
    const auto r = total_requests();
    return r == 0 ? 0.0 : static_cast<double>(total_hits()) / static_cast<double>(r);
  }

  // h_kp estimated as hits per unit of model time.
  std::vector<std::vector<double>> hit_rate_matrix() const {
    std::vector<std::vector<double>> h(providers, std::vector<double>(partitions, 0.0));
    if (elapsed <= 0.0) return h;
    for (std::size_t k = 0; k < providers; ++k)
      for (std::size_t p = 0; p < partitions; ++p)
        h[k][p] = static_cast<double>(hit_count(k, p)) / elapsed;
    return h;
  }

  bool operator==(const HitCounters&) const = default;
};

// Partition p caches content group p. Requests are i.i.d. draws from the aggregate per-file
// rates: under Poisson arrivals only the order matters to LRU, and model time advances by
// 1/lambda per request.
class PartitionedLru {
 public:
  PartitionedLru(std::span<const ContentGroup> groups, std::size_t provider_count,
                 std::span<const std::size_t> sizes, std::uint64_t seed)
      : provider_count_(provider_count), rng_(seed) {
    require(sizes.size() == groups.size(), Errc::invalid_argument,
            "one size per partition required");
    std::vector<double> weights;
    for (std::size_t p = 0; p < groups.size(); ++p) {
      const auto& g = groups[p];
      lists_.emplace_back(g.file_count(), sizes[p]);
      for (std::size_t m = 0; m < g.serving.size(); ++m) {
        require(g.serving[m] < provider_count, Errc::invalid_argument, "unknown provider");
        for (std::size_t i = 0; i < g.file_count(); ++i) {
          const double r = g.provider_rates[m][i];
          if (r <= 0.0) continue;
          streams_.push_back({static_cast<std::uint32_t>(g.serving[m]),
                              static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(i)});
          weights.push_back(r);
          total_rate_ += r;
        }
      }
    }
    require(!weights.empty() && total_rate_ > 0.0, Errc::invalid_argument,
            "workload has no requests");
    pick_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
  }

  std::size_t partition_count() const { return lists_.size(); }
  double total_rate() const { return total_rate_; }
  const LruList& partition(std::size_t p) const { return lists_[p]; }

  void resize(std::span<const std::size_t> sizes) {
    require(sizes.size() == lists_.size(), Errc::invalid_argument, "one size per partition");
    for (std::size_t p = 0; p < lists_.size(); ++p) lists_[p].resize(sizes[p]);
  }

  // Serves `requests` requests, counting into `counters` when given.
  void run(std::uint64_t requests, HitCounters* counters = nullptr) {
    for (std::uint64_t r = 0; r < requests; ++r) {
      const Stream& s = streams_[pick_(rng_)];
      const bool hit = lists_[s.partition].access(s.file);
      if (counters) {
        const std::size_t idx = s.provider * counters->partitions + s.partition;
        ++counters->requests[idx];
        if (hit) ++counters->hits[idx];
      }
    }
    if (counters) counters->elapsed += static_cast<double>(requests) / total_rate_;
  }

  HitCounters measure(std::uint64_t requests) {
    HitCounters c(provider_count_, lists_.size());
    run(requests, &c);
    return c;
  }

 private:
  struct Stream {
    std::uint32_t provider;
    std::uint32_t partition;
    std::uint32_t file;
  };
  std::size_t provider_count_;
  std::vector<LruList> lists_;
  std::vector<Stream> streams_;
  std::discrete_distribution<std::size_t> pick_;
  std::mt19937_64 rng_;
  double total_rate_ = 0.0;
};

// Rounds real sizes half-to-even, then moves the rounding residual onto the largest partition so
// the integer total equals the rounded real total.
inline std::vector<std::size_t> round_sizes(std::span<const double> sizes) {
  std::vector<std::size_t> out;
  double total = 0.0;
  long long sum = 0;
  for (double c : sizes) {
    require(c >= 0.0 && std::isfinite(c), Errc::invalid_argument, "sizes must be >= 0");
    const auto v = static_cast<long long>(std::nearbyint(c));
    out.push_back(static_cast<std::size_t>(v));
    sum += v;
    total += c;
  }
  if (out.empty()) return out;
  const auto target = static_cast<long long>(std::nearbyint(total));
  const auto largest = static_cast<std::size_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  const long long fixed = static_cast<long long>(out[largest]) + (target - sum);
  out[largest] = static_cast<std::size_t>(std::max(0LL, fixed));
  return out;
}

struct SimConfig {
  std::vector<ContentGroup> groups;
  std::size_t provider_count = 1;
  std::vector<double> sizes;  // real-valued; rounded before use
  std::uint64_t warmup_requests = 0;  // 0 selects the default
  std::uint64_t measurement_requests = 1'000'000;
  std::uint64_t seed = 1;

  // Five times the largest partition per partition, at least 1e5 in total.
  std::uint64_t effective_warmup() const {
    if (warmup_requests > 0) return warmup_requests;
    std::uint64_t w = 0;
    for (double c : sizes) w += 5 * static_cast<std::uint64_t>(std::ceil(c));
    return std::max<std::uint64_t>(w, 100'000);
  }
};

inline HitCounters simulate(const SimConfig& config) {
  require(config.measurement_requests > 0, Errc::invalid_argument,
          "measurement window must be > 0");
  const auto sizes = round_sizes(config.sizes);
  PartitionedLru cache(config.groups, config.provider_count, sizes, config.seed);
  cache.run(config.effective_warmup());
  return cache.measure(config.measurement_requests);
}

// Exact LRU hit probability under independent references, by enumerating every stack order:
// Pr[i_1..i_n] = prod_j p_{i_j} / (1 - sum_{l<j} p_{i_l}) and a request hits when its file is in
// the top `capacity` positions.
inline double exact_small_lru(std::span<const double> p, std::size_t capacity) {
  const std::size_t n = p.size();
  require(n >= 1, Errc::invalid_argument, "need at least one file");
  require(n <= 8, Errc::too_large, "exact LRU enumeration is limited to 8 files");
  double total = 0.0;
  for (double v : p) {
    require(v >= 0.0, Errc::invalid_argument, "probabilities must be >= 0");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-9, Errc::normalization_failure,
          "probabilities must sum to 1");
  if (capacity >= n) return 1.0;
  if (capacity == 0) return 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double hit = 0.0;
  do {
    double prob = 1.0;
    double used = 0.0;
    double top = 0.0;
    for (std::size_t j = 0; j < n && prob > 0.0; ++j) {
      const double rest = 1.0 - used;
      const double pj = p[order[j]];
      // The last file's factor is 1 by construction; guard the 0/0 when rest underflows.
      prob *= rest > 0.0 ? pj / rest : 1.0;
      used += pj;
      if (j < capacity) top += pj;
    }
    hit += prob * top;
  } while (std::next_permutation(order.begin(), order.end()));
  return hit;
}

// Workload family that scales with n: provider k has mass_k * n files with Zipf(exponent_k)
// popularity and arrival rate rate_k. Either one LRU holds everything (fractions has one entry)
// or provider k gets a dedicated partition of fraction_k * n files.
struct ScalingWorkload {
  std::vector<double> exponents;
  std::vector<double> masses;
  std::vector<double> rates;
  std::vector<double> fractions;

  bool shared() const { return fractions.size() == 1 && exponents.size() > 1; }

  std::vector<ContentGroup> groups(std::size_t n) const {
    std::vector<Provider> providers;
    for (std::size_t k = 0; k < exponents.size(); ++k) {
      Provider p;
      p.arrival_rate = rates[k];
      p.popularity = ZipfPopularity{exponents[k],
                                    static_cast<std::size_t>(std::llround(masses[k] * n))};
      providers.push_back(p);
    }
    auto distinct = group_contents(distinct_workload(providers));
    if (!shared()) return distinct;
    // Collapse into one group served by everybody; files keep their own provider's rate.
    ContentGroup all;
    for (std::size_t k = 0; k < distinct.size(); ++k) all.serving.push_back(k);
    all.provider_rates.resize(distinct.size());
    for (const auto& g : distinct) {
      for (std::size_t i = 0; i < g.file_count(); ++i) {
        all.files.push_back({all.files.size(), 0});
        all.aggregate_rates.push_back(g.aggregate_rates[i]);
        for (std::size_t k = 0; k < distinct.size(); ++k)
          all.provider_rates[k].push_back(k == g.serving[0] ? g.aggregate_rates[i] : 0.0);
      }
    }
    return {all};
  }

  std::vector<double> sizes(std::size_t n) const {
    std::vector<double> s;
    for (double f : fractions) s.push_back(f * static_cast<double>(n));
    return s;
  }
};

struct CtSimRow {
  std::size_t n = 0;
  double ct_hit_probability = 0.0;
  double simulated_hit_probability = 0.0;
  double gap = 0.0;
  double standard_error = 0.0;
};

// CT-predicted versus simulated aggregate hit probability across catalog scales.
inline std::vector<CtSimRow> ct_vs_sim_report(const ScalingWorkload& workload,
                                              std::span<const std::size_t> n_grid,
                                              std::uint64_t requests, std::uint64_t seed) {
  std::vector<CtSimRow> rows;
  for (std::size_t n : n_grid) {
    const auto groups = workload.groups(n);
    const auto sizes = round_sizes(workload.sizes(n));
    double hits = 0.0, total = 0.0;
    for (std::size_t p = 0; p < groups.size(); ++p) {
      const auto& rates = groups[p].aggregate_rates;
      hits += saturating_hit_rate(rates, static_cast<double>(sizes[p]));
      for (double r : rates) total += r;
    }
    SimConfig cfg;
    cfg.groups = groups;
    cfg.provider_count = workload.exponents.size();
    cfg.sizes.assign(sizes.begin(), sizes.end());
    cfg.measurement_requests = requests;
    cfg.seed = seed;
    const auto counters = simulate(cfg);
    CtSimRow row;
    row.n = n;
    row.ct_hit_probability = hits / total;
    row.simulated_hit_probability = counters.hit_probability();
    row.gap = std::abs(row.ct_hit_probability - row.simulated_hit_probability);
    const double q = row.simulated_hit_probability;
    row.standard_error = std::sqrt(q * (1.0 - q) / static_cast<double>(requests));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cachepart::sim
