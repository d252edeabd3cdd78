#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "cachepart/catalog.hpp"
#include "cachepart/ct.hpp"
#include "cachepart/error.hpp"
#include "cachepart/projected_gradient.hpp"
#include "cachepart/utility.hpp"

namespace cachepart {

// Relative distance below a partition's file count at which a full partition's derivatives are
// evaluated.
inline constexpr double kSaturationGap = 1e-10;

// Evaluates per-provider hit rates of a partitioned cache where partition p holds content
// group p. Files nobody requests are dropped: they never enter an LRU under this model.
class GroupedCacheModel {
 public:
  GroupedCacheModel(std::span<const ContentGroup> groups, std::size_t provider_count)
      : provider_count_(provider_count) {
    for (const auto& g : groups) {
      Partition part;
      part.providers = g.serving;
      part.rates.resize(g.serving.size());
      for (std::size_t i = 0; i < g.file_count(); ++i) {
        if (!(g.aggregate_rates[i] > 0.0)) continue;
        part.aggregate.push_back(g.aggregate_rates[i]);
        for (std::size_t m = 0; m < g.serving.size(); ++m)
          part.rates[m].push_back(g.provider_rates[m][i]);
      }
      for (std::size_t k : g.serving)
        require(k < provider_count, Errc::invalid_argument, "group serves an unknown provider");
      partitions_.push_back(std::move(part));
    }
  }

  std::size_t partition_count() const { return partitions_.size(); }
  std::size_t provider_count() const { return provider_count_; }

  // Largest useful size of each partition: its number of requested files.
  std::vector<double> upper_bounds() const {
    std::vector<double> u;
    for (const auto& p : partitions_) u.push_back(static_cast<double>(p.aggregate.size()));
    return u;
  }

  double catalog_size() const {
    const auto u = upper_bounds();
    return std::accumulate(u.begin(), u.end(), 0.0);
  }

  struct Evaluation {
    std::vector<double> time;                      // per partition CT (inf when saturated)
    std::vector<double> provider_hits;             // h_k
    std::vector<std::vector<double>> hits;         // h_kp, K x P
    std::vector<std::vector<double>> marginal;     // dh_kp / dC_p, K x P
    std::vector<std::vector<double>> curvature;    // d2h_kp / dC_p^2, K x P
  };

  Evaluation evaluate(std::span<const double> sizes, double rel_tol = kDefaultCtTolerance) const {
    require(sizes.size() == partitions_.size(), Errc::invalid_argument,
            "one size per partition required");
    Evaluation e;
    e.provider_hits.assign(provider_count_, 0.0);
    e.hits.assign(provider_count_, std::vector<double>(partitions_.size(), 0.0));
    e.marginal = e.hits;
    e.curvature = e.hits;
    for (std::size_t p = 0; p < partitions_.size(); ++p) {
      const auto& part = partitions_[p];
      const std::size_t n = part.aggregate.size();
      require(sizes[p] >= 0.0, Errc::invalid_argument, "partition sizes must be >= 0");
      if (n == 0) {
        e.time.push_back(0.0);
        continue;
      }
      // A full partition hits everything. Its derivatives are taken just below the cap: the
      // exact left limit only emerges once n - C drops under ~1e-20 for Zipf tails, far beyond
      // what a double can resolve, so using it would put a jump at the bound.
      const bool full = sizes[p] >= static_cast<double>(n);
      const double c_eval = full ? static_cast<double>(n) * (1.0 - kSaturationGap) : sizes[p];
      const double t = detail::solve_time(part.aggregate, c_eval, rel_tol);
      e.time.push_back(full ? std::numeric_limits<double>::infinity() : t);
      // With B = sum r e^{-rT}, A = sum rho r e^{-rT} and dT/dC = 1/B:
      // h' = A / B and h'' = (A sum r^2 e^{-rT} - B sum rho r^2 e^{-rT}) / B^3.
      double den = 0.0, den2 = 0.0;
      std::vector<double> q(n), ex(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = part.aggregate[i];
        const double x = r * t;
        q[i] = detail::one_minus_exp(x);
        ex[i] = std::exp(-x);
        den += r * ex[i];
        den2 += r * r * ex[i];
      }
      for (std::size_t m = 0; m < part.providers.size(); ++m) {
        const std::size_t k = part.providers[m];
        double h = 0.0, num = 0.0, num2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double r = part.aggregate[i];
          h += part.rates[m][i] * q[i];
          num += part.rates[m][i] * r * ex[i];
          num2 += part.rates[m][i] * r * r * ex[i];
        }
        if (full) {
          h = 0.0;
          for (double r : part.rates[m]) h += r;
        }
        e.hits[k][p] = h;
        e.marginal[k][p] = num / den;
        e.curvature[k][p] = (num * den2 - den * num2) / (den * den * den);
      }
    }
    for (std::size_t k = 0; k < provider_count_; ++k)
      for (double h : e.hits[k]) e.provider_hits[k] += h;
    return e;
  }

  // All requested files of all groups in one LRU: the CT and each partition's share of it.
  std::vector<double> sharing_sizes(double capacity) const {
    std::vector<double> all;
    for (const auto& p : partitions_) all.insert(all.end(), p.aggregate.begin(), p.aggregate.end());
    const double t = detail::solve_time(all, capacity, kDefaultCtTolerance);
    std::vector<double> sizes;
    for (const auto& p : partitions_) {
      double c = 0.0;
      for (double r : p.aggregate) c += detail::one_minus_exp(r * t);
      sizes.push_back(c);
    }
    return sizes;
  }

  // Per-provider hit rates when every group shares one LRU of the given capacity.
  std::vector<double> shared_hit_rates(double capacity) const {
    std::vector<double> all;
    for (const auto& p : partitions_) all.insert(all.end(), p.aggregate.begin(), p.aggregate.end());
    const double t = detail::solve_time(all, capacity, kDefaultCtTolerance);
    std::vector<double> h(provider_count_, 0.0);
    for (const auto& p : partitions_)
      for (std::size_t m = 0; m < p.providers.size(); ++m)
        for (std::size_t i = 0; i < p.aggregate.size(); ++i)
          h[p.providers[m]] += p.rates[m][i] * detail::one_minus_exp(p.aggregate[i] * t);
    return h;
  }

  std::vector<double> all_aggregate_rates() const {
    std::vector<double> all;
    for (const auto& p : partitions_) all.insert(all.end(), p.aggregate.begin(), p.aggregate.end());
    return all;
  }

 private:
  struct Partition {
    std::vector<std::size_t> providers;
    std::vector<double> aggregate;
    std::vector<std::vector<double>> rates;
  };
  std::size_t provider_count_;
  std::vector<Partition> partitions_;
};

struct PartitionPlan {
  std::vector<ContentGroup> groups;
  std::vector<double> sizes;
  double capacity = 0.0;
};

struct OptimumReport {
  PartitionPlan plan;
  std::vector<double> hit_rates;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

struct OptimizerOptions {
  double kkt_tolerance = 1e-6;
  int max_iterations = 100000;
};

inline std::size_t provider_count_of(std::span<const ContentGroup> groups) {
  std::size_t k = 0;
  for (const auto& g : groups)
    for (std::size_t p : g.serving) k = std::max(k, p + 1);
  return k;
}

// Sum of weighted utilities and its gradient in the partition sizes. When `curv` is non-empty it
// receives the diagonal of the negated Hessian, using U'' = -alpha U' / h. `unshifted` drops the
// constant terms of U, which the solver needs for large alpha.
inline double grouped_objective(const GroupedCacheModel& model,
                                std::span<const UtilitySpec> utilities,
                                std::span<const double> sizes, std::span<double> grad,
                                std::span<double> curv = {}, bool unshifted = false) {
  const auto e = model.evaluate(sizes);
  double f = 0.0;
  std::fill(grad.begin(), grad.end(), 0.0);
  std::fill(curv.begin(), curv.end(), 0.0);
  for (std::size_t k = 0; k < utilities.size(); ++k) {
    if (utilities[k].weight == 0.0) continue;
    const double h = e.provider_hits[k];
    const double u = unshifted ? u_eval_unshifted(utilities[k], h) : u_eval_or_neg_inf(utilities[k], h);
    f += u;
    if (!std::isfinite(u)) continue;
    const double du = u_prime(utilities[k], h);
    const double a = utilities[k].effective_alpha();
    for (std::size_t p = 0; p < sizes.size(); ++p) {
      grad[p] += du * e.marginal[k][p];
      if (!curv.empty()) {
        const double m = e.marginal[k][p];
        curv[p] += du * ((a > 0.0 ? a * m * m / h : 0.0) - e.curvature[k][p]);
      }
    }
  }
  return f;
}

inline double evaluate_objective(std::span<const ContentGroup> groups,
                                 std::span<const UtilitySpec> utilities,
                                 std::span<const double> sizes) {
  const GroupedCacheModel model(groups, utilities.size());
  std::vector<double> g(sizes.size());
  return grouped_objective(model, utilities, sizes, g);
}

namespace detail {

inline OptimumReport finish_report(std::span<const ContentGroup> groups,
                                   const GroupedCacheModel& model,
                                   std::span<const UtilitySpec> utilities, double capacity,
                                   std::vector<double> sizes, double kkt, int iterations) {
  OptimumReport r;
  r.plan.groups.assign(groups.begin(), groups.end());
  r.plan.capacity = capacity;
  r.hit_rates = model.evaluate(sizes).provider_hits;
  std::vector<double> g(sizes.size());
  r.objective = grouped_objective(model, utilities, sizes, g);
  r.plan.sizes = std::move(sizes);
  r.kkt_residual = kkt;
  r.iterations = iterations;
  return r;
}

}  // namespace detail

// Maximizes sum_k w_k U_k(h_k) over partition sizes with sum C_p <= capacity, from `start`.
inline OptimumReport optimize_grouped_from(std::span<const ContentGroup> groups,
                                           std::span<const UtilitySpec> utilities,
                                           double capacity, std::span<const double> start,
                                           const OptimizerOptions& options = {}) {
  require(capacity > 0.0 && std::isfinite(capacity), Errc::invalid_argument,
          "capacity must be > 0");
  require(provider_count_of(groups) <= utilities.size(), Errc::invalid_argument,
          "one utility per provider required");
  for (const auto& u : utilities) u.validate();
  const GroupedCacheModel model(groups, utilities.size());
  const auto upper = model.upper_bounds();
  if (model.catalog_size() <= capacity)
    return detail::finish_report(groups, model, utilities, capacity, upper, 0.0, 0);

  auto eval = [&](std::span<const double> x, std::span<double> g, std::span<double> c) {
    return grouped_objective(model, utilities, x, g, c, true);
  };
  AscentOptions opts;
  opts.kkt_tolerance = options.kkt_tolerance;
  opts.max_iterations = options.max_iterations;
  const auto res = scaled_projected_ascent(eval, start, upper, capacity, opts);
  if (!res.converged)
    fail(Errc::no_convergence, "partition sizing stopped with KKT residual " +
                                   std::to_string(res.kkt) + " after " +
                                   std::to_string(res.iterations) + " iterations");
  return detail::finish_report(groups, model, utilities, capacity, res.x, res.kkt,
                               res.iterations);
}

// Sizes reproducing a single shared LRU of the given capacity: C_p = sum_{i in p} (1 - e^{-r_i T})
// with T the shared cache's characteristic time.
inline PartitionPlan sharing_equivalent_plan(std::span<const ContentGroup> groups,
                                             double capacity) {
  const GroupedCacheModel model(groups, provider_count_of(groups));
  PartitionPlan plan;
  plan.groups.assign(groups.begin(), groups.end());
  plan.capacity = capacity;
  plan.sizes = model.sharing_sizes(capacity);
  return plan;
}

// Problem over grouped content. Starts from the sharing-equivalent sizes, which are interior.
inline OptimumReport optimize_grouped(std::span<const ContentGroup> groups,
                                      std::span<const UtilitySpec> utilities, double capacity,
                                      const OptimizerOptions& options = {}) {
  const GroupedCacheModel model(groups, utilities.size());
  if (model.catalog_size() <= capacity)
    return optimize_grouped_from(groups, utilities, capacity, model.upper_bounds(), options);
  const auto start = model.sharing_sizes(capacity);
  return optimize_grouped_from(groups, utilities, capacity, start, options);
}

inline std::vector<UtilitySpec> utilities_of(const std::vector<Provider>& providers) {
  std::vector<UtilitySpec> u;
  for (const auto& p : providers) u.push_back(p.utility);
  return u;
}

// One dedicated partition per provider.
inline OptimumReport optimize_distinct(const std::vector<Provider>& providers, double capacity,
                                       const OptimizerOptions& options = {}) {
  const auto groups = group_contents(distinct_workload(providers));
  const auto utilities = utilities_of(providers);
  return optimize_grouped(groups, utilities, capacity, options);
}

inline PartitionPlan sharing_equivalent_plan(const std::vector<Provider>& providers,
                                             double capacity) {
  return sharing_equivalent_plan(group_contents(distinct_workload(providers)), capacity);
}

// Best per-object allocation: the `capacity` most requested files, regardless of provider.
inline double static_caching_baseline(std::span<const ContentGroup> groups, std::size_t capacity) {
  std::vector<double> rates;
  for (const auto& g : groups) rates.insert(rates.end(), g.aggregate_rates.begin(), g.aggregate_rates.end());
  require(capacity <= rates.size(), Errc::invalid_argument, "capacity exceeds the catalog");
  std::partial_sort(rates.begin(), rates.begin() + static_cast<std::ptrdiff_t>(capacity),
                    rates.end(), std::greater<>());
  double h = 0.0;
  for (std::size_t i = 0; i < capacity; ++i) h += rates[i];
  return h;
}

// Hit rate when requests for a single catalog are split at random, fraction p to a partition of
// size c1 and the rest to one of size capacity - c1. Each side sees thinned rates.
inline double probabilistic_routing_value(std::span<const double> rates, double capacity,
                                          double c1, double p) {
  require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "routing probability must be in [0,1]");
  require(c1 >= 0.0 && c1 <= capacity, Errc::invalid_argument, "split must lie in [0, C]");
  detail::check_rates(rates);
  auto side = [&](double share, double size) {
    if (share == 0.0) return 0.0;
    std::vector<double> thinned(rates.begin(), rates.end());
    for (double& r : thinned) r *= share;
    return saturating_hit_rate(thinned, size);
  };
  return side(p, c1) + side(1.0 - p, capacity - c1);
}

struct MarketResult {
  std::vector<double> weights;
  OptimumReport allocation;
  double residual = 0.0;
  int rounds = 0;
  bool converged = false;
};

// Provider k's payment maximizing U_k(w / price) - w. A provider can never be served more than
// its arrival rate, so w is searched on [0, price * arrival_rate].
inline double market_best_response(const UtilitySpec& utility, double price, double arrival_rate) {
  require(price > 0.0, Errc::invalid_argument, "price must be > 0");
  const double hi_w = price * arrival_rate;
  auto slope = [&](double w) { return u_prime(utility, w / price) / price - 1.0; };
  if (slope(hi_w) >= 0.0) return hi_w;
  double lo = 0.0, hi = hi_w;
  if (utility.effective_alpha() == 0.0) return 0.0;  // constant slope, negative here
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Providers keep their utilities private and bid w_k against a posted price; the cache then
// solves the weighted proportional-fair problem sum w_k log h_k with those bids.
inline MarketResult market_iteration(std::span<const ContentGroup> groups,
                                     std::span<const UtilitySpec> private_utilities,
                                     std::span<const double> arrival_rates, double price,
                                     double capacity, int rounds, double tolerance = 1e-9) {
  require(price > 0.0, Errc::invalid_argument, "price must be > 0");
  require(rounds >= 1, Errc::invalid_argument, "need at least one round");
  const std::size_t k_count = private_utilities.size();
  MarketResult out;
  out.weights.assign(k_count, 0.0);
  for (out.rounds = 1; out.rounds <= rounds; ++out.rounds) {
    std::vector<double> bids(k_count);
    for (std::size_t k = 0; k < k_count; ++k)
      bids[k] = market_best_response(private_utilities[k], price, arrival_rates[k]);
    std::vector<UtilitySpec> network;
    for (double w : bids) network.push_back(UtilitySpec::logarithmic(w));
    out.allocation = optimize_grouped(groups, network, capacity);
    out.residual = 0.0;
    for (std::size_t k = 0; k < k_count; ++k)
      out.residual = std::max(out.residual, std::abs(bids[k] - out.weights[k]));
    out.weights = std::move(bids);
    if (out.rounds > 1 && out.residual <= tolerance) {
      out.converged = true;
      return out;
    }
  }
  if (!out.converged)
    fail(Errc::no_convergence, "market bids did not settle within the round budget");
  return out;
}

}  // namespace cachepart
