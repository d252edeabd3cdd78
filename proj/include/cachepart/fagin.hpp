#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cachepart/catalog.hpp"
#include "cachepart/error.hpp"
#include "cachepart/projected_gradient.hpp"

namespace cachepart::fagin {

// Fraction of a catalog held at normalized window tau: sum over segments w (1 - e^{-s tau}).
inline double beta_of_tau(const PiecewiseCdf& F, double tau) {
  require(tau >= 0.0, Errc::invalid_argument, "tau must be >= 0");
  double b = 0.0;
  for (const auto& seg : F.segments()) b += seg.width() * -std::expm1(-seg.slope * tau);
  return b;
}

// Limiting LRU miss probability at tau: sum over segments w s e^{-s tau}.
inline double mu_of_tau(const PiecewiseCdf& F, double tau) {
  require(tau >= 0.0, Errc::invalid_argument, "tau must be >= 0");
  double m = 0.0;
  for (const auto& seg : F.segments()) m += seg.width() * seg.slope * std::exp(-seg.slope * tau);
  return m;
}

// Supremum of beta over tau: the mass of segments with positive slope.
inline double beta_supremum(const PiecewiseCdf& F) {
  double b = 0.0;
  for (const auto& seg : F.segments())
    if (seg.slope > 0.0) b += seg.width();
  return b;
}

namespace detail {

// Root of an increasing map g with g(0) = 0 and g(inf) = sup > target.
inline double solve_increasing(const std::function<double(double)>& g, double target,
                               double sup) {
  require(target >= 0.0, Errc::invalid_argument, "target must be >= 0");
  if (target == 0.0) return 0.0;
  require(target < sup, Errc::no_convergence,
          "target " + std::to_string(target) + " is not reachable (supremum " +
              std::to_string(sup) + ")");
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (g(hi) < target) {
    lo = hi;
    hi *= 2.0;
    require(++guard < 2000, Errc::no_convergence, "could not bracket tau");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < target) lo = mid; else hi = mid;
  }
  const double tau = 0.5 * (lo + hi);
  require(std::abs(g(tau) - target) <= 1e-10 * std::max(target, 1e-300) ||
              hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi,
          Errc::no_convergence, "tau bisection did not reach the residual tolerance");
  return tau;
}

}  // namespace detail

// tau_0 with beta_of_tau(F, tau_0) = beta.
inline double solve_tau(const PiecewiseCdf& F, double beta) {
  require(beta >= 0.0 && beta < 1.0, Errc::invalid_argument, "beta must lie in [0, 1)");
  return detail::solve_increasing([&](double t) { return beta_of_tau(F, t); }, beta,
                                  beta_supremum(F));
}

// Provider class of an asymptotic shared cache: CDF, content mass b_k (files b_k n) and rate
// share a_k = lambda_k / lambda.
struct AsymptoticClass {
  PiecewiseCdf cdf;
  double mass = 1.0;
  double rate_share = 1.0;
};

struct AsymptoticWorkload {
  std::vector<AsymptoticClass> classes;
  double beta = 0.5;

  double total_mass() const {
    double b = 0.0;
    for (const auto& c : classes) b += c.mass;
    return b;
  }

  void validate() const {
    require(!classes.empty(), Errc::invalid_argument, "workload needs at least one class");
    double a = 0.0;
    for (const auto& c : classes) {
      require(c.mass >= 1.0, Errc::invalid_argument, "class masses must be >= 1");
      require(c.rate_share > 0.0, Errc::invalid_argument, "rate shares must be > 0");
      a += c.rate_share;
    }
    require(std::abs(a - 1.0) <= 1e-12, Errc::invalid_argument, "rate shares must sum to 1");
    require(beta >= 0.0 && beta < 1.0, Errc::invalid_argument, "beta must lie in [0, 1)");
  }
};

// beta^(s)(tau) = 1 - sum_k (b_k/B) int e^{-a_k F'_k tau B / b_k}.
inline double shared_beta(const AsymptoticWorkload& w, double tau) {
  const double big_b = w.total_mass();
  double b = 0.0;
  for (const auto& c : w.classes) {
    const double scale = c.rate_share * big_b / c.mass;
    for (const auto& seg : c.cdf.segments())
      b += (c.mass / big_b) * seg.width() * -std::expm1(-seg.slope * scale * tau);
  }
  return b;
}

// mu^(s)(tau) = sum_k a_k int F'_k e^{-a_k F'_k tau B / b_k}.
inline double shared_mu(const AsymptoticWorkload& w, double tau) {
  const double big_b = w.total_mass();
  double m = 0.0;
  for (const auto& c : w.classes) {
    const double scale = c.rate_share * big_b / c.mass;
    for (const auto& seg : c.cdf.segments())
      m += c.rate_share * seg.width() * seg.slope * std::exp(-seg.slope * scale * tau);
  }
  return m;
}

inline double solve_tau(const AsymptoticWorkload& w, double beta) {
  require(beta >= 0.0 && beta < 1.0, Errc::invalid_argument, "beta must lie in [0, 1)");
  const double big_b = w.total_mass();
  double sup = 0.0;
  for (const auto& c : w.classes) sup += (c.mass / big_b) * beta_supremum(c.cdf);
  return detail::solve_increasing([&](double t) { return shared_beta(w, t); }, beta, sup);
}

struct SharedLimit {
  double tau = 0.0;
  double miss_probability = 0.0;
};

inline SharedLimit shared_limit(const AsymptoticWorkload& w) {
  w.validate();
  SharedLimit out;
  out.tau = solve_tau(w, w.beta);
  out.miss_probability = shared_mu(w, out.tau);
  return out;
}

// Single CDF for the shared cache: class k occupies [B_{k-1}/B, B_k/B] with
// F(x) = A_{k-1} + a_k F_k(B x / b_k - B_{k-1} / b_k).
inline PiecewiseCdf merged_cdf(const AsymptoticWorkload& w) {
  w.validate();
  const double big_b = w.total_mass();
  std::vector<double> xs{0.0};
  std::vector<double> fs{0.0};
  double mass_before = 0.0;
  double share_before = 0.0;
  for (std::size_t k = 0; k < w.classes.size(); ++k) {
    const auto& c = w.classes[k];
    const auto& bx = c.cdf.breakpoints();
    const auto& bf = c.cdf.values();
    for (std::size_t j = 1; j < bx.size(); ++j) {
      xs.push_back((mass_before + c.mass * bx[j]) / big_b);
      fs.push_back(share_before + c.rate_share * bf[j]);
    }
    mass_before += c.mass;
    share_before += c.rate_share;
  }
  xs.back() = 1.0;
  fs.back() = 1.0;
  return {std::move(xs), std::move(fs)};
}

// Same limit computed through the merged CDF instead of the per-class sum.
inline SharedLimit shared_limit_via_merged_cdf(const AsymptoticWorkload& w) {
  const PiecewiseCdf F = merged_cdf(w);
  SharedLimit out;
  out.tau = solve_tau(F, w.beta);
  out.miss_probability = mu_of_tau(F, out.tau);
  return out;
}

// Dedicated partitions that mimic the shared cache: tau_k = a_k B tau_0 / b_k. Returns the per
// class cached fractions beta_k and miss probabilities mu_k(tau_k).
struct PartitionedEquivalent {
  std::vector<double> tau;
  std::vector<double> beta;
  std::vector<double> miss;
};

inline PartitionedEquivalent sharing_equivalent_split(const AsymptoticWorkload& w) {
  const SharedLimit shared = shared_limit(w);
  const double big_b = w.total_mass();
  PartitionedEquivalent out;
  for (const auto& c : w.classes) {
    const double tau = c.rate_share * big_b * shared.tau / c.mass;
    out.tau.push_back(tau);
    out.beta.push_back(beta_of_tau(c.cdf, tau));
    out.miss.push_back(mu_of_tau(c.cdf, tau));
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Two providers with a common content set: sharing (S1), one partition per provider (S2), and
// a third partition dedicated to the common content (S3).

enum class Strategy { s1, s2, s3 };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::s1: return "S1";
    case Strategy::s2: return "S2";
    case Strategy::s3: return "S3";
  }
  return "?";
}

// Sets S0 (common, mass b0) and S1, S2 (mass b1, b2). beta is the cache size as a fraction of
// the b0 + b1 + b2 distinct contents; every strategy gets the same absolute cache.
struct SharedSetWorkload {
  std::array<PiecewiseCdf, 2> shared_cdf;
  std::array<double, 2> shared_rate{1.0, 1.0};
  std::array<PiecewiseCdf, 2> own_cdf;
  std::array<double, 2> own_rate{1.0, 1.0};
  double shared_mass = 1.0;
  std::array<double, 2> own_mass{1.0, 1.0};
  double beta = 0.5;

  double total_mass() const { return shared_mass + own_mass[0] + own_mass[1]; }
  double total_rate() const { return shared_rate[0] + shared_rate[1] + own_rate[0] + own_rate[1]; }

  void validate() const {
    require(shared_mass > 0.0 && own_mass[0] > 0.0 && own_mass[1] > 0.0, Errc::invalid_argument,
            "content masses must be > 0");
    for (double r : {shared_rate[0], shared_rate[1], own_rate[0], own_rate[1]})
      require(r >= 0.0 && std::isfinite(r), Errc::invalid_argument, "rates must be >= 0");
    require(total_rate() > 0.0, Errc::invalid_argument, "total rate must be > 0");
    require(beta >= 0.0 && beta < 1.0, Errc::invalid_argument, "beta must lie in [0, 1)");
  }

  bool operator==(const SharedSetWorkload&) const = default;
};

// One LRU partition in the limit: content blocks of mass b, each requested by one or more
// streams. Per-file rate of the block at position x is sum_s rate_s F'_s(x) / b (times 1/n).
class LimitPartition {
 public:
  struct Stream {
    std::size_t provider;
    double rate;
    PiecewiseCdf cdf;
  };

  void add_block(double mass, std::vector<Stream> streams) {
    Block block{mass, {}, {}};
    std::vector<double> cuts;
    for (const auto& s : streams)
      for (double x : s.cdf.breakpoints()) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      Piece piece{cuts[j + 1] - cuts[j], 0.0, {}};
      const double mid = 0.5 * (cuts[j] + cuts[j + 1]);
      for (const auto& s : streams) {
        const double d = s.rate * s.cdf.density(mid);
        piece.stream_density.push_back(d);
        piece.density += d;
      }
      block.pieces.push_back(std::move(piece));
    }
    for (const auto& s : streams) block.providers.push_back(s.provider);
    blocks_.push_back(std::move(block));
  }

  // Occupancy (units of n) at normalized time t.
  double occupancy(double t) const {
    double c = 0.0;
    for (const auto& b : blocks_)
      for (const auto& p : b.pieces) c += b.mass * p.width * -std::expm1(-p.density * t / b.mass);
    return c;
  }

  double max_occupancy() const {
    double c = 0.0;
    for (const auto& b : blocks_)
      for (const auto& p : b.pieces)
        if (p.density > 0.0) c += b.mass * p.width;
    return c;
  }

  double total_rate() const {
    double r = 0.0;
    for (const auto& b : blocks_)
      for (const auto& p : b.pieces) r += p.width * p.density;
    return r;
  }

  struct Evaluation {
    double tau = 0.0;
    double hits = 0.0;
    double marginal = 0.0;  // d hits / d capacity
    std::vector<double> provider_hits;
  };

  Evaluation evaluate(double capacity, std::size_t provider_count) const {
    Evaluation e;
    e.provider_hits.assign(provider_count, 0.0);
    const double cap = max_occupancy();
    if (capacity >= cap) {
      e.tau = std::numeric_limits<double>::infinity();
      for (const auto& b : blocks_)
        for (const auto& p : b.pieces)
          for (std::size_t s = 0; s < b.providers.size(); ++s)
            e.provider_hits[b.providers[s]] += p.width * p.stream_density[s];
      for (double h : e.provider_hits) e.hits += h;
      // Left limit: the least requested cached piece dominates as tau grows.
      e.marginal = std::numeric_limits<double>::infinity();
      for (const auto& b : blocks_)
        for (const auto& p : b.pieces)
          if (p.density > 0.0) e.marginal = std::min(e.marginal, p.density / b.mass);
      if (!std::isfinite(e.marginal)) e.marginal = 0.0;
      return e;
    }
    e.tau = capacity <= 0.0 ? 0.0
                            : detail::solve_increasing([&](double t) { return occupancy(t); },
                                                       capacity, cap);
    double dh = 0.0;
    double dc = 0.0;
    for (const auto& b : blocks_)
      for (const auto& p : b.pieces) {
        const double x = p.density * e.tau / b.mass;
        const double q = -std::expm1(-x);
        const double ex = std::exp(-x);
        for (std::size_t s = 0; s < b.providers.size(); ++s)
          e.provider_hits[b.providers[s]] += p.width * p.stream_density[s] * q;
        dh += p.width * p.density * p.density / b.mass * ex;
        dc += p.width * p.density * ex;
      }
    for (double h : e.provider_hits) e.hits += h;
    e.marginal = dc > 0.0 ? dh / dc : 0.0;
    return e;
  }

 private:
  struct Piece {
    double width;
    double density;
    std::vector<double> stream_density;
  };
  struct Block {
    double mass;
    std::vector<Piece> pieces;
    std::vector<std::size_t> providers;
  };
  std::vector<Block> blocks_;
};

// Partitions used by a strategy, in split order: S1 {all}; S2 {provider 1, provider 2};
// S3 {common, own 1, own 2}.
inline std::vector<LimitPartition> strategy_partitions(const SharedSetWorkload& w,
                                                       Strategy strategy) {
  using Stream = LimitPartition::Stream;
  auto shared_streams = [&] {
    std::vector<Stream> s;
    for (std::size_t k = 0; k < 2; ++k)
      if (w.shared_rate[k] > 0.0) s.push_back({k, w.shared_rate[k], w.shared_cdf[k]});
    return s;
  };
  auto own_block = [&](LimitPartition& part, std::size_t k) {
    std::vector<Stream> s;
    if (w.own_rate[k] > 0.0) s.push_back({k, w.own_rate[k], w.own_cdf[k]});
    part.add_block(w.own_mass[k], std::move(s));
  };
  std::vector<LimitPartition> parts;
  switch (strategy) {
    case Strategy::s1: {
      LimitPartition all;
      all.add_block(w.shared_mass, shared_streams());
      own_block(all, 0);
      own_block(all, 1);
      parts.push_back(std::move(all));
      break;
    }
    case Strategy::s2: {
      for (std::size_t k = 0; k < 2; ++k) {
        LimitPartition part;
        std::vector<Stream> s;
        if (w.shared_rate[k] > 0.0) s.push_back({k, w.shared_rate[k], w.shared_cdf[k]});
        part.add_block(w.shared_mass, std::move(s));
        own_block(part, k);
        parts.push_back(std::move(part));
      }
      break;
    }
    case Strategy::s3: {
      LimitPartition common;
      common.add_block(w.shared_mass, shared_streams());
      parts.push_back(std::move(common));
      for (std::size_t k = 0; k < 2; ++k) {
        LimitPartition part;
        own_block(part, k);
        parts.push_back(std::move(part));
      }
      break;
    }
  }
  return parts;
}

struct StrategyResult {
  Strategy strategy = Strategy::s1;
  std::vector<double> tau;           // per partition, normalized by n
  std::vector<double> split;         // per partition cache fraction (of total distinct mass)
  std::array<double, 2> miss{1.0, 1.0};  // per provider miss probability
  double hit_probability = 0.0;      // aggregate
};

inline std::size_t partition_count(Strategy s) {
  return s == Strategy::s1 ? 1 : s == Strategy::s2 ? 2 : 3;
}

inline StrategyResult evaluate_strategy(const SharedSetWorkload& w, Strategy strategy,
                                        std::span<const double> split) {
  w.validate();
  require(split.size() == partition_count(strategy), Errc::infeasible_split,
          "split has the wrong number of partitions");
  double used = 0.0;
  for (double b : split) {
    require(b >= 0.0, Errc::infeasible_split, "split fractions must be >= 0");
    used += b;
  }
  require(used <= w.beta * (1.0 + 1e-12) + 1e-15, Errc::infeasible_split,
          "split exceeds the cache fraction beta");
  const auto parts = strategy_partitions(w, strategy);
  const double mass = w.total_mass();
  StrategyResult r;
  r.strategy = strategy;
  r.split.assign(split.begin(), split.end());
  std::array<double, 2> hits{0.0, 0.0};
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto e = parts[p].evaluate(split[p] * mass, 2);
    r.tau.push_back(e.tau);
    hits[0] += e.provider_hits[0];
    hits[1] += e.provider_hits[1];
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const double rate = w.shared_rate[k] + w.own_rate[k];
    r.miss[k] = rate > 0.0 ? 1.0 - hits[k] / rate : 0.0;
  }
  r.hit_probability = (hits[0] + hits[1]) / w.total_rate();
  return r;
}

// Maximizes the aggregate hit probability over splits summing to beta, by projected gradient
// from 8 deterministic starts. The best start wins; ties go to the earliest.
inline StrategyResult optimize_strategy(const SharedSetWorkload& w, Strategy strategy) {
  w.validate();
  const std::size_t dim = partition_count(strategy);
  if (dim == 1) {
    const std::array<double, 1> all{w.beta};
    return evaluate_strategy(w, strategy, all);
  }
  const auto parts = strategy_partitions(w, strategy);
  const double mass = w.total_mass();
  const double rate = w.total_rate();
  std::vector<double> upper(dim);
  double cap = 0.0;
  for (std::size_t p = 0; p < dim; ++p) {
    upper[p] = parts[p].max_occupancy() / mass;
    cap += upper[p];
  }
  const double total = std::min(w.beta, cap);
  auto eval = [&](std::span<const double> x, std::span<double> g) {
    double h = 0.0;
    for (std::size_t p = 0; p < dim; ++p) {
      const auto e = parts[p].evaluate(x[p] * mass, 2);
      h += e.hits;
      g[p] = e.marginal * mass / rate;
    }
    return h / rate;
  };

  std::vector<std::vector<double>> starts;
  for (std::size_t p = 0; p < dim; ++p) {
    std::vector<double> v(dim, 0.0);
    v[p] = 1.0;
    starts.push_back(v);
  }
  starts.emplace_back(dim, 1.0 / static_cast<double>(dim));
  std::mt19937 rng(20160622u);
  std::exponential_distribution<double> expo(1.0);
  while (starts.size() < 8) {
    std::vector<double> v(dim);
    double s = 0.0;
    for (double& x : v) s += (x = expo(rng));
    for (double& x : v) x /= s;
    starts.push_back(v);
  }

  AscentResult best;
  bool have = false;
  AscentOptions opts;
  opts.kkt_tolerance = 1e-9;
  opts.max_iterations = 5000;
  for (auto& v : starts) {
    for (double& x : v) x *= total;
    const auto res = projected_gradient_ascent(eval, v, upper, total, opts);
    if (!have || res.value > best.value) {
      best = res;
      have = true;
    }
  }
  return evaluate_strategy(w, strategy, best.x);
}

// Workload from the text where S2 beats S3 at beta = 2/3.
inline SharedSetWorkload s2_over_s3_counterexample() {
  SharedSetWorkload w;
  w.shared_cdf[0] = PiecewiseCdf::from_slopes({0.5, 0.5}, {2.0 / 11.0, 20.0 / 11.0});
  w.shared_cdf[1] = PiecewiseCdf::from_slopes({0.5, 0.5}, {300.0 / 151.0, 2.0 / 151.0});
  w.shared_rate = {1.1, 15.1};
  w.own_cdf = {PiecewiseCdf::uniform(), PiecewiseCdf::uniform()};
  w.own_rate = {20.0, 30.0};
  w.shared_mass = 1.0;
  w.own_mass = {1.0, 1.0};
  w.beta = 2.0 / 3.0;
  return w;
}

}  // namespace cachepart::fagin
