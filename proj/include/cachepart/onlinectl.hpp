#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "cachepart/catalog.hpp"
#include "cachepart/error.hpp"
#include "cachepart/lrusim.hpp"
#include "cachepart/optimizer.hpp"
#include "cachepart/projected_gradient.hpp"
#include "cachepart/utility.hpp"

namespace cachepart::online {

enum class StepSchedule { constant, diminishing };

struct ControllerConfig {
  double step = 1.0;                // gamma, or gamma_0 for the diminishing schedule
  double tolerance = 1e-9;          // stop when max(delta - eta) <= tolerance
  double floor = 1.0;               // smallest partition, in files
  double bootstrap_fraction = 0.01; // first move, as a fraction of the total
  StepSchedule schedule = StepSchedule::constant;
  double schedule_horizon = 100.0;  // gamma_t = gamma_0 / (1 + t / horizon)
  std::uint64_t window_requests = 200'000;
  double max_move = 0.0;            // cap on max |Delta_p| as a fraction of the total; 0 = none

  double step_at(int iteration) const {
    if (schedule == StepSchedule::constant) return step;
    return step / (1.0 + static_cast<double>(iteration) / schedule_horizon);
  }

  void validate() const {
    require(step > 0.0 && std::isfinite(step), Errc::invalid_argument, "step must be > 0");
    require(tolerance >= 0.0, Errc::invalid_argument, "tolerance must be >= 0");
    require(floor >= 0.0, Errc::invalid_argument, "floor must be >= 0");
    require(bootstrap_fraction > 0.0 && bootstrap_fraction < 1.0, Errc::invalid_argument,
            "bootstrap fraction must lie in (0,1)");
    require(schedule_horizon > 0.0, Errc::invalid_argument, "schedule horizon must be > 0");
    require(window_requests > 0, Errc::invalid_argument, "window must be > 0");
    require(max_move >= 0.0 && max_move < 1.0, Errc::invalid_argument,
            "max_move must lie in [0,1)");
  }

  bool operator==(const ControllerConfig&) const = default;
};

using HitMatrix = std::vector<std::vector<double>>;  // K x P

struct ControllerState {
  int iteration = 0;
  std::vector<double> sizes;
  std::vector<double> previous_sizes;
  std::vector<double> previous_hits;  // h_k at previous_sizes (distinct controller)
  HitMatrix previous_matrix;          // h_kp at previous_sizes (grouped controller)
  std::vector<double> delta;          // last accepted per-partition marginals
  std::vector<double> upper;          // per-partition size caps; empty = none
  ControllerConfig config;

  double total() const { return std::accumulate(sizes.begin(), sizes.end(), 0.0); }
};

struct StepResult {
  ControllerState state;
  bool converged = false;
  std::vector<double> delta;
  double eta = 0.0;
};

// Raises sizes below the floor to it and takes the excess back from the others in proportion
// to their room above the floor, so the total is unchanged.
inline std::vector<double> apply_floor(std::vector<double> sizes, double floor, double total) {
  const double n = static_cast<double>(sizes.size());
  require(floor * n <= total * (1.0 + 1e-12), Errc::infeasible_split,
          "floor times partition count exceeds the capacity");
  double excess = 0.0, room = 0.0;
  for (double& c : sizes) {
    if (c < floor) {
      excess += floor - c;
      c = floor;
    } else {
      room += c - floor;
    }
  }
  if (excess > 0.0 && room > 0.0) {
    const double scale = std::max(0.0, 1.0 - excess / room);
    for (double& c : sizes)
      if (c > floor) c = floor + (c - floor) * scale;
  }
  // Sweep the rounding residue onto the largest partition.
  const double diff = total - std::accumulate(sizes.begin(), sizes.end(), 0.0);
  *std::max_element(sizes.begin(), sizes.end()) += diff;
  return sizes;
}

// Euclidean projection onto {sum = total, floor <= c_p <= upper_p}; without caps this is
// apply_floor.
inline std::vector<double> project_sizes(std::vector<double> sizes, double floor,
                                         std::span<const double> upper, double total) {
  if (upper.empty()) return apply_floor(std::move(sizes), floor, total);
  require(upper.size() == sizes.size(), Errc::invalid_argument, "one cap per partition required");
  const double n = static_cast<double>(sizes.size());
  std::vector<double> room(upper.size());
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    require(upper[p] >= floor, Errc::infeasible_split, "partition cap below the floor");
    sizes[p] -= floor;
    room[p] = upper[p] - floor;
  }
  auto x = project_capped_simplex(sizes, room, total - floor * n);
  for (double& c : x) c += floor;
  return x;
}

namespace detail {

// Alternating +1/-1 signs, mean-centred: the deterministic first move.
inline std::vector<double> bootstrap_move(std::size_t count, double total, double fraction) {
  std::vector<double> s(count);
  for (std::size_t p = 0; p < count; ++p) s[p] = p % 2 == 0 ? 1.0 : -1.0;
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(count);
  for (double& v : s) v = fraction * total * (v - mean);
  return s;
}

inline StepResult apply_marginals(const ControllerState& state, std::vector<double> delta) {
  const std::size_t count = state.sizes.size();
  const double total = state.total();
  // A partition at its cap that still wants to grow is done; eta and the stopping test run over
  // the others.
  std::vector<bool> active(count, true);
  auto pinned = [&](std::size_t p) {
    return !state.upper.empty() && state.sizes[p] >= state.upper[p] - 1e-9 * total;
  };
  StepResult out;
  for (bool changed = true; changed;) {
    double sum = 0.0, k = 0.0;
    for (std::size_t p = 0; p < count; ++p)
      if (active[p]) sum += delta[p], k += 1.0;
    out.eta = k > 0.0 ? sum / k : 0.0;
    changed = false;
    for (std::size_t p = 0; p < count; ++p)
      if (active[p] && pinned(p) && delta[p] > out.eta) active[p] = false, changed = true;
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < count; ++p)
    if (active[p]) worst = std::max(worst, delta[p] - out.eta);
  out.converged = worst <= state.config.tolerance;
  out.delta = delta;
  out.state = state;
  out.state.delta = std::move(delta);
  out.state.previous_sizes = state.sizes;
  out.state.iteration = state.iteration + 1;
  if (out.converged) return out;

  const double gamma = state.config.step_at(state.iteration);
  std::vector<double> move(count, 0.0);
  for (std::size_t p = 0; p < count; ++p)
    if (active[p]) move[p] = gamma * (out.delta[p] - out.eta);
  // Mean-centring is exact in real arithmetic; remove the floating residue.
  double drift = 0.0, k = 0.0;
  for (std::size_t p = 0; p < count; ++p)
    if (active[p]) drift += move[p], k += 1.0;
  for (std::size_t p = 0; p < count; ++p)
    if (active[p]) move[p] -= drift / k;
  // Noisy differences over a tiny move can produce huge marginals; the cap scales the whole
  // move, keeping it mean-zero.
  if (state.config.max_move > 0.0) {
    double largest = 0.0;
    for (double m : move) largest = std::max(largest, std::abs(m));
    const double cap = state.config.max_move * total;
    if (largest > cap)
      for (double& m : move) m *= cap / largest;
  }
  std::vector<double> next(count);
  for (std::size_t p = 0; p < count; ++p) next[p] = state.sizes[p] + move[p];
  next = project_sizes(std::move(next), state.config.floor, state.upper, total);
  require(next != state.sizes, Errc::stalled,
          "partition sizes did not move while the controller is unconverged");
  out.state.sizes = std::move(next);
  return out;
}

inline void check_moves(const ControllerState& state, std::size_t count) {
  require(state.sizes.size() == count && state.previous_sizes.size() == count,
          Errc::invalid_argument, "controller state does not match the estimate dimensions");
}

}  // namespace detail

// Starts a controller at `initial` with hit estimates measured there, then applies the fixed
// antisymmetric bootstrap move so the first finite difference is defined.
inline ControllerState start_controller(const ControllerConfig& config,
                                        std::span<const double> initial,
                                        std::vector<double> initial_hits,
                                        HitMatrix initial_matrix = {},
                                        std::span<const double> upper = {}) {
  config.validate();
  require(initial.size() >= 2, Errc::invalid_argument, "need at least two partitions");
  ControllerState s;
  s.config = config;
  s.previous_sizes.assign(initial.begin(), initial.end());
  const double total = std::accumulate(initial.begin(), initial.end(), 0.0);
  const auto move = detail::bootstrap_move(initial.size(), total, config.bootstrap_fraction);
  std::vector<double> next(initial.size());
  for (std::size_t p = 0; p < next.size(); ++p) next[p] = initial[p] + move[p];
  s.upper.assign(upper.begin(), upper.end());
  s.sizes = project_sizes(std::move(next), config.floor, s.upper, total);
  s.previous_hits = std::move(initial_hits);
  s.previous_matrix = std::move(initial_matrix);
  s.delta.assign(initial.size(), 0.0);
  return s;
}

// One update of the distinct-content controller from hit rates measured at state.sizes.
inline StepResult step_distinct(const ControllerState& state,
                                std::span<const UtilitySpec> utilities,
                                std::span<const double> hits) {
  const std::size_t k_count = hits.size();
  detail::check_moves(state, k_count);
  require(utilities.size() == k_count && state.previous_hits.size() == k_count,
          Errc::invalid_argument, "one utility and hit estimate per provider required");
  const double guard = 1e-6 * state.total();
  std::vector<double> delta(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double dc = state.sizes[k] - state.previous_sizes[k];
    if (std::abs(dc) < guard) {
      delta[k] = state.delta.size() == k_count ? state.delta[k] : 0.0;
      continue;
    }
    delta[k] = (u_eval(utilities[k], hits[k]) - u_eval(utilities[k], state.previous_hits[k])) / dc;
  }
  auto out = detail::apply_marginals(state, std::move(delta));
  out.state.previous_hits.assign(hits.begin(), hits.end());
  return out;
}

// One update of the grouped controller: delta_p = sum_k U'_k(h_k^{t-1}) dh_kp / dC_p.
inline StepResult step_grouped(const ControllerState& state,
                               std::span<const UtilitySpec> utilities, const HitMatrix& hits) {
  const std::size_t k_count = hits.size();
  require(k_count == utilities.size() && state.previous_matrix.size() == k_count,
          Errc::invalid_argument, "hit matrix needs one row per provider");
  const std::size_t p_count = state.sizes.size();
  detail::check_moves(state, p_count);
  for (std::size_t k = 0; k < k_count; ++k)
    require(hits[k].size() == p_count && state.previous_matrix[k].size() == p_count,
            Errc::invalid_argument, "hit matrix needs one column per partition");

  std::vector<double> slope(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& row = state.previous_matrix[k];
    slope[k] = u_prime(utilities[k], std::accumulate(row.begin(), row.end(), 0.0));
  }
  const double guard = 1e-6 * state.total();
  std::vector<double> delta(p_count, 0.0);
  for (std::size_t p = 0; p < p_count; ++p) {
    const double dc = state.sizes[p] - state.previous_sizes[p];
    if (std::abs(dc) < guard) {
      delta[p] = state.delta.size() == p_count ? state.delta[p] : 0.0;
      continue;
    }
    for (std::size_t k = 0; k < k_count; ++k)
      delta[p] += slope[k] * (hits[k][p] - state.previous_matrix[k][p]) / dc;
  }
  auto out = detail::apply_marginals(state, std::move(delta));
  out.state.previous_matrix = hits;
  return out;
}

// W(C) = sum_k U_k(h_k(C)) - P(sum C - C_base).
inline double penalized_objective(const GroupedCacheModel& model,
                                  std::span<const UtilitySpec> utilities,
                                  const PenaltySpec& penalty, std::span<const double> sizes) {
  const auto e = model.evaluate(sizes);
  return objective(utilities, e.provider_hits, penalty, sizes);
}

// One exact-gradient ascent step on W. Sizes stay within [0, files in the partition].
inline std::vector<double> gradient_step_analytic(const GroupedCacheModel& model,
                                                  std::span<const UtilitySpec> utilities,
                                                  const PenaltySpec& penalty,
                                                  std::span<const double> sizes, double step) {
  const auto e = model.evaluate(sizes);
  const auto upper = model.upper_bounds();
  const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  const double dp = penalty.derivative(total);
  std::vector<double> next(sizes.size());
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    double g = -dp;
    for (std::size_t k = 0; k < utilities.size(); ++k)
      g += u_prime(utilities[k], e.provider_hits[k]) * e.marginal[k][p];
    next[p] = std::clamp(sizes[p] + step * g, 0.0, upper[p]);
  }
  return next;
}

enum class ControllerKind { distinct, grouped };

struct TraceRow {
  int iteration = 0;
  std::vector<double> sizes;
  std::vector<double> hits;
  double objective = 0.0;
  bool converged = false;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
};

// Produces the K x P hit-rate matrix observed with the given partition sizes.
using HitSource = std::function<HitMatrix(std::span<const double>)>;

inline HitSource exact_source(std::shared_ptr<const GroupedCacheModel> model) {
  return [model](std::span<const double> sizes) { return model->evaluate(sizes).hits; };
}

// Simulated hit counts: one persistent partitioned LRU, resized at each window boundary.
inline HitSource simulated_source(std::span<const ContentGroup> groups,
                                  std::size_t provider_count, std::span<const double> initial,
                                  std::uint64_t window, std::uint64_t seed) {
  auto cache = std::make_shared<sim::PartitionedLru>(groups, provider_count,
                                                     sim::round_sizes(initial), seed);
  sim::SimConfig cfg;
  cfg.sizes.assign(initial.begin(), initial.end());
  cache->run(cfg.effective_warmup());
  return [cache, window](std::span<const double> sizes) {
    cache->resize(sim::round_sizes(sizes));
    return cache->measure(window).hit_rate_matrix();
  };
}

inline std::vector<double> provider_totals(const HitMatrix& m) {
  std::vector<double> h;
  for (const auto& row : m) h.push_back(std::accumulate(row.begin(), row.end(), 0.0));
  return h;
}

// Runs the controller for up to `max_iterations` updates. The first row is the initial point.
// With stop_on_convergence false the loop continues to the budget (noisy runs).
inline RunTrace run_controller(ControllerKind kind, std::span<const UtilitySpec> utilities,
                               const ControllerConfig& config, std::span<const double> initial,
                               const HitSource& source, int max_iterations,
                               bool stop_on_convergence = true,
                               std::span<const double> upper = {}) {
  require(max_iterations >= 1, Errc::invalid_argument, "max iterations must be >= 1");
  RunTrace trace;
  auto record = [&](int t, std::span<const double> sizes, const HitMatrix& m, bool conv) {
    TraceRow row;
    row.iteration = t;
    row.sizes.assign(sizes.begin(), sizes.end());
    row.hits = provider_totals(m);
    row.objective = utility_sum(utilities, row.hits);
    row.converged = conv;
    trace.rows.push_back(std::move(row));
  };
  if (kind == ControllerKind::distinct)
    require(initial.size() == utilities.size(), Errc::invalid_argument,
            "distinct controller needs one partition per provider");

  HitMatrix m0 = source(initial);
  record(0, initial, m0, false);
  ControllerState state = start_controller(config, initial, provider_totals(m0), m0, upper);
  for (int t = 1; t <= max_iterations; ++t) {
    const auto sizes = state.sizes;
    const HitMatrix m = source(sizes);
    StepResult r = kind == ControllerKind::distinct
                       ? step_distinct(state, utilities, provider_totals(m))
                       : step_grouped(state, utilities, m);
    record(t, sizes, m, r.converged);
    if (r.converged) trace.converged = true;
    if (r.converged && stop_on_convergence) break;
    state = std::move(r.state);
  }
  return trace;
}

}  // namespace cachepart::online
