#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "cachepart/error.hpp"

namespace cachepart {

// Euclidean projection of y onto {x : sum x = total, 0 <= x_p <= upper_p}, found by bisection
// on the common shift theta in x_p = clamp(y_p - theta, 0, upper_p).
inline std::vector<double> project_capped_simplex(std::span<const double> y,
                                                  std::span<const double> upper, double total) {
  require(y.size() == upper.size() && !y.empty(), Errc::invalid_argument,
          "projection needs matching non-empty vectors");
  const double cap = std::accumulate(upper.begin(), upper.end(), 0.0);
  require(total >= 0.0 && total <= cap * (1.0 + 1e-12) + 1e-12, Errc::infeasible_split,
          "total exceeds the sum of upper bounds");
  auto mass = [&](double theta) {
    double s = 0.0;
    for (std::size_t p = 0; p < y.size(); ++p) s += std::clamp(y[p] - theta, 0.0, upper[p]);
    return s;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < y.size(); ++p) {
    lo = std::min(lo, y[p] - upper[p]);
    hi = std::max(hi, y[p]);
  }
  // mass(lo) = cap >= total, mass(hi) = 0 <= total; mass is non-increasing in theta.
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mass(mid) > total) lo = mid; else hi = mid;
  }
  std::vector<double> x(y.size());
  for (std::size_t p = 0; p < y.size(); ++p) x[p] = std::clamp(y[p] - hi, 0.0, upper[p]);
  // Put the bisection remainder on the coordinate with the most slack so the sum is exact.
  double diff = total - std::accumulate(x.begin(), x.end(), 0.0);
  for (int pass = 0; pass < 2 && diff != 0.0; ++pass) {
    std::size_t best = 0;
    double room = -1.0;
    for (std::size_t p = 0; p < x.size(); ++p) {
      const double r = diff > 0.0 ? upper[p] - x[p] : x[p];
      if (r > room) { room = r; best = p; }
    }
    const double move = diff > 0.0 ? std::min(diff, room) : -std::min(-diff, room);
    x[best] += move;
    diff -= move;
  }
  return x;
}

// Projection of y onto the capped simplex in the metric sum_p d_p (x_p - y_p)^2:
// x_p = clamp(y_p - theta / d_p, 0, upper_p) with theta found by bisection.
inline std::vector<double> project_capped_simplex_scaled(std::span<const double> y,
                                                         std::span<const double> d,
                                                         std::span<const double> upper,
                                                         double total) {
  require(y.size() == upper.size() && d.size() == y.size() && !y.empty(), Errc::invalid_argument,
          "projection needs matching non-empty vectors");
  const double cap = std::accumulate(upper.begin(), upper.end(), 0.0);
  require(total >= 0.0 && total <= cap * (1.0 + 1e-12) + 1e-12, Errc::infeasible_split,
          "total exceeds the sum of upper bounds");
  auto at = [&](std::size_t p, double theta) { return std::clamp(y[p] - theta / d[p], 0.0, upper[p]); };
  auto mass = [&](double theta) {
    double s = 0.0;
    for (std::size_t p = 0; p < y.size(); ++p) s += at(p, theta);
    return s;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < y.size(); ++p) {
    lo = std::min(lo, (y[p] - upper[p]) * d[p]);
    hi = std::max(hi, y[p] * d[p]);
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mass(mid) > total) lo = mid; else hi = mid;
  }
  std::vector<double> x(y.size());
  for (std::size_t p = 0; p < y.size(); ++p) x[p] = at(p, hi);
  double diff = total - std::accumulate(x.begin(), x.end(), 0.0);
  for (int pass = 0; pass < 2 && diff != 0.0; ++pass) {
    std::size_t best = 0;
    double room = -1.0;
    for (std::size_t p = 0; p < x.size(); ++p) {
      const double r = diff > 0.0 ? upper[p] - x[p] : x[p];
      if (r > room) { room = r; best = p; }
    }
    const double move = diff > 0.0 ? std::min(diff, room) : -std::min(-diff, room);
    x[best] += move;
    diff -= move;
  }
  return x;
}

// Marginal-equalization residual for max f(x) on the capped simplex: with nu the mean gradient
// over interior coordinates, interior coordinates should have g = nu, those at zero g <= nu
// and those at their cap g >= nu. Returned relative to |nu|.
inline double kkt_residual(std::span<const double> x, std::span<const double> grad,
                           std::span<const double> upper, double total) {
  const double eps = 1e-9 * std::max(total, 1.0);
  double sum = 0.0;
  std::size_t interior = 0;
  for (std::size_t p = 0; p < x.size(); ++p)
    if (x[p] > eps && x[p] < upper[p] - eps) {
      sum += grad[p];
      ++interior;
    }
  double nu;
  if (interior > 0) {
    nu = sum / static_cast<double>(interior);
  } else {
    // All coordinates at bounds: any nu between max(g at zero) and min(g at cap) certifies.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < x.size(); ++p) {
      if (x[p] <= eps) lo = std::max(lo, grad[p]);
      if (x[p] >= upper[p] - eps) hi = std::min(hi, grad[p]);
    }
    if (lo <= hi) return 0.0;
    nu = 0.5 * (lo + hi);
  }
  const double scale = std::max(std::abs(nu), std::numeric_limits<double>::min());
  double r = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    double dev;
    if (x[p] <= eps && x[p] < upper[p] - eps) dev = std::max(0.0, grad[p] - nu);
    else if (x[p] >= upper[p] - eps && x[p] > eps) dev = std::max(0.0, nu - grad[p]);
    else if (x[p] <= eps) dev = 0.0;  // zero-width coordinate
    else dev = std::abs(grad[p] - nu);
    r = std::max(r, dev / scale);
  }
  return r;
}

struct AscentOptions {
  double kkt_tolerance = 1e-6;
  int max_iterations = 100000;
};

struct AscentResult {
  std::vector<double> x;
  std::vector<double> gradient;
  double value = 0.0;
  double kkt = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient ascent with Barzilai-Borwein steps and Armijo backtracking for a concave
// objective. `eval(x, grad)` returns f(x) and fills grad; f may be -inf outside its domain.
template <class Eval>
AscentResult projected_gradient_ascent(Eval&& eval, std::span<const double> start,
                                       std::span<const double> upper, double total,
                                       const AscentOptions& options = {}) {
  const std::size_t dim = start.size();
  AscentResult res;
  res.x = project_capped_simplex(start, upper, total);
  res.gradient.assign(dim, 0.0);
  res.value = eval(res.x, res.gradient);
  require(std::isfinite(res.value), Errc::invalid_argument,
          "ascent must start at a point with finite objective");

  double gmax = 0.0;
  for (double g : res.gradient) gmax = std::max(gmax, std::abs(g));
  double step = gmax > 0.0 ? 0.05 * std::max(total, 1e-12) / gmax : 1.0;

  std::vector<double> trial(dim), trial_grad(dim), y(dim);
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    res.kkt = kkt_residual(res.x, res.gradient, upper, total);
    if (res.kkt <= options.kkt_tolerance) {
      res.converged = true;
      return res;
    }
    bool accepted = false;
    double s = step;
    double trial_value = 0.0;
    for (int halving = 0; halving < 80; ++halving, s *= 0.5) {
      for (std::size_t p = 0; p < dim; ++p) y[p] = res.x[p] + s * res.gradient[p];
      trial = project_capped_simplex(y, upper, total);
      double ascent = 0.0;
      for (std::size_t p = 0; p < dim; ++p) ascent += res.gradient[p] * (trial[p] - res.x[p]);
      if (ascent <= 0.0) break;  // projected direction vanished
      trial_value = eval(trial, trial_grad);
      if (std::isfinite(trial_value) && trial_value >= res.value + 1e-4 * ascent) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent left at working precision.
      res.converged = false;
      return res;
    }
    double ss = 0.0, sy = 0.0;
    for (std::size_t p = 0; p < dim; ++p) {
      const double dx = trial[p] - res.x[p];
      ss += dx * dx;
      sy += dx * (trial_grad[p] - res.gradient[p]);
    }
    step = sy < 0.0 ? ss / -sy : 2.0 * s;
    res.x.swap(trial);
    res.gradient.swap(trial_grad);
    res.value = trial_value;
  }
  res.kkt = kkt_residual(res.x, res.gradient, upper, total);
  res.converged = res.kkt <= options.kkt_tolerance;
  return res;
}

// Projected ascent scaled by a diagonal curvature estimate: `eval(x, grad, curv)` also fills
// curv_p ~ -d2f/dx_p^2. Needed where one coordinate sits in a much steeper region than the
// rest (a partition close to holding its whole catalog), which stalls plain gradient steps.
template <class Eval>
AscentResult scaled_projected_ascent(Eval&& eval, std::span<const double> start,
                                     std::span<const double> upper, double total,
                                     const AscentOptions& options = {}) {
  const std::size_t dim = start.size();
  AscentResult res;
  res.x = project_capped_simplex(start, upper, total);
  res.gradient.assign(dim, 0.0);
  std::vector<double> curv(dim, 0.0), trial_curv(dim, 0.0);
  res.value = eval(res.x, res.gradient, curv);
  require(std::isfinite(res.value), Errc::invalid_argument,
          "ascent must start at a point with finite objective");

  std::vector<double> trial(dim), trial_grad(dim), y(dim), d(dim);
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    res.kkt = kkt_residual(res.x, res.gradient, upper, total);
    if (res.kkt <= options.kkt_tolerance) {
      res.converged = true;
      return res;
    }
    double dmax = 0.0;
    for (double c : curv) dmax = std::max(dmax, c);
    const double dfloor = dmax > 0.0 ? 1e-12 * dmax : 1.0;
    for (std::size_t p = 0; p < dim; ++p) d[p] = std::max(curv[p], dfloor);
    bool accepted = false;
    double trial_value = 0.0;
    double s = 1.0;
    for (int halving = 0; halving < 80; ++halving, s *= 0.5) {
      for (std::size_t p = 0; p < dim; ++p) y[p] = res.x[p] + s * res.gradient[p] / d[p];
      trial = project_capped_simplex_scaled(y, d, upper, total);
      double ascent = 0.0;
      for (std::size_t p = 0; p < dim; ++p) ascent += res.gradient[p] * (trial[p] - res.x[p]);
      if (ascent <= 0.0) break;
      trial_value = eval(trial, trial_grad, trial_curv);
      if (!std::isfinite(trial_value)) continue;
      // Near the optimum the objective changes below its rounding while the gradient is still
      // accurate. f is concave along the segment, so a non-negative slope at its end also
      // certifies ascent.
      double end_slope = 0.0;
      for (std::size_t p = 0; p < dim; ++p) end_slope += trial_grad[p] * (trial[p] - res.x[p]);
      if (trial_value >= res.value + 1e-4 * ascent || end_slope >= 0.0) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.converged = false;
      return res;
    }
    res.x.swap(trial);
    res.gradient.swap(trial_grad);
    curv.swap(trial_curv);
    res.value = trial_value;
  }
  res.kkt = kkt_residual(res.x, res.gradient, upper, total);
  res.converged = res.kkt <= options.kkt_tolerance;
  return res;
}

}  // namespace cachepart
