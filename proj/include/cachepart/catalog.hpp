#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "cachepart/error.hpp"
#include "cachepart/utility.hpp"

namespace cachepart {

// Piecewise-linear CDF on [0, 1] given by its breakpoints (x_j, F(x_j)).
class PiecewiseCdf {
 public:
  struct Segment {
    double x0;
    double x1;
    double slope;
    double width() const { return x1 - x0; }
  };

  PiecewiseCdf() : PiecewiseCdf({0.0, 1.0}, {0.0, 1.0}) {}

  PiecewiseCdf(std::vector<double> xs, std::vector<double> values)
      : xs_(std::move(xs)), fs_(std::move(values)) {
    validate();
  }

  static PiecewiseCdf uniform() { return {}; }

  // Builds the CDF from consecutive (width, slope) pieces; widths must sum to 1 and the
  // width-weighted slopes must sum to 1.
  static PiecewiseCdf from_slopes(const std::vector<double>& widths,
                                  const std::vector<double>& slopes) {
    require(widths.size() == slopes.size() && !widths.empty(), Errc::invalid_cdf,
            "widths and slopes must be non-empty and of equal length");
    std::vector<double> xs{0.0};
    std::vector<double> fs{0.0};
    for (std::size_t j = 0; j < widths.size(); ++j) {
      xs.push_back(xs.back() + widths[j]);
      fs.push_back(fs.back() + widths[j] * slopes[j]);
    }
    require(std::abs(xs.back() - 1.0) < 1e-12 && std::abs(fs.back() - 1.0) < 1e-12,
            Errc::invalid_cdf, "pieces must span [0,1] and carry unit mass");
    xs.back() = 1.0;
    fs.back() = 1.0;
    return {std::move(xs), std::move(fs)};
  }

  const std::vector<double>& breakpoints() const { return xs_; }
  const std::vector<double>& values() const { return fs_; }

  std::vector<Segment> segments() const {
    std::vector<Segment> out;
    out.reserve(xs_.size() - 1);
    for (std::size_t j = 0; j + 1 < xs_.size(); ++j)
      out.push_back({xs_[j], xs_[j + 1], (fs_[j + 1] - fs_[j]) / (xs_[j + 1] - xs_[j])});
    return out;
  }

  double operator()(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs_.begin()) - 1;
    if (xs_[j] == x) return fs_[j];
    const double t = (x - xs_[j]) / (xs_[j + 1] - xs_[j]);
    return fs_[j] + t * (fs_[j + 1] - fs_[j]);
  }

  // Segment slope; at a breakpoint the slope of the segment to the right is returned.
  double density(double x) const {
    for (const auto& s : segments())
      if (x >= s.x0 && x < s.x1) return s.slope;
    return segments().back().slope;
  }

  double max_slope() const {
    double m = 0.0;
    for (const auto& s : segments()) m = std::max(m, s.slope);
    return m;
  }

  bool operator==(const PiecewiseCdf&) const = default;

 private:
  void validate() const {
    require(xs_.size() == fs_.size() && xs_.size() >= 2, Errc::invalid_cdf,
            "need at least two breakpoints");
    require(xs_.front() == 0.0 && xs_.back() == 1.0, Errc::invalid_cdf,
            "breakpoints must start at 0 and end at 1");
    require(fs_.front() == 0.0 && fs_.back() == 1.0, Errc::invalid_cdf, "F(0)=0 and F(1)=1");
    for (std::size_t j = 0; j + 1 < xs_.size(); ++j) {
      require(xs_[j + 1] > xs_[j], Errc::invalid_cdf, "breakpoints must be strictly increasing");
      require(fs_[j + 1] >= fs_[j], Errc::invalid_cdf, "F must be non-decreasing");
    }
    for (double v : fs_) require(std::isfinite(v), Errc::invalid_cdf, "F values must be finite");
  }

  std::vector<double> xs_;
  std::vector<double> fs_;
};

struct ZipfPopularity {
  double exponent = 0.0;
  std::size_t count = 1;
  bool operator==(const ZipfPopularity&) const = default;
};

struct ExplicitPopularity {
  std::vector<double> probabilities;
  bool operator==(const ExplicitPopularity&) const = default;
};

using PopularityModel = std::variant<ZipfPopularity, PiecewiseCdf, ExplicitPopularity>;

inline constexpr double kNormalizationTolerance = 1e-12;

// Neumaier-compensated sum; plain accumulation drifts past 1e-12 on long vectors.
inline double stable_sum(const std::vector<double>& v) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

// Number of files the model describes by itself; 0 for CDF models, which need a scale.
inline std::size_t natural_size(const PopularityModel& model) {
  if (const auto* z = std::get_if<ZipfPopularity>(&model)) return z->count;
  if (const auto* e = std::get_if<ExplicitPopularity>(&model)) return e->probabilities.size();
  return 0;
}

inline std::vector<double> zipf_probabilities(double exponent, std::size_t n) {
  require(exponent >= 0.0 && std::isfinite(exponent), Errc::invalid_argument,
          "zipf exponent must be >= 0");
  require(n >= 1, Errc::invalid_argument, "zipf count must be >= 1");
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::pow(static_cast<double>(i + 1), -exponent);
  const double total = stable_sum(p);
  for (double& v : p) v /= total;
  return p;
}

// Probability vector of length n: p_i = F(i/n) - F((i-1)/n) for CDF models.
inline std::vector<double> materialize(const PopularityModel& model, std::size_t n) {
  require(n >= 1, Errc::invalid_argument, "n must be >= 1");
  std::vector<double> p;
  if (const auto* z = std::get_if<ZipfPopularity>(&model)) {
    require(n == z->count, Errc::invalid_argument, "zipf count does not match requested n");
    p = zipf_probabilities(z->exponent, n);
  } else if (const auto* cdf = std::get_if<PiecewiseCdf>(&model)) {
    p.resize(n);
    const double dn = static_cast<double>(n);
    double prev = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double cur = (*cdf)(static_cast<double>(i) / dn);
      require(cur >= prev, Errc::invalid_cdf, "CDF is not monotone");
      p[i - 1] = cur - prev;
      prev = cur;
    }
  } else {
    const auto& e = std::get<ExplicitPopularity>(model);
    require(n == e.probabilities.size(), Errc::invalid_argument,
            "explicit vector length does not match requested n");
    for (double v : e.probabilities)
      require(v >= 0.0 && std::isfinite(v), Errc::normalization_failure,
              "probabilities must be finite and >= 0");
    p = e.probabilities;
  }
  const double total = stable_sum(p);
  require(std::abs(total - 1.0) <= kNormalizationTolerance, Errc::normalization_failure,
          "probabilities sum to " + std::to_string(total));
  return p;
}

inline std::vector<double> materialize(const PopularityModel& model) {
  const std::size_t n = natural_size(model);
  require(n > 0, Errc::invalid_argument, "CDF popularity needs an explicit file count");
  return materialize(model, n);
}

struct Provider {
  double arrival_rate = 1.0;
  PopularityModel popularity = ZipfPopularity{};
  UtilitySpec utility;
  // Only consulted for CDF popularity models.
  std::size_t catalog_size = 0;

  std::size_t file_count() const {
    const std::size_t n = natural_size(popularity);
    return n > 0 ? n : catalog_size;
  }

  // Per-file request rates lambda * p_i.
  std::vector<double> rates() const {
    require(arrival_rate > 0.0 && std::isfinite(arrival_rate), Errc::invalid_argument,
            "arrival rate must be > 0");
    auto p = materialize(popularity, file_count());
    for (double& v : p) v *= arrival_rate;
    return p;
  }

  bool operator==(const Provider&) const = default;
};

// A set of files served by exactly the listed providers, with each member's request rate into
// the set and its popularity over the set's files.
struct ContentSet {
  std::vector<std::size_t> providers;
  std::size_t count = 0;
  std::vector<double> rates;
  std::vector<std::vector<double>> popularity;
};

struct OverlapWorkload {
  std::vector<double> provider_rates;
  std::vector<ContentSet> sets;

  std::size_t provider_count() const { return provider_rates.size(); }

  void validate() const {
    const std::size_t k = provider_count();
    require(k >= 1, Errc::invalid_argument, "workload needs at least one provider");
    std::vector<double> totals(k, 0.0);
    std::vector<std::vector<std::size_t>> seen;
    for (const auto& set : sets) {
      require(!set.providers.empty(), Errc::invalid_argument, "content set has no providers");
      require(std::is_sorted(set.providers.begin(), set.providers.end()) &&
                  std::adjacent_find(set.providers.begin(), set.providers.end()) ==
                      set.providers.end(),
              Errc::invalid_argument, "provider subset must be sorted and distinct");
      require(set.providers.back() < k, Errc::invalid_argument, "provider id out of range");
      require(std::find(seen.begin(), seen.end(), set.providers) == seen.end(),
              Errc::invalid_argument, "provider subsets must be distinct");
      seen.push_back(set.providers);
      require(set.rates.size() == set.providers.size() &&
                  set.popularity.size() == set.providers.size(),
              Errc::invalid_argument, "one rate and popularity vector per member provider");
      for (std::size_t m = 0; m < set.providers.size(); ++m) {
        require(set.rates[m] >= 0.0, Errc::invalid_argument, "set rates must be >= 0");
        totals[set.providers[m]] += set.rates[m];
        if (set.count == 0) continue;
        require(set.popularity[m].size() == set.count, Errc::invalid_argument,
                "popularity vector length must equal the set count");
        double s = 0.0;
        for (double v : set.popularity[m]) {
          require(v >= 0.0, Errc::normalization_failure, "probabilities must be >= 0");
          s += v;
        }
        require(std::abs(s - 1.0) <= 1e-9, Errc::normalization_failure,
                "set popularity must sum to 1");
      }
    }
    for (std::size_t i = 0; i < k; ++i)
      require(std::abs(totals[i] - provider_rates[i]) <= 1e-9 * std::max(1.0, provider_rates[i]),
              Errc::invalid_argument,
              "provider " + std::to_string(i) + " per-set rates do not sum to its arrival rate");
  }
};

struct FileId {
  std::size_t set = 0;
  std::size_t index = 0;
  auto operator<=>(const FileId&) const = default;
};

// Files served by exactly the same provider subset. Rates are per file.
struct ContentGroup {
  std::size_t id = 0;
  std::vector<std::size_t> serving;
  std::vector<FileId> files;
  std::vector<double> aggregate_rates;
  // provider_rates[m][i]: rate of serving[m] for file i.
  std::vector<std::vector<double>> provider_rates;

  std::size_t file_count() const { return files.size(); }
};

// Groups every file by the subset of providers serving it, in order of first appearance.
inline std::vector<ContentGroup> group_contents(const OverlapWorkload& workload) {
  workload.validate();
  std::vector<ContentGroup> groups;
  std::map<std::vector<std::size_t>, std::size_t> by_subset;
  for (std::size_t s = 0; s < workload.sets.size(); ++s) {
    const auto& set = workload.sets[s];
    for (std::size_t i = 0; i < set.count; ++i) {
      const auto& serving = set.providers;
      auto [it, inserted] = by_subset.try_emplace(serving, groups.size());
      if (inserted) {
        ContentGroup g;
        g.id = groups.size();
        g.serving = serving;
        g.provider_rates.resize(serving.size());
        groups.push_back(std::move(g));
      }
      auto& g = groups[it->second];
      g.files.push_back({s, i});
      double total = 0.0;
      for (std::size_t m = 0; m < serving.size(); ++m) {
        const double r = set.rates[m] * set.popularity[m][i];
        g.provider_rates[m].push_back(r);
        total += r;
      }
      g.aggregate_rates.push_back(total);
    }
  }
  return groups;
}

// One single-provider content set per provider.
inline OverlapWorkload distinct_workload(const std::vector<Provider>& providers) {
  OverlapWorkload w;
  for (std::size_t k = 0; k < providers.size(); ++k) {
    w.provider_rates.push_back(providers[k].arrival_rate);
    ContentSet set;
    set.providers = {k};
    set.count = providers[k].file_count();
    set.rates = {providers[k].arrival_rate};
    set.popularity = {materialize(providers[k].popularity, set.count)};
    w.sets.push_back(std::move(set));
  }
  return w;
}

}  // namespace cachepart
