#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cachepart/catalog.hpp"
#include "cachepart/error.hpp"
#include "cachepart/fagin.hpp"
#include "cachepart/onlinectl.hpp"
#include "cachepart/utility.hpp"

namespace cachepart::scenario {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Mode {
  offline_distinct,
  offline_grouped,
  online_distinct,
  online_grouped,
  fagin_strategy,
  ct_validate,
  market
};

inline const std::vector<std::pair<Mode, std::string>>& mode_names() {
  static const std::vector<std::pair<Mode, std::string>> names{
      {Mode::offline_distinct, "OFFLINE_DISTINCT"}, {Mode::offline_grouped, "OFFLINE_GROUPED"},
      {Mode::online_distinct, "ONLINE_DISTINCT"},   {Mode::online_grouped, "ONLINE_GROUPED"},
      {Mode::fagin_strategy, "FAGIN_STRATEGY"},     {Mode::ct_validate, "CT_VALIDATE"},
      {Mode::market, "MARKET"}};
  return names;
}

inline std::string to_string(Mode m) {
  for (const auto& [mode, name] : mode_names())
    if (mode == m) return name;
  return "?";
}

// Order of provider 2's popularity over the common files relative to provider 1's.
enum class Ordering { aligned, reversed };

// Files 1, 1 + stride, 1 + 2 stride, ... up to `limit` (1-based) are served by providers 1 and 2.
struct OverlapSpec {
  bool enabled = false;
  std::size_t stride = 3;
  std::size_t limit = 10000;
  Ordering ordering = Ordering::aligned;
  bool operator==(const OverlapSpec&) const = default;
};

enum class HitSourceKind { exact, simulated };

struct ControllerSpec {
  online::ControllerConfig config;
  int iterations = 500;
  HitSourceKind source = HitSourceKind::exact;
  std::vector<double> initial_sizes;  // empty: equal split
  bool stop_on_convergence = true;
  bool operator==(const ControllerSpec&) const = default;
};

struct FaginSpec {
  fagin::SharedSetWorkload workload;
  std::vector<fagin::Strategy> strategies{fagin::Strategy::s1, fagin::Strategy::s2,
                                          fagin::Strategy::s3};
  bool operator==(const FaginSpec&) const = default;
};

struct CtValidateSpec {
  std::vector<std::size_t> n_grid{100, 1000, 10000};
  std::uint64_t requests = 10'000'000;
  std::vector<double> fractions{1.0};  // cache size / n; one entry means a single shared LRU
  bool operator==(const CtValidateSpec&) const = default;
};

struct MarketSpec {
  double price = 1.0;
  int rounds = 50;
  double tolerance = 1e-9;
  bool operator==(const MarketSpec&) const = default;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  Mode mode = Mode::offline_distinct;
  double capacity = 0.0;
  std::uint64_t seed = 1;
  std::vector<Provider> providers;
  OverlapSpec overlap;
  ControllerSpec controller;
  FaginSpec fagin;
  CtValidateSpec ct;
  MarketSpec market;
  std::string output;

  bool grouped() const {
    return mode == Mode::offline_grouped || mode == Mode::online_grouped;
  }
  bool operator==(const Scenario&) const = default;
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& path, const std::string& what) {
  fail(Errc::validation_error, path + ": " + what);
}

inline void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) invalid(path, what);
}

inline const Json& field(const Json& j, const std::string& path, const char* key) {
  check(j.is_object(), path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) invalid(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <class T>
T read(const Json& j, const std::string& path, const char* key) {
  const Json& v = field(j, path, key);
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    invalid(join(path, key), "wrong type");
  }
}

template <class T>
T read_or(const Json& j, const std::string& path, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return read<T>(j, path, key);
}

inline Json cdf_to_json(const PiecewiseCdf& f) {
  return {{"breakpoints", f.breakpoints()}, {"values", f.values()}};
}

inline PiecewiseCdf cdf_from_json(const Json& j, const std::string& path) {
  auto xs = read<std::vector<double>>(j, path, "breakpoints");
  auto fs = read<std::vector<double>>(j, path, "values");
  try {
    return PiecewiseCdf(std::move(xs), std::move(fs));
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

inline Json utility_to_json(const UtilitySpec& u) {
  return {{"kind", std::string(to_string(u.kind))}, {"alpha", u.alpha}, {"weight", u.weight}};
}

inline UtilitySpec utility_from_json(const Json& j, const std::string& path) {
  const auto kind = read<std::string>(j, path, "kind");
  const double weight = read_or<double>(j, path, "weight", 1.0);
  UtilitySpec u;
  if (kind == "log") u = UtilitySpec::logarithmic(weight);
  else if (kind == "linear") u = UtilitySpec::linear(weight);
  else if (kind == "neg_inverse") u = UtilitySpec::neg_inverse(weight);
  else if (kind == "alpha_fair") u = UtilitySpec::alpha_fair(read<double>(j, path, "alpha"), weight);
  else invalid(join(path, "kind"), "unknown utility '" + kind + "'");
  check(u.alpha >= 0.0, join(path, "alpha"), "must be >= 0");
  check(u.weight >= 0.0, join(path, "weight"), "must be >= 0");
  return u;
}

inline Json popularity_to_json(const PopularityModel& m) {
  if (const auto* z = std::get_if<ZipfPopularity>(&m))
    return {{"kind", "zipf"}, {"exponent", z->exponent}, {"count", z->count}};
  if (const auto* c = std::get_if<PiecewiseCdf>(&m)) {
    Json j = cdf_to_json(*c);
    j["kind"] = "cdf";
    return j;
  }
  return {{"kind", "explicit"},
          {"probabilities", std::get<ExplicitPopularity>(m).probabilities}};
}

inline PopularityModel popularity_from_json(const Json& j, const std::string& path) {
  const auto kind = read<std::string>(j, path, "kind");
  if (kind == "zipf") {
    ZipfPopularity z{read<double>(j, path, "exponent"), read<std::size_t>(j, path, "count")};
    check(z.exponent >= 0.0, join(path, "exponent"), "must be >= 0");
    check(z.count >= 1, join(path, "count"), "must be >= 1");
    return z;
  }
  if (kind == "cdf") return cdf_from_json(j, path);
  if (kind == "explicit") {
    ExplicitPopularity e{read<std::vector<double>>(j, path, "probabilities")};
    check(!e.probabilities.empty(), join(path, "probabilities"), "must not be empty");
    double s = 0.0;
    for (double v : e.probabilities) {
      check(v >= 0.0, join(path, "probabilities"), "entries must be >= 0");
      s += v;
    }
    check(std::abs(s - 1.0) <= 1e-9, join(path, "probabilities"), "must sum to 1");
    return e;
  }
  invalid(join(path, "kind"), "unknown popularity '" + kind + "'");
}

inline Json provider_to_json(const Provider& p) {
  Json j{{"arrival_rate", p.arrival_rate},
         {"popularity", popularity_to_json(p.popularity)},
         {"utility", utility_to_json(p.utility)}};
  if (std::holds_alternative<PiecewiseCdf>(p.popularity)) j["catalog_size"] = p.catalog_size;
  return j;
}

inline Provider provider_from_json(const Json& j, const std::string& path) {
  Provider p;
  p.arrival_rate = read<double>(j, path, "arrival_rate");
  check(p.arrival_rate > 0.0 && std::isfinite(p.arrival_rate), join(path, "arrival_rate"),
        "must be > 0");
  p.popularity = popularity_from_json(field(j, path, "popularity"), join(path, "popularity"));
  p.utility = j.contains("utility") ? utility_from_json(j["utility"], join(path, "utility"))
                                    : UtilitySpec::logarithmic();
  if (std::holds_alternative<PiecewiseCdf>(p.popularity)) {
    p.catalog_size = read<std::size_t>(j, path, "catalog_size");
    check(p.catalog_size >= 1, join(path, "catalog_size"), "must be >= 1");
  }
  return p;
}

inline std::string strategy_name(fagin::Strategy s) { return std::string(fagin::to_string(s)); }

inline fagin::Strategy strategy_from_name(const std::string& s, const std::string& path) {
  for (auto v : {fagin::Strategy::s1, fagin::Strategy::s2, fagin::Strategy::s3})
    if (strategy_name(v) == s) return v;
  invalid(path, "unknown strategy '" + s + "'");
}

}  // namespace detail

inline Json to_json(const Scenario& s) {
  using namespace detail;
  Json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["mode"] = to_string(s.mode);
  j["capacity"] = s.capacity;
  j["seed"] = s.seed;
  j["providers"] = Json::array();
  for (const auto& p : s.providers) j["providers"].push_back(provider_to_json(p));
  if (s.overlap.enabled)
    j["overlap"] = {{"stride", s.overlap.stride},
                    {"limit", s.overlap.limit},
                    {"ordering", s.overlap.ordering == Ordering::aligned ? "ALIGNED" : "REVERSED"}};
  const auto& c = s.controller;
  j["controller"] = {
      {"step", c.config.step},
      {"tolerance", c.config.tolerance},
      {"floor", c.config.floor},
      {"bootstrap_fraction", c.config.bootstrap_fraction},
      {"schedule", c.config.schedule == online::StepSchedule::constant ? "constant" : "diminishing"},
      {"schedule_horizon", c.config.schedule_horizon},
      {"window_requests", c.config.window_requests},
      {"max_move", c.config.max_move},
      {"iterations", c.iterations},
      {"source", c.source == HitSourceKind::exact ? "exact" : "simulated"},
      {"initial_sizes", c.initial_sizes},
      {"stop_on_convergence", c.stop_on_convergence}};
  if (s.mode == Mode::fagin_strategy) {
    const auto& w = s.fagin.workload;
    Json strategies = Json::array();
    for (auto st : s.fagin.strategies) strategies.push_back(strategy_name(st));
    j["fagin"] = {{"beta", w.beta},
                  {"shared_mass", w.shared_mass},
                  {"own_mass", w.own_mass},
                  {"shared_rate", w.shared_rate},
                  {"own_rate", w.own_rate},
                  {"shared_cdf", {cdf_to_json(w.shared_cdf[0]), cdf_to_json(w.shared_cdf[1])}},
                  {"own_cdf", {cdf_to_json(w.own_cdf[0]), cdf_to_json(w.own_cdf[1])}},
                  {"strategies", strategies}};
  }
  j["ct_validate"] = {
      {"n_grid", s.ct.n_grid}, {"requests", s.ct.requests}, {"fractions", s.ct.fractions}};
  j["market"] = {
      {"price", s.market.price}, {"rounds", s.market.rounds}, {"tolerance", s.market.tolerance}};
  j["output"] = s.output;
  return j;
}

// Checks cross-field requirements; throws VALIDATION_ERROR naming the offending field.
inline void validate(const Scenario& s) {
  using detail::check;
  check(s.schema_version == kSchemaVersion, "schema_version",
        "unsupported version " + std::to_string(s.schema_version));
  check(s.capacity > 0.0 && std::isfinite(s.capacity), "capacity", "must be > 0");
  if (s.mode == Mode::fagin_strategy) {
    try {
      s.fagin.workload.validate();
    } catch (const Error& e) {
      detail::invalid("fagin", e.what());
    }
    check(!s.fagin.strategies.empty(), "fagin.strategies", "must not be empty");
    return;
  }
  check(!s.providers.empty(), "providers", "must not be empty");
  std::size_t total_files = 0;
  for (std::size_t k = 0; k < s.providers.size(); ++k) {
    const auto path = "providers[" + std::to_string(k) + "]";
    const auto& p = s.providers[k];
    check(p.arrival_rate > 0.0, path + ".arrival_rate", "must be > 0");
    check(p.file_count() >= 1, path + ".catalog_size", "must be >= 1");
    check(p.utility.alpha >= 0.0, path + ".utility.alpha", "must be >= 0");
    check(p.utility.weight >= 0.0, path + ".utility.weight", "must be >= 0");
    total_files += p.file_count();
  }
  if (s.overlap.enabled) {
    check(s.providers.size() == 2, "overlap", "requires exactly two providers");
    check(s.overlap.stride >= 1, "overlap.stride", "must be >= 1");
    check(s.overlap.limit >= 1, "overlap.limit", "must be >= 1");
  }
  if (s.mode == Mode::online_distinct || s.mode == Mode::online_grouped) {
    const auto& c = s.controller;
    try {
      c.config.validate();
    } catch (const Error& e) {
      detail::invalid("controller", e.what());
    }
    check(c.iterations >= 1, "controller.iterations", "must be >= 1");
    if (!c.initial_sizes.empty()) {
      double sum = 0.0;
      for (double v : c.initial_sizes) {
        check(v >= 0.0, "controller.initial_sizes", "entries must be >= 0");
        sum += v;
      }
      check(std::abs(sum - s.capacity) <= 1e-6 * s.capacity, "controller.initial_sizes",
            "must sum to the capacity");
    }
    check(static_cast<double>(total_files) > s.capacity, "capacity",
          "online control needs a capacity below the catalog size");
  }
  if (s.mode == Mode::ct_validate) {
    check(!s.ct.n_grid.empty(), "ct_validate.n_grid", "must not be empty");
    check(s.ct.requests > 0, "ct_validate.requests", "must be > 0");
    check(s.ct.fractions.size() == 1 || s.ct.fractions.size() == s.providers.size(),
          "ct_validate.fractions", "one shared fraction or one per provider");
    for (const auto& p : s.providers)
      check(std::holds_alternative<ZipfPopularity>(p.popularity), "providers",
            "CT validation scales Zipf popularity only");
  }
  if (s.mode == Mode::market) {
    check(s.market.price > 0.0, "market.price", "must be > 0");
    check(s.market.rounds >= 2, "market.rounds", "must be >= 2");
  }
}

inline Scenario from_json(const Json& j) {
  using namespace detail;
  check(j.is_object(), "", "scenario must be an object");
  Scenario s;
  s.schema_version = read<int>(j, "", "schema_version");
  check(s.schema_version == kSchemaVersion, "schema_version",
        "unsupported version " + std::to_string(s.schema_version));
  s.name = read_or<std::string>(j, "", "name", "");
  const auto mode = read<std::string>(j, "", "mode");
  bool known = false;
  for (const auto& [m, name] : mode_names())
    if (name == mode) {
      s.mode = m;
      known = true;
    }
  check(known, "mode", "unknown mode '" + mode + "'");
  s.capacity = read<double>(j, "", "capacity");
  s.seed = read_or<std::uint64_t>(j, "", "seed", 1);
  if (j.contains("providers")) {
    const Json& ps = j["providers"];
    check(ps.is_array(), "providers", "expected an array");
    for (std::size_t k = 0; k < ps.size(); ++k)
      s.providers.push_back(provider_from_json(ps[k], "providers[" + std::to_string(k) + "]"));
  }
  if (j.contains("overlap")) {
    const Json& o = j["overlap"];
    s.overlap.enabled = true;
    s.overlap.stride = read_or<std::size_t>(o, "overlap", "stride", 3);
    s.overlap.limit = read_or<std::size_t>(o, "overlap", "limit", 10000);
    const auto ord = read_or<std::string>(o, "overlap", "ordering", "ALIGNED");
    check(ord == "ALIGNED" || ord == "REVERSED", "overlap.ordering",
          "must be ALIGNED or REVERSED");
    s.overlap.ordering = ord == "ALIGNED" ? Ordering::aligned : Ordering::reversed;
  }
  if (j.contains("controller")) {
    const Json& c = j["controller"];
    const std::string p = "controller";
    auto& cfg = s.controller.config;
    cfg.step = read_or<double>(c, p, "step", cfg.step);
    cfg.tolerance = read_or<double>(c, p, "tolerance", cfg.tolerance);
    cfg.floor = read_or<double>(c, p, "floor", cfg.floor);
    cfg.bootstrap_fraction = read_or<double>(c, p, "bootstrap_fraction", cfg.bootstrap_fraction);
    const auto sched = read_or<std::string>(c, p, "schedule", "constant");
    check(sched == "constant" || sched == "diminishing", "controller.schedule",
          "must be constant or diminishing");
    cfg.schedule = sched == "constant" ? online::StepSchedule::constant
                                       : online::StepSchedule::diminishing;
    cfg.schedule_horizon = read_or<double>(c, p, "schedule_horizon", cfg.schedule_horizon);
    cfg.window_requests = read_or<std::uint64_t>(c, p, "window_requests", cfg.window_requests);
    cfg.max_move = read_or<double>(c, p, "max_move", cfg.max_move);
    s.controller.iterations = read_or<int>(c, p, "iterations", s.controller.iterations);
    const auto src = read_or<std::string>(c, p, "source", "exact");
    check(src == "exact" || src == "simulated", "controller.source",
          "must be exact or simulated");
    s.controller.source = src == "exact" ? HitSourceKind::exact : HitSourceKind::simulated;
    s.controller.initial_sizes = read_or<std::vector<double>>(c, p, "initial_sizes", {});
    s.controller.stop_on_convergence = read_or<bool>(c, p, "stop_on_convergence", true);
  }
  if (j.contains("fagin")) {
    const Json& f = j["fagin"];
    const std::string p = "fagin";
    auto& w = s.fagin.workload;
    w.beta = read<double>(f, p, "beta");
    w.shared_mass = read_or<double>(f, p, "shared_mass", 1.0);
    w.own_mass = read_or<std::array<double, 2>>(f, p, "own_mass", {1.0, 1.0});
    w.shared_rate = read<std::array<double, 2>>(f, p, "shared_rate");
    w.own_rate = read<std::array<double, 2>>(f, p, "own_rate");
    for (const char* key : {"shared_cdf", "own_cdf"}) {
      const Json& arr = field(f, p, key);
      check(arr.is_array() && arr.size() == 2, join(p, key), "expected two CDFs");
      auto& target = std::string(key) == "shared_cdf" ? w.shared_cdf : w.own_cdf;
      for (std::size_t k = 0; k < 2; ++k)
        target[k] = cdf_from_json(arr[k], join(p, key) + "[" + std::to_string(k) + "]");
    }
    if (f.contains("strategies")) {
      s.fagin.strategies.clear();
      for (const auto& st : read<std::vector<std::string>>(f, p, "strategies"))
        s.fagin.strategies.push_back(strategy_from_name(st, "fagin.strategies"));
    }
  }
  if (j.contains("ct_validate")) {
    const Json& c = j["ct_validate"];
    s.ct.n_grid = read_or<std::vector<std::size_t>>(c, "ct_validate", "n_grid", s.ct.n_grid);
    s.ct.requests = read_or<std::uint64_t>(c, "ct_validate", "requests", s.ct.requests);
    s.ct.fractions = read_or<std::vector<double>>(c, "ct_validate", "fractions", s.ct.fractions);
  }
  if (j.contains("market")) {
    const Json& m = j["market"];
    s.market.price = read_or<double>(m, "market", "price", s.market.price);
    s.market.rounds = read_or<int>(m, "market", "rounds", s.market.rounds);
    s.market.tolerance = read_or<double>(m, "market", "tolerance", s.market.tolerance);
  }
  s.output = read_or<std::string>(j, "", "output", "");
  validate(s);
  return s;
}

inline Scenario parse(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(Errc::parse_error, e.what());
  }
  return from_json(j);
}

inline std::string serialize(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

inline Scenario load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

// Provider catalogs with the overlap applied. Content sets are listed as provider 1 only,
// provider 2 only, then common, which fixes the partition order.
inline OverlapWorkload overlap_workload(const Scenario& s) {
  require(s.overlap.enabled && s.providers.size() == 2, Errc::invalid_argument,
          "overlap needs two providers");
  std::array<std::vector<double>, 2> p;
  for (std::size_t k = 0; k < 2; ++k)
    p[k] = materialize(s.providers[k].popularity, s.providers[k].file_count());
  const std::size_t common_end = std::min({s.overlap.limit, p[0].size(), p[1].size()});
  auto is_common = [&](std::size_t i) {  // i is 0-based
    return i < common_end && i % s.overlap.stride == 0;
  };
  std::array<std::vector<double>, 2> own, common;
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < p[k].size(); ++i)
      (is_common(i) ? common[k] : own[k]).push_back(p[k][i]);
  if (s.overlap.ordering == Ordering::reversed) std::reverse(common[1].begin(), common[1].end());

  OverlapWorkload w;
  for (const auto& prov : s.providers) w.provider_rates.push_back(prov.arrival_rate);
  auto add_set = [&](std::vector<std::size_t> members, std::vector<std::vector<double>> pops) {
    ContentSet set;
    set.providers = std::move(members);
    set.count = pops.front().size();
    if (set.count == 0) return;
    for (std::size_t m = 0; m < set.providers.size(); ++m) {
      const double mass = stable_sum(pops[m]);
      const double rate = s.providers[set.providers[m]].arrival_rate * mass;
      set.rates.push_back(rate);
      for (double& v : pops[m]) v = mass > 0.0 ? v / mass : 1.0 / static_cast<double>(set.count);
      set.popularity.push_back(std::move(pops[m]));
    }
    w.sets.push_back(std::move(set));
  };
  add_set({0}, {own[0]});
  add_set({1}, {own[1]});
  add_set({0, 1}, {common[0], common[1]});
  return w;
}

// Content groups the scenario's partitions are built from.
inline std::vector<ContentGroup> build_groups(const Scenario& s) {
  if (s.overlap.enabled) return group_contents(overlap_workload(s));
  return group_contents(distinct_workload(s.providers));
}

inline std::vector<UtilitySpec> utilities(const Scenario& s) {
  std::vector<UtilitySpec> u;
  for (const auto& p : s.providers) u.push_back(p.utility);
  return u;
}

// ---------------------------------------------------------------------------------------------
// Built-in scenarios.

inline std::vector<Provider> base_providers() {
  std::vector<Provider> ps(2);
  ps[0].arrival_rate = 15.0;
  ps[0].popularity = ZipfPopularity{0.6, 10000};
  ps[0].utility = UtilitySpec::logarithmic();
  ps[1].arrival_rate = 10.0;
  ps[1].popularity = ZipfPopularity{0.8, 20000};
  ps[1].utility = UtilitySpec::linear();
  return ps;
}

// Controller settings used for the simulated base-case runs.
inline ControllerSpec simulated_controller(std::vector<double> initial) {
  ControllerSpec c;
  c.config.step = 2e7;
  c.config.max_move = 0.05;
  c.config.window_requests = 500'000;
  c.iterations = 300;
  c.source = HitSourceKind::simulated;
  c.initial_sizes = std::move(initial);
  c.stop_on_convergence = false;
  return c;
}

inline std::map<std::string, Scenario> builtin_scenarios() {
  std::map<std::string, Scenario> out;
  auto add = [&](Scenario s) { out.emplace(s.name, std::move(s)); };

  Scenario base;
  base.capacity = 1e4;
  base.providers = base_providers();

  Scenario s = base;
  s.name = "base-distinct-offline";
  s.mode = Mode::offline_distinct;
  add(s);

  s = base;
  s.name = "base-shared-offline";
  s.mode = Mode::offline_grouped;
  s.overlap.enabled = true;
  add(s);

  s.name = "base-shared-reversed-offline";
  s.overlap.ordering = Ordering::reversed;
  add(s);

  s = base;
  s.name = "base-distinct-online";
  s.mode = Mode::online_distinct;
  s.controller.config.step = 1e7;
  s.controller.initial_sizes = {5000, 5000};
  add(s);

  s = base;
  s.name = "base-distinct-online-sim";
  s.mode = Mode::online_distinct;
  s.controller = simulated_controller({5000, 5000});
  add(s);

  s = base;
  s.name = "base-shared-online-sim";
  s.mode = Mode::online_grouped;
  s.overlap.enabled = true;
  s.controller = simulated_controller({4000, 4000, 2000});
  add(s);

  s = base;
  s.name = "base-ct-validate";
  s.mode = Mode::ct_validate;
  add(s);

  s = base;
  s.name = "base-market";
  s.mode = Mode::market;
  add(s);

  s = Scenario{};
  s.name = "counterexample-s2-vs-s3";
  s.mode = Mode::fagin_strategy;
  s.capacity = 1.0;
  s.fagin.workload = fagin::s2_over_s3_counterexample();
  s.fagin.strategies = {fagin::Strategy::s2, fagin::Strategy::s3};
  add(s);
  return out;
}

}  // namespace cachepart::scenario
