#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cachepart/csv.hpp"
#include "cachepart/fagin.hpp"
#include "cachepart/lrusim.hpp"
#include "cachepart/onlinectl.hpp"
#include "cachepart/optimizer.hpp"
#include "cachepart/scenario.hpp"

namespace cachepart::experiments {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-6;           // optimizer KKT tolerance
  std::optional<int> max_iterations;  // optimizer cap and controller budget
};

struct Outputs {
  std::vector<std::pair<std::string, csv::Table>> files;
  bool converged = true;
  std::string message;

  const csv::Table& table(const std::string& name) const {
    for (const auto& [n, t] : files)
      if (n == name) return t;
    fail(Errc::invalid_argument, "no output named " + name);
  }
};

inline void write(const Outputs& out, const std::filesystem::path& dir) {
  for (const auto& [name, table] : out.files) csv::write_atomic(dir / name, table.str());
}

namespace detail {

using scenario::Scenario;

inline OptimizerOptions optimizer_options(const RunOptions& o) {
  OptimizerOptions opts;
  opts.kkt_tolerance = o.tolerance;
  if (o.max_iterations) opts.max_iterations = *o.max_iterations;
  return opts;
}

inline std::vector<std::string> trace_header(std::size_t partitions, std::size_t providers) {
  std::vector<std::string> h{"iteration"};
  for (auto& c : csv::numbered("c", partitions)) h.push_back(c);
  for (auto& c : csv::numbered("h", providers)) h.push_back(c);
  h.push_back("objective");
  h.push_back("converged");
  return h;
}

inline std::vector<std::string> plan_header(const std::string& first, std::size_t partitions,
                                            std::size_t providers,
                                            std::vector<std::string> extra = {}) {
  std::vector<std::string> h{first};
  for (auto& c : csv::numbered("c", partitions)) h.push_back(c);
  for (auto& c : csv::numbered("h", providers)) h.push_back(c);
  h.push_back("objective");
  for (auto& e : extra) h.push_back(e);
  return h;
}

// Sizes reproducing one shared LRU; the whole catalog when it fits.
inline std::vector<double> sharing_sizes(const GroupedCacheModel& model, double capacity) {
  if (model.catalog_size() <= capacity) return model.upper_bounds();
  return model.sharing_sizes(capacity);
}

inline std::vector<double> equal_split(std::size_t parts, double capacity) {
  return std::vector<double>(parts, capacity / static_cast<double>(parts));
}

inline Outputs run_offline_distinct(const Scenario& s, const RunOptions& o) {
  const auto groups = scenario::build_groups(s);
  const auto utils = scenario::utilities(s);
  const std::size_t k = utils.size();
  const GroupedCacheModel model(groups, k);
  const auto opt = optimize_grouped(groups, utils, s.capacity, optimizer_options(o));
  const auto share = sharing_sizes(model, s.capacity);
  const auto share_hits = model.evaluate(share).provider_hits;
  const double share_obj = utility_sum(utils, share_hits);
  const double gain = (opt.objective - share_obj) / std::abs(share_obj);

  Outputs out;
  csv::Table summary(plan_header("plan", groups.size(), k, {"gain"}));
  summary.add(csv::Table::Row{} << "partitioned" << opt.plan.sizes << opt.hit_rates
                                << opt.objective << gain);
  summary.add(csv::Table::Row{} << "sharing" << share << share_hits << share_obj << 0.0);
  csv::Table trace(trace_header(groups.size(), k));
  trace.add(csv::Table::Row{} << opt.iterations << opt.plan.sizes << opt.hit_rates
                              << opt.objective << true);
  out.files.emplace_back("trace.csv", std::move(trace));
  out.files.emplace_back("summary.csv", std::move(summary));
  return out;
}

struct StrategyRow {
  std::string name;
  std::vector<double> sizes;
  std::vector<double> hits;
  double objective = 0.0;
};

// Finite-n strategies for two providers with common content: one shared LRU (S1), one
// partition per provider each holding its own copy of the common files (S2), and partitions
// {own 1, own 2, common} (S3).
inline std::vector<StrategyRow> finite_strategies(const Scenario& s, const RunOptions& o) {
  const auto utils = scenario::utilities(s);
  const auto groups3 = scenario::build_groups(s);
  const auto groups2 = group_contents(distinct_workload(s.providers));
  std::vector<StrategyRow> rows;

  const GroupedCacheModel m3(groups3, utils.size());
  StrategyRow s1{"S1", {s.capacity}, {}, 0.0};
  s1.hits = m3.catalog_size() <= s.capacity ? m3.evaluate(m3.upper_bounds()).provider_hits
                                            : m3.shared_hit_rates(s.capacity);
  s1.objective = utility_sum(utils, s1.hits);
  rows.push_back(s1);

  for (const auto* g : {&groups2, &groups3}) {
    const auto r = optimize_grouped(*g, utils, s.capacity, optimizer_options(o));
    rows.push_back({g == &groups2 ? "S2" : "S3", r.plan.sizes, r.hit_rates, r.objective});
  }
  return rows;
}

inline csv::Table strategy_table(const std::vector<StrategyRow>& rows, std::size_t providers) {
  csv::Table t(plan_header("strategy", 3, providers));
  for (const auto& r : rows) {
    csv::Table::Row row;
    row << r.name;
    for (std::size_t p = 0; p < 3; ++p)
      row << (p < r.sizes.size() ? csv::format(r.sizes[p]) : std::string());
    row << r.hits << r.objective;
    t.add(row);
  }
  return t;
}

inline Outputs run_offline_grouped(const Scenario& s, const RunOptions& o) {
  const auto utils = scenario::utilities(s);
  Outputs out;
  if (!s.overlap.enabled) {
    out = run_offline_distinct(s, o);
    return out;
  }
  const auto rows = finite_strategies(s, o);
  const auto& s3 = rows.back();
  csv::Table trace(trace_header(s3.sizes.size(), utils.size()));
  trace.add(csv::Table::Row{} << 0 << s3.sizes << s3.hits << s3.objective << true);
  out.files.emplace_back("trace.csv", std::move(trace));
  out.files.emplace_back("summary.csv", strategy_table(rows, utils.size()));
  return out;
}

struct OnlineRun {
  online::RunTrace trace;
  OptimumReport optimum;
  std::vector<double> window_mean_sizes;
  std::vector<double> window_mean_hits;
};

// Mean of the last `window` rows (all rows when fewer).
inline std::pair<std::vector<double>, std::vector<double>> tail_mean(const online::RunTrace& t,
                                                                     std::size_t window) {
  const std::size_t n = std::min(window, t.rows.size());
  std::vector<double> c(t.rows.back().sizes.size(), 0.0), h(t.rows.back().hits.size(), 0.0);
  for (std::size_t i = t.rows.size() - n; i < t.rows.size(); ++i) {
    for (std::size_t p = 0; p < c.size(); ++p) c[p] += t.rows[i].sizes[p] / static_cast<double>(n);
    for (std::size_t k = 0; k < h.size(); ++k) h[k] += t.rows[i].hits[k] / static_cast<double>(n);
  }
  return {c, h};
}

inline OnlineRun online_run(const Scenario& s, const RunOptions& o) {
  const auto groups = scenario::build_groups(s);
  const auto utils = scenario::utilities(s);
  const auto kind = s.mode == scenario::Mode::online_distinct ? online::ControllerKind::distinct
                                                              : online::ControllerKind::grouped;
  if (kind == online::ControllerKind::distinct)
    require(!s.overlap.enabled, Errc::validation_error,
            "overlap: ONLINE_DISTINCT needs providers with distinct content");
  auto initial = s.controller.initial_sizes;
  if (initial.empty()) initial = equal_split(groups.size(), s.capacity);
  require(initial.size() == groups.size(), Errc::validation_error,
          "controller.initial_sizes: expected " + std::to_string(groups.size()) + " entries");

  OnlineRun run;
  run.optimum = optimize_grouped(groups, utils, s.capacity, optimizer_options(o));
  // A partition never needs more slots than it has files.
  const auto upper = GroupedCacheModel(groups, utils.size()).upper_bounds();
  online::HitSource source;
  if (s.controller.source == scenario::HitSourceKind::exact) {
    source = online::exact_source(std::make_shared<const GroupedCacheModel>(groups, utils.size()));
  } else {
    source = online::simulated_source(groups, utils.size(), initial,
                                      s.controller.config.window_requests, o.seed.value_or(s.seed));
  }
  const int budget = o.max_iterations.value_or(s.controller.iterations);
  run.trace = online::run_controller(kind, utils, s.controller.config, initial, source, budget,
                                     s.controller.stop_on_convergence, upper);
  std::tie(run.window_mean_sizes, run.window_mean_hits) = tail_mean(run.trace, 100);
  return run;
}

inline csv::Table trace_table(const online::RunTrace& t) {
  csv::Table table(trace_header(t.rows.front().sizes.size(), t.rows.front().hits.size()));
  for (const auto& r : t.rows)
    table.add(csv::Table::Row{} << r.iteration << r.sizes << r.hits << r.objective
                                << r.converged);
  return table;
}

inline csv::Table online_summary(const OnlineRun& run, std::span<const UtilitySpec> utils) {
  const auto& last = run.trace.rows.back();
  csv::Table t(plan_header("row", last.sizes.size(), last.hits.size()));
  t.add(csv::Table::Row{} << "final" << last.sizes << last.hits << last.objective);
  t.add(csv::Table::Row{} << "final_window_mean" << run.window_mean_sizes << run.window_mean_hits
                          << utility_sum(utils, run.window_mean_hits));
  t.add(csv::Table::Row{} << "optimum" << run.optimum.plan.sizes << run.optimum.hit_rates
                          << run.optimum.objective);
  return t;
}

inline Outputs run_online(const Scenario& s, const RunOptions& o) {
  const auto run = online_run(s, o);
  const auto utils = scenario::utilities(s);
  Outputs out;
  out.files.emplace_back("trace.csv", trace_table(run.trace));
  out.files.emplace_back("summary.csv", online_summary(run, utils));
  if (s.controller.stop_on_convergence && !run.trace.converged) {
    out.converged = false;
    out.message = "controller did not converge within " +
                  std::to_string(run.trace.rows.size() - 1) + " iterations";
  }
  return out;
}

inline csv::Table fagin_table(const fagin::SharedSetWorkload& w,
                              const std::vector<fagin::Strategy>& strategies) {
  std::vector<std::string> h{"strategy"};
  for (auto& c : csv::numbered("tau", 3)) h.push_back(c);
  for (auto& c : csv::numbered("split", 3)) h.push_back(c);
  h.insert(h.end(), {"miss_1", "miss_2", "hit_probability"});
  csv::Table t(h);
  for (auto st : strategies) {
    const auto r = fagin::optimize_strategy(w, st);
    csv::Table::Row row;
    row << std::string(fagin::to_string(st));
    for (std::size_t p = 0; p < 3; ++p)
      row << (p < r.tau.size() ? csv::format(r.tau[p]) : std::string());
    for (std::size_t p = 0; p < 3; ++p)
      row << (p < r.split.size() ? csv::format(r.split[p]) : std::string());
    row << r.miss[0] << r.miss[1] << r.hit_probability;
    t.add(row);
  }
  return t;
}

inline Outputs run_fagin(const Scenario& s) {
  Outputs out;
  out.files.emplace_back("summary.csv", fagin_table(s.fagin.workload, s.fagin.strategies));
  return out;
}

inline sim::ScalingWorkload scaling_workload(const Scenario& s) {
  sim::ScalingWorkload w;
  const double base = static_cast<double>(s.providers.front().file_count());
  for (const auto& p : s.providers) {
    w.exponents.push_back(std::get<ZipfPopularity>(p.popularity).exponent);
    w.masses.push_back(static_cast<double>(p.file_count()) / base);
    w.rates.push_back(p.arrival_rate);
  }
  w.fractions = s.ct.fractions;
  return w;
}

inline Outputs run_ct_validate(const Scenario& s, const RunOptions& o) {
  const auto rows = sim::ct_vs_sim_report(scaling_workload(s), s.ct.n_grid, s.ct.requests,
                                          o.seed.value_or(s.seed));
  csv::Table t({"n", "ct_hit_probability", "simulated_hit_probability", "gap", "standard_error"});
  for (const auto& r : rows)
    t.add(csv::Table::Row{} << r.n << r.ct_hit_probability << r.simulated_hit_probability << r.gap
                            << r.standard_error);
  Outputs out;
  out.files.emplace_back("summary.csv", std::move(t));
  return out;
}

inline Outputs run_market(const Scenario& s) {
  const auto groups = scenario::build_groups(s);
  const auto utils = scenario::utilities(s);
  std::vector<double> rates;
  for (const auto& p : s.providers) rates.push_back(p.arrival_rate);
  const auto m = market_iteration(groups, utils, rates, s.market.price, s.capacity,
                                  s.market.rounds, s.market.tolerance);
  std::vector<std::string> h{"row"};
  for (auto& c : csv::numbered("w", utils.size())) h.push_back(c);
  for (auto& c : csv::numbered("c", groups.size())) h.push_back(c);
  for (auto& c : csv::numbered("h", utils.size())) h.push_back(c);
  h.insert(h.end(), {"objective", "residual", "rounds"});
  csv::Table t(h);
  t.add(csv::Table::Row{} << "market" << m.weights << m.allocation.plan.sizes
                          << m.allocation.hit_rates << m.allocation.objective << m.residual
                          << m.rounds);
  csv::Table trace(trace_header(groups.size(), utils.size()));
  trace.add(csv::Table::Row{} << m.rounds << m.allocation.plan.sizes << m.allocation.hit_rates
                              << utility_sum(utils, m.allocation.hit_rates) << m.converged);
  Outputs out;
  out.files.emplace_back("trace.csv", std::move(trace));
  out.files.emplace_back("summary.csv", std::move(t));
  return out;
}

}  // namespace detail

inline Outputs run(const scenario::Scenario& s, const RunOptions& options = {}) {
  scenario::validate(s);
  using scenario::Mode;
  switch (s.mode) {
    case Mode::offline_distinct: return detail::run_offline_distinct(s, options);
    case Mode::offline_grouped: return detail::run_offline_grouped(s, options);
    case Mode::online_distinct:
    case Mode::online_grouped: return detail::run_online(s, options);
    case Mode::fagin_strategy: return detail::run_fagin(s);
    case Mode::ct_validate: return detail::run_ct_validate(s, options);
    case Mode::market: return detail::run_market(s);
  }
  fail(Errc::invalid_argument, "unknown mode");
}

// ---------------------------------------------------------------------------------------------
// Figure reproductions.

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig3", "fig4a", "fig4b", "fig5-sweeps", "fig6",
                                            "fig7", "fig8",  "fig9",  "counterexample"};
  return ids;
}

struct SweepPoint {
  double value = 0.0;
  std::vector<double> sizes;
  std::vector<double> hits;
  double objective = 0.0;
};

// Offline optimum of the base scenario for each parameter value; `apply` edits the scenario.
template <class Apply>
std::vector<SweepPoint> sweep(const scenario::Scenario& base, const std::vector<double>& values,
                              Apply&& apply, const RunOptions& o = {}) {
  std::vector<SweepPoint> out;
  for (double v : values) {
    scenario::Scenario s = base;
    apply(s, v);
    const auto groups = scenario::build_groups(s);
    const auto r =
        optimize_grouped(groups, scenario::utilities(s), s.capacity, detail::optimizer_options(o));
    out.push_back({v, r.plan.sizes, r.hit_rates, r.objective});
  }
  return out;
}

inline csv::Table sweep_table(const std::string& column, const std::vector<SweepPoint>& pts) {
  csv::Table t(detail::plan_header(column, pts.front().sizes.size(), pts.front().hits.size()));
  for (const auto& p : pts) t.add(csv::Table::Row{} << p.value << p.sizes << p.hits << p.objective);
  return t;
}

namespace grids {
inline const std::vector<double> w1{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
inline const std::vector<double> lambda1{5, 10, 15, 20, 25, 30, 35, 40};
inline const std::vector<double> z1{0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2};
inline const std::vector<double> alpha1{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
inline const std::vector<double> alpha{0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0};
}  // namespace grids

inline scenario::Scenario base_scenario(bool shared, scenario::Ordering ordering) {
  scenario::Scenario s;
  s.capacity = 1e4;
  s.providers = scenario::base_providers();
  s.mode = shared ? scenario::Mode::offline_grouped : scenario::Mode::offline_distinct;
  s.overlap.enabled = shared;
  s.overlap.ordering = ordering;
  return s;
}

inline Outputs fig5_sweeps(const RunOptions& o) {
  const auto base = base_scenario(false, scenario::Ordering::aligned);
  Outputs out;
  out.files.emplace_back(
      "fig5_w1.csv",
      sweep_table("w1", sweep(base, grids::w1, [](auto& s, double v) {
                    s.providers[0].utility.weight = v;
                  }, o)));
  out.files.emplace_back(
      "fig5_lambda1.csv",
      sweep_table("lambda1", sweep(base, grids::lambda1, [](auto& s, double v) {
                    s.providers[0].arrival_rate = v;
                  }, o)));
  out.files.emplace_back(
      "fig5_z1.csv", sweep_table("z1", sweep(base, grids::z1, [](auto& s, double v) {
                                   std::get<ZipfPopularity>(s.providers[0].popularity).exponent = v;
                                 }, o)));
  out.files.emplace_back(
      "fig5_alpha1.csv",
      sweep_table("alpha1", sweep(base, grids::alpha1, [](auto& s, double v) {
                    s.providers[0].utility = UtilitySpec::alpha_fair(v);
                  }, o)));
  return out;
}

inline Outputs alpha_figure(bool shared, const std::string& file, const RunOptions& o) {
  const auto base = base_scenario(shared, scenario::Ordering::aligned);
  Outputs out;
  out.files.emplace_back(file, sweep_table("alpha", sweep(base, grids::alpha, [](auto& s, double v) {
                                             for (auto& p : s.providers)
                                               p.utility = UtilitySpec::alpha_fair(v);
                                           }, o)));
  return out;
}

inline Outputs fig3(const RunOptions& o) {
  auto s = base_scenario(false, scenario::Ordering::aligned);
  Outputs out = detail::run_offline_distinct(s, o);
  out.files.erase(out.files.begin());  // the trace row repeats the summary
  out.files.front().first = "fig3_summary.csv";
  // Objective along the split C_1 + C_2 = C.
  const auto groups = scenario::build_groups(s);
  const auto utils = scenario::utilities(s);
  const GroupedCacheModel model(groups, utils.size());
  csv::Table curve(detail::plan_header("c1_fraction", 2, 2));
  for (int i = 1; i < 100; ++i) {
    const double f = i / 100.0;
    const std::vector<double> sizes{f * s.capacity, (1.0 - f) * s.capacity};
    const auto h = model.evaluate(sizes).provider_hits;
    curve.add(csv::Table::Row{} << f << sizes << h << utility_sum(utils, h));
  }
  out.files.emplace_back("fig3_curve.csv", std::move(curve));
  return out;
}

inline Outputs fig4(scenario::Ordering ordering, const std::string& file, const RunOptions& o) {
  const auto s = base_scenario(true, ordering);
  Outputs out;
  out.files.emplace_back(file, detail::strategy_table(detail::finite_strategies(s, o), 2));
  return out;
}

inline scenario::Scenario online_scenario(bool shared, UtilitySpec u2) {
  auto s = base_scenario(shared, scenario::Ordering::aligned);
  s.mode = shared ? scenario::Mode::online_grouped : scenario::Mode::online_distinct;
  s.providers[1].utility = u2;
  s.controller = scenario::simulated_controller(shared ? std::vector<double>{4000, 4000, 2000}
                                                       : std::vector<double>{5000, 5000});
  return s;
}

inline Outputs fig8(const RunOptions& o) {
  Outputs out;
  csv::Table summary({"u2", "optimum_c_1", "optimum_c_2", "mean_c_1", "mean_c_2"});
  const std::vector<std::pair<std::string, UtilitySpec>> variants{
      {"linear", UtilitySpec::linear()},
      {"log", UtilitySpec::logarithmic()},
      {"neg_inverse", UtilitySpec::neg_inverse()}};
  for (const auto& [name, u2] : variants) {
    const auto s = online_scenario(false, u2);
    const auto run = detail::online_run(s, o);
    out.files.emplace_back("fig8_" + name + ".csv", detail::trace_table(run.trace));
    summary.add(csv::Table::Row{} << name << run.optimum.plan.sizes << run.window_mean_sizes);
  }
  out.files.emplace_back("fig8_summary.csv", std::move(summary));
  return out;
}

inline Outputs fig9(const RunOptions& o) {
  const auto s = online_scenario(true, UtilitySpec::linear());
  const auto run = detail::online_run(s, o);
  Outputs out;
  out.files.emplace_back("fig9.csv", detail::trace_table(run.trace));
  out.files.emplace_back("fig9_summary.csv", detail::online_summary(run, scenario::utilities(s)));
  return out;
}

inline Outputs reproduce(const std::string& figure, const RunOptions& o = {}) {
  if (figure == "fig3") return fig3(o);
  if (figure == "fig4a") return fig4(scenario::Ordering::aligned, "fig4a.csv", o);
  if (figure == "fig4b") return fig4(scenario::Ordering::reversed, "fig4b.csv", o);
  if (figure == "fig5-sweeps") return fig5_sweeps(o);
  if (figure == "fig6") return alpha_figure(false, "fig6.csv", o);
  if (figure == "fig7") return alpha_figure(true, "fig7.csv", o);
  if (figure == "fig8") return fig8(o);
  if (figure == "fig9") return fig9(o);
  if (figure == "counterexample") {
    auto out = detail::run_fagin(scenario::builtin_scenarios().at("counterexample-s2-vs-s3"));
    out.files.front().first = "counterexample.csv";
    return out;
  }
  fail(Errc::unknown_figure, "unknown figure '" + figure + "'");
}

}  // namespace cachepart::experiments
