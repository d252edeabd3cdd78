#include "support.hpp"

using namespace cachepart;
using namespace cachepart::online;

namespace {

ControllerState state_at(std::vector<double> sizes, double step) {
  ControllerState s;
  s.config.step = step;
  s.sizes = sizes;
  s.previous_sizes = sizes;
  s.delta.assign(sizes.size(), 0.0);
  return s;
}

std::vector<Provider> small_pair() {
  return {testing_support::zipf_provider(15.0, 0.6, 1000, UtilitySpec::logarithmic()),
          testing_support::zipf_provider(10.0, 0.8, 2000, UtilitySpec::linear())};
}

}  // namespace

TEST(Controller, MovesAgainstMeanMarginal) {
  const auto r = online::detail::apply_marginals(state_at({100.0, 100.0}, 10.0), {3.0, 1.0});
  EXPECT_FALSE(r.converged);
  EXPECT_DOUBLE_EQ(r.eta, 2.0);
  EXPECT_DOUBLE_EQ(r.state.sizes[0], 110.0);
  EXPECT_DOUBLE_EQ(r.state.sizes[1], 90.0);
  EXPECT_EQ(r.state.iteration, 1);
}

TEST(Controller, EqualMarginalsConverge) {
  const auto r = online::detail::apply_marginals(state_at({30.0, 70.0, 50.0}, 10.0), {0.5, 0.5, 0.5});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.state.sizes, (std::vector<double>{30.0, 70.0, 50.0}));
}

TEST(Controller, MoveCapScalesWholeStep) {
  auto s = state_at({50.0, 50.0}, 1000.0);
  s.config.max_move = 0.05;
  const auto r = online::detail::apply_marginals(s, {3.0, 1.0});
  EXPECT_NEAR(r.state.sizes[0], 55.0, 1e-12);
  EXPECT_NEAR(r.state.sizes[1], 45.0, 1e-12);
}

TEST(Controller, FloorKeepsTotal) {
  const auto out = apply_floor({-5.0, 50.0, 55.0}, 1.0, 100.0);
  for (double c : out) EXPECT_GE(c, 1.0);
  EXPECT_NEAR(std::accumulate(out.begin(), out.end(), 0.0), 100.0, 1e-12);
  EXPECT_ERRC(apply_floor({1.0, 1.0}, 2.0, 2.0), Errc::infeasible_split);
}

TEST(Controller, PartitionAtCapStopsCounting) {
  auto s = state_at({40.0, 40.0, 20.0}, 10.0);
  s.upper = {100.0, 100.0, 20.0};
  const auto r = online::detail::apply_marginals(s, {1.0, 1.0, 5.0});
  EXPECT_TRUE(r.converged);
  EXPECT_DOUBLE_EQ(r.eta, 1.0);
}

TEST(Controller, CapsClampTheMove) {
  auto s = state_at({40.0, 40.0, 20.0}, 10.0);
  s.upper = {100.0, 100.0, 25.0};
  const auto r = online::detail::apply_marginals(s, {1.0, 1.0, 5.0});
  EXPECT_FALSE(r.converged);
  EXPECT_NEAR(r.state.sizes[0], 37.5, 1e-9);
  EXPECT_NEAR(r.state.sizes[1], 37.5, 1e-9);
  EXPECT_NEAR(r.state.sizes[2], 25.0, 1e-9);
}

TEST(Controller, StallsWhenPinnedAtFloor) {
  auto s = state_at({1.0, 3.0}, 4.0);
  EXPECT_ERRC(online::detail::apply_marginals(s, {-1.0, 1.0}), Errc::stalled);
}

TEST(Controller, BootstrapIsAntisymmetric) {
  ControllerConfig cfg;
  const std::vector<double> init{500.0, 500.0};
  const auto s = start_controller(cfg, init, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(s.sizes[0], 510.0);
  EXPECT_DOUBLE_EQ(s.sizes[1], 490.0);
}

TEST(Controller, RejectsBadConfig) {
  ControllerConfig cfg;
  cfg.step = 0.0;
  EXPECT_ERRC(cfg.validate(), Errc::invalid_argument);
  cfg = {};
  cfg.max_move = 1.5;
  EXPECT_ERRC(cfg.validate(), Errc::invalid_argument);
}

TEST(Controller, ConservesCapacityAndConverges) {
  const auto ps = small_pair();
  const auto groups = group_contents(distinct_workload(ps));
  const auto u = utilities_of(ps);
  const double c = 1000.0;
  const auto opt = optimize_distinct(ps, c);
  ControllerConfig cfg;
  cfg.step = 1e5;
  cfg.tolerance = 1e-7;
  const std::vector<double> init{500.0, 500.0};
  auto model = std::make_shared<const GroupedCacheModel>(groups, 2);
  const auto trace = run_controller(ControllerKind::distinct, u, cfg, init, exact_source(model), 500);
  for (const auto& row : trace.rows)
    EXPECT_NEAR(std::accumulate(row.sizes.begin(), row.sizes.end(), 0.0), c, 1e-9 * c);
  EXPECT_NEAR(trace.rows.back().sizes[0], opt.plan.sizes[0], 0.005 * c);
}

TEST(Controller, GroupedMatchesDistinctOnDisjointContent) {
  const auto ps = small_pair();
  const auto groups = group_contents(distinct_workload(ps));
  const auto u = utilities_of(ps);
  const double c = 1000.0;
  const auto opt = optimize_distinct(ps, c);
  ControllerConfig cfg;
  cfg.step = 1e5;
  cfg.tolerance = 1e-7;
  const std::vector<double> init{500.0, 500.0};
  auto model = std::make_shared<const GroupedCacheModel>(groups, 2);
  const auto a = run_controller(ControllerKind::distinct, u, cfg, init, exact_source(model), 500);
  const auto b = run_controller(ControllerKind::grouped, u, cfg, init, exact_source(model), 500);
  EXPECT_NEAR(a.rows.back().sizes[0], b.rows.back().sizes[0], 0.005 * c);
  EXPECT_NEAR(b.rows.back().sizes[0], opt.plan.sizes[0], 0.005 * c);
}

TEST(Controller, AnalyticStepFixedAtOptimum) {
  const auto ps = small_pair();
  const auto groups = group_contents(distinct_workload(ps));
  const auto u = utilities_of(ps);
  const double c = 1000.0;
  const auto opt = optimize_distinct(ps, c);
  const GroupedCacheModel model(groups, 2);
  const auto e = model.evaluate(opt.plan.sizes);
  PenaltySpec pen;
  pen.slope = u_prime(u[0], e.provider_hits[0]) * e.marginal[0][0];
  pen.base_capacity = c;
  const auto next = gradient_step_analytic(model, u, pen, opt.plan.sizes, 100.0);
  for (std::size_t p = 0; p < 2; ++p) EXPECT_NEAR(next[p], opt.plan.sizes[p], 1e-3);
  // Away from the optimum, inside the penalized region, the step raises the objective.
  const std::vector<double> off{300.0, 750.0};
  const auto moved = gradient_step_analytic(model, u, pen, off, 100.0);
  EXPECT_GT(penalized_objective(model, u, pen, moved), penalized_objective(model, u, pen, off));
}

TEST(Controller, SimulatedSourceIsDeterministic) {
  const auto ps = small_pair();
  const auto groups = group_contents(distinct_workload(ps));
  const std::vector<double> sizes{300.0, 700.0};
  auto a = simulated_source(groups, 2, sizes, 20000, 5);
  auto b = simulated_source(groups, 2, sizes, 20000, 5);
  EXPECT_EQ(a(sizes), b(sizes));
}
