#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace cachepart;
using scenario::Scenario;

namespace {

std::string header_line(const csv::Table& t) {
  const auto s = t.str();
  return s.substr(0, s.find('\n'));
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Scenario, BuiltinsRoundTrip) {
  for (const auto& [name, s] : scenario::builtin_scenarios()) {
    const auto text = scenario::serialize(s);
    EXPECT_EQ(scenario::parse(text), s) << name;
    EXPECT_EQ(scenario::serialize(scenario::parse(text)), text) << name;
  }
}

TEST(Scenario, ValidationNamesTheField) {
  auto s = scenario::builtin_scenarios().at("base-distinct-offline");
  auto j = nlohmann::json::parse(scenario::serialize(s));
  j["capacity"] = -1.0;
  const auto msg = error_text([&] { scenario::parse(j.dump()); });
  EXPECT_NE(msg.find("capacity"), std::string::npos) << msg;
  EXPECT_ERRC(scenario::parse(j.dump()), Errc::validation_error);

  j = nlohmann::json::parse(scenario::serialize(s));
  j["providers"][1]["arrival_rate"] = 0.0;
  const auto msg2 = error_text([&] { scenario::parse(j.dump()); });
  EXPECT_NE(msg2.find("providers[1]"), std::string::npos) << msg2;
}

TEST(Scenario, MalformedJson) {
  EXPECT_ERRC(scenario::parse("{\"capacity\": 3,"), Errc::parse_error);
  EXPECT_ERRC(scenario::load("/nonexistent/file.json"), Errc::io_error);
}

TEST(Scenario, OverlapLayout) {
  auto s = scenario::builtin_scenarios().at("base-shared-offline");
  const auto w = scenario::overlap_workload(s);
  ASSERT_EQ(w.sets.size(), 3u);
  EXPECT_EQ(w.sets[2].count, 3334u);
  EXPECT_EQ(w.sets[0].count, 10000u - 3334u);
  EXPECT_EQ(w.sets[1].count, 20000u - 3334u);
  EXPECT_NEAR(w.sets[0].rates[0] + w.sets[2].rates[0], 15.0, 1e-9);
  s.overlap.ordering = scenario::Ordering::reversed;
  const auto r = scenario::overlap_workload(s);
  EXPECT_DOUBLE_EQ(r.sets[2].popularity[1].front(), w.sets[2].popularity[1].back());
}

TEST(Scenario, SummaryHeaders) {
  const auto b = scenario::builtin_scenarios();
  const auto d = experiments::run(b.at("base-distinct-offline"));
  EXPECT_EQ(header_line(d.table("summary.csv")), "plan,c_1,c_2,h_1,h_2,objective,gain");
  EXPECT_EQ(header_line(d.table("trace.csv")), "iteration,c_1,c_2,h_1,h_2,objective,converged");
  const auto f = experiments::run(b.at("counterexample-s2-vs-s3"));
  EXPECT_EQ(header_line(f.table("summary.csv")),
            "strategy,tau_1,tau_2,tau_3,split_1,split_2,split_3,miss_1,miss_2,hit_probability");
  EXPECT_EQ(f.table("summary.csv").rows().size(), 2u);
}

TEST(Scenario, SharedRunIsDeterministic) {
  const auto s = scenario::builtin_scenarios().at("base-shared-offline");
  const auto a = experiments::run(s);
  const auto b = experiments::run(s);
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i)
    EXPECT_EQ(a.files[i].second.str(), b.files[i].second.str());
}

TEST(Scenario, SimulatedOnlineRunIsSeeded) {
  auto s = scenario::builtin_scenarios().at("base-distinct-online-sim");
  s.controller.iterations = 4;
  s.controller.config.window_requests = 20000;
  const auto a = experiments::run(s).table("trace.csv").str();
  EXPECT_EQ(a, experiments::run(s).table("trace.csv").str());
  experiments::RunOptions o;
  o.seed = 99;
  EXPECT_NE(a, experiments::run(s, o).table("trace.csv").str());
}

TEST(Scenario, WritesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "cachepart_test_out";
  std::filesystem::remove_all(dir);
  const auto out = experiments::reproduce("counterexample");
  experiments::write(out, dir);
  std::ifstream f(dir / "counterexample.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), out.table("counterexample.csv").str());
  std::filesystem::remove_all(dir);
}

TEST(Scenario, UnknownFigure) {
  EXPECT_ERRC(experiments::reproduce("fig99"), Errc::unknown_figure);
}

TEST(Csv, FormatsNumbers) {
  EXPECT_EQ(csv::format(0.1), "0.1");
  EXPECT_EQ(csv::format(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(csv::format(std::numeric_limits<double>::infinity()), "inf");
  csv::Table t({"a", "b"});
  EXPECT_ERRC(t.add(csv::Table::Row{} << 1.0), Errc::invalid_argument);
}
