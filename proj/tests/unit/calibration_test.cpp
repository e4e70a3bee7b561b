#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "decarb/calibration.hpp"
#include "fixtures.hpp"

using namespace decarb;
using namespace decarb::testing;

namespace {

const std::string& base_config() {
  static const std::string text = slurp(data_file("fixture_config.json"));
  return text;
}

SweepSpec small_spec() {
  SweepSpec s;
  s.burn_in = 2;
  s.horizon = 8;
  s.seed = 5;
  s.targets = {{Moment::MeanInflation, 0.0, 1.0}};
  return s;
}

IndicatorFrame frame(int t, Cents gdp, double unemployment, double inflation) {
  IndicatorFrame f;
  f.t = t;
  f.gdp = gdp;
  f.unemployment = unemployment;
  f.inflation = inflation;
  return f;
}

}  // namespace

TEST(Moments, AfterBurnIn) {
  const std::vector<IndicatorFrame> frames = {frame(0, 100, 0.9, 0.9), frame(1, 200, 0.1, 0.01), frame(2, 400, 0.3, 0.03)};
  const auto m = compute_moments(frames, 1);
  EXPECT_DOUBLE_EQ(m.mean_unemployment, 0.2);
  EXPECT_DOUBLE_EQ(m.mean_inflation, 0.02);
  EXPECT_DOUBLE_EQ(m.mean_gdp_growth, std::log(2.0));
}

TEST(Loss, NonNegativeAndZeroOnTarget) {
  Moments m;
  m.mean_inflation = 0.01;
  m.mean_unemployment = 0.05;
  const std::vector<CalibrationTarget> on = {{Moment::MeanInflation, 0.01, 2.0}, {Moment::MeanUnemployment, 0.05, 1.0}};
  EXPECT_EQ(calibration_loss(m, on), 0.0);
  const std::vector<CalibrationTarget> off = {{Moment::MeanInflation, 0.0, 2.0}, {Moment::MeanUnemployment, 0.07, 0.5}};
  EXPECT_DOUBLE_EQ(calibration_loss(m, off), 2.0 * 1e-4 + 0.5 * 4e-4);
}

TEST(Ranking, TiesByGridIndex) {
  std::vector<SweepResult> r(5);
  const double losses[] = {0.3, 0.1, 0.3, 0.0, 0.1};
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i].grid_index = 4 - i;
    r[i].loss = losses[i];
  }
  rank_results(r);
  std::vector<std::size_t> order;
  for (const auto& x : r) order.push_back(x.grid_index);
  EXPECT_EQ(order, (std::vector<std::size_t>{1, 0, 3, 2, 4}));
}

TEST(Grid, CartesianLastFastest) {
  SweepSpec s = small_spec();
  s.parameters = {{"a", 0.0, 1.0, 2}, {"b", 10.0, 30.0, 3}};
  const auto g = sweep_grid(s);
  ASSERT_EQ(g.size(), 6U);
  EXPECT_EQ(g[1], (std::vector<double>{0.0, 20.0}));
  EXPECT_EQ(g[5], (std::vector<double>{1.0, 30.0}));
}

TEST(SweepSpecTest, Validation) {
  auto s = small_spec();
  s.parameters = {{"markup_drift", 0.0, 1.0, 1}};
  EXPECT_THROW(s.validate(), CalibrationError);
  s = small_spec();
  s.burn_in = 8;
  EXPECT_THROW(s.validate(), CalibrationError);
  EXPECT_NO_THROW(load_sweep(data_file("sweep_fixture.json")).validate());
  EXPECT_THROW(parse_sweep(R"({"horizon":4,"seed":1,"targets":[{"moment":"gdp","target":0}]})"), CalibrationError);
}

TEST(Sweep, BudgetExceeded) {
  auto s = small_spec();
  s.parameters = {{"markup_drift", 0.0, 0.1, 10}, {"taylor_pi", 0.0, 1.0, 10}};
  s.budget = 99;
  try {
    sweep(s, base_config(), data_dir(), std::nullopt);
    FAIL();
  } catch (const CalibrationError& e) {
    EXPECT_EQ(e.kind(), CalibrationError::Kind::BudgetExceeded);
  }
}

TEST(Sweep, UnknownParameterNamed) {
  auto s = small_spec();
  s.parameters = {{"behavior.no_such_knob", 0.0, 1.0, 2}};
  try {
    sweep(s, base_config(), data_dir(), std::nullopt);
    FAIL();
  } catch (const CalibrationError& e) {
    EXPECT_EQ(e.kind(), CalibrationError::Kind::UnknownParameter);
    EXPECT_NE(std::string(e.what()).find("grid point 0"), std::string::npos);
  }
}

TEST(Sweep, SinglePointAndZeroLossFirst) {
  auto s = small_spec();
  const auto one = sweep(s, base_config(), data_dir(), std::nullopt);
  ASSERT_EQ(one.size(), 1U);
  EXPECT_GE(one[0].loss, 0.0);
  EXPECT_DOUBLE_EQ(one[0].loss, one[0].moments.mean_inflation * one[0].moments.mean_inflation);

  // Re-target the sweep on the moment that grid point 1 actually produces.
  s.parameters = {{"markup_drift", 0.005, 0.02, 2}};
  const auto first = sweep(s, base_config(), data_dir(), std::nullopt);
  const auto& p1 = *std::find_if(first.begin(), first.end(), [](const SweepResult& r) { return r.grid_index == 1; });
  s.targets = {{Moment::MeanInflation, p1.moments.mean_inflation, 1.0},
               {Moment::MeanUnemployment, p1.moments.mean_unemployment, 1.0}};
  const auto ranked = sweep(s, base_config(), data_dir(), std::nullopt);
  EXPECT_EQ(ranked[0].grid_index, 1U);
  EXPECT_EQ(ranked[0].loss, 0.0);
  EXPECT_GT(ranked[1].loss, 0.0);
}

TEST(Sweep, ThreeByThreeMatchesExhaustiveOracle) {
  auto s = small_spec();
  s.parameters = {{"markup_drift", 0.005, 0.02, 3}, {"propensity_to_consume", 0.2, 0.3, 3}};
  const auto ranked = sweep(s, base_config(), data_dir(), std::nullopt);
  ASSERT_EQ(ranked.size(), 9U);

  // Oracle: every grid point run independently through the plain runner.
  const auto grid = sweep_grid(s);
  double best = INFINITY;
  for (const auto& point : grid) {
    const auto patch = "{\"horizon_quarters\":8,\"seed\":5,\"behavior\":{\"markup_drift\":" + std::to_string(point[0]) +
                       "},\"population\":{\"propensity_to_consume\":" + std::to_string(point[1]) + "}}";
    const auto run = run_simulation(fixture_config(patch), nullptr);
    best = std::min(best, std::abs(compute_moments(run.frames, s.burn_in).mean_inflation));
  }
  EXPECT_EQ(std::abs(ranked[0].moments.mean_inflation), best);
  for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_LE(ranked[i - 1].loss, ranked[i].loss);
}

TEST(Sweep, CacheEqualsFreshRun) {
  TempDir dir("cache");
  auto s = small_spec();
  s.parameters = {{"taylor_pi", 0.25, 0.75, 2}};
  const auto fresh = sweep(s, base_config(), data_dir(), dir.path());
  const auto again = sweep(s, base_config(), data_dir(), dir.path(), 2);
  ASSERT_EQ(fresh.size(), again.size());
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    EXPECT_FALSE(fresh[i].cached);
    EXPECT_TRUE(again[i].cached);
    EXPECT_EQ(fresh[i].grid_index, again[i].grid_index);
    EXPECT_EQ(fresh[i].loss, again[i].loss);
    EXPECT_EQ(fresh[i].moments.mean_unemployment, again[i].moments.mean_unemployment);
    EXPECT_EQ(fresh[i].moments.mean_gdp_growth, again[i].moments.mean_gdp_growth);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / fresh[i].config_hash / "5.json"));
  }
  EXPECT_EQ(sweep_results_json(s, fresh), sweep_results_json(s, again));
}
