#include <gtest/gtest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "decarb/metrics.hpp"
#include "decarb/runner.hpp"
#include "fixtures.hpp"

using namespace decarb;
using namespace decarb::testing;
using json = nlohmann::json;

namespace {

bool rejects(const std::string& patch) {
  try {
    fixture_config(patch);
  } catch (const Error&) {
    return true;
  }
  return false;
}

}  // namespace

TEST(Config, BundledFixtureLoads) {
  const auto cfg = load_config(data_file("fixture_config.json"));
  EXPECT_EQ(cfg.horizon_quarters, 120);
  EXPECT_EQ(cfg.seed, 2025U);
  EXPECT_EQ(cfg.population.n_sectors, 10);
  EXPECT_EQ(cfg.technologies.size(), 2U);
  EXPECT_EQ(cfg.durables.size(), 3U);
  EXPECT_TRUE(cfg.impute_tail);
  EXPECT_EQ(cfg.output_dir, data_dir() / "out/fixture");
  EXPECT_NO_THROW(load_config(data_file("desk_config.json")));
}

TEST(Config, Strictness) {
  EXPECT_TRUE(rejects(R"({"colour":"green"})"));
  EXPECT_TRUE(rejects(R"({"seed":null})"));
  EXPECT_TRUE(rejects(R"({"horizon_quarters":0})"));
  EXPECT_TRUE(rejects(R"({"io_table":"no_such_table.csv"})"));
  EXPECT_TRUE(rejects(R"({"population":{"microdata":"missing.csv"}})"));
  EXPECT_TRUE(rejects(R"({"population":{"n_households":"many"}})"));
  EXPECT_TRUE(rejects(R"({"policy":{"central_bank":{"taylor_rho":1}}})"));
  EXPECT_TRUE(rejects(R"({"behavior":{"green_sector":10}})"));
  EXPECT_TRUE(rejects(R"({"policy":{"spread_slope":-0.1}})"));
  EXPECT_FALSE(rejects(R"({"behavior":{"markup_drift":0.02}})"));
  try {
    parse_config("{\n\"seed\": 1,\n,\n}", data_dir());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Config, SeedOverride) {
  const auto text = slurp(data_file("fixture_config.json"));
  const auto cfg = parse_config(text, data_dir(), 99);
  EXPECT_EQ(cfg.seed, 99U);
  EXPECT_EQ(cfg.population.seed, 99U);
  EXPECT_NE(config_hash(cfg), config_hash(parse_config(text, data_dir())));
}

TEST(Config, HashCoversReferencedFiles) {
  TempDir dir("hash");
  std::filesystem::copy_file(data_file("io_table_10.csv"), dir.path() / "io.csv");
  auto doc = json::parse(slurp(data_file("fixture_config.json")));
  doc["io_table"] = "io.csv";
  doc["population"]["microdata"] = (data_dir() / "sample_microdata.csv").string();
  const auto before = config_hash(parse_config(doc.dump(), dir.path()));
  EXPECT_EQ(before, config_hash(parse_config(doc.dump(), dir.path())));
  std::ofstream(dir.path() / "io.csv", std::ios::app) << "# trailing comment\n";
  EXPECT_NE(before, config_hash(parse_config(doc.dump(), dir.path())));
  EXPECT_EQ(hash_hex(""), "cbf29ce484222325");
}

TEST(Runner, HorizonAndCallbacks) {
  const auto cfg = fixture_config(R"({"horizon_quarters":6})");
  RunOptions opt;
  int calls = 0;
  opt.on_quarter = [&](const EconomyState& s) { EXPECT_EQ(s.t, ++calls); };
  const auto run = run_simulation(cfg, nullptr, opt);
  EXPECT_EQ(calls, 6);
  ASSERT_EQ(run.frames.size(), 6U);
  for (int q = 0; q < 6; ++q) EXPECT_EQ(run.frames[static_cast<std::size_t>(q)].t, q);
  opt.on_quarter = nullptr;
  opt.horizon = 3;
  EXPECT_EQ(run_simulation(cfg, nullptr, opt).frames.size(), 3U);
}

TEST(Runner, EconomyCarriesTechAndNetworks) {
  const auto s = build_economy(fixture_config());
  EXPECT_EQ(s.tech.size(), 2U);
  EXPECT_EQ(s.durables.size(), 3U);
  EXPECT_EQ(s.networks.size(), 1U);  // one shared (k, p) network
  EXPECT_EQ(s.durable_network, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(s.households.size(), 2000U);
  EXPECT_EQ(s.firms.size(), 100U);
}

TEST(Runner, ThreadCountDoesNotChangeOutput) {
  const auto cfg = fixture_config(R"({"horizon_quarters":16})");
  RunOptions one;
  RunOptions four;
  four.threads = 4;
  const auto a = run_simulation(cfg, nullptr, one);
  const auto b = run_simulation(cfg, nullptr, four);
  EXPECT_EQ(indicators_csv(a.frames), indicators_csv(b.frames));
  EXPECT_EQ(fingerprint(a.final_state), fingerprint(b.final_state));
}

TEST(Runner, FaultInjectionIsCaught) {
  const auto cfg = fixture_config(R"({"horizon_quarters":8})");
  RunOptions opt;
  opt.inject_fault_quarter = 5;
  try {
    run_simulation(cfg, nullptr, opt);
    FAIL();
  } catch (const AuditFailure& e) {
    EXPECT_EQ(e.quarter(), 5);
    EXPECT_EQ(std::abs(e.residual_cents()), 1);
  }
}

TEST(Runner, BalanceSheetIsJson) {
  const auto run = run_simulation(fixture_config(R"({"horizon_quarters":2})"), nullptr);
  const auto doc = json::parse(balance_sheet_json(run.final_state));
  EXPECT_TRUE(doc.is_object());
  EXPECT_EQ(doc.at("t").get<int>(), 2);
}
