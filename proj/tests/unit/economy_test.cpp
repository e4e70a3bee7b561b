#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "decarb/economy.hpp"
#include "decarb/metrics.hpp"
#include "fixtures.hpp"

using namespace decarb;
using decarb::testing::flat_io;
using decarb::testing::small_economy;

namespace {

// Hand-built economy: `firm_sectors[k]` is firm k's sector; every household
// starts unemployed with zero balances and a uniform basket.
EconomyState tiny_state(int sectors, int households, const std::vector<int>& firm_sectors, double labor = 1.0,
                        double a = 0.0) {
  EconomyState s;
  s.io = flat_io(sectors, a, labor, 2.0);
  s.behavior = BehaviorParams{};
  s.green_sector = sectors - 1;
  s.sector_firms.assign(static_cast<std::size_t>(sectors), {});
  for (std::size_t k = 0; k < firm_sectors.size(); ++k) {
    Firm f;
    f.id = static_cast<FirmId>(k);
    f.sector = firm_sectors[k];
    f.price = 10.0;
    f.markup = 0.2;
    s.sector_firms[static_cast<std::size_t>(f.sector)].push_back(f.id);
    s.firms.push_back(f);
  }
  for (int i = 0; i < households; ++i) {
    Household h;
    h.id = i;
    h.consumption_weights.assign(static_cast<std::size_t>(sectors), 1.0 / sectors);
    h.propensity_to_consume = 1.0;
    s.households.push_back(h);
  }
  s.wage_index.assign(static_cast<std::size_t>(sectors), 100.0);
  s.base_wage = 100.0;
  s.base_weights.assign(static_cast<std::size_t>(sectors), 1.0 / sectors);
  s.base_prices.assign(static_cast<std::size_t>(sectors), 10.0);
  s.ownership.assign(static_cast<std::size_t>(households), 1);
  return s;
}

void employ(EconomyState& s, FirmId firm, HouseholdId h) {
  s.firms[static_cast<std::size_t>(firm)].employees.push_back(h);
  s.households[static_cast<std::size_t>(h)].employed_by = firm;
}

// With labour coefficient 1, zero inventory and no backlog, the posted
// demand is ceil(sales * (1 + inventory_target)).
void want_workers(Firm& f, int n, double inventory_target) { f.sales_last = n / (1.0 + inventory_target); }

AuditFailure audit_failure(EconomyState& s) {
  try {
    stock_flow_audit(s);
  } catch (const AuditFailure& e) {
    return e;
  }
  ADD_FAILURE() << "audit passed";
  return AuditFailure(0, "", 0);
}

}  // namespace

TEST(InitState, RejectsUnproductiveTable) {
  auto io = flat_io(2, 0.0);
  io.a(0, 1) = 0.6;
  io.a(1, 1) = 0.42;
  const auto records = decarb::testing::sample_records(20, 2);
  PopulationConfig cfg;
  cfg.n_households = 10;
  cfg.n_firms = 2;
  cfg.n_sectors = 2;
  try {
    init_state(build_population(records, cfg), io, decarb::testing::quiet_policy(), BehaviorParams{}, 1);
    FAIL();
  } catch (const InfeasibleIO& e) {
    EXPECT_EQ(e.sector(), 1);
    EXPECT_NEAR(e.column_sum(), 1.02, 1e-12);
  }
}

TEST(InitState, DeterministicAndAuditClean) {
  const auto a = small_economy(100, 10, 5, 42);
  const auto b = small_economy(100, 10, 5, 42);
  EXPECT_EQ(fingerprint(a), fingerprint(b));
  EXPECT_EQ(a.t, 0);
  EXPECT_FALSE(a.ledger.is_open());
  auto c = a;
  begin_quarter(c);
  EXPECT_EQ(stock_flow_audit(c).residual, 0);
}

TEST(InitState, EmploymentIsMinOfDemandAndLabourForce) {
  for (int H : {10, 37, 200}) {
    const auto s = small_economy(H, 4, 2, 9);
    double demand = 0.0;
    for (const auto& f : s.firms) demand += f.labor_demand;
    int employed = 0;
    for (const auto& h : s.households) employed += h.employed_by != kNoFirm;
    EXPECT_EQ(employed, static_cast<int>(std::min<double>(demand, H)));
    for (const auto& f : s.firms) {
      for (auto id : f.employees) EXPECT_EQ(s.households[static_cast<std::size_t>(id)].employed_by, f.id);
    }
  }
}

TEST(LaborMarket, FixedPointHasNoChurn) {
  auto s = tiny_state(1, 6, {0, 0});
  for (int h = 0; h < 3; ++h) employ(s, 0, h);
  for (int h = 3; h < 5; ++h) employ(s, 1, h);
  want_workers(s.firms[0], 3, s.behavior.inventory_target);
  want_workers(s.firms[1], 2, s.behavior.inventory_target);
  labor_market_step(s);
  EXPECT_EQ(s.quarter.hires, 0);
  EXPECT_EQ(s.quarter.separations, 0);
  EXPECT_EQ(s.firms[0].employees, (std::vector<HouseholdId>{0, 1, 2}));
  EXPECT_EQ(s.households[5].employed_by, kNoFirm);
}

TEST(LaborMarket, HiresInAscendingId) {
  auto s = tiny_state(1, 10, {0, 0});
  for (int h : {0, 1, 2, 3, 4, 5, 6, 8}) employ(s, 0, h);
  want_workers(s.firms[0], 8, s.behavior.inventory_target);
  want_workers(s.firms[1], 2, s.behavior.inventory_target);
  labor_market_step(s);
  EXPECT_EQ(s.firms[1].employees, (std::vector<HouseholdId>{7, 9}));
  EXPECT_EQ(s.households[7].wage, 100);
}

TEST(LaborMarket, ExcessDemandLeavesVacancies) {
  auto s = tiny_state(1, 50, {0, 0, 0});
  want_workers(s.firms[0], 20, s.behavior.inventory_target);
  want_workers(s.firms[1], 20, s.behavior.inventory_target);
  want_workers(s.firms[2], 15, s.behavior.inventory_target);
  labor_market_step(s);
  int employed = 0;
  for (const auto& h : s.households) employed += h.employed_by != kNoFirm;
  EXPECT_EQ(employed, 50);
  EXPECT_EQ(s.quarter.vacancies, 5);
  EXPECT_EQ(s.firms[2].employees.size(), 10U);
}

TEST(LaborMarket, SeparatesLastHiredFirst) {
  auto s = tiny_state(1, 5, {0});
  for (int h : {4, 1, 3}) employ(s, 0, h);
  want_workers(s.firms[0], 1, s.behavior.inventory_target);
  labor_market_step(s);
  EXPECT_EQ(s.firms[0].employees, (std::vector<HouseholdId>{4}));
  EXPECT_EQ(s.quarter.separations, 2);
}

TEST(Production, NoWorkersNoOutput) {
  auto s = tiny_state(2, 4, {0, 1}, 1.0, 0.1);
  begin_quarter(s);
  production_step(s);
  for (const auto& f : s.firms) {
    EXPECT_EQ(f.output_last, 0.0);
    EXPECT_EQ(f.input_cost, 0);
  }
  EXPECT_EQ(s.ledger[Flow::Intermediate].debited, 0);
}

TEST(Production, SingleSectorIsLabourBound) {
  auto s = tiny_state(1, 6, {0}, 0.25, 0.0);
  for (int h = 0; h < 6; ++h) employ(s, 0, h);
  begin_quarter(s);
  production_step(s);
  EXPECT_DOUBLE_EQ(s.firms[0].output_last, 6 / 0.25);
  EXPECT_DOUBLE_EQ(s.quarter.emissions, 24.0 * 2.0);
}

TEST(Production, LeontiefInputBound) {
  // Sector 1 needs 0.5 units of sector 0 per unit; sector 0 cannot produce.
  auto s = tiny_state(2, 100, {0, 1}, 1.0, 0.0);
  s.io.a(0, 1) = 0.5;
  for (int h = 0; h < 100; ++h) employ(s, 1, h);
  s.firms[0].inventory = 7.0;
  begin_quarter(s);
  production_step(s);
  EXPECT_NEAR(s.firms[1].output_last, 2.0 * 7.0, 1e-9);
  EXPECT_NEAR(s.firms[0].inventory, 0.0, 1e-9);
  EXPECT_EQ(s.ledger[Flow::Intermediate].debited, s.ledger[Flow::Intermediate].credited);
  EXPECT_EQ(s.firms[1].input_cost, round_cents(7.0 * 10.0));
}

TEST(Pricing, FixedPointAndLinearity) {
  auto s = tiny_state(1, 1, {0});
  auto& f = s.firms[0];
  f.output_last = 50.0;
  f.closing_inventory = 5.0;  // exactly at the 10% target
  f.wage_bill = 1000;
  f.input_cost = 500;
  pricing_step(s);
  EXPECT_DOUBLE_EQ(f.unit_cost, 30.0);
  EXPECT_DOUBLE_EQ(f.price, 30.0 * 1.2);
  const double before = f.price;
  pricing_step(s);
  EXPECT_EQ(f.price, before);

  f.input_cost = 0;
  pricing_step(s);
  const double single = f.unit_cost;
  f.wage_bill = 2000;
  pricing_step(s);
  EXPECT_EQ(f.unit_cost, 2.0 * single);
  EXPECT_EQ(f.price, f.unit_cost * (1.0 + f.markup));
}

TEST(Pricing, AmortisationAddsPerUnitCharge) {
  auto s = tiny_state(1, 1, {0});
  auto& f = s.firms[0];
  f.output_last = 50.0;
  f.closing_inventory = 5.0;
  f.wage_bill = 1000;
  pricing_step(s);
  const double without = f.unit_cost;
  f.green_capital = 4000;  // 2.5% amortisation = 100 per quarter
  pricing_step(s);
  EXPECT_NEAR(f.unit_cost - without, 2.0, 1e-12);
}

TEST(Pricing, MarkupFollowsInventory) {
  auto s = tiny_state(1, 1, {0});
  auto& f = s.firms[0];
  f.output_last = 100.0;
  f.wage_bill = 1000;
  f.deposits = 1'000'000;
  f.closing_inventory = 50.0;
  pricing_step(s);
  EXPECT_NEAR(f.markup, 0.19, 1e-12);
  f.closing_inventory = 0.0;
  pricing_step(s);
  pricing_step(s);
  EXPECT_NEAR(f.markup, 0.21, 1e-12);
}

TEST(Consumption, ZeroBudgetNoFlows) {
  auto s = tiny_state(2, 3, {0, 1});
  for (auto& f : s.firms) f.inventory = 100.0;
  begin_quarter(s);
  consumption_step(s);
  EXPECT_EQ(s.ledger[Flow::Consumption].credited, 0);
  for (const auto& f : s.firms) EXPECT_EQ(f.revenue, 0);
}

TEST(Consumption, OneHotWeights) {
  auto s = tiny_state(3, 4, {0, 1, 2});
  for (auto& f : s.firms) f.inventory = 1e6;
  for (auto& h : s.households) {
    h.deposits = 10'000;
    h.consumption_weights = {0.0, 0.0, 1.0};
  }
  begin_quarter(s);
  consumption_step(s);
  EXPECT_EQ(s.firms[2].revenue, 40'000);
  EXPECT_EQ(s.firms[0].revenue + s.firms[1].revenue, 0);
}

TEST(Consumption, BasketArithmetic) {
  auto s = tiny_state(2, 1, {0, 1});
  s.firms[0].price = 2.0;
  s.firms[1].price = 5.0;
  for (auto& f : s.firms) f.inventory = 1e6;
  s.households[0].deposits = 1000;
  s.households[0].consumption_weights = {0.6, 0.4};
  begin_quarter(s);
  consumption_step(s);
  EXPECT_DOUBLE_EQ(s.firms[0].sales, 300.0);
  EXPECT_DOUBLE_EQ(s.firms[1].sales, 80.0);
  EXPECT_EQ(s.households[0].deposits, 0);
}

TEST(Consumption, ShortageReturnsToDeposits) {
  auto s = tiny_state(1, 1, {0});
  s.firms[0].price = 4.0;
  s.firms[0].inventory = 10.0;
  s.households[0].deposits = 1000;
  begin_quarter(s);
  consumption_step(s);
  EXPECT_EQ(s.households[0].deposits, 960);
  EXPECT_EQ(s.firms[0].inventory, 0.0);
}

TEST(Fiscal, OnlyInterestWithoutTaxesOrTransfers) {
  auto s = tiny_state(1, 3, {0});
  s.government.deposits = -100'000;
  s.central_bank.policy_rate = 0.01;
  s.government.spread = 0.002;
  for (auto& h : s.households) h.deposits = 500;
  begin_quarter(s);
  fiscal_step(s);
  EXPECT_EQ(s.government.deposits, -100'000 - 1200);
  for (const auto& h : s.households) EXPECT_EQ(h.deposits, 500);
  EXPECT_NEAR(s.government.last_interest_rate, 0.012, 1e-12);
}

TEST(Fiscal, TaxOnWagesAndTransfers) {
  auto s = tiny_state(1, 2, {0});
  employ(s, 0, 0);
  s.households[0].wage = 1000;
  s.government.tax_rate_income = 0.25;
  s.government.transfer_per_household = 40;
  begin_quarter(s);
  fiscal_step(s);
  EXPECT_EQ(s.households[0].deposits, -250 + 40);
  EXPECT_EQ(s.households[1].deposits, 40);
  EXPECT_EQ(s.government.deposits, 250 - 80);
  EXPECT_EQ(stock_flow_audit(s).residual, 0);
}

TEST(Fiscal, ExpansionSubsidy) {
  auto s = tiny_state(1, 1, {0});
  begin_quarter(s);
  const SubsidyOrder order{100, SubsidyTarget::Households, Allocation::Uniform, Financing::Expansion};
  fiscal_step(s, &order);
  EXPECT_EQ(s.households[0].deposits, 100);
  EXPECT_EQ(s.government.deposits, -100);
  EXPECT_EQ(stock_flow_audit(s).residual, 0);
}

TEST(Fiscal, ReducedSpendingCutsTransfersFirst) {
  auto base = tiny_state(1, 1, {0});
  base.government.transfer_per_household = 60;
  auto cut = base;
  begin_quarter(base);
  fiscal_step(base);
  begin_quarter(cut);
  const SubsidyOrder order{100, SubsidyTarget::Households, Allocation::Uniform, Financing::ReducedSpending};
  fiscal_step(cut, &order);
  EXPECT_EQ(cut.government.last_transfer_cut, 60);
  EXPECT_EQ(cut.government.deposits - base.government.deposits, -40);
  EXPECT_EQ(cut.households[0].deposits, 100);
  EXPECT_EQ(stock_flow_audit(cut).residual, 0);
}

TEST(Monetary, TaylorIdentityAtTarget) {
  auto s = small_economy(30, 3, 3);
  s.central_bank.neutral_rate = 0.005;
  s.central_bank.inflation_target = 0.004;
  s.central_bank.taylor_pi = 0.5;
  s.central_bank.taylor_gap = 0.25;
  IndicatorFrame f;
  f.gdp = 1'000'000;
  f.inflation = 0.004;
  s.last_frame = f;
  s.output_gap = 0.0;
  begin_quarter(s);
  monetary_step(s);
  EXPECT_NEAR(s.central_bank.policy_rate, 0.009, 1e-15);
}

TEST(Monetary, ZeroLowerBound) {
  auto s = small_economy(30, 3, 3);
  s.central_bank.taylor_pi = 0.5;
  IndicatorFrame f;
  f.gdp = 1'000'000;
  f.inflation = -0.05;
  s.last_frame = f;
  begin_quarter(s);
  monetary_step(s);
  EXPECT_EQ(s.central_bank.policy_rate, 0.0);
}

TEST(Monetary, HingeSpread) {
  auto s = small_economy(30, 3, 3);
  s.government.debt_ceiling_ratio = 1.0;
  s.government.spread_slope = 0.02;
  IndicatorFrame f;
  f.gdp = 1'000'000;
  s.last_frame = f;
  s.government.deposits = -static_cast<Cents>(1.5 * 4.0 * 1'000'000);
  begin_quarter(s);
  monetary_step(s);
  EXPECT_NEAR(s.government.spread, 0.01, 1e-15);

  s.government.deposits = -static_cast<Cents>(1.0 * 4.0 * 1'000'000);
  begin_quarter(s);
  monetary_step(s);
  EXPECT_EQ(s.government.spread, 0.0);
}

TEST(Monetary, SpreadMonotoneInDebt) {
  auto s = small_economy(30, 3, 3);
  s.government.debt_ceiling_ratio = 0.9;
  s.government.spread_slope = 0.05;
  s.government.spread_cap = 0.02;
  IndicatorFrame f;
  f.gdp = 1'000'000;
  s.last_frame = f;
  double prev = -1.0;
  for (int k = 0; k <= 60; ++k) {
    s.government.deposits = -static_cast<Cents>(k * 100'000);
    begin_quarter(s);
    monetary_step(s);
    ASSERT_GE(s.government.spread, prev);
    ASSERT_LE(s.government.spread, 0.02);
    prev = s.government.spread;
  }
}

TEST(Monetary, DepositInterestIsIssuance) {
  auto s = small_economy(30, 3, 3);
  s.central_bank.neutral_rate = 0.01;
  IndicatorFrame f;
  f.gdp = 1'000'000;
  s.last_frame = f;
  begin_quarter(s);
  monetary_step(s);
  const auto report = stock_flow_audit(s);
  EXPECT_EQ(report.residual, 0);
  EXPECT_GT(s.ledger[Flow::DepositInterest].issued, 0);
}

TEST(Audit, NullStepBalances) {
  auto s = small_economy(60, 6, 3);
  step(s);
  EXPECT_EQ(s.t, 1);
  EXPECT_EQ(audit_ledger(s).residual, 0);
  for (std::size_t k = 0; k < kFlowCount; ++k) EXPECT_EQ(s.ledger[static_cast<Flow>(k)].residual(), 0);
}

TEST(Audit, OneCentCorruptionIsCaught) {
  auto s = small_economy(60, 6, 3);
  begin_quarter(s);
  s.ledger.credit(Flow::Wages, 1);
  const auto e = audit_failure(s);
  EXPECT_EQ(e.residual_cents(), 1);
  EXPECT_EQ(e.subsystem(), "wages");

  auto u = small_economy(60, 6, 3);
  begin_quarter(u);
  u.households[3].deposits += 1;  // money with no flow record
  const auto g = audit_failure(u);
  EXPECT_EQ(std::abs(g.residual_cents()), 1);
}

TEST(Audit, MissingLedger) {
  auto s = small_economy(20, 2, 2);
  begin_quarter(s);
  EXPECT_THROW(audit_ledger(s), MetricsError);
}

TEST(Step, IdenticalStatesIdenticalSuccessors) {
  auto a = small_economy(120, 8, 4, 5);
  auto b = small_economy(120, 8, 4, 5);
  b.threads = 3;
  for (int q = 0; q < 6; ++q) {
    step(a);
    step(b);
    ASSERT_EQ(fingerprint(a), fingerprint(b)) << "quarter " << q;
  }
}

TEST(Step, TwoHundredQuarterInvariantMonitor) {
  auto s = decarb::testing::small_economy(300, 12, 4, 77);
  for (int q = 0; q < 200; ++q) {
    ASSERT_NO_THROW(step(s)) << "quarter " << q;
    const auto& f = *s.last_frame;
    ASSERT_GE(f.unemployment, 0.0);
    ASSERT_LE(f.unemployment, 1.0);
    ASSERT_GE(s.central_bank.policy_rate, 0.0);
    for (const auto& firm : s.firms) {
      ASSERT_GT(firm.price, 0.0);
      ASSERT_GE(firm.inventory, 0.0);
      ASSERT_DOUBLE_EQ(firm.price, firm.unit_cost * (1.0 + firm.markup));
    }
    for (const auto& h : s.households) {
      double sum = 0.0;
      for (double w : h.consumption_weights) {
        ASSERT_GE(w, 0.0);
        sum += w;
      }
      ASSERT_NEAR(sum, 1.0, 1e-9);
    }
  }
  EXPECT_EQ(s.t, 200);
}
