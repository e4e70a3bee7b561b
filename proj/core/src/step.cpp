#include <algorithm>
#include <numeric>
#include <string>

#include "decarb/economy.hpp"

namespace decarb {

void begin_quarter(EconomyState& state) {
  state.ledger.open(money_stock(state));
  state.quarter = QuarterAccounts{};
  for (auto& h : state.households) {
    h.income = 0;
    h.green_spend = 0;
    h.lever_b_overdraft = false;
  }
  for (auto& f : state.firms) {
    f.sales = 0.0;
    f.revenue = 0;
    f.wage_bill = 0;
    f.input_cost = 0;
    f.green_spend = 0;
    f.overdraft = false;
  }
}

void apply_scenario_levers(EconomyState& state, const ScenarioSpec& scenario) {
  if (state.t <= state.last_scenario_quarter) {
    throw ScenarioError(ScenarioError::Kind::Replay,
                        "scenario levers for quarter " + std::to_string(state.t) + " were already applied");
  }
  if (scenario.green_sector) {
    if (*scenario.green_sector >= state.io.sectors) {
      throw ScenarioError(ScenarioError::Kind::Invalid, "scenario: green_sector out of range");
    }
    state.green_sector = *scenario.green_sector;
  }
  apply_lever_d(state, scenario.lever_d, state.t);
  apply_lever_e(state, scenario.lever_e, state.t);
  state.last_scenario_quarter = state.t;
}

AuditReport audit_ledger(const EconomyState& state) {
  const auto& ledger = state.ledger;
  if (!ledger.is_closed()) throw MetricsError(MetricsError::Kind::MissingLedger, "audit: ledger is not closed");
  AuditReport report;
  for (std::size_t k = 0; k < kFlowCount; ++k) {
    const auto flow = static_cast<Flow>(k);
    report.flows[k] = ledger[flow];
    if (report.flows[k].residual() != 0) {
      throw AuditFailure(report.flows[k].residual(), std::string(flow_name(flow)), state.t);
    }
  }
  report.money_change = ledger.closing_money() - ledger.opening_money();
  report.issuance = ledger.total_issued();
  report.residual = report.money_change - report.issuance;
  if (report.residual != 0) throw AuditFailure(report.residual, "money_stock", state.t);
  return report;
}

AuditReport stock_flow_audit(EconomyState& state) {
  state.ledger.close(money_stock(state));
  return audit_ledger(state);
}

void step(EconomyState& state, const ScenarioSpec* scenario) {
  begin_quarter(state);

  // Levers D and E run every quarter so a null scenario shares the replay guard.
  if (scenario != nullptr) {
    apply_scenario_levers(state, *scenario);
  } else {
    apply_scenario_levers(state, ScenarioSpec{});
  }

  labor_market_step(state);
  production_step(state);
  pricing_step(state);
  consumption_step(state, scenario);
  firm_investment_step(state, scenario);
  if (scenario != nullptr) {
    const auto order = subsidy_order(*scenario, state.t);
    fiscal_step(state, &order);
  } else {
    fiscal_step(state, nullptr);
  }
  monetary_step(state);
  diffusion_step(state, scenario);
  technology_step(state);

  if (state.inject_fault_quarter && *state.inject_fault_quarter == state.t) state.ledger.credit(Flow::Wages, 1);
  stock_flow_audit(state);

  const double cpi_prev = state.last_frame ? state.last_frame->cpi : 1.0;
  state.last_frame = compute_indicators(state, cpi_prev);

  // Output gap: real GDP against its trailing two-year mean.
  const double real_gdp = static_cast<double>(state.last_frame->gdp) / state.last_frame->cpi;
  auto& hist = state.real_gdp_history;
  const std::size_t window = std::min<std::size_t>(8, hist.size());
  if (window > 0) {
    const double mean = std::accumulate(hist.end() - static_cast<std::ptrdiff_t>(window), hist.end(), 0.0) /
                        static_cast<double>(window);
    state.output_gap = mean > 0.0 ? real_gdp / mean - 1.0 : 0.0;
  } else {
    state.output_gap = 0.0;
  }
  hist.push_back(real_gdp);

  for (auto& f : state.firms) {
    f.sales_last = f.sales;
    f.revenue_last = f.revenue;
    f.closing_inventory = f.inventory;
  }
  ++state.t;
}

}  // namespace decarb
