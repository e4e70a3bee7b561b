#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "decarb/population.hpp"
#include "decarb/scenario.hpp"
#include "decarb/state.hpp"

namespace decarb {

class AuditFailure : public Error {
 public:
  AuditFailure(Cents residual_cents, std::string subsystem, int quarter)
      : Error("stock-flow audit failed at quarter " + std::to_string(quarter) + ": residual " +
              std::to_string(residual_cents) + " cents in " + subsystem),
        residual_(residual_cents),
        subsystem_(std::move(subsystem)),
        quarter_(quarter) {}

  Cents residual_cents() const { return residual_; }
  const std::string& subsystem() const { return subsystem_; }
  int quarter() const { return quarter_; }

 private:
  Cents residual_;
  std::string subsystem_;
  int quarter_;
};

struct AuditReport {
  std::array<FlowTotals, kFlowCount> flows{};
  Cents money_change = 0;
  Cents issuance = 0;
  Cents residual = 0;
};

/// Sum of household, firm and government deposits.
Cents money_stock(const EconomyState& state);

/// Builds the t = 0 state: Leontief-consistent prices and outputs, initial
/// hiring in ascending id order, empty ledger.
EconomyState init_state(Population population, IOTable io, const PolicySettings& policy,
                        const BehaviorParams& behavior, std::uint64_t seed);

/// Opens the step ledger and clears per-quarter flows.
void begin_quarter(EconomyState& state);

void labor_market_step(EconomyState& state);
void production_step(EconomyState& state);
void pricing_step(EconomyState& state);
/// Lever-B forced purchases, then discretionary household and government purchases.
void consumption_step(EconomyState& state, const ScenarioSpec* scenario = nullptr);
/// Lever-A green investment, then dividend payout.
void firm_investment_step(EconomyState& state, const ScenarioSpec* scenario = nullptr);
void fiscal_step(EconomyState& state, const SubsidyOrder* subsidy = nullptr);
void monetary_step(EconomyState& state);
/// Advances learning curves and refreshes the green-sector cost index.
void technology_step(EconomyState& state);

/// Closes the ledger and checks conservation; throws AuditFailure.
AuditReport stock_flow_audit(EconomyState& state);
/// Checks an already closed ledger without modifying the state.
AuditReport audit_ledger(const EconomyState& state);

/// Applies levers D and E for the current quarter; each quarter may be consumed once.
void apply_scenario_levers(EconomyState& state, const ScenarioSpec& scenario);

/// One quarter in the fixed sub-step order. Computes the quarter's
/// indicators into state.last_frame and increments t.
void step(EconomyState& state, const ScenarioSpec* scenario = nullptr);

/// Hash of every simulation-relevant field (execution settings excluded).
std::uint64_t fingerprint(const EconomyState& state);

double green_cost_index(const EconomyState& state);
/// Labour per unit of output; the green sector's falls with the technology cost index.
double labor_requirement(const EconomyState& state, int sector);
/// Mean sector wage index relative to t = 0; indexes government purchases and transfers.
double wage_level(const EconomyState& state);
/// Scales every household's propensity to consume by the real policy-rate gap.
double demand_multiplier(const EconomyState& state);
double tax_due(const EconomyState& state, const Household& household);

}  // namespace decarb
