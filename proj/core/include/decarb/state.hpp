#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "decarb/agents.hpp"
#include "decarb/diffusion.hpp"
#include "decarb/io_table.hpp"
#include "decarb/ledger.hpp"
#include "decarb/metrics.hpp"
#include "decarb/techlearn.hpp"

namespace decarb {

struct Government {
  Cents deposits = 0;  // negative = debt (overdraft at the central bank)
  double tax_rate_income = 0.0;
  Cents transfer_per_household = 0;   // per quarter at t = 0 wages, indexed to the wage level
  Cents purchases_per_household = 0;  // government consumption per quarter, indexed likewise
  double debt_ceiling_ratio = 1.0;    // debt / annual GDP above which the spread applies
  double spread_slope = 0.0;
  double spread_cap = 0.05;           // per quarter

  double spread = 0.0;               // set by the monetary step, paid next quarter
  double last_interest_rate = 0.0;   // realised rate on debt this quarter
  double last_rate_basis = 0.0;      // policy rate that payment was based on
  Cents last_transfer_pool = 0;
  Cents last_transfer_cut = 0;
};

struct CentralBank {
  double policy_rate = 0.0;  // per quarter
  double neutral_rate = 0.0;
  double inflation_target = 0.0;  // per quarter
  double taylor_pi = 0.0;
  double taylor_gap = 0.0;
};

struct PolicySettings {
  Government government;
  CentralBank central_bank;
  double initial_debt_ratio = 0.0;
};

struct BehaviorParams {
  double initial_markup = 0.2;
  double markup_drift = 0.01;      // absolute markup change per quarter
  double inventory_target = 0.10;  // closing inventory / output
  double inventory_band = 0.25;    // relative dead band around the target
  double amortization_rate = 0.025;
  double payout_ratio = 0.5;
  double employment_target = 0.95;  // initial labour demand / labour force
  int green_sector = -1;            // -1 = last sector
  int max_search = 3;               // firms tried per sector before demand goes unmet
  double usd_to_cents = 79.0;       // model cents per USD of technology cost
  double markup_min = 0.02;
  double markup_max = 0.6;
  double wage_indexation = 0.5;     // share of last quarter's inflation passed into wages
  double wage_phillips = 0.05;      // wage growth per unit of unemployment below its target
  double rate_sensitivity = 5.0;    // fall in the propensity to consume per unit real-rate gap
  double deposit_passthrough = 1.0; // deposit rate / policy rate

  void validate(int sectors) const;
};

/// Per-quarter aggregates that are not money flows.
struct QuarterAccounts {
  double emissions = 0.0;
  double output = 0.0;
  std::int64_t vacancies = 0;
  std::int64_t hires = 0;
  std::int64_t separations = 0;
  Cents green_purchases = 0;  // lever A + lever B + adoption, at full price
  std::int64_t adoptions = 0;
};

struct EconomyState {
  int t = 0;
  std::uint64_t seed = 0;

  std::vector<Household> households;
  std::vector<Firm> firms;
  Government government;
  CentralBank central_bank;
  IOTable io;
  BehaviorParams behavior;

  std::vector<Technology> tech;
  std::vector<DurableKind> durables;
  std::vector<SocialGraph> networks;
  std::vector<int> durable_network;  // durable kind -> index into networks

  int green_sector = 0;
  std::vector<std::vector<FirmId>> sector_firms;
  std::vector<double> wage_index;  // cents per quarter at skill 1, per sector
  double base_wage = 0.0;          // initial wage index
  std::vector<double> base_weights;
  std::vector<double> base_prices;
  std::vector<std::int64_t> ownership;  // dividend weights per household

  Ledger ledger;
  QuarterAccounts quarter;
  std::optional<IndicatorFrame> last_frame;
  std::vector<double> real_gdp_history;
  double output_gap = 0.0;
  int last_scenario_quarter = -1;

  // Execution settings; never change results.
  int threads = 1;
  std::optional<int> inject_fault_quarter;  // corrupts one ledger entry by a cent (audit test hook)
};

}  // namespace decarb
