#pragma once

#include <cstdint>
#include <vector>

#include "decarb/money.hpp"

namespace decarb {

using HouseholdId = std::int32_t;
using FirmId = std::int32_t;
inline constexpr FirmId kNoFirm = -1;

struct Household {
  HouseholdId id = 0;
  Cents deposits = 0;
  Cents illiquid_wealth = 0;
  FirmId employed_by = kNoFirm;
  Cents wage = 0;  // per quarter while employed
  std::vector<double> consumption_weights;
  std::uint32_t durables = 0;  // bit k set = adopted durable kind k
  int region_code = 0;
  double propensity_to_consume = 1.0;
  double gross_income = 0.0;  // annual, from the source micro-record
  double skill = 1.0;         // earnings relative to the population mean
  int household_size = 1;
  bool lever_b_overdraft = false;

  // Flows of the quarter in progress.
  Cents income = 0;  // wage + dividends + transfers + subsidies + interest
  Cents green_spend = 0;

  bool adopted(int kind) const { return (durables >> kind) & 1U; }
  Cents net_wealth() const { return deposits + illiquid_wealth; }
};

struct Firm {
  FirmId id = 0;
  int sector = 0;
  std::vector<HouseholdId> employees;  // hiring order; back() is the last hired
  double price = 0.0;      // cents per unit
  double unit_cost = 0.0;  // cents per unit
  double markup = 0.0;
  double inventory = 0.0;  // units
  Cents deposits = 0;
  Cents green_capital = 0;
  double size_weight = 1.0;  // relative size used to split sector output at init
  bool overdraft = false;

  double planned_output = 0.0;
  double labor_demand = 0.0;
  double output_last = 0.0;
  double sales_last = 0.0;  // units sold in the previous quarter
  Cents revenue_last = 0;
  double closing_inventory = 0.0;
  double backlog = 0.0;  // paid-for units awaiting delivery

  // Flows of the quarter in progress.
  double sales = 0.0;
  Cents revenue = 0;
  Cents wage_bill = 0;
  Cents input_cost = 0;
  Cents green_spend = 0;
};

}  // namespace decarb
