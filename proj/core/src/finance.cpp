#include <algorithm>
#include <cmath>
#include <numeric>

#include "decarb/economy.hpp"
#include "internal.hpp"

namespace decarb {

double green_cost_index(const EconomyState& state) {
  if (state.tech.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& t : state.tech) sum += t.cost_index();
  return sum / static_cast<double>(state.tech.size());
}

void firm_investment_step(EconomyState& state, const ScenarioSpec* scenario) {
  if (scenario != nullptr && scenario->lever_a) {
    std::vector<double> shares(static_cast<std::size_t>(state.io.sectors));
    for (int s = 0; s < state.io.sectors; ++s) shares[static_cast<std::size_t>(s)] = scenario->lever_a->share_for(s, state.t);
    apply_lever_a(state, shares);
  }

  // Dividends: excess liquidity over one quarter of operating costs, paid to
  // owners in proportion to initial positive wealth.
  const double payout = state.behavior.payout_ratio;
  Cents pool = 0;
  for (auto& f : state.firms) {
    const Cents buffer = f.wage_bill + f.input_cost;
    const Cents excess = f.deposits - buffer;
    if (excess <= 0) continue;
    const auto dividend = static_cast<Cents>(std::floor(payout * static_cast<double>(excess)));
    f.deposits -= dividend;
    pool += dividend;
  }
  state.ledger.debit(Flow::Dividends, pool);
  if (pool > 0) {
    const auto shares = allocate_cents(pool, state.ownership);
    Cents credited = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
      state.households[i].deposits += shares[i];
      state.households[i].income += shares[i];
      credited += shares[i];
    }
    state.ledger.credit(Flow::Dividends, credited);
  }
}

void fiscal_step(EconomyState& state, const SubsidyOrder* subsidy) {
  auto& gov = state.government;
  const int threads = state.threads;
  auto& households = state.households;
  const auto n = static_cast<std::int64_t>(households.size());
  const double tax_rate = gov.tax_rate_income;

  Cents taxes = 0;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(+ : taxes)
  for (std::int64_t i = 0; i < n; ++i) {
    auto& h = households[static_cast<std::size_t>(i)];
    if (h.employed_by == kNoFirm) continue;
    const Cents tax = round_cents(tax_rate * static_cast<double>(h.wage));
    h.deposits -= tax;
    taxes += tax;
  }
  gov.deposits += taxes;
  state.ledger.debit(Flow::Tax, taxes);
  state.ledger.credit(Flow::Tax, taxes);

  const Cents transfer_each = round_cents(static_cast<double>(gov.transfer_per_household) * wage_level(state));
  const Cents transfer_pool = transfer_each * static_cast<Cents>(households.size());

  Cents cut = 0;
  if (subsidy != nullptr && subsidy->total > 0) cut = apply_lever_c(state, *subsidy, transfer_pool);
  const Cents pool = transfer_pool - cut;
  gov.last_transfer_pool = pool;
  gov.last_transfer_cut = cut;
  if (pool > 0) {
    const auto each = pool / static_cast<Cents>(households.size());
    const auto rest = pool % static_cast<Cents>(households.size());
    for (std::size_t i = 0; i < households.size(); ++i) {
      const Cents amount = each + (static_cast<Cents>(i) < rest ? 1 : 0);
      households[i].deposits += amount;
      households[i].income += amount;
    }
    gov.deposits -= pool;
    state.ledger.debit(Flow::Transfers, pool);
    state.ledger.credit(Flow::Transfers, pool);
  }

  // Interest on the overdraft at last quarter's policy rate plus spread.
  gov.last_rate_basis = state.central_bank.policy_rate;
  if (gov.deposits < 0) {
    const double rate = state.central_bank.policy_rate + gov.spread;
    const Cents debt = -gov.deposits;
    const Cents interest = round_cents(static_cast<double>(debt) * rate);
    gov.deposits -= interest;
    gov.last_interest_rate = static_cast<double>(interest) / static_cast<double>(debt);
    state.ledger.debit(Flow::DebtInterest, interest);
    state.ledger.issue(Flow::DebtInterest, -interest);
  } else {
    const Cents interest = round_cents(static_cast<double>(gov.deposits) * state.central_bank.policy_rate);
    gov.deposits += interest;
    gov.last_interest_rate = 0.0;
    state.ledger.credit(Flow::DebtInterest, interest);
    state.ledger.issue(Flow::DebtInterest, interest);
  }
}

namespace {

Cents current_expenditure(const EconomyState& state) {
  const auto& l = state.ledger;
  return l[Flow::Consumption].credited + l[Flow::GovernmentPurchases].credited + l[Flow::LeverA].credited +
         l[Flow::LeverB].credited + l[Flow::Adoption].credited + l[Flow::AdoptionSubsidy].credited;
}

}  // namespace

void monetary_step(EconomyState& state) {
  auto& cb = state.central_bank;
  auto& gov = state.government;
  const double inflation = state.last_frame ? state.last_frame->inflation : 0.0;
  cb.policy_rate = std::max(0.0, cb.neutral_rate + inflation + cb.taylor_pi * (inflation - cb.inflation_target) +
                                     cb.taylor_gap * state.output_gap);

  const Cents gdp = state.last_frame ? state.last_frame->gdp : current_expenditure(state);
  const double debt = static_cast<double>(std::max<Cents>(0, -gov.deposits));
  const double ratio = gdp > 0 ? debt / (4.0 * static_cast<double>(gdp)) : 0.0;
  gov.spread = std::min(gov.spread_cap, gov.spread_slope * std::max(0.0, ratio - gov.debt_ceiling_ratio));

  // Interest on private deposits is the issuance channel; overdrafts pay the policy rate.
  const double rate = cb.policy_rate * state.behavior.deposit_passthrough;
  const double overdraft_rate = cb.policy_rate;
  const int threads = state.threads;
  Cents paid = 0;
  Cents charged = 0;
  auto& households = state.households;
  const auto n = static_cast<std::int64_t>(households.size());
#pragma omp parallel for schedule(static) num_threads(threads) reduction(+ : paid, charged)
  for (std::int64_t i = 0; i < n; ++i) {
    auto& h = households[static_cast<std::size_t>(i)];
    if (h.deposits > 0) {
      const Cents interest = round_cents(static_cast<double>(h.deposits) * rate);
      h.deposits += interest;
      h.income += interest;
      paid += interest;
    } else if (h.deposits < 0) {
      const Cents interest = round_cents(static_cast<double>(-h.deposits) * overdraft_rate);
      h.deposits -= interest;
      charged += interest;
    }
  }
  for (auto& f : state.firms) {
    if (f.deposits > 0) {
      const Cents interest = round_cents(static_cast<double>(f.deposits) * rate);
      f.deposits += interest;
      paid += interest;
    } else if (f.deposits < 0) {
      const Cents interest = round_cents(static_cast<double>(-f.deposits) * overdraft_rate);
      f.deposits -= interest;
      charged += interest;
    }
  }
  state.ledger.credit(Flow::DepositInterest, paid);
  state.ledger.debit(Flow::DepositInterest, charged);
  state.ledger.issue(Flow::DepositInterest, paid - charged);
}

void technology_step(EconomyState& state) {
  const double green = static_cast<double>(state.quarter.green_purchases);
  for (auto& tech : state.tech) {
    double realised = 0.0;
    if (tech.purchase_share > 0.0) {
      realised = tech.purchase_share * green / (tech.state.current_cost() * state.behavior.usd_to_cents);
    }
    tech.state = advance_tech(tech.state, quarterly_deployment(tech, state.t, realised));
  }
}

}  // namespace decarb
