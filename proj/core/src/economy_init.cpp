#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "decarb/economy.hpp"
#include "decarb/rng.hpp"

namespace decarb {

void BehaviorParams::validate(int sectors) const {
  if (!(initial_markup >= 0.0) || !(markup_drift >= 0.0)) throw Error("behavior: markups must be >= 0");
  if (!(inventory_target > 0.0) || !(inventory_band >= 0.0)) throw Error("behavior: inventory target must be > 0");
  if (!(amortization_rate >= 0.0 && amortization_rate <= 1.0)) throw Error("behavior: amortization_rate in [0,1]");
  if (!(payout_ratio >= 0.0 && payout_ratio <= 1.0)) throw Error("behavior: payout_ratio in [0,1]");
  if (!(employment_target > 0.0)) throw Error("behavior: employment_target must be > 0");
  if (green_sector >= sectors || green_sector < -1) throw Error("behavior: green_sector out of range");
  if (max_search < 1) throw Error("behavior: max_search must be >= 1");
  if (!(usd_to_cents > 0.0)) throw Error("behavior: usd_to_cents must be > 0");
  if (!(markup_min >= 0.0 && markup_max >= markup_min)) throw Error("behavior: require 0 <= markup_min <= markup_max");
  if (!(initial_markup >= markup_min && initial_markup <= markup_max)) throw Error("behavior: initial_markup outside bounds");
  if (!(wage_indexation >= 0.0) || !(wage_phillips >= 0.0)) throw Error("behavior: wage responses must be >= 0");
  if (!(rate_sensitivity >= 0.0)) throw Error("behavior: rate_sensitivity must be >= 0");
  if (!(deposit_passthrough >= 0.0 && deposit_passthrough <= 1.0)) throw Error("behavior: deposit_passthrough in [0,1]");
}

Cents money_stock(const EconomyState& state) {
  Cents total = state.government.deposits;
  for (const auto& h : state.households) total += h.deposits;
  for (const auto& f : state.firms) total += f.deposits;
  return total;
}

EconomyState init_state(Population population, IOTable io, const PolicySettings& policy,
                        const BehaviorParams& behavior, std::uint64_t seed) {
  io.validate();
  behavior.validate(io.sectors);
  if (population.households.empty()) throw Error("init_state: no households");
  if (population.firms.empty()) throw Error("init_state: no firms");
  if (policy.government.tax_rate_income < 0.0 || policy.government.tax_rate_income >= 1.0) {
    throw Error("init_state: tax_rate_income must lie in [0, 1)");
  }

  const int S = io.sectors;
  EconomyState state;
  state.seed = seed;
  state.households = std::move(population.households);
  state.firms = std::move(population.firms);
  state.io = std::move(io);
  state.behavior = behavior;
  state.government = policy.government;
  state.central_bank = policy.central_bank;
  state.green_sector = behavior.green_sector < 0 ? S - 1 : behavior.green_sector;

  state.sector_firms.assign(static_cast<std::size_t>(S), {});
  for (const auto& f : state.firms) {
    if (f.sector < 0 || f.sector >= S) throw Error("init_state: firm sector out of range");
    state.sector_firms[static_cast<std::size_t>(f.sector)].push_back(f.id);
  }
  for (int s = 0; s < S; ++s) {
    if (state.sector_firms[static_cast<std::size_t>(s)].empty()) {
      throw Error("init_state: sector " + std::to_string(s) + " has no firms");
    }
  }

  const auto H = static_cast<double>(state.households.size());
  state.base_weights.assign(static_cast<std::size_t>(S), 0.0);
  double deposit_sum = 0.0;
  double skill_sum = 0.0;
  double propensity = 0.0;
  for (const auto& h : state.households) {
    if (static_cast<int>(h.consumption_weights.size()) != S) throw Error("init_state: weight vector size mismatch");
    for (int s = 0; s < S; ++s) state.base_weights[static_cast<std::size_t>(s)] += h.consumption_weights[static_cast<std::size_t>(s)];
    deposit_sum += static_cast<double>(std::max<Cents>(h.deposits, 0));
    skill_sum += h.skill;
    propensity += h.propensity_to_consume;
  }
  for (auto& w : state.base_weights) w /= H;
  propensity /= H;

  const double m = behavior.initial_markup;
  Eigen::MatrixXd A(S, S);
  Eigen::VectorXd labor(S), weights(S);
  for (int i = 0; i < S; ++i) {
    labor(i) = state.io.labor_coefficients[static_cast<std::size_t>(i)];
    weights(i) = state.base_weights[static_cast<std::size_t>(i)];
    for (int j = 0; j < S; ++j) A(i, j) = state.io.a(i, j);
  }
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(S, S);

  // Cost-plus prices at a unit wage: p = (1 + m)(l + A' p). Prices scale linearly with the wage.
  const Eigen::VectorXd unit_prices = (identity - (1.0 + m) * A.transpose()).partialPivLu().solve((1.0 + m) * labor);
  for (int s = 0; s < S; ++s) {
    if (!(unit_prices(s) > 0.0) || !std::isfinite(unit_prices(s))) {
      throw Error("init_state: no positive cost-plus price vector at the initial markup");
    }
  }

  // Gross outputs serving final demand in the base composition, scaled so
  // initial labour demand is employment_target of the labour force.
  Eigen::VectorXd gross = (identity - A).partialPivLu().solve(weights);
  const double labor_per_unit = labor.dot(gross);
  if (!(labor_per_unit > 0.0)) throw Error("init_state: the economy needs labour");
  const double e = behavior.employment_target;
  const double scale = e * H / labor_per_unit;
  gross *= scale;

  // Quarterly wage at skill 1 (cents) at which first-quarter household and
  // government demand buys exactly that output. Households spend out of
  // deposits plus the quarter's after-tax wages.
  const double government = static_cast<double>(policy.government.purchases_per_household) * H;
  const double tax = policy.government.tax_rate_income;
  const double wage = (propensity * deposit_sum + government) /
                      (scale * weights.dot(unit_prices) - propensity * (1.0 - tax) * e * skill_sum);
  if (!(wage > 0.0) || !std::isfinite(wage)) throw Error("init_state: household demand cannot support any wage level");
  state.wage_index.assign(static_cast<std::size_t>(S), wage);
  state.base_wage = wage;
  const Eigen::VectorXd prices = wage * unit_prices;

  std::vector<double> sector_size(static_cast<std::size_t>(S), 0.0);
  for (const auto& f : state.firms) sector_size[static_cast<std::size_t>(f.sector)] += f.size_weight;

  for (auto& f : state.firms) {
    const auto s = static_cast<std::size_t>(f.sector);
    const double x = gross(f.sector) * f.size_weight / sector_size[s];
    const double p = prices(f.sector);
    double input_cost = 0.0;
    for (int i = 0; i < S; ++i) input_cost += state.io.a(i, f.sector) * prices(i);
    f.price = p;
    f.unit_cost = p / (1.0 + m);
    f.markup = m;
    f.inventory = behavior.inventory_target * x;
    f.closing_inventory = f.inventory;
    f.output_last = x;
    f.sales_last = x;
    f.planned_output = x;
    f.revenue_last = round_cents(x * p);
    f.deposits = round_cents(x * (wage * labor(f.sector) + input_cost));
    const double l = state.io.labor_coefficients[s];
    f.labor_demand = l > 0.0 ? std::ceil(x * l - 1e-9) : 0.0;
    f.employees.clear();
  }

  // Initial hiring: ascending household id into ascending firm id.
  std::size_t next = 0;
  for (auto& f : state.firms) {
    while (static_cast<double>(f.employees.size()) < f.labor_demand && next < state.households.size()) {
      auto& h = state.households[next++];
      h.employed_by = f.id;
      f.employees.push_back(h.id);
    }
  }
  for (auto& h : state.households) {
    h.wage = h.employed_by == kNoFirm
                 ? 0
                 : round_cents(state.wage_index[static_cast<std::size_t>(state.firms[static_cast<std::size_t>(h.employed_by)].sector)] * h.skill);
  }

  state.base_prices.assign(prices.data(), prices.data() + S);
  const double final_value = scale * weights.dot(prices);
  state.government.deposits = -round_cents(policy.initial_debt_ratio * 4.0 * final_value);
  state.central_bank.policy_rate = std::max(0.0, state.central_bank.neutral_rate + state.central_bank.inflation_target);

  state.ownership.resize(state.households.size());
  for (std::size_t i = 0; i < state.households.size(); ++i) {
    state.ownership[i] = std::max<Cents>(state.households[i].net_wealth(), 0);
  }

  const Cents money = money_stock(state);
  state.ledger.open(money);
  state.ledger.close(money);
  return state;
}

namespace {

struct Hasher {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  void add(std::uint64_t v) { h = mix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2))); }
  void add(std::int64_t v) { add(static_cast<std::uint64_t>(v)); }
  void add(int v) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  void add(bool v) { add(static_cast<std::uint64_t>(v)); }
  void add(double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    add(bits);
  }
};

}  // namespace

std::uint64_t fingerprint(const EconomyState& state) {
  Hasher hs;
  hs.add(state.t);
  hs.add(state.seed);
  for (const auto& h : state.households) {
    hs.add(h.deposits);
    hs.add(h.illiquid_wealth);
    hs.add(h.employed_by);
    hs.add(h.wage);
    for (double w : h.consumption_weights) hs.add(w);
    hs.add(static_cast<std::uint64_t>(h.durables));
    hs.add(h.lever_b_overdraft);
    hs.add(h.income);
    hs.add(h.green_spend);
  }
  for (const auto& f : state.firms) {
    hs.add(f.sector);
    for (auto e : f.employees) hs.add(e);
    hs.add(f.price);
    hs.add(f.unit_cost);
    hs.add(f.markup);
    hs.add(f.inventory);
    hs.add(f.deposits);
    hs.add(f.green_capital);
    hs.add(f.output_last);
    hs.add(f.sales_last);
    hs.add(f.revenue_last);
    hs.add(f.backlog);
  }
  const auto& g = state.government;
  hs.add(g.deposits);
  hs.add(g.spread);
  hs.add(g.last_interest_rate);
  hs.add(state.central_bank.policy_rate);
  for (double v : state.io.coefficients) hs.add(v);
  for (const auto& t : state.tech) hs.add(t.state.cumulative());
  for (double w : state.wage_index) hs.add(w);
  for (std::size_t f = 0; f < kFlowCount; ++f) {
    const auto& totals = state.ledger[static_cast<Flow>(f)];
    hs.add(totals.debited);
    hs.add(totals.credited);
    hs.add(totals.issued);
  }
  hs.add(state.output_gap);
  hs.add(state.base_wage);
  return hs.h;
}

}  // namespace decarb
