#include <algorithm>
#include <cmath>
#include <numeric>

#include "decarb/economy.hpp"
#include "decarb/rng.hpp"
#include "internal.hpp"

namespace decarb {

namespace detail {

double sector_price(const EconomyState& state, int sector) {
  double weighted = 0.0;
  double weight = 0.0;
  double plain = 0.0;
  const auto& ids = state.sector_firms[static_cast<std::size_t>(sector)];
  for (auto id : ids) {
    const auto& f = state.firms[static_cast<std::size_t>(id)];
    weighted += f.price * f.output_last;
    weight += f.output_last;
    plain += f.price;
  }
  return weight > 0.0 ? weighted / weight : plain / static_cast<double>(ids.size());
}

Cents sector_purchase(EconomyState& state, int sector, Cents budget, Flow flow, Delivery delivery) {
  if (budget <= 0) return 0;
  const auto& ids = state.sector_firms[static_cast<std::size_t>(sector)];
  const std::size_t n = ids.size();
  std::vector<double> share(n);
  double available = 0.0;
  for (std::size_t k = 0; k < n; ++k) available += std::max(state.firms[static_cast<std::size_t>(ids[k])].inventory, 0.0);
  double share_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& f = state.firms[static_cast<std::size_t>(ids[k])];
    share[k] = available > 0.0 ? std::max(f.inventory, 0.0) : f.size_weight;
    share_sum += share[k];
  }
  double avg_price = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    share[k] /= share_sum;
    avg_price += share[k] * state.firms[static_cast<std::size_t>(ids[k])].price;
  }

  const double units_wanted = static_cast<double>(budget) / avg_price;
  double units = units_wanted;
  Cents paid = budget;
  if (delivery == Delivery::Rationed && units_wanted > available) {
    units = available;
    paid = std::min(budget, round_cents(units * avg_price));
  }
  if (paid <= 0) return 0;

  std::vector<double> value(n);
  for (std::size_t k = 0; k < n; ++k) value[k] = share[k] * state.firms[static_cast<std::size_t>(ids[k])].price;
  const auto weights = integer_weights(value);
  const auto money = allocate_cents(paid, weights);

  Cents credited = 0;
  for (std::size_t k = 0; k < n; ++k) {
    auto& f = state.firms[static_cast<std::size_t>(ids[k])];
    const double firm_units = units * share[k];
    const double delivered = std::min(firm_units, std::max(f.inventory, 0.0));
    f.inventory = std::max(f.inventory - delivered, 0.0);
    if (delivery == Delivery::Backorder) f.backlog += firm_units - delivered;
    f.sales += firm_units;
    f.revenue += money[k];
    f.deposits += money[k];
    credited += money[k];
  }
  state.ledger.credit(flow, credited);
  return paid;
}

}  // namespace detail

using detail::Delivery;

double labor_requirement(const EconomyState& state, int sector) {
  const double l = state.io.labor_coefficients[static_cast<std::size_t>(sector)];
  return sector == state.green_sector ? l * green_cost_index(state) : l;
}

double wage_level(const EconomyState& state) {
  if (!(state.base_wage > 0.0)) return 1.0;
  const double mean = std::accumulate(state.wage_index.begin(), state.wage_index.end(), 0.0) /
                      static_cast<double>(state.wage_index.size());
  return mean / state.base_wage;
}

double demand_multiplier(const EconomyState& state) {
  if (!state.last_frame) return 1.0;
  const auto& cb = state.central_bank;
  const double real_gap = cb.policy_rate - state.last_frame->inflation - cb.neutral_rate;
  return std::clamp(1.0 - state.behavior.rate_sensitivity * real_gap, 0.5, 1.5);
}

double tax_due(const EconomyState& state, const Household& household) {
  return household.employed_by == kNoFirm
             ? 0.0
             : static_cast<double>(round_cents(state.government.tax_rate_income * static_cast<double>(household.wage)));
}

void labor_market_step(EconomyState& state) {
  auto& q = state.quarter;
  const auto& b = state.behavior;
  if (state.last_frame) {
    const double gap = (1.0 - b.employment_target) - state.last_frame->unemployment;
    const double growth = std::exp(b.wage_indexation * state.last_frame->inflation + b.wage_phillips * gap);
    for (auto& w : state.wage_index) w *= growth;
  }

  for (auto& f : state.firms) {
    const double expected = f.sales_last;
    f.planned_output = std::max(0.0, expected * (1.0 + b.inventory_target) + f.backlog - f.inventory);
    const double l = labor_requirement(state, f.sector);
    f.labor_demand = (l > 0.0 && f.planned_output > 0.0) ? std::ceil(f.planned_output * l - 1e-9) : 0.0;
    // Separations: last hired first.
    while (static_cast<double>(f.employees.size()) > f.labor_demand) {
      auto& h = state.households[static_cast<std::size_t>(f.employees.back())];
      h.employed_by = kNoFirm;
      h.wage = 0;
      f.employees.pop_back();
      ++q.separations;
    }
  }

  // Matching: unemployed households in ascending id to vacancies in ascending firm id.
  std::size_t firm_cursor = 0;
  auto next_vacancy = [&]() -> Firm* {
    while (firm_cursor < state.firms.size()) {
      auto& f = state.firms[firm_cursor];
      if (static_cast<double>(f.employees.size()) < f.labor_demand) return &f;
      ++firm_cursor;
    }
    return nullptr;
  };
  for (auto& h : state.households) {
    if (h.employed_by != kNoFirm) continue;
    Firm* f = next_vacancy();
    if (f == nullptr) break;
    f->employees.push_back(h.id);
    h.employed_by = f->id;
    ++q.hires;
  }

  q.vacancies = 0;
  for (const auto& f : state.firms) {
    q.vacancies += static_cast<std::int64_t>(f.labor_demand) - static_cast<std::int64_t>(f.employees.size());
  }
  const int threads = state.threads;
  auto& households = state.households;
  const auto& firms = state.firms;
  const auto& wage_index = state.wage_index;
  const auto n = static_cast<std::int64_t>(households.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    auto& h = households[static_cast<std::size_t>(i)];
    h.wage = h.employed_by == kNoFirm
                 ? 0
                 : round_cents(wage_index[static_cast<std::size_t>(firms[static_cast<std::size_t>(h.employed_by)].sector)] * h.skill);
  }
}

void production_step(EconomyState& state) {
  const int S = state.io.sectors;
  const auto& io = state.io;
  auto& firms = state.firms;

  std::vector<double> feasible(firms.size());
  std::vector<double> desired(static_cast<std::size_t>(S), 0.0);
  std::vector<double> inventory(static_cast<std::size_t>(S), 0.0);
  for (std::size_t k = 0; k < firms.size(); ++k) {
    const auto& f = firms[k];
    const double l = labor_requirement(state, f.sector);
    feasible[k] = l > 0.0 ? static_cast<double>(f.employees.size()) / l : f.planned_output;
    desired[static_cast<std::size_t>(f.sector)] += feasible[k];
    inventory[static_cast<std::size_t>(f.sector)] += std::max(f.inventory, 0.0);
  }

  // Sector outputs feasible given inputs available from inventories plus
  // this quarter's output of the supplying sector.
  std::vector<double> Q = desired;
  std::vector<double> required(static_cast<std::size_t>(S));
  auto compute_required = [&] {
    for (int i = 0; i < S; ++i) {
      double r = 0.0;
      for (int j = 0; j < S; ++j) r += io.a(i, j) * Q[static_cast<std::size_t>(j)];
      required[static_cast<std::size_t>(i)] = r;
    }
  };
  for (int iter = 0; iter < 200; ++iter) {
    compute_required();
    std::vector<double> fill(static_cast<std::size_t>(S), 1.0);
    for (int i = 0; i < S; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const double avail = inventory[si] + Q[si];
      if (required[si] > avail) fill[si] = avail / required[si];
    }
    bool changed = false;
    for (int j = 0; j < S; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (Q[sj] <= 0.0) continue;
      double g = 1.0;
      for (int i = 0; i < S; ++i) {
        if (io.a(i, j) > 0.0) g = std::min(g, fill[static_cast<std::size_t>(i)]);
      }
      if (g < 1.0) {
        Q[sj] *= g;
        changed = true;
      }
    }
    if (!changed) break;
  }
  // Uniform contraction closes any residual gap: with all outputs scaled by
  // lambda, sector i is feasible iff lambda (R_i - Q_i) <= inventory_i.
  compute_required();
  double lambda = 1.0;
  for (int i = 0; i < S; ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (required[si] > Q[si]) lambda = std::min(lambda, inventory[si] / (required[si] - Q[si]));
  }
  if (lambda < 1.0) {
    for (auto& v : Q) v *= lambda * (1.0 - 1e-12);
    compute_required();
  }

  std::vector<double> scale(static_cast<std::size_t>(S), 0.0);
  for (int s = 0; s < S; ++s) {
    const auto ss = static_cast<std::size_t>(s);
    scale[ss] = desired[ss] > 0.0 ? std::min(1.0, Q[ss] / desired[ss]) : 0.0;
  }

  // Realised outputs and seller availability.
  std::vector<double> avail(static_cast<std::size_t>(S), 0.0);
  std::vector<double> avail_value(static_cast<std::size_t>(S), 0.0);
  for (std::size_t k = 0; k < firms.size(); ++k) {
    auto& f = firms[k];
    f.output_last = feasible[k] * scale[static_cast<std::size_t>(f.sector)];
    const double a = std::max(f.inventory, 0.0) + f.output_last;
    avail[static_cast<std::size_t>(f.sector)] += a;
    avail_value[static_cast<std::size_t>(f.sector)] += a * f.price;
  }
  std::vector<double> avg_price(static_cast<std::size_t>(S), 0.0);
  for (int s = 0; s < S; ++s) {
    const auto ss = static_cast<std::size_t>(s);
    avg_price[ss] = avail[ss] > 0.0 ? avail_value[ss] / avail[ss] : 0.0;
  }

  // Buyers pay each supplying sector's pool at its availability-weighted price.
  std::vector<double> delivered_units(static_cast<std::size_t>(S), 0.0);
  std::vector<Cents> pool(static_cast<std::size_t>(S), 0);
  Cents debited = 0;
  for (auto& f : firms) {
    if (f.output_last <= 0.0) continue;
    Cents cost = 0;
    for (int i = 0; i < S; ++i) {
      const double a = io.a(i, f.sector);
      if (a <= 0.0) continue;
      const double units = a * f.output_last;
      const auto si = static_cast<std::size_t>(i);
      delivered_units[si] += units;
      const Cents pay = round_cents(units * avg_price[si]);
      pool[si] += pay;
      cost += pay;
    }
    f.deposits -= cost;
    f.input_cost += cost;
    debited += cost;
  }
  state.ledger.debit(Flow::Intermediate, debited);

  Cents credited = 0;
  for (int i = 0; i < S; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const auto& ids = state.sector_firms[si];
    const double fraction = avail[si] > 0.0 ? std::min(1.0, delivered_units[si] / avail[si]) : 0.0;
    std::vector<double> value(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto& f = firms[static_cast<std::size_t>(ids[k])];
      const double a = std::max(f.inventory, 0.0) + f.output_last;
      const double sold = a * fraction;
      f.inventory = std::max(a - sold, 0.0);
      f.sales += sold;
      value[k] = sold * f.price;
    }
    if (pool[si] > 0) {
      const auto money = allocate_cents(pool[si], integer_weights(value));
      for (std::size_t k = 0; k < ids.size(); ++k) {
        auto& f = firms[static_cast<std::size_t>(ids[k])];
        f.revenue += money[k];
        f.deposits += money[k];
        credited += money[k];
      }
    }
  }
  state.ledger.credit(Flow::Intermediate, credited);

  // Owed units are delivered before new sales.
  for (auto& f : firms) {
    if (f.backlog > 0.0) {
      const double d = std::min(f.backlog, f.inventory);
      f.backlog -= d;
      f.inventory -= d;
    }
    state.quarter.output += f.output_last;
    state.quarter.emissions += f.output_last * io.emission_intensity[static_cast<std::size_t>(f.sector)];
  }

  // Wages. Each household works for at most one firm, so firms write disjoint rows.
  const int threads = state.threads;
  auto& households = state.households;
  const auto n_firms = static_cast<std::int64_t>(firms.size());
  Cents wages = 0;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(+ : wages)
  for (std::int64_t k = 0; k < n_firms; ++k) {
    auto& f = firms[static_cast<std::size_t>(k)];
    Cents bill = 0;
    for (auto id : f.employees) {
      auto& h = households[static_cast<std::size_t>(id)];
      h.deposits += h.wage;
      h.income += h.wage;
      bill += h.wage;
    }
    f.deposits -= bill;
    f.wage_bill += bill;
    wages += bill;
  }
  state.ledger.debit(Flow::Wages, wages);
  state.ledger.credit(Flow::Wages, wages);
}

void pricing_step(EconomyState& state) {
  const auto& b = state.behavior;
  constexpr double kEps = 1e-9;
  for (auto& f : state.firms) {
    const double out = f.output_last;
    if (out > kEps) {
      const double amortization = static_cast<double>(f.green_capital) * b.amortization_rate;
      f.unit_cost = (static_cast<double>(f.wage_bill) + static_cast<double>(f.input_cost) + amortization) / out;
      const double ratio = f.closing_inventory / out;
      if (f.deposits < 0 || ratio < b.inventory_target * (1.0 - b.inventory_band)) {
        f.markup = std::min(b.markup_max, f.markup + b.markup_drift);
      } else if (ratio > b.inventory_target * (1.0 + b.inventory_band)) {
        f.markup = std::max(b.markup_min, f.markup - b.markup_drift);
      }
    }
    f.price = f.unit_cost * (1.0 + f.markup);
  }
}

void consumption_step(EconomyState& state, const ScenarioSpec* scenario) {
  const int S = state.io.sectors;
  const int t = state.t;

  if (scenario != nullptr && scenario->lever_b) {
    const auto& lever = *scenario->lever_b;
    const Cents amount = to_cents(lever.amount.at(t));
    int durable = -1;
    if (lever.durable) {
      for (std::size_t k = 0; k < state.durables.size(); ++k) {
        if (state.durables[k].name == *lever.durable) durable = static_cast<int>(k);
      }
      if (durable < 0) throw ScenarioError(ScenarioError::Kind::Invalid, "lever_b: unknown durable '" + *lever.durable + "'");
    }
    if (amount > 0) apply_lever_b(state, amount, lever.targeting, durable);
  }

  // Frozen snapshot of where goods are.
  std::vector<std::vector<double>> prefix(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    const auto& ids = state.sector_firms[static_cast<std::size_t>(s)];
    auto& p = prefix[static_cast<std::size_t>(s)];
    p.resize(ids.size());
    double run = 0.0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      run += std::max(state.firms[static_cast<std::size_t>(ids[k])].inventory, 0.0);
      p[k] = run;
    }
  }

  // Intents, evaluated in parallel against the snapshot.
  const std::size_t H = state.households.size();
  const auto width = static_cast<std::size_t>(S);
  std::vector<Cents> spend(H * width, 0);
  std::vector<std::int32_t> choice(H * width, 0);
  {
    const int threads = state.threads;
    const auto& households = state.households;
    const auto& sector_firms = state.sector_firms;
    const std::uint64_t seed = state.seed;
    const auto n = static_cast<std::int64_t>(H);
    const double tax_rate = state.government.tax_rate_income;
    const double demand = demand_multiplier(state);
#pragma omp parallel num_threads(threads)
    {
      std::vector<std::int64_t> weights(width);
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        const auto& h = households[static_cast<std::size_t>(i)];
        const double pending_tax =
            h.employed_by == kNoFirm ? 0.0 : static_cast<double>(round_cents(tax_rate * static_cast<double>(h.wage)));
        const double resources = std::max(0.0, static_cast<double>(h.deposits) - pending_tax);
        const auto budget = static_cast<Cents>(std::floor(h.propensity_to_consume * demand * resources));
        if (budget <= 0) continue;
        const auto row = static_cast<std::size_t>(i) * width;
        const auto w = integer_weights(h.consumption_weights);
        std::copy(w.begin(), w.end(), weights.begin());
        allocate_cents(budget, weights, std::span<Cents>(spend.data() + row, width));
        CounterRng rng(seed, Stream::Consumption, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(h.id));
        for (std::size_t s = 0; s < width; ++s) {
          if (spend[row + s] <= 0) continue;
          const auto& p = prefix[s];
          const double total = p.back();
          std::size_t pick = 0;
          if (total > 0.0) {
            const double u = rng.uniform() * total;
            pick = static_cast<std::size_t>(std::upper_bound(p.begin(), p.end(), u) - p.begin());
            pick = std::min(pick, p.size() - 1);
          } else {
            pick = static_cast<std::size_t>(rng.below(sector_firms[s].size()));
          }
          choice[row + s] = static_cast<std::int32_t>(pick);
        }
      }
    }
  }

  // Commit in ascending household id.
  Cents consumed = 0;
  const int max_search = state.behavior.max_search;
  for (std::size_t i = 0; i < H; ++i) {
    auto& h = state.households[i];
    const auto row = i * width;
    for (std::size_t s = 0; s < width; ++s) {
      Cents remaining = spend[row + s];
      if (remaining <= 0) continue;
      const auto& ids = state.sector_firms[s];
      std::size_t idx = static_cast<std::size_t>(choice[row + s]);
      for (int attempt = 0; attempt < max_search && remaining > 0 && attempt < static_cast<int>(ids.size()); ++attempt) {
        auto& f = state.firms[static_cast<std::size_t>(ids[idx])];
        idx = (idx + 1) % ids.size();
        if (f.inventory <= 0.0 || f.price <= 0.0) continue;
        const double wanted = static_cast<double>(remaining) / f.price;
        const double taken = std::min(wanted, f.inventory);
        const Cents cost = taken == wanted ? remaining : std::min(remaining, round_cents(taken * f.price));
        if (cost <= 0) continue;
        f.inventory = std::max(f.inventory - taken, 0.0);
        f.sales += taken;
        f.revenue += cost;
        f.deposits += cost;
        h.deposits -= cost;
        remaining -= cost;
        consumed += cost;
      }
    }
  }
  state.ledger.debit(Flow::Consumption, consumed);
  state.ledger.credit(Flow::Consumption, consumed);

  // Government consumption in the base composition, indexed to wages.
  const Cents per_household =
      round_cents(static_cast<double>(state.government.purchases_per_household) * wage_level(state));
  const Cents budget = per_household * static_cast<Cents>(H);
  if (budget > 0) {
    const auto by_sector = allocate_cents(budget, integer_weights(state.base_weights));
    Cents spent = 0;
    for (int s = 0; s < S; ++s) {
      spent += detail::sector_purchase(state, s, by_sector[static_cast<std::size_t>(s)], Flow::GovernmentPurchases,
                                       Delivery::Rationed);
    }
    state.government.deposits -= spent;
    state.ledger.debit(Flow::GovernmentPurchases, spent);
  }
}

}  // namespace decarb
