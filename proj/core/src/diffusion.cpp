#include "decarb/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "decarb/economy.hpp"
#include "decarb/rng.hpp"
#include "internal.hpp"

namespace decarb {

using Kind = DiffusionError::Kind;

bool SocialGraph::has_edge(HouseholdId a, HouseholdId b) const {
  const auto& adj = adjacency[static_cast<std::size_t>(a)];
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::size_t SocialGraph::edge_count() const {
  std::size_t ends = 0;
  for (const auto& adj : adjacency) ends += adj.size();
  return ends / 2;
}

void SocialGraph::validate() const {
  const auto n = static_cast<HouseholdId>(adjacency.size());
  for (HouseholdId i = 0; i < n; ++i) {
    const auto& adj = adjacency[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < adj.size(); ++k) {
      const auto j = adj[k];
      if (j < 0 || j >= n) throw std::logic_error("graph: neighbour id out of range");
      if (j == i) throw std::logic_error("graph: self-loop at " + std::to_string(i));
      if (k > 0 && adj[k - 1] >= j) throw std::logic_error("graph: unsorted or duplicate edge at " + std::to_string(i));
      if (!has_edge(j, i)) throw std::logic_error("graph: edge " + std::to_string(i) + "-" + std::to_string(j) + " is one-way");
    }
  }
}

void AdoptionParams::validate() const {
  if (!(price_coeff <= 0.0)) throw DiffusionError(Kind::InvalidParams, "adoption: price_coeff must be <= 0");
  if (!(income_coeff >= 0.0)) throw DiffusionError(Kind::InvalidParams, "adoption: income_coeff must be >= 0");
  if (!(peer_coeff >= 0.0)) throw DiffusionError(Kind::InvalidParams, "adoption: peer_coeff must be >= 0");
  if (!(subsidy_coeff >= 0.0)) throw DiffusionError(Kind::InvalidParams, "adoption: subsidy_coeff must be >= 0");
  if (!std::isfinite(base_utility)) throw DiffusionError(Kind::InvalidParams, "adoption: base utility must be finite");
}

std::vector<HouseholdId> ring_order(std::span<const Household> households) {
  std::vector<HouseholdId> order(households.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](HouseholdId a, HouseholdId b) {
    const auto& ha = households[static_cast<std::size_t>(a)];
    const auto& hb = households[static_cast<std::size_t>(b)];
    if (ha.region_code != hb.region_code) return ha.region_code < hb.region_code;
    return ha.id < hb.id;
  });
  return order;
}

namespace {

bool contains(const std::vector<HouseholdId>& v, HouseholdId x) { return std::find(v.begin(), v.end(), x) != v.end(); }

void erase_value(std::vector<HouseholdId>& v, HouseholdId x) { v.erase(std::find(v.begin(), v.end(), x)); }

}  // namespace

SocialGraph build_network(std::span<const Household> households, int degree_k, double rewire_p, std::uint64_t seed) {
  const auto n = static_cast<std::int64_t>(households.size());
  if (degree_k < 2 || degree_k % 2 != 0 || degree_k >= n) {
    throw DiffusionError(Kind::DegreeTooLarge, "network: degree_k must be even with 2 <= k < n (k = " +
                                                   std::to_string(degree_k) + ", n = " + std::to_string(n) + ")");
  }
  if (!(rewire_p >= 0.0 && rewire_p <= 1.0)) throw DiffusionError(Kind::InvalidParams, "network: rewire_p must lie in [0,1]");

  const auto order = ring_order(households);
  SocialGraph g;
  g.degree_k = degree_k;
  g.rewire_p = rewire_p;
  g.adjacency.assign(static_cast<std::size_t>(n), {});
  auto& adj = g.adjacency;
  const int half = degree_k / 2;
  for (std::int64_t pos = 0; pos < n; ++pos) {
    const auto u = order[static_cast<std::size_t>(pos)];
    for (int j = 1; j <= half; ++j) {
      const auto v = order[static_cast<std::size_t>((pos + j) % n)];
      adj[static_cast<std::size_t>(u)].push_back(v);
      adj[static_cast<std::size_t>(v)].push_back(u);
    }
  }

  if (rewire_p > 0.0) {
    for (std::int64_t pos = 0; pos < n; ++pos) {
      const auto u = order[static_cast<std::size_t>(pos)];
      auto& au = adj[static_cast<std::size_t>(u)];
      for (int j = 1; j <= half; ++j) {
        CounterRng rng(seed, Stream::Network, static_cast<std::uint64_t>(pos), static_cast<std::uint64_t>(j));
        if (rng.uniform() >= rewire_p) continue;
        const auto v = order[static_cast<std::size_t>((pos + j) % n)];
        if (!contains(au, v)) continue;  // already rewired away from the other end
        if (static_cast<std::int64_t>(au.size()) >= n - 1) continue;
        HouseholdId w = u;
        while (w == u || contains(au, w)) w = static_cast<HouseholdId>(rng.below(static_cast<std::uint64_t>(n)));
        erase_value(au, v);
        erase_value(adj[static_cast<std::size_t>(v)], u);
        au.push_back(w);
        adj[static_cast<std::size_t>(w)].push_back(u);
      }
    }
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return g;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double adoption_probability(const AdoptionParams& params, double annual_income, double peer_share, double price,
                            double subsidy) {
  if (!(annual_income > 0.0)) throw DiffusionError(Kind::InvalidParams, "adoption: income must be positive");
  if (!(price > 0.0)) throw DiffusionError(Kind::InvalidParams, "adoption: price must be positive");
  const double index = params.base_utility + params.price_coeff * price / annual_income +
                       params.income_coeff * std::log(annual_income) + params.peer_coeff * peer_share +
                       params.subsidy_coeff * subsidy / price;
  return logistic(index);
}

double adoption_probability(const Household& household, const DurableKind& /*kind*/, const AdoptionParams& params,
                            double peer_share, double price, double subsidy) {
  return adoption_probability(params, annual_income_major(household), peer_share, price, subsidy);
}

double annual_income_major(const Household& household) {
  return std::max(1.0, 4.0 * static_cast<double>(household.income) / 100.0);
}

double durable_price(const EconomyState& state, int kind) {
  const auto& d = state.durables[static_cast<std::size_t>(kind)];
  double price = static_cast<double>(d.price);
  if (d.tech_ref) price *= state.tech[static_cast<std::size_t>(*d.tech_ref)].cost_index();
  return price;
}

void diffusion_step(EconomyState& state, const ScenarioSpec* scenario) {
  const std::size_t H = state.households.size();
  for (std::size_t k = 0; k < state.durables.size(); ++k) {
    const auto& kind = state.durables[k];
    const auto& graph = state.networks[static_cast<std::size_t>(state.durable_network[k])];
    const int bit = static_cast<int>(k);

    std::vector<std::uint8_t> adopted(H);
    for (std::size_t i = 0; i < H; ++i) adopted[i] = state.households[i].adopted(bit) ? 1 : 0;

    const Cents price = std::max<Cents>(1, round_cents(durable_price(state, bit)));
    const Cents subsidy = std::clamp<Cents>(kind.subsidy, 0, price);
    const Cents net = price - subsidy;
    const double price_major = static_cast<double>(price) / 100.0;
    const double subsidy_major = static_cast<double>(subsidy) / 100.0;

    // Intents against the frozen adopter set.
    std::vector<std::uint8_t> decide(H, 0);
    {
      const auto& households = state.households;
      const std::uint64_t seed = state.seed;
      const auto t = static_cast<std::uint64_t>(state.t);
      const auto n = static_cast<std::int64_t>(H);
#pragma omp parallel for schedule(static) num_threads(state.threads)
      for (std::int64_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        if (adopted[i]) continue;
        const auto& h = households[i];
        if (h.deposits < net) continue;
        const auto& nb = graph.adjacency[i];
        std::size_t peers = 0;
        for (auto j : nb) peers += adopted[static_cast<std::size_t>(j)];
        const double peer_share = nb.empty() ? 0.0 : static_cast<double>(peers) / static_cast<double>(nb.size());
        const double p = adoption_probability(h, kind, kind.params, peer_share, price_major, subsidy_major);
        CounterRng rng(seed, Stream::Diffusion, t, (static_cast<std::uint64_t>(h.id) << 8) | k);
        decide[i] = rng.uniform() < p ? 1 : 0;
      }
    }

    std::int64_t count = 0;
    Cents paid = 0;
    for (std::size_t i = 0; i < H; ++i) {
      if (!decide[i]) continue;
      auto& h = state.households[i];
      if (h.deposits < net) continue;
      h.deposits -= net;
      h.green_spend += net;
      h.durables |= (1U << bit);
      paid += net;
      ++count;
      if (kind.weight_shift) shift_weight(h.consumption_weights, kind.weight_shift->from, kind.weight_shift->to,
                                          kind.weight_shift->fraction);
      if (scenario != nullptr) {
        for (const auto& s : scenario->lever_e) {
          if (s.adoption && *s.adoption == kind.name) shift_weight(h.consumption_weights, s.category_from, s.category_to, s.fraction);
        }
      }
    }
    if (count == 0) continue;
    const Cents subsidy_total = subsidy * count;
    state.ledger.debit(Flow::Adoption, paid);
    detail::sector_purchase(state, state.green_sector, paid, Flow::Adoption, detail::Delivery::Backorder);
    if (subsidy_total > 0) {
      state.government.deposits -= subsidy_total;
      state.ledger.debit(Flow::AdoptionSubsidy, subsidy_total);
      detail::sector_purchase(state, state.green_sector, subsidy_total, Flow::AdoptionSubsidy, detail::Delivery::Backorder);
    }
    state.quarter.green_purchases += paid + subsidy_total;
    state.quarter.adoptions += count;
  }
}

double hotspot_index(const SocialGraph& graph, std::span<const std::uint8_t> adopters) {
  const std::size_t n = graph.size();
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) m += adopters[i] ? 1 : 0;
  if (m == 0) throw DiffusionError(Kind::EmptyAdopterSet, "hotspot index: no adopters");
  if (m == n) return 1.0;
  std::size_t ends = 0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!adopters[i]) continue;
    for (auto j : graph.adjacency[i]) {
      ++ends;
      same += adopters[static_cast<std::size_t>(j)] ? 1 : 0;
    }
  }
  if (ends == 0) return 0.0;
  const double observed = static_cast<double>(same) / static_cast<double>(ends);
  const double expected = static_cast<double>(m - 1) / static_cast<double>(n - 1);
  return (observed - expected) / (1.0 - expected);
}

}  // namespace decarb
