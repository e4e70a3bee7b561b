#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decarb/agents.hpp"
#include "decarb/error.hpp"

namespace decarb {

struct EconomyState;
struct ScenarioSpec;

/// Undirected household network; adjacency lists are sorted ascending.
struct SocialGraph {
  std::vector<std::vector<HouseholdId>> adjacency;
  int degree_k = 0;
  double rewire_p = 0.0;

  std::size_t size() const { return adjacency.size(); }
  bool has_edge(HouseholdId a, HouseholdId b) const;
  std::size_t edge_count() const;
  /// Throws std::logic_error unless undirected, loop-free and duplicate-free.
  void validate() const;
};

struct AdoptionParams {
  double base_utility = 0.0;
  double price_coeff = 0.0;    // <= 0
  double income_coeff = 0.0;   // >= 0
  double peer_coeff = 0.0;     // >= 0
  double subsidy_coeff = 0.0;  // >= 0

  void validate() const;
};

/// Moves `fraction` of the weight on `from` to `to`.
struct ShiftRule {
  int from = 0;
  int to = 0;
  double fraction = 0.0;
};

struct DurableKind {
  std::string name;
  Cents price = 0;                 // reference price, scaled by the tech cost index when linked
  std::optional<int> tech_ref;     // index into EconomyState::tech
  std::optional<ShiftRule> weight_shift;
  AdoptionParams params;
  Cents subsidy = 0;               // government-paid part of the price
  int degree_k = 8;
  double rewire_p = 0.05;
};

class DiffusionError : public Error {
 public:
  enum class Kind { DegreeTooLarge, EmptyAdopterSet, InvalidParams };
  DiffusionError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Small-world graph over a geographic ring: households sorted by
/// (region_code, id), each joined to its k nearest ring neighbours, then each
/// lattice edge rewired with probability p to a uniform non-neighbour.
SocialGraph build_network(std::span<const Household> households, int degree_k, double rewire_p, std::uint64_t seed);

/// Ring positions used by build_network: household ids in (region, id) order.
std::vector<HouseholdId> ring_order(std::span<const Household> households);

double logistic(double x);

/// Logistic discrete choice over
/// base + price_coeff*price/income + income_coeff*log(income)
///      + peer_coeff*peer_share + subsidy_coeff*subsidy/price.
/// Income and price must be in the same currency unit and positive.
double adoption_probability(const AdoptionParams& params, double annual_income, double peer_share, double price,
                            double subsidy);
double adoption_probability(const Household& household, const DurableKind& kind, const AdoptionParams& params,
                            double peer_share, double price, double subsidy);

/// Annual income in major currency units used by the adoption choice
/// (four times the household's income flows this quarter, at least 1).
double annual_income_major(const Household& household);

/// Current price of a durable in cents, following its linked technology's cost index.
double durable_price(const EconomyState& state, int kind);

/// One synchronous adoption round for every durable kind.
void diffusion_step(EconomyState& state, const ScenarioSpec* scenario = nullptr);

/// Excess adopter-adopter clustering: among edge endpoints of adopters, the
/// share that land on adopters, minus its expectation (m-1)/(n-1) under random
/// placement, normalised by one minus that expectation. Returns 1 when every
/// node has adopted.
double hotspot_index(const SocialGraph& graph, std::span<const std::uint8_t> adopters);

}  // namespace decarb
