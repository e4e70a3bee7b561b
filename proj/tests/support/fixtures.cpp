#include "fixtures.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unistd.h>

#include "decarb/rng.hpp"

namespace decarb::testing {

std::filesystem::path data_dir() { return DECARB_TEST_DATA_DIR; }

std::filesystem::path data_file(const std::string& name) { return data_dir() / name; }

IOTable flat_io(int sectors, double coefficient, double labor, double emissions) {
  const auto s = static_cast<std::size_t>(sectors);
  return make_io_table(sectors, std::vector<double>(s * s, coefficient), std::vector<double>(s, labor),
                       std::vector<double>(s, emissions));
}

std::vector<MicroRecord> sample_records(int rows, int sectors, std::uint64_t seed) {
  SampleSpec spec;
  spec.rows = rows;
  spec.sectors = sectors;
  spec.seed = seed;
  return generate_sample(spec);
}

PolicySettings quiet_policy() {
  PolicySettings p;
  p.government.tax_rate_income = 0.2;
  p.government.transfer_per_household = to_cents(500.0);
  p.government.purchases_per_household = to_cents(1000.0);
  p.government.debt_ceiling_ratio = 0.9;
  p.government.spread_slope = 0.05;
  p.initial_debt_ratio = 0.5;
  return p;
}

EconomyState small_economy(int households, int firms, int sectors, std::uint64_t seed, const PolicySettings& policy) {
  const auto records = sample_records(50, sectors, seed);
  PopulationConfig cfg;
  cfg.n_households = households;
  cfg.n_firms = firms;
  cfg.n_sectors = sectors;
  cfg.seed = seed;
  auto pop = build_population(records, cfg);
  return init_state(std::move(pop), flat_io(sectors), policy, BehaviorParams{}, seed);
}

EconomyState diffusion_economy(int households, int degree_k, double rewire_p, const AdoptionParams& params,
                               std::uint64_t seed) {
  auto s = small_economy(households, 4, 2, seed);
  for (auto& h : s.households) {
    h.region_code = 0;
    h.deposits = to_cents(1e6);
  }
  DurableKind kind;
  kind.name = "heat_pump";
  kind.price = to_cents(1000.0);
  kind.params = params;
  kind.degree_k = degree_k;
  kind.rewire_p = rewire_p;
  s.durables.push_back(kind);
  s.networks.push_back(build_network(s.households, degree_k, rewire_p, seed));
  s.durable_network.push_back(0);
  return s;
}

void seed_cluster(EconomyState& state, int first, int count) {
  const auto order = ring_order(state.households);
  const auto n = static_cast<int>(order.size());
  for (int k = 0; k < count; ++k) {
    state.households[static_cast<std::size_t>(order[static_cast<std::size_t>((first + k) % n)])].durables |= 1U;
  }
}

std::vector<std::uint8_t> adopters(const EconomyState& state, int kind) {
  std::vector<std::uint8_t> out;
  out.reserve(state.households.size());
  for (const auto& h : state.households) out.push_back(h.adopted(kind) ? 1 : 0);
  return out;
}

double shuffled_null_mean(const SocialGraph& graph, std::span<const std::uint8_t> adopters, int trials,
                          std::uint64_t seed) {
  std::vector<std::uint8_t> labels(adopters.begin(), adopters.end());
  double sum = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    CounterRng rng(seed, Stream::Shuffle, static_cast<std::uint64_t>(trial));
    for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);
    sum += hotspot_index(graph, labels);
  }
  return sum / trials;
}

HotspotTrial hotspot_trial(std::uint64_t seed) {
  AdoptionParams params;
  params.base_utility = -7.0;
  params.peer_coeff = 6.0;
  auto s = diffusion_economy(1000, 8, 0.05, params, seed);
  seed_cluster(s, static_cast<int>(seed % 1000), 10);
  for (int q = 0; q < 40; ++q) {
    s.t = q;
    begin_quarter(s);
    diffusion_step(s);
  }
  HotspotTrial out;
  const auto a = adopters(s);
  for (auto x : a) out.adopters += x;
  out.observed = hotspot_index(s.networks[0], a);
  out.null_mean = shuffled_null_mean(s.networks[0], a, 100, seed);
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig fixture_config(const std::string& patch_json) {
  auto doc = nlohmann::json::parse(slurp(data_file("fixture_config.json")));
  doc.merge_patch(nlohmann::json::parse(patch_json));
  return parse_config(doc.dump(), data_dir());
}

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = std::filesystem::temp_directory_path() /
          ("decarb_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace decarb::testing
