#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "decarb/diffusion.hpp"
#include "decarb/economy.hpp"
#include "decarb/population.hpp"
#include "decarb/runner.hpp"

namespace decarb::testing {

std::filesystem::path data_dir();
std::filesystem::path data_file(const std::string& name);

/// a(i, j) = `coefficient` for every pair, same labour and emission row everywhere.
IOTable flat_io(int sectors, double coefficient = 0.05, double labor = 0.02, double emissions = 1.0);

std::vector<MicroRecord> sample_records(int rows, int sectors, std::uint64_t seed = 11);

PolicySettings quiet_policy();

/// Small closed economy built through the same path as a real run.
EconomyState small_economy(int households = 10, int firms = 2, int sectors = 2, std::uint64_t seed = 42,
                           const PolicySettings& policy = quiet_policy());

/// Households on one region ring (ring position = id), ample deposits, one
/// durable kind "heat_pump" priced at 1,000 on a (k, p) small-world network.
EconomyState diffusion_economy(int households, int degree_k, double rewire_p, const AdoptionParams& params,
                               std::uint64_t seed);

/// Marks ring positions [first, first + count) as adopters of durable 0.
void seed_cluster(EconomyState& state, int first, int count);

std::vector<std::uint8_t> adopters(const EconomyState& state, int kind = 0);

/// Mean hotspot index over `trials` random relabellings of the adopter set.
double shuffled_null_mean(const SocialGraph& graph, std::span<const std::uint8_t> adopters, int trials,
                          std::uint64_t seed);

struct HotspotTrial {
  double observed = 0.0;
  double null_mean = 0.0;
  int adopters = 0;
};

/// 1% seeded cluster on a 1,000-household p = 0.05 network, 40 quarters of
/// peer-driven diffusion, scored against 100 label-shuffled nulls.
HotspotTrial hotspot_trial(std::uint64_t seed);

/// Run config for the bundled fixture with overrides applied to its JSON document.
RunConfig fixture_config(const std::string& patch_json = "{}");

std::string slurp(const std::filesystem::path& path);

class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace decarb::testing
