#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "decarb/economy.hpp"
#include "decarb/population.hpp"

namespace decarb {

struct TechConfig {
  TechCurve curve;
  std::optional<AdoptionCurve> adoption;
  double purchase_share = 0.0;
};

/// A run configuration document, with relative paths resolved against the
/// directory holding the config file.
struct RunConfig {
  std::filesystem::path microdata;
  TailImputationConfig tail;
  bool impute_tail = false;
  PopulationConfig population;
  std::filesystem::path io_table;
  PolicySettings policy;
  BehaviorParams behavior;
  std::vector<TechConfig> technologies;
  std::vector<DurableKind> durables;
  int horizon_quarters = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;

  std::string document;  // the parsed JSON, re-serialised canonically
};

/// Parses a run config. `base_dir` resolves relative paths; every referenced
/// file must exist. Throws ParseError.
/// A seed override replaces the document's seed before anything else is read.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir,
                       std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Hex FNV-1a hash of the canonical config plus the bytes of every file it names.
std::string config_hash(const RunConfig& config);
std::string hash_hex(const std::string& bytes);

/// Reads inputs, builds the population and the t = 0 economy (technologies,
/// durables and social networks included).
EconomyState build_economy(const RunConfig& config, int threads = 1);

struct RunOptions {
  int threads = 1;
  std::optional<int> inject_fault_quarter;
  std::optional<int> horizon;  // overrides config.horizon_quarters
  std::function<void(const EconomyState&)> on_quarter;
};

struct RunResult {
  std::vector<IndicatorFrame> frames;
  EconomyState final_state;
};

RunResult run_simulation(const RunConfig& config, const ScenarioSpec* scenario, const RunOptions& options = {});

/// Final balance sheets, aggregated, as a JSON document.
std::string balance_sheet_json(const EconomyState& state);

}  // namespace decarb
