#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "decarb/runner.hpp"

namespace decarb {

enum class Moment { MeanInflation, MeanUnemployment, MeanGdpGrowth };

struct CalibrationTarget {
  Moment moment = Moment::MeanInflation;
  double target = 0.0;
  double weight = 1.0;
};

/// One swept parameter: a dotted path into the run config document
/// (e.g. "behavior.markup_drift") or one of the short aliases
/// markup_drift, propensity_to_consume, taylor_pi.
struct SweepParameter {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  int points = 2;
};

struct SweepSpec {
  std::vector<SweepParameter> parameters;
  std::vector<CalibrationTarget> targets;
  int burn_in = 0;
  int horizon = 1;
  std::uint64_t seed = 0;
  std::size_t budget = 1000;  // maximum grid size

  void validate() const;
};

class CalibrationError : public Error {
 public:
  enum class Kind { BudgetExceeded, InvalidSpec, UnknownParameter };
  CalibrationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Moments {
  double mean_inflation = 0.0;
  double mean_unemployment = 0.0;
  double mean_gdp_growth = 0.0;

  double get(Moment m) const;
};

struct SweepResult {
  std::size_t grid_index = 0;
  std::vector<double> values;  // per parameter
  Moments moments;
  double loss = 0.0;
  std::string config_hash;
  bool cached = false;
};

SweepSpec parse_sweep(const std::string& json_text);
SweepSpec load_sweep(const std::filesystem::path& path);

/// Cartesian grid, last parameter varying fastest.
std::vector<std::vector<double>> sweep_grid(const SweepSpec& spec);

/// Moments over quarters t >= burn_in.
Moments compute_moments(std::span<const IndicatorFrame> frames, int burn_in);
double calibration_loss(const Moments& moments, std::span<const CalibrationTarget> targets);

/// Ascending loss, ties by grid index.
void rank_results(std::vector<SweepResult>& results);

/// Runs every grid point. Results are cached under
/// `cache_root/<config-hash>/<seed>.json` and reused when present.
std::vector<SweepResult> sweep(const SweepSpec& spec, const std::string& base_config_json,
                               const std::filesystem::path& base_dir, const std::optional<std::filesystem::path>& cache_root,
                               int workers = 1);

std::string sweep_results_json(const SweepSpec& spec, const std::vector<SweepResult>& results);

}  // namespace decarb
