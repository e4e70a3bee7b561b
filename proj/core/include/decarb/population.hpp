#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decarb/agents.hpp"
#include "decarb/error.hpp"

namespace decarb {

/// One row of an (already linked) household survey extract.
struct MicroRecord {
  std::int64_t record_id = 0;
  double survey_weight = 1.0;  // households represented
  double gross_income = 0.0;   // per year
  double net_wealth = 0.0;     // may be negative
  int region_code = 1;         // 1..12
  int household_size = 1;
  std::vector<double> expenditure_shares;
};

struct TailImputationConfig {
  double tail_quantile = 0.99;
  double pareto_alpha = 1.5;
  std::optional<double> target_top_share;

  void validate() const;
};

struct FirmSizeDistribution {
  double mean_employees = 20.0;  // lognormal mean
  double sigma = 1.0;            // standard deviation of log size
};

struct PopulationConfig {
  int n_households = 1;
  int n_firms = 1;
  int n_sectors = 1;
  std::uint64_t seed = 0;
  FirmSizeDistribution firm_size;
  double propensity_to_consume = 0.25;

  void validate() const;
};

struct Population {
  std::vector<Household> households;
  std::vector<Firm> firms;
};

class PopulationError : public Error {
 public:
  enum class Kind {
    MissingColumn,
    RowInvariantViolation,
    EmptyFile,
    DegenerateTail,
    TargetUnreachable,
    EmptyRecords,
    SectorUnderflow,
    ShareDimension,
    InvalidConfig,
  };

  PopulationError(Kind kind, const std::string& what, int line = 0) : Error(what), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  /// 1-based data row for row-level errors (header excluded), else 0.
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

/// Reads the micro-record CSV. Row order is preserved. A trailing comment
/// line `# total_weight=<value>` is accepted and ignored here.
std::vector<MicroRecord> parse_microdata(const std::filesystem::path& path);
std::vector<MicroRecord> parse_microdata_text(const std::string& text);

/// Optional footer control total written by the sample generator.
std::optional<double> read_total_weight_footer(const std::filesystem::path& path);

/// Redraws net wealth at and above the empirical tail quantile from a Pareto
/// law anchored at the quantile value. Rows below the quantile are untouched.
std::vector<MicroRecord> impute_wealth_tail(std::span<const MicroRecord> records, const TailImputationConfig& cfg,
                                            std::uint64_t seed);

/// Weighted resampling of households and round-robin sector assignment of
/// lognormally sized firms. Deterministic in cfg.seed.
Population build_population(std::span<const MicroRecord> records, const PopulationConfig& cfg);

/// Initial deposits: 15% of positive net wealth plus a quarter of annual gross income.
Cents initial_deposits(double net_wealth, double gross_income);

struct SampleSpec {
  int rows = 1000;
  int sectors = 10;
  std::uint64_t seed = 2025;
  double total_weight = 28'000'000.0;
};

/// Synthetic stand-in for licensed survey data: lognormal incomes, wealth
/// correlated with income, Dirichlet expenditure shares.
std::vector<MicroRecord> generate_sample(const SampleSpec& spec);

/// Writes records with the schema header and the `# total_weight=` footer.
void write_microdata(const std::filesystem::path& path, std::span<const MicroRecord> records);
std::string format_microdata(std::span<const MicroRecord> records);

}  // namespace decarb
