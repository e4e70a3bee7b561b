#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decarb/error.hpp"
#include "decarb/money.hpp"

namespace decarb {

struct EconomyState;
struct IOTable;
struct Household;

/// Quarter-indexed values; zero outside the specified quarters.
struct Pathway {
  std::map<int, double> values;

  double at(int quarter) const;
  bool empty() const;  // true when every value is zero
};

enum class Targeting { All, NonAdopters };
enum class SubsidyTarget { Firms, Households };
enum class Allocation { Uniform, ProportionalToGreenSpend };
enum class Financing { Expansion, ReducedSpending };

/// Firms forced to spend a share of last-quarter revenue on green capital.
struct LeverA {
  Pathway share;
  std::map<int, Pathway> sector_share;  // per-sector override

  double share_for(int sector, int quarter) const;
};

/// Households forced to spend a fixed amount (major units) on green goods.
struct LeverB {
  Pathway amount;
  Targeting targeting = Targeting::All;
  std::optional<std::string> durable;  // non_adopters of this kind; any kind when absent
};

/// Subsidy totals (major units per quarter).
struct LeverC {
  Pathway total;
  SubsidyTarget target = SubsidyTarget::Households;
  Allocation allocation = Allocation::Uniform;
  Financing financing = Financing::Expansion;
};

/// Linear change of one technical coefficient a(from, to).
struct CoefficientEdit {
  int sector_from = 0;
  int sector_to = 0;
  int start_quarter = 0;
  int end_quarter = 0;
  double start_value = 0.0;
  double end_value = 0.0;

  /// Value in force at quarter t; nullopt before the start quarter.
  std::optional<double> value_at(int t) const;
};

/// Consumption-weight shift, triggered at a quarter or by durable adoption.
struct WeightShift {
  int category_from = 0;
  int category_to = 0;
  double fraction = 0.0;
  std::optional<int> quarter;
  std::optional<std::string> adoption;
};

struct ScenarioSpec {
  std::string name = "baseline";
  int horizon_quarters = 1;
  std::optional<int> green_sector;
  std::optional<LeverA> lever_a;
  std::optional<LeverB> lever_b;
  std::optional<LeverC> lever_c;
  std::vector<CoefficientEdit> lever_d;
  std::vector<WeightShift> lever_e;
};

class ScenarioError : public Error {
 public:
  enum class Kind { Parse, UnknownLever, NegativePathway, Invalid, Replay };
  ScenarioError(Kind kind, const std::string& what, int line = 0) : Error(what), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

ScenarioSpec load_scenario(const std::filesystem::path& path);
ScenarioSpec parse_scenario(const std::string& json_text);

/// Forced green investment by firms; the spend is a purchase from the green sector.
void apply_lever_a(EconomyState& state, std::span<const double> share_by_sector);
/// Forced green purchase per targeted household; `durable` < 0 means any kind.
void apply_lever_b(EconomyState& state, Cents amount, Targeting targeting, int durable = -1);

struct SubsidyOrder {
  Cents total = 0;
  SubsidyTarget target = SubsidyTarget::Households;
  Allocation allocation = Allocation::Uniform;
  Financing financing = Financing::Expansion;
};

/// Pays the subsidy and returns how much of `transfer_pool` it displaces
/// (zero under expansion financing).
Cents apply_lever_c(EconomyState& state, const SubsidyOrder& order, Cents transfer_pool);

/// Applies coefficient edits for quarter t and re-verifies Leontief productivity.
void apply_lever_d(IOTable& io, std::span<const CoefficientEdit> edits, int t);
void apply_lever_d(EconomyState& state, std::span<const CoefficientEdit> edits, int t);

/// Applies the quarter-triggered weight shifts scheduled for quarter t.
void apply_lever_e(EconomyState& state, std::span<const WeightShift> shifts, int t);

/// Moves `fraction` of weights[from] to weights[to] and renormalises.
void shift_weight(std::vector<double>& weights, int from, int to, double fraction);

/// Scenario instructions for quarter t, resolved into concrete amounts.
SubsidyOrder subsidy_order(const ScenarioSpec& spec, int t);

}  // namespace decarb
