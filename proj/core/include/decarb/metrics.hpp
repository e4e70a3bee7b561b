#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "decarb/error.hpp"
#include "decarb/money.hpp"

namespace decarb {

struct EconomyState;

/// Headline indicators for one quarter.
struct IndicatorFrame {
  int t = 0;
  Cents gdp = 0;  // expenditure approach, per quarter
  double unemployment = 0.0;
  double inflation = 0.0;  // quarterly log change of the CPI
  double gini_income = 0.0;
  double gini_wealth = 0.0;
  std::array<double, 10> decile_income_shares{};
  double emissions = 0.0;  // tCO2 per quarter
  double debt_ratio = 0.0;  // government debt / annualised GDP
  double green_investment_share = 0.0;
  double wealth_shift = 0.0;  // amount added to wealth before the wealth Gini (0 = none)

  double cpi = 1.0;  // not emitted; carried for the next quarter's inflation
};

class MetricsError : public Error {
 public:
  enum class Kind { AllZero, TooFewValues, MissingLedger, HorizonMismatch, Empty };
  MetricsError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct GiniResult {
  double value = 0.0;
  double shift = 0.0;  // non-zero when negatives were shifted to a zero minimum
};

/// Mean absolute difference over twice the mean; negatives are handled by
/// shifting the whole vector so its minimum is zero.
GiniResult gini_shifted(std::span<const double> values);
double gini(std::span<const double> values);

/// Income shares of ten equal-count bins after an ascending sort (ties by index).
std::array<double, 10> decile_shares(std::span<const double> values);

/// Laspeyres CPI relative to the base quarter.
double consumer_price_index(const EconomyState& state);

IndicatorFrame compute_indicators(const EconomyState& state, double price_index_prev);

/// Indicator field names in emission order (CSV columns).
std::vector<std::string> indicator_columns();
std::vector<double> indicator_values(const IndicatorFrame& frame);

std::string indicators_csv(std::span<const IndicatorFrame> frames);
std::string indicators_json(std::span<const IndicatorFrame> frames);
std::vector<IndicatorFrame> parse_indicators_csv(const std::string& text);

struct DeltaRow {
  int t = 0;
  std::vector<double> deltas;  // per delta_columns()
};

struct DeltaReport {
  std::vector<std::string> columns;
  std::vector<DeltaRow> rows;
  std::vector<double> mean_full;
  std::vector<double> mean_window;  // CB7 window 2038-2042 when within the horizon
  int window_begin = 0;
  int window_end = 0;  // exclusive; equal to window_begin when empty

  double mean_window_of(const std::string& column) const;
};

/// First quarter of the run is 2025Q1.
inline constexpr int kStartYear = 2025;
inline int quarter_of_year(int year) { return (year - kStartYear) * 4; }

/// Scenario minus baseline, per quarter and averaged. Also emits GDP level
/// (percent) and growth-rate deltas.
DeltaReport compare_runs(std::span<const IndicatorFrame> baseline, std::span<const IndicatorFrame> scenario);

std::string delta_csv(const DeltaReport& report);
std::string delta_json(const DeltaReport& report);

}  // namespace decarb
