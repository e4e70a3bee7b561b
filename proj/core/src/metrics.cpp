#include "decarb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "decarb/economy.hpp"
#include "internal.hpp"

namespace decarb {

using json = nlohmann::json;
using Kind = MetricsError::Kind;

GiniResult gini_shifted(std::span<const double> values) {
  if (values.empty()) throw MetricsError(Kind::Empty, "gini: no values");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  GiniResult result;
  if (x.front() < 0.0) {
    result.shift = -x.front();
    for (auto& v : x) v += result.shift;
  }
  const auto n = static_cast<double>(x.size());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += x[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  }
  if (total <= 0.0) throw MetricsError(Kind::AllZero, "gini: all values are zero");
  result.value = weighted / (n * total);
  return result;
}

double gini(std::span<const double> values) { return gini_shifted(values).value; }

std::array<double, 10> decile_shares(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 10) throw MetricsError(Kind::TooFewValues, "decile shares need at least 10 values");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::array<double, 10> sums{};
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sums[r * 10 / n] += values[order[r]];
    total += values[order[r]];
  }
  std::array<double, 10> shares{};
  for (std::size_t b = 0; b < 10; ++b) shares[b] = total != 0.0 ? sums[b] / total : 0.1;
  return shares;
}

double consumer_price_index(const EconomyState& state) {
  double now = 0.0;
  double base = 0.0;
  for (int s = 0; s < state.io.sectors; ++s) {
    const auto k = static_cast<std::size_t>(s);
    now += state.base_weights[k] * detail::sector_price(state, s);
    base += state.base_weights[k] * state.base_prices[k];
  }
  return base > 0.0 ? now / base : 1.0;
}

IndicatorFrame compute_indicators(const EconomyState& state, double price_index_prev) {
  const auto& l = state.ledger;
  if (!l.is_closed()) throw MetricsError(Kind::MissingLedger, "indicators: the step ledger is not closed");

  IndicatorFrame f;
  f.t = state.t;
  const Cents green = l[Flow::LeverA].credited + l[Flow::LeverB].credited + l[Flow::Adoption].credited +
                      l[Flow::AdoptionSubsidy].credited;
  f.gdp = l[Flow::Consumption].credited + l[Flow::GovernmentPurchases].credited + green;

  const std::size_t H = state.households.size();
  std::size_t jobless = 0;
  std::vector<double> income(H);
  std::vector<double> wealth(H);
  for (std::size_t i = 0; i < H; ++i) {
    const auto& h = state.households[i];
    if (h.employed_by == kNoFirm) ++jobless;
    income[i] = static_cast<double>(h.income);
    wealth[i] = h.net_wealth();
  }
  f.unemployment = H > 0 ? static_cast<double>(jobless) / static_cast<double>(H) : 0.0;

  f.cpi = consumer_price_index(state);
  f.inflation = std::log(f.cpi / price_index_prev);

  const bool any_income = std::any_of(income.begin(), income.end(), [](double v) { return v != 0.0; });
  f.gini_income = any_income ? gini(income) : 0.0;
  if (!wealth.empty()) {
    const auto gw = gini_shifted(wealth);
    f.gini_wealth = gw.value;
    f.wealth_shift = gw.shift;
  }
  if (H >= 10) f.decile_income_shares = decile_shares(income);

  f.emissions = state.quarter.emissions;
  const double debt = -static_cast<double>(state.government.deposits);
  f.debt_ratio = f.gdp > 0 ? debt / (4.0 * static_cast<double>(f.gdp)) : 0.0;
  f.green_investment_share = f.gdp > 0 ? static_cast<double>(green) / static_cast<double>(f.gdp) : 0.0;
  return f;
}

std::vector<std::string> indicator_columns() {
  std::vector<std::string> cols = {"t", "gdp", "unemployment", "inflation", "gini_income", "gini_wealth"};
  for (int d = 1; d <= 10; ++d) cols.push_back("decile_income_share_" + std::to_string(d));
  for (const char* c : {"emissions", "debt_ratio", "green_investment_share", "wealth_shift"}) cols.emplace_back(c);
  return cols;
}

std::vector<double> indicator_values(const IndicatorFrame& f) {
  std::vector<double> v = {static_cast<double>(f.t), static_cast<double>(f.gdp), f.unemployment,
                           f.inflation,              f.gini_income,            f.gini_wealth};
  v.insert(v.end(), f.decile_income_shares.begin(), f.decile_income_shares.end());
  v.insert(v.end(), {f.emissions, f.debt_ratio, f.green_investment_share, f.wealth_shift});
  return v;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join_header(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  return out + "\n";
}

}  // namespace

std::string indicators_csv(std::span<const IndicatorFrame> frames) {
  std::string out = join_header(indicator_columns());
  for (const auto& f : frames) {
    const auto v = indicator_values(f);
    out += std::to_string(f.t) + "," + std::to_string(f.gdp);
    for (std::size_t i = 2; i < v.size(); ++i) out += "," + fmt(v[i]);
    out += "\n";
  }
  return out;
}

std::string indicators_json(std::span<const IndicatorFrame> frames) {
  json arr = json::array();
  for (const auto& f : frames) {
    arr.push_back({{"t", f.t},
                   {"gdp", f.gdp},
                   {"unemployment", f.unemployment},
                   {"inflation", f.inflation},
                   {"gini_income", f.gini_income},
                   {"gini_wealth", f.gini_wealth},
                   {"decile_income_shares", f.decile_income_shares},
                   {"emissions", f.emissions},
                   {"debt_ratio", f.debt_ratio},
                   {"green_investment_share", f.green_investment_share},
                   {"wealth_shift", f.wealth_shift}});
  }
  return arr.dump(2) + "\n";
}

std::vector<IndicatorFrame> parse_indicators_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line + "\n" != join_header(indicator_columns())) {
    throw MetricsError(Kind::Empty, "indicators csv: unexpected header");
  }
  std::vector<IndicatorFrame> frames;
  const std::size_t width = indicator_columns().size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != width) throw MetricsError(Kind::Empty, "indicators csv: wrong column count");
    IndicatorFrame f;
    f.t = std::stoi(cells[0]);
    f.gdp = std::stoll(cells[1]);
    f.unemployment = std::stod(cells[2]);
    f.inflation = std::stod(cells[3]);
    f.gini_income = std::stod(cells[4]);
    f.gini_wealth = std::stod(cells[5]);
    for (std::size_t d = 0; d < 10; ++d) f.decile_income_shares[d] = std::stod(cells[6 + d]);
    f.emissions = std::stod(cells[16]);
    f.debt_ratio = std::stod(cells[17]);
    f.green_investment_share = std::stod(cells[18]);
    f.wealth_shift = std::stod(cells[19]);
    frames.push_back(f);
  }
  return frames;
}

double DeltaReport::mean_window_of(const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw MetricsError(Kind::Empty, "delta report: no column '" + column + "'");
  return mean_window[static_cast<std::size_t>(it - columns.begin())];
}

DeltaReport compare_runs(std::span<const IndicatorFrame> baseline, std::span<const IndicatorFrame> scenario) {
  if (baseline.size() != scenario.size()) {
    throw MetricsError(Kind::HorizonMismatch, "compare: horizons differ (" + std::to_string(baseline.size()) + " vs " +
                                                  std::to_string(scenario.size()) + " quarters)");
  }
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (baseline[i].t != scenario[i].t) throw MetricsError(Kind::HorizonMismatch, "compare: quarter indices differ");
  }

  DeltaReport report;
  const auto cols = indicator_columns();
  report.columns.assign(cols.begin() + 1, cols.end());
  report.columns.emplace_back("gdp_pct");
  report.columns.emplace_back("gdp_growth");
  const std::size_t width = report.columns.size();

  report.window_begin = quarter_of_year(2038);
  report.window_end = quarter_of_year(2043);
  if (!baseline.empty()) {
    report.window_begin = std::clamp(report.window_begin, baseline.front().t, baseline.back().t + 1);
    report.window_end = std::clamp(report.window_end, report.window_begin, baseline.back().t + 1);
  } else {
    report.window_end = report.window_begin;
  }

  report.mean_full.assign(width, 0.0);
  report.mean_window.assign(width, 0.0);
  std::size_t in_window = 0;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    const auto b = indicator_values(baseline[i]);
    const auto s = indicator_values(scenario[i]);
    DeltaRow row;
    row.t = baseline[i].t;
    for (std::size_t c = 1; c < b.size(); ++c) row.deltas.push_back(s[c] - b[c]);
    const double bg = static_cast<double>(baseline[i].gdp);
    const double sg = static_cast<double>(scenario[i].gdp);
    row.deltas.push_back(bg > 0.0 ? 100.0 * (sg / bg - 1.0) : 0.0);
    double growth = 0.0;
    if (i > 0 && baseline[i - 1].gdp > 0 && scenario[i - 1].gdp > 0 && bg > 0.0 && sg > 0.0) {
      growth = std::log(sg / static_cast<double>(scenario[i - 1].gdp)) - std::log(bg / static_cast<double>(baseline[i - 1].gdp));
    }
    row.deltas.push_back(growth);
    const bool window = row.t >= report.window_begin && row.t < report.window_end;
    for (std::size_t c = 0; c < width; ++c) {
      report.mean_full[c] += row.deltas[c];
      if (window) report.mean_window[c] += row.deltas[c];
    }
    in_window += window ? 1 : 0;
    report.rows.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < width; ++c) {
    if (!baseline.empty()) report.mean_full[c] /= static_cast<double>(baseline.size());
    if (in_window > 0) report.mean_window[c] /= static_cast<double>(in_window);
  }
  return report;
}

std::string delta_csv(const DeltaReport& report) {
  std::vector<std::string> header = {"t"};
  header.insert(header.end(), report.columns.begin(), report.columns.end());
  std::string out = join_header(header);
  for (const auto& row : report.rows) {
    out += std::to_string(row.t);
    for (double d : row.deltas) out += "," + fmt(d);
    out += "\n";
  }
  return out;
}

std::string delta_json(const DeltaReport& report) {
  json doc;
  doc["columns"] = report.columns;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r = {{"t", row.t}};
    for (std::size_t c = 0; c < report.columns.size(); ++c) r[report.columns[c]] = row.deltas[c];
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  json full = json::object();
  json window = json::object();
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    full[report.columns[c]] = report.mean_full[c];
    window[report.columns[c]] = report.mean_window[c];
  }
  doc["mean_full"] = std::move(full);
  doc["mean_2038_2042"] = std::move(window);
  doc["window"] = {{"begin", report.window_begin}, {"end", report.window_end}};
  return doc.dump(2) + "\n";
}

}  // namespace decarb
