#include "decarb/population.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "decarb/rng.hpp"

namespace decarb {

namespace {

using Kind = PopulationError::Kind;

const std::vector<std::string> kFixedColumns = {"record_id",    "survey_weight", "gross_income",
                                                "net_wealth",   "region_code",   "household_size"};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& text, int row, const std::string& column) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw PopulationError(Kind::RowInvariantViolation,
                          "row " + std::to_string(row) + ": column '" + column + "' is not a number: '" + text + "'",
                          row);
  }
  return value;
}

std::int64_t parse_integer(const std::string& text, int row, const std::string& column) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw PopulationError(Kind::RowInvariantViolation,
                          "row " + std::to_string(row) + ": column '" + column + "' is not an integer: '" + text + "'",
                          row);
  }
  return value;
}

void check_record(const MicroRecord& r, int row) {
  auto fail = [row](const std::string& reason) {
    throw PopulationError(Kind::RowInvariantViolation, "row " + std::to_string(row) + ": " + reason, row);
  };
  if (!(r.survey_weight > 0.0)) fail("survey_weight must be > 0");
  if (r.household_size < 1) fail("household_size must be >= 1");
  if (r.region_code < 1 || r.region_code > 12) fail("region_code must be in 1..12");
  double sum = 0.0;
  for (double s : r.expenditure_shares) {
    if (s < 0.0) fail("expenditure shares must be non-negative");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail("expenditure shares sum to " + std::to_string(sum) + ", expected 1");
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace

void TailImputationConfig::validate() const {
  if (!(tail_quantile > 0.0 && tail_quantile < 1.0)) {
    throw PopulationError(Kind::InvalidConfig, "tail_quantile must lie in (0, 1)");
  }
  if (!(pareto_alpha > 1.0)) throw PopulationError(Kind::InvalidConfig, "pareto_alpha must be > 1");
  if (target_top_share && !(*target_top_share > 0.0 && *target_top_share < 1.0)) {
    throw PopulationError(Kind::InvalidConfig, "target_top_share must lie in (0, 1)");
  }
}

void PopulationConfig::validate() const {
  if (n_households < 1) throw PopulationError(Kind::InvalidConfig, "n_households must be >= 1");
  if (n_sectors < 1) throw PopulationError(Kind::InvalidConfig, "n_sectors must be >= 1");
  if (n_firms < n_sectors) {
    throw PopulationError(Kind::SectorUnderflow, "n_firms (" + std::to_string(n_firms) + ") < n_sectors (" +
                                                     std::to_string(n_sectors) + ")");
  }
  if (!(propensity_to_consume > 0.0 && propensity_to_consume <= 1.0)) {
    throw PopulationError(Kind::InvalidConfig, "propensity_to_consume must lie in (0, 1]");
  }
  if (!(firm_size.mean_employees > 0.0) || !(firm_size.sigma >= 0.0)) {
    throw PopulationError(Kind::InvalidConfig, "firm size distribution needs mean > 0 and sigma >= 0");
  }
}

std::vector<MicroRecord> parse_microdata_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) throw PopulationError(Kind::EmptyFile, "micro-data file has no header");

  for (std::size_t c = 0; c < kFixedColumns.size(); ++c) {
    if (c >= header.size() || header[c] != kFixedColumns[c]) {
      throw PopulationError(Kind::MissingColumn, "missing column '" + kFixedColumns[c] + "'");
    }
  }
  const std::size_t n_shares = header.size() - kFixedColumns.size();
  if (n_shares == 0) throw PopulationError(Kind::MissingColumn, "missing column 'share_1'");
  for (std::size_t s = 0; s < n_shares; ++s) {
    const std::string expected = "share_" + std::to_string(s + 1);
    if (header[kFixedColumns.size() + s] != expected) {
      throw PopulationError(Kind::MissingColumn, "missing column '" + expected + "'");
    }
  }

  std::vector<MicroRecord> records;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    ++row;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw PopulationError(Kind::RowInvariantViolation,
                            "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                " fields, found " + std::to_string(fields.size()),
                            row);
    }
    MicroRecord r;
    r.record_id = parse_integer(fields[0], row, header[0]);
    r.survey_weight = parse_real(fields[1], row, header[1]);
    r.gross_income = parse_real(fields[2], row, header[2]);
    r.net_wealth = parse_real(fields[3], row, header[3]);
    r.region_code = static_cast<int>(parse_integer(fields[4], row, header[4]));
    r.household_size = static_cast<int>(parse_integer(fields[5], row, header[5]));
    r.expenditure_shares.reserve(n_shares);
    for (std::size_t s = 0; s < n_shares; ++s) {
      r.expenditure_shares.push_back(parse_real(fields[6 + s], row, header[6 + s]));
    }
    check_record(r, row);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw PopulationError(Kind::EmptyFile, "micro-data file has no records");
  return records;
}

std::vector<MicroRecord> parse_microdata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PopulationError(Kind::EmptyFile, "cannot open micro-data file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_microdata_text(buffer.str());
}

std::optional<double> read_total_weight_footer(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::optional<double> total;
  const std::string key = "# total_weight=";
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) == 0) total = std::stod(line.substr(key.size()));
  }
  return total;
}

std::vector<MicroRecord> impute_wealth_tail(std::span<const MicroRecord> records, const TailImputationConfig& cfg,
                                            std::uint64_t seed) {
  cfg.validate();
  if (records.empty()) throw PopulationError(Kind::EmptyRecords, "impute_wealth_tail: no records");
  std::vector<MicroRecord> out(records.begin(), records.end());
  const std::size_t n = records.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].net_wealth < records[b].net_wealth; });
  if (records[order.front()].net_wealth == records[order.back()].net_wealth) {
    throw PopulationError(Kind::DegenerateTail, "impute_wealth_tail: all net_wealth values are equal");
  }

  // Tail = ranks >= ceil(q n); the threshold is the order statistic just below it.
  const auto first_tail = static_cast<std::size_t>(std::ceil(cfg.tail_quantile * static_cast<double>(n)));
  if (first_tail >= n) return out;
  const double threshold = records[order[first_tail == 0 ? 0 : first_tail - 1]].net_wealth;
  if (!(threshold > 0.0)) {
    throw PopulationError(Kind::DegenerateTail, "impute_wealth_tail: quantile threshold is not positive");
  }

  double excess = 0.0;
  for (std::size_t rank = first_tail; rank < n; ++rank) {
    const std::size_t idx = order[rank];
    CounterRng rng(seed, Stream::TailImputation, idx);
    const double u = rng.uniform_open_low();
    out[idx].net_wealth = threshold * std::pow(u, -1.0 / cfg.pareto_alpha);
    excess += out[idx].net_wealth - threshold;
  }

  if (cfg.target_top_share) {
    const double share = *cfg.target_top_share;
    const double tail_count = static_cast<double>(n - first_tail);
    double rest = 0.0;
    for (std::size_t rank = 0; rank < first_tail; ++rank) rest += out[order[rank]].net_wealth;
    const double base = tail_count * threshold;
    const double wanted_excess = (share * (rest + base) - base) / (1.0 - share);
    if (!(excess > 0.0) || !(wanted_excess >= 0.0)) {
      throw PopulationError(Kind::TargetUnreachable, "impute_wealth_tail: target_top_share not reachable");
    }
    const double scale = wanted_excess / excess;
    for (std::size_t rank = first_tail; rank < n; ++rank) {
      auto& w = out[order[rank]].net_wealth;
      w = threshold + (w - threshold) * scale;
    }
  }
  return out;
}

Cents initial_deposits(double net_wealth, double gross_income) {
  return to_cents(0.15 * std::max(net_wealth, 0.0) + 0.25 * std::max(gross_income, 0.0));
}

Population build_population(std::span<const MicroRecord> records, const PopulationConfig& cfg) {
  if (records.empty()) throw PopulationError(Kind::EmptyRecords, "build_population: no records");
  cfg.validate();
  for (const auto& r : records) {
    if (static_cast<int>(r.expenditure_shares.size()) != cfg.n_sectors) {
      throw PopulationError(Kind::ShareDimension, "record " + std::to_string(r.record_id) + " has " +
                                                      std::to_string(r.expenditure_shares.size()) +
                                                      " expenditure shares, expected " + std::to_string(cfg.n_sectors));
    }
  }

  std::vector<double> cumulative(records.size());
  double running = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    running += records[i].survey_weight;
    cumulative[i] = running;
  }

  Population pop;
  pop.households.resize(static_cast<std::size_t>(cfg.n_households));
  double income_sum = 0.0;
  for (int i = 0; i < cfg.n_households; ++i) {
    CounterRng rng(cfg.seed, Stream::Population, static_cast<std::uint64_t>(i));
    const double u = rng.uniform() * running;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto src = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), records.size() - 1);
    const MicroRecord& r = records[src];

    Household& h = pop.households[static_cast<std::size_t>(i)];
    h.id = i;
    h.gross_income = r.gross_income;
    h.deposits = initial_deposits(r.net_wealth, r.gross_income);
    h.illiquid_wealth = to_cents(r.net_wealth) - h.deposits;
    h.consumption_weights = r.expenditure_shares;
    h.region_code = r.region_code;
    h.household_size = r.household_size;
    h.propensity_to_consume = cfg.propensity_to_consume;
    income_sum += std::max(r.gross_income, 0.0);
  }
  const double mean_income = income_sum / cfg.n_households;
  for (auto& h : pop.households) {
    h.skill = mean_income > 0.0 ? std::max(std::max(h.gross_income, 0.0) / mean_income, 0.05) : 1.0;
  }

  pop.firms.resize(static_cast<std::size_t>(cfg.n_firms));
  const double sigma = cfg.firm_size.sigma;
  const double mu = std::log(cfg.firm_size.mean_employees) - 0.5 * sigma * sigma;
  for (int i = 0; i < cfg.n_firms; ++i) {
    Firm& f = pop.firms[static_cast<std::size_t>(i)];
    f.id = i;
    f.sector = i % cfg.n_sectors;
    CounterRng rng(cfg.seed, Stream::FirmSizes, static_cast<std::uint64_t>(i));
    f.size_weight = std::exp(mu + sigma * rng.normal());
  }
  return pop;
}

std::vector<MicroRecord> generate_sample(const SampleSpec& spec) {
  if (spec.rows < 1) throw PopulationError(Kind::InvalidConfig, "gen-sample: rows must be >= 1");
  if (spec.sectors < 1) throw PopulationError(Kind::InvalidConfig, "gen-sample: sectors must be >= 1");

  // Budget composition for the bundled ten-sector economy; flat otherwise.
  std::vector<double> base(static_cast<std::size_t>(spec.sectors), 1.0 / spec.sectors);
  if (spec.sectors == 10) base = {0.08, 0.05, 0.15, 0.04, 0.04, 0.04, 0.18, 0.34, 0.06, 0.02};
  constexpr double kConcentration = 60.0;

  std::vector<MicroRecord> records(static_cast<std::size_t>(spec.rows));
  std::vector<double> raw_weights(records.size());
  for (int i = 0; i < spec.rows; ++i) {
    CounterRng rng(spec.seed, Stream::SampleGenerator, static_cast<std::uint64_t>(i));
    MicroRecord& r = records[static_cast<std::size_t>(i)];
    r.record_id = i + 1;
    const double z_income = rng.normal();
    r.gross_income = std::round(std::exp(std::log(32000.0) + 0.55 * z_income) * 100.0) / 100.0;
    if (rng.uniform() < 0.06) {
      r.net_wealth = -std::round(std::exp(std::log(6000.0) + 0.8 * rng.normal()) * 100.0) / 100.0;
    } else {
      const double z_wealth = 0.6 * z_income + 0.8 * rng.normal();
      r.net_wealth = std::round(std::exp(std::log(90000.0) + 1.0 * z_wealth) * 100.0) / 100.0;
    }
    r.region_code = 1 + static_cast<int>(rng.below(12));
    r.household_size = 1 + static_cast<int>(rng.below(5));
    raw_weights[static_cast<std::size_t>(i)] = std::exp(0.3 * rng.normal());

    std::vector<double> g(base.size());
    double g_sum = 0.0;
    for (std::size_t s = 0; s < base.size(); ++s) {
      std::gamma_distribution<double> gamma(kConcentration * base[s], 1.0);
      g[s] = gamma(rng);
      g_sum += g[s];
    }
    r.expenditure_shares.resize(base.size());
    double share_sum = 0.0;
    for (std::size_t s = 0; s + 1 < base.size(); ++s) {
      r.expenditure_shares[s] = g[s] / g_sum;
      share_sum += r.expenditure_shares[s];
    }
    r.expenditure_shares.back() = std::max(0.0, 1.0 - share_sum);
  }

  const double raw_total = std::accumulate(raw_weights.begin(), raw_weights.end(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].survey_weight = std::round(raw_weights[i] / raw_total * spec.total_weight * 1e6) / 1e6;
  }
  return records;
}

std::string format_microdata(std::span<const MicroRecord> records) {
  std::string out = "record_id,survey_weight,gross_income,net_wealth,region_code,household_size";
  const std::size_t n_shares = records.empty() ? 0 : records.front().expenditure_shares.size();
  for (std::size_t s = 0; s < n_shares; ++s) out += ",share_" + std::to_string(s + 1);
  out += '\n';
  double total = 0.0;
  for (const auto& r : records) {
    out += std::to_string(r.record_id);
    out += ',' + format_fixed(r.survey_weight, 6);
    out += ',' + format_fixed(r.gross_income, 2);
    out += ',' + format_fixed(r.net_wealth, 2);
    out += ',' + std::to_string(r.region_code);
    out += ',' + std::to_string(r.household_size);
    for (double s : r.expenditure_shares) out += ',' + format_real(s);
    out += '\n';
    total += std::stod(format_fixed(r.survey_weight, 6));
  }
  out += "# total_weight=" + format_fixed(total, 6) + '\n';
  return out;
}

void write_microdata(const std::filesystem::path& path, std::span<const MicroRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << format_microdata(records);
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace decarb
