#include "decarb/scenario.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "decarb/economy.hpp"
#include "internal.hpp"

namespace decarb {

using json = nlohmann::json;
using Kind = ScenarioError::Kind;

double Pathway::at(int quarter) const {
  auto it = values.find(quarter);
  return it == values.end() ? 0.0 : it->second;
}

bool Pathway::empty() const {
  return std::all_of(values.begin(), values.end(), [](const auto& kv) { return kv.second == 0.0; });
}

double LeverA::share_for(int sector, int quarter) const {
  auto it = sector_share.find(sector);
  return it != sector_share.end() ? it->second.at(quarter) : share.at(quarter);
}

std::optional<double> CoefficientEdit::value_at(int t) const {
  if (t < start_quarter) return std::nullopt;
  if (t >= end_quarter || end_quarter == start_quarter) return end_value;
  const double frac = static_cast<double>(t - start_quarter) / static_cast<double>(end_quarter - start_quarter);
  return start_value + (end_value - start_value) * frac;
}

namespace {

constexpr int kUnbounded = INT_MAX;

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ScenarioError(Kind::Parse, where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw ScenarioError(Kind::Parse, where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ScenarioError(Kind::Parse, where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ScenarioError(Kind::Parse, where + ": '" + key + "' has the wrong type");
  }
}

void check_quarter(int q, int horizon, const std::string& where) {
  if (q < 0 || q >= horizon) {
    throw ScenarioError(Kind::Invalid, where + ": quarter " + std::to_string(q) + " outside the horizon");
  }
}

Pathway parse_pathway(const json& node, int horizon, const std::string& where) {
  if (!node.is_array()) throw ScenarioError(Kind::Parse, where + ": pathway must be an array of segments");
  Pathway p;
  for (const auto& seg : node) {
    only_keys(seg, {"from", "to", "value"}, where);
    const int from = require<int>(seg, "from", where);
    const int to = seg.contains("to") ? require<int>(seg, "to", where) : from;
    const double value = require<double>(seg, "value", where);
    if (value < 0.0) throw ScenarioError(Kind::NegativePathway, where + ": negative pathway value");
    if (to < from) throw ScenarioError(Kind::Invalid, where + ": segment ends before it starts");
    check_quarter(from, horizon, where);
    check_quarter(to, horizon, where);
    for (int q = from; q <= to; ++q) p.values[q] = value;
  }
  return p;
}

template <typename Enum>
Enum parse_enum(const json& obj, const char* key, std::initializer_list<std::pair<const char*, Enum>> options,
                Enum fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto text = require<std::string>(obj, key, where);
  for (const auto& [name, value] : options) {
    if (text == name) return value;
  }
  throw ScenarioError(Kind::Parse, where + ": invalid value '" + text + "' for '" + key + "'");
}

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& json_text) {
  json doc = json::object();  // an empty file is the null scenario
  try {
    if (json_text.find_first_not_of(" \t\r\n") != std::string::npos) doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const int line = line_of(json_text, e.byte == 0 ? 0 : e.byte - 1);
    throw ScenarioError(Kind::Parse, "scenario: malformed JSON at line " + std::to_string(line), line);
  }
  if (!doc.is_object()) throw ScenarioError(Kind::Parse, "scenario: top level must be an object");

  static const std::set<std::string> known = {"name",    "horizon_quarters", "green_sector", "lever_a",
                                              "lever_b", "lever_c",          "lever_d",      "lever_e"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ScenarioError(Kind::UnknownLever, "scenario: unknown key '" + key + "'");
  }

  ScenarioSpec spec;
  if (doc.contains("name")) spec.name = require<std::string>(doc, "name", "scenario");
  spec.horizon_quarters = doc.contains("horizon_quarters") ? require<int>(doc, "horizon_quarters", "scenario") : kUnbounded;
  if (spec.horizon_quarters < 1) throw ScenarioError(Kind::Invalid, "scenario: horizon_quarters must be >= 1");
  const int horizon = spec.horizon_quarters;
  if (doc.contains("green_sector")) {
    spec.green_sector = require<int>(doc, "green_sector", "scenario");
    if (*spec.green_sector < 0) throw ScenarioError(Kind::Invalid, "scenario: green_sector must be >= 0");
  }

  if (doc.contains("lever_a")) {
    const auto& node = doc["lever_a"];
    only_keys(node, {"share", "sector_share"}, "lever_a");
    LeverA lever;
    if (node.contains("share")) lever.share = parse_pathway(node["share"], horizon, "lever_a.share");
    if (node.contains("sector_share") && !node["sector_share"].is_object()) {
      throw ScenarioError(Kind::Parse, "lever_a.sector_share: expected an object keyed by sector index");
    }
    spec.lever_a = lever;
  }
  if (doc.contains("lever_a") && doc["lever_a"].contains("sector_share")) {
    for (const auto& [key, value] : doc["lever_a"]["sector_share"].items()) {
      int sector = -1;
      try {
        sector = std::stoi(key);
      } catch (const std::exception&) {
        throw ScenarioError(Kind::Parse, "lever_a.sector_share: key '" + key + "' is not a sector index");
      }
      if (sector < 0) throw ScenarioError(Kind::Invalid, "lever_a.sector_share: negative sector index");
      spec.lever_a->sector_share[sector] = parse_pathway(value, horizon, "lever_a.sector_share." + key);
    }
  }

  if (doc.contains("lever_b")) {
    const auto& node = doc["lever_b"];
    only_keys(node, {"amount", "targeting", "durable"}, "lever_b");
    LeverB lever;
    if (node.contains("amount")) lever.amount = parse_pathway(node["amount"], horizon, "lever_b.amount");
    lever.targeting = parse_enum<Targeting>(node, "targeting",
                                            {{"all", Targeting::All}, {"non_adopters", Targeting::NonAdopters}},
                                            Targeting::All, "lever_b");
    if (node.contains("durable")) lever.durable = require<std::string>(node, "durable", "lever_b");
    spec.lever_b = lever;
  }

  if (doc.contains("lever_c")) {
    const auto& node = doc["lever_c"];
    only_keys(node, {"total", "target", "allocation", "financing"}, "lever_c");
    LeverC lever;
    if (node.contains("total")) lever.total = parse_pathway(node["total"], horizon, "lever_c.total");
    lever.target = parse_enum<SubsidyTarget>(
        node, "target", {{"firms", SubsidyTarget::Firms}, {"households", SubsidyTarget::Households}},
        SubsidyTarget::Households, "lever_c");
    lever.allocation = parse_enum<Allocation>(
        node, "allocation",
        {{"uniform", Allocation::Uniform}, {"proportional_to_green_spend", Allocation::ProportionalToGreenSpend}},
        Allocation::Uniform, "lever_c");
    lever.financing = parse_enum<Financing>(
        node, "financing", {{"expansion", Financing::Expansion}, {"reduced_spending", Financing::ReducedSpending}},
        Financing::Expansion, "lever_c");
    spec.lever_c = lever;
  }

  if (doc.contains("lever_d")) {
    const auto& node = doc["lever_d"];
    if (!node.is_array()) throw ScenarioError(Kind::Parse, "lever_d: expected an array of coefficient edits");
    for (const auto& e : node) {
      only_keys(e, {"sector_from", "sector_to", "start_quarter", "end_quarter", "start_value", "end_value", "interpolation"},
                "lever_d");
      CoefficientEdit edit;
      edit.sector_from = require<int>(e, "sector_from", "lever_d");
      edit.sector_to = require<int>(e, "sector_to", "lever_d");
      edit.start_quarter = require<int>(e, "start_quarter", "lever_d");
      edit.end_quarter = require<int>(e, "end_quarter", "lever_d");
      edit.start_value = require<double>(e, "start_value", "lever_d");
      edit.end_value = require<double>(e, "end_value", "lever_d");
      if (e.contains("interpolation") && require<std::string>(e, "interpolation", "lever_d") != "linear") {
        throw ScenarioError(Kind::Parse, "lever_d: only linear interpolation is supported");
      }
      if (edit.start_value < 0.0 || edit.end_value < 0.0) {
        throw ScenarioError(Kind::NegativePathway, "lever_d: coefficient values must be >= 0");
      }
      if (edit.sector_from < 0 || edit.sector_to < 0) throw ScenarioError(Kind::Invalid, "lever_d: negative sector index");
      if (edit.end_quarter < edit.start_quarter) throw ScenarioError(Kind::Invalid, "lever_d: end_quarter < start_quarter");
      check_quarter(edit.start_quarter, horizon, "lever_d");
      check_quarter(edit.end_quarter, horizon, "lever_d");
      spec.lever_d.push_back(edit);
    }
  }

  if (doc.contains("lever_e")) {
    const auto& node = doc["lever_e"];
    if (!node.is_array()) throw ScenarioError(Kind::Parse, "lever_e: expected an array of weight shifts");
    for (const auto& e : node) {
      only_keys(e, {"category_from", "category_to", "fraction", "trigger"}, "lever_e");
      WeightShift shift;
      shift.category_from = require<int>(e, "category_from", "lever_e");
      shift.category_to = require<int>(e, "category_to", "lever_e");
      shift.fraction = require<double>(e, "fraction", "lever_e");
      if (shift.fraction < 0.0) throw ScenarioError(Kind::NegativePathway, "lever_e: negative fraction");
      if (shift.fraction > 1.0) throw ScenarioError(Kind::Invalid, "lever_e: fraction must be <= 1");
      if (shift.category_from < 0 || shift.category_to < 0) throw ScenarioError(Kind::Invalid, "lever_e: negative category");
      if (!e.contains("trigger")) throw ScenarioError(Kind::Parse, "lever_e: missing 'trigger'");
      const auto& trig = e["trigger"];
      only_keys(trig, {"quarter", "adoption"}, "lever_e.trigger");
      if (trig.contains("quarter") == trig.contains("adoption")) {
        throw ScenarioError(Kind::Parse, "lever_e.trigger: give exactly one of 'quarter' or 'adoption'");
      }
      if (trig.contains("quarter")) {
        shift.quarter = require<int>(trig, "quarter", "lever_e.trigger");
        check_quarter(*shift.quarter, horizon, "lever_e.trigger");
      } else {
        shift.adoption = require<std::string>(trig, "adoption", "lever_e.trigger");
      }
      spec.lever_e.push_back(shift);
    }
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(Kind::Parse, "cannot open scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

SubsidyOrder subsidy_order(const ScenarioSpec& spec, int t) {
  SubsidyOrder order;
  if (!spec.lever_c) return order;
  order.total = to_cents(spec.lever_c->total.at(t));
  order.target = spec.lever_c->target;
  order.allocation = spec.lever_c->allocation;
  order.financing = spec.lever_c->financing;
  return order;
}

void shift_weight(std::vector<double>& weights, int from, int to, double fraction) {
  const auto n = static_cast<int>(weights.size());
  if (from < 0 || from >= n || to < 0 || to >= n) throw ScenarioError(Kind::Invalid, "weight shift: category out of range");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ScenarioError(Kind::Invalid, "weight shift: fraction must lie in [0,1]");
  if (fraction == 0.0 || from == to) return;
  const double moved = fraction * weights[static_cast<std::size_t>(from)];
  weights[static_cast<std::size_t>(from)] -= moved;
  weights[static_cast<std::size_t>(to)] += moved;
  double sum = 0.0;
  for (auto& w : weights) {
    w = std::max(w, 0.0);
    sum += w;
  }
  for (auto& w : weights) w /= sum;
}

void apply_lever_a(EconomyState& state, std::span<const double> share_by_sector) {
  Cents total = 0;
  for (auto& f : state.firms) {
    const double share = share_by_sector[static_cast<std::size_t>(f.sector)];
    if (share < 0.0) throw ScenarioError(Kind::NegativePathway, "lever_a: negative share");
    if (share == 0.0 || f.revenue_last <= 0) continue;
    const Cents spend = round_cents(share * static_cast<double>(f.revenue_last));
    f.deposits -= spend;
    f.green_capital += spend;
    f.green_spend += spend;
    if (f.deposits < 0) f.overdraft = true;
    total += spend;
  }
  if (total == 0) return;
  state.ledger.debit(Flow::LeverA, total);
  detail::sector_purchase(state, state.green_sector, total, Flow::LeverA, detail::Delivery::Backorder);
  state.quarter.green_purchases += total;
}

void apply_lever_b(EconomyState& state, Cents amount, Targeting targeting, int durable) {
  if (amount < 0) throw ScenarioError(Kind::NegativePathway, "lever_b: negative amount");
  if (amount == 0) return;
  Cents total = 0;
  for (auto& h : state.households) {
    if (targeting == Targeting::NonAdopters) {
      const bool adopted = durable < 0 ? h.durables != 0 : h.adopted(durable);
      if (adopted) continue;
    }
    h.deposits -= amount;
    h.green_spend += amount;
    if (h.deposits < 0) h.lever_b_overdraft = true;
    total += amount;
  }
  if (total == 0) return;
  state.ledger.debit(Flow::LeverB, total);
  detail::sector_purchase(state, state.green_sector, total, Flow::LeverB, detail::Delivery::Backorder);
  state.quarter.green_purchases += total;
}

Cents apply_lever_c(EconomyState& state, const SubsidyOrder& order, Cents transfer_pool) {
  if (order.total < 0) throw ScenarioError(Kind::NegativePathway, "lever_c: negative subsidy total");
  if (order.total == 0) return 0;
  const bool to_households = order.target == SubsidyTarget::Households;
  const std::size_t n = to_households ? state.households.size() : state.firms.size();
  std::vector<std::int64_t> weights(n, 0);
  if (order.allocation == Allocation::ProportionalToGreenSpend) {
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = std::max<Cents>(0, to_households ? state.households[i].green_spend : state.firms[i].green_spend);
    }
  }
  const auto shares = allocate_cents(order.total, weights);
  Cents paid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (shares[i] == 0) continue;
    if (to_households) {
      state.households[i].deposits += shares[i];
      state.households[i].income += shares[i];
    } else {
      state.firms[i].deposits += shares[i];
    }
    paid += shares[i];
  }
  state.government.deposits -= paid;
  state.ledger.debit(Flow::Subsidies, paid);
  state.ledger.credit(Flow::Subsidies, paid);
  return order.financing == Financing::ReducedSpending ? std::min(order.total, std::max<Cents>(transfer_pool, 0)) : 0;
}

void apply_lever_d(IOTable& io, std::span<const CoefficientEdit> edits, int t) {
  IOTable next = io;
  std::set<int> touched;
  for (const auto& e : edits) {
    const auto value = e.value_at(t);
    if (!value) continue;
    if (e.sector_from >= io.sectors || e.sector_to >= io.sectors) {
      throw ScenarioError(Kind::Invalid, "lever_d: sector index out of range");
    }
    if (*value < 0.0) throw ScenarioError(Kind::NegativePathway, "lever_d: interpolated coefficient is negative");
    next.a(e.sector_from, e.sector_to) = *value;
    touched.insert(e.sector_to);
  }
  for (int j : touched) {
    const double sum = next.column_sum(j);
    if (!(sum < 1.0)) throw InfeasibleIO(j, sum);
  }
  io = std::move(next);
}

void apply_lever_d(EconomyState& state, std::span<const CoefficientEdit> edits, int t) {
  apply_lever_d(state.io, edits, t);
}

void apply_lever_e(EconomyState& state, std::span<const WeightShift> shifts, int t) {
  for (const auto& s : shifts) {
    if (!s.quarter || *s.quarter != t) continue;
    for (auto& h : state.households) shift_weight(h.consumption_weights, s.category_from, s.category_to, s.fraction);
  }
}

}  // namespace decarb
