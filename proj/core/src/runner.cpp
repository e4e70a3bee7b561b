#include "decarb/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace decarb {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + ": '" + key + "' has the wrong type");
  }
}

template <typename T>
void maybe(const json& obj, const char* key, T& out, const std::string& where) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

fs::path existing(const fs::path& base, const std::string& rel, const std::string& where) {
  fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
  if (!fs::exists(p)) throw ParseError(where + ": file not found: " + p.string());
  return p;
}

TechConfig parse_tech(const json& node) {
  only_keys(node, {"name", "c0", "floor", "x0", "b", "calibrate", "adoption", "purchase_share"}, "technologies");
  TechConfig tc;
  const std::string where = "technologies." + get<std::string>(node, "name", "technologies");
  tc.curve.name = get<std::string>(node, "name", where);
  tc.curve.c0 = get<double>(node, "c0", where);
  tc.curve.floor = get<double>(node, "floor", where);
  maybe(node, "x0", tc.curve.x0, where);
  maybe(node, "purchase_share", tc.purchase_share, where);
  if (tc.purchase_share < 0.0) throw ParseError(where + ": purchase_share must be >= 0");
  if (node.contains("adoption")) {
    const auto& a = node["adoption"];
    only_keys(a, {"k", "r", "t0_quarter"}, where + ".adoption");
    AdoptionCurve curve;
    curve.saturation = get<double>(a, "k", where + ".adoption");
    curve.rate = get<double>(a, "r", where + ".adoption");
    curve.midpoint = get<double>(a, "t0_quarter", where + ".adoption");
    curve.validate();
    tc.adoption = curve;
  }
  if (node.contains("b") == node.contains("calibrate")) throw ParseError(where + ": give exactly one of 'b' or 'calibrate'");
  if (node.contains("b")) {
    tc.curve.learning_exponent = get<double>(node, "b", where);
  } else {
    const auto& c = node["calibrate"];
    only_keys(c, {"x_target", "cost_target", "target_quarter"}, where + ".calibrate");
    const double cost = get<double>(c, "cost_target", where + ".calibrate");
    double x_target = 0.0;
    if (c.contains("x_target") == c.contains("target_quarter")) {
      throw ParseError(where + ".calibrate: give exactly one of 'x_target' or 'target_quarter'");
    }
    if (c.contains("x_target")) {
      x_target = get<double>(c, "x_target", where + ".calibrate");
    } else {
      if (!tc.adoption) throw ParseError(where + ".calibrate: 'target_quarter' needs an adoption curve");
      const int q = get<int>(c, "target_quarter", where + ".calibrate");
      x_target = tc.curve.x0 + logistic_level(*tc.adoption, q) - logistic_level(*tc.adoption, 0);
    }
    tc.curve.learning_exponent = calibrate_exponent(tc.curve, x_target, cost);
  }
  tc.curve.validate();
  return tc;
}

DurableKind parse_durable(const json& node, const std::vector<TechConfig>& techs, int sectors) {
  only_keys(node, {"name", "price", "subsidy", "degree_k", "rewire_p", "params", "weight_shift", "tech_ref"}, "durables");
  DurableKind d;
  d.name = get<std::string>(node, "name", "durables");
  const std::string where = "durables." + d.name;
  d.price = to_cents(get<double>(node, "price", where));
  if (d.price <= 0) throw ParseError(where + ": price must be > 0");
  if (node.contains("subsidy")) d.subsidy = to_cents(get<double>(node, "subsidy", where));
  if (d.subsidy < 0) throw ParseError(where + ": subsidy must be >= 0");
  maybe(node, "degree_k", d.degree_k, where);
  maybe(node, "rewire_p", d.rewire_p, where);
  if (node.contains("params")) {
    const auto& p = node["params"];
    only_keys(p, {"base", "price_coeff", "income_coeff", "peer_coeff", "subsidy_coeff"}, where + ".params");
    maybe(p, "base", d.params.base_utility, where);
    maybe(p, "price_coeff", d.params.price_coeff, where);
    maybe(p, "income_coeff", d.params.income_coeff, where);
    maybe(p, "peer_coeff", d.params.peer_coeff, where);
    maybe(p, "subsidy_coeff", d.params.subsidy_coeff, where);
  }
  d.params.validate();
  if (node.contains("weight_shift")) {
    const auto& w = node["weight_shift"];
    only_keys(w, {"from", "to", "fraction"}, where + ".weight_shift");
    ShiftRule rule{get<int>(w, "from", where), get<int>(w, "to", where), get<double>(w, "fraction", where)};
    if (!(rule.fraction >= 0.0 && rule.fraction <= 1.0)) throw ParseError(where + ": weight_shift fraction must lie in [0,1]");
    if (rule.from < 0 || rule.from >= sectors || rule.to < 0 || rule.to >= sectors) {
      throw ParseError(where + ": weight_shift category out of range");
    }
    d.weight_shift = rule;
  }
  if (node.contains("tech_ref")) {
    const auto ref = get<std::string>(node, "tech_ref", where);
    const auto it = std::find_if(techs.begin(), techs.end(), [&](const TechConfig& t) { return t.curve.name == ref; });
    if (it == techs.end()) throw ParseError(where + ": unknown tech_ref '" + ref + "'");
    d.tech_ref = static_cast<int>(it - techs.begin());
  }
  return d;
}

void parse_behavior(const json& node, BehaviorParams& b) {
  const std::string where = "behavior";
  only_keys(node, {"initial_markup", "markup_drift", "inventory_target", "inventory_band", "amortization_rate", "payout_ratio",
                   "employment_target", "green_sector", "max_search", "usd_to_cents", "markup_min", "markup_max",
                   "wage_indexation", "wage_phillips", "rate_sensitivity", "deposit_passthrough"},
            where);
  maybe(node, "initial_markup", b.initial_markup, where);
  maybe(node, "markup_drift", b.markup_drift, where);
  maybe(node, "inventory_target", b.inventory_target, where);
  maybe(node, "inventory_band", b.inventory_band, where);
  maybe(node, "amortization_rate", b.amortization_rate, where);
  maybe(node, "payout_ratio", b.payout_ratio, where);
  maybe(node, "employment_target", b.employment_target, where);
  maybe(node, "green_sector", b.green_sector, where);
  maybe(node, "max_search", b.max_search, where);
  maybe(node, "usd_to_cents", b.usd_to_cents, where);
  maybe(node, "markup_min", b.markup_min, where);
  maybe(node, "markup_max", b.markup_max, where);
  maybe(node, "wage_indexation", b.wage_indexation, where);
  maybe(node, "wage_phillips", b.wage_phillips, where);
  maybe(node, "rate_sensitivity", b.rate_sensitivity, where);
  maybe(node, "deposit_passthrough", b.deposit_passthrough, where);
}

void parse_policy(const json& node, PolicySettings& p) {
  const std::string where = "policy";
  only_keys(node, {"tax_rate_income", "transfer_per_household", "purchases_per_household", "debt_ceiling_ratio", "spread_slope",
                   "spread_cap", "initial_debt_ratio", "central_bank"},
            where);
  auto& g = p.government;
  maybe(node, "tax_rate_income", g.tax_rate_income, where);
  if (node.contains("transfer_per_household")) g.transfer_per_household = to_cents(get<double>(node, "transfer_per_household", where));
  if (node.contains("purchases_per_household")) g.purchases_per_household = to_cents(get<double>(node, "purchases_per_household", where));
  maybe(node, "debt_ceiling_ratio", g.debt_ceiling_ratio, where);
  maybe(node, "spread_slope", g.spread_slope, where);
  maybe(node, "spread_cap", g.spread_cap, where);
  if (!(g.spread_cap >= 0.0)) throw ParseError("policy: spread_cap must be >= 0");
  maybe(node, "initial_debt_ratio", p.initial_debt_ratio, where);
  if (g.spread_slope < 0.0) throw ParseError("policy: spread_slope must be >= 0");
  if (node.contains("central_bank")) {
    const auto& cb = node["central_bank"];
    only_keys(cb, {"neutral_rate", "inflation_target", "taylor_pi", "taylor_gap"}, "policy.central_bank");
    maybe(cb, "neutral_rate", p.central_bank.neutral_rate, where);
    maybe(cb, "inflation_target", p.central_bank.inflation_target, where);
    maybe(cb, "taylor_pi", p.central_bank.taylor_pi, where);
    maybe(cb, "taylor_gap", p.central_bank.taylor_gap, where);
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const fs::path& base_dir, std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, json_text.size());
    const int line = 1 + static_cast<int>(std::count(json_text.begin(), json_text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ParseError("config: malformed JSON", line);
  }
  only_keys(doc, {"population", "io_table", "policy", "behavior", "technologies", "durables", "horizon_quarters", "seed",
                  "output_dir", "sweep"},
            "config");
  if (seed_override) doc["seed"] = *seed_override;

  RunConfig cfg;
  cfg.document = doc.dump();
  if (!doc.contains("seed")) throw ParseError("config: 'seed' is required");
  cfg.seed = get<std::uint64_t>(doc, "seed", "config");
  cfg.horizon_quarters = get<int>(doc, "horizon_quarters", "config");
  if (cfg.horizon_quarters < 1) throw ParseError("config: horizon_quarters must be >= 1");
  cfg.io_table = existing(base_dir, get<std::string>(doc, "io_table", "config"), "config.io_table");
  cfg.output_dir = doc.contains("output_dir") ? base_dir / get<std::string>(doc, "output_dir", "config") : base_dir / "out";

  const IOTable io = load_io_table(cfg.io_table);

  const auto& pop = doc.contains("population") ? doc["population"] : throw ParseError("config: 'population' is required");
  only_keys(pop, {"microdata", "n_households", "n_firms", "propensity_to_consume", "firm_size", "tail"}, "population");
  cfg.microdata = existing(base_dir, get<std::string>(pop, "microdata", "population"), "population.microdata");
  cfg.population.n_households = get<int>(pop, "n_households", "population");
  cfg.population.n_firms = get<int>(pop, "n_firms", "population");
  cfg.population.n_sectors = io.sectors;
  cfg.population.seed = cfg.seed;
  maybe(pop, "propensity_to_consume", cfg.population.propensity_to_consume, "population");
  if (pop.contains("firm_size")) {
    const auto& fsz = pop["firm_size"];
    only_keys(fsz, {"mean_employees", "sigma"}, "population.firm_size");
    maybe(fsz, "mean_employees", cfg.population.firm_size.mean_employees, "population.firm_size");
    maybe(fsz, "sigma", cfg.population.firm_size.sigma, "population.firm_size");
  }
  if (pop.contains("tail")) {
    const auto& t = pop["tail"];
    only_keys(t, {"tail_quantile", "pareto_alpha", "target_top_share"}, "population.tail");
    maybe(t, "tail_quantile", cfg.tail.tail_quantile, "population.tail");
    maybe(t, "pareto_alpha", cfg.tail.pareto_alpha, "population.tail");
    if (t.contains("target_top_share") && !t["target_top_share"].is_null()) {
      cfg.tail.target_top_share = get<double>(t, "target_top_share", "population.tail");
    }
    cfg.tail.validate();
    cfg.impute_tail = true;
  }
  cfg.population.validate();

  if (doc.contains("policy")) parse_policy(doc["policy"], cfg.policy);
  if (doc.contains("behavior")) parse_behavior(doc["behavior"], cfg.behavior);
  cfg.behavior.validate(io.sectors);

  if (doc.contains("technologies")) {
    if (!doc["technologies"].is_array()) throw ParseError("config: 'technologies' must be an array");
    for (const auto& t : doc["technologies"]) cfg.technologies.push_back(parse_tech(t));
  }
  if (doc.contains("durables")) {
    if (!doc["durables"].is_array()) throw ParseError("config: 'durables' must be an array");
    for (const auto& d : doc["durables"]) cfg.durables.push_back(parse_durable(d, cfg.technologies, io.sectors));
    if (cfg.durables.size() > 32) throw ParseError("config: at most 32 durable kinds");
  }
  return cfg;
}

RunConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
  const auto base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return parse_config(read_file(path), base, seed_override);
}

std::string hash_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& config) {
  return hash_hex(config.document + '\0' + read_file(config.microdata) + '\0' + read_file(config.io_table));
}

EconomyState build_economy(const RunConfig& config, int threads) {
  auto records = parse_microdata(config.microdata);
  if (config.impute_tail) records = impute_wealth_tail(records, config.tail, config.seed);
  auto population = build_population(records, config.population);
  auto io = load_io_table(config.io_table);
  auto state = init_state(std::move(population), std::move(io), config.policy, config.behavior, config.seed);
  state.threads = std::max(1, threads);

  for (const auto& tc : config.technologies) {
    Technology tech;
    tech.state = TechState(tc.curve, tc.curve.x0);
    tech.adoption = tc.adoption;
    tech.purchase_share = tc.purchase_share;
    tech.initial_cost = tech.state.current_cost();
    state.tech.push_back(std::move(tech));
  }

  state.durables = config.durables;
  std::map<std::pair<int, double>, int> built;
  for (const auto& d : state.durables) {
    const auto key = std::make_pair(d.degree_k, d.rewire_p);
    auto it = built.find(key);
    if (it == built.end()) {
      state.networks.push_back(build_network(state.households, d.degree_k, d.rewire_p, config.seed));
      it = built.emplace(key, static_cast<int>(state.networks.size()) - 1).first;
    }
    state.durable_network.push_back(it->second);
  }
  return state;
}

RunResult run_simulation(const RunConfig& config, const ScenarioSpec* scenario, const RunOptions& options) {
  RunResult result{{}, build_economy(config, options.threads)};
  auto& state = result.final_state;
  state.inject_fault_quarter = options.inject_fault_quarter;
  const int horizon = options.horizon.value_or(config.horizon_quarters);
  result.frames.reserve(static_cast<std::size_t>(horizon));
  for (int q = 0; q < horizon; ++q) {
    step(state, scenario);
    result.frames.push_back(*state.last_frame);
    if (options.on_quarter) options.on_quarter(state);
  }
  return result;
}

std::string balance_sheet_json(const EconomyState& state) {
  Cents hh_deposits = 0;
  double hh_illiquid = 0.0;
  std::int64_t adopters = 0;
  for (const auto& h : state.households) {
    hh_deposits += h.deposits;
    hh_illiquid += h.illiquid_wealth;
    adopters += h.durables != 0 ? 1 : 0;
  }
  Cents firm_deposits = 0;
  double inventory_value = 0.0;
  Cents green_capital = 0;
  for (const auto& f : state.firms) {
    firm_deposits += f.deposits;
    inventory_value += f.inventory * f.price;
    green_capital += f.green_capital;
  }
  json doc = {
      {"t", state.t},
      {"households", {{"count", state.households.size()}, {"deposits_cents", hh_deposits}, {"illiquid_wealth", hh_illiquid},
                      {"durable_adopters", adopters}}},
      {"firms", {{"count", state.firms.size()}, {"deposits_cents", firm_deposits}, {"inventory_value_cents", inventory_value},
                 {"green_capital_cents", green_capital}}},
      {"government", {{"deposits_cents", state.government.deposits}, {"debt_cents", std::max<Cents>(0, -state.government.deposits)},
                      {"spread", state.government.spread}}},
      {"central_bank", {{"policy_rate", state.central_bank.policy_rate}}},
      {"money_stock_cents", money_stock(state)},
  };
  json tech = json::array();
  for (const auto& t : state.tech) {
    tech.push_back({{"name", t.state.curve().name}, {"cumulative", t.state.cumulative()}, {"cost", t.state.current_cost()}});
  }
  doc["technologies"] = std::move(tech);
  return doc.dump(2) + "\n";
}

}  // namespace decarb
