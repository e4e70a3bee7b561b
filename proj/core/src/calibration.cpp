#include "decarb/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace decarb {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Kind = CalibrationError::Kind;

namespace {

const char* moment_name(Moment m) {
  switch (m) {
    case Moment::MeanInflation: return "mean_inflation";
    case Moment::MeanUnemployment: return "mean_unemployment";
    case Moment::MeanGdpGrowth: return "mean_gdp_growth";
  }
  return "unknown";
}

Moment parse_moment(const std::string& s) {
  for (auto m : {Moment::MeanInflation, Moment::MeanUnemployment, Moment::MeanGdpGrowth}) {
    if (s == moment_name(m)) return m;
  }
  throw CalibrationError(Kind::InvalidSpec, "sweep: unknown moment '" + s + "'");
}

std::string resolve_alias(const std::string& name) {
  if (name == "markup_drift") return "behavior.markup_drift";
  if (name == "propensity_to_consume") return "population.propensity_to_consume";
  if (name == "taylor_pi") return "policy.central_bank.taylor_pi";
  return name;
}

void set_path(json& doc, const std::string& dotted, double value) {
  json* node = &doc;
  std::stringstream ss(resolve_alias(dotted));
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw CalibrationError(Kind::UnknownParameter, "sweep: empty parameter name");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw CalibrationError(Kind::UnknownParameter, "sweep: cannot address '" + dotted + "'");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw CalibrationError(Kind::UnknownParameter, "sweep: cannot address '" + dotted + "'");
  (*node)[parts.back()] = value;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void SweepSpec::validate() const {
  for (const auto& p : parameters) {
    if (p.points < 2) throw CalibrationError(Kind::InvalidSpec, "sweep: parameter '" + p.name + "' needs >= 2 grid points");
    if (!(p.upper >= p.lower)) throw CalibrationError(Kind::InvalidSpec, "sweep: parameter '" + p.name + "' has upper < lower");
  }
  for (const auto& t : targets) {
    if (!(t.weight >= 0.0)) throw CalibrationError(Kind::InvalidSpec, "sweep: target weights must be >= 0");
  }
  if (burn_in < 0 || horizon <= burn_in) throw CalibrationError(Kind::InvalidSpec, "sweep: horizon must exceed burn_in");
}

double Moments::get(Moment m) const {
  switch (m) {
    case Moment::MeanInflation: return mean_inflation;
    case Moment::MeanUnemployment: return mean_unemployment;
    case Moment::MeanGdpGrowth: return mean_gdp_growth;
  }
  return 0.0;
}

SweepSpec parse_sweep(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("sweep: malformed JSON: ") + e.what());
  }
  try {
    SweepSpec spec;
    for (const auto& p : doc.value("parameters", json::array())) {
      spec.parameters.push_back({p.at("name").get<std::string>(), p.at("lower").get<double>(), p.at("upper").get<double>(),
                                 p.at("points").get<int>()});
    }
    for (const auto& t : doc.value("targets", json::array())) {
      spec.targets.push_back({parse_moment(t.at("moment").get<std::string>()), t.at("target").get<double>(), t.value("weight", 1.0)});
    }
    spec.burn_in = doc.value("burn_in", 0);
    spec.horizon = doc.at("horizon").get<int>();
    spec.seed = doc.at("seed").get<std::uint64_t>();
    spec.budget = doc.value("budget", std::size_t{1000});
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("sweep: ") + e.what());
  }
}

SweepSpec load_sweep(const fs::path& path) { return parse_sweep(read_text(path)); }

std::vector<std::vector<double>> sweep_grid(const SweepSpec& spec) {
  std::vector<std::vector<double>> grid = {{}};
  for (const auto& p : spec.parameters) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : grid) {
      for (int k = 0; k < p.points; ++k) {
        auto row = prefix;
        row.push_back(p.lower + (p.upper - p.lower) * k / (p.points - 1));
        next.push_back(std::move(row));
      }
    }
    grid = std::move(next);
  }
  return grid;
}

Moments compute_moments(std::span<const IndicatorFrame> frames, int burn_in) {
  Moments m;
  std::size_t n = 0;
  std::size_t growth_n = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].t < burn_in) continue;
    m.mean_inflation += frames[i].inflation;
    m.mean_unemployment += frames[i].unemployment;
    ++n;
    if (i > 0 && frames[i].gdp > 0 && frames[i - 1].gdp > 0) {
      m.mean_gdp_growth += std::log(static_cast<double>(frames[i].gdp) / static_cast<double>(frames[i - 1].gdp));
      ++growth_n;
    }
  }
  if (n > 0) {
    m.mean_inflation /= static_cast<double>(n);
    m.mean_unemployment /= static_cast<double>(n);
  }
  if (growth_n > 0) m.mean_gdp_growth /= static_cast<double>(growth_n);
  return m;
}

double calibration_loss(const Moments& moments, std::span<const CalibrationTarget> targets) {
  double loss = 0.0;
  for (const auto& t : targets) {
    const double d = moments.get(t.moment) - t.target;
    loss += t.weight * d * d;
  }
  return loss;
}

void rank_results(std::vector<SweepResult>& results) {
  std::sort(results.begin(), results.end(), [](const SweepResult& a, const SweepResult& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    return a.grid_index < b.grid_index;
  });
}

std::vector<SweepResult> sweep(const SweepSpec& spec, const std::string& base_config_json, const fs::path& base_dir,
                               const std::optional<fs::path>& cache_root, int workers) {
  spec.validate();
  std::size_t size = 1;
  for (const auto& p : spec.parameters) size *= static_cast<std::size_t>(p.points);
  if (size > spec.budget) {
    throw CalibrationError(Kind::BudgetExceeded, "sweep: grid of " + std::to_string(size) + " points exceeds the budget of " +
                                                     std::to_string(spec.budget));
  }
  const auto grid = sweep_grid(spec);

  json base;
  try {
    base = json::parse(base_config_json);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("sweep: base config is malformed: ") + e.what());
  }
  base.erase("sweep");
  base["seed"] = spec.seed;
  base["horizon_quarters"] = spec.horizon;

  std::vector<SweepResult> results(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  const auto n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (std::int64_t gi = 0; gi < n; ++gi) {
    const auto g = static_cast<std::size_t>(gi);
    auto& r = results[g];
    r.grid_index = g;
    r.values = grid[g];
    std::string label = "grid point " + std::to_string(g);
    try {
      json doc = base;
      for (std::size_t k = 0; k < spec.parameters.size(); ++k) set_path(doc, spec.parameters[k].name, grid[g][k]);
      RunConfig config;
      try {
        config = parse_config(doc.dump(), base_dir);
      } catch (const ParseError& e) {
        throw CalibrationError(Kind::UnknownParameter, label + ": " + e.what());
      }
      r.config_hash = config_hash(config);
      const auto cache_file = cache_root ? std::optional<fs::path>(*cache_root / r.config_hash / (std::to_string(spec.seed) + ".json"))
                                         : std::nullopt;
      if (cache_file && fs::exists(*cache_file)) {
        const auto cached = json::parse(read_text(*cache_file));
        r.moments.mean_inflation = cached.at("moments").at("mean_inflation").get<double>();
        r.moments.mean_unemployment = cached.at("moments").at("mean_unemployment").get<double>();
        r.moments.mean_gdp_growth = cached.at("moments").at("mean_gdp_growth").get<double>();
        r.cached = true;
      } else {
        try {
          const auto run = run_simulation(config, nullptr);
          r.moments = compute_moments(run.frames, spec.burn_in);
        } catch (const AuditFailure& e) {
          throw AuditFailure(e.residual_cents(), label + ": " + e.subsystem(), e.quarter());
        }
        if (cache_file) {
          fs::create_directories(cache_file->parent_path());
          const json out = {{"config_hash", r.config_hash},
                            {"seed", spec.seed},
                            {"moments",
                             {{"mean_inflation", r.moments.mean_inflation},
                              {"mean_unemployment", r.moments.mean_unemployment},
                              {"mean_gdp_growth", r.moments.mean_gdp_growth}}}};
          std::ofstream(*cache_file, std::ios::binary) << out.dump(2) << "\n";
        }
      }
      r.loss = calibration_loss(r.moments, spec.targets);
    } catch (...) {
      errors[g] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  rank_results(results);
  return results;
}

std::string sweep_results_json(const SweepSpec& spec, const std::vector<SweepResult>& results) {
  json names = json::array();
  for (const auto& p : spec.parameters) names.push_back(p.name);
  json rows = json::array();
  for (std::size_t rank = 0; rank < results.size(); ++rank) {
    const auto& r = results[rank];
    json values = json::object();
    for (std::size_t k = 0; k < spec.parameters.size(); ++k) values[spec.parameters[k].name] = r.values[k];
    rows.push_back({{"rank", rank + 1},
                    {"grid_index", r.grid_index},
                    {"parameters", values},
                    {"moments",
                     {{"mean_inflation", r.moments.mean_inflation},
                      {"mean_unemployment", r.moments.mean_unemployment},
                      {"mean_gdp_growth", r.moments.mean_gdp_growth}}},
                    {"loss", r.loss},
                    {"config_hash", r.config_hash}});
  }
  const json doc = {{"parameters", names}, {"seed", spec.seed}, {"burn_in", spec.burn_in}, {"horizon", spec.horizon}, {"results", rows}};
  return doc.dump(2) + "\n";
}

}  // namespace decarb
