#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "decarb/calibration.hpp"
#include "decarb/metrics.hpp"
#include "decarb/runner.hpp"
#include "decarb/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kParse = 1,
  kAudit = 2,
  kInfeasible = 3,
  kMismatch = 4,
  kBudget = 5,
};

constexpr const char* kVersion = "1.0.0";

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw decarb::ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw decarb::Error("cannot write " + path.string());
  out << text;
}

class Mismatch : public decarb::Error {
 public:
  using decarb::Error::Error;
};

struct RunArgs {
  fs::path config;
  std::optional<fs::path> scenario;
  std::optional<fs::path> out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::optional<int> fault;
};

int cmd_gen_sample(const fs::path& out, int rows, std::uint64_t seed, int sectors) {
  decarb::SampleSpec spec;
  spec.rows = rows;
  spec.seed = seed;
  spec.sectors = sectors;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  decarb::write_microdata(out, decarb::generate_sample(spec));
  std::cerr << "wrote " << rows << " records to " << out.string() << "\n";
  return kOk;
}

int cmd_run(const RunArgs& args) {
  const auto config = decarb::load_config(args.config, args.seed);
  std::optional<decarb::ScenarioSpec> scenario;
  std::string scenario_hash;
  if (args.scenario) {
    scenario = decarb::load_scenario(*args.scenario);
    scenario_hash = decarb::hash_hex(slurp(*args.scenario));
  }
  const fs::path out = args.out.value_or(config.output_dir);
  fs::create_directories(out);

  decarb::RunOptions options;
  options.threads = args.threads;
  options.inject_fault_quarter = args.fault;
  const auto started = std::chrono::steady_clock::now();
  const auto result = decarb::run_simulation(config, scenario ? &*scenario : nullptr, options);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  spill(out / "indicators.csv", decarb::indicators_csv(result.frames));
  spill(out / "indicators.json", decarb::indicators_json(result.frames));
  spill(out / "balance_sheet.json", decarb::balance_sheet_json(result.final_state));

  json manifest = {
      {"tool", "decarbsim"},
      {"version", kVersion},
      {"config", fs::absolute(args.config).lexically_normal().string()},
      {"config_hash", decarb::config_hash(config)},
      {"seed", config.seed},
      {"horizon_quarters", config.horizon_quarters},
      {"inputs",
       {{"microdata", fs::absolute(config.microdata).lexically_normal().string()},
        {"io_table", fs::absolute(config.io_table).lexically_normal().string()}}},
      {"final_fingerprint", decarb::fingerprint(result.final_state)},
  };
  if (scenario) {
    manifest["scenario"] = {{"name", scenario->name},
                            {"path", fs::absolute(*args.scenario).lexically_normal().string()},
                            {"hash", scenario_hash}};
  } else {
    manifest["scenario"] = nullptr;
  }
  spill(out / "manifest.json", manifest.dump(2) + "\n");
  std::fprintf(stderr, "%d quarters in %.2f s -> %s\n", config.horizon_quarters, seconds, out.string().c_str());
  return kOk;
}

int cmd_compare(const fs::path& run_a, const fs::path& run_b, const std::optional<fs::path>& out_dir) {
  const auto ma = json::parse(slurp(run_a / "manifest.json"));
  const auto mb = json::parse(slurp(run_b / "manifest.json"));
  if (ma.at("horizon_quarters") != mb.at("horizon_quarters")) {
    throw Mismatch("compare: horizons differ (" + ma.at("horizon_quarters").dump() + " vs " + mb.at("horizon_quarters").dump() + ")");
  }
  if (ma.at("seed") != mb.at("seed") || ma.at("config_hash") != mb.at("config_hash")) {
    throw Mismatch("compare: runs do not share a seed lineage (config hash or seed differ)");
  }
  const auto a = decarb::parse_indicators_csv(slurp(run_a / "indicators.csv"));
  const auto b = decarb::parse_indicators_csv(slurp(run_b / "indicators.csv"));
  const auto report = decarb::compare_runs(a, b);
  const fs::path out = out_dir.value_or(run_b);
  fs::create_directories(out);
  spill(out / "delta.csv", decarb::delta_csv(report));
  spill(out / "delta.json", decarb::delta_json(report));
  std::fprintf(stderr, "green_investment_share delta over quarters [%d, %d): %+.4f pp\n", report.window_begin, report.window_end,
               100.0 * report.mean_window_of("green_investment_share"));
  return kOk;
}

int cmd_sweep(const fs::path& config_path, const std::optional<fs::path>& sweep_path, const std::optional<fs::path>& out_dir,
              int workers) {
  const std::string text = slurp(config_path);
  const auto base_dir = config_path.has_parent_path() ? config_path.parent_path() : fs::path(".");
  decarb::SweepSpec spec;
  if (sweep_path) {
    spec = decarb::load_sweep(*sweep_path);
  } else {
    const auto doc = json::parse(text);
    if (!doc.contains("sweep")) throw decarb::ParseError("sweep: no --sweep file and no 'sweep' block in the config");
    spec = decarb::parse_sweep(doc["sweep"].dump());
  }
  const fs::path out = out_dir.value_or(decarb::load_config(config_path).output_dir);
  fs::create_directories(out);
  const auto results = decarb::sweep(spec, text, base_dir, out / "cache", workers);
  spill(out / "sweep_results.json", decarb::sweep_results_json(spec, results));
  if (!results.empty()) std::fprintf(stderr, "best loss %.6g at grid point %zu\n", results.front().loss, results.front().grid_index);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decarbsim: agent-based decarbonisation scenario simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  fs::path sample_out;
  int rows = 1000;
  std::uint64_t sample_seed = 2025;
  int sectors = 10;
  auto* gen = app.add_subcommand("gen-sample", "Write a synthetic micro-record CSV");
  gen->add_option("--out", sample_out, "Output CSV path")->required();
  gen->add_option("--rows", rows, "Number of records")->check(CLI::PositiveNumber);
  gen->add_option("--seed", sample_seed, "Generator seed");
  gen->add_option("--sectors", sectors, "Number of expenditure-share columns")->check(CLI::PositiveNumber);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a baseline or scenario");
  run->add_option("--config", run_args.config, "Run config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--scenario", run_args.scenario, "Scenario JSON (omit for the baseline)")->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out, "Output directory (default: the config's output_dir)");
  run->add_option("--seed", run_args.seed, "Overrides the config seed");
  run->add_option("--threads", run_args.threads, "Worker threads for agent evaluation")->check(CLI::PositiveNumber);
  run->add_option("--inject-audit-fault", run_args.fault, "Corrupt the ledger by one cent at this quarter");

  fs::path run_a;
  fs::path run_b;
  std::optional<fs::path> compare_out;
  auto* compare = app.add_subcommand("compare", "Scenario-minus-baseline deltas of two run directories");
  compare->add_option("baseline", run_a, "Baseline run directory")->required()->check(CLI::ExistingDirectory);
  compare->add_option("scenario", run_b, "Scenario run directory")->required()->check(CLI::ExistingDirectory);
  compare->add_option("--out", compare_out, "Output directory (default: the scenario run directory)");

  fs::path sweep_config;
  std::optional<fs::path> sweep_file;
  std::optional<fs::path> sweep_out;
  int workers = 1;
  auto* sweep = app.add_subcommand("sweep", "Grid-sweep calibration of the baseline");
  sweep->add_option("--config", sweep_config, "Base run config JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--sweep", sweep_file, "Sweep spec JSON (default: the config's sweep block)")->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--threads", workers, "Grid points evaluated concurrently")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_sample(sample_out, rows, sample_seed, sectors);
    if (*run) return cmd_run(run_args);
    if (*compare) return cmd_compare(run_a, run_b, compare_out);
    if (*sweep) return cmd_sweep(sweep_config, sweep_file, sweep_out, workers);
  } catch (const decarb::AuditFailure& e) {
    std::cerr << "audit failure: " << e.what() << "\n";
    return kAudit;
  } catch (const decarb::InfeasibleIO& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const Mismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMismatch;
  } catch (const decarb::MetricsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == decarb::MetricsError::Kind::HorizonMismatch ? kMismatch : kParse;
  } catch (const decarb::CalibrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == decarb::CalibrationError::Kind::BudgetExceeded ? kBudget : kParse;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const decarb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";  // malformed input tables
    return kParse;
  }
  return kOk;
}
