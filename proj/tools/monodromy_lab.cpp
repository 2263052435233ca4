// Command-line entry point: fabricate / harvest / simulate / sweep.
//
// Exit codes: 0 ok, 2 usage, 3 I/O, 4 validation, 5 harvest could not
// complete (a node was not fully populated or tracking was ambiguous).

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "monodromy/datafile.hpp"
#include "monodromy/experiments.hpp"
#include "monodromy/fabricator.hpp"
#include "monodromy/harvester.hpp"
#include "monodromy/scheduler.hpp"
#include "monodromy/sweep.hpp"

namespace {

using namespace monodromy;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;
constexpr int kExitHarvest = 5;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int verbosity = 0;

void note(const std::string& msg) {
  if (verbosity > 0) std::cerr << msg << '\n';
}

nlohmann::json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("file not found or unreadable: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

struct FabricateArgs {
  FabricationConfig config;
  std::string out;
};

struct HarvestArgs {
  std::uint32_t degree = 20, nodes = 3, multiplicity = 2;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::optional<double> min_step;
  std::string timing = "microseconds";
};

struct SimulateArgs {
  std::string oracle;
  std::uint32_t threads = 1;
  std::string potential = "E";
  double lambda = 0.0;
  bool by_max = false;
  std::uint64_t seed = kDefaultSeed;
  std::uint32_t start_node = 0;
  std::optional<std::uint64_t> budget;
  std::optional<double> model_alpha;
  bool validate = false;
  std::string metrics_out;
};

struct SweepArgs {
  std::string kind;
  std::string config;
  std::string out = "results";
};

void do_fabricate(const FabricateArgs& a) {
  const OracleData o = fabricate(a.config);
  save_oracle(o, a.out);
  note("wrote " + a.out);
}

void do_harvest(const HarvestArgs& a) {
  HarvestOptions options;
  if (a.min_step) options.settings.min_step = *a.min_step;
  if (a.timing == "microseconds")
    options.timing = HarvestTiming::MeasuredMicroseconds;
  else if (a.timing == "steps")
    options.timing = HarvestTiming::PredictorSteps;
  else
    throw std::invalid_argument("timing must be 'microseconds' or 'steps'");
  HarvestReport report;
  const OracleData o = harvest(a.degree, a.nodes, a.multiplicity, a.seed, options, &report);
  save_oracle(o, a.out);
  std::cout << "tracks=" << report.tracks << " failed_flags=" << report.failed_flags
            << " alpha=" << o.provenance.alpha << '\n';
  for (const auto& [reason, count] : report.failure_reasons) note(std::string(to_string(reason)) + ": " + std::to_string(count));
}

void do_simulate(const SimulateArgs& a) {
  const OracleData o = load_oracle(a.oracle);
  SimulationConfig config;
  config.threads = a.threads;
  config.potential = parse_potential(a.potential, a.lambda, a.by_max);
  config.tie_seed = a.seed;
  config.track_budget = a.budget;
  config.model_alpha = a.model_alpha;
  config.validate_each_step = a.validate;
  const SimulationResult result = run(o, config, a.start_node);
  const CsvTable table = simulation_table({simulation_row(a.seed, o, config, result.metrics)});
  if (!a.metrics_out.empty()) {
    table.save(a.metrics_out);
  }
  std::cout << table.str();
}

void do_sweep(const SweepArgs& a) {
  const nlohmann::json config = read_config(a.config);
  SweepOutput out;
  try {
    out = run_sweep(parse_sweep_kind(a.kind), config, a.out);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(e.what());
  }
  for (const auto& f : out.files) std::cout << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monodromy solver laboratory: oracle fabrication and harvesting, scheduling simulation, sweeps"};
  app.require_subcommand(1, 1);
  app.add_flag("-v,--verbose", verbosity, "Print progress notes to stderr");

  FabricateArgs fab;
  auto* fabricate_cmd = app.add_subcommand("fabricate", "Write a random oracle for a complete homotopy graph");
  fabricate_cmd->add_option("--nodes", fab.config.nodes, "Number of nodes N")->capture_default_str();
  fabricate_cmd->add_option("--degree", fab.config.degree, "Solutions per node d")->capture_default_str();
  fabricate_cmd->add_option("--multiplicity", fab.config.multiplicity, "Edges per node pair m")->capture_default_str();
  fabricate_cmd->add_option("--alpha", fab.config.alpha, "Per-track success probability")->capture_default_str();
  fabricate_cmd->add_option("--nb-successes", fab.config.nb_successes, "Duration model: successes n")->capture_default_str();
  fabricate_cmd->add_option("--nb-probability", fab.config.nb_probability, "Duration model: success probability p")
      ->capture_default_str();
  fabricate_cmd->add_option("--seed", fab.config.seed, "Random seed")->capture_default_str();
  fabricate_cmd->add_option("--out", fab.out, "Output datafile")->required();

  HarvestArgs har;
  auto* harvest_cmd = app.add_subcommand("harvest", "Track a random univariate family and write its oracle");
  harvest_cmd->add_option("--degree", har.degree, "Polynomial degree d")->capture_default_str();
  harvest_cmd->add_option("--nodes", har.nodes, "Number of nodes N")->capture_default_str();
  harvest_cmd->add_option("--multiplicity", har.multiplicity, "Edges per node pair m")->capture_default_str();
  harvest_cmd->add_option("--seed", har.seed, "Random seed")->capture_default_str();
  harvest_cmd->add_option("--out", har.out, "Output datafile")->required();
  harvest_cmd->add_option("--min-step", har.min_step, "Smallest step before a track is declared failed");
  harvest_cmd->add_option("--timing", har.timing, "Duration unit: microseconds (measured) or steps (deterministic)")
      ->capture_default_str();

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the scheduler on an oracle datafile");
  simulate_cmd->add_option("--oracle", sim.oracle, "Input datafile")->required();
  simulate_cmd->add_option("--threads", sim.threads, "Simulated threads k")->capture_default_str();
  simulate_cmd->add_option("--potential", sim.potential, "E, ord or omega")->capture_default_str();
  simulate_cmd->add_option("--lambda", sim.lambda, "Weight exponent for omega (inf allowed)")->capture_default_str();
  simulate_cmd->add_flag("--normalize-by-max", sim.by_max, "omega: scale |Q_v| by the largest |Q| instead of d");
  simulate_cmd->add_option("--seed", sim.seed, "Tie-break seed, also the run_id (0: lowest edge id)")->capture_default_str();
  simulate_cmd->add_option("--start-node", sim.start_node, "Node holding the initial solution")->capture_default_str();
  simulate_cmd->add_option("--budget", sim.budget, "Track budget (default 100*N*d)");
  simulate_cmd->add_option("--model-alpha", sim.model_alpha, "Alpha assumed by the potential (default: datafile alpha)");
  simulate_cmd->add_flag("--validate", sim.validate, "Check state invariants after every event");
  simulate_cmd->add_option("--metrics-out", sim.metrics_out, "Also write the metrics CSV here");

  SweepArgs swp;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment sweep from a JSON config");
  sweep_cmd->add_option("kind", swp.kind, "efficiency, threshold, tracks, lambda or bounds")
      ->required()
      ->check(CLI::IsMember({"efficiency", "threshold", "tracks", "lambda", "bounds"}));
  sweep_cmd->add_option("--config", swp.config, "JSON config file")->required();
  sweep_cmd->add_option("--out", swp.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fabricate_cmd) do_fabricate(fab);
    if (*harvest_cmd) do_harvest(har);
    if (*simulate_cmd) do_simulate(sim);
    if (*sweep_cmd) do_sweep(swp);
  } catch (const DatafileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == DatafileErrorKind::Io ? kExitIo : kExitValidation;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const HarvestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitHarvest;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
