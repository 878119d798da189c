#pragma once

#include <string>

#include <json.hpp>

#include "rselab/attack_plan.hpp"
#include "rselab/plant_sim.hpp"
#include "rselab/scenario.hpp"

namespace rselab {

/// Exit-code contract of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitNotPa = 0,
  kExitInvalid = 1,
  kExitPa = 2,
  kExitIndeterminate = 3,
  kExitDecoderWarning = 4,
};

struct CommandResult {
  nlohmann::json report;
  int exit_code = kExitOk;
};

CommandResult cmd_analyze(const ScenarioConfig& config);

/// Plan for the scenario's attack source, drawn against `noise`.
AttackPlan scenario_attack(const ScenarioConfig& config, const NoiseRealization& noise);

struct SimulationRun {
  SimTrace trace;
  AttackPlan plan;
  CommandResult result;
};

/// `attack_file` overrides the config's attack source when nonempty.
SimulationRun run_scenario(const ScenarioConfig& config, const std::string& attack_file = "");
CommandResult cmd_simulate(const ScenarioConfig& config, const std::string& attack_file = "");
CommandResult cmd_attack(const ScenarioConfig& config, const std::string& out_path);
/// Window CSV: N rows (steps) by p columns (sensors).
CommandResult cmd_decode(const ScenarioConfig& config, const std::string& window_csv);
/// Writes <figure>.csv (and plot_<figure>.py) under out_dir.
CommandResult cmd_reproduce(const std::string& figure, const std::string& out_dir, std::uint64_t seed);

nlohmann::json summarize(const SimTrace& trace);

}  // namespace rselab
