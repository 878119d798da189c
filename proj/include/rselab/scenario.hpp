#pragma once

#include <string>

#include <json.hpp>

#include "rselab/decoder.hpp"
#include "rselab/detectors.hpp"
#include "rselab/plant_sim.hpp"
#include "rselab/policy.hpp"

namespace rselab {

struct AttackSource {
  enum class Kind { None, Synth, File };
  Kind kind = Kind::None;
  std::string path;  ///< File
  long start_step = 0;
  bool omniscient = true;
  long ramp_steps = 300;
  double cap = 1.0;
  double margin = 0.01;
  double eta = 1.0;
  double gain = 0.0;
};

/// Everything one run needs. JSON in, JSON out; times in the file may be
/// given in steps or in seconds of `sampling_period`.
struct ScenarioConfig {
  std::string name = "scenario";
  Matrix A, B, C;
  double delta_w = 0.0;
  int N = 1;
  double sampling_period = 1.0;
  Tolerances tol;

  SensorSet compromised;
  NoiseConfig noise;
  DetectorKind detector = DetectorKind::II;
  AttackSource attack;
  AuthPolicy policy;
  long horizon = 0;
  Matrix controller_gain;
  Reference reference;
  Vector x0;
  DecoderOptions decoder;

  std::string trace_path;
  std::string attack_output_path;
  std::string report_path;

  /// Validated model; throws Error(NotObservable / DimensionMismatch / ...).
  SystemModel model() const;
  SensorSet auth_subset() const { return policy.authenticated_sensors(); }

  nlohmann::json to_json() const;
  /// Relative file paths resolve against `base_dir`. Throws Error(Config).
  static ScenarioConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
  static ScenarioConfig load(const std::string& path);
};

/// Vehicle trajectory following plant: one axis of a double integrator with
/// sampling period 0.01 s, sensors measuring position, velocity, velocity.
ScenarioConfig vtf_config();
/// Two-state single-sensor plant A = [[.3, 1], [0, .5]], C = [1, 0].
ScenarioConfig example1_config(int N = 2);
ScenarioConfig builtin_config(const std::string& name);

}  // namespace rselab
