#pragma once

#include "rselab/attack_plan.hpp"
#include "rselab/decoder.hpp"
#include "rselab/plant_sim.hpp"
#include "rselab/policy.hpp"

namespace rselab {

/// Stacked window attack O z with z a null vector of O_{K^c}, ||z|| = M.
/// Throws Error(NotAttackable) if K leaves the state observable.
Vector single_step_attack(const SystemModel& model, const SensorSet& compromised, double magnitude);

struct SustainedOptions {
  DetectorKind detector = DetectorKind::II;
  long start_time = 0;
  /// Trace length; the plan covers steps up to horizon + N - 2.
  long horizon = 0;
  AuthPolicy policy;
  DecoderOptions decoder;
  double threshold_d = -1.0;

  /// Planner privilege: the realized noise is known to the attacker.
  bool omniscient = true;
  const NoiseRealization* noise = nullptr;

  long ramp_steps = 300;  ///< steps with a nonzero push before pure propagation
  double cap = 1.0;       ///< largest per-step push tried
  double margin = 0.01;   ///< fraction of delta_w and d kept unused
  double level_ratio = 0.85;
  int levels = 60;

  /// Cold start (rank-deficient F, detector I): z = eta f at the first
  /// window, then z(t+1) = A z(t) + gain f.
  double eta = 1.0;
  double gain = 0.0;
};

/// Stealthy attack sequence for `options.detector`. Refuses (throws
/// Error(NotAttackable)) when the system is not attackable over time for that
/// detector or when the construction needs noise knowledge it does not have.
AttackPlan sustained_attack(const SystemModel& model, const SensorSet& compromised, const SustainedOptions& options);

/// Cold start along a vector of N(F) inside the unobservable subspace of the
/// clean sensors; only valid when F is rank-deficient.
AttackPlan cold_start_attack(const SystemModel& model, const SensorSet& compromised, long start_time, long horizon,
                             double eta, double gain);

/// a(t0) = s on sensor 1, zero elsewhere. Only for the two-state single
/// sensor example plant with A = [[.3, 1], [0, .5]], C = [1, 0], N = 2.
AttackPlan example3_attack(const SystemModel& model, double s, long t0 = 1);

struct SlackBound {
  double epsilon = 0.0;  ///< supremum of admissible ||a||
  bool gamma_construction = false;
  double gamma = 0.0;
};

/// Room left in the stacked noise ball: sqrt(N) delta_w - ||w||. When the
/// noise sits on the boundary the attack reuses it, a = gamma w + a', with
/// gamma = -1 and ||a'|| up to sqrt(N) delta_w.
SlackBound stealth_slack(double window_noise_norm, double delta_w, int N);

}  // namespace rselab
