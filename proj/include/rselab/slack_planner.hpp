#pragma once

#include <vector>

#include "rselab/attack_plan.hpp"
#include "rselab/decoder.hpp"
#include "rselab/plant_sim.hpp"
#include "rselab/policy.hpp"

namespace rselab {

/// Plans a stealthy attack against a known noise realization.
///
/// Works in error coordinates: the decoder is shift-equivariant, so the
/// estimate error of a window is decode(w(t) + a(t)). The attack follows a
/// fake state f(t+1) = A f(t) + b(t), a(t) = C f(t) on the compromised,
/// unauthenticated sensors. Windows without a push inside them decode to
/// f(t) + decode(w(t)); every other window is kept inside the region where
/// the least-squares start already satisfies the noise bound, so the decoder
/// returns it unchanged and reports no attacked sensor.
class SlackPlanner {
 public:
  struct Options {
    bool check_innovation = true;
    double margin = 0.01;
    double cap = 1.0;
    double level_ratio = 0.85;
    int levels = 60;
    long ramp_steps = 300;
  };

  SlackPlanner(const SystemModel& model, const DecoderOptions& decoder, const NoiseRealization& noise,
               const SensorSet& compromised, const AuthPolicy& policy, double threshold_d, Options options);

  /// Pushes along `direction` (a unit vector of the unobservable subspace
  /// of the clean sensors) from `start` on, for steps [start, end).
  AttackPlan plan(const Vector& direction, long start, long end);

  /// Checks every window in [first, last] against the current fake state.
  bool windows_ok(long first, long last) const;

 private:
  Vector attack_at(long t) const;
  bool pure(long t) const;
  bool error_at(long t, Vector& e) const;
  void propagate(long from, long to);
  void plan_ramp(const Vector& h, long start, long end);
  void plan_bumps(const Vector& h, long start, long end);
  long next_auth(long t) const;

  const SystemModel& model_;
  Decoder decoder_;
  const NoiseRealization& noise_;
  SensorSet compromised_;
  AuthPolicy policy_;
  double d_;
  Options opt_;
  Matrix O_, Opinv_, resid_;
  long steps_ = 0;
  std::vector<Vector> w_;      ///< window noise
  std::vector<Vector> dec_w_;  ///< attack-free estimate error
  std::vector<Vector> fake_;
  std::vector<Vector> push_;
  std::vector<std::uint8_t> pushed_;
};

}  // namespace rselab
