#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "rselab/attack_plan.hpp"
#include "rselab/decoder.hpp"
#include "rselab/detectors.hpp"
#include "rselab/model.hpp"
#include "rselab/policy.hpp"

namespace rselab {

struct NoiseSpec {
  enum class Kind { Zero, UniformElementwise, Ball };
  Kind kind = Kind::Zero;
  double lo = 0.0;
  double hi = 0.0;
  double radius = 0.0;

  static NoiseSpec zero() { return {}; }
  static NoiseSpec uniform(double lo, double hi);
  static NoiseSpec ball(double radius);

  /// Worst-case 2-norm of a dim-vector draw.
  double bound(int dim) const;
};

struct NoiseConfig {
  NoiseSpec process;
  NoiseSpec measurement;
  std::uint64_t seed = 0;
};

/// Seeded draw sequence. Process and measurement noise use separate
/// engines, so changing one spec never shifts the other's samples.
class NoiseStream {
 public:
  NoiseStream(const NoiseConfig& config, int n, int p);
  Vector next_process();
  Vector next_measurement();

 private:
  Vector draw(const NoiseSpec& spec, int dim, std::mt19937_64& rng);

  NoiseConfig config_;
  int n_, p_;
  std::mt19937_64 process_rng_;
  std::mt19937_64 measurement_rng_;
};

/// Noise for steps 0..steps-1; column t holds v(t).
struct NoiseRealization {
  Matrix process;      ///< n x steps
  Matrix measurement;  ///< p x steps

  static NoiseRealization generate(const SystemModel& model, const NoiseConfig& config, long steps);
  long steps() const { return static_cast<long>(process.cols()); }

  /// Noise seen by a window starting at t once known inputs are removed:
  /// entry (i, k) is v_M,i(t+k) + C_i sum_{j<k} A^{k-1-j} v_P(t+j).
  Vector window_noise(const SystemModel& model, long t) const;
};

struct StepResult {
  Vector next_state;
  Vector output;
};

StepResult step(const SystemModel& model, const Vector& x, const Vector& u, const Vector& v_process,
                const Vector& v_measurement);
StepResult step(const SystemModel& model, const Vector& x, const Vector& u, NoiseStream& noise);

struct AttackOutcome {
  Vector delivered;
  Vector applied;
  /// Authenticated sensors the request tried to modify; their entries are
  /// delivered unmodified.
  SensorSet violations;
  bool violated() const { return !violations.empty(); }
};

/// Throws Error(InvalidArgument) when `a` touches sensors outside `compromised`.
AttackOutcome apply_attack(const Vector& y, const Vector& a, const SensorSet& compromised,
                           const SensorSet& authenticated_now);

struct Reference {
  enum class Kind { None, Constant, Circle };
  Kind kind = Kind::None;
  Vector value;                 ///< Constant
  double radius = 0.0;          ///< Circle: position R cos(w t Ts + phase)
  double angular_rate = 0.0;    ///< rad/s
  double phase = 0.0;
  double sampling_period = 1.0;

  /// State reference at step t (zero for None).
  Vector at(long t, int n) const;
};

struct ClosedLoopSpec {
  Matrix gain;  ///< m x n; empty for open loop
  Reference reference;
  long horizon = 0;
  NoiseConfig noise;
  const AttackPlan* attack = nullptr;
  AuthPolicy policy;
  SensorSet compromised;
  DecoderOptions decoder;
  Vector x0;
  /// Negative selects the threshold from the model.
  double threshold_d = -1.0;
  /// Use this realization instead of drawing from `noise`.
  const NoiseRealization* realization = nullptr;
};

struct SimTrace {
  int n = 0, m = 0, p = 0;
  long horizon = 0;
  double threshold_d = 0.0;
  double attack_free_bound = 0.0;  ///< ||O^+|| 2 sqrt(N) delta_w

  Matrix x;     ///< n x horizon
  Matrix xhat;  ///< n x horizon, estimate of x(t) from the window starting at t
  Matrix y;     ///< p x horizon
  Matrix yc;    ///< delivered outputs
  Matrix a;     ///< applied attack
  Matrix u;     ///< m x horizon
  std::vector<double> err_norm;
  std::vector<double> innovation;
  std::vector<std::uint64_t> support;
  std::vector<std::uint64_t> auth_mask;
  std::vector<std::uint8_t> alarm_id1;
  std::vector<std::uint8_t> alarm_id2;
  std::vector<std::uint8_t> attacked_window;

  DecodeStats stats;
  std::vector<long> auth_violation_times;
  /// Attack-free windows whose error exceeded attack_free_bound.
  long bound_violations = 0;

  double max_error() const;
  double mean_error() const;
  long id1_alarms() const;
  long id2_alarms() const;
  /// Steps with id1 but not id2.
  long hierarchy_violations() const;
  double auth_fraction() const;
  double indeterminate_rate() const;

  /// Columns t, x_*, xhat_*, err_norm, a_*, alarm_id1, alarm_id2, auth_flags.
  void write_csv(std::ostream& os) const;
};

/// Closed loop with u(t) = G (x_pred(t) - r(t)) + feedforward, where x_pred
/// propagates the latest window estimate over the N-1 step look-ahead.
/// Before the first estimate exists only the feedforward acts.
SimTrace run_closed_loop(const SystemModel& model, const ClosedLoopSpec& spec);

}  // namespace rselab
