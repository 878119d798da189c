#pragma once

#include <string>
#include <vector>

#include "rselab/sensor_set.hpp"

namespace rselab {

/// Authentication times of one sensor.
struct SensorSchedule {
  enum class Kind { Never, Periodic, Explicit };
  Kind kind = Kind::Never;
  long phase = 0;
  long period = 0;
  std::vector<long> times;  ///< strictly increasing, Explicit only

  static SensorSchedule never() { return {}; }
  static SensorSchedule periodic(long period, long phase = 0);
  static SensorSchedule explicit_times(std::vector<long> times);

  bool authenticated_at(long t) const;
  /// First authentication instant >= t, or -1 if none.
  long next_at_or_after(long t) const;
  /// Largest gap between consecutive instants; -1 when unbounded.
  long max_gap() const;
};

/// Per-sensor authentication schedules.
class AuthPolicy {
 public:
  AuthPolicy() = default;
  explicit AuthPolicy(int sensors);
  AuthPolicy(int sensors, std::vector<SensorSchedule> schedules);

  static AuthPolicy none(int sensors) { return AuthPolicy(sensors); }
  static AuthPolicy periodic(int sensors, const SensorSet& subset, long period, long phase = 0);

  int sensors() const noexcept { return static_cast<int>(schedules_.size()); }
  const SensorSchedule& schedule(int sensor) const { return schedules_.at(static_cast<std::size_t>(sensor)); }
  SensorSet authenticated_at(long t) const;
  /// Sensors with at least one authentication instant.
  SensorSet authenticated_sensors() const;
  bool any_on(const SensorSet& subset) const;

  /// Common period when every sensor of `subset` is periodic with the same
  /// period, otherwise -1.
  long common_period(const SensorSet& subset) const;

 private:
  std::vector<SensorSchedule> schedules_;
};

}  // namespace rselab
