#include "rselab/policy.hpp"

#include <algorithm>

#include "rselab/error.hpp"

namespace rselab {

SensorSchedule SensorSchedule::periodic(long period, long phase) {
  if (period < 1) throw Error(ErrorCode::Config, "authentication period must be >= 1");
  SensorSchedule s;
  s.kind = Kind::Periodic;
  s.period = period;
  s.phase = ((phase % period) + period) % period;
  return s;
}

SensorSchedule SensorSchedule::explicit_times(std::vector<long> times) {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] <= times[k - 1]) throw Error(ErrorCode::Config, "authentication times must be strictly increasing");
  }
  SensorSchedule s;
  s.kind = Kind::Explicit;
  s.times = std::move(times);
  return s;
}

bool SensorSchedule::authenticated_at(long t) const {
  switch (kind) {
    case Kind::Never:
      return false;
    case Kind::Periodic:
      return t >= 0 && (t - phase) % period == 0 && t >= phase;
    case Kind::Explicit:
      return std::binary_search(times.begin(), times.end(), t);
  }
  return false;
}

long SensorSchedule::next_at_or_after(long t) const {
  switch (kind) {
    case Kind::Never:
      return -1;
    case Kind::Periodic: {
      if (t <= phase) return phase;
      const long k = (t - phase + period - 1) / period;
      return phase + k * period;
    }
    case Kind::Explicit: {
      auto it = std::lower_bound(times.begin(), times.end(), t);
      return it == times.end() ? -1 : *it;
    }
  }
  return -1;
}

long SensorSchedule::max_gap() const {
  switch (kind) {
    case Kind::Never:
      return -1;
    case Kind::Periodic:
      return period;
    case Kind::Explicit: {
      long g = 0;
      for (std::size_t k = 1; k < times.size(); ++k) g = std::max(g, times[k] - times[k - 1]);
      return g;
    }
  }
  return -1;
}

AuthPolicy::AuthPolicy(int sensors) : schedules_(static_cast<std::size_t>(sensors)) {}

AuthPolicy::AuthPolicy(int sensors, std::vector<SensorSchedule> schedules) : schedules_(std::move(schedules)) {
  if (static_cast<int>(schedules_.size()) != sensors) {
    throw Error(ErrorCode::Config, "authentication policy needs one schedule per sensor");
  }
}

AuthPolicy AuthPolicy::periodic(int sensors, const SensorSet& subset, long period, long phase) {
  AuthPolicy p(sensors);
  for (int i : subset) p.schedules_[static_cast<std::size_t>(i)] = SensorSchedule::periodic(period, phase);
  return p;
}

SensorSet AuthPolicy::authenticated_at(long t) const {
  std::vector<int> idx;
  for (int i = 0; i < sensors(); ++i) {
    if (schedules_[static_cast<std::size_t>(i)].authenticated_at(t)) idx.push_back(i);
  }
  return SensorSet(sensors(), std::move(idx));
}

SensorSet AuthPolicy::authenticated_sensors() const {
  std::vector<int> idx;
  for (int i = 0; i < sensors(); ++i) {
    const auto& s = schedules_[static_cast<std::size_t>(i)];
    if (s.kind == SensorSchedule::Kind::Periodic || (s.kind == SensorSchedule::Kind::Explicit && !s.times.empty())) {
      idx.push_back(i);
    }
  }
  return SensorSet(sensors(), std::move(idx));
}

bool AuthPolicy::any_on(const SensorSet& subset) const {
  return !authenticated_sensors().intersect(subset).empty();
}

long AuthPolicy::common_period(const SensorSet& subset) const {
  long period = -1;
  for (int i : subset) {
    const auto& s = schedules_.at(static_cast<std::size_t>(i));
    if (s.kind != SensorSchedule::Kind::Periodic) return -1;
    if (period < 0) period = s.period;
    if (s.period != period) return -1;
  }
  return period;
}

}  // namespace rselab
