#pragma once

#include <string>

#include "rselab/model.hpp"

namespace rselab {

enum class DetectorKind { I, II };

const char* to_string(DetectorKind kind);
DetectorKind detector_from_string(const std::string& name);

struct AlarmVerdict {
  bool id1_alarm = false;
  bool id2_alarm = false;
  double id2_innovation = 0.0;
  double threshold_d = 0.0;
  bool has_previous = false;
};

/// Alarm iff the decoder declared at least one sensor attacked.
bool id1(const DecodeResult& decode);

/// ID_I OR ||x_hat(t) - A x_hat(t-1) - drift|| > d, where `drift` is the
/// known-input term B u(t-1) (pass an empty vector for none). Without a
/// previous decode the innovation check passes.
AlarmVerdict id2(const DecodeResult& current, const DecodeResult* previous, const SystemModel& model,
                 double threshold_d, const Vector& drift = Vector());

}  // namespace rselab
