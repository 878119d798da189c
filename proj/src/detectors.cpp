#include "rselab/detectors.hpp"

#include "rselab/error.hpp"

namespace rselab {

namespace {
constexpr double kInnovationRoundoff = 1e-12;
}  // namespace

const char* to_string(DetectorKind kind) { return kind == DetectorKind::I ? "I" : "II"; }

DetectorKind detector_from_string(const std::string& name) {
  if (name == "I" || name == "1" || name == "id1") return DetectorKind::I;
  if (name == "II" || name == "2" || name == "id2") return DetectorKind::II;
  throw Error(ErrorCode::Config, "unknown detector '" + name + "' (expected I or II)");
}

bool id1(const DecodeResult& decode) { return !decode.support.empty(); }

AlarmVerdict id2(const DecodeResult& current, const DecodeResult* previous, const SystemModel& model,
                 double threshold_d, const Vector& drift) {
  AlarmVerdict v;
  v.threshold_d = threshold_d;
  v.id1_alarm = id1(current);
  double roundoff = 0.0;
  if (previous) {
    v.has_previous = true;
    const Vector predicted = model.A() * previous->x_hat;
    Vector innov = current.x_hat - predicted;
    if (drift.size() == innov.size()) innov -= drift;
    v.id2_innovation = innov.norm();
    // Cancellation error of the subtraction; matters only when d is near zero.
    roundoff = kInnovationRoundoff * (current.x_hat.norm() + predicted.norm() + drift.norm());
  }
  v.id2_alarm = v.id1_alarm || v.id2_innovation > threshold_d + roundoff;
  return v;
}

}  // namespace rselab
