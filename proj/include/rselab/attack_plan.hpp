#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rselab/detectors.hpp"
#include "rselab/model.hpp"

namespace rselab {

/// Per-step sensor attack a(t) for t in [start_time, start_time + length).
struct AttackPlan {
  long start_time = 0;
  Matrix values;  ///< p x length, column k is a(start_time + k)
  SensorSet compromised;
  DetectorKind target = DetectorKind::II;
  double epsilon = 0.0;
  std::string method;
  /// Generator state per step (z or the fake state), aligned with `values`.
  std::vector<Vector> z;
  std::vector<Vector> alpha;

  int p() const { return static_cast<int>(values.rows()); }
  long length() const { return static_cast<long>(values.cols()); }
  long end_time() const { return start_time + length(); }
  /// Zero outside the plan range.
  Vector at(long t) const;

  /// Header "t,a_1,...,a_p", one row per step.
  void write_csv(std::ostream& os) const;
  /// Rows may be sparse in t; missing steps are zero. Throws Error(Io).
  static AttackPlan read_csv(std::istream& is, int p);
};

}  // namespace rselab
