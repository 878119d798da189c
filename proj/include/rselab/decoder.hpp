#pragma once

#include <cstdint>
#include <vector>

#include "rselab/model.hpp"

namespace rselab {

enum class OmegaMode {
  PerStepBall,  ///< every step's clean-sensor vector has norm <= delta_w
  StackedBall,  ///< the whole clean noise vector has norm <= sqrt(N) delta_w
};

const char* to_string(OmegaMode mode);
OmegaMode omega_mode_from_string(const std::string& name);

struct DecoderOptions {
  OmegaMode mode = OmegaMode::PerStepBall;
  double eps_feas = 1e-8;
  int max_iter = 20000;
  double eq_tol_rel = 1e-6;
  int max_sensors = 20;
  /// Subset pseudo-inverses are precomputed up to this many sensors.
  int cache_sensors = 12;
};

/// The set Omega restricted to the rows of `clean` sensors.
struct NoiseFeasibleSet {
  OmegaMode mode = OmegaMode::PerStepBall;
  double delta_w = 0.0;
  int N = 1;
  double eps_feas = 1e-8;

  /// Projects a clean-rows noise vector (sensor-major over `clean_count`
  /// sensors) onto the set.
  Vector project(const Vector& w, int clean_count) const;
  bool contains(const Vector& w, int clean_count, double slack = 0.0) const;
};

enum class Feasibility { Feasible, Infeasible, Indeterminate };

struct OracleResult {
  Feasibility verdict = Feasibility::Infeasible;
  Vector x_hat;
  Vector w_hat;  ///< clean rows only, sensor-major
  double distance = 0.0;
  int iterations = 0;
};

struct DecodeStats {
  std::uint64_t decodes = 0;
  std::uint64_t supports_tested = 0;
  std::uint64_t oracle_iterations = 0;
  std::uint64_t indeterminate = 0;

  DecodeStats& operator+=(const DecodeStats& o);
};

/// l0 decoder over stacked windows. Immutable after construction; safe to
/// share between threads.
class Decoder {
 public:
  explicit Decoder(const SystemModel& model, DecoderOptions options = {});

  const SystemModel& model() const noexcept { return model_; }
  const DecoderOptions& options() const noexcept { return options_; }
  const Matrix& O() const noexcept { return O_; }
  NoiseFeasibleSet omega() const;
  double eq_tol(const Vector& y) const;

  /// Is there x, w with w in Omega and y = O x + w on the rows of `clean`?
  OracleResult feasibility(const SensorSet& clean, const Vector& y) const;

  /// Smallest support (lexicographic within a cardinality) whose complement
  /// passes the feasibility oracle. Indeterminate oracle calls count as
  /// infeasible and are reported through `stats`.
  DecodeResult decode(const Vector& y, DecodeStats* stats = nullptr) const;
  DecodeResult decode(const StackedWindow& w, DecodeStats* stats = nullptr) const {
    return decode(w.stacked, stats);
  }

  /// Row indices of O belonging to `subset`.
  std::vector<int> rows_of(const SensorSet& subset) const;

 private:
  struct SubsetSystem {
    Matrix O;
    Matrix Opinv;
  };
  SubsetSystem make_subset(const SensorSet& clean) const;
  const SubsetSystem& subset(const SensorSet& clean, SubsetSystem& scratch) const;

  SystemModel model_;
  DecoderOptions options_;
  Matrix O_;
  std::vector<SubsetSystem> cache_;
  std::vector<SensorSet> order_;
};

/// Threshold 2 sqrt(N) delta_w ||O^+|| (1 + ||A||).
double prop1_threshold(const SystemModel& model);

}  // namespace rselab
