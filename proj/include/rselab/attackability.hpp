#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rselab/detectors.hpp"
#include "rselab/model.hpp"
#include "rselab/policy.hpp"

namespace rselab {

/// Perfect-attackability decision for a compromised set K, with the
/// numeric certificates behind every branch.
struct PaVerdict {
  SensorSet compromised;

  bool pa_single_step = false;
  RankInfo clean_rank;  ///< rank of O restricted to the clean sensors
  Vector z;             ///< unit vector in N(O_{K^c}) when single-step PA
  double z_residual = 0.0;

  RankInfo F_rank;
  bool F_full_rank = false;
  Vector F_null;  ///< unit vector of N(F) when rank-deficient

  std::vector<EigenCluster> unstable;
  std::optional<UnstableWitness> witness;

  bool pa_over_time_id1 = false;
  /// 'a': F rank-deficient, PA over time iff single-step PA.
  /// 'b': F full rank, additionally needs an unstable eigenvector in N(O_{K^c}).
  char id1_branch = 'b';
  bool pa_over_time_id2 = false;

  /// Some rank decision sits within a factor 100 of its threshold.
  bool indeterminate = false;
  std::vector<std::string> notes;
};

PaVerdict analyze_pa(const SystemModel& model, const SensorSet& compromised);

bool pa_single_step(const SystemModel& model, const SensorSet& compromised, Vector* witness = nullptr);
bool pa_over_time_id1(const SystemModel& model, const SensorSet& compromised);
bool pa_over_time_id2(const SystemModel& model, const SensorSet& compromised);

/// True iff the window rows left trustworthy (clean sensors plus those
/// authenticated at each step) have full column rank.
bool auth_blocks_single_step(const SystemModel& model, const SensorSet& compromised,
                             const std::vector<SensorSet>& auth_sets);

struct PolicyVerdict {
  bool prevented = false;
  long period = -1;
  bool observable_auth = false;  ///< (A, C_F) observable
  RankInfo key_rank;             ///< [C_F; C_F A^T; ...; C_F A^{(N-1)T}]
  bool key_full_rank = false;
  /// Observable but the decimated stack loses rank at this period.
  bool key_rank_loss = false;
  RankInfo F_S_rank;
  bool F_S_full_rank = false;
  std::string reason;
};

PolicyVerdict policy_prevents_pa(const SystemModel& model, const SensorSet& compromised, const AuthPolicy& policy,
                                 const SensorSet& auth_subset, DetectorKind detector);

nlohmann::json to_json(const RankInfo& info);
nlohmann::json to_json(const PaVerdict& verdict);
nlohmann::json to_json(const PolicyVerdict& verdict);

}  // namespace rselab
