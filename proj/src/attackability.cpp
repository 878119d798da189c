#include "rselab/attackability.hpp"

#include <cmath>

namespace rselab {

PaVerdict analyze_pa(const SystemModel& model, const SensorSet& compromised) {
  PaVerdict v;
  v.compromised = compromised;
  const int n = model.n();
  const Tolerances& tol = model.tol();

  const Matrix Oc = build_O(model, compromised.complement());
  v.clean_rank = rank_info(Oc, tol.rank_tol);
  v.pa_single_step = v.clean_rank.rank < n;
  if (v.pa_single_step) {
    const Matrix Z = null_space(Oc, tol.rank_tol);
    v.z = Z.col(0);
    v.z_residual = Oc.rows() ? (Oc * v.z).norm() : 0.0;
    v.notes.push_back("single step: rank(O_clean) = " + std::to_string(v.clean_rank.rank) + " < n = " +
                      std::to_string(n));
  } else {
    v.notes.push_back("single step: O_clean has full column rank, not attackable");
  }

  const Matrix F = build_F(model, compromised);
  v.F_rank = rank_info(F, tol.rank_tol);
  v.F_full_rank = v.F_rank.rank == n;
  if (!v.F_full_rank) v.F_null = null_space(F, tol.rank_tol).col(0);

  v.unstable = unstable_eigenstructure(model.A(), tol);
  v.witness = unstable_null_intersection(model, compromised);

  if (!v.F_full_rank) {
    v.id1_branch = 'a';
    v.pa_over_time_id1 = v.pa_single_step;
    v.notes.push_back("ID I: F rank-deficient (rank " + std::to_string(v.F_rank.rank) +
                      "), attackable over time iff attackable at a single step");
  } else {
    v.id1_branch = 'b';
    v.pa_over_time_id1 = v.pa_single_step && !v.unstable.empty() && v.witness.has_value();
    v.notes.push_back(std::string("ID I: F full rank, ") +
                      (v.pa_over_time_id1 ? "unstable eigenvector in N(O_clean) found"
                                          : "no unstable eigenvector in N(O_clean)"));
  }
  v.pa_over_time_id2 = v.pa_single_step && !v.unstable.empty() && v.witness.has_value();
  v.notes.push_back(std::string("ID II: ") + (v.pa_over_time_id2 ? "attackable over time" : "not attackable over time"));

  v.indeterminate = v.clean_rank.borderline || v.F_rank.borderline || (v.witness && v.witness->borderline);
  if (v.indeterminate) v.notes.push_back("a rank decision lies close to its threshold");
  return v;
}

bool pa_single_step(const SystemModel& model, const SensorSet& compromised, Vector* witness) {
  const Matrix Oc = build_O(model, compromised.complement());
  const bool pa = rank_with_tol(Oc, model.tol().rank_tol) < model.n();
  if (pa && witness) *witness = null_space(Oc, model.tol().rank_tol).col(0);
  return pa;
}

bool pa_over_time_id1(const SystemModel& model, const SensorSet& compromised) {
  return analyze_pa(model, compromised).pa_over_time_id1;
}

bool pa_over_time_id2(const SystemModel& model, const SensorSet& compromised) {
  return analyze_pa(model, compromised).pa_over_time_id2;
}

bool auth_blocks_single_step(const SystemModel& model, const SensorSet& compromised,
                             const std::vector<SensorSet>& auth_sets) {
  return rank_with_tol(build_O_auth(model, compromised, auth_sets), model.tol().rank_tol) == model.n();
}

PolicyVerdict policy_prevents_pa(const SystemModel& model, const SensorSet& compromised, const AuthPolicy& policy,
                                 const SensorSet& auth_subset, DetectorKind detector) {
  (void)compromised;
  PolicyVerdict v;
  const Tolerances& tol = model.tol();
  const int n = model.n();
  v.F_S_rank = rank_info(build_F(model, model.all_sensors()), tol.rank_tol);
  v.F_S_full_rank = v.F_S_rank.rank == n;

  if (auth_subset.empty()) {
    v.reason = "authentication subset is empty";
    return v;
  }
  v.period = policy.common_period(auth_subset);
  if (v.period < 1) {
    v.reason = "authentication subset is not covered by a common bounded period";
    return v;
  }
  const Matrix CF = select_rows(model.C(), auth_subset);
  v.observable_auth = is_observable(model.A(), CF, tol.rank_tol);

  const Matrix AT = model.power(static_cast<int>(v.period));
  Matrix key(CF.rows() * model.N(), n);
  Matrix row = CF;
  for (int j = 0; j < model.N(); ++j) {
    key.middleRows(j * CF.rows(), CF.rows()) = row;
    row = row * AT;
  }
  v.key_rank = rank_info(key, tol.rank_tol);
  v.key_full_rank = v.key_rank.rank == n;
  v.key_rank_loss = v.observable_auth && !v.key_full_rank;

  if (!v.observable_auth) {
    v.reason = "(A, C_F) is not observable";
    return v;
  }
  if (!v.key_full_rank) {
    v.reason = "decimated authenticated stack loses rank at period " + std::to_string(v.period);
    return v;
  }
  if (detector == DetectorKind::I && !v.F_S_full_rank && v.period != 1) {
    v.reason = "F(S,N) rank-deficient: ID I needs authentication at every step";
    return v;
  }
  v.prevented = true;
  v.reason = detector == DetectorKind::I && !v.F_S_full_rank ? "authentication at every step"
                                                             : "bounded period with full-rank authenticated stack";
  return v;
}

namespace {

nlohmann::json vec_json(const Vector& v) {
  auto a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json complex_json(Complex z) { return nlohmann::json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

nlohmann::json to_json(const RankInfo& info) {
  return {{"rank", info.rank},
          {"singular_values", vec_json(info.singular_values)},
          {"threshold", info.threshold},
          {"margin", info.margin},
          {"borderline", info.borderline}};
}

nlohmann::json to_json(const PaVerdict& v) {
  nlohmann::json j;
  j["compromised"] = v.compromised.one_based();
  j["pa_single_step"] = v.pa_single_step;
  j["clean_rank"] = to_json(v.clean_rank);
  if (v.pa_single_step) {
    j["single_step_witness"] = {{"z", vec_json(v.z)}, {"residual", v.z_residual}};
  }
  j["F_rank"] = to_json(v.F_rank);
  j["F_full_rank"] = v.F_full_rank;
  if (!v.F_full_rank) j["F_null_vector"] = vec_json(v.F_null);
  auto unstable = nlohmann::json::array();
  for (const auto& c : v.unstable) {
    unstable.push_back({{"lambda", complex_json(c.lambda)}, {"algebraic", c.algebraic}, {"geometric", c.geometric}});
  }
  j["unstable_eigenvalues"] = unstable;
  if (v.witness) {
    const auto& w = *v.witness;
    nlohmann::json wj{{"lambda", complex_json(w.lambda)},
                      {"v", vec_json(w.v)},
                      {"eig_residual", w.eig_residual},
                      {"null_residual", w.null_residual},
                      {"chain_residual", w.chain_residual},
                      {"margin", w.margin}};
    if (w.is_complex()) wj["v_imag"] = vec_json(w.v_imag);
    auto chain = nlohmann::json::array();
    for (const auto& c : w.chain) chain.push_back(vec_json(c));
    wj["chain"] = chain;
    j["unstable_witness"] = wj;
  } else {
    j["unstable_witness"] = nullptr;
  }
  j["pa_over_time_id1"] = v.pa_over_time_id1;
  j["id1_branch"] = std::string(1, v.id1_branch);
  j["pa_over_time_id2"] = v.pa_over_time_id2;
  j["indeterminate"] = v.indeterminate;
  j["notes"] = v.notes;
  return j;
}

nlohmann::json to_json(const PolicyVerdict& v) {
  return {{"prevented", v.prevented},
          {"period", v.period},
          {"observable_auth", v.observable_auth},
          {"key_rank", to_json(v.key_rank)},
          {"key_full_rank", v.key_full_rank},
          {"key_rank_loss", v.key_rank_loss},
          {"F_S_rank", to_json(v.F_S_rank)},
          {"F_S_full_rank", v.F_S_full_rank},
          {"reason", v.reason}};
}

}  // namespace rselab
