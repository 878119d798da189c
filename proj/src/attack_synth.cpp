#include "rselab/attack_synth.hpp"

#include <cmath>

#include "rselab/attackability.hpp"
#include "rselab/error.hpp"
#include "rselab/slack_planner.hpp"

namespace rselab {

namespace {

Vector sign_normalized(Vector v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v[idx] < 0) v = -v;
  return v.normalized();
}

/// Unit push direction for growth: the chain head of the unstable witness.
Vector growth_direction(const UnstableWitness& w) {
  Vector h = w.head();
  if (h.norm() < 1e-12 && !w.chain_imag.empty()) h = w.chain_imag.back();
  return sign_normalized(h);
}

}  // namespace

Vector single_step_attack(const SystemModel& model, const SensorSet& compromised, double magnitude) {
  Vector z;
  if (!pa_single_step(model, compromised, &z)) {
    throw Error(ErrorCode::NotAttackable, "clean sensors observe the full state; no single-step perfect attack");
  }
  z = sign_normalized(z) * magnitude;
  return build_O(model, model.all_sensors()) * z;
}

AttackPlan cold_start_attack(const SystemModel& model, const SensorSet& compromised, long start_time, long horizon,
                             double eta, double gain) {
  const int N = model.N();
  const Matrix F = build_F(model, compromised);
  const Matrix Q = unobservable_subspace(model, compromised);
  if (Q.cols() == 0) throw Error(ErrorCode::NotAttackable, "clean sensors observe the full state");
  const Matrix basis = null_space(F * Q, model.tol().rank_tol);
  if (basis.cols() == 0) {
    throw Error(ErrorCode::NotAttackable, "N(F) has no direction hidden from the clean sensors");
  }
  const Vector f = sign_normalized(Q * basis.col(0));
  const long end = horizon + N - 1;
  if (start_time >= end) throw Error(ErrorCode::Config, "attack start lies beyond the horizon");

  AttackPlan plan;
  plan.start_time = start_time;
  plan.compromised = compromised;
  plan.target = DetectorKind::I;
  plan.method = "cold_start";
  plan.values.resize(model.p(), end - start_time);
  const Matrix CAN1 = model.C() * model.power(N - 1);
  Vector z = eta * f;
  const Vector alpha = gain * f;
  for (long tau = start_time; tau < end; ++tau) {
    // a(tau) is the newest entry of the window starting at tau - N + 1.
    Vector a = CAN1 * z;
    for (int i = 0; i < model.p(); ++i) {
      if (!compromised.contains(i)) a[i] = 0.0;
    }
    plan.values.col(tau - start_time) = a;
    plan.z.push_back(z);
    plan.alpha.push_back(alpha);
    z = model.A() * z + alpha;
  }
  plan.epsilon = plan.values.col(0).norm();
  return plan;
}

AttackPlan sustained_attack(const SystemModel& model, const SensorSet& compromised, const SustainedOptions& o) {
  const PaVerdict v = analyze_pa(model, compromised);
  const bool id2 = o.detector == DetectorKind::II;
  if (id2 ? !v.pa_over_time_id2 : !v.pa_over_time_id1) {
    throw Error(ErrorCode::NotAttackable,
                std::string("system is not perfectly attackable over time for detector ") + to_string(o.detector));
  }
  const bool auth_on_K = o.policy.sensors() == model.p() && o.policy.any_on(compromised);
  if (!id2 && v.id1_branch == 'a' && !auth_on_K) {
    AttackPlan plan = cold_start_attack(model, compromised, o.start_time, o.horizon, o.eta, o.gain);
    return plan;
  }
  if (!o.omniscient || !o.noise) {
    throw Error(ErrorCode::NotAttackable,
                "this construction needs the realized noise (enable the omniscient planner)");
  }
  Vector h;
  if (v.witness) {
    h = growth_direction(*v.witness);
  } else {
    const Matrix Q = unobservable_subspace(model, compromised);
    if (Q.cols() == 0) throw Error(ErrorCode::NotAttackable, "clean sensors observe the full state");
    h = sign_normalized(Q.col(0));
  }
  SlackPlanner::Options po;
  po.check_innovation = id2;
  po.margin = o.margin;
  po.cap = o.cap;
  po.level_ratio = o.level_ratio;
  po.levels = o.levels;
  po.ramp_steps = o.ramp_steps;
  SlackPlanner planner(model, o.decoder, *o.noise, compromised, o.policy, o.threshold_d, po);
  AttackPlan plan = planner.plan(h, o.start_time, o.horizon + model.N() - 1);
  plan.target = o.detector;
  plan.method = auth_on_K ? "slack_bumps" : "slack_ramp";
  return plan;
}

AttackPlan example3_attack(const SystemModel& model, double s, long t0) {
  Matrix A(2, 2), C(1, 2);
  A << 0.3, 1.0, 0.0, 0.5;
  C << 1.0, 0.0;
  const bool match = model.n() == 2 && model.p() == 1 && model.N() == 2 && (model.A() - A).norm() < 1e-12 &&
                     (model.C() - C).norm() < 1e-12;
  if (!match) throw Error(ErrorCode::InvalidArgument, "single-injection example needs the two-state example plant");
  if (t0 < 1) throw Error(ErrorCode::InvalidArgument, "injection time must leave one earlier window");
  AttackPlan plan;
  plan.start_time = t0;
  plan.compromised = SensorSet::all(1);
  plan.target = DetectorKind::I;
  plan.method = "single_injection";
  plan.values = Matrix::Constant(1, 1, s);
  plan.epsilon = std::abs(s);
  return plan;
}

SlackBound stealth_slack(double window_noise_norm, double delta_w, int N) {
  SlackBound b;
  const double ball = std::sqrt(static_cast<double>(N)) * delta_w;
  if (delta_w <= 0.0) return b;
  const double room = ball - window_noise_norm;
  if (room > 1e-12 * std::max(1.0, ball)) {
    b.epsilon = room;
    return b;
  }
  b.gamma_construction = true;
  b.gamma = -1.0;
  b.epsilon = ball;
  return b;
}

}  // namespace rselab
