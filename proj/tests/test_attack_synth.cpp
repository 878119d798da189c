#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "rselab/attack_synth.hpp"
#include "rselab/attackability.hpp"
#include "rselab/error.hpp"
#include "rselab/slack_planner.hpp"
#include "test_systems.hpp"

using namespace rselab;

namespace {

constexpr double kNoAttackBound = 0.0789;

NoiseConfig vtf_noise(std::uint64_t seed) {
  NoiseConfig c;
  c.measurement = NoiseSpec::uniform(-.05, .05);
  c.seed = seed;
  return c;
}

struct VtfRun {
  NoiseRealization noise;
  AttackPlan plan;
  SimTrace trace;
};

VtfRun run_vtf(std::uint64_t seed, long horizon, long start, const AuthPolicy& policy, long ramp_steps = 300) {
  const SystemModel m = testsys::vtf();
  VtfRun r;
  r.noise = NoiseRealization::generate(m, vtf_noise(seed), horizon + m.N() - 1);
  SustainedOptions o;
  o.detector = DetectorKind::II;
  o.start_time = start;
  o.horizon = horizon;
  o.policy = policy;
  o.noise = &r.noise;
  o.ramp_steps = ramp_steps;
  r.plan = sustained_attack(m, SensorSet::all(3), o);
  ClosedLoopSpec spec;
  spec.horizon = horizon;
  spec.gain = (Matrix(1, 2) << -500, -40).finished();
  spec.realization = &r.noise;
  spec.attack = &r.plan;
  spec.compromised = SensorSet::all(3);
  spec.policy = policy;
  r.trace = run_closed_loop(m, spec);
  return r;
}

}  // namespace

TEST(SingleStep, ExampleOneErrorEqualsZ) {
  const SystemModel ex = testsys::example1(2, 0.0);
  const Decoder dec(ex);
  const Vector a = single_step_attack(ex, SensorSet::all(1), 5.0);
  const Vector z = dec.O().fullPivLu().solve(a);
  EXPECT_NEAR(z.norm(), 5.0, 1e-12);
  const Vector x0 = (Vector(2) << 1, 1).finished();
  const DecodeResult r = dec.decode(dec.O() * x0 + a);
  EXPECT_TRUE(r.support.empty());
  EXPECT_LT((r.error_against(x0) - z).norm(), 1e-12);
  EXPECT_EQ(single_step_attack(ex, SensorSet::all(1), 0.0).norm(), 0.0);
}

TEST(SingleStep, VtfLargeErrorThroughNoise) {
  const SystemModel vtf = testsys::vtf();
  const Decoder dec(vtf);
  const auto noise = NoiseRealization::generate(vtf, vtf_noise(4), 2);
  const Vector x0 = (Vector(2) << 2, -1).finished();
  const Vector y = dec.O() * x0 + noise.window_noise(vtf, 0) + single_step_attack(vtf, SensorSet::all(3), 50.0);
  const DecodeResult r = dec.decode(y);
  EXPECT_TRUE(r.support.empty());
  EXPECT_GE(r.error_against(x0).norm(), 50.0 - kNoAttackBound);
}

TEST(SingleStep, RefusesWhenNotAttackable) {
  try {
    single_step_attack(testsys::vtf(), SensorSet(3, {1, 2}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAttackable);
  }
}

TEST(Sustained, RefusesStableFullRankForDetectorOne) {
  SustainedOptions o;
  o.detector = DetectorKind::I;
  o.horizon = 100;
  EXPECT_THROW(sustained_attack(testsys::example1(3, 0.0), SensorSet::all(1), o), Error);
  o.detector = DetectorKind::II;
  EXPECT_THROW(sustained_attack(testsys::example1(2, 0.0), SensorSet::all(1), o), Error);
}

TEST(Sustained, RefusesWithoutNoiseKnowledge) {
  SustainedOptions o;
  o.horizon = 100;
  o.omniscient = false;
  try {
    sustained_attack(testsys::vtf(), SensorSet::all(3), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAttackable);
  }
}

TEST(Sustained, ExampleTwoColdStartIsStealthyAndScalesWithEta) {
  const SystemModel ex = testsys::example1(2, 0.0);
  for (double eta : {10.0, 100.0, 1000.0}) {
    SustainedOptions o;
    o.detector = DetectorKind::I;
    o.start_time = 5;
    o.horizon = 60;
    o.eta = eta;
    const AttackPlan plan = sustained_attack(ex, SensorSet::all(1), o);
    EXPECT_EQ(plan.method, "cold_start");
    // z starts at eta [0, 1].
    ASSERT_FALSE(plan.z.empty());
    EXPECT_LT((plan.z.front() - eta * (Vector(2) << 0, 1).finished()).norm(), 1e-9 * eta);
    ClosedLoopSpec spec;
    spec.horizon = 60;
    spec.attack = &plan;
    spec.compromised = SensorSet::all(1);
    const SimTrace tr = run_closed_loop(ex, spec);
    EXPECT_EQ(tr.id1_alarms(), 0);
    EXPECT_GE(tr.max_error(), eta * (1 - 1e-9));
    // The window whose last entry is the first injection decodes to z.
    EXPECT_NEAR(tr.err_norm[4], eta, 1e-9 * eta);
  }
}

TEST(Sustained, AlphaInNullSpaceOfF) {
  const SystemModel ex = testsys::example1(2, 0.0);
  const AttackPlan plan = cold_start_attack(ex, SensorSet::all(1), 0, 20, 1.0, 0.5);
  const Matrix F = build_F(ex, SensorSet::all(1));
  for (const Vector& a : plan.alpha) EXPECT_LT((F * a).norm(), 1e-12);
  // z(t+1) = A z(t) + alpha(t).
  for (std::size_t k = 0; k + 1 < plan.z.size(); ++k)
    EXPECT_LT((plan.z[k + 1] - ex.A() * plan.z[k] - plan.alpha[k]).norm(), 1e-12);
}

TEST(Sustained, VtfPlanIsStealthyAndUnbounded) {
  const VtfRun r = run_vtf(1, 6000, 2000, AuthPolicy::none(3));
  EXPECT_EQ(r.plan.method, "slack_ramp");
  EXPECT_EQ(r.trace.id1_alarms(), 0);
  EXPECT_EQ(r.trace.id2_alarms(), 0);
  EXPECT_TRUE(r.trace.auth_violation_times.empty());
  for (double M : {10.0, 100.0, 1000.0}) EXPECT_GT(r.trace.max_error(), M);
  const double d = prop1_threshold(testsys::vtf());
  for (double innov : r.trace.innovation) EXPECT_LE(innov, d);
}

TEST(Sustained, ErrorLawAndStackedConsistencyAfterRamp) {
  const SystemModel m = testsys::vtf();
  const VtfRun r = run_vtf(2, 3000, 500, AuthPolicy::none(3), 300);
  const Matrix O = build_O(m, SensorSet::all(3));
  const double bound = pinv_norm(O) * 2 * std::sqrt(2.0) * m.delta_w();
  const long sustained = 500 + 300 + m.N();
  ASSERT_EQ(static_cast<long>(r.plan.z.size()), r.plan.length());
  for (long t = sustained; t < 3000; ++t) {
    const Vector& f = r.plan.z[static_cast<std::size_t>(t - r.plan.start_time)];
    const Vector e = r.trace.xhat.col(t) - r.trace.x.col(t);
    EXPECT_LE((e - f).norm(), bound * (1 + 1e-9)) << t;
    // Stacked window of the plan equals O f(t).
    Vector a(6);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 2; ++k) a[i * 2 + k] = r.plan.at(t + k)[i];
    EXPECT_LE((a - O * f).norm(), 1e-12 * std::max(1.0, f.norm())) << t;
  }
  // Overlapping entries of consecutive windows are the same samples.
  for (long t = sustained; t + 2 < 3000; ++t) {
    const Vector& f0 = r.plan.z[static_cast<std::size_t>(t - r.plan.start_time)];
    const Vector& f1 = r.plan.z[static_cast<std::size_t>(t + 1 - r.plan.start_time)];
    EXPECT_LE((m.C() * m.A() * f0 - m.C() * f1).norm(), 1e-12 * std::max(1.0, f1.norm()));
  }
}

TEST(Sustained, PlanRespectsAuthenticationTimes) {
  const AuthPolicy pol = AuthPolicy::periodic(3, SensorSet(3, {0, 1}), 10, 0);
  const VtfRun r = run_vtf(3, 3000, 1000, pol);
  EXPECT_EQ(r.plan.method, "slack_bumps");
  for (long t = r.plan.start_time; t < r.plan.end_time(); ++t)
    for (int i : pol.authenticated_at(t)) EXPECT_EQ(r.plan.at(t)[i], 0.0) << t;
  EXPECT_TRUE(r.trace.auth_violation_times.empty());
  EXPECT_EQ(r.trace.id2_alarms(), 0);
  EXPECT_GT(r.trace.max_error(), 2 * kNoAttackBound);
}

TEST(Example3, SingleInjectionReproducesErrors) {
  const SystemModel ex = testsys::example1(2, 0.0);
  for (double s : {0.0, 1.0, 100.0}) {
    const AttackPlan plan = example3_attack(ex, s);
    ClosedLoopSpec spec;
    spec.horizon = 10;
    spec.attack = &plan;
    spec.compromised = SensorSet::all(1);
    spec.x0 = (Vector(2) << .5, -.25).finished();
    const SimTrace tr = run_closed_loop(ex, spec);
    const Vector e0 = tr.xhat.col(0) - tr.x.col(0);
    const Vector e1 = tr.xhat.col(1) - tr.x.col(1);
    EXPECT_LT((e0 - (Vector(2) << 0, s).finished()).norm(), 1e-9);
    EXPECT_LT((e1 - (Vector(2) << s, -.3 * s).finished()).norm(), 1e-9);
    EXPECT_EQ(tr.support[0], 0u);
    EXPECT_EQ(tr.support[1], 0u);
    EXPECT_NEAR(e1.norm(), std::abs(s) * std::sqrt(1.09), 1e-9 * (1 + std::abs(s)));
  }
  EXPECT_THROW(example3_attack(testsys::example1(3, 0.0), 1.0), Error);
  EXPECT_THROW(example3_attack(testsys::vtf(), 1.0), Error);
}

TEST(StealthSlack, Formula) {
  const SlackBound a = stealth_slack(0.0, .1, 4);
  EXPECT_NEAR(a.epsilon, .2, 1e-15);
  EXPECT_FALSE(a.gamma_construction);
  const SlackBound b = stealth_slack(.2, .1, 4);
  EXPECT_TRUE(b.gamma_construction);
  EXPECT_EQ(b.gamma, -1.0);
  EXPECT_NEAR(b.epsilon, .2, 1e-15);
  EXPECT_EQ(stealth_slack(0.0, 0.0, 3).epsilon, 0.0);
  const SystemModel vtf = testsys::vtf();
  const auto noise = NoiseRealization::generate(vtf, vtf_noise(8), 40);
  for (long t = 0; t + 2 <= 40; ++t) {
    const double wn = noise.window_noise(vtf, t).norm();
    EXPECT_NEAR(stealth_slack(wn, vtf.delta_w(), 2).epsilon, std::sqrt(2.0) * vtf.delta_w() - wn, 1e-15);
  }
}

TEST(AttackPlanCsv, RoundTripAndSparseRows) {
  AttackPlan plan;
  plan.start_time = 3;
  plan.values = (Matrix(2, 3) << 0, 1.5, 0, 0, -2e-7, 0).finished();
  std::ostringstream os;
  plan.write_csv(os);
  std::istringstream is(os.str());
  const AttackPlan back = AttackPlan::read_csv(is, 2);
  EXPECT_EQ(back.start_time, 3);
  EXPECT_EQ(back.values, plan.values);
  EXPECT_EQ(back.compromised, SensorSet(2, {0, 1}));
  std::istringstream sparse("t,a_1,a_2\n10,0,4\n2,0,1\n");
  const AttackPlan s = AttackPlan::read_csv(sparse, 2);
  EXPECT_EQ(s.start_time, 2);
  EXPECT_EQ(s.length(), 9);
  EXPECT_EQ(s.at(10)[1], 4.0);
  EXPECT_EQ(s.at(5).norm(), 0.0);
  EXPECT_EQ(s.compromised, SensorSet(2, {1}));
  std::istringstream bad("t,a_1\n1,2\n");
  EXPECT_THROW(AttackPlan::read_csv(bad, 2), Error);
}
