#include "rselab/slack_planner.hpp"

#include <cmath>

#include "rselab/error.hpp"

namespace rselab {

SlackPlanner::SlackPlanner(const SystemModel& model, const DecoderOptions& decoder, const NoiseRealization& noise,
                           const SensorSet& compromised, const AuthPolicy& policy, double threshold_d,
                           Options options)
    : model_(model),
      decoder_(model, decoder),
      noise_(noise),
      compromised_(compromised),
      policy_(policy.sensors() == model.p() ? policy : AuthPolicy::none(model.p())),
      d_(threshold_d >= 0.0 ? threshold_d : prop1_threshold(model)),
      opt_(options) {
  O_ = decoder_.O();
  Opinv_ = pinv(O_, 1e-12);
  resid_ = Matrix::Identity(O_.rows(), O_.rows()) - O_ * Opinv_;
  steps_ = noise.steps();
  const int N = model.N();
  const long windows = std::max(0L, steps_ - N + 1);
  w_.resize(static_cast<std::size_t>(windows));
  dec_w_.resize(static_cast<std::size_t>(windows));
  for (long t = 0; t < windows; ++t) {
    w_[static_cast<std::size_t>(t)] = noise.window_noise(model, t);
    dec_w_[static_cast<std::size_t>(t)] = decoder_.decode(w_[static_cast<std::size_t>(t)]).x_hat;
  }
  fake_.assign(static_cast<std::size_t>(steps_ + 1), Vector::Zero(model.n()));
  push_.assign(static_cast<std::size_t>(steps_ + 1), Vector::Zero(model.n()));
  pushed_.assign(static_cast<std::size_t>(steps_ + 1), 0);
}

Vector SlackPlanner::attack_at(long t) const {
  const Vector y = model_.C() * fake_[static_cast<std::size_t>(t)];
  const SensorSet auth = policy_.authenticated_at(t);
  Vector a = Vector::Zero(model_.p());
  for (int i : compromised_) {
    if (!auth.contains(i)) a[i] = y[i];
  }
  return a;
}

bool SlackPlanner::pure(long t) const {
  const int N = model_.N();
  for (int j = 0; j + 1 < N; ++j) {
    if (pushed_[static_cast<std::size_t>(t + j)]) return false;
  }
  for (int k = 0; k < N; ++k) {
    const long s = t + k;
    if (fake_[static_cast<std::size_t>(s)].isZero(0.0)) continue;
    if (!policy_.authenticated_at(s).intersect(compromised_).empty()) return false;
  }
  return true;
}

bool SlackPlanner::error_at(long t, Vector& e) const {
  const std::size_t ts = static_cast<std::size_t>(t);
  if (pure(t)) {
    e = fake_[ts] + dec_w_[ts];
    return true;
  }
  const int N = model_.N();
  Vector a(model_.p() * N);
  for (int k = 0; k < N; ++k) {
    const Vector ak = attack_at(t + k);
    for (int i = 0; i < model_.p(); ++i) a[i * N + k] = ak[i];
  }
  const Vector v = w_[ts] + a - O_ * fake_[ts];
  const Vector r = resid_ * v;
  NoiseFeasibleSet om = decoder_.omega();
  om.delta_w *= 1.0 - opt_.margin;
  if (!om.contains(r, model_.p())) return false;
  e = fake_[ts] + Opinv_ * v;
  return true;
}

bool SlackPlanner::windows_ok(long first, long last) const {
  const long lo = std::max(first, 0L);
  const long hi = std::min(last, static_cast<long>(w_.size()) - 1);
  Vector e_prev, e;
  bool have_prev = false;
  for (long t = lo; t <= hi; ++t) {
    if (!error_at(t, e)) return false;
    if (opt_.check_innovation && t >= 1) {
      const bool trivial = pure(t) && pure(t - 1) && !pushed_[static_cast<std::size_t>(t - 1)];
      if (!trivial) {
        if (!have_prev && !error_at(t - 1, e_prev)) return false;
        const Vector innov = noise_.process.col(t - 1) + e - model_.A() * e_prev;
        if (innov.norm() > d_ * (1.0 - opt_.margin)) return false;
      }
    }
    e_prev = e;
    have_prev = true;
  }
  return true;
}

void SlackPlanner::propagate(long from, long to) {
  for (long t = std::max(from, 1L); t <= std::min(to, steps_); ++t) {
    const std::size_t ts = static_cast<std::size_t>(t);
    fake_[ts] = model_.A() * fake_[ts - 1] + push_[ts - 1];
  }
}

long SlackPlanner::next_auth(long t) const {
  long best = -1;
  for (int i : compromised_) {
    const long s = policy_.schedule(i).next_at_or_after(t);
    if (s >= 0 && (best < 0 || s < best)) best = s;
  }
  return best;
}

void SlackPlanner::plan_ramp(const Vector& h, long start, long end) {
  const int N = model_.N();
  const long stop = std::min(end, start + opt_.ramp_steps);
  for (long tau = std::max(start, 1L); tau < stop && tau <= steps_; ++tau) {
    const std::size_t prev = static_cast<std::size_t>(tau - 1);
    double s = opt_.cap;
    bool accepted = false;
    for (int k = 0; k < opt_.levels; ++k, s *= opt_.level_ratio) {
      push_[prev] = s * h;
      pushed_[prev] = 1;
      propagate(tau, tau + N + 2);
      if (windows_ok(tau - N + 1, tau + 1)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      push_[prev].setZero();
      pushed_[prev] = 0;
      propagate(tau, tau + N + 2);
    }
  }
}

void SlackPlanner::plan_bumps(const Vector& h, long start, long end) {
  const int N = model_.N();
  long ta = std::max(start, 1L) - 1;
  while (ta < end - 1) {
    long tb = next_auth(ta + 1);
    if (tb < 0) {
      plan_ramp(h, ta + 1, end);
      return;
    }
    tb = std::min(tb, steps_);
    const long R = tb - ta;
    if (R >= 2) {
      const long out = R / 2;
      const long back = R - out;
      const long b = ta + out;
      double c = opt_.cap;
      bool accepted = false;
      for (int k = 0; k < opt_.levels && !accepted; ++k, c *= opt_.level_ratio) {
        for (long j = 0; j < out; ++j) {
          push_[static_cast<std::size_t>(ta + j)] = c * h;
          pushed_[static_cast<std::size_t>(ta + j)] = 1;
        }
        propagate(ta + 1, b);
        const Vector zb = fake_[static_cast<std::size_t>(b)];
        Matrix Aj = model_.A();
        for (long j = 0; j < back; ++j) {
          push_[static_cast<std::size_t>(b + j)] = -(Aj * zb) / static_cast<double>(back);
          pushed_[static_cast<std::size_t>(b + j)] = 1;
          Aj = model_.A() * Aj;
        }
        propagate(b + 1, tb - 1);
        push_[static_cast<std::size_t>(tb - 1)] = -(model_.A() * fake_[static_cast<std::size_t>(tb - 1)]);
        propagate(tb, tb + N + 2);
        accepted = windows_ok(ta - N + 1, tb + 1);
      }
      if (!accepted) {
        for (long j = ta; j < tb; ++j) {
          push_[static_cast<std::size_t>(j)].setZero();
          pushed_[static_cast<std::size_t>(j)] = 0;
        }
        propagate(ta + 1, tb + N + 2);
      }
    }
    ta = tb;
  }
}

AttackPlan SlackPlanner::plan(const Vector& direction, long start, long end) {
  if (direction.size() != model_.n() || direction.norm() == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "planner direction must be a nonzero n-vector");
  }
  end = std::min(end, steps_);
  start = std::max(start, 1L);
  if (start >= end) throw Error(ErrorCode::Config, "attack start lies beyond the horizon");
  const Vector h = direction.normalized();
  for (auto& v : fake_) v.setZero();
  for (auto& v : push_) v.setZero();
  std::fill(pushed_.begin(), pushed_.end(), 0);

  if (policy_.any_on(compromised_)) {
    plan_bumps(h, start, end);
  } else {
    plan_ramp(h, start, end);
  }
  propagate(start, steps_);

  AttackPlan plan;
  plan.start_time = start;
  plan.compromised = compromised_;
  plan.values.resize(model_.p(), end - start);
  for (long t = start; t < end; ++t) {
    plan.values.col(t - start) = attack_at(t);
    plan.z.push_back(fake_[static_cast<std::size_t>(t)]);
    plan.alpha.push_back(push_[static_cast<std::size_t>(t)]);
  }
  const int N = model_.N();
  const long first = std::max(0L, start - N + 1);
  double eps = 0.0;
  for (long t = first; t < first + N && t < end; ++t) eps += attack_at(t).squaredNorm();
  plan.epsilon = std::sqrt(eps);
  return plan;
}

}  // namespace rselab
