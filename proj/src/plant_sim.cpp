#include "rselab/plant_sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "rselab/csv.hpp"
#include "rselab/error.hpp"

namespace rselab {

StepResult step(const SystemModel& model, const Vector& x, const Vector& u, const Vector& v_process,
                const Vector& v_measurement) {
  if (x.size() != model.n() || v_process.size() != model.n() || v_measurement.size() != model.p()) {
    throw Error(ErrorCode::DimensionMismatch, "state or noise dimension mismatch");
  }
  if (u.size() != model.m()) throw Error(ErrorCode::DimensionMismatch, "input dimension mismatch");
  StepResult r;
  r.next_state = model.A() * x + v_process;
  if (model.m() > 0) r.next_state += model.B() * u;
  r.output = model.C() * x + v_measurement;
  return r;
}

StepResult step(const SystemModel& model, const Vector& x, const Vector& u, NoiseStream& noise) {
  const Vector vp = noise.next_process();
  const Vector vm = noise.next_measurement();
  return step(model, x, u, vp, vm);
}

AttackOutcome apply_attack(const Vector& y, const Vector& a, const SensorSet& compromised,
                           const SensorSet& authenticated_now) {
  if (y.size() != a.size() || y.size() != compromised.universe()) {
    throw Error(ErrorCode::DimensionMismatch, "attack vector length must equal the sensor count");
  }
  AttackOutcome out;
  out.applied = a;
  std::vector<int> bad;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (a[i] == 0.0) continue;
    if (!compromised.contains(i)) {
      throw Error(ErrorCode::InvalidArgument, "attack on uncompromised sensor " + std::to_string(i + 1));
    }
    if (authenticated_now.contains(i)) {
      bad.push_back(i);
      out.applied[i] = 0.0;
    }
  }
  out.violations = SensorSet(static_cast<int>(y.size()), std::move(bad));
  out.delivered = y + out.applied;
  return out;
}

Vector Reference::at(long t, int n) const {
  switch (kind) {
    case Kind::None:
      return Vector::Zero(n);
    case Kind::Constant:
      if (value.size() != n) throw Error(ErrorCode::Config, "constant reference has the wrong dimension");
      return value;
    case Kind::Circle: {
      if (n != 2) throw Error(ErrorCode::Config, "circle reference needs a position/velocity state");
      const double th = angular_rate * static_cast<double>(t) * sampling_period + phase;
      Vector r(2);
      r << radius * std::cos(th), -radius * angular_rate * std::sin(th);
      return r;
    }
  }
  return Vector::Zero(n);
}

double SimTrace::max_error() const {
  double m = 0.0;
  for (double e : err_norm) m = std::max(m, e);
  return m;
}

double SimTrace::mean_error() const {
  if (err_norm.empty()) return 0.0;
  double s = 0.0;
  for (double e : err_norm) s += e;
  return s / static_cast<double>(err_norm.size());
}

long SimTrace::id1_alarms() const {
  long c = 0;
  for (auto v : alarm_id1) c += v ? 1 : 0;
  return c;
}

long SimTrace::id2_alarms() const {
  long c = 0;
  for (auto v : alarm_id2) c += v ? 1 : 0;
  return c;
}

long SimTrace::hierarchy_violations() const {
  long c = 0;
  for (std::size_t t = 0; t < alarm_id1.size(); ++t) c += (alarm_id1[t] && !alarm_id2[t]) ? 1 : 0;
  return c;
}

double SimTrace::auth_fraction() const {
  if (auth_mask.empty() || p == 0) return 0.0;
  long bits = 0;
  for (auto m_ : auth_mask) bits += __builtin_popcountll(m_);
  return static_cast<double>(bits) / (static_cast<double>(auth_mask.size()) * p);
}

double SimTrace::indeterminate_rate() const {
  return stats.decodes ? static_cast<double>(stats.indeterminate) / static_cast<double>(stats.decodes) : 0.0;
}

void SimTrace::write_csv(std::ostream& os) const {
  os << 't';
  for (int i = 1; i <= n; ++i) os << ",x_" << i;
  for (int i = 1; i <= n; ++i) os << ",xhat_" << i;
  os << ",err_norm";
  for (int i = 1; i <= p; ++i) os << ",a_" << i;
  os << ",alarm_id1,alarm_id2,auth_flags\n";
  for (long t = 0; t < horizon; ++t) {
    os << t;
    for (int i = 0; i < n; ++i) os << ',' << csv::format(x(i, t));
    for (int i = 0; i < n; ++i) os << ',' << csv::format(xhat(i, t));
    os << ',' << csv::format(err_norm[static_cast<std::size_t>(t)]);
    for (int i = 0; i < p; ++i) os << ',' << csv::format(a(i, t));
    os << ',' << int(alarm_id1[static_cast<std::size_t>(t)]) << ',' << int(alarm_id2[static_cast<std::size_t>(t)])
       << ',' << auth_mask[static_cast<std::size_t>(t)] << '\n';
  }
}

SimTrace run_closed_loop(const SystemModel& model, const ClosedLoopSpec& spec) {
  const int n = model.n(), m = model.m(), p = model.p(), N = model.N();
  const long H = spec.horizon;
  if (H < N) throw Error(ErrorCode::Config, "horizon must be at least the window length");
  const bool closed = spec.gain.size() > 0;
  if (closed && (spec.gain.rows() != m || spec.gain.cols() != n)) {
    throw Error(ErrorCode::DimensionMismatch, "controller gain must be m x n");
  }
  const SensorSet K = spec.compromised.universe() == p ? spec.compromised : SensorSet::none(p);
  const AuthPolicy policy = spec.policy.sensors() == p ? spec.policy : AuthPolicy::none(p);
  if (spec.attack && spec.attack->length() > 0 && spec.attack->p() != p) {
    throw Error(ErrorCode::DimensionMismatch, "attack plan has the wrong sensor count");
  }

  const long T = H + N - 1;
  NoiseRealization drawn;
  const NoiseRealization* noise = spec.realization;
  if (!noise) {
    drawn = NoiseRealization::generate(model, spec.noise, T);
    noise = &drawn;
  }
  if (noise->steps() < T) throw Error(ErrorCode::Config, "noise realization shorter than the run");

  const Decoder decoder(model, spec.decoder);
  SimTrace tr;
  tr.n = n;
  tr.m = m;
  tr.p = p;
  tr.horizon = H;
  tr.threshold_d = spec.threshold_d >= 0.0 ? spec.threshold_d : prop1_threshold(model);
  tr.attack_free_bound = pinv_norm(decoder.O()) * 2.0 * std::sqrt(static_cast<double>(N)) * model.delta_w();
  tr.x = Matrix::Zero(n, H);
  tr.xhat = Matrix::Zero(n, H);
  tr.y = Matrix::Zero(p, H);
  tr.yc = Matrix::Zero(p, H);
  tr.a = Matrix::Zero(p, H);
  tr.u = Matrix::Zero(m, H);
  tr.err_norm.assign(static_cast<std::size_t>(H), 0.0);
  tr.innovation.assign(static_cast<std::size_t>(H), 0.0);
  tr.support.assign(static_cast<std::size_t>(H), 0);
  tr.auth_mask.assign(static_cast<std::size_t>(H), 0);
  tr.alarm_id1.assign(static_cast<std::size_t>(H), 0);
  tr.alarm_id2.assign(static_cast<std::size_t>(H), 0);
  tr.attacked_window.assign(static_cast<std::size_t>(H), 0);

  Matrix X(n, T), YC(p, T), U = Matrix::Zero(m, T);
  std::vector<std::uint8_t> attacked(static_cast<std::size_t>(T), 0);
  Vector x = spec.x0.size() == n ? spec.x0 : Vector::Zero(n);

  Matrix AN1 = model.power(N - 1);
  Matrix Bpinv = m > 0 ? pinv(model.B()) : Matrix();
  DecodeResult prev;
  bool have_prev = false;
  const Vector zero_u = Vector::Zero(m);

  for (long tau = 0; tau < T; ++tau) {
    X.col(tau) = x;
    const Vector y = model.C() * x + noise->measurement.col(tau);
    const Vector req = spec.attack ? spec.attack->at(tau) : Vector::Zero(p);
    const SensorSet auth_now = policy.authenticated_at(tau);
    const AttackOutcome out = apply_attack(y, req.size() == p ? req : Vector::Zero(p), K, auth_now);
    YC.col(tau) = out.delivered;
    attacked[static_cast<std::size_t>(tau)] = out.applied.cwiseAbs().maxCoeff() > 0.0;
    if (tau < H) {
      tr.x.col(tau) = x;
      tr.y.col(tau) = y;
      tr.yc.col(tau) = out.delivered;
      tr.a.col(tau) = out.applied;
      tr.auth_mask[static_cast<std::size_t>(tau)] = auth_now.mask();
    }
    if (out.violated()) tr.auth_violation_times.push_back(tau);

    const Vector r_now = spec.reference.at(tau, n);
    Vector u = zero_u;
    if (m > 0 && spec.reference.kind != Reference::Kind::None) {
      u = Bpinv * (spec.reference.at(tau + 1, n) - model.A() * r_now);
    }

    if (tau >= N - 1) {
      const long t = tau - N + 1;
      Vector yw(p * N);
      Vector forced = Vector::Zero(n);
      bool any_attack = false;
      for (int k = 0; k < N; ++k) {
        const Vector row = YC.col(t + k) - model.C() * forced;
        for (int i = 0; i < p; ++i) yw[i * N + k] = row[i];
        if (m > 0) forced = model.A() * forced + model.B() * U.col(t + k);
        else forced = model.A() * forced;
        any_attack = any_attack || attacked[static_cast<std::size_t>(t + k)];
      }
      const DecodeResult dec = decoder.decode(yw, &tr.stats);
      const Vector drift = (have_prev && m > 0) ? Vector(model.B() * U.col(t - 1)) : Vector();
      const AlarmVerdict av = id2(dec, have_prev ? &prev : nullptr, model, tr.threshold_d, drift);
      const std::size_t ts = static_cast<std::size_t>(t);
      tr.xhat.col(t) = dec.x_hat;
      tr.err_norm[ts] = (dec.x_hat - X.col(t)).norm();
      tr.innovation[ts] = av.id2_innovation;
      tr.support[ts] = dec.support.mask();
      tr.alarm_id1[ts] = av.id1_alarm;
      tr.alarm_id2[ts] = av.id2_alarm;
      tr.attacked_window[ts] = any_attack;
      if (!any_attack && tr.err_norm[ts] > tr.attack_free_bound * (1.0 + 1e-9) + 1e-12) ++tr.bound_violations;
      prev = dec;
      have_prev = true;

      if (closed) {
        Vector pred = AN1 * dec.x_hat;
        Vector fwd = Vector::Zero(n);
        for (int j = 0; j + 1 < N; ++j) fwd = model.A() * fwd + model.B() * U.col(t + j);
        pred += fwd;
        u += spec.gain * (pred - r_now);
      }
    }
    U.col(tau) = u;
    if (tau < H) tr.u.col(tau) = u;
    x = model.A() * x + noise->process.col(tau);
    if (m > 0) x += model.B() * u;
  }
  return tr;
}

}  // namespace rselab
