#include <algorithm>
#include <cmath>

#include "rselab/error.hpp"
#include "rselab/plant_sim.hpp"

namespace rselab {

namespace {

constexpr std::uint64_t kMeasurementStream = 0x9E3779B97F4A7C15ull;

}  // namespace

NoiseSpec NoiseSpec::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw Error(ErrorCode::Config, "uniform noise needs lo <= hi");
  NoiseSpec s;
  s.kind = Kind::UniformElementwise;
  s.lo = lo;
  s.hi = hi;
  return s;
}

NoiseSpec NoiseSpec::ball(double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::Config, "ball noise needs radius >= 0");
  NoiseSpec s;
  s.kind = Kind::Ball;
  s.radius = radius;
  return s;
}

double NoiseSpec::bound(int dim) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::UniformElementwise:
      return std::sqrt(static_cast<double>(dim)) * std::max(std::abs(lo), std::abs(hi));
    case Kind::Ball:
      return radius;
  }
  return 0.0;
}

NoiseStream::NoiseStream(const NoiseConfig& config, int n, int p)
    : config_(config), n_(n), p_(p), process_rng_(config.seed), measurement_rng_(config.seed ^ kMeasurementStream) {}

Vector NoiseStream::draw(const NoiseSpec& spec, int dim, std::mt19937_64& rng) {
  Vector v = Vector::Zero(dim);
  switch (spec.kind) {
    case NoiseSpec::Kind::Zero:
      break;
    case NoiseSpec::Kind::UniformElementwise: {
      std::uniform_real_distribution<double> d(spec.lo, spec.hi);
      for (int i = 0; i < dim; ++i) v[i] = spec.lo == spec.hi ? spec.lo : d(rng);
      break;
    }
    case NoiseSpec::Kind::Ball: {
      std::normal_distribution<double> g(0.0, 1.0);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < dim; ++i) v[i] = g(rng);
      const double nrm = v.norm();
      const double r = spec.radius * std::pow(u(rng), 1.0 / std::max(dim, 1));
      if (nrm > 0.0) v *= r / nrm;
      if (v.norm() > spec.radius) v *= spec.radius / v.norm();
      break;
    }
  }
  return v;
}

Vector NoiseStream::next_process() { return draw(config_.process, n_, process_rng_); }
Vector NoiseStream::next_measurement() { return draw(config_.measurement, p_, measurement_rng_); }

NoiseRealization NoiseRealization::generate(const SystemModel& model, const NoiseConfig& config, long steps) {
  NoiseStream s(config, model.n(), model.p());
  NoiseRealization r;
  r.process.resize(model.n(), steps);
  r.measurement.resize(model.p(), steps);
  for (long t = 0; t < steps; ++t) {
    r.process.col(t) = s.next_process();
    r.measurement.col(t) = s.next_measurement();
  }
  return r;
}

Vector NoiseRealization::window_noise(const SystemModel& model, long t) const {
  const int N = model.N();
  if (t < 0 || t + N > steps()) throw Error(ErrorCode::InvalidArgument, "window outside the noise realization");
  Vector w(model.p() * N);
  Vector forced = Vector::Zero(model.n());
  for (int k = 0; k < N; ++k) {
    const Vector yk = measurement.col(t + k) + model.C() * forced;
    for (int i = 0; i < model.p(); ++i) w[i * N + k] = yk[i];
    forced = model.A() * forced + process.col(t + k);
  }
  return w;
}

}  // namespace rselab
