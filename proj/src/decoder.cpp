#include "rselab/decoder.hpp"

#include <cmath>
#include <limits>

#include "rselab/error.hpp"

namespace rselab {

const char* to_string(OmegaMode mode) {
  return mode == OmegaMode::PerStepBall ? "per_step_ball" : "stacked_ball";
}

OmegaMode omega_mode_from_string(const std::string& name) {
  if (name == "per_step_ball") return OmegaMode::PerStepBall;
  if (name == "stacked_ball") return OmegaMode::StackedBall;
  throw Error(ErrorCode::Config, "unknown omega mode '" + name + "'");
}

Vector NoiseFeasibleSet::project(const Vector& w, int clean_count) const {
  Vector out = w;
  if (mode == OmegaMode::StackedBall) {
    const double r = std::sqrt(static_cast<double>(N)) * delta_w;
    const double nrm = out.norm();
    if (nrm > r) out *= (r > 0.0 ? r / nrm : 0.0);
    return out;
  }
  for (int k = 0; k < N; ++k) {
    double sq = 0.0;
    for (int i = 0; i < clean_count; ++i) sq += out[i * N + k] * out[i * N + k];
    const double nrm = std::sqrt(sq);
    if (nrm > delta_w) {
      const double f = delta_w > 0.0 ? delta_w / nrm : 0.0;
      for (int i = 0; i < clean_count; ++i) out[i * N + k] *= f;
    }
  }
  return out;
}

bool NoiseFeasibleSet::contains(const Vector& w, int clean_count, double slack) const {
  if (mode == OmegaMode::StackedBall) {
    return w.norm() <= std::sqrt(static_cast<double>(N)) * delta_w + slack;
  }
  for (int k = 0; k < N; ++k) {
    double sq = 0.0;
    for (int i = 0; i < clean_count; ++i) sq += w[i * N + k] * w[i * N + k];
    if (std::sqrt(sq) > delta_w + slack) return false;
  }
  return true;
}

DecodeStats& DecodeStats::operator+=(const DecodeStats& o) {
  decodes += o.decodes;
  supports_tested += o.supports_tested;
  oracle_iterations += o.oracle_iterations;
  indeterminate += o.indeterminate;
  return *this;
}

Decoder::Decoder(const SystemModel& model, DecoderOptions options)
    : model_(model), options_(options), O_(build_O(model, model.all_sensors())) {
  if (model.p() > options_.max_sensors) {
    throw Error(ErrorCode::Config, "sensor count exceeds the decoder cap of " +
                                       std::to_string(options_.max_sensors));
  }
  if (options_.eps_feas <= 0.0 || options_.max_iter < 1) {
    throw Error(ErrorCode::Config, "eps_feas must be > 0 and max_iter >= 1");
  }
  if (model.p() <= options_.cache_sensors) {
    const std::uint64_t count = std::uint64_t{1} << model.p();
    cache_.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      cache_.push_back(make_subset(SensorSet::from_mask(model.p(), mask)));
    }
    for (int card = 0; card <= model.p(); ++card) {
      for (auto& s : subsets_of_size(model.p(), card)) order_.push_back(std::move(s));
    }
  }
}

NoiseFeasibleSet Decoder::omega() const {
  return NoiseFeasibleSet{options_.mode, model_.delta_w(), model_.N(), options_.eps_feas};
}

double Decoder::eq_tol(const Vector& y) const { return options_.eq_tol_rel * (1.0 + y.norm()); }

std::vector<int> Decoder::rows_of(const SensorSet& subset) const {
  std::vector<int> rows;
  rows.reserve(static_cast<std::size_t>(subset.size()) * static_cast<std::size_t>(model_.N()));
  for (int i : subset)
    for (int k = 0; k < model_.N(); ++k) rows.push_back(i * model_.N() + k);
  return rows;
}

Decoder::SubsetSystem Decoder::make_subset(const SensorSet& clean) const {
  SubsetSystem s;
  const auto rows = rows_of(clean);
  s.O.resize(static_cast<Eigen::Index>(rows.size()), model_.n());
  for (std::size_t r = 0; r < rows.size(); ++r) s.O.row(static_cast<Eigen::Index>(r)) = O_.row(rows[r]);
  s.Opinv = pinv(s.O, 1e-12);
  return s;
}

const Decoder::SubsetSystem& Decoder::subset(const SensorSet& clean, SubsetSystem& scratch) const {
  if (!cache_.empty()) return cache_[clean.mask()];
  scratch = make_subset(clean);
  return scratch;
}

OracleResult Decoder::feasibility(const SensorSet& clean, const Vector& y) const {
  if (y.size() != O_.rows()) throw Error(ErrorCode::DimensionMismatch, "window length must be p*N");
  OracleResult res;
  if (clean.empty()) {
    res.verdict = Feasibility::Feasible;
    res.x_hat = Vector::Zero(model_.n());
    res.w_hat = Vector();
    return res;
  }
  SubsetSystem scratch;
  const SubsetSystem& sys = subset(clean, scratch);
  const auto rows = rows_of(clean);
  Vector yc(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) yc[static_cast<Eigen::Index>(r)] = y[rows[r]];

  const NoiseFeasibleSet om = omega();
  const int cc = clean.size();
  const double eps = options_.eps_feas;
  Vector x = sys.Opinv * yc;
  Vector w;
  double dist = 0.0;
  double checkpoint = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < options_.max_iter; ++it) {
    const Vector r = yc - sys.O * x;
    w = om.project(r, cc);
    dist = (r - w).norm();
    if (dist < eps) {
      res.verdict = Feasibility::Feasible;
      res.x_hat = x;
      res.w_hat = w;
      res.distance = dist;
      res.iterations = it + 1;
      return res;
    }
    if (it % 200 == 199) {
      if (dist > 10.0 * eps && checkpoint - dist < 1e-7 * dist) break;
      checkpoint = dist;
    }
    x = sys.Opinv * (yc - w);
  }
  res.x_hat = x;
  res.w_hat = w;
  res.distance = dist;
  res.iterations = std::min(it + 1, options_.max_iter);
  res.verdict = dist < 10.0 * eps ? Feasibility::Indeterminate : Feasibility::Infeasible;
  return res;
}

DecodeResult Decoder::decode(const Vector& y, DecodeStats* stats) const {
  if (y.size() != O_.rows()) throw Error(ErrorCode::DimensionMismatch, "window length must be p*N");
  const int p = model_.p();
  DecodeStats local;
  local.decodes = 1;
  const auto consider = [&](const SensorSet& gamma, DecodeResult& res) {
    const SensorSet clean = gamma.complement();
    const OracleResult o = feasibility(clean, y);
    ++local.supports_tested;
    local.oracle_iterations += static_cast<std::uint64_t>(o.iterations);
    if (o.verdict == Feasibility::Indeterminate) ++local.indeterminate;
    if (o.verdict != Feasibility::Feasible) return false;

    res.x_hat = o.x_hat;
    res.support = gamma;
    res.feasible = true;
    res.w_hat = Vector::Zero(y.size());
    const auto rows = rows_of(clean);
    for (std::size_t r = 0; r < rows.size(); ++r) res.w_hat[rows[r]] = o.w_hat[static_cast<Eigen::Index>(r)];
    res.a_hat = Vector::Zero(y.size());
    const Vector fit = O_ * res.x_hat;
    for (int row : rows_of(gamma)) res.a_hat[row] = y[row] - fit[row];
    if (stats) *stats += local;
    return true;
  };
  DecodeResult res;
  if (!order_.empty()) {
    for (const auto& gamma : order_) {
      if (consider(gamma, res)) return res;
    }
  } else {
    for (int card = 0; card <= p; ++card) {
      for (const auto& gamma : subsets_of_size(p, card)) {
        if (consider(gamma, res)) return res;
      }
    }
  }
  throw Error(ErrorCode::Internal, "decoder found no feasible support");
}

double prop1_threshold(const SystemModel& model) {
  const Matrix O = build_O(model, model.all_sensors());
  return 2.0 * std::sqrt(static_cast<double>(model.N())) * model.delta_w() * pinv_norm(O) *
         (1.0 + spectral_norm(model.A()));
}

}  // namespace rselab
