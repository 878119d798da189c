#include "rselab/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rselab/error.hpp"

namespace rselab {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::Config, what); }

Matrix matrix_from(const json& j, const char* key) {
  if (!j.is_array()) bad(std::string(key) + " must be an array of rows");
  if (j.empty()) return Matrix();
  const bool nested = j[0].is_array();
  const std::size_t rows = nested ? j.size() : 1;
  const std::size_t cols = nested ? j[0].size() : j.size();
  Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = nested ? j[r] : j;
    if (!row.is_array() || row.size() != cols) bad(std::string(key) + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) bad(std::string(key) + " entries must be numbers");
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return M;
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Vector vector_from(const json& j, const char* key) {
  if (!j.is_array()) bad(std::string(key) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad(std::string(key) + " entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

long steps_from(const json& j, const char* steps_key, const char* seconds_key, double ts, long fallback) {
  if (j.contains(steps_key)) return j.at(steps_key).get<long>();
  if (j.contains(seconds_key)) return std::lround(j.at(seconds_key).get<double>() / ts);
  return fallback;
}

NoiseSpec noise_from(const json& j) {
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") return NoiseSpec::zero();
  if (kind == "uniform") return NoiseSpec::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "ball") return NoiseSpec::ball(j.at("radius").get<double>());
  bad("unknown noise kind '" + kind + "'");
}

json noise_json(const NoiseSpec& s) {
  switch (s.kind) {
    case NoiseSpec::Kind::Zero:
      return {{"kind", "zero"}};
    case NoiseSpec::Kind::UniformElementwise:
      return {{"kind", "uniform"}, {"lo", s.lo}, {"hi", s.hi}};
    case NoiseSpec::Kind::Ball:
      return {{"kind", "ball"}, {"radius", s.radius}};
  }
  return {{"kind", "zero"}};
}

std::vector<int> ints_from(const json& j, const char* key) {
  if (!j.is_array()) bad(std::string(key) + " must be an array of sensor numbers");
  std::vector<int> out;
  for (const auto& v : j) out.push_back(v.get<int>());
  return out;
}

SensorSet sensors_from(const json& j, const char* key, int p) {
  const auto nums = ints_from(j, key);
  for (int s : nums) {
    if (s < 1 || s > p) bad(std::string(key) + ": sensor " + std::to_string(s) + " outside 1.." + std::to_string(p));
  }
  return SensorSet::from_one_based(p, nums);
}

AuthPolicy policy_from(const json& j, int p, double ts) {
  if (j.is_null()) return AuthPolicy::none(p);
  if (j.contains("schedules")) {
    std::vector<SensorSchedule> sched(static_cast<std::size_t>(p));
    for (const auto& s : j.at("schedules")) {
      const int sensor = s.at("sensor").get<int>();
      if (sensor < 1 || sensor > p) bad("auth schedule sensor out of range");
      auto& slot = sched[static_cast<std::size_t>(sensor - 1)];
      if (s.contains("times")) {
        slot = SensorSchedule::explicit_times(s.at("times").get<std::vector<long>>());
      } else {
        slot = SensorSchedule::periodic(steps_from(s, "period", "period_s", ts, 0), s.value("phase", 0L));
      }
    }
    return AuthPolicy(p, std::move(sched));
  }
  const SensorSet subset = sensors_from(j.at("sensors"), "auth.sensors", p);
  const long period = steps_from(j, "period", "period_s", ts, 0);
  if (period < 1) bad("auth.period must be >= 1 step");
  return AuthPolicy::periodic(p, subset, period, j.value("phase", 0L));
}

json policy_json(const AuthPolicy& pol) {
  if (pol.authenticated_sensors().empty()) return nullptr;
  const SensorSet subset = pol.authenticated_sensors();
  const long period = pol.common_period(subset);
  if (period > 0) {
    const long phase = pol.schedule(subset.indices().front()).phase;
    bool same_phase = true;
    for (int i : subset) same_phase = same_phase && pol.schedule(i).phase == phase;
    if (same_phase) return {{"sensors", subset.one_based()}, {"period", period}, {"phase", phase}};
  }
  json sched = json::array();
  for (int i = 0; i < pol.sensors(); ++i) {
    const auto& s = pol.schedule(i);
    if (s.kind == SensorSchedule::Kind::Periodic) {
      sched.push_back({{"sensor", i + 1}, {"period", s.period}, {"phase", s.phase}});
    } else if (s.kind == SensorSchedule::Kind::Explicit) {
      sched.push_back({{"sensor", i + 1}, {"times", s.times}});
    }
  }
  return {{"schedules", sched}};
}

std::string resolve(const std::string& path, const std::string& base) {
  if (path.empty() || base.empty()) return path;
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base) / p).string();
}

}  // namespace

SystemModel ScenarioConfig::model() const { return SystemModel(A, B, C, delta_w, N, tol); }

json ScenarioConfig::to_json() const {
  json j;
  j["name"] = name;
  j["system"] = {{"A", matrix_json(A)},
                 {"B", matrix_json(B)},
                 {"C", matrix_json(C)},
                 {"delta_w", delta_w},
                 {"N", N},
                 {"sampling_period", sampling_period}};
  j["tolerances"] = {{"rank_tol", tol.rank_tol},
                     {"stability_margin", tol.stability_margin},
                     {"cluster_tol", tol.cluster_tol},
                     {"eig_tol", tol.eig_tol}};
  j["compromised"] = compromised.one_based();
  j["noise"] = {{"seed", noise.seed}, {"process", noise_json(noise.process)}, {"measurement", noise_json(noise.measurement)}};
  j["detector"] = to_string(detector);
  switch (attack.kind) {
    case AttackSource::Kind::None:
      j["attack"] = {{"source", "none"}};
      break;
    case AttackSource::Kind::File:
      j["attack"] = {{"source", "file"}, {"path", attack.path}};
      break;
    case AttackSource::Kind::Synth:
      j["attack"] = {{"source", "synth"},   {"start_step", attack.start_step}, {"omniscient", attack.omniscient},
                     {"ramp_steps", attack.ramp_steps}, {"cap", attack.cap},       {"margin", attack.margin},
                     {"eta", attack.eta},     {"gain", attack.gain}};
      break;
  }
  j["auth"] = policy_json(policy);
  j["horizon_steps"] = horizon;
  j["controller"] = {{"gain", matrix_json(controller_gain)}};
  switch (reference.kind) {
    case Reference::Kind::None:
      j["reference"] = {{"kind", "none"}};
      break;
    case Reference::Kind::Constant:
      j["reference"] = {{"kind", "constant"}, {"value", vector_json(reference.value)}};
      break;
    case Reference::Kind::Circle:
      j["reference"] = {{"kind", "circle"},
                        {"radius", reference.radius},
                        {"angular_rate", reference.angular_rate},
                        {"phase", reference.phase}};
      break;
  }
  j["x0"] = vector_json(x0);
  j["decoder"] = {{"omega", to_string(decoder.mode)}, {"eps_feas", decoder.eps_feas}, {"max_iter", decoder.max_iter}};
  json out = json::object();
  if (!trace_path.empty()) out["trace"] = trace_path;
  if (!attack_output_path.empty()) out["attack"] = attack_output_path;
  if (!report_path.empty()) out["report"] = report_path;
  j["output"] = out;
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const json& j, const std::string& base_dir) {
  try {
    if (!j.is_object()) bad("config must be a JSON object");
    ScenarioConfig c;
    c.name = j.value("name", "scenario");
    const json& sys = j.at("system");
    c.A = matrix_from(sys.at("A"), "A");
    c.C = matrix_from(sys.at("C"), "C");
    c.B = sys.contains("B") ? matrix_from(sys.at("B"), "B") : Matrix();
    if (c.B.size() == 0) c.B = Matrix::Zero(c.A.rows(), 0);
    c.delta_w = sys.at("delta_w").get<double>();
    c.N = sys.at("N").get<int>();
    c.sampling_period = sys.value("sampling_period", 1.0);
    if (!(c.sampling_period > 0.0)) bad("sampling_period must be positive");
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      c.tol.rank_tol = t.value("rank_tol", c.tol.rank_tol);
      c.tol.stability_margin = t.value("stability_margin", c.tol.stability_margin);
      c.tol.cluster_tol = t.value("cluster_tol", c.tol.cluster_tol);
      c.tol.eig_tol = t.value("eig_tol", c.tol.eig_tol);
    }
    const SystemModel model = c.model();
    const int p = model.p();
    const double ts = c.sampling_period;

    c.compromised = j.contains("compromised") ? sensors_from(j.at("compromised"), "compromised", p) : SensorSet::none(p);
    if (j.contains("noise")) {
      const json& nz = j.at("noise");
      c.noise.seed = nz.value("seed", std::uint64_t{0});
      if (nz.contains("process")) c.noise.process = noise_from(nz.at("process"));
      if (nz.contains("measurement")) c.noise.measurement = noise_from(nz.at("measurement"));
    }
    c.detector = detector_from_string(j.value("detector", std::string("II")));

    if (j.contains("attack") && !j.at("attack").is_null()) {
      const json& a = j.at("attack");
      const std::string src = a.value("source", "none");
      if (src == "none") {
        c.attack.kind = AttackSource::Kind::None;
      } else if (src == "file") {
        c.attack.kind = AttackSource::Kind::File;
        c.attack.path = resolve(a.at("path").get<std::string>(), base_dir);
        if (!std::filesystem::exists(c.attack.path)) bad("attack file '" + c.attack.path + "' does not exist");
      } else if (src == "synth") {
        c.attack.kind = AttackSource::Kind::Synth;
        c.attack.start_step = steps_from(a, "start_step", "start_s", ts, 1);
        c.attack.omniscient = a.value("omniscient", true);
        c.attack.ramp_steps = steps_from(a, "ramp_steps", "ramp_s", ts, c.attack.ramp_steps);
        c.attack.cap = a.value("cap", c.attack.cap);
        c.attack.margin = a.value("margin", c.attack.margin);
        c.attack.eta = a.value("eta", c.attack.eta);
        c.attack.gain = a.value("gain", c.attack.gain);
        if (c.attack.start_step < 0) bad("attack start must be >= 0");
        if (!(c.attack.margin >= 0.0 && c.attack.margin < 1.0)) bad("attack margin must lie in [0, 1)");
      } else {
        bad("unknown attack source '" + src + "'");
      }
    }
    c.policy = j.contains("auth") ? policy_from(j.at("auth"), p, ts) : AuthPolicy::none(p);
    c.horizon = steps_from(j, "horizon_steps", "horizon_s", ts, 0);
    if (c.horizon < c.N) bad("horizon must be at least N steps");

    if (j.contains("controller") && j.at("controller").contains("gain")) {
      c.controller_gain = matrix_from(j.at("controller").at("gain"), "controller.gain");
      if (c.controller_gain.size() > 0 && (c.controller_gain.rows() != model.m() || c.controller_gain.cols() != model.n())) {
        bad("controller.gain must be m x n");
      }
    }
    if (j.contains("reference")) {
      const json& r = j.at("reference");
      const std::string kind = r.value("kind", "none");
      if (kind == "none") {
        c.reference.kind = Reference::Kind::None;
      } else if (kind == "constant") {
        c.reference.kind = Reference::Kind::Constant;
        c.reference.value = vector_from(r.at("value"), "reference.value");
        if (c.reference.value.size() != model.n()) bad("reference.value must have n entries");
      } else if (kind == "circle") {
        if (model.n() != 2) bad("circle reference needs a two-state model");
        c.reference.kind = Reference::Kind::Circle;
        c.reference.radius = r.at("radius").get<double>();
        c.reference.angular_rate = r.at("angular_rate").get<double>();
        c.reference.phase = r.value("phase", 0.0);
      } else {
        bad("unknown reference kind '" + kind + "'");
      }
      c.reference.sampling_period = ts;
    }
    c.x0 = j.contains("x0") ? vector_from(j.at("x0"), "x0") : Vector::Zero(model.n());
    if (c.x0.size() == 0) c.x0 = Vector::Zero(model.n());
    if (c.x0.size() != model.n()) bad("x0 must have n entries");
    if (j.contains("decoder")) {
      const json& d = j.at("decoder");
      c.decoder.mode = omega_mode_from_string(d.value("omega", std::string("per_step_ball")));
      c.decoder.eps_feas = d.value("eps_feas", c.decoder.eps_feas);
      c.decoder.max_iter = d.value("max_iter", c.decoder.max_iter);
      if (!(c.decoder.eps_feas > 0.0) || c.decoder.max_iter < 1) bad("decoder eps_feas/max_iter out of range");
    }
    if (p > c.decoder.max_sensors) bad("sensor count exceeds the decoder cap");
    if (j.contains("output")) {
      const json& o = j.at("output");
      c.trace_path = resolve(o.value("trace", std::string()), base_dir);
      c.attack_output_path = resolve(o.value("attack", std::string()), base_dir);
      c.report_path = resolve(o.value("report", std::string()), base_dir);
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("config: ") + e.what());
  }
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, "config '" + path + "': " + e.what());
  }
  const auto parent = std::filesystem::path(path).parent_path().string();
  return from_json(j, parent);
}

ScenarioConfig vtf_config() {
  ScenarioConfig c;
  c.name = "vtf";
  c.A.resize(2, 2);
  c.A << 1.0, 0.01, 0.0, 1.0;
  c.B.resize(2, 1);
  c.B << 0.0001, 0.01;
  c.C.resize(3, 2);
  c.C << 1.0, 0.0, 0.0, 1.0, 0.0, 1.0;
  c.delta_w = 0.05 * std::sqrt(3.0);
  c.N = 2;
  c.sampling_period = 0.01;
  c.compromised = SensorSet::all(3);
  c.noise.seed = 1;
  c.noise.process = NoiseSpec::zero();
  c.noise.measurement = NoiseSpec::uniform(-0.05, 0.05);
  c.detector = DetectorKind::II;
  c.policy = AuthPolicy::none(3);
  c.horizon = 6000;
  c.controller_gain.resize(1, 2);
  c.controller_gain << -500.0, -40.0;
  c.reference.sampling_period = c.sampling_period;
  c.x0 = Vector::Zero(2);
  return c;
}

ScenarioConfig example1_config(int N) {
  ScenarioConfig c;
  c.name = "example1";
  c.A.resize(2, 2);
  c.A << 0.3, 1.0, 0.0, 0.5;
  c.B = Matrix::Zero(2, 0);
  c.C.resize(1, 2);
  c.C << 1.0, 0.0;
  c.delta_w = 0.0;
  c.N = N;
  c.compromised = SensorSet::all(1);
  c.detector = DetectorKind::I;
  c.policy = AuthPolicy::none(1);
  c.horizon = 50;
  c.x0 = Vector::Zero(2);
  return c;
}

ScenarioConfig builtin_config(const std::string& name) {
  if (name == "vtf") return vtf_config();
  if (name == "example1") return example1_config(2);
  if (name == "example1_n3") return example1_config(3);
  throw Error(ErrorCode::Config, "unknown built-in scenario '" + name + "'");
}

}  // namespace rselab
