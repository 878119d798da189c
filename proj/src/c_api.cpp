#include "rselab/rselab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "rselab/attackability.hpp"
#include "rselab/decoder.hpp"
#include "rselab/error.hpp"
#include "rselab/harness.hpp"
#include "rselab/scenario.hpp"

struct rse_model {
  rselab::SystemModel model;
};

struct rse_scenario {
  rselab::ScenarioConfig config;
};

namespace {

thread_local std::string g_last_error;

rse_status map(rselab::ErrorCode code) {
  using rselab::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument:
      return RSE_ERR_INVALID_ARGUMENT;
    case ErrorCode::Config:
      return RSE_ERR_CONFIG;
    case ErrorCode::NotObservable:
      return RSE_ERR_NOT_OBSERVABLE;
    case ErrorCode::DimensionMismatch:
      return RSE_ERR_DIMENSION;
    case ErrorCode::NotAttackable:
      return RSE_ERR_NOT_ATTACKABLE;
    case ErrorCode::AuthViolation:
      return RSE_ERR_AUTH_VIOLATION;
    case ErrorCode::Io:
      return RSE_ERR_IO;
    case ErrorCode::Internal:
      return RSE_ERR_INTERNAL;
  }
  return RSE_ERR_INTERNAL;
}

template <class F>
rse_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return RSE_OK;
  } catch (const rselab::Error& e) {
    g_last_error = e.what();
    return map(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RSE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RSE_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw rselab::Error(rselab::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rselab::Matrix from_row_major(const double* data, int rows, int cols) {
  rselab::Matrix M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) M(r, c) = data[r * cols + c];
  return M;
}

}  // namespace

extern "C" {

const char* rse_last_error_message(void) { return g_last_error.c_str(); }

const char* rse_version(void) { return "0.1.0"; }

void rse_free_string(char* s) { std::free(s); }

rse_status rse_model_create(const double* A, const double* B, const double* C, int n, int m, int p, double delta_w,
                            int N, rse_model** out) {
  return guarded([&] {
    need(A, "A");
    need(C, "C");
    need(out, "out");
    if (n < 1 || p < 1 || m < 0) throw rselab::Error(rselab::ErrorCode::DimensionMismatch, "bad dimensions");
    if (m > 0) need(B, "B");
    rselab::Matrix Bm = m > 0 ? from_row_major(B, n, m) : rselab::Matrix::Zero(n, 0);
    *out = new rse_model{rselab::SystemModel(from_row_major(A, n, n), Bm, from_row_major(C, p, n), delta_w, N)};
  });
}

void rse_model_destroy(rse_model* model) { delete model; }

rse_status rse_model_dims(const rse_model* model, int* n, int* m, int* p, int* N) {
  return guarded([&] {
    need(model, "model");
    if (n) *n = model->model.n();
    if (m) *m = model->model.m();
    if (p) *p = model->model.p();
    if (N) *N = model->model.N();
  });
}

rse_status rse_prop1_threshold(const rse_model* model, double* d) {
  return guarded([&] {
    need(model, "model");
    need(d, "d");
    *d = rselab::prop1_threshold(model->model);
  });
}

rse_status rse_decode(const rse_model* model, const double* y, rse_omega omega, double* x_hat, uint64_t* support) {
  return guarded([&] {
    need(model, "model");
    need(y, "y");
    need(x_hat, "x_hat");
    const auto& mdl = model->model;
    rselab::DecoderOptions opt;
    opt.mode = omega == RSE_OMEGA_STACKED ? rselab::OmegaMode::StackedBall : rselab::OmegaMode::PerStepBall;
    const rselab::Decoder dec(mdl, opt);
    const rselab::Vector yv = Eigen::Map<const rselab::Vector>(y, mdl.p() * mdl.N());
    const rselab::DecodeResult r = dec.decode(yv);
    for (int i = 0; i < mdl.n(); ++i) x_hat[i] = r.x_hat[i];
    if (support) *support = r.support.mask();
  });
}

rse_status rse_pa_verdict(const rse_model* model, const int* compromised, int count, int* single_step,
                          int* over_time_id1, int* over_time_id2) {
  return guarded([&] {
    need(model, "model");
    if (count > 0) need(compromised, "compromised");
    const int p = model->model.p();
    std::vector<int> nums(compromised, compromised + std::max(count, 0));
    for (int s : nums) {
      if (s < 1 || s > p) throw rselab::Error(rselab::ErrorCode::InvalidArgument, "sensor number out of range");
    }
    const auto v = rselab::analyze_pa(model->model, rselab::SensorSet::from_one_based(p, nums));
    if (single_step) *single_step = v.pa_single_step;
    if (over_time_id1) *over_time_id1 = v.pa_over_time_id1;
    if (over_time_id2) *over_time_id2 = v.pa_over_time_id2;
  });
}

rse_status rse_scenario_load(const char* path, rse_scenario** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new rse_scenario{rselab::ScenarioConfig::load(path)};
  });
}

rse_status rse_scenario_from_json(const char* json, rse_scenario** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw rselab::Error(rselab::ErrorCode::Config, e.what());
    }
    *out = new rse_scenario{rselab::ScenarioConfig::from_json(j)};
  });
}

rse_status rse_scenario_builtin(const char* name, rse_scenario** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = new rse_scenario{rselab::builtin_config(name)};
  });
}

void rse_scenario_destroy(rse_scenario* scenario) { delete scenario; }

rse_status rse_scenario_set_seed(rse_scenario* scenario, uint64_t seed) {
  return guarded([&] {
    need(scenario, "scenario");
    scenario->config.noise.seed = seed;
  });
}

rse_status rse_scenario_set_trace_path(rse_scenario* scenario, const char* path) {
  return guarded([&] {
    need(scenario, "scenario");
    scenario->config.trace_path = path ? path : "";
  });
}

rse_status rse_scenario_to_json(const rse_scenario* scenario, char** out) {
  return guarded([&] {
    need(scenario, "scenario");
    need(out, "out");
    *out = dup_string(scenario->config.to_json().dump(2));
  });
}

rse_status rse_analyze(const rse_scenario* scenario, char** report, int* exit_code) {
  return guarded([&] {
    need(scenario, "scenario");
    const auto r = rselab::cmd_analyze(scenario->config);
    if (exit_code) *exit_code = r.exit_code;
    if (report) *report = dup_string(r.report.dump(2));
  });
}

rse_status rse_simulate(const rse_scenario* scenario, const char* attack_file, char** report, int* exit_code) {
  return guarded([&] {
    need(scenario, "scenario");
    const auto r = rselab::cmd_simulate(scenario->config, attack_file ? attack_file : "");
    if (exit_code) *exit_code = r.exit_code;
    if (report) *report = dup_string(r.report.dump(2));
  });
}

rse_status rse_synthesize_attack(const rse_scenario* scenario, const char* out_csv, char** report) {
  return guarded([&] {
    need(scenario, "scenario");
    const auto r = rselab::cmd_attack(scenario->config, out_csv ? out_csv : "");
    if (report) *report = dup_string(r.report.dump(2));
  });
}

rse_status rse_decode_window(const rse_scenario* scenario, const char* window_csv, char** report) {
  return guarded([&] {
    need(scenario, "scenario");
    need(window_csv, "window_csv");
    const auto r = rselab::cmd_decode(scenario->config, window_csv);
    if (report) *report = dup_string(r.report.dump(2));
  });
}

rse_status rse_reproduce(const char* figure, const char* out_dir, uint64_t seed, char** report) {
  return guarded([&] {
    need(figure, "figure");
    need(out_dir, "out_dir");
    const auto r = rselab::cmd_reproduce(figure, out_dir, seed);
    if (report) *report = dup_string(r.report.dump(2));
  });
}

}  // extern "C"
