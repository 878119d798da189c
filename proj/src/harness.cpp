#include "rselab/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rselab/attack_synth.hpp"
#include "rselab/attackability.hpp"
#include "rselab/csv.hpp"
#include "rselab/error.hpp"

namespace rselab {

using nlohmann::json;

namespace {

constexpr double kVtfNoAttackBound = 0.0789;

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return os;
}

void write_json(const std::string& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace

json summarize(const SimTrace& tr) {
  return {{"steps", tr.horizon},
          {"max_error", tr.max_error()},
          {"mean_error", tr.mean_error()},
          {"id1_alarms", tr.id1_alarms()},
          {"id2_alarms", tr.id2_alarms()},
          {"hierarchy_violations", tr.hierarchy_violations()},
          {"auth_fraction", tr.auth_fraction()},
          {"auth_violations", static_cast<long>(tr.auth_violation_times.size())},
          {"attack_free_bound", tr.attack_free_bound},
          {"attack_free_bound_violations", tr.bound_violations},
          {"threshold_d", tr.threshold_d},
          {"decodes", tr.stats.decodes},
          {"supports_tested", tr.stats.supports_tested},
          {"oracle_iterations", tr.stats.oracle_iterations},
          {"indeterminate", tr.stats.indeterminate},
          {"indeterminate_rate", tr.indeterminate_rate()}};
}

CommandResult cmd_analyze(const ScenarioConfig& config) {
  const SystemModel model = config.model();
  CommandResult res;
  const PaVerdict v = analyze_pa(model, config.compromised);
  json& r = res.report;
  r["name"] = config.name;
  r["dimensions"] = {{"n", model.n()}, {"m", model.m()}, {"p", model.p()}, {"N", model.N()}};
  r["delta_w"] = model.delta_w();
  const Matrix O = build_O(model, model.all_sensors());
  r["O_pinv_norm"] = pinv_norm(O);
  r["A_norm"] = spectral_norm(model.A());
  r["threshold_d"] = prop1_threshold(model);
  r["max_sparse_observability"] = max_sparse_observability(model);
  r["detector"] = to_string(config.detector);
  r["verdict"] = to_json(v);
  bool pa = config.detector == DetectorKind::I ? v.pa_over_time_id1 : v.pa_over_time_id2;
  const SensorSet F = config.auth_subset();
  if (!F.empty()) {
    const PolicyVerdict pv = policy_prevents_pa(model, config.compromised, config.policy, F, config.detector);
    r["policy"] = to_json(pv);
    r["policy"]["auth_sensors"] = F.one_based();
    if (pv.prevented) pa = false;
    if (pv.key_rank.borderline) res.exit_code = kExitIndeterminate;
  }
  r["perfectly_attackable"] = pa;
  if (v.indeterminate) res.exit_code = kExitIndeterminate;
  if (res.exit_code != kExitIndeterminate) res.exit_code = pa ? kExitPa : kExitNotPa;
  if (!config.report_path.empty()) write_json(config.report_path, r);
  return res;
}

AttackPlan scenario_attack(const ScenarioConfig& config, const NoiseRealization& noise) {
  const SystemModel model = config.model();
  switch (config.attack.kind) {
    case AttackSource::Kind::None: {
      AttackPlan none;
      none.values.resize(model.p(), 0);
      none.compromised = config.compromised;
      return none;
    }
    case AttackSource::Kind::File: {
      std::ifstream in(config.attack.path);
      if (!in) throw Error(ErrorCode::Io, "cannot open attack file '" + config.attack.path + "'");
      AttackPlan plan = AttackPlan::read_csv(in, model.p());
      if (!plan.compromised.is_subset_of(config.compromised)) {
        throw Error(ErrorCode::Config, "attack file touches sensors " + plan.compromised.to_string() +
                                           " outside the compromised set " + config.compromised.to_string());
      }
      plan.compromised = config.compromised;
      return plan;
    }
    case AttackSource::Kind::Synth: {
      SustainedOptions o;
      o.detector = config.detector;
      o.start_time = config.attack.start_step;
      o.horizon = config.horizon;
      o.policy = config.policy;
      o.decoder = config.decoder;
      o.omniscient = config.attack.omniscient;
      o.noise = &noise;
      o.ramp_steps = config.attack.ramp_steps;
      o.cap = config.attack.cap;
      o.margin = config.attack.margin;
      o.eta = config.attack.eta;
      o.gain = config.attack.gain;
      return sustained_attack(model, config.compromised, o);
    }
  }
  throw Error(ErrorCode::Internal, "unhandled attack source");
}

SimulationRun run_scenario(const ScenarioConfig& config, const std::string& attack_file) {
  const SystemModel model = config.model();
  const NoiseRealization noise = NoiseRealization::generate(model, config.noise, config.horizon + model.N() - 1);
  ScenarioConfig cfg = config;
  if (!attack_file.empty()) {
    cfg.attack.kind = AttackSource::Kind::File;
    cfg.attack.path = attack_file;
  }
  SimulationRun run;
  run.plan = scenario_attack(cfg, noise);

  ClosedLoopSpec spec;
  spec.gain = cfg.controller_gain;
  spec.reference = cfg.reference;
  spec.horizon = cfg.horizon;
  spec.noise = cfg.noise;
  spec.attack = &run.plan;
  spec.policy = cfg.policy;
  spec.compromised = cfg.compromised;
  spec.decoder = cfg.decoder;
  spec.x0 = cfg.x0;
  spec.realization = &noise;
  run.trace = run_closed_loop(model, spec);

  run.result.report = summarize(run.trace);
  run.result.report["name"] = cfg.name;
  run.result.report["attack"] = run.plan.method.empty() ? "none" : run.plan.method;
  if (run.trace.indeterminate_rate() > 0.01) {
    run.result.exit_code = kExitDecoderWarning;
    run.result.report["warning"] = "decoder indeterminate rate above 1%";
  }
  if (!cfg.trace_path.empty()) {
    auto os = open_out(cfg.trace_path);
    run.trace.write_csv(os);
  }
  if (!cfg.report_path.empty()) write_json(cfg.report_path, run.result.report);
  return run;
}

CommandResult cmd_simulate(const ScenarioConfig& config, const std::string& attack_file) {
  return run_scenario(config, attack_file).result;
}

CommandResult cmd_attack(const ScenarioConfig& config, const std::string& out_path) {
  const SystemModel model = config.model();
  if (config.attack.kind == AttackSource::Kind::None) {
    throw Error(ErrorCode::Config, "config has no attack source to emit");
  }
  const NoiseRealization noise = NoiseRealization::generate(model, config.noise, config.horizon + model.N() - 1);
  const AttackPlan plan = scenario_attack(config, noise);
  const std::string path = out_path.empty() ? config.attack_output_path : out_path;
  if (!path.empty()) {
    auto os = open_out(path);
    plan.write_csv(os);
  }
  CommandResult res;
  res.report = {{"method", plan.method},
                {"start_step", plan.start_time},
                {"length", plan.length()},
                {"epsilon", plan.epsilon},
                {"target_detector", to_string(plan.target)},
                {"compromised", plan.compromised.one_based()},
                {"path", path}};
  return res;
}

CommandResult cmd_decode(const ScenarioConfig& config, const std::string& window_csv) {
  const SystemModel model = config.model();
  std::ifstream in(window_csv);
  if (!in) throw Error(ErrorCode::Io, "cannot open window file '" + window_csv + "'");
  const auto rows = csv::read_numeric(in);
  if (static_cast<int>(rows.size()) != model.N()) {
    throw Error(ErrorCode::Io, "window file needs " + std::to_string(model.N()) + " rows, one per step");
  }
  Matrix M(model.N(), model.p());
  for (int k = 0; k < model.N(); ++k) {
    if (static_cast<int>(rows[static_cast<std::size_t>(k)].size()) != model.p()) {
      throw Error(ErrorCode::Io, "window file rows need " + std::to_string(model.p()) + " sensor columns");
    }
    for (int i = 0; i < model.p(); ++i) M(k, i) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  }
  const StackedWindow w = StackedWindow::from_time_major(M);
  const Decoder dec(model, config.decoder);
  DecodeStats stats;
  const DecodeResult r = dec.decode(w, &stats);
  CommandResult res;
  res.report = {{"x_hat", vec_json(r.x_hat)},
                {"support", r.support.one_based()},
                {"feasible", r.feasible},
                {"id1_alarm", id1(r)},
                {"a_hat", vec_json(r.a_hat)},
                {"w_hat", vec_json(r.w_hat)},
                {"stats",
                 {{"supports_tested", stats.supports_tested},
                  {"oracle_iterations", stats.oracle_iterations},
                  {"indeterminate", stats.indeterminate}}}};
  return res;
}

namespace {

struct Series {
  std::string name;
  std::vector<double> values;
};

void write_series(const std::string& path, double ts, const std::vector<Series>& cols) {
  auto os = open_out(path);
  os << "time_s";
  for (const auto& c : cols) os << ',' << c.name;
  os << '\n';
  const std::size_t rows = cols.empty() ? 0 : cols.front().values.size();
  for (std::size_t t = 0; t < rows; ++t) {
    os << csv::format(static_cast<double>(t) * ts);
    for (const auto& c : cols) os << ',' << csv::format(c.values[t]);
    os << '\n';
  }
}

void write_plot_script(const std::string& path, const std::string& csv_name, const std::vector<std::string>& ycols,
                       const std::string& ylabel) {
  auto os = open_out(path);
  os << "import csv\nimport sys\n\nimport matplotlib.pyplot as plt\n\n";
  os << "rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else '" << csv_name << "')))\n";
  os << "t = [float(r['time_s']) for r in rows]\n";
  os << "fig, ax = plt.subplots()\n";
  for (const auto& c : ycols) os << "ax.plot(t, [float(r['" << c << "']) for r in rows], label='" << c << "')\n";
  os << "ax.set_xlabel('time [s]')\nax.set_ylabel('" << ylabel << "')\nax.legend()\n";
  os << "fig.savefig('" << csv_name.substr(0, csv_name.size() - 4) << ".png', dpi=150)\n";
}

ScenarioConfig vtf_with(std::uint64_t seed, bool attack, long period) {
  ScenarioConfig c = vtf_config();
  c.noise.seed = seed;
  if (attack) {
    c.attack.kind = AttackSource::Kind::Synth;
    c.attack.start_step = 2000;
  }
  if (period > 0) c.policy = AuthPolicy::periodic(3, SensorSet(3, {0, 1}), period);
  return c;
}

Series error_series(const SimTrace& tr, const std::string& name) { return {name, tr.err_norm}; }

long first_crossing(const std::vector<double>& v, double level) {
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (v[t] > level) return static_cast<long>(t);
  }
  return -1;
}

}  // namespace

CommandResult cmd_reproduce(const std::string& figure, const std::string& out_dir, std::uint64_t seed) {
  CommandResult res;
  const double ts = vtf_config().sampling_period;
  const auto path = [&](const std::string& f) { return (std::filesystem::path(out_dir) / f).string(); };
  const bool all = figure == "all";
  bool known = all;

  if (all || figure == "fig2a") {
    known = true;
    const SimulationRun run = run_scenario(vtf_with(seed, false, 0));
    write_series(path("fig2a.csv"), ts, {error_series(run.trace, "error_norm")});
    write_plot_script(path("plot_fig2a.py"), "fig2a.csv", {"error_norm"}, "estimation error norm");
    res.report["fig2a"] = summarize(run.trace);
  }
  if (all || figure == "fig2b") {
    known = true;
    const SimulationRun run = run_scenario(vtf_with(seed, true, 0));
    write_series(path("fig2b.csv"), ts, {error_series(run.trace, "error_norm")});
    write_plot_script(path("plot_fig2b.py"), "fig2b.csv", {"error_norm"}, "estimation error norm");
    json s = summarize(run.trace);
    s["crossing_10x_s"] = static_cast<double>(first_crossing(run.trace.err_norm, 10 * kVtfNoAttackBound)) * ts;
    s["crossing_100x_s"] = static_cast<double>(first_crossing(run.trace.err_norm, 100 * kVtfNoAttackBound)) * ts;
    res.report["fig2b"] = s;
  }
  if (all || figure == "fig2c") {
    known = true;
    const SimulationRun r10 = run_scenario(vtf_with(seed, true, 10));
    const SimulationRun r100 = run_scenario(vtf_with(seed, true, 100));
    write_series(path("fig2c.csv"), ts, {error_series(r10.trace, "error_L10"), error_series(r100.trace, "error_L100")});
    write_plot_script(path("plot_fig2c.py"), "fig2c.csv", {"error_L10", "error_L100"}, "estimation error norm");
    res.report["fig2c"] = {{"L10", summarize(r10.trace)}, {"L100", summarize(r100.trace)}};
  }
  if (all || figure == "fig3") {
    known = true;
    std::vector<Series> cols;
    json summary;
    for (const long period : {10L, 0L}) {
      const std::string tag = period > 0 ? "auth" : "noauth";
      std::vector<SimTrace> axes;
      for (int axis = 0; axis < 2; ++axis) {
        ScenarioConfig c = vtf_with(seed + static_cast<std::uint64_t>(axis), true, period);
        c.reference.kind = Reference::Kind::Circle;
        c.reference.radius = 1.0;
        c.reference.angular_rate = 2.0 * M_PI / 20.0;
        c.reference.phase = axis == 0 ? 0.0 : -M_PI / 2.0;
        c.reference.sampling_period = ts;
        axes.push_back(run_scenario(c).trace);
      }
      const long H = axes[0].horizon;
      Series px{"x_" + tag, {}}, py{"y_" + tag, {}}, ex{"xhat_" + tag, {}}, ey{"yhat_" + tag, {}},
          err{"est_error_" + tag, {}}, trk{"track_error_" + tag, {}};
      Series rx{"ref_x", {}}, ry{"ref_y", {}};
      double max_track = 0.0, max_track_settled = 0.0, max_err = 0.0;
      const long settle = static_cast<long>(std::lround(5.0 / ts));
      long alarms = 0;
      for (long t = 0; t < H; ++t) {
        const double ex_ = axes[0].err_norm[static_cast<std::size_t>(t)];
        const double ey_ = axes[1].err_norm[static_cast<std::size_t>(t)];
        const double rxv = 1.0 * std::cos(2.0 * M_PI / 20.0 * static_cast<double>(t) * ts);
        const double ryv = 1.0 * std::cos(2.0 * M_PI / 20.0 * static_cast<double>(t) * ts - M_PI / 2.0);
        rx.values.push_back(rxv);
        ry.values.push_back(ryv);
        px.values.push_back(axes[0].x(0, t));
        py.values.push_back(axes[1].x(0, t));
        ex.values.push_back(axes[0].xhat(0, t));
        ey.values.push_back(axes[1].xhat(0, t));
        err.values.push_back(std::hypot(ex_, ey_));
        trk.values.push_back(std::hypot(axes[0].x(0, t) - rxv, axes[1].x(0, t) - ryv));
        max_track = std::max(max_track, trk.values.back());
        if (t >= settle) max_track_settled = std::max(max_track_settled, trk.values.back());
        max_err = std::max(max_err, err.values.back());
      }
      for (const auto& a : axes) alarms += a.id2_alarms() + a.id1_alarms();
      if (cols.empty()) {
        cols.push_back(rx);
        cols.push_back(ry);
      }
      for (auto* s : {&px, &py, &ex, &ey, &err, &trk}) cols.push_back(*s);
      summary[tag] = {{"max_estimation_error", max_err}, {"max_tracking_error", max_track},
                      {"max_tracking_error_after_5s", max_track_settled},
                      {"alarms", alarms}};
    }
    write_series(path("fig3.csv"), ts, cols);
    write_plot_script(path("plot_fig3.py"), "fig3.csv", {"track_error_auth", "track_error_noauth"},
                      "position tracking error");
    res.report["fig3"] = summary;
  }
  if (!known) throw Error(ErrorCode::InvalidArgument, "unknown figure '" + figure + "'");
  res.report["seed"] = seed;
  res.report["out_dir"] = out_dir;
  return res;
}

}  // namespace rselab
