#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rselab/rselab.h"

namespace {

constexpr int kExitInvalid = 1;

struct Scenario {
  rse_scenario* handle = nullptr;
  ~Scenario() { rse_scenario_destroy(handle); }
};

bool fail(rse_status st) {
  if (st == RSE_OK) return false;
  std::cerr << "error: " << rse_last_error_message() << '\n';
  return true;
}

/// "builtin:NAME" selects a bundled scenario, anything else is a file path.
rse_status open_scenario(const std::string& spec, Scenario& s) {
  const std::string prefix = "builtin:";
  rse_status st = spec.rfind(prefix, 0) == 0 ? rse_scenario_builtin(spec.substr(prefix.size()).c_str(), &s.handle)
                                             : rse_scenario_load(spec.c_str(), &s.handle);
  if (st != RSE_OK) return st;
  if (const char* env = std::getenv("RSE_LAB_SEED")) {
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      std::cerr << "warning: ignoring non-numeric RSE_LAB_SEED\n";
    } else {
      st = rse_scenario_set_seed(s.handle, seed);
    }
  }
  return st;
}

void print_report(char* report) {
  if (report) std::cout << report << '\n';
  rse_free_string(report);
}

constexpr const char* kStatKeys[] = {"decodes", "supports_tested", "oracle_iterations", "indeterminate",
                                     "indeterminate_rate"};

/// Decoder counters stay in the report only with --stats.
void print_simulation_report(char* report, bool stats, const std::string& label) {
  auto j = nlohmann::json::parse(report ? report : "{}");
  rse_free_string(report);
  if (stats) {
    std::cerr << label << ':';
    for (const char* key : kStatKeys) {
      if (j.contains(key)) std::cerr << ' ' << key << '=' << j[key].dump();
    }
    std::cerr << '\n';
  } else {
    for (const char* key : kStatKeys) j.erase(key);
  }
  std::cout << j.dump(2) << '\n';
}

int run_analyze(const std::string& config) {
  Scenario s;
  if (fail(open_scenario(config, s))) return kExitInvalid;
  char* report = nullptr;
  int code = 0;
  if (fail(rse_analyze(s.handle, &report, &code))) return kExitInvalid;
  print_report(report);
  return code;
}

int run_simulate_one(const std::string& config, const std::string& attack_file, const std::string& trace,
                     bool stats, std::mutex* io) {
  Scenario s;
  char* report = nullptr;
  int code = 0;
  rse_status st = open_scenario(config, s);
  if (st == RSE_OK && !trace.empty()) st = rse_scenario_set_trace_path(s.handle, trace.c_str());
  if (st == RSE_OK) st = rse_simulate(s.handle, attack_file.empty() ? nullptr : attack_file.c_str(), &report, &code);
  std::unique_lock<std::mutex> lock;
  if (io) lock = std::unique_lock<std::mutex>(*io);
  if (st != RSE_OK) {
    std::cerr << "error: " << config << ": " << rse_last_error_message() << '\n';
    return kExitInvalid;
  }
  print_simulation_report(report, stats, config);
  if (code == 4) std::cerr << "warning: decoder indeterminate rate above 1%\n";
  return code;
}

int run_batch(const std::vector<std::string>& configs, unsigned threads, bool stats) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{0};
  std::mutex io;
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        const int code = run_simulate_one(configs[i], "", "", stats, &io);
        int cur = worst.load();
        while (code > cur && !worst.compare_exchange_weak(cur, code)) {
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  return worst.load();
}

int run_attack(const std::string& config, const std::string& out) {
  Scenario s;
  if (fail(open_scenario(config, s))) return kExitInvalid;
  char* report = nullptr;
  if (fail(rse_synthesize_attack(s.handle, out.empty() ? nullptr : out.c_str(), &report))) return kExitInvalid;
  print_report(report);
  return 0;
}

int run_decode(const std::string& config, const std::string& window) {
  Scenario s;
  if (fail(open_scenario(config, s))) return kExitInvalid;
  char* report = nullptr;
  if (fail(rse_decode_window(s.handle, window.c_str(), &report))) return kExitInvalid;
  print_report(report);
  return 0;
}

int run_reproduce(const std::string& figure, const std::string& out_dir, unsigned long long seed) {
  if (const char* env = std::getenv("RSE_LAB_SEED")) seed = std::strtoull(env, nullptr, 10);
  char* report = nullptr;
  if (fail(rse_reproduce(figure.c_str(), out_dir.c_str(), seed, &report))) return kExitInvalid;
  print_report(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient state estimation lab: attackability analysis, attack synthesis and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rse_version());

  std::string config, attack_file, trace, out, window, figure = "all", out_dir = "figures";
  std::vector<std::string> batch;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool stats = false;
  unsigned long long seed = 1;

  auto* analyze = app.add_subcommand("analyze", "Attackability verdicts and policy checks (exit 0 not PA, 2 PA, 3 borderline)");
  analyze->add_option("config", config, "Scenario JSON file or builtin:NAME")->required();

  auto* simulate = app.add_subcommand("simulate", "Run the closed loop and print a summary");
  simulate->add_option("config", config, "Scenario JSON file or builtin:NAME");
  simulate->add_option("--attack-file", attack_file, "Attack plan CSV (t,a_1..a_p) overriding the config");
  simulate->add_option("--trace", trace, "Write the per-step trace CSV here");
  simulate->add_flag("--stats", stats, "Report decoder statistics");
  simulate->add_option("--batch", batch, "Run several scenario files in parallel")->expected(1, -1);
  simulate->add_option("--threads", threads, "Worker threads for --batch");

  auto* attack = app.add_subcommand("attack", "Synthesize the configured attack and write it as CSV");
  attack->add_option("config", config, "Scenario JSON file or builtin:NAME")->required();
  attack->add_option("-o,--output", out, "Output CSV (defaults to output.attack of the config)");

  auto* decode = app.add_subcommand("decode", "Decode one window (CSV: N rows by p sensor columns)");
  decode->add_option("config", config, "Scenario JSON file or builtin:NAME")->required();
  decode->add_option("window", window, "Window CSV")->required()->check(CLI::ExistingFile);

  auto* reproduce = app.add_subcommand("reproduce", "Regenerate the vehicle case-study series");
  reproduce->add_option("figure", figure, "fig2a, fig2b, fig2c, fig3 or all")
      ->check(CLI::IsMember({"fig2a", "fig2b", "fig2c", "fig3", "all"}));
  reproduce->add_option("-o,--out", out_dir, "Output directory");
  reproduce->add_option("--seed", seed, "Noise seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (*analyze) return run_analyze(config);
  if (*simulate) {
    if (!batch.empty()) return run_batch(batch, threads, stats);
    if (config.empty()) {
      std::cerr << "error: simulate needs a config or --batch\n";
      return kExitInvalid;
    }
    return run_simulate_one(config, attack_file, trace, stats, nullptr);
  }
  if (*attack) return run_attack(config, out);
  if (*decode) return run_decode(config, window);
  if (*reproduce) return run_reproduce(figure, out_dir, seed);
  return kExitInvalid;
}
