// botnet_mfg: command-line front end for the stationary botnet-defense MFG.
//
//   botnet_mfg equilibria --config configs/equal_recovery.cfg --set k_D=0.5
//   botnet_mfg simulate --config configs/equal_recovery.cfg --seed 1 --policy myopic
//
// Exit status: 0 ok, 1 invalid input or failed self-check, 2 config/usage error.
// Errors go to stderr as a single JSON object {"error": code, "message": text}.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "botnet/botnet.hpp"
#include "botnet/io.hpp"
#include "botnet/selfcheck.hpp"

namespace {

using namespace botnet;
using io::ordered_json;

constexpr int kExitInvalid = 1;
constexpr int kExitConfig = 2;

int report_error(const std::string& code, const std::string& message, int status) {
  ordered_json j;
  j["error"] = code;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return status;
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string format = "csv";
  std::string out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "parameter file (KEY = VALUE lines)");
    cmd->add_option("--set", overrides, "override one parameter, KEY=VALUE (repeatable)");
    cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", out, "output file (default: standard output)");
  }

  ModelParams params() const {
    ModelParams p = config.empty() ? ModelParams{} : load_params(config);
    for (const std::string& kv : overrides) apply_override(p, kv);
    p.validate();
    return p;
  }

  bool json() const { return format == "json"; }
};

StateDist parse_state(const std::string& text) {
  std::vector<double> v;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    try {
      v.push_back(parse_decimal(rest.substr(0, comma)));
    } catch (const ConfigParseError&) {
      throw InvalidSimplex("--x needs four comma-separated numbers, got '" + text + "'");
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (v.size() != 4) throw InvalidSimplex("--x needs four comma-separated numbers, got '" + text + "'");
  return StateDist::make(v[0], v[1], v[2], v[3]);
}

// Writes to --out or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidArgument("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

template <typename T>
void emit_records(const Common& c, const std::vector<T>& items) {
  Sink sink(c.out);
  if (c.json())
    sink.stream() << io::to_json_array(items).dump(2) << '\n';
  else
    io::write_csv(sink.stream(), items);
}

struct SimOptions {
  std::int64_t n_agents = 1000;
  double horizon = 10.0;
  std::optional<std::uint64_t> seed;
  std::size_t replicas = 1;
  std::string policy = "fixed:i";
  double sample_interval = 0.1;
  std::string cadence = "interval";
  std::string x0 = "0.25,0.25,0.25,0.25";
  std::string switch_log;
  unsigned threads = 0;
};

int run_simulate(const Common& c, const SimOptions& o) {
  const ModelParams p = c.params();
  SimConfig cfg;
  cfg.n_agents = o.n_agents;
  cfg.horizon = o.horizon;
  cfg.seed = *o.seed;
  cfg.sample_interval = o.sample_interval;
  cfg.x0 = parse_state(o.x0);
  cfg.cadence = o.cadence == "event" ? Cadence::kPerEvent : Cadence::kPerInterval;
  if (o.policy == "myopic") {
    cfg.policy = PolicyKind::kMyopic;
  } else if (o.policy.rfind("fixed:", 0) == 0) {
    const auto sc = parse_case(o.policy.substr(6));
    if (!sc) throw InvalidArgument("unknown case in --policy '" + o.policy + "'");
    cfg.policy = PolicyKind::kFixed;
    cfg.control = control_of(*sc);
  } else {
    throw InvalidArgument("--policy must be fixed:<i|ii|iii|iv> or myopic");
  }
  cfg.validate();
  if (o.replicas < 1) throw InvalidArgument("--replicas must be at least 1");

  // Replica r uses seed + r; replicas run concurrently and are emitted in order.
  std::vector<SimResult> results(o.replicas);
  const auto run = [&](std::size_t r) {
    SimConfig rc = cfg;
    rc.seed = cfg.seed + r;
    results[r] = simulate(p, rc);
  };
  unsigned workers = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, o.replicas));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t r = w; r < o.replicas; r += workers) run(r);
    });
  for (auto& t : pool) t.join();

  Sink sink(c.out);
  if (c.json()) {
    ordered_json doc = ordered_json::array();
    for (std::size_t r = 0; r < results.size(); ++r) {
      ordered_json j;
      j["replica"] = r;
      j["seed"] = cfg.seed + r;
      j["events"] = results[r].events;
      j["trajectory"] = io::trajectory_json(results[r], true);
      if (cfg.policy == PolicyKind::kMyopic) {
        j["switches"] = io::to_json_array(results[r].switches);
        j["no_solution_times"] = results[r].no_solution_times;
      }
      doc.push_back(j);
    }
    sink.stream() << doc.dump(2) << '\n';
  } else {
    std::vector<io::TrajectoryRun> runs;
    for (std::size_t r = 0; r < results.size(); ++r) runs.push_back({&results[r], r});
    io::write_trajectory_csv(sink.stream(), runs, true);
  }
  if (!o.switch_log.empty()) {
    Sink log(o.switch_log);
    std::vector<SwitchRecord> all;
    for (const SimResult& r : results) all.insert(all.end(), r.switches.begin(), r.switches.end());
    io::write_switch_csv(log.stream(), all);
  }
  return 0;
}

int run_validate(const Common& c, std::uint64_t seed, std::uint64_t trials) {
  const auto results = run_self_check(seed, trials);
  Sink sink(c.out);
  std::uint64_t failures = 0;
  ordered_json rows = ordered_json::array();
  for (const CheckResult& r : results) {
    ordered_json j;
    j["check"] = r.name;
    j["trials"] = r.trials;
    j["failures"] = r.failures;
    j["worst"] = r.worst;
    j["status"] = r.failures == 0 ? "pass" : "fail";
    rows.push_back(j);
    failures += r.failures;
  }
  if (c.json())
    sink.stream() << rows.dump(2) << '\n';
  else
    io::write_csv(sink.stream(), rows.front(), rows);
  if (failures > 0)
    return report_error("validation_failed", std::to_string(failures) + " self-check failures",
                        kExitInvalid);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary mean-field game of botnet defense"};
  app.require_subcommand(1);

  Common common;
  std::string x_text;
  double kappa_min = 0.0;
  double kappa_max = 1.0;
  std::size_t steps = 200;
  double window = 10.0;
  unsigned threads = 0;
  bool asymptotic = false;
  SimOptions sim;
  std::uint64_t trials = 1000;

  auto* hjb = app.add_subcommand("hjb", "all stationary HJB solutions at a fixed distribution x");
  common.attach(hjb);
  hjb->add_option("--x", x_text, "x_DI,x_DS,x_UI,x_US")->required();

  auto* fps = app.add_subcommand("fixed-points", "stationary points of every strategy, with stability");
  common.attach(fps);
  fps->add_flag("--asymptotic", asymptotic, "also emit the large-lambda mixed-case points");

  auto* eq = app.add_subcommand("equilibria", "stationary MFG equilibria");
  common.attach(eq);

  auto* thr = app.add_subcommand("thresholds", "bifurcation values of kappa");
  common.attach(thr);

  auto* sweep = app.add_subcommand("sweep", "equilibria over a kappa grid (k_D = kappa k_I)");
  common.attach(sweep);
  sweep->add_option("--kappa-min", kappa_min)->required();
  sweep->add_option("--kappa-max", kappa_max)->required();
  sweep->add_option("--steps", steps)->required();
  sweep->add_option("--window", window, "near_bifurcation tag width times lambda");
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* simulate_cmd = app.add_subcommand("simulate", "exact N-agent simulation");
  common.attach(simulate_cmd);
  simulate_cmd->add_option("--n-agents", sim.n_agents);
  simulate_cmd->add_option("--horizon", sim.horizon);
  simulate_cmd->add_option("--seed", sim.seed)->required();
  simulate_cmd->add_option("--replicas", sim.replicas);
  simulate_cmd->add_option("--policy", sim.policy, "fixed:<i|ii|iii|iv> or myopic");
  simulate_cmd->add_option("--sample-interval", sim.sample_interval);
  simulate_cmd->add_option("--cadence", sim.cadence, "myopic recomputation")
      ->check(CLI::IsMember({"interval", "event"}));
  simulate_cmd->add_option("--x", sim.x0, "initial x_DI,x_DS,x_UI,x_US");
  simulate_cmd->add_option("--switch-log", sim.switch_log, "CSV file for myopic control switches");
  simulate_cmd->add_option("--threads", sim.threads, "worker threads for replicas (0 = all cores)");

  std::uint64_t validate_seed = 0;
  auto* validate = app.add_subcommand("validate", "randomized self-check against the oracle");
  common.attach(validate);
  validate->add_option("--seed", validate_seed)->required();
  validate->add_option("--trials", trials);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage_error", e.what(), kExitConfig);
  }

  try {
    if (*hjb) {
      const ModelParams p = common.params();
      emit_records(common, enumerate_hjb(p, parse_state(x_text)));
    } else if (*fps) {
      const ModelParams p = common.params();
      std::vector<FixedPoint> all;
      for (StrategyCase c : kAllCases)
        for (const FixedPoint& fp : fixed_points(p, c)) all.push_back(fp);
      if (asymptotic) {
        all.push_back(fixed_point_mixed_asymptotic(p, StrategyCase::kDefendSusceptible));
        all.push_back(fixed_point_mixed_asymptotic(p, StrategyCase::kDefendInfected));
      }
      emit_records(common, all);
    } else if (*eq) {
      emit_records(common, solve_mfg(common.params()));
    } else if (*thr) {
      const BifurcationReport r = kappa_thresholds(common.params());
      Sink sink(common.out);
      if (common.json())
        sink.stream() << io::to_json(r).dump(2) << '\n';
      else
        io::write_csv(sink.stream(), r);
    } else if (*sweep) {
      SweepOptions opts;
      opts.window_constant = window;
      opts.threads = threads;
      emit_records(common, sweep_kappa(common.params(), kappa_min, kappa_max, steps, opts));
    } else if (*simulate_cmd) {
      return run_simulate(common, sim);
    } else if (*validate) {
      return run_validate(common, validate_seed, trials);
    }
  } catch (const ConfigParseError& e) {
    return report_error(e.code(), e.what(), kExitConfig);
  } catch (const Error& e) {
    return report_error(e.code(), e.what(), kExitInvalid);
  } catch (const std::exception& e) {
    return report_error("internal_error", e.what(), kExitInvalid);
  }
  return 0;
}
