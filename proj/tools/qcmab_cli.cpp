// Command-line front end: angle-grid metric sweeps, fixed-angle simulation,
// realignment and stability experiments, state certification, state search.
//
// Angles and phases are degrees at this boundary. Exit codes: 0 success,
// 1 a certification or experiment assertion failed, 2 usage or I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcmab/agents.hpp"
#include "qcmab/game.hpp"
#include "qcmab/rules.hpp"
#include "qcmab/solver.hpp"
#include "qcmab/states.hpp"

namespace {

using namespace qcmab;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    values.push_back(std::stod(item, &used));
    if (used != item.size())
      throw std::invalid_argument("bad number \"" + item + "\"");
  }
  return values;
}

/// Output sink: path "-" means stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& out() { return path_ == "-" ? std::cout : file_; }
  void finish() {
    out().flush();
    if (path_ != "-" && !file_)
      throw std::runtime_error("write to " + path_ + " failed");
  }

 private:
  std::string path_;
  std::ofstream file_;
};

void write_json(const nlohmann::json& doc, const std::string& path) {
  Sink sink(path);
  sink.out() << doc.dump(2) << "\n";
  sink.finish();
}

struct GridArgs {
  std::string state_spec = "singlet";
  double step_deg = 5.0;
  int vary = -1;  // -1: all players
  std::string fixed_csv;
  std::string machines_csv = "1,1";
  long mc_trials = 0;
  int mc_reps = 20;
  RngSeed seed = 1;
  std::string out = "-";
};

MachineConfig parse_machines(const std::string& csv) {
  const std::vector<double> v = parse_doubles(csv);
  if (v.size() != 2)
    throw std::invalid_argument("--machines needs two probabilities");
  MachineConfig machines{v[0], v[1]};
  validate(machines);
  return machines;
}

int cmd_grid(const GridArgs& args) {
  const StateVector state = state_from_spec(args.state_spec);
  const MachineConfig machines = parse_machines(args.machines_csv);
  const int n = state.n_players;
  const int vary = args.vary < 0 ? n : args.vary;
  std::vector<double> fixed;
  if (!args.fixed_csv.empty()) fixed = parse_doubles(args.fixed_csv);
  if (vary < 1 || vary > n)
    throw std::invalid_argument("--vary must lie in [1, n_players]");
  if (static_cast<int>(fixed.size()) != n - vary)
    throw std::invalid_argument("need exactly n_players - vary fixed angles");
  if (args.step_deg <= 0 ||
      std::abs(180.0 / args.step_deg -
               std::lround(180.0 / args.step_deg)) > 1e-9)
    throw std::invalid_argument("--step must divide 180 evenly");
  const int steps = static_cast<int>(std::lround(180.0 / args.step_deg));

  Sink sink(args.out);
  std::ostream& out = sink.out();
  for (int j = 1; j <= n; ++j) out << "theta_" << j << ",";
  for (int j = 1; j <= n; ++j) out << "er_" << j << ",";
  out << "total_er,jain,conflict,ip_exact";
  if (args.mc_trials > 0) out << ",total_mc,jain_mc,ip_mc";
  out << "\n";

  const Rng mc_root(args.seed);
  std::vector<int> tuple(vary, 0);
  long point_index = 0;
  while (true) {
    Eigen::VectorXd deg(n);
    for (int j = 0; j < vary; ++j) deg(j) = tuple[j] * args.step_deg;
    for (int j = vary; j < n; ++j) deg(j) = fixed[j - vary];
    const AngleConfig angles = AngleConfig::from_degrees(deg);
    const ExactTurnMetrics m = exact_turn_metrics(state, angles, machines);

    for (int j = 0; j < n; ++j) out << fmt(deg(j)) << ",";
    for (int j = 0; j < n; ++j) out << fmt(m.expected(j)) << ",";
    out << fmt(m.total) << "," << fmt(m.jain) << "," << fmt(m.conflict)
        << "," << (m.ip ? fmt(*m.ip) : "");

    if (args.mc_trials > 0) {
      const OutcomeDistribution dist =
          outcome_distribution(apply_rotations(state, angles));
      double total_sum = 0.0, jain_sum = 0.0, ip_sum = 0.0;
      long ip_count = 0;
      for (int rep = 0; rep < args.mc_reps; ++rep) {
        Rng rng = mc_root.derive(
            static_cast<RngSeed>(point_index * 1000003L + rep));
        RewardLedger ledger(n);
        for (long t = 0; t < args.mc_trials; ++t)
          ledger.add(play_turn(dist, machines, rng));
        total_sum += ledger.rewards.sum() / ledger.turns;
        jain_sum += jain_index(ledger.rewards);
        if (auto ip = pondered_index(ledger)) {
          ip_sum += *ip;
          ++ip_count;
        }
      }
      out << "," << fmt(total_sum / args.mc_reps) << ","
          << fmt(jain_sum / args.mc_reps) << ","
          << (ip_count > 0 ? fmt(ip_sum / ip_count) : "");
    }
    out << "\n";

    ++point_index;
    int j = vary - 1;
    for (; j >= 0; --j) {
      if (++tuple[j] < steps) break;
      tuple[j] = 0;
    }
    if (j < 0) break;
  }
  sink.finish();
  return 0;
}

struct SimulateArgs {
  std::string state_spec = "singlet";
  std::string angles_csv;
  std::string machines_csv = "1,1";
  long turns = 1000;
  RngSeed seed = 1;
  std::string out = "-";
  std::string per_turn_csv;
};

int cmd_simulate(const SimulateArgs& args) {
  const StateVector state = state_from_spec(args.state_spec);
  const MachineConfig machines = parse_machines(args.machines_csv);
  const int n = state.n_players;
  std::vector<double> deg(n, 0.0);
  if (!args.angles_csv.empty()) deg = parse_doubles(args.angles_csv);
  if (static_cast<int>(deg.size()) != n)
    throw std::invalid_argument("--angles needs one angle per player");
  if (args.turns < 1) throw std::invalid_argument("--turns must be >= 1");

  const AngleConfig angles = AngleConfig::from_degrees(
      Eigen::Map<const Eigen::VectorXd>(deg.data(), n));
  const OutcomeDistribution dist =
      outcome_distribution(apply_rotations(state, angles));

  std::optional<Sink> per_turn;
  if (!args.per_turn_csv.empty()) {
    per_turn.emplace(args.per_turn_csv);
    per_turn->out() << "turn,outcome,x_a,x_b";
    for (int j = 1; j <= n; ++j) per_turn->out() << ",reward_" << j;
    per_turn->out() << "\n";
  }

  Rng rng(args.seed);
  RewardLedger ledger(n);
  for (long t = 1; t <= args.turns; ++t) {
    const TurnResult turn = play_turn(dist, machines, rng);
    ledger.add(turn);
    if (per_turn) {
      per_turn->out() << t << "," << outcome_label(turn.outcome, n) << ","
                      << turn.x_a << "," << turn.x_b;
      for (int j = 0; j < n; ++j)
        per_turn->out() << "," << fmt(turn.rewards(j));
      per_turn->out() << "\n";
    }
  }
  if (per_turn) per_turn->finish();

  const ExactTurnMetrics exact = exact_turn_metrics(state, angles, machines);
  nlohmann::json doc{
      {"state", args.state_spec},
      {"n_players", n},
      {"angles_deg", deg},
      {"turns", args.turns},
      {"seed", args.seed},
      {"rewards", std::vector<double>(ledger.rewards.data(),
                                      ledger.rewards.data() + n)},
      {"x_a", ledger.x_a},
      {"x_b", ledger.x_b},
      {"jain", jain_index(ledger.rewards)},
      {"exact",
       {{"expected", std::vector<double>(exact.expected.data(),
                                         exact.expected.data() + n)},
        {"total", exact.total},
        {"jain", exact.jain},
        {"conflict", exact.conflict}}}};
  if (auto ip = pondered_index(ledger)) doc["ip"] = *ip;
  else doc["ip"] = nullptr;
  if (exact.ip) doc["exact"]["ip_exact"] = *exact.ip;
  else doc["exact"]["ip_exact"] = nullptr;
  write_json(doc, args.out);
  return 0;
}

struct ExperimentArgs {
  std::string state_spec = "singlet";
  std::string policies_csv = "random,random";
  std::string machines_csv = "1,1";
  long horizon = 2000;
  int checkpoints = 20;
  std::string eval_mode = "mc";
  long mc_trials = 1000;
  int inits = 100;
  int reps = 20;
  RngSeed seed = 1;
  std::string out = "-";
};

ExperimentConfig build_experiment(const ExperimentArgs& args) {
  ExperimentConfig config;
  config.episode.state = state_from_spec(args.state_spec);
  config.episode.machines = parse_machines(args.machines_csv);
  std::stringstream ss(args.policies_csv);
  std::string name;
  while (std::getline(ss, name, ','))
    config.episode.policies.push_back(policy_from_name(name));
  config.episode.horizon = args.horizon;
  config.episode.checkpoints = log_checkpoints(args.horizon, args.checkpoints);
  if (args.eval_mode == "exact")
    config.episode.eval_mode = EvalMode::exact;
  else if (args.eval_mode == "mc")
    config.episode.eval_mode = EvalMode::monte_carlo;
  else
    throw std::invalid_argument("--eval must be exact or mc");
  config.episode.mc_eval_trials = args.mc_trials;
  config.initial_configs = args.inits;
  config.repetitions = args.reps;
  config.seed = args.seed;
  return config;
}

void write_experiment_csv(const ExperimentResult& result, int n_players,
                          const std::string& path) {
  Sink sink(path);
  std::ostream& out = sink.out();
  out << "turn,n_runs,ip_count,ip_mean,ip_stderr";
  for (int j = 1; j <= n_players; ++j) out << ",er_mean_" << j;
  for (int j = 1; j <= n_players; ++j) out << ",er_stderr_" << j;
  out << "\n";
  for (const CheckpointStats& cp : result.checkpoints) {
    out << cp.turn << "," << result.n_runs << "," << cp.ip_count << ","
        << (cp.ip_count > 0 ? fmt(cp.ip_mean) : "") << ","
        << (cp.ip_count > 0 ? fmt(cp.ip_stderr) : "");
    for (int j = 0; j < n_players; ++j) out << "," << fmt(cp.er_mean(j));
    for (int j = 0; j < n_players; ++j) out << "," << fmt(cp.er_stderr(j));
    out << "\n";
  }
  sink.finish();
}

int cmd_realign(const ExperimentArgs& args) {
  const ExperimentConfig config = build_experiment(args);
  const ExperimentResult result = run_experiment(config);
  write_experiment_csv(result, config.episode.state.n_players, args.out);
  return 0;
}

int cmd_stability(const ExperimentArgs& args) {
  const ExperimentConfig config = build_experiment(args);
  const ExperimentResult result = stability_experiment(config);
  write_experiment_csv(result, config.episode.state.n_players, args.out);
  return 0;
}

struct VerifyArgs {
  std::string state_spec;
  double tolerance = 1e-9;
  std::string out = "-";
  std::string save_state_path;
};

int cmd_verify(const VerifyArgs& args) {
  std::string warning;
  StateVector state;
  if (args.state_spec.rfind("file:", 0) == 0)
    state = load_state(args.state_spec.substr(5), &warning);
  else
    state = state_from_spec(args.state_spec);
  if (!warning.empty()) std::cerr << "warning: " << warning << "\n";

  const CertificationReport report = certify(state, args.tolerance);
  const CoefficientConditions conditions = check_coefficient_conditions(state);
  nlohmann::json doc{{"state", args.state_spec},
                     {"n_players", state.n_players},
                     {"certification", to_json(report)},
                     {"coefficient_conditions", to_json(conditions)}};
  write_json(doc, args.out);
  if (!args.save_state_path.empty()) save_state(state, args.save_state_path);
  return report.all_pass() ? 0 : 1;
}

struct SolveArgs {
  int n_players = 3;
  int restarts = 64;
  int theta_samples = 12;
  int max_iterations = 800;
  double tolerance = 1e-12;
  RngSeed seed = 1;
  std::string state_out = "solved_state.json";
  std::string report_out = "-";
};

int cmd_solve(const SolveArgs& args) {
  SearchConfig config;
  config.n_players = args.n_players;
  config.restarts = args.restarts;
  config.theta_samples = args.theta_samples;
  config.max_iterations = args.max_iterations;
  config.tolerance = args.tolerance;

  Rng rng(args.seed);
  const SearchResult result = search_state(config, rng);
  save_state(result.state, args.state_out);

  const CertificationReport report = certify(result.state);
  nlohmann::json doc{{"n_players", args.n_players},
                     {"seed", args.seed},
                     {"restarts", args.restarts},
                     {"theta_samples", args.theta_samples},
                     {"max_iterations", args.max_iterations},
                     {"objective", result.objective},
                     {"best_restart", result.best_restart},
                     {"total_iterations", result.total_iterations},
                     {"state_file", args.state_out},
                     {"certification", to_json(report)}};
  write_json(doc, args.report_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled-photon competitive bandit toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Config file with key=value lines");

  GridArgs grid;
  CLI::App* grid_cmd =
      app.add_subcommand("grid", "Exact metrics over an angle grid (CSV)");
  grid_cmd->add_option("--state", grid.state_spec, "State spec");
  grid_cmd->add_option("--step", grid.step_deg, "Grid step, degrees");
  grid_cmd->add_option("--vary", grid.vary,
                       "How many leading players scan the grid");
  grid_cmd->add_option("--fixed", grid.fixed_csv,
                       "Fixed trailing angles, degrees, comma separated");
  grid_cmd->add_option("--machines", grid.machines_csv,
                       "Machine probabilities p_a,p_b");
  grid_cmd->add_option("--mc-trials", grid.mc_trials,
                       "Add Monte Carlo columns with this many trials");
  grid_cmd->add_option("--mc-reps", grid.mc_reps,
                       "Repetitions for Monte Carlo columns");
  grid_cmd->add_option("--seed", grid.seed, "Seed for Monte Carlo columns")
      ->envname("QCMAB_SEED");
  grid_cmd->add_option("--out", grid.out, "Output CSV path or -");

  SimulateArgs simulate;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Fixed-angle episode summary (JSON, optional turn CSV)");
  simulate_cmd->add_option("--state", simulate.state_spec, "State spec");
  simulate_cmd->add_option("--angles", simulate.angles_csv,
                           "Angles in degrees, comma separated (default 0s)");
  simulate_cmd->add_option("--machines", simulate.machines_csv,
                           "Machine probabilities p_a,p_b");
  simulate_cmd->add_option("--turns", simulate.turns, "Turn count");
  simulate_cmd->add_option("--seed", simulate.seed, "Seed")
      ->envname("QCMAB_SEED");
  simulate_cmd->add_option("--out", simulate.out, "Summary JSON path or -");
  simulate_cmd->add_option("--per-turn", simulate.per_turn_csv,
                           "Optional per-turn CSV path");

  ExperimentArgs realign;
  CLI::App* realign_cmd = app.add_subcommand(
      "realign", "Realignment convergence experiment (CSV curves)");
  ExperimentArgs stability;
  stability.policies_csv = "random,passive,passive";
  stability.state_spec = "psi3";
  stability.horizon = 10000;
  stability.checkpoints = 14;
  stability.inits = 30;
  stability.reps = 10;
  CLI::App* stability_cmd = app.add_subcommand(
      "stability", "Mixed active/passive reward curves (CSV)");
  for (auto [cmd, args] : {std::pair{realign_cmd, &realign},
                           std::pair{stability_cmd, &stability}}) {
    cmd->add_option("--state", args->state_spec, "State spec");
    cmd->add_option("--policies", args->policies_csv,
                    "Per-player policies, comma separated");
    cmd->add_option("--machines", args->machines_csv,
                    "Machine probabilities p_a,p_b");
    cmd->add_option("--horizon", args->horizon, "Turns per episode");
    cmd->add_option("--checkpoints", args->checkpoints,
                    "Checkpoint count (log spaced)");
    cmd->add_option("--eval", args->eval_mode,
                    "Checkpoint evaluation: exact | mc");
    cmd->add_option("--mc-trials", args->mc_trials,
                    "Trials per Monte Carlo checkpoint estimate");
    cmd->add_option("--inits", args->inits, "Initial angle draws");
    cmd->add_option("--reps", args->reps, "Repetitions per draw");
    cmd->add_option("--seed", args->seed, "Seed")->envname("QCMAB_SEED");
    cmd->add_option("--out", args->out, "Output CSV path or -");
  }

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Certify a state against the design rules (JSON report)");
  verify_cmd
      ->add_option("spec", verify.state_spec,
                   "State spec (family or file:<path>)")
      ->required();
  verify_cmd->add_option("--tolerance", verify.tolerance, "Pass threshold");
  verify_cmd->add_option("--out", verify.out, "Report JSON path or -");
  verify_cmd->add_option("--save-state", verify.save_state_path,
                         "Also write the state to this file");

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "Search for a rule-satisfying state (state file + report)");
  solve_cmd->add_option("--n", solve.n_players, "Player count")->required();
  solve_cmd->add_option("--restarts", solve.restarts, "Search restarts");
  solve_cmd->add_option("--theta-samples", solve.theta_samples,
                        "Shared-rotation samples in the objective");
  solve_cmd->add_option("--max-iters", solve.max_iterations,
                        "Iteration cap per restart");
  solve_cmd->add_option("--tol", solve.tolerance, "Residual tolerance");
  solve_cmd->add_option("--seed", solve.seed, "Seed")->envname("QCMAB_SEED");
  solve_cmd->add_option("--out", solve.state_out, "Output state file");
  solve_cmd->add_option("--report", solve.report_out,
                        "Report JSON path or -");

  try {
    app.parse(argc, argv);
    if (grid_cmd->parsed()) return cmd_grid(grid);
    if (simulate_cmd->parsed()) return cmd_simulate(simulate);
    if (realign_cmd->parsed()) return cmd_realign(realign);
    if (stability_cmd->parsed()) return cmd_stability(stability);
    if (verify_cmd->parsed()) return cmd_verify(verify);
    if (solve_cmd->parsed()) return cmd_solve(solve);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
