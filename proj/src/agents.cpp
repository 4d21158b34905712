#include "qcmab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qcmab {

Policy policy_from_name(const std::string& name) {
  if (name == "passive") return Policy::passive;
  if (name == "random") return Policy::random_realign;
  if (name == "incremental") return Policy::incremental;
  throw std::invalid_argument("unknown policy \"" + name +
                              "\"; expected passive | random | incremental");
}

const char* policy_name(Policy policy) {
  switch (policy) {
    case Policy::passive: return "passive";
    case Policy::random_realign: return "random";
    default: return "incremental";
  }
}

void observe(AgentState& agent, double own_reward, int n_players) {
  if (own_reward <= 0.0) return;
  const bool conflict =
      std::abs(own_reward - 1.0 / n_players) < 1e-9;
  agent.memory.push_back(conflict ? 1 : 0);
  if (static_cast<int>(agent.memory.size()) >
      agent.params.memory_capacity)
    agent.memory.pop_front();
}

namespace {

bool triggered(const AgentState& agent) {
  return agent.conflict_count() >= agent.params.conflict_threshold;
}

}  // namespace

bool random_realign_step(AgentState& agent, Rng& rng) {
  if (!triggered(agent)) return false;
  const int k =
      static_cast<int>(rng.uniform_int(agent.params.domain_points()));
  agent.angle_deg = k * agent.params.angle_step_deg;
  agent.memory.clear();
  return true;
}

bool incremental_realign_step(AgentState& agent) {
  if (!triggered(agent)) return false;
  agent.angle_deg = std::fmod(agent.angle_deg + agent.params.angle_step_deg,
                              agent.params.angle_domain_deg);
  agent.memory.clear();
  return true;
}

bool policy_step(AgentState& agent, Rng& rng) {
  switch (agent.policy) {
    case Policy::random_realign: return random_realign_step(agent, rng);
    case Policy::incremental: return incremental_realign_step(agent);
    default: return false;
  }
}

void validate(const EpisodeConfig& config) {
  const int n = config.state.n_players;
  if (static_cast<int>(config.policies.size()) != n)
    throw std::invalid_argument("episode: one policy per player required");
  if (!config.initial_angles_deg.empty() &&
      static_cast<int>(config.initial_angles_deg.size()) != n)
    throw std::invalid_argument("episode: one initial angle per player");
  if (config.horizon < 1)
    throw std::invalid_argument("episode: horizon must be >= 1");
  for (long cp : config.checkpoints)
    if (cp < 1 || cp > config.horizon)
      throw std::invalid_argument("episode: checkpoint outside [1, horizon]");
  if (std::adjacent_find(config.checkpoints.begin(), config.checkpoints.end(),
                         std::greater_equal<long>()) !=
      config.checkpoints.end())
    throw std::invalid_argument(
        "episode: checkpoints must be strictly increasing");
  if (config.eval_mode == EvalMode::monte_carlo && config.mc_eval_trials < 1)
    throw std::invalid_argument("episode: mc_eval_trials must be >= 1");
  validate(config.machines);
}

std::vector<long> log_checkpoints(long horizon, int count) {
  std::vector<long> cps;
  if (count < 1 || horizon < 1) return cps;
  const double lo = 0.0;
  const double hi = std::log(static_cast<double>(horizon));
  for (int k = 0; k < count; ++k) {
    const double f = (count == 1) ? 1.0 : static_cast<double>(k) / (count - 1);
    const long cp = std::lround(std::exp(lo + f * (hi - lo)));
    cps.push_back(std::clamp(cp, 1L, horizon));
  }
  cps.back() = horizon;
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

namespace {

AngleConfig angles_of(const std::vector<AgentState>& agents) {
  Eigen::VectorXd deg(static_cast<int>(agents.size()));
  for (std::size_t j = 0; j < agents.size(); ++j)
    deg(static_cast<int>(j)) = agents[j].angle_deg;
  return AngleConfig::from_degrees(deg);
}

CheckpointRow evaluate_checkpoint(const EpisodeConfig& config, long turn,
                                  const std::vector<AgentState>& agents,
                                  const OutcomeDistribution& dist,
                                  const Rng& episode_rng) {
  CheckpointRow row;
  row.turn = turn;
  row.angles_deg.resize(static_cast<int>(agents.size()));
  for (std::size_t j = 0; j < agents.size(); ++j)
    row.angles_deg(static_cast<int>(j)) = agents[j].angle_deg;

  const AngleConfig angles = angles_of(agents);
  row.conflict = conflict_probability(config.state, angles);

  if (config.eval_mode == EvalMode::exact) {
    const ExactTurnMetrics m =
        exact_turn_metrics(config.state, angles, config.machines);
    row.expected = m.expected;
    row.jain = m.jain;
    row.total = m.total;
    row.ip = m.ip;
    return row;
  }

  // Monte Carlo estimate at the frozen angles, on a substream that leaves
  // the episode's own stream untouched.
  Rng eval_rng = episode_rng.derive(static_cast<RngSeed>(turn));
  RewardLedger ledger(config.state.n_players);
  for (long t = 0; t < config.mc_eval_trials; ++t)
    ledger.add(play_turn(dist, config.machines, eval_rng));
  row.expected = ledger.rewards / static_cast<double>(ledger.turns);
  row.jain = jain_index(ledger.rewards);
  row.total = row.expected.sum();
  if (auto ip = pondered_index(ledger)) row.ip = *ip;
  return row;
}

}  // namespace

Trajectory run_episode(const EpisodeConfig& config, Rng& rng) {
  validate(config);
  const int n = config.state.n_players;

  std::vector<AgentState> agents(n);
  for (int j = 0; j < n; ++j) {
    agents[j].policy = config.policies[j];
    agents[j].params = config.params;
    if (config.initial_angles_deg.empty()) {
      const int k =
          static_cast<int>(rng.uniform_int(config.params.domain_points()));
      agents[j].angle_deg = k * config.params.angle_step_deg;
    } else {
      agents[j].angle_deg = config.initial_angles_deg[j];
    }
  }

  Trajectory trajectory(n);
  OutcomeDistribution dist =
      outcome_distribution(apply_rotations(config.state, angles_of(agents)));
  std::size_t next_checkpoint = 0;

  for (long t = 1; t <= config.horizon; ++t) {
    const TurnResult turn = play_turn(dist, config.machines, rng);
    trajectory.ledger.add(turn);

    bool moved = false;
    for (int j = 0; j < n; ++j) {
      observe(agents[j], turn.rewards(j), n);
      moved |= policy_step(agents[j], rng);
    }
    if (moved)
      dist = outcome_distribution(
          apply_rotations(config.state, angles_of(agents)));

    if (next_checkpoint < config.checkpoints.size() &&
        config.checkpoints[next_checkpoint] == t) {
      trajectory.rows.push_back(
          evaluate_checkpoint(config, t, agents, dist, rng));
      ++next_checkpoint;
    }
  }

  trajectory.final_angles_deg.resize(n);
  for (int j = 0; j < n; ++j)
    trajectory.final_angles_deg(j) = agents[j].angle_deg;
  return trajectory;
}

Trajectory run_episode(const EpisodeConfig& config) {
  Rng rng(config.seed);
  return run_episode(config, rng);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config.episode);
  if (config.initial_configs < 1 || config.repetitions < 1)
    throw std::invalid_argument("experiment: counts must be >= 1");
  const int n = config.episode.state.n_players;
  const std::size_t n_cps = config.episode.checkpoints.size();
  const Rng root(config.seed);

  // Streaming moments per checkpoint for ip and per-player rewards.
  std::vector<double> ip_sum(n_cps, 0.0), ip_sq(n_cps, 0.0);
  std::vector<long> ip_n(n_cps, 0);
  Eigen::MatrixXd er_sum = Eigen::MatrixXd::Zero(n_cps, n);
  Eigen::MatrixXd er_sq = Eigen::MatrixXd::Zero(n_cps, n);

  int n_runs = 0;
  for (int init = 0; init < config.initial_configs; ++init) {
    // One angle draw per initial configuration, shared by its repetitions.
    Rng angle_rng = root.derive(2 * static_cast<RngSeed>(init));
    EpisodeConfig episode = config.episode;
    if (episode.initial_angles_deg.empty()) {
      episode.initial_angles_deg.resize(n);
      for (int j = 0; j < n; ++j) {
        const int k = static_cast<int>(
            angle_rng.uniform_int(episode.params.domain_points()));
        episode.initial_angles_deg[j] = k * episode.params.angle_step_deg;
      }
    }
    for (int rep = 0; rep < config.repetitions; ++rep) {
      Rng run_rng =
          root.derive(2 * static_cast<RngSeed>(init) + 1).derive(rep);
      const Trajectory trajectory = run_episode(episode, run_rng);
      ++n_runs;
      for (std::size_t c = 0; c < n_cps; ++c) {
        const CheckpointRow& row = trajectory.rows[c];
        if (row.ip) {
          ip_sum[c] += *row.ip;
          ip_sq[c] += *row.ip * *row.ip;
          ++ip_n[c];
        }
        for (int j = 0; j < n; ++j) {
          er_sum(c, j) += row.expected(j);
          er_sq(c, j) += row.expected(j) * row.expected(j);
        }
      }
    }
  }

  auto stderr_of = [](double sum, double sq, long count) {
    if (count < 2) return 0.0;
    const double mean = sum / count;
    const double var = std::max(0.0, (sq - count * mean * mean) / (count - 1));
    return std::sqrt(var / count);
  };

  ExperimentResult result;
  result.n_runs = n_runs;
  for (std::size_t c = 0; c < n_cps; ++c) {
    CheckpointStats stats;
    stats.turn = config.episode.checkpoints[c];
    stats.ip_count = ip_n[c];
    if (ip_n[c] > 0) {
      stats.ip_mean = ip_sum[c] / ip_n[c];
      stats.ip_stderr = stderr_of(ip_sum[c], ip_sq[c], ip_n[c]);
    }
    stats.er_mean.resize(n);
    stats.er_stderr.resize(n);
    for (int j = 0; j < n; ++j) {
      stats.er_mean(j) = er_sum(c, j) / n_runs;
      stats.er_stderr(j) = stderr_of(er_sum(c, j), er_sq(c, j), n_runs);
    }
    result.checkpoints.push_back(std::move(stats));
  }
  return result;
}

ExperimentResult stability_experiment(const ExperimentConfig& config) {
  int active = 0, passive = 0;
  for (Policy p : config.episode.policies)
    (p == Policy::passive ? passive : active) += 1;
  if (active < 1 || passive < 1)
    throw std::invalid_argument(
        "stability experiment needs at least one active and one passive "
        "player");
  return run_experiment(config);
}

}  // namespace qcmab
