// Decentralized realignment controllers and episode/experiment runners.
//
// An agent sees exactly two things: its own scalar reward each turn and the
// static player count. A reward of exactly 1/N can only mean everyone stood
// at the same paying machine, so agents count those full-conflict events in
// a bounded memory and realign when the count crosses a threshold.

#pragma once

#include <deque>
#include <vector>

#include "qcmab/game.hpp"
#include "qcmab/state.hpp"

namespace qcmab {

enum class Policy { passive, random_realign, incremental };

Policy policy_from_name(const std::string& name);
const char* policy_name(Policy policy);

struct RealignParams {
  int memory_capacity = 8;
  int conflict_threshold = 2;
  double angle_step_deg = 5.0;
  double angle_domain_deg = 360.0;

  int domain_points() const {
    return static_cast<int>(angle_domain_deg / angle_step_deg + 0.5);
  }
};

struct AgentState {
  Policy policy = Policy::passive;
  RealignParams params;
  double angle_deg = 0.0;
  std::deque<char> memory;  // 1 = full-conflict flag, newest at the back

  int conflict_count() const {
    int count = 0;
    for (char flag : memory) count += flag;
    return count;
  }
};

/// Records the turn in the agent's memory. Only a strictly positive reward
/// is a reward-giving event; the stored flag marks the full-conflict share
/// of exactly 1/n_players.
void observe(AgentState& agent, double own_reward, int n_players);

/// Redraws the angle uniformly from the discrete domain and clears memory,
/// once enough conflict flags have accumulated. Returns true if it moved.
bool random_realign_step(AgentState& agent, Rng& rng);

/// Advances the angle by one step (wrapping at the domain) and clears
/// memory, under the same trigger. Returns true if it moved.
bool incremental_realign_step(AgentState& agent);

/// Dispatch on the agent's policy; passive agents never move.
bool policy_step(AgentState& agent, Rng& rng);

enum class EvalMode { exact, monte_carlo };

struct EpisodeConfig {
  StateVector state;
  MachineConfig machines;
  std::vector<Policy> policies;             // one per player
  std::vector<double> initial_angles_deg;   // empty: drawn from the grid
  long horizon = 2000;
  std::vector<long> checkpoints;            // sorted, within [1, horizon]
  EvalMode eval_mode = EvalMode::exact;
  long mc_eval_trials = 1000;
  RealignParams params;
  RngSeed seed = 1;
};

void validate(const EpisodeConfig& config);

/// Roughly log-spaced turn numbers from 1 to horizon, deduplicated,
/// always ending at horizon.
std::vector<long> log_checkpoints(long horizon, int count);

/// Snapshot taken at a checkpoint turn, after that turn's realignments.
/// In exact mode `expected` and `ip` come from closed-form expectations at
/// the frozen angles; in Monte Carlo mode from a fresh block of trials at
/// the frozen angles on an independent substream.
struct CheckpointRow {
  long turn = 0;
  Eigen::VectorXd angles_deg;
  std::optional<double> ip;
  Eigen::VectorXd expected;
  double jain = 0.0;
  double total = 0.0;
  double conflict = 0.0;
};

struct Trajectory {
  std::vector<CheckpointRow> rows;
  Eigen::VectorXd final_angles_deg;
  RewardLedger ledger;

  explicit Trajectory(int n_players) : ledger(n_players) {}
};

Trajectory run_episode(const EpisodeConfig& config, Rng& rng);
Trajectory run_episode(const EpisodeConfig& config);

/// Protocol runner: `initial_configs` random starting angle draws, each
/// rerun `repetitions` times on independent streams, aggregated per
/// checkpoint into mean and standard error.
struct ExperimentConfig {
  EpisodeConfig episode;
  int initial_configs = 100;
  int repetitions = 20;
  RngSeed seed = 1;
};

struct CheckpointStats {
  long turn = 0;
  double ip_mean = 0.0;
  double ip_stderr = 0.0;
  long ip_count = 0;  // runs where ip was defined
  Eigen::VectorXd er_mean;
  Eigen::VectorXd er_stderr;
};

struct ExperimentResult {
  std::vector<CheckpointStats> checkpoints;
  int n_runs = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// run_experiment specialized to mixed active/passive populations; rejects
/// configs without at least one of each.
ExperimentResult stability_experiment(const ExperimentConfig& config);

}  // namespace qcmab
