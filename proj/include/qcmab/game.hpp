// Two-machine competitive bandit played through an N-photon state.
//
// Each turn every player measures one photon of the rotated state and walks
// to the machine named by the result, H to machine A and V to machine B.
// Machine k pays 1 with probability p_k; a payout is split equally among the
// players standing at that machine and lost if nobody is.

#pragma once

#include <optional>

#include "qcmab/state.hpp"

namespace qcmab {

struct MachineConfig {
  double p_a = 1.0;
  double p_b = 1.0;
};

void validate(const MachineConfig& machines);

struct TurnResult {
  int outcome = 0;  // joint measurement, one bit per player, V = 1
  int x_a = 0;      // machine payouts this turn
  int x_b = 0;
  Eigen::VectorXd rewards;

  /// True when the player (1-based) selected machine B.
  bool selected_b(int player, int n_players) const {
    return player_bit(outcome, player, n_players) != 0;
  }
};

/// Running totals of an episode. Sum of player rewards never exceeds
/// x_a + x_b since payouts at an empty machine are lost.
struct RewardLedger {
  Eigen::VectorXd rewards;
  double x_a = 0.0;
  double x_b = 0.0;
  long turns = 0;

  explicit RewardLedger(int n_players)
      : rewards(Eigen::VectorXd::Zero(n_players)) {}

  void add(const TurnResult& turn) {
    rewards += turn.rewards;
    x_a += turn.x_a;
    x_b += turn.x_b;
    ++turns;
  }
};

/// Equal split of each machine's payout among the players that chose it.
Eigen::VectorXd split_rewards(int outcome, int n_players, int x_a, int x_b);

/// One turn: sample the joint outcome, then machine A's payout, then
/// machine B's, in that fixed order.
TurnResult play_turn(const OutcomeDistribution& dist,
                     const MachineConfig& machines, Rng& rng);
TurnResult play_turn(const StateVector& state, const AngleConfig& angles,
                     const MachineConfig& machines, Rng& rng);

/// Jain fairness of a reward vector, in [1/n, 1]. All-zero input reads as
/// "no inequality yet" and returns 1.
double jain_index(const Eigen::VectorXd& rewards);

/// Jain fairness times the captured-payout fraction. Empty when no machine
/// has paid anything yet.
std::optional<double> pondered_index(const RewardLedger& ledger);

/// Per-player expected reward of a single turn, by enumeration of all 2^N
/// outcomes. Components sum to p_a P(someone at A) + p_b P(someone at B).
Eigen::VectorXd expected_rewards(const StateVector& state,
                                 const AngleConfig& angles,
                                 const MachineConfig& machines);

/// Probability that every player picks the same machine.
double conflict_probability(const StateVector& state,
                            const AngleConfig& angles);

/// Exact single-turn analogs of the episode metrics.
struct ExactTurnMetrics {
  Eigen::VectorXd expected;   // per-player expected reward
  double total = 0.0;         // sum of expected
  double jain = 0.0;          // fairness of expected
  double conflict = 0.0;
  std::optional<double> ip;   // jain * total / (p_a + p_b)
};

ExactTurnMetrics exact_turn_metrics(const StateVector& state,
                                    const AngleConfig& angles,
                                    const MachineConfig& machines);

}  // namespace qcmab
