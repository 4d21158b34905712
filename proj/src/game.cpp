#include "qcmab/game.hpp"

#include <cmath>

namespace qcmab {

void validate(const MachineConfig& machines) {
  const bool ok_a = machines.p_a >= 0.0 && machines.p_a <= 1.0;
  const bool ok_b = machines.p_b >= 0.0 && machines.p_b <= 1.0;
  if (!ok_a || !ok_b)
    throw std::invalid_argument("machine probabilities must lie in [0, 1]");
}

Eigen::VectorXd split_rewards(int outcome, int n_players, int x_a, int x_b) {
  if (n_players < 1) throw std::invalid_argument("split_rewards: no players");
  const int n_b = __builtin_popcount(static_cast<unsigned>(outcome));
  const int n_a = n_players - n_b;
  Eigen::VectorXd rewards = Eigen::VectorXd::Zero(n_players);
  for (int p = 1; p <= n_players; ++p) {
    if (player_bit(outcome, p, n_players))
      rewards(p - 1) = x_b ? 1.0 / n_b : 0.0;
    else
      rewards(p - 1) = x_a ? 1.0 / n_a : 0.0;
  }
  return rewards;
}

TurnResult play_turn(const OutcomeDistribution& dist,
                     const MachineConfig& machines, Rng& rng) {
  validate(machines);
  TurnResult turn;
  turn.outcome = sample_outcome(dist, rng);
  turn.x_a = rng.bernoulli(machines.p_a) ? 1 : 0;
  turn.x_b = rng.bernoulli(machines.p_b) ? 1 : 0;
  turn.rewards = split_rewards(turn.outcome, dist.n_players, turn.x_a,
                               turn.x_b);
  return turn;
}

TurnResult play_turn(const StateVector& state, const AngleConfig& angles,
                     const MachineConfig& machines, Rng& rng) {
  return play_turn(outcome_distribution(apply_rotations(state, angles)),
                   machines, rng);
}

double jain_index(const Eigen::VectorXd& rewards) {
  const auto n = rewards.size();
  if (n < 1) throw std::invalid_argument("jain_index: empty rewards");
  const double sum = rewards.sum();
  const double sum_sq = rewards.squaredNorm();
  if (sum_sq == 0.0) return 1.0;
  return sum * sum / (static_cast<double>(n) * sum_sq);
}

std::optional<double> pondered_index(const RewardLedger& ledger) {
  const double payout = ledger.x_a + ledger.x_b;
  if (payout <= 0.0) return std::nullopt;
  return jain_index(ledger.rewards) * ledger.rewards.sum() / payout;
}

Eigen::VectorXd expected_rewards(const StateVector& state,
                                 const AngleConfig& angles,
                                 const MachineConfig& machines) {
  validate(machines);
  const int n = state.n_players;
  const OutcomeDistribution dist =
      outcome_distribution(apply_rotations(state, angles));
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(n);
  for (int o = 0; o < dist.dimension(); ++o) {
    const double p = dist.probs(o);
    if (p == 0.0) continue;
    const int n_b = __builtin_popcount(static_cast<unsigned>(o));
    const int n_a = n - n_b;
    for (int j = 1; j <= n; ++j) {
      const double share = player_bit(o, j, n) ? machines.p_b / n_b
                                               : machines.p_a / n_a;
      expected(j - 1) += p * share;
    }
  }
  return expected;
}

double conflict_probability(const StateVector& state,
                            const AngleConfig& angles) {
  const OutcomeDistribution dist =
      outcome_distribution(apply_rotations(state, angles));
  return dist.probs(0) + dist.probs(dist.dimension() - 1);
}

ExactTurnMetrics exact_turn_metrics(const StateVector& state,
                                    const AngleConfig& angles,
                                    const MachineConfig& machines) {
  ExactTurnMetrics m;
  m.expected = expected_rewards(state, angles, machines);
  m.total = m.expected.sum();
  m.jain = jain_index(m.expected);
  m.conflict = conflict_probability(state, angles);
  const double denom = machines.p_a + machines.p_b;
  if (denom > 0.0) m.ip = m.jain * m.total / denom;
  return m;
}

}  // namespace qcmab
