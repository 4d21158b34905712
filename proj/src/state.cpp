#include "qcmab/state.hpp"

#include <cmath>

namespace qcmab {

RotationEntries rotation_entries(double theta) {
  // Quarter-turn multiples get exact entries; remainder() is exact, so any
  // theta built as k * (pi/2) in doubles lands here.
  if (std::remainder(theta, pi / 2) == 0.0) {
    const long long q = std::llround(theta / (pi / 2));
    switch (((q % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return {std::cos(theta), std::sin(theta)};
}

Eigen::Matrix2d single_rotation(double theta) {
  const RotationEntries e = rotation_entries(theta);
  Eigen::Matrix2d m;
  m << e.c, e.s, -e.s, e.c;
  return m;
}

StateVector::StateVector(int n, Eigen::VectorXcd amps)
    : n_players(n), amplitudes(std::move(amps)) {
  if (n < 1 || n > max_players)
    throw std::invalid_argument("StateVector: player count " +
                                std::to_string(n) + " outside [1, " +
                                std::to_string(max_players) + "]");
  if (amplitudes.size() != (1LL << n))
    throw std::invalid_argument(
        "StateVector: expected " + std::to_string(1 << n) +
        " amplitudes for " + std::to_string(n) + " players, got " +
        std::to_string(amplitudes.size()));
}

StateVector StateVector::basis(int n_players, int index) {
  if (n_players < 1 || n_players > max_players)
    throw std::invalid_argument("basis: bad player count");
  const int dim = 1 << n_players;
  if (index < 0 || index >= dim) throw std::out_of_range("basis: bad index");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  amps(index) = 1.0;
  return StateVector(n_players, std::move(amps));
}

std::string outcome_label(int index, int n_players) {
  std::string label(n_players, 'H');
  for (int p = 1; p <= n_players; ++p)
    if (player_bit(index, p, n_players)) label[p - 1] = 'V';
  return label;
}

std::vector<int> player_permutation_outcome_map(const std::vector<int>& perm,
                                                int n_players) {
  if (static_cast<int>(perm.size()) != n_players)
    throw std::invalid_argument("permutation size must equal player count");
  std::vector<bool> seen(perm.size(), false);
  for (int target : perm) {
    if (target < 0 || target >= n_players || seen[target])
      throw std::invalid_argument("not a permutation of the players");
    seen[target] = true;
  }
  const int dim = 1 << n_players;
  std::vector<int> map(dim);
  for (int o = 0; o < dim; ++o) {
    int po = 0;
    for (int j = 0; j < n_players; ++j)
      if (player_bit(o, j + 1, n_players)) po |= 1 << (n_players - 1 - perm[j]);
    map[o] = po;
  }
  return map;
}

int parse_outcome_label(const std::string& label) {
  if (label.empty())
    throw std::invalid_argument("outcome label must not be empty");
  int index = 0;
  for (char ch : label) {
    if (ch != 'H' && ch != 'V')
      throw std::invalid_argument("outcome label must use only H and V");
    index = (index << 1) | (ch == 'V' ? 1 : 0);
  }
  return index;
}

StateVector apply_rotations(const StateVector& state,
                            const AngleConfig& angles) {
  if (angles.size() != state.n_players)
    throw std::invalid_argument(
        "apply_rotations: " + std::to_string(angles.size()) +
        " angles for " + std::to_string(state.n_players) + " players");
  StateVector out = state;
  for (int p = 1; p <= state.n_players; ++p) {
    const RotationEntries e = rotation_entries(angles.radians(p - 1));
    if (e.c == 1.0 && e.s == 0.0) continue;
    rotate_player_in_place(out.amplitudes, state.n_players, p, e);
  }
  return out;
}

OutcomeDistribution outcome_distribution(const StateVector& state) {
  const double n = state.norm();
  if (std::abs(n - 1.0) > 1e-9)
    throw std::invalid_argument("outcome_distribution: state norm " +
                                std::to_string(n) + " is not 1");
  OutcomeDistribution dist;
  dist.n_players = state.n_players;
  dist.probs = state.amplitudes.cwiseAbs2();
  return dist;
}

namespace {

// splitmix64 step; mixes a stream index into statistically independent seeds.
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::derive(RngSeed stream) const {
  std::mt19937_64 probe = gen_;
  std::uint64_t x = probe() ^ 0x51f2cd1e8a0c97b3ULL;
  x += stream * 0xd1342543de82ef95ULL;
  std::uint64_t seed = splitmix64(x);
  seed ^= splitmix64(x);
  return Rng(std::mt19937_64(seed));
}

int sample_outcome(const OutcomeDistribution& dist, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = -1;
  for (int o = 0; o < dist.dimension(); ++o) {
    const double p = dist.probs(o);
    if (p <= 0.0) continue;
    acc += p;
    last_positive = o;
    if (u < acc) return o;
  }
  // u fell into the rounding sliver past the accumulated total.
  if (last_positive < 0)
    throw std::invalid_argument("sample_outcome: distribution has no mass");
  return last_positive;
}

}  // namespace qcmab
