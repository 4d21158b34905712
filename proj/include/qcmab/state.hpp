// Polarization-encoded N-photon states and per-photon measurement rotations.
//
// Basis convention, used everywhere in this library: photon 1 owns the most
// significant bit of the computational index, H = 0 and V = 1, so for N
// photons the outcome (b_1, ..., b_N) lives at index sum_j b_j * 2^(N-j).
// For N = 3 that means |HHV> <-> 1 and |VHH> <-> 4.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcmab {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Maximum supported photon count; amplitude storage is dense (2^N entries).
inline constexpr int max_players = 16;

inline double deg_to_rad(double deg) { return (deg / 180.0) * pi; }
inline double rad_to_deg(double rad) { return rad * (180.0 / pi); }

/// Cosine/sine pair of a rotation angle. Angles that are exact multiples of
/// a quarter turn snap to {0, +-1} so that identity, half-turn and full-turn
/// rotations act on amplitudes without rounding noise.
struct RotationEntries {
  double c;
  double s;
};

RotationEntries rotation_entries(double theta);

/// 2x2 polarization rotation by theta (radians):
///   |H> -> cos(theta)|H> - sin(theta)|V>,  |V> -> sin(theta)|H> + cos(theta)|V>,
/// i.e. the coefficient pair (a, b) of a|H> + b|V> maps through
/// [[c, s], [-s, c]].
Eigen::Matrix2d single_rotation(double theta);

/// One measurement angle per photon, radians. Photon j (1-based) is angles[j-1].
struct AngleConfig {
  Eigen::VectorXd radians;

  AngleConfig() = default;
  explicit AngleConfig(Eigen::VectorXd r) : radians(std::move(r)) {}

  static AngleConfig zeros(int n_players) {
    return AngleConfig(Eigen::VectorXd::Zero(n_players));
  }
  static AngleConfig from_degrees(const Eigen::VectorXd& deg) {
    return AngleConfig(deg.unaryExpr([](double d) { return deg_to_rad(d); }));
  }
  Eigen::VectorXd to_degrees() const {
    return radians.unaryExpr([](double r) { return r * (180.0 / pi); });
  }

  int size() const { return static_cast<int>(radians.size()); }
};

/// Normalized pure state of n_players polarization qubits.
struct StateVector {
  int n_players = 0;
  Eigen::VectorXcd amplitudes;

  StateVector() = default;
  StateVector(int n, Eigen::VectorXcd amps);

  int dimension() const { return static_cast<int>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }

  /// |basis> with the given computational index.
  static StateVector basis(int n_players, int index);
};

/// Bit of `player` (1-based) inside outcome index `index` for `n_players`.
inline int player_bit(int index, int player, int n_players) {
  return (index >> (n_players - player)) & 1;
}

/// Outcome index as a letter string, photon 1 first, e.g. 5 -> "VHV" for N=3.
std::string outcome_label(int index, int n_players);

/// Outcome index map of a player relabeling: in the returned map's image,
/// player perm[j] (0-based) observes what player j+1 observed. perm must be
/// a permutation of {0, ..., n_players-1}.
std::vector<int> player_permutation_outcome_map(const std::vector<int>& perm,
                                                int n_players);

/// Parse a label like "HVH" back into an outcome index.
int parse_outcome_label(const std::string& label);

/// Applies single_rotation(angles[j]) to photon j+1 of every amplitude pair.
/// The all-zero configuration returns the input bit-for-bit.
StateVector apply_rotations(const StateVector& state, const AngleConfig& angles);

/// In-place rotation kernel on a dense amplitude vector: photon `player`
/// (1-based, MSB-first) of an n_players register, entries from
/// rotation_entries. Generic over the Eigen vector type so expression-backed
/// storage works too.
template <typename Derived>
void rotate_player_in_place(Eigen::MatrixBase<Derived>& amps, int n_players,
                            int player, RotationEntries e) {
  using Scalar = typename Derived::Scalar;
  const int dim = 1 << n_players;
  const int stride = 1 << (n_players - player);
  for (int base = 0; base < dim; base += 2 * stride) {
    for (int off = 0; off < stride; ++off) {
      const int ih = base + off;
      const int iv = ih + stride;
      const Scalar a = amps(ih);
      const Scalar b = amps(iv);
      amps(ih) = e.c * a + e.s * b;
      amps(iv) = -e.s * a + e.c * b;
    }
  }
}

/// Measurement statistics of a state: probs[o] = |amplitudes[o]|^2.
struct OutcomeDistribution {
  int n_players = 0;
  Eigen::VectorXd probs;

  int dimension() const { return static_cast<int>(probs.size()); }
};

/// Born-rule distribution. Throws if the state norm is off by more than 1e-9.
OutcomeDistribution outcome_distribution(const StateVector& state);

using RngSeed = std::uint64_t;

/// Deterministic random source. All randomness in the library flows through
/// this wrapper so that a fixed seed gives bit-identical runs on any platform.
class Rng {
 public:
  explicit Rng(RngSeed seed) : gen_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child generator for a parallel stream or sub-experiment.
  /// Children of distinct streams never share state with the parent.
  Rng derive(RngSeed stream) const;

  RngSeed raw() { return gen_(); }

 private:
  explicit Rng(std::mt19937_64 gen) : gen_(std::move(gen)) {}
  std::mt19937_64 gen_;
};

/// Inverse-CDF draw from a distribution. Outcomes with zero probability are
/// never produced.
int sample_outcome(const OutcomeDistribution& dist, Rng& rng);

}  // namespace qcmab
