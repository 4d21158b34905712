// Numerical search for rule-satisfying N-photon states, and a statistical
// fingerprint for deciding when two states play the same game.
//
// The search minimizes a penalty objective over raw amplitude reals
// (projected to the unit sphere inside the objective): conflict mass,
// shared-rotation variance of the outcome distribution plus misalignment
// of the rotated state with itself over sampled angles, and
// permutation/mirror asymmetry. The alignment part matters: distribution
// invariance alone has minima that are not rotation eigenvectors.
// Multi-start L-BFGS, deterministic under seed.

#pragma once

#include "qcmab/state.hpp"

namespace qcmab {

struct PenaltyWeights {
  double w_conflict = 1.0;
  double w_invariance = 1.0;  // covers both rotation terms
  double w_permutation = 1.0;
  double w_mirror = 1.0;
};

struct SearchConfig {
  int n_players = 2;
  int theta_samples = 12;  // shared-rotation angles uniform in [0, pi)
  int restarts = 64;
  int max_iterations = 800;
  PenaltyWeights weights;
  double tolerance = 1e-12;  // residual scale; see stopping rule in search
};

void validate(const SearchConfig& config);

/// The penalty objective over x in R^(2 * 2^N), pairs (re, im) per
/// amplitude. Rotation matrices, permutation maps and the mirror map are
/// precomputed at construction.
class SolverObjective {
 public:
  SolverObjective(int n_players, int theta_samples,
                  const PenaltyWeights& weights);

  int n_players() const { return n_players_; }
  int dim() const { return 2 * dim_c_; }

  /// Objective at x. Throws on the zero vector.
  double value(const Eigen::VectorXd& x) const;

  /// Objective and its analytic gradient with respect to x (chain rule
  /// through the sphere projection included).
  double value_and_gradient(const Eigen::VectorXd& x,
                            Eigen::VectorXd& grad) const;

  /// Packs a state's amplitudes into objective coordinates.
  static Eigen::VectorXd pack(const StateVector& state);
  /// Normalizes x and unpacks it into a state.
  StateVector unpack(const Eigen::VectorXd& x) const;

 private:
  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const;

  int n_players_;
  int dim_c_;
  PenaltyWeights weights_;
  std::vector<Eigen::MatrixXcd> rotations_;      // one per theta sample
  std::vector<std::vector<int>> permutations_;   // non-identity outcome maps
  std::vector<int> mirror_;
};

struct SearchResult {
  StateVector state;
  double objective = 0.0;
  int best_restart = -1;
  long total_iterations = 0;
};

/// Multi-start minimization; the best restart wins, ties broken by lowest
/// restart index. Bit-reproducible for a fixed rng state.
SearchResult search_state(const SearchConfig& config, Rng& rng);

/// Per-grid-point sorted outcome probabilities over relative measurement
/// angles (player 1 pinned to 0), with the point rows themselves ordered by
/// a fixed noise-tolerant projection key. Entry sort quotients out outcome
/// relabeling, row ordering quotients out player permutation, so equivalent
/// states compare equal no matter how their players are numbered.
struct Fingerprint {
  int n_players = 0;
  Eigen::MatrixXd rows;  // one row per grid point, entries ascending

  int points() const { return static_cast<int>(rows.rows()); }
};

/// Grid: multiples of 15 degrees per relative angle; if the full product
/// grid exceeds 4096 points it is subsampled to 4096 with a fixed internal
/// seed, so fingerprints of same-N states stay comparable.
Fingerprint fingerprint(const StateVector& state);

/// Max absolute entry difference. Throws on player-count mismatch.
double fingerprint_distance(const Fingerprint& a, const Fingerprint& b);

/// Equivalence := fingerprint distance < tol.
bool states_equivalent(const StateVector& a, const StateVector& b,
                       double tol = 1e-6);

}  // namespace qcmab
