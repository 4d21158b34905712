#pragma once

#include "qcmab/state.hpp"

namespace qcmab::testing {

/// Haar-ish random normalized state: i.i.d. box-sampled complex amplitudes,
/// renormalized. Good enough for invariance and false-pass sweeps.
inline StateVector random_state(int n_players, Rng& rng) {
  const int dim = 1 << n_players;
  Eigen::VectorXcd amps(dim);
  for (int k = 0; k < dim; ++k)
    amps(k) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  amps /= amps.norm();
  return StateVector(n_players, amps);
}

inline AngleConfig random_angles(int n_players, Rng& rng) {
  Eigen::VectorXd deg(n_players);
  for (int j = 0; j < n_players; ++j) deg(j) = rng.uniform() * 360.0;
  return AngleConfig::from_degrees(deg);
}

}  // namespace qcmab::testing
