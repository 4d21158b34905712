// Certification of N-photon states against the three design rules:
//   1. every player is statistically interchangeable (permutation and
//      H<->V mirror symmetry of the outcome distribution),
//   2. the outcome statistics survive an arbitrary shared basis rotation,
//   3. the all-H and all-V outcomes never occur.
// Plus closed-form coefficient conditions for the three known ansatz shapes.

#pragma once

#include "qcmab/state.hpp"

#include <json.hpp>

namespace qcmab {

/// 0 to 175 degrees in 5 degree steps, as radians. The rotation residuals
/// are trigonometric polynomials of period pi, so for N <= 5 this grid is
/// dense enough to pin their maxima.
Eigen::VectorXd default_theta_grid();

/// Residual of rule 3: p(all H) + p(all V).
double check_no_conflict_terms(const StateVector& state);

/// Operational rule-2 residual: max over theta in the grid and outcomes o of
/// |p_theta(o) - p_0(o)| with every player rotated by the same theta.
double check_rotation_invariance(const StateVector& state,
                                 const Eigen::VectorXd& theta_grid);

/// Strict rule-2 residual: max over theta of 1 - |<psi|R(theta)|psi>|.
/// Zero here means the pure state is an eigenvector of every shared
/// rotation, which implies the operational residual is zero for any basis.
double check_eigenphase(const StateVector& state,
                        const Eigen::VectorXd& theta_grid);

struct PermutationMirrorResidual {
  double permutation;
  double mirror;
};

/// Rule-1 residuals on the unrotated distribution: max over all player
/// permutations pi and outcomes o of |p(o) - p(pi(o))|, and max over o of
/// |p(o) - p(o with H and V swapped)|.
PermutationMirrorResidual check_permutation_mirror(const StateVector& state);

/// Which closed-form ansatz a state's zero pattern fits.
enum class AnsatzShape {
  none,
  three_photon,          // support inside the six mixed N=3 outcomes
  four_photon_symmetric, // support inside the six 2-2 split outcomes
  four_photon_asymmetric // support inside the eight 3-1 split outcomes
};

/// Residuals of the per-ansatz coefficient equations, grouped as the sum
/// condition, the mirror-pair condition and the common-modulus condition.
struct CoefficientConditions {
  AnsatzShape shape = AnsatzShape::none;
  bool applicable = false;
  double residual_sum = 0.0;
  double residual_pair = 0.0;
  double residual_modulus = 0.0;
};

/// Checks the coefficient equations matching the state's zero pattern:
/// three-photon (sum of weight-1 amplitudes zero, weight-2 partner = +-i
/// times the weight-1 partner with one consistent sign, common modulus
/// 1/sqrt(6)); symmetric four-photon (sum zero, mirror-equal pairs, modulus
/// 1/sqrt(6)); asymmetric four-photon (sum zero, mirror-opposite pairs,
/// modulus 1/sqrt(8)). States fitting no shape report applicable = false.
CoefficientConditions check_coefficient_conditions(const StateVector& state);

struct CertificationReport {
  double residual_no_conflict_terms = 0.0;
  double residual_rotation_invariance = 0.0;
  double residual_eigenphase = 0.0;
  double residual_permutation = 0.0;
  double residual_mirror = 0.0;
  double tolerance = 0.0;

  bool pass_no_conflict_terms = false;
  bool pass_rotation_invariance = false;
  bool pass_eigenphase = false;
  bool pass_permutation = false;
  bool pass_mirror = false;

  bool all_pass() const {
    return pass_no_conflict_terms && pass_rotation_invariance &&
           pass_eigenphase && pass_permutation && pass_mirror;
  }
};

/// Runs every check on the default theta grid; pass_X <=> residual_X < tol.
CertificationReport certify(const StateVector& state, double tolerance = 1e-9);

const char* ansatz_name(AnsatzShape shape);

nlohmann::json to_json(const CertificationReport& report);
nlohmann::json to_json(const CoefficientConditions& conditions);

}  // namespace qcmab
