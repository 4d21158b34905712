#include "qcmab/rules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

namespace qcmab {

Eigen::VectorXd default_theta_grid() {
  Eigen::VectorXd grid(36);
  for (int k = 0; k < 36; ++k) grid(k) = deg_to_rad(5.0 * k);
  return grid;
}

double check_no_conflict_terms(const StateVector& state) {
  const int dim = state.dimension();
  return std::norm(state.amplitudes(0)) + std::norm(state.amplitudes(dim - 1));
}

double check_rotation_invariance(const StateVector& state,
                                 const Eigen::VectorXd& theta_grid) {
  if (theta_grid.size() == 0)
    throw std::invalid_argument("check_rotation_invariance: empty grid");
  const Eigen::VectorXd p0 = outcome_distribution(state).probs;
  double residual = 0.0;
  for (int t = 0; t < theta_grid.size(); ++t) {
    const AngleConfig shared(
        Eigen::VectorXd::Constant(state.n_players, theta_grid(t)));
    const Eigen::VectorXd pt =
        outcome_distribution(apply_rotations(state, shared)).probs;
    residual = std::max(residual, (pt - p0).cwiseAbs().maxCoeff());
  }
  return residual;
}

double check_eigenphase(const StateVector& state,
                        const Eigen::VectorXd& theta_grid) {
  if (theta_grid.size() == 0)
    throw std::invalid_argument("check_eigenphase: empty grid");
  double residual = 0.0;
  for (int t = 0; t < theta_grid.size(); ++t) {
    const AngleConfig shared(
        Eigen::VectorXd::Constant(state.n_players, theta_grid(t)));
    const StateVector rotated = apply_rotations(state, shared);
    const Complex overlap = state.amplitudes.dot(rotated.amplitudes);
    residual = std::max(residual, 1.0 - std::abs(overlap));
  }
  return residual;
}

PermutationMirrorResidual check_permutation_mirror(const StateVector& state) {
  const int n = state.n_players;
  const int dim = state.dimension();
  const Eigen::VectorXd p = outcome_distribution(state).probs;

  double perm_residual = 0.0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const std::vector<int> map = player_permutation_outcome_map(perm, n);
    for (int o = 0; o < dim; ++o)
      perm_residual = std::max(perm_residual, std::abs(p(o) - p(map[o])));
  }

  double mirror_residual = 0.0;
  const int mask = dim - 1;
  for (int o = 0; o < dim; ++o)
    mirror_residual = std::max(mirror_residual, std::abs(p(o) - p(o ^ mask)));

  return {perm_residual, mirror_residual};
}

namespace {

int popcount4(int o) { return __builtin_popcount(static_cast<unsigned>(o)); }

bool support_inside(const StateVector& state,
                    const std::vector<int>& allowed) {
  std::vector<char> ok(state.dimension(), 0);
  for (int o : allowed) ok[o] = 1;
  for (int o = 0; o < state.dimension(); ++o)
    if (!ok[o] && std::abs(state.amplitudes(o)) > 1e-12) return false;
  return true;
}

CoefficientConditions three_photon_conditions(const StateVector& state) {
  // Weight-1 amplitudes a_k and their mirror (weight-2) partners b_k.
  const std::array<int, 3> w1 = {parse_outcome_label("HHV"),
                                 parse_outcome_label("HVH"),
                                 parse_outcome_label("VHH")};
  std::array<Complex, 3> a, b;
  Complex sum_a = 0.0, sum_b = 0.0;
  for (int k = 0; k < 3; ++k) {
    a[k] = state.amplitudes(w1[k]);
    b[k] = state.amplitudes(w1[k] ^ 7);
    sum_a += a[k];
    sum_b += b[k];
  }

  CoefficientConditions out;
  out.shape = AnsatzShape::three_photon;
  out.applicable = true;
  out.residual_sum = std::max(std::abs(sum_a), std::abs(sum_b));

  // a_k = s * i * b_k with one sign s shared by all three pairs.
  const Complex i_unit(0.0, 1.0);
  double plus = 0.0, minus = 0.0;
  for (int k = 0; k < 3; ++k) {
    plus = std::max(plus, std::abs(a[k] - i_unit * b[k]));
    minus = std::max(minus, std::abs(a[k] + i_unit * b[k]));
  }
  out.residual_pair = std::min(plus, minus);

  const double target = 1.0 / std::sqrt(6.0);
  for (int k = 0; k < 3; ++k) {
    out.residual_modulus =
        std::max(out.residual_modulus, std::abs(std::abs(a[k]) - target));
    out.residual_modulus =
        std::max(out.residual_modulus, std::abs(std::abs(b[k]) - target));
  }
  return out;
}

CoefficientConditions symmetric_four_conditions(const StateVector& state) {
  const std::array<int, 3> lead = {parse_outcome_label("HHVV"),
                                   parse_outcome_label("HVHV"),
                                   parse_outcome_label("HVVH")};
  CoefficientConditions out;
  out.shape = AnsatzShape::four_photon_symmetric;
  out.applicable = true;

  Complex sum_lead = 0.0, sum_mirror = 0.0;
  const double target = 1.0 / std::sqrt(6.0);
  for (int k = 0; k < 3; ++k) {
    const Complex c = state.amplitudes(lead[k]);
    const Complex cm = state.amplitudes(lead[k] ^ 15);
    sum_lead += c;
    sum_mirror += cm;
    out.residual_pair = std::max(out.residual_pair, std::abs(c - cm));
    out.residual_modulus =
        std::max(out.residual_modulus, std::abs(std::abs(c) - target));
    out.residual_modulus =
        std::max(out.residual_modulus, std::abs(std::abs(cm) - target));
  }
  out.residual_sum = std::max(std::abs(sum_lead), std::abs(sum_mirror));
  return out;
}

CoefficientConditions asymmetric_four_conditions(const StateVector& state) {
  const std::array<int, 4> w1 = {
      parse_outcome_label("HHHV"), parse_outcome_label("HHVH"),
      parse_outcome_label("HVHH"), parse_outcome_label("VHHH")};
  CoefficientConditions out;
  out.shape = AnsatzShape::four_photon_asymmetric;
  out.applicable = true;

  Complex sum_a = 0.0, sum_b = 0.0;
  const double target = 1.0 / std::sqrt(8.0);
  for (int k = 0; k < 4; ++k) {
    const Complex a = state.amplitudes(w1[k]);
    const Complex b = state.amplitudes(w1[k] ^ 15);
    sum_a += a;
    sum_b += b;
    // Mirror partners carry the opposite sign.
    out.residual_pair = std::max(out.residual_pair, std::abs(a + b));
    out.residual_modulus =
        std::max(out.residual_modulus, std::abs(std::abs(a) - target));
    out.residual_modulus =
        std::max(out.residual_modulus, std::abs(std::abs(b) - target));
  }
  out.residual_sum = std::max(std::abs(sum_a), std::abs(sum_b));
  return out;
}

}  // namespace

CoefficientConditions check_coefficient_conditions(const StateVector& state) {
  if (state.n_players == 3) {
    std::vector<int> mixed;
    for (int o = 1; o < 7; ++o) mixed.push_back(o);
    if (support_inside(state, mixed)) return three_photon_conditions(state);
  }
  if (state.n_players == 4) {
    std::vector<int> weight2, weight13;
    for (int o = 0; o < 16; ++o) {
      if (popcount4(o) == 2) weight2.push_back(o);
      if (popcount4(o) == 1 || popcount4(o) == 3) weight13.push_back(o);
    }
    if (support_inside(state, weight2)) return symmetric_four_conditions(state);
    if (support_inside(state, weight13))
      return asymmetric_four_conditions(state);
  }
  return CoefficientConditions{};
}

CertificationReport certify(const StateVector& state, double tolerance) {
  const Eigen::VectorXd grid = default_theta_grid();
  CertificationReport report;
  report.tolerance = tolerance;
  report.residual_no_conflict_terms = check_no_conflict_terms(state);
  report.residual_rotation_invariance =
      check_rotation_invariance(state, grid);
  report.residual_eigenphase = check_eigenphase(state, grid);
  const PermutationMirrorResidual pm = check_permutation_mirror(state);
  report.residual_permutation = pm.permutation;
  report.residual_mirror = pm.mirror;

  report.pass_no_conflict_terms = report.residual_no_conflict_terms < tolerance;
  report.pass_rotation_invariance =
      report.residual_rotation_invariance < tolerance;
  report.pass_eigenphase = report.residual_eigenphase < tolerance;
  report.pass_permutation = report.residual_permutation < tolerance;
  report.pass_mirror = report.residual_mirror < tolerance;
  return report;
}

const char* ansatz_name(AnsatzShape shape) {
  switch (shape) {
    case AnsatzShape::three_photon: return "three-photon";
    case AnsatzShape::four_photon_symmetric: return "four-photon-symmetric";
    case AnsatzShape::four_photon_asymmetric: return "four-photon-asymmetric";
    default: return "none";
  }
}

nlohmann::json to_json(const CertificationReport& r) {
  return nlohmann::json{
      {"tolerance", r.tolerance},
      {"residuals",
       {{"no_conflict_terms", r.residual_no_conflict_terms},
        {"rotation_invariance", r.residual_rotation_invariance},
        {"eigenphase", r.residual_eigenphase},
        {"permutation", r.residual_permutation},
        {"mirror", r.residual_mirror}}},
      {"pass",
       {{"no_conflict_terms", r.pass_no_conflict_terms},
        {"rotation_invariance", r.pass_rotation_invariance},
        {"eigenphase", r.pass_eigenphase},
        {"permutation", r.pass_permutation},
        {"mirror", r.pass_mirror}}},
      {"all_pass", r.all_pass()}};
}

nlohmann::json to_json(const CoefficientConditions& c) {
  nlohmann::json j{{"applicable", c.applicable},
                   {"ansatz", ansatz_name(c.shape)}};
  if (c.applicable) {
    j["residuals"] = {{"sum", c.residual_sum},
                      {"pair", c.residual_pair},
                      {"modulus", c.residual_modulus}};
  }
  return j;
}

}  // namespace qcmab
