#include "qcmab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace qcmab {

void validate(const SearchConfig& config) {
  if (config.n_players < 2)
    throw std::invalid_argument("search: need at least two players");
  if (config.n_players > max_players)
    throw std::invalid_argument("search: player count above limit");
  if (config.theta_samples < 1 || config.restarts < 1 ||
      config.max_iterations < 1)
    throw std::invalid_argument("search: counts must be >= 1");
  const PenaltyWeights& w = config.weights;
  if (w.w_conflict <= 0 || w.w_invariance <= 0 || w.w_permutation <= 0 ||
      w.w_mirror <= 0)
    throw std::invalid_argument("search: penalty weights must be positive");
  if (config.tolerance <= 0)
    throw std::invalid_argument("search: tolerance must be positive");
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::Matrix2d& b) {
  Eigen::MatrixXd out(a.rows() * 2, a.cols() * 2);
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
  return out;
}

}  // namespace

SolverObjective::SolverObjective(int n_players, int theta_samples,
                                 const PenaltyWeights& weights)
    : n_players_(n_players), dim_c_(1 << n_players), weights_(weights) {
  rotations_.reserve(theta_samples);
  for (int t = 0; t < theta_samples; ++t) {
    const double theta = t * pi / theta_samples;
    const Eigen::Matrix2d r = single_rotation(theta);
    Eigen::MatrixXd u = Eigen::MatrixXd::Identity(1, 1);
    for (int p = 0; p < n_players; ++p) u = kron(u, r);
    rotations_.push_back(u.cast<Complex>());
  }

  std::vector<int> perm(n_players);
  std::iota(perm.begin(), perm.end(), 0);
  while (std::next_permutation(perm.begin(), perm.end()))
    permutations_.push_back(player_permutation_outcome_map(perm, n_players));

  mirror_.resize(dim_c_);
  for (int o = 0; o < dim_c_; ++o) mirror_[o] = o ^ (dim_c_ - 1);
}

Eigen::VectorXd SolverObjective::pack(const StateVector& state) {
  Eigen::VectorXd x(2 * state.dimension());
  for (int k = 0; k < state.dimension(); ++k) {
    x(2 * k) = state.amplitudes(k).real();
    x(2 * k + 1) = state.amplitudes(k).imag();
  }
  return x;
}

StateVector SolverObjective::unpack(const Eigen::VectorXd& x) const {
  if (x.size() != dim())
    throw std::invalid_argument("unpack: wrong coordinate count");
  Eigen::VectorXcd amps(dim_c_);
  for (int k = 0; k < dim_c_; ++k)
    amps(k) = Complex(x(2 * k), x(2 * k + 1));
  const double norm = amps.norm();
  if (norm == 0.0) throw std::invalid_argument("unpack: zero vector");
  return StateVector(n_players_, amps / norm);
}

double SolverObjective::value(const Eigen::VectorXd& x) const {
  return evaluate(x, nullptr);
}

double SolverObjective::value_and_gradient(const Eigen::VectorXd& x,
                                           Eigen::VectorXd& grad) const {
  grad.resize(dim());
  return evaluate(x, &grad);
}

double SolverObjective::evaluate(const Eigen::VectorXd& x,
                                 Eigen::VectorXd* grad) const {
  if (x.size() != dim())
    throw std::invalid_argument("objective: wrong coordinate count");
  const double nx = x.norm();
  if (nx == 0.0) throw std::invalid_argument("objective: zero vector");
  const Eigen::VectorXd xhat = x / nx;

  Eigen::VectorXcd c(dim_c_);
  for (int k = 0; k < dim_c_; ++k)
    c(k) = Complex(xhat(2 * k), xhat(2 * k + 1));
  const Eigen::VectorXd p0 = c.cwiseAbs2();

  const int last = dim_c_ - 1;
  double f = weights_.w_conflict * (p0(0) + p0(last));

  Eigen::VectorXd dfdp0;
  Eigen::VectorXcd gc;
  if (grad) {
    dfdp0 = Eigen::VectorXd::Zero(dim_c_);
    gc = Eigen::VectorXcd::Zero(dim_c_);
    dfdp0(0) += weights_.w_conflict;
    dfdp0(last) += weights_.w_conflict;
  }

  for (const Eigen::MatrixXcd& u : rotations_) {
    const Eigen::VectorXcd ct = u * c;
    const Eigen::VectorXd diff = ct.cwiseAbs2() - p0;
    f += weights_.w_invariance * diff.squaredNorm();

    // Distribution invariance alone admits minima that are not shared-
    // rotation eigenvectors (components at different rotation frequencies
    // can superpose without moving any probability), so the invariance
    // weight also penalizes misalignment of the rotated state with the
    // original. 1 - |<c, u c>|^2 is zero exactly at unit-modulus
    // eigenvectors; squared so float round-off near optima stays below
    // the squared-residual terms.
    const Complex overlap = c.dot(ct);
    const double align = 1.0 - std::norm(overlap);
    f += weights_.w_invariance * align * align;
    if (grad) {
      const Eigen::VectorXd scale = 2.0 * weights_.w_invariance * diff;
      dfdp0 -= scale;
      // Rotation matrices are real, so adjoint == transpose.
      gc += u.adjoint() * scale.cast<Complex>().cwiseProduct(ct);
      gc -= 2.0 * weights_.w_invariance * align *
            (std::conj(overlap) * ct + overlap * (u.transpose() * c));
    }
  }

  for (const std::vector<int>& map : permutations_) {
    for (int o = 0; o < dim_c_; ++o) {
      const double d = p0(o) - p0(map[o]);
      f += weights_.w_permutation * d * d;
      if (grad) {
        dfdp0(o) += 2.0 * weights_.w_permutation * d;
        dfdp0(map[o]) -= 2.0 * weights_.w_permutation * d;
      }
    }
  }

  for (int o = 0; o < dim_c_; ++o) {
    const double d = p0(o) - p0(mirror_[o]);
    f += weights_.w_mirror * d * d;
    if (grad) {
      dfdp0(o) += 2.0 * weights_.w_mirror * d;
      dfdp0(mirror_[o]) -= 2.0 * weights_.w_mirror * d;
    }
  }

  if (grad) {
    gc += dfdp0.cast<Complex>().cwiseProduct(c);
    Eigen::VectorXd g(dim());
    for (int k = 0; k < dim_c_; ++k) {
      g(2 * k) = 2.0 * gc(k).real();
      g(2 * k + 1) = 2.0 * gc(k).imag();
    }
    *grad = (g - xhat.dot(g) * xhat) / nx;
  }
  return f;
}

namespace {

double normal_draw(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1], keeps log finite
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

struct DescentOutcome {
  Eigen::VectorXd x;
  double f = 0.0;
  long iterations = 0;
};

/// L-BFGS with two-loop recursion and Armijo backtracking. Stops when the
/// objective falls below tol^2 (residual scale tol), the gradient max-norm
/// falls below tol, progress stalls, or the iteration cap is reached.
DescentOutcome lbfgs_minimize(const SolverObjective& objective,
                              Eigen::VectorXd x0, int max_iterations,
                              double tol) {
  constexpr int history_size = 8;
  constexpr double armijo_c1 = 1e-4;
  constexpr int max_stall = 30;

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g;
  double f = objective.value_and_gradient(x, g);

  DescentOutcome best{x, f, 0};
  int stall = 0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (best.f < tol * tol) break;
    if (g.lpNorm<Eigen::Infinity>() < tol) break;

    // Two-loop recursion for d = -H g.
    Eigen::VectorXd d = -g;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      const auto& [s, y] = history[i];
      alpha[i] = s.dot(d) / s.dot(y);
      d -= alpha[i] * y;
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      d *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const auto& [s, y] = history[i];
      const double beta = y.dot(d) / s.dot(y);
      d += (alpha[i] - beta) * s;
    }

    double dg = g.dot(d);
    if (dg >= 0.0) {
      history.clear();
      d = -g;
      dg = -g.squaredNorm();
    }

    double step = 1.0;
    Eigen::VectorXd x_new, g_new;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * d;
      f_new = objective.value_and_gradient(x_new, g_new);
      if (f_new <= f + armijo_c1 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    best.iterations = iter + 1;
    if (!accepted) break;

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      history.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(history.size()) > history_size)
        history.pop_front();
    }
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;

    if (f < best.f * (1.0 - 1e-12) || f < best.f - 1e-30) {
      best.x = x;
      best.f = f;
      stall = 0;
    } else if (++stall >= max_stall) {
      break;
    }
  }
  return best;
}

}  // namespace

SearchResult search_state(const SearchConfig& config, Rng& rng) {
  validate(config);
  const SolverObjective objective(config.n_players, config.theta_samples,
                                  config.weights);

  SearchResult result;
  result.objective = std::numeric_limits<double>::infinity();
  long total_iterations = 0;

  for (int r = 0; r < config.restarts; ++r) {
    Eigen::VectorXd x0(objective.dim());
    for (int k = 0; k < objective.dim(); ++k) x0(k) = normal_draw(rng);
    if (x0.norm() < 1e-8) x0(0) = 1.0;

    DescentOutcome out = lbfgs_minimize(objective, std::move(x0),
                                        config.max_iterations,
                                        config.tolerance);
    total_iterations += out.iterations;
    if (out.f < result.objective) {
      result.objective = out.f;
      result.state = objective.unpack(out.x);
      result.best_restart = r;
    }
  }
  result.total_iterations = total_iterations;
  return result;
}

namespace {

std::vector<std::vector<int>> fingerprint_tuples(int n_players, int steps) {
  const int relative = n_players - 1;
  long total = 1;
  for (int j = 0; j < relative; ++j) {
    total *= steps;
    if (total > 4096) break;
  }

  std::vector<std::vector<int>> tuples;
  if (total <= 4096) {
    std::vector<int> tuple(relative, 0);
    while (true) {
      tuples.push_back(tuple);
      int j = relative - 1;
      for (; j >= 0; --j) {
        if (++tuple[j] < steps) break;
        tuple[j] = 0;
      }
      if (j < 0) break;
    }
  } else {
    // Fixed internal seed: every same-N fingerprint samples the same points
    // and stays comparable across calls and processes.
    Rng rng(0x51C4F00DFEEDFACEULL);
    tuples.resize(4096, std::vector<int>(relative));
    for (auto& tuple : tuples)
      for (int j = 0; j < relative; ++j)
        tuple[j] = static_cast<int>(rng.uniform_int(steps));
  }
  return tuples;
}

}  // namespace

Fingerprint fingerprint(const StateVector& state) {
  constexpr int steps = 12;  // 15 degree increments over [0, 180)
  const int n = state.n_players;
  const int dim = state.dimension();
  const std::vector<std::vector<int>> tuples = fingerprint_tuples(n, steps);

  std::vector<Eigen::VectorXd> rows;
  rows.reserve(tuples.size());
  for (const std::vector<int>& tuple : tuples) {
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n - 1; ++j) deg(j + 1) = 15.0 * tuple[j];
    const OutcomeDistribution dist = outcome_distribution(
        apply_rotations(state, AngleConfig::from_degrees(deg)));
    Eigen::VectorXd row = dist.probs;
    std::sort(row.data(), row.data() + row.size());
    rows.push_back(std::move(row));
  }

  // Row order must survive entry-level noise far below the gap between
  // distinct rows; lexicographic comparison does not (an exact zero in one
  // state against a 1e-13 residue in another flips every later tie-break).
  // Keyed by a fixed projection onto rationally independent weights,
  // near-equal keys imply near-equal rows.
  Eigen::VectorXd key_weights(dim);
  for (int c = 0, candidate = 2; c < dim; ++candidate) {
    bool prime = true;
    for (int d = 2; d * d <= candidate; ++d)
      if (candidate % d == 0) {
        prime = false;
        break;
      }
    if (prime) key_weights(c++) = std::sqrt(double(candidate));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [&key_weights](const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& b) {
                     return a.dot(key_weights) < b.dot(key_weights);
                   });

  Fingerprint fp;
  fp.n_players = n;
  fp.rows.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    fp.rows.row(static_cast<Eigen::Index>(r)) = rows[r];
  return fp;
}

double fingerprint_distance(const Fingerprint& a, const Fingerprint& b) {
  if (a.n_players != b.n_players || a.rows.rows() != b.rows.rows() ||
      a.rows.cols() != b.rows.cols())
    throw std::invalid_argument("fingerprint dimensions differ");
  return (a.rows - b.rows).cwiseAbs().maxCoeff();
}

bool states_equivalent(const StateVector& a, const StateVector& b,
                       double tol) {
  if (a.n_players != b.n_players)
    throw std::invalid_argument("states_equivalent: player counts differ");
  return fingerprint_distance(fingerprint(a), fingerprint(b)) < tol;
}

}  // namespace qcmab
