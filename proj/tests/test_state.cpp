#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "qcmab/state.hpp"
#include "test_support.hpp"

using namespace qcmab;
using qcmab::testing::random_angles;
using qcmab::testing::random_state;

TEST_CASE("rotation entries match cos/sin away from quarter turns") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double theta = (rng.uniform() - 0.5) * 20.0;
    const RotationEntries e = rotation_entries(theta);
    CHECK(e.c == doctest::Approx(std::cos(theta)).epsilon(1e-15));
    CHECK(e.s == doctest::Approx(std::sin(theta)).epsilon(1e-15));
  }
}

TEST_CASE("quarter-turn multiples snap to exact entries") {
  struct Row {
    double theta;
    double c, s;
  };
  const Row rows[] = {
      {0.0, 1.0, 0.0},
      {pi / 2, 0.0, 1.0},
      {pi, -1.0, 0.0},
      {3 * pi / 2, 0.0, -1.0},
      {2 * pi, 1.0, 0.0},
      {-pi / 2, 0.0, -1.0},
      {10 * pi, 1.0, 0.0},
  };
  for (const Row& row : rows) {
    const RotationEntries e = rotation_entries(row.theta);
    CHECK(e.c == row.c);
    CHECK(e.s == row.s);
  }
  // Degree conversion lands exactly on the snapping points.
  CHECK(deg_to_rad(90.0) == pi / 2);
  CHECK(rotation_entries(deg_to_rad(180.0)).c == -1.0);
  CHECK(rotation_entries(deg_to_rad(360.0)).c == 1.0);
}

TEST_CASE("single_rotation lays out the coefficient map [[c,s],[-s,c]]") {
  const Eigen::Matrix2d r = single_rotation(0.3);
  CHECK(r(0, 0) == doctest::Approx(std::cos(0.3)));
  CHECK(r(0, 1) == doctest::Approx(std::sin(0.3)));
  CHECK(r(1, 0) == doctest::Approx(-std::sin(0.3)));
  CHECK(r(1, 1) == doctest::Approx(std::cos(0.3)));
  CHECK(r.determinant() == doctest::Approx(1.0));
}

TEST_CASE("state vector constructor validates shape") {
  CHECK_THROWS_AS(StateVector(0, Eigen::VectorXcd::Ones(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(StateVector(17, Eigen::VectorXcd::Ones(4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(StateVector(2, Eigen::VectorXcd::Ones(3)),
                  std::invalid_argument);
  const StateVector basis = StateVector::basis(3, 5);
  CHECK(basis.dimension() == 8);
  CHECK(basis.amplitudes(5) == Complex(1.0, 0.0));
  CHECK(basis.norm() == doctest::Approx(1.0));
}

TEST_CASE("outcome labels round-trip and follow the MSB-first convention") {
  CHECK(outcome_label(1, 3) == "HHV");
  CHECK(outcome_label(4, 3) == "VHH");
  CHECK(outcome_label(5, 3) == "VHV");
  CHECK(parse_outcome_label("HHV") == 1);
  CHECK(parse_outcome_label("VHH") == 4);
  for (int n = 1; n <= 4; ++n)
    for (int o = 0; o < (1 << n); ++o)
      CHECK(parse_outcome_label(outcome_label(o, n)) == o);
  CHECK_THROWS_AS(parse_outcome_label("HXV"), std::invalid_argument);
  CHECK_THROWS_AS(parse_outcome_label(""), std::invalid_argument);
  CHECK(player_bit(4, 1, 3) == 1);
  CHECK(player_bit(4, 3, 3) == 0);
}

TEST_CASE("player permutation outcome map relabels bits") {
  // Swap players 1 and 2 of N=3: HHV stays, HVH <-> VHH.
  const std::vector<int> swap12{1, 0, 2};
  const std::vector<int> map = player_permutation_outcome_map(swap12, 3);
  CHECK(map[parse_outcome_label("HHV")] == parse_outcome_label("HHV"));
  CHECK(map[parse_outcome_label("HVH")] == parse_outcome_label("VHH"));
  CHECK(map[parse_outcome_label("VHH")] == parse_outcome_label("HVH"));

  const std::vector<int> identity{0, 1, 2, 3};
  const std::vector<int> id_map = player_permutation_outcome_map(identity, 4);
  for (int o = 0; o < 16; ++o) CHECK(id_map[o] == o);

  CHECK_THROWS_AS(player_permutation_outcome_map({0, 0, 2}, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(player_permutation_outcome_map({0, 1}, 3),
                  std::invalid_argument);
}

TEST_CASE("zero angles return the input bit-for-bit") {
  Rng rng(3);
  const StateVector state = random_state(3, rng);
  const StateVector out = apply_rotations(state, AngleConfig::zeros(3));
  for (int k = 0; k < state.dimension(); ++k)
    CHECK(out.amplitudes(k) == state.amplitudes(k));
}

TEST_CASE("rotations preserve the norm") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform_int(4));
    const StateVector state = random_state(n, rng);
    const StateVector out = apply_rotations(state, random_angles(n, rng));
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("rotations compose additively per player") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform_int(3));
    const StateVector state = random_state(n, rng);
    const AngleConfig a = random_angles(n, rng);
    const AngleConfig b = random_angles(n, rng);
    const StateVector two_step = apply_rotations(apply_rotations(state, a), b);
    const StateVector one_step =
        apply_rotations(state, AngleConfig(a.radians + b.radians));
    CHECK((two_step.amplitudes - one_step.amplitudes).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("full turn is the exact identity, half turn the exact global sign") {
  Rng rng(9);
  for (int n = 1; n <= 5; ++n) {
    const StateVector state = random_state(n, rng);

    const AngleConfig full(Eigen::VectorXd::Constant(n, 2 * pi));
    const StateVector turned = apply_rotations(state, full);
    for (int k = 0; k < state.dimension(); ++k)
      CHECK(turned.amplitudes(k) == state.amplitudes(k));

    const AngleConfig half(Eigen::VectorXd::Constant(n, pi));
    const StateVector flipped = apply_rotations(state, half);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (int k = 0; k < state.dimension(); ++k)
      CHECK(flipped.amplitudes(k) == sign * state.amplitudes(k));
  }
}

TEST_CASE("N=2 rotations agree with the Kronecker-product oracle") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const StateVector state = random_state(2, rng);
    const AngleConfig angles = random_angles(2, rng);
    const Eigen::Matrix2d r1 = single_rotation(angles.radians(0));
    const Eigen::Matrix2d r2 = single_rotation(angles.radians(1));
    const Eigen::Matrix4d big = Eigen::kroneckerProduct(r1, r2);
    const Eigen::Vector4cd expected =
        big.cast<Complex>() * state.amplitudes;
    const StateVector got = apply_rotations(state, angles);
    CHECK((got.amplitudes - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("outcome distribution is the squared amplitude law") {
  Rng rng(15);
  const StateVector state = random_state(3, rng);
  const OutcomeDistribution dist = outcome_distribution(state);
  CHECK(dist.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int o = 0; o < dist.dimension(); ++o)
    CHECK(dist.probs(o) ==
          doctest::Approx(std::norm(state.amplitudes(o))).epsilon(1e-14));

  StateVector stretched = state;
  stretched.amplitudes *= 1.5;
  CHECK_THROWS_AS(outcome_distribution(stretched), std::invalid_argument);
}

TEST_CASE("rng streams are deterministic and independent") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  // derive() leaves the parent untouched, so the parent's future sequence is
  // the same whether or not children were spawned.
  Rng c(42);
  Rng d(42);
  for (int i = 0; i < 100; ++i) {
    c.uniform();
    d.uniform();
  }
  Rng child = c.derive(7);
  (void)child;
  for (int i = 0; i < 100; ++i) CHECK(c.uniform() == d.uniform());

  // Distinct stream ids give distinct sequences.
  Rng s1 = Rng(42).derive(1);
  Rng s2 = Rng(42).derive(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += (s1.raw() == s2.raw());
  CHECK(same == 0);
}

TEST_CASE("uniform stays inside [0, 1)") {
  Rng rng(17);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("sampling frequencies match the distribution within 4 sigma") {
  Rng rng(19);
  const StateVector state = random_state(3, rng);
  const OutcomeDistribution dist = outcome_distribution(state);
  const long draws = 200000;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(dist.dimension());
  for (long i = 0; i < draws; ++i) counts(sample_outcome(dist, rng)) += 1.0;
  for (int o = 0; o < dist.dimension(); ++o) {
    const double p = dist.probs(o);
    const double sigma = std::sqrt(p * (1.0 - p) * draws);
    CHECK(std::abs(counts(o) - p * draws) <= 4.0 * sigma + 1.0);
  }
}

TEST_CASE("zero-probability outcomes are never sampled") {
  OutcomeDistribution dist;
  dist.n_players = 2;
  dist.probs = Eigen::VectorXd::Zero(4);
  dist.probs(1) = 0.5;
  dist.probs(3) = 0.5;
  Rng rng(21);
  for (int i = 0; i < 20000; ++i) {
    const int o = sample_outcome(dist, rng);
    CHECK((o == 1 || o == 3));
  }

  OutcomeDistribution empty;
  empty.n_players = 1;
  empty.probs = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(sample_outcome(empty, rng), std::invalid_argument);
}
