#include <cmath>
#include <set>

#include "doctest.h"
#include "qinst/assemblage.hpp"
#include "qinst/random.hpp"

using namespace qinst;

TEST_CASE("deterministic strategies enumerate every response function once") {
  const int A = 2, X = 3;
  CHECK(strategy_count(A, X) == 8);
  std::set<std::vector<int>> seen;
  for (long long lam = 0; lam < 8; ++lam) {
    DeterministicStrategy d{A, X, lam};
    std::vector<int> outputs;
    for (int x = 0; x < X; ++x) outputs.push_back(d.output(x));
    seen.insert(outputs);
  }
  CHECK(seen.size() == 8);
  DeterministicStrategy six{A, X, 6};
  CHECK(six.output(0) == 0);
  CHECK(six.output(1) == 1);
  CHECK(six.output(2) == 1);
  CHECK(six.matches(1, 2));
  CHECK_FALSE(six.matches(1, 0));
}

TEST_CASE("strategy counts per outcome-input cell are uniform") {
  const int A = 3, X = 2;
  const long long n = strategy_count(A, X);
  for (int x = 0; x < X; ++x)
    for (int a = 0; a < A; ++a) {
      long long count = 0;
      for (long long lam = 0; lam < n; ++lam)
        if (DeterministicStrategy{A, X, lam}.matches(a, x)) ++count;
      CHECK(count == n / A);
    }
}

TEST_CASE("state plus measurements produce a valid nonsignalling assemblage") {
  RandomEngine eng(31);
  for (int trial = 0; trial < 5; ++trial) {
    QuantumState rho = random_mixed_state(4, eng);
    std::vector<Povm> meas;
    for (int x = 0; x < 3; ++x) meas.push_back(random_projective_povm(2, eng));
    Assemblage s = from_state_and_measurements(rho, meas);
    CHECK(s.num_outcomes() == 2);
    CHECK(s.num_inputs() == 3);
    CHECK(s.dim() == 2);
    auto v = s.validate();
    CHECK(v.ok);
    auto ns = s.nonsignalling();
    CHECK(ns.nonsignalling);
    Matrix expected_reduced = partial_trace(rho.matrix(), 2, 2, Subsystem::B);
    CHECK((ns.reduced - expected_reduced).cwiseAbs().maxCoeff() <= 1e-10);
    for (int x = 0; x < 3; ++x)
      for (int a = 0; a < 2; ++a) {
        const double prob =
            (kron(meas[x].element(a).matrix(), Matrix::Identity(2, 2)) * rho.matrix())
                .trace()
                .real();
        CHECK(s.block(a, x).trace() == doctest::Approx(prob).epsilon(1e-10));
      }
  }
}

TEST_CASE("product states give measurement-probability-weighted marginals") {
  RandomEngine eng(32);
  QuantumState rho_a = random_mixed_state(2, eng);
  QuantumState rho_b = random_mixed_state(3, eng);
  QuantumState joint(HermitianMatrix(kron(rho_a.matrix(), rho_b.matrix())));
  std::vector<Povm> meas{random_projective_povm(2, eng)};
  Assemblage s = from_state_and_measurements(joint, meas);
  for (int a = 0; a < 2; ++a) {
    const double p = (meas[0].element(a).matrix() * rho_a.matrix()).trace().real();
    CHECK((s.block(a, 0).matrix() - p * rho_b.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("validation flags broken normalization and negativity") {
  Assemblage s(2, 2, 2);
  s.set_block(0, 0, HermitianMatrix::identity(2) * 0.5);
  s.set_block(1, 0, HermitianMatrix::identity(2) * 0.5);
  s.set_block(0, 1, HermitianMatrix::identity(2) * 0.5);
  s.set_block(1, 1, HermitianMatrix::identity(2) * 0.5);
  CHECK_FALSE(s.validate().ok);  // traces sum to 2 per input
  Assemblage t(2, 1, 2);
  t.set_block(0, 0, HermitianMatrix(pauli_z()));
  t.set_block(1, 0, HermitianMatrix::identity(2) * 0.5);
  auto v = t.validate();
  CHECK_FALSE(v.ok);
  CHECK(v.min_eigenvalue < -0.5);
}

TEST_CASE("signalling families are detected") {
  Assemblage s(2, 2, 2);
  s.set_block(0, 0, HermitianMatrix::identity(2) * 0.25);
  s.set_block(1, 0, HermitianMatrix::identity(2) * 0.25);
  HermitianMatrix up(Matrix(0.5 * (Matrix::Identity(2, 2) + pauli_z())));
  s.set_block(0, 1, up * 0.5);
  s.set_block(1, 1, up * 0.5);
  auto ns = s.nonsignalling();
  CHECK_FALSE(ns.nonsignalling);
  CHECK(ns.max_deviation > 0.4);
}

TEST_CASE("outcome channels act blockwise and preserve traces") {
  RandomEngine eng(33);
  Assemblage s = sample_random_1sqi(2, 3, 2, 77);
  OutcomeChannelFamily family{{random_channel(2, 2, eng), random_channel(2, 3, eng)}};
  Assemblage out = apply_outcome_channels(family, s);
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 3; ++x) {
      CHECK(out.block(a, x).trace() == doctest::Approx(s.block(a, x).trace()).epsilon(1e-10));
      const Matrix direct = family.channels[a].apply(s.block(a, x).matrix());
      CHECK((out.block(a, x).matrix() - direct).cwiseAbs().maxCoeff() <= 1e-12);
    }
  CHECK(out.validate().ok);
}

TEST_CASE("1sqi construction yields valid but possibly signalling assemblages") {
  Assemblage s = sample_random_1sqi(2, 3, 2, 123);
  CHECK(s.validate().ok);
  Assemblage pure = sample_random_1sqi(2, 2, 3, 124, true);
  CHECK(pure.validate().ok);
  // The instrument outcome may carry input information to the remote party,
  // so these samples are generically signalling.
  CHECK_FALSE(s.nonsignalling().nonsignalling);
}

TEST_CASE("1sqi sampling is reproducible by seed") {
  Assemblage a = sample_random_1sqi(2, 3, 2, 55);
  Assemblage b = sample_random_1sqi(2, 3, 2, 55);
  Assemblage c = sample_random_1sqi(2, 3, 2, 56);
  double diff_ab = 0, diff_ac = 0;
  for (int a0 = 0; a0 < 2; ++a0)
    for (int x = 0; x < 3; ++x) {
      diff_ab = std::max(diff_ab, (a.block(a0, x).matrix() - b.block(a0, x).matrix())
                                      .cwiseAbs()
                                      .maxCoeff());
      diff_ac = std::max(diff_ac, (a.block(a0, x).matrix() - c.block(a0, x).matrix())
                                      .cwiseAbs()
                                      .maxCoeff());
    }
  CHECK(diff_ab == 0.0);
  CHECK(diff_ac > 1e-3);
}

TEST_CASE("degenerate strategy weights are handled") {
  std::vector<double> weights(8, 0.0);
  weights[6] = 1.0;
  RandomEngine eng(34);
  std::vector<std::vector<QuantumState>> states;
  for (int lam = 0; lam < 8; ++lam)
    states.push_back({random_mixed_state(2, eng), random_mixed_state(2, eng)});
  Assemblage s = assemble_1sqi(weights, states, 3);
  CHECK(s.validate().ok);
  // Strategy 6 outputs (0,1,1); the opposite outcomes carry zero blocks.
  CHECK(s.block(1, 0).trace() == doctest::Approx(0.0));
  CHECK(s.block(0, 1).trace() == doctest::Approx(0.0));
  CHECK(s.block(0, 2).trace() == doctest::Approx(0.0));
  CHECK(s.block(0, 0).trace() == doctest::Approx(1.0));
}

TEST_CASE("pairing is bilinear and matches direct trace sums") {
  RandomEngine eng(35);
  Assemblage s = sample_random_1sqi(2, 2, 2, 200);
  Assemblage w1 = sample_random_1sqi(2, 2, 2, 201);
  Assemblage w2 = sample_random_1sqi(2, 2, 2, 202);
  const double direct = pair_value(w1, s);
  double manual = 0;
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x)
      manual += (w1.block(a, x).matrix() * s.block(a, x).matrix()).trace().real();
  CHECK(direct == doctest::Approx(manual).epsilon(1e-12));
  const double combo = pair_value(w1.scaled(2.5) + w2, s);
  CHECK(combo == doctest::Approx(2.5 * pair_value(w1, s) + pair_value(w2, s)).epsilon(1e-10));
}

TEST_CASE("mixing and relabeling keep assemblages well formed") {
  Assemblage s = sample_random_1sqi(2, 3, 2, 300);
  Assemblage t = sample_random_1sqi(2, 3, 2, 301);
  Assemblage m = mix(s, t, 0.3);
  CHECK(m.validate().ok);
  Assemblage r = relabel_outcomes(s, {1, 0});
  CHECK(r.validate().ok);
  Assemblage rr = relabel_outcomes(r, {1, 0});
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 3; ++x)
      CHECK((rr.block(a, x).matrix() - s.block(a, x).matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(relabel_outcomes(s, {0, 0}), std::invalid_argument);
}
