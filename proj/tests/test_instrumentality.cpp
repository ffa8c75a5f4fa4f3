#include <cmath>
#include <vector>

#include "doctest.h"
#include "qinst/instrumentality.hpp"
#include "qinst/random.hpp"
#include "qinst/scenarios.hpp"

using namespace qinst;

namespace {

Assemblage white_noise(int num_outcomes, int num_inputs, int dim) {
  Assemblage s(num_outcomes, num_inputs, dim);
  const Matrix block = Matrix::Identity(dim, dim) / (num_outcomes * dim);
  for (int x = 0; x < num_inputs; ++x)
    for (int a = 0; a < num_outcomes; ++a) s.set_block(a, x, HermitianMatrix(block));
  return s;
}

// Smallest t such that (s + t * white) / (1 + t) passes membership. Upper
// bounds the mixing robustness, which may pick better noise than white.
double bisect_white_noise_weight(const Assemblage& s) {
  const Assemblage noise = white_noise(s.num_outcomes(), s.num_inputs(), s.dim());
  auto inside = [&](double t) {
    return membership(mix(s, noise, 1.0 / (1.0 + t))).in_model;
  };
  double lo = 0.0, hi = 0.25;
  while (!inside(hi)) {
    lo = hi;
    hi *= 2.0;
    REQUIRE(hi <= 64.0);
  }
  for (int step = 0; step < 30; ++step) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct EnumeratedBound {
  double beta = 0.0;
  double max_norm_sum = 0.0;
  long long best_strategy = 0;
};

// Independent evaluation of the rank-1 bound by direct enumeration of the
// 2^X binary response functions.
EnumeratedBound enumerate_rank1_bound(const std::vector<Eigen::Vector3d>& u) {
  const int X = static_cast<int>(u.size());
  EnumeratedBound out;
  for (long long lam = 0; lam < (1LL << X); ++lam) {
    Eigen::Vector3d v[2] = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
    for (int x = 0; x < X; ++x) v[(lam >> x) & 1] += u[x];
    const double norm_sum = v[0].norm() + v[1].norm();
    if (norm_sum > out.max_norm_sum + 1e-15) {
      out.max_norm_sum = norm_sum;
      out.best_strategy = lam;
    }
  }
  out.beta = 0.5 * X + 0.5 * out.max_norm_sum;
  return out;
}

Assemblage random_quantum_assemblage(std::uint64_t seed) {
  RandomEngine eng(seed);
  QuantumState rho = random_pure_state(4, eng);
  std::vector<Povm> meas;
  for (int x = 0; x < 3; ++x) meas.push_back(random_projective_povm(2, eng));
  return from_state_and_measurements(rho, meas);
}

Matrix strategy_response(const Assemblage& blocks, int a, long long lam) {
  Matrix f = Matrix::Zero(blocks.dim(), blocks.dim());
  for (int x = 0; x < blocks.num_inputs(); ++x)
    if (DeterministicStrategy{blocks.num_outcomes(), blocks.num_inputs(), lam}.matches(a, x))
      f += blocks.block(a, x).matrix();
  return f;
}

}  // namespace

TEST_CASE("membership separates the dephased family across the model threshold") {
  const Assemblage outside = paper_assemblage(1.0);
  MembershipResult r = membership(outside);
  CHECK(r.primal_status == sdp::SolveStatus::Optimal);
  CHECK(r.dual_status == sdp::SolveStatus::Optimal);
  CHECK(r.gap <= 1e-6);
  CHECK_FALSE(r.in_model);
  CHECK(std::abs(r.mu_star - 0.029236888) <= 1e-6);
  CHECK(r.witness.beta == 0.0);
  CHECK(std::abs(pair_value(r.witness.blocks, outside) - r.mu_dual) <= 1e-7);

  const Assemblage inside = paper_assemblage(0.1);
  MembershipResult rin = membership(inside);
  CHECK(rin.in_model);
  CHECK(rin.mu_star <= kMembershipTol);
}

TEST_CASE("in-model decomposition reconstructs the assemblage") {
  const Assemblage cases[] = {paper_assemblage(0.1), sample_random_1sqi(2, 3, 2, 7001, false)};
  for (const Assemblage& s : cases) {
    const int A = s.num_outcomes();
    const long long num_lam = strategy_count(A, s.num_inputs());
    MembershipResult r = membership(s);
    REQUIRE(r.in_model);
    REQUIRE(r.decomposition.size() == static_cast<std::size_t>(A * num_lam));
    REQUIRE(r.lambda_weights.size() == static_cast<std::size_t>(num_lam));

    for (int x = 0; x < s.num_inputs(); ++x)
      for (int a = 0; a < A; ++a) {
        Matrix rec = Matrix::Zero(s.dim(), s.dim());
        for (long long lam = 0; lam < num_lam; ++lam)
          if (DeterministicStrategy{A, s.num_inputs(), lam}.matches(a, x))
            rec += r.decomposition[a + A * lam].matrix();
        CHECK((rec - s.block(a, x).matrix()).cwiseAbs().maxCoeff() <= 1e-7);
      }

    double weight_sum = 0.0;
    for (long long lam = 0; lam < num_lam; ++lam) {
      for (int a = 0; a < A; ++a) {
        CHECK(std::abs(r.decomposition[a + A * lam].trace() - r.lambda_weights[lam]) <= 1e-7);
        CHECK(r.decomposition[a + A * lam].min_eigenvalue() >= -1e-6);
      }
      CHECK(r.lambda_weights[lam] >= -1e-7);
      weight_sum += r.lambda_weights[lam];
    }
    CHECK(std::abs(weight_sum - 1.0) <= 1e-6);
  }
}

TEST_CASE("membership dual produces a feasible certificate") {
  const Assemblage cases[] = {paper_assemblage(1.0), random_quantum_assemblage(4040)};
  for (const Assemblage& s : cases) {
    const int A = s.num_outcomes();
    const long long num_lam = strategy_count(A, s.num_inputs());
    MembershipResult r = membership(s);
    const Witness& w = r.witness;
    CHECK(std::abs(w.scale + 0.25) <= 1e-7);
    CHECK(std::abs(w.scale - w.recomputed_scale()) <= 1e-9);
    REQUIRE(r.shift_multipliers.size() == static_cast<std::size_t>(A * num_lam));

    const Matrix eye = Matrix::Identity(s.dim(), s.dim());
    for (long long lam = 0; lam < num_lam; ++lam) {
      double shift_sum = 0.0;
      for (int a = 0; a < A; ++a) {
        const double c = r.shift_multipliers[a + A * lam];
        shift_sum += c;
        const Matrix slack = c * eye - strategy_response(w.blocks, a, lam);
        CHECK(HermitianMatrix(slack).min_eigenvalue() >= -1e-7);
      }
      CHECK(std::abs(shift_sum) <= 1e-7);
    }

    CHECK(exact_model_value(w) <= 1e-7);
    SoundnessReport rep = check_witness_soundness(w, 50, 99);
    CHECK(rep.violations == 0);
    CHECK(rep.max_sampled_value <= 1e-7);
  }
}

TEST_CASE("mixing robustness is sandwiched by a noise bisection and its dual value") {
  const Assemblage s = paper_assemblage(1.0);
  RobustnessResult r = robustness_ni(s);
  CHECK(r.primal_status == sdp::SolveStatus::Optimal);
  CHECK(r.dual_status == sdp::SolveStatus::Optimal);
  CHECK(r.gap <= 1e-6);
  CHECK(std::abs(r.t_star - 0.233895087) <= 1e-6);
  CHECK(std::abs(r.t_star - r.t_dual) <= 1e-6);

  const double upper = bisect_white_noise_weight(s);
  CHECK(r.t_star <= upper + 1e-6);

  const double lower = pair_value(r.witness.blocks, s) - 1.0;
  CHECK(std::abs(lower - r.t_dual) <= 1e-7);
  CHECK(lower <= r.t_star + 1e-6);

  RobustnessResult half = robustness_ni(paper_assemblage(0.5));
  CHECK(std::abs(half.t_star - 0.059970583) <= 1e-6);
}

TEST_CASE("robustness certificates decompose the optimum") {
  const Assemblage s = paper_assemblage(1.0);
  RobustnessResult r = robustness_ni(s);
  const int A = s.num_outcomes();
  const long long num_lam = strategy_count(A, s.num_inputs());

  CHECK(r.noise.validate().ok);
  CHECK(r.target.validate().ok);
  CHECK(membership(r.noise).in_model);
  CHECK(membership(r.target).in_model);
  for (int x = 0; x < s.num_inputs(); ++x)
    for (int a = 0; a < A; ++a) {
      const Matrix rec = (1.0 + r.t_star) * r.target.block(a, x).matrix() -
                         r.t_star * r.noise.block(a, x).matrix();
      CHECK((rec - s.block(a, x).matrix()).cwiseAbs().maxCoeff() <= 1e-6);
    }

  CHECK(r.witness.beta == 1.0);
  REQUIRE(r.upper_multipliers.size() == static_cast<std::size_t>(A * num_lam));
  REQUIRE(r.lower_multipliers.size() == static_cast<std::size_t>(A * num_lam));
  const Matrix eye = Matrix::Identity(s.dim(), s.dim());
  for (long long lam = 0; lam < num_lam; ++lam) {
    double upper_sum = 0.0, lower_sum = 0.0;
    for (int a = 0; a < A; ++a) {
      const double bu = r.upper_multipliers[a + A * lam];
      const double bl = r.lower_multipliers[a + A * lam];
      upper_sum += bu;
      lower_sum += bl;
      const Matrix f = strategy_response(r.witness.blocks, a, lam);
      CHECK(HermitianMatrix(Matrix(bu * eye - f)).min_eigenvalue() >= -1e-7);
      CHECK(HermitianMatrix(Matrix(f - bl * eye)).min_eigenvalue() >= -1e-7);
    }
    CHECK(std::abs(upper_sum - 1.0) <= 1e-7);
    CHECK(std::abs(lower_sum) <= 1e-7);
  }

  CHECK(exact_model_value(r.witness) <= 1.0 + 1e-7);
  SoundnessReport rep = check_witness_soundness(r.witness, 50, 131);
  CHECK(rep.violations == 0);
  CHECK(rep.max_sampled_value <= 1.0 + 1e-7);
}

TEST_CASE("model members have zero robustness") {
  for (std::uint64_t seed : {11ULL, 12ULL}) {
    const Assemblage s = sample_random_1sqi(2, 3, 2, seed, seed % 2 == 0);
    CHECK(membership(s).in_model);
    CHECK(robustness_ni(s).t_star <= 1e-6);
  }
  const Assemblage outside = paper_assemblage(0.3);
  CHECK_FALSE(membership(outside).in_model);
  CHECK(robustness_ni(outside).t_star > 1e-4);
}

TEST_CASE("robustness is convex under mixing") {
  const Assemblage s1 = paper_assemblage(0.95);
  const Assemblage s2 = random_quantum_assemblage(321);
  const double r1 = robustness_ni(s1).t_star;
  const double r2 = robustness_ni(s2).t_star;
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double rmix = robustness_ni(mix(s1, s2, alpha)).t_star;
    CHECK(rmix <= alpha * r1 + (1.0 - alpha) * r2 + 1e-6);
  }
}

TEST_CASE("closed-form rank-1 bound matches exhaustive enumeration") {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  AnalyticBoundInput paper;
  paper.u_vectors = {Eigen::Vector3d(-inv_sqrt2, 0.0, -inv_sqrt2), Eigen::Vector3d(1.0, 0.0, 0.0),
                     Eigen::Vector3d(0.0, 0.0, 1.0)};
  AnalyticBoundResult r = analytic_rank1_bound(paper);
  CHECK(std::abs(r.beta - (2.0 + inv_sqrt2)) <= 1e-12);
  CHECK(std::abs(r.max_norm_sum - (1.0 + std::sqrt(2.0))) <= 1e-12);
  CHECK(r.best_strategy == 1);
  EnumeratedBound e = enumerate_rank1_bound(paper.u_vectors);
  CHECK(std::abs(r.beta - e.beta) <= 1e-12);
  CHECK(std::abs(r.max_norm_sum - e.max_norm_sum) <= 1e-12);
  CHECK(r.best_strategy == e.best_strategy);

  RandomEngine eng(777);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    AnalyticBoundInput inp;
    for (int x = 0; x < 3; ++x)
      inp.u_vectors.emplace_back(gauss(eng), gauss(eng), gauss(eng));
    AnalyticBoundResult a = analytic_rank1_bound(inp);
    EnumeratedBound b = enumerate_rank1_bound(inp.u_vectors);
    CHECK(std::abs(a.beta - b.beta) <= 1e-12);
    CHECK(std::abs(a.max_norm_sum - b.max_norm_sum) <= 1e-12);
    CHECK(a.best_strategy == b.best_strategy);
  }

  AnalyticBoundInput zero;
  zero.u_vectors = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  AnalyticBoundResult rz = analytic_rank1_bound(zero);
  CHECK(std::abs(rz.beta - 1.5) <= 1e-12);
  CHECK(rz.max_norm_sum == 0.0);

  AnalyticBoundInput aligned;
  aligned.u_vectors = {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 0, 0),
                       Eigen::Vector3d(1, 0, 0)};
  AnalyticBoundResult ra = analytic_rank1_bound(aligned);
  CHECK(std::abs(ra.beta - 3.0) <= 1e-12);
  CHECK(ra.best_strategy == 0);
}

TEST_CASE("closed-form model maximum is attained by a concentrated member") {
  const double bound = 2.0 + 1.0 / std::sqrt(2.0);
  Witness w(paper_assemblage(1.0).scaled(2.0), bound, 0.0);
  w.scale = w.recomputed_scale();

  const double ev = exact_model_value(w);
  CHECK(std::abs(ev - bound) <= 1e-12);
  CHECK(std::abs(pair_value(w.blocks, paper_assemblage(1.0)) - 3.0) <= 1e-9);

  double best_pair = 0.0;
  long long best_lam = 0;
  for (long long lam = 0; lam < strategy_count(2, 3); ++lam) {
    const Assemblage m = concentrated_maximizer(w, lam);
    CHECK(m.validate().ok);
    const double p = pair_value(w.blocks, m);
    CHECK(p <= ev + 1e-9);
    if (p > best_pair) {
      best_pair = p;
      best_lam = lam;
    }
  }
  CHECK(std::abs(best_pair - ev) <= 1e-9);
  CHECK(membership(concentrated_maximizer(w, best_lam)).in_model);
}
