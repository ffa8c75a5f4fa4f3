#include "qinst/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qinst/random.hpp"

namespace qinst {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double sign_of(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

Assemblage random_q_assemblage(RandomEngine& eng) {
  QuantumState rho = random_pure_state(4, eng);
  std::vector<Povm> ms{random_projective_povm(2, eng), random_projective_povm(2, eng),
                       random_projective_povm(2, eng)};
  return from_state_and_measurements(rho, ms);
}

Witness adjoint_transferred(const Witness& w, const OutcomeChannelFamily& family) {
  const int A = w.blocks.num_outcomes();
  const int X = w.blocks.num_inputs();
  Assemblage mapped(A, X, w.blocks.dim());
  for (int a = 0; a < A; ++a) {
    KrausMap adj = adjoint_channel(family.channels.at(a));
    for (int x = 0; x < X; ++x) mapped.set_block(a, x, adj.apply(w.blocks.block(a, x)));
  }
  Witness out(std::move(mapped), w.beta, 0.0);
  out.scale = out.recomputed_scale();
  return out;
}

}  // namespace

QuantumState dephased_bell_state(double visibility) {
  require(visibility >= 0.0 && visibility <= 1.0,
          "dephased_bell_state: visibility must lie in [0, 1]");
  Vector psi(4);
  psi << 1, 0, 0, 1;
  psi /= std::sqrt(2.0);
  Matrix rho = visibility * (psi * psi.adjoint());
  rho(0, 0) += (1.0 - visibility) / 2.0;
  rho(3, 3) += (1.0 - visibility) / 2.0;
  return QuantumState{HermitianMatrix(rho)};
}

std::vector<Povm> alice_measurements() {
  const Matrix obs[3] = {-(pauli_x() + pauli_z()) / std::sqrt(2.0), pauli_x(), pauli_z()};
  std::vector<Povm> out;
  out.reserve(3);
  for (const Matrix& o : obs) {
    std::vector<HermitianMatrix> elems;
    elems.emplace_back(Matrix(0.5 * (identity(2) + o)));
    elems.emplace_back(Matrix(0.5 * (identity(2) - o)));
    out.emplace_back(std::move(elems));
  }
  return out;
}

Assemblage paper_assemblage(double visibility) {
  return from_state_and_measurements(dephased_bell_state(visibility), alice_measurements());
}

double di_coefficient(int a, int b, int x) {
  require(a == 0 || a == 1, "di_coefficient: a must be 0 or 1");
  require(b == 0 || b == 1, "di_coefficient: b must be 0 or 1");
  switch (x) {
    case 0:
      return sign_of(a) - sign_of(b) - sign_of(a + b);
    case 1:
      return 2.0 * sign_of(b);
    case 2:
      return 2.0 * sign_of(a + b);
    default:
      throw std::invalid_argument("di_coefficient: x must be 0, 1 or 2");
  }
}

DiEvaluation evaluate_di(const Assemblage& s, const std::vector<Povm>& bob) {
  require(s.num_outcomes() == 2 && s.num_inputs() == 3,
          "evaluate_di: assemblage must have 2 outcomes and 3 inputs");
  require(bob.size() == 2, "evaluate_di: need one Bob measurement per outcome");
  for (const Povm& m : bob) {
    require(m.num_outcomes() == 2, "evaluate_di: Bob measurements must be two-outcome");
    require(m.dim() == s.dim(), "evaluate_di: Bob measurement dimension mismatch");
  }

  DiEvaluation out;
  out.bob_measurements = bob;
  out.joint_distribution.assign(12, 0.0);
  for (int x = 0; x < 3; ++x) {
    double row_sum = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double p = hs_inner(bob[a].element(b), s.block(a, x));
        require(p >= -1e-10, "evaluate_di: negative joint probability");
        out.joint_distribution[b + 2 * a + 4 * x] = p;
        row_sum += p;
        out.value += di_coefficient(a, b, x) * p;
      }
    require(std::abs(row_sum - 1.0) <= 1e-9, "evaluate_di: joint distribution not normalized");
  }
  return out;
}

double di_value(const Assemblage& s, const std::vector<Povm>& bob) {
  return evaluate_di(s, bob).value;
}

DiEvaluation optimize_bob_measurements(const Assemblage& s) {
  require(s.num_outcomes() == 2 && s.num_inputs() == 3,
          "optimize_bob_measurements: assemblage must have 2 outcomes and 3 inputs");
  const int d = s.dim();
  std::vector<Povm> bob;
  bob.reserve(2);
  for (int a = 0; a < 2; ++a) {
    Matrix g = Matrix::Zero(d, d);
    for (int x = 0; x < 3; ++x)
      g += (di_coefficient(a, 0, x) - di_coefficient(a, 1, x)) * s.block(a, x).matrix();
    EigResult eig = eig_hermitian(HermitianMatrix(g));
    Matrix proj = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
      if (eig.eigenvalues(i) >= 0.0)
        proj += eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
    std::vector<HermitianMatrix> elems;
    elems.emplace_back(proj);
    elems.emplace_back(Matrix(Matrix::Identity(d, d) - proj));
    bob.emplace_back(std::move(elems));
  }
  return evaluate_di(s, bob);
}

void VerificationReport::add(const std::string& check_name, bool check_pass, double observed,
                             double tolerance) {
  checks.push_back({check_name, check_pass, observed, tolerance});
  pass = pass && check_pass;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& c : checks)
    items.push_back({{"name", c.name},
                     {"pass", c.pass},
                     {"observed", c.observed},
                     {"tolerance", c.tolerance}});
  return {{"name", name}, {"pass", pass}, {"seed", seed}, {"trials", trials},
          {"checks", items}};
}

VerificationReport verify_theorem1(const sdp::SolverConfig& cfg) {
  VerificationReport rep;
  rep.name = "theorem1";
  rep.seed = 20260814;
  rep.trials = 1000;
  const double bound = 2.0 + 1.0 / std::sqrt(2.0);

  Assemblage sq = paper_assemblage(1.0);
  Witness w(sq.scaled(2.0), bound, 0.0);
  w.scale = w.recomputed_scale();

  const double pv = pair_value(w.blocks, sq);
  rep.add("doubled assemblage pairs with itself to 3", std::abs(pv - 3.0) <= 1e-9, pv, 1e-9);

  AnalyticBoundInput inp;
  inp.u_vectors = {Eigen::Vector3d(-1.0 / std::sqrt(2.0), 0, -1.0 / std::sqrt(2.0)),
                   Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 0, 1)};
  AnalyticBoundResult ab = analytic_rank1_bound(inp);
  rep.add("rank-1 bound equals 2 + 1/sqrt(2)", std::abs(ab.beta - bound) <= 1e-12, ab.beta,
          1e-12);

  Eigen::Vector3d v0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d v1 = Eigen::Vector3d::Zero();
  DeterministicStrategy outputs011{2, 3, 6};
  for (int x = 0; x < 3; ++x) (outputs011.output(x) == 0 ? v0 : v1) += inp.u_vectors[x];
  const double ns = v0.norm() + v1.norm();
  rep.add("outputs (0,1,1) attain the norm-sum maximum 1 + sqrt(2)",
          std::abs(ns - (1.0 + std::sqrt(2.0))) <= 1e-12 &&
              std::abs(ns - ab.max_norm_sum) <= 1e-12,
          ns, 1e-12);

  MembershipResult m = membership(sq, cfg);
  rep.add("assemblage lies outside the model set", m.mu_star > kMembershipTol, m.mu_star,
          kMembershipTol);

  SoundnessReport snd = check_witness_soundness(w, rep.trials, rep.seed);
  rep.add("witness bound holds on all model samples", snd.violations == 0,
          static_cast<double>(snd.violations), 0.0);
  rep.add("concentrated samples approach the bound", snd.max_sampled_value >= 2.7,
          snd.max_sampled_value, 2.7);
  return rep;
}

VerificationReport verify_theorem2(std::uint64_t seed, int trials, const sdp::SolverConfig& cfg) {
  require(trials >= 1, "verify_theorem2: need at least one trial");
  VerificationReport rep;
  rep.name = "theorem2";
  rep.seed = seed;
  rep.trials = trials;

  {
    Assemblage base = paper_assemblage(0.7);
    OutcomeChannelFamily id{{Channel::identity_channel(2), Channel::identity_channel(2)}};
    const double r = robustness_ni(base, cfg).t_star;
    const double ri = robustness_ni(apply_outcome_channels(id, base), cfg).t_star;
    rep.add("identity channels preserve the robustness", std::abs(r - ri) <= 1e-6,
            std::abs(r - ri), 1e-6);
  }

  double max_increase = -std::numeric_limits<double>::infinity();
  double max_pair_dev = 0.0;
  double max_excess = -std::numeric_limits<double>::infinity();
  int soundness_violations = 0;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> kraus_count(1, 3);
  for (int i = 0; i < trials; ++i) {
    RandomEngine eng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Assemblage sq = i % 2 == 0 ? paper_assemblage(u01(eng)) : random_q_assemblage(eng);
    OutcomeChannelFamily family{{random_channel(2, kraus_count(eng), eng),
                                 random_channel(2, kraus_count(eng), eng)}};
    Assemblage sqi = apply_outcome_channels(family, sq);

    RobustnessResult rq = robustness_ni(sq, cfg);
    RobustnessResult rqi = robustness_ni(sqi, cfg);
    max_increase = std::max(max_increase, rqi.t_star - rq.t_star);

    Witness transferred = adjoint_transferred(rqi.witness, family);
    const double p_direct = pair_value(rqi.witness.blocks, sqi);
    const double p_adjoint = pair_value(transferred.blocks, sq);
    max_pair_dev = std::max(max_pair_dev, std::abs(p_direct - p_adjoint));

    SoundnessReport snd = check_witness_soundness(
        transferred, 40, derive_seed(seed, 1000000 + static_cast<std::uint64_t>(i)));
    soundness_violations += snd.violations;
    max_excess = std::max(max_excess, snd.max_sampled_value - 1.0);
  }
  rep.add("post-processing never increases the robustness", max_increase <= 1e-6, max_increase,
          1e-6);
  rep.add("adjoint pairing identity holds", max_pair_dev <= 1e-8, max_pair_dev, 1e-8);
  rep.add("adjoint-mapped witness stays bounded by 1", soundness_violations == 0, max_excess,
          1e-7);
  return rep;
}

VerificationReport monotonicity_check(std::uint64_t seed, int trials,
                                      const sdp::SolverConfig& cfg) {
  require(trials >= 1, "monotonicity_check: need at least one trial");
  VerificationReport rep;
  rep.name = "monotonicity";
  rep.seed = seed;
  rep.trials = trials;

  {
    Assemblage member = sample_random_1sqi(2, 3, 2, derive_seed(seed, 900001), false);
    const double r = robustness_ni(member, cfg).t_star;
    rep.add("model members have zero robustness", r <= 1e-6, r, 1e-6);
  }
  {
    Assemblage sq = paper_assemblage(1.0);
    Channel dep = Channel::depolarizing(0.3);
    OutcomeChannelFamily family{{dep, dep}};
    const double r = robustness_ni(sq, cfg).t_star;
    const double rd = robustness_ni(apply_outcome_channels(family, sq), cfg).t_star;
    rep.add("depolarizing noise strictly decreases the robustness", rd < r - 1e-3, r - rd, 1e-3);
  }

  double max_increase = -std::numeric_limits<double>::infinity();
  double max_relabel_dev = -1.0;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> kraus_count(1, 3);
  for (int i = 0; i < trials; ++i) {
    RandomEngine eng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Assemblage base =
        i % 2 == 0 ? paper_assemblage(0.2 + 0.8 * u01(eng)) : random_q_assemblage(eng);
    const double rb = robustness_ni(base, cfg).t_star;

    Assemblage mapped(1, 1, 1);
    switch (i % 3) {
      case 0: {
        Channel e = random_channel(2, kraus_count(eng), eng);
        mapped = apply_outcome_channels(OutcomeChannelFamily{{e, e}}, base);
        break;
      }
      case 1: {
        Assemblage member =
            sample_random_1sqi(2, 3, 2, derive_seed(seed, 500000 + static_cast<std::uint64_t>(i)),
                               i % 4 < 2);
        mapped = mix(base, member, u01(eng));
        break;
      }
      default:
        mapped = relabel_outcomes(base, {1, 0});
        break;
    }
    const double rm = robustness_ni(mapped, cfg).t_star;
    max_increase = std::max(max_increase, rm - rb);
    if (i % 3 == 2) max_relabel_dev = std::max(max_relabel_dev, std::abs(rm - rb));
  }
  rep.add("mapped robustness never exceeds the original", max_increase <= 1e-6, max_increase,
          1e-6);
  if (max_relabel_dev >= 0.0)
    rep.add("outcome relabeling leaves the robustness unchanged", max_relabel_dev <= 1e-6,
            max_relabel_dev, 1e-6);
  return rep;
}

}  // namespace qinst
