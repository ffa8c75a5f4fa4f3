#pragma once

#include <cstdint>
#include <vector>

#include "qinst/assemblage.hpp"
#include "qinst/sdp.hpp"

namespace qinst {

// Membership decisions treat optima at or below this level as inside the
// model class.
inline constexpr double kMembershipTol = 1e-7;

// Linear functional on assemblages with a certified bound: for every
// assemblage s admitting the causal model, pair_value(blocks, s) <= beta.
struct Witness {
  Assemblage blocks;
  double beta = 0.0;
  double scale = 0.0;  // sum_{a,x} Tr[w_{a|x}]

  Witness() : blocks(1, 1, 1) {}
  Witness(Assemblage b, double beta_, double scale_)
      : blocks(std::move(b)), beta(beta_), scale(scale_) {}

  double recomputed_scale() const;
};

struct MembershipResult {
  double mu_star = 0.0;
  double mu_dual = 0.0;
  double gap = 0.0;  // |mu_star - mu_dual|
  bool in_model = false;
  // Hidden-state decomposition sigma~_{a,lambda} indexed a + A*lambda,
  // recovered from the primal solve.
  std::vector<HermitianMatrix> decomposition;
  std::vector<double> lambda_weights;
  Witness witness;  // from the dual solve; beta = 0
  // Dual shift scalars C_{a,lambda}, indexed a + A*lambda.
  std::vector<double> shift_multipliers;
  sdp::SolveStatus primal_status = sdp::SolveStatus::NumericalFailure;
  sdp::SolveStatus dual_status = sdp::SolveStatus::NumericalFailure;
  int primal_iterations = 0;
  int dual_iterations = 0;
};

struct RobustnessResult {
  double t_star = 0.0;
  double t_dual = 0.0;
  double gap = 0.0;  // |t_star - t_dual|
  Assemblage noise;   // Pi, inside the model class
  Assemblage target;  // (s + t* Pi) / (1 + t*), inside the model class
  Witness witness;    // V from the dual solve; beta = 1
  // Spectral envelope multipliers indexed a + A*lambda.
  std::vector<double> upper_multipliers;  // B_{a,lambda}
  std::vector<double> lower_multipliers;  // B'_{a,lambda}
  sdp::SolveStatus primal_status = sdp::SolveStatus::NumericalFailure;
  sdp::SolveStatus dual_status = sdp::SolveStatus::NumericalFailure;
  int primal_iterations = 0;
  int dual_iterations = 0;

  RobustnessResult() : noise(1, 1, 1), target(1, 1, 1) {}
};

// Decides whether the assemblage admits an instrument-compatible hidden
// state model with outcome-dependent states. Runs the membership program
// and its explicit dual; the dual solution provides the witness.
MembershipResult membership(const Assemblage& s, const sdp::SolverConfig& cfg = {});

// Minimal mixing weight t such that (s + t*Pi)/(1+t) admits the model, over
// model-compatible noise Pi. Runs the mixing program and its explicit dual;
// the dual solution provides a witness with bound 1.
RobustnessResult robustness_ni(const Assemblage& s, const sdp::SolverConfig& cfg = {});

// Largest witness value over the full model class, computed in closed form:
// max_lambda sum_a lambda_max(F_{a,lambda}) with
// F_{a,lambda} = sum_x D_lambda(a|x) w_{a|x}.
double exact_model_value(const Witness& w);

// The model member attaining exact_model_value for strategy `lambda`
// (weights concentrated on lambda, states the top eigenprojectors).
Assemblage concentrated_maximizer(const Witness& w, long long lambda);

struct AnalyticBoundInput {
  std::vector<Eigen::Vector3d> u_vectors;
};

struct AnalyticBoundResult {
  double beta = 0.0;
  double max_norm_sum = 0.0;
  long long best_strategy = 0;  // smallest maximizing strategy index
};

// Closed-form bound for binary-outcome qubit witnesses with rank-1 block
// structure: beta = |X|/2 + (1/2) max_lambda sum_a |v_{a,lambda}| where
// v_{a,lambda} = sum_x D_lambda(a|x) u_x.
AnalyticBoundResult analytic_rank1_bound(const AnalyticBoundInput& inp);

struct SoundnessReport {
  int trials = 0;
  int violations = 0;
  double max_sampled_value = 0.0;
  double exact_model_max = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
};

// Checks pair_value(w.blocks, s) <= w.beta + 1e-7 over random model members
// plus the strategy-concentrated maximizers of the witness.
SoundnessReport check_witness_soundness(const Witness& w, int trials, std::uint64_t seed);

}  // namespace qinst
