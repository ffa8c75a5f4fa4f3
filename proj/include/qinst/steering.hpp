#pragma once

#include <vector>

#include "qinst/assemblage.hpp"
#include "qinst/instrumentality.hpp"
#include "qinst/sdp.hpp"

namespace qinst {

// Hidden-state analysis with outcome-independent states: the restriction of
// the instrumental model where every strategy lambda carries a single block
// shared across outcomes.

struct LhsMembershipResult {
  double mu_star = 0.0;
  double mu_dual = 0.0;
  double gap = 0.0;  // |mu_star - mu_dual|
  bool lhs_feasible = false;

  std::vector<HermitianMatrix> hidden_blocks;  // sigma~_lambda, shared across a
  std::vector<double> lambda_weights;
  Witness witness;  // from the dual solve; beta = 0

  sdp::SolveStatus primal_status = sdp::SolveStatus::NumericalFailure;
  sdp::SolveStatus dual_status = sdp::SolveStatus::NumericalFailure;
  int primal_iterations = 0;
  int dual_iterations = 0;
};

struct SteeringRobustnessResult {
  double t_star = 0.0;
  double t_dual = 0.0;
  double gap = 0.0;  // |t_star - t_dual|
  Assemblage noise;   // outcome-independent hidden-state form
  Assemblage target;  // (s + t* noise) / (1 + t*)
  Witness witness;    // from the dual solve; beta = 1

  sdp::SolveStatus primal_status = sdp::SolveStatus::NumericalFailure;
  sdp::SolveStatus dual_status = sdp::SolveStatus::NumericalFailure;
  int primal_iterations = 0;
  int dual_iterations = 0;

  SteeringRobustnessResult() : noise(1, 1, 1), target(1, 1, 1) {}
};

// Combined report used by the CLI curve output.
struct SteeringResult {
  bool lhs_feasible = false;
  double mu_star = 0.0;
  double robustness = 0.0;
  Witness witness;    // robustness witness; beta = 1
  double gap = 0.0;   // max of the two primal/dual gaps
};

// Decides membership in the outcome-independent hidden-state set via the
// shifted decomposition program and recovers a witness from its dual.
// Signalling inputs admit no such decomposition at any shift; mu_star is
// then +infinity and the hidden blocks stay empty.
LhsMembershipResult lhs_membership(const Assemblage& s, const sdp::SolverConfig& cfg = {});

// Minimal t such that (s + t*noise)/(1+t) admits an outcome-independent
// hidden-state model, with the noise drawn from the same set. Signalling
// inputs are unreachable by such mixtures; t_star is then +infinity.
SteeringRobustnessResult steering_robustness(const Assemblage& s,
                                             const sdp::SolverConfig& cfg = {});

SteeringResult analyze_steering(const Assemblage& s, const sdp::SolverConfig& cfg = {});

}  // namespace qinst
