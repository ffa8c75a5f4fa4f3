#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "qinst/assemblage.hpp"
#include "qinst/instrumentality.hpp"
#include "qinst/matrix.hpp"
#include "qinst/sdp.hpp"

namespace qinst {

// Classical bound of the instrumental inequality evaluated by di_value.
inline constexpr double kDiClassicalBound = 3.0;

// V |phi+><phi+| + (1-V)/2 (|00><00| + |11><11|).
QuantumState dephased_bell_state(double visibility);

// x = 0, 1, 2: eigenprojector pairs of -(sx+sz)/sqrt(2), sx, sz; outcome
// a = 0 picks the +1 eigenvector.
std::vector<Povm> alice_measurements();

// from_state_and_measurements(dephased_bell_state(V), alice_measurements()).
Assemblage paper_assemblage(double visibility);

// Coefficient of P(a,b|x) in the instrumental inequality; Bob's setting is
// the instrument outcome a, and the classical bound is 3.
double di_coefficient(int a, int b, int x);

struct DiEvaluation {
  double value = 0.0;
  std::vector<Povm> bob_measurements;      // indexed by a, two outcomes each
  std::vector<double> joint_distribution;  // P(a,b|x) at index b + 2a + 4x

  double prob(int a, int b, int x) const { return joint_distribution[b + 2 * a + 4 * x]; }
};

// Evaluates the inequality with the given Bob measurements (indexed by a).
DiEvaluation evaluate_di(const Assemblage& s, const std::vector<Povm>& bob);
double di_value(const Assemblage& s, const std::vector<Povm>& bob);

// Exact maximum over Bob's two-outcome POVMs. The objective is linear in
// each M_a^(0) once M_a^(1) = I - M_a^(0) is substituted, so the optimum is
// the projector onto the nonnegative eigenspace of the coefficient operator.
DiEvaluation optimize_bob_measurements(const Assemblage& s);

struct VerificationCheck {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double tolerance = 0.0;
};

struct VerificationReport {
  std::string name;
  bool pass = true;  // conjunction of the checks
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<VerificationCheck> checks;

  void add(const std::string& check_name, bool check_pass, double observed, double tolerance);
  nlohmann::json to_json() const;
};

// Witness construction for the V=1 assemblage: doubling the assemblage gives
// pairing value 3 against the rank-1 bound 2 + 1/sqrt(2).
VerificationReport verify_theorem1(const sdp::SolverConfig& cfg = {});

// Robustness monotonicity under outcome-dependent channel post-processing,
// plus the adjoint transfer of the optimal witness.
VerificationReport verify_theorem2(std::uint64_t seed, int trials,
                                   const sdp::SolverConfig& cfg = {});

// Robustness monotonicity under outcome-independent channels, mixing with
// model members, and outcome relabelings.
VerificationReport monotonicity_check(std::uint64_t seed, int trials,
                                      const sdp::SolverConfig& cfg = {});

}  // namespace qinst
