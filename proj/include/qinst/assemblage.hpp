#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qinst/matrix.hpp"

namespace qinst {

inline constexpr double kNormalizationTol = 1e-8;

// Family of Hermitian blocks indexed by an outcome a and an input x. For a
// state assemblage the block at (a, x) is the subnormalized post-measurement
// state of the remote party.
class Assemblage {
 public:
  Assemblage(int num_outcomes, int num_inputs, int dim);
  Assemblage(int num_outcomes, int num_inputs, int dim, std::vector<HermitianMatrix> blocks);

  int num_outcomes() const { return num_outcomes_; }
  int num_inputs() const { return num_inputs_; }
  int dim() const { return dim_; }

  const HermitianMatrix& block(int a, int x) const;
  void set_block(int a, int x, const HermitianMatrix& m);

  Assemblage scaled(double factor) const;
  Assemblage operator+(const Assemblage& other) const;
  Assemblage operator-(const Assemblage& other) const;

  struct Validation {
    bool ok = false;
    double min_eigenvalue = 0.0;
    double max_normalization_error = 0.0;
    double max_hermiticity_residual = 0.0;
    std::vector<std::string> messages;
  };
  Validation validate(double psd_tol = kPsdTol, double norm_tol = kNormalizationTol) const;

  struct NonsignallingReport {
    bool nonsignalling = false;
    double max_deviation = 0.0;
    Matrix reduced;                    // reduced state at x = 0
    std::vector<Matrix> reduced_per_input;
  };
  NonsignallingReport nonsignalling(double tol = kNormalizationTol) const;

 private:
  int index(int a, int x) const;

  int num_outcomes_;
  int num_inputs_;
  int dim_;
  std::vector<HermitianMatrix> blocks_;
};

// Deterministic single-party response function. Strategy `index` encodes the
// output for input x as digit x of `index` in base num_outcomes, least
// significant digit first.
struct DeterministicStrategy {
  int num_outcomes = 0;
  int num_inputs = 0;
  long long index = 0;

  int output(int x) const;
  bool matches(int a, int x) const { return output(x) == a; }
};

long long strategy_count(int num_outcomes, int num_inputs);

// One channel per outcome of the instrument party.
struct OutcomeChannelFamily {
  std::vector<Channel> channels;
};

// sigma_{a|x} = Tr_A[(M_x^(a) (x) I) rho] for a bipartite state rho and
// measurements on the first factor.
Assemblage from_state_and_measurements(const QuantumState& rho,
                                       const std::vector<Povm>& measurements);

// Blockwise action sigma_{a|x} -> E_a(sigma_{a|x}).
Assemblage apply_outcome_channels(const OutcomeChannelFamily& family, const Assemblage& s);

Assemblage mix(const Assemblage& s, const Assemblage& t, double weight_s);

// sigma'_{a|x} = sigma_{perm[a]|x}; perm must be a permutation of outcomes.
Assemblage relabel_outcomes(const Assemblage& s, const std::vector<int>& perm);

// sigma_{a|x} = sum_lambda weights[lambda] D_lambda(a|x) states[lambda][a].
Assemblage assemble_1sqi(const std::vector<double>& weights,
                         const std::vector<std::vector<QuantumState>>& states,
                         int num_inputs);

// Random model of the above with simplex-uniform weights and Ginibre-induced
// states (rank-1 when pure_states is set).
Assemblage sample_random_1sqi(int num_outcomes, int num_inputs, int dim, std::uint64_t seed,
                              bool pure_states = false);

// sum_{a,x} Tr[w_{a|x} s_{a|x}].
double pair_value(const Assemblage& w, const Assemblage& s);

}  // namespace qinst
