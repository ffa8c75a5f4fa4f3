#include "qinst/assemblage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qinst/random.hpp"

namespace qinst {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Assemblage::Assemblage(int num_outcomes, int num_inputs, int dim)
    : num_outcomes_(num_outcomes), num_inputs_(num_inputs), dim_(dim) {
  require(num_outcomes >= 1 && num_inputs >= 1 && dim >= 1,
          "Assemblage: sizes must be positive");
  blocks_.assign(static_cast<std::size_t>(num_outcomes) * num_inputs,
                 HermitianMatrix::zero(dim));
}

Assemblage::Assemblage(int num_outcomes, int num_inputs, int dim,
                       std::vector<HermitianMatrix> blocks)
    : Assemblage(num_outcomes, num_inputs, dim) {
  require(blocks.size() == static_cast<std::size_t>(num_outcomes) * num_inputs,
          "Assemblage: expected num_outcomes*num_inputs blocks");
  for (const auto& b : blocks)
    require(b.dim() == dim, "Assemblage: block dimension mismatch");
  blocks_ = std::move(blocks);
}

int Assemblage::index(int a, int x) const {
  require(a >= 0 && a < num_outcomes_ && x >= 0 && x < num_inputs_,
          "Assemblage: index out of range");
  return a + num_outcomes_ * x;
}

const HermitianMatrix& Assemblage::block(int a, int x) const { return blocks_[index(a, x)]; }

void Assemblage::set_block(int a, int x, const HermitianMatrix& m) {
  require(m.dim() == dim_, "Assemblage: block dimension mismatch");
  blocks_[index(a, x)] = m;
}

Assemblage Assemblage::scaled(double factor) const {
  Assemblage out = *this;
  for (auto& b : out.blocks_) b = b * factor;
  return out;
}

Assemblage Assemblage::operator+(const Assemblage& other) const {
  require(num_outcomes_ == other.num_outcomes_ && num_inputs_ == other.num_inputs_ &&
              dim_ == other.dim_,
          "Assemblage: shape mismatch in +");
  Assemblage out = *this;
  for (std::size_t i = 0; i < blocks_.size(); ++i) out.blocks_[i] = blocks_[i] + other.blocks_[i];
  return out;
}

Assemblage Assemblage::operator-(const Assemblage& other) const {
  return *this + other.scaled(-1.0);
}

Assemblage::Validation Assemblage::validate(double psd_tol, double norm_tol) const {
  Validation v;
  v.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks_) {
    v.min_eigenvalue = std::min(v.min_eigenvalue, b.min_eigenvalue());
    v.max_hermiticity_residual = std::max(v.max_hermiticity_residual,
                                          b.symmetrization_residual());
  }
  for (int x = 0; x < num_inputs_; ++x) {
    double tr = 0;
    for (int a = 0; a < num_outcomes_; ++a) tr += block(a, x).trace();
    v.max_normalization_error = std::max(v.max_normalization_error, std::abs(tr - 1.0));
  }
  v.ok = v.min_eigenvalue >= -psd_tol && v.max_normalization_error <= norm_tol;
  if (v.min_eigenvalue < -psd_tol) {
    std::ostringstream msg;
    msg << "block eigenvalue " << v.min_eigenvalue << " below -" << psd_tol;
    v.messages.push_back(msg.str());
  }
  if (v.max_normalization_error > norm_tol) {
    std::ostringstream msg;
    msg << "per-input traces deviate from 1 by " << v.max_normalization_error;
    v.messages.push_back(msg.str());
  }
  return v;
}

Assemblage::NonsignallingReport Assemblage::nonsignalling(double tol) const {
  NonsignallingReport report;
  for (int x = 0; x < num_inputs_; ++x) {
    Matrix red = Matrix::Zero(dim_, dim_);
    for (int a = 0; a < num_outcomes_; ++a) red += block(a, x).matrix();
    report.reduced_per_input.push_back(std::move(red));
  }
  report.reduced = report.reduced_per_input.front();
  for (int x = 1; x < num_inputs_; ++x)
    report.max_deviation =
        std::max(report.max_deviation,
                 (report.reduced_per_input[x] - report.reduced).cwiseAbs().maxCoeff());
  report.nonsignalling = report.max_deviation <= tol;
  return report;
}

int DeterministicStrategy::output(int x) const {
  if (x < 0 || x >= num_inputs)
    throw std::invalid_argument("DeterministicStrategy: input out of range");
  long long v = index;
  for (int i = 0; i < x; ++i) v /= num_outcomes;
  return static_cast<int>(v % num_outcomes);
}

long long strategy_count(int num_outcomes, int num_inputs) {
  if (num_outcomes < 1 || num_inputs < 1)
    throw std::invalid_argument("strategy_count: sizes must be positive");
  long long n = 1;
  for (int i = 0; i < num_inputs; ++i) {
    if (n > (1LL << 40) / num_outcomes)
      throw std::invalid_argument("strategy_count: scenario too large");
    n *= num_outcomes;
  }
  return n;
}

Assemblage from_state_and_measurements(const QuantumState& rho,
                                       const std::vector<Povm>& measurements) {
  require(!measurements.empty(), "from_state_and_measurements: need measurements");
  const int da = measurements.front().dim();
  const int num_outcomes = measurements.front().num_outcomes();
  for (const auto& p : measurements) {
    require(p.dim() == da, "from_state_and_measurements: measurement dimension mismatch");
    require(p.num_outcomes() == num_outcomes,
            "from_state_and_measurements: outcome count mismatch");
  }
  require(rho.dim() % da == 0,
          "from_state_and_measurements: state dimension not divisible by measurement dimension");
  const int db = rho.dim() / da;
  Assemblage out(num_outcomes, static_cast<int>(measurements.size()), db);
  const Matrix eye_b = Matrix::Identity(db, db);
  for (int x = 0; x < static_cast<int>(measurements.size()); ++x)
    for (int a = 0; a < num_outcomes; ++a) {
      Matrix op = kron(measurements[x].element(a).matrix(), eye_b) * rho.matrix();
      out.set_block(a, x, HermitianMatrix(partial_trace(op, da, db, Subsystem::B)));
    }
  return out;
}

Assemblage apply_outcome_channels(const OutcomeChannelFamily& family, const Assemblage& s) {
  require(static_cast<int>(family.channels.size()) == s.num_outcomes(),
          "apply_outcome_channels: one channel per outcome required");
  int out_dim = family.channels.front().output_dim();
  for (const auto& ch : family.channels) {
    require(ch.input_dim() == s.dim(), "apply_outcome_channels: channel input dimension mismatch");
    require(ch.output_dim() == out_dim,
            "apply_outcome_channels: channels must share an output dimension");
  }
  Assemblage out(s.num_outcomes(), s.num_inputs(), out_dim);
  for (int a = 0; a < s.num_outcomes(); ++a)
    for (int x = 0; x < s.num_inputs(); ++x)
      out.set_block(a, x, family.channels[a].apply(s.block(a, x)));
  return out;
}

Assemblage mix(const Assemblage& s, const Assemblage& t, double weight_s) {
  require(weight_s >= 0.0 && weight_s <= 1.0, "mix: weight must lie in [0, 1]");
  return s.scaled(weight_s) + t.scaled(1.0 - weight_s);
}

Assemblage relabel_outcomes(const Assemblage& s, const std::vector<int>& perm) {
  require(static_cast<int>(perm.size()) == s.num_outcomes(),
          "relabel_outcomes: permutation size mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (int p : perm) {
    require(p >= 0 && p < s.num_outcomes() && !seen[p],
            "relabel_outcomes: not a permutation");
    seen[p] = true;
  }
  Assemblage out(s.num_outcomes(), s.num_inputs(), s.dim());
  for (int a = 0; a < s.num_outcomes(); ++a)
    for (int x = 0; x < s.num_inputs(); ++x) out.set_block(a, x, s.block(perm[a], x));
  return out;
}

Assemblage assemble_1sqi(const std::vector<double>& weights,
                         const std::vector<std::vector<QuantumState>>& states,
                         int num_inputs) {
  require(!weights.empty(), "assemble_1sqi: need at least one strategy weight");
  require(weights.size() == states.size(),
          "assemble_1sqi: one state row per strategy required");
  const int num_outcomes = static_cast<int>(states.front().size());
  require(num_outcomes >= 1, "assemble_1sqi: need at least one outcome");
  const long long num_strategies = strategy_count(num_outcomes, num_inputs);
  require(static_cast<long long>(weights.size()) == num_strategies,
          "assemble_1sqi: weight count must equal num_outcomes^num_inputs");
  double total = 0;
  for (double w : weights) {
    require(w >= -1e-12, "assemble_1sqi: weights must be nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-9, "assemble_1sqi: weights must sum to 1");
  const int dim = states.front().front().dim();
  Assemblage out(num_outcomes, num_inputs, dim);
  for (long long lam = 0; lam < num_strategies; ++lam) {
    require(static_cast<int>(states[lam].size()) == num_outcomes,
            "assemble_1sqi: state row size mismatch");
    DeterministicStrategy d{num_outcomes, num_inputs, lam};
    for (int x = 0; x < num_inputs; ++x) {
      const int a = d.output(x);
      require(states[lam][a].dim() == dim, "assemble_1sqi: state dimension mismatch");
      out.set_block(a, x,
                    out.block(a, x) + states[lam][a].rho() * weights[lam]);
    }
  }
  return out;
}

Assemblage sample_random_1sqi(int num_outcomes, int num_inputs, int dim, std::uint64_t seed,
                              bool pure_states) {
  RandomEngine eng(seed);
  const long long n = strategy_count(num_outcomes, num_inputs);
  std::vector<double> weights(n);
  std::exponential_distribution<double> expo(1.0);
  double total = 0;
  for (auto& w : weights) {
    w = expo(eng);
    total += w;
  }
  for (auto& w : weights) w /= total;
  std::vector<std::vector<QuantumState>> states;
  states.reserve(n);
  for (long long lam = 0; lam < n; ++lam) {
    std::vector<QuantumState> row;
    row.reserve(num_outcomes);
    for (int a = 0; a < num_outcomes; ++a)
      row.push_back(pure_states ? random_pure_state(dim, eng) : random_mixed_state(dim, eng));
    states.push_back(std::move(row));
  }
  return assemble_1sqi(weights, states, num_inputs);
}

double pair_value(const Assemblage& w, const Assemblage& s) {
  if (w.num_outcomes() != s.num_outcomes() || w.num_inputs() != s.num_inputs() ||
      w.dim() != s.dim())
    throw std::invalid_argument("pair_value: shape mismatch");
  double v = 0;
  for (int a = 0; a < w.num_outcomes(); ++a)
    for (int x = 0; x < w.num_inputs(); ++x) v += hs_inner(w.block(a, x), s.block(a, x));
  return v;
}

}  // namespace qinst
