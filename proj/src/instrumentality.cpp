#include "qinst/instrumentality.hpp"

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

std::string tag(const std::string& base, int a, long long second) {
  std::ostringstream s;
  s << base << "[" << a << "," << second << "]";
  return s.str();
}

void require_valid(const Assemblage& s, const char* who) {
  auto v = s.validate();
  if (!v.ok) {
    std::string msg = std::string(who) + ": input assemblage is not valid";
    for (const auto& m : v.messages) msg += "; " + m;
    throw std::invalid_argument(msg);
  }
}

long long pow_ll(int base, int exp) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace

double Witness::recomputed_scale() const {
  double s = 0;
  for (int a = 0; a < blocks.num_outcomes(); ++a)
    for (int x = 0; x < blocks.num_inputs(); ++x) s += blocks.block(a, x).trace();
  return s;
}

MembershipResult membership(const Assemblage& s, const sdp::SolverConfig& cfg) {
  require_valid(s, "membership");
  const int A = s.num_outcomes();
  const int X = s.num_inputs();
  const int d = s.dim();
  const long long num_lam = strategy_count(A, X);
  const double n_per_cell = static_cast<double>(pow_ll(A, X - 1));
  const Matrix eye = Matrix::Identity(d, d);

  MembershipResult out;

  // Hidden-state program: sigma_{a|x} decomposes through shifted PSD blocks
  // Z_{a,lambda} = sigma~_{a,lambda} + mu*I with a-independent traces.
  {
    sdp::SdpProblem p;
    std::vector<int> z(A * num_lam);
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a)
        z[a + A * lam] = p.add_block(tag("Z", a, lam), d, sdp::BlockField::ComplexHermitian);
    const int mu = p.add_free_scalar("mu");
    sdp::LinearExpr obj;
    obj.add_scalar(mu, 1.0);
    p.set_objective(sdp::Sense::Minimize, obj);

    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        std::vector<std::pair<int, double>> coeffs;
        for (long long lam = 0; lam < num_lam; ++lam)
          if (DeterministicStrategy{A, X, lam}.matches(a, x))
            coeffs.emplace_back(z[a + A * lam], 1.0);
        p.add_matrix_equality(coeffs, {{mu, Matrix(-n_per_cell * eye)}},
                              s.block(a, x).matrix());
      }
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 1; a < A; ++a) {
        sdp::LinearExpr e;
        e.add_block(z[a + A * lam], eye).add_block(z[0 + A * lam], Matrix(-eye));
        p.add_constraint(std::move(e), 0.0);
      }

    sdp::SdpSolution sol = sdp::solve(p, cfg);
    out.primal_status = sol.status;
    out.primal_iterations = sol.iterations;
    out.mu_star = sol.free_scalar_values[0];
    out.decomposition.reserve(A * num_lam);
    out.lambda_weights.resize(num_lam);
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a)
        out.decomposition.emplace_back(
            Matrix(sol.primal_blocks[z[a + A * lam]] - out.mu_star * eye));
    for (long long lam = 0; lam < num_lam; ++lam)
      out.lambda_weights[lam] = out.decomposition[0 + A * lam].trace();
  }

  // Witness program: the explicit dual with shift scalars C_{a,lambda} and
  // the normalization sum_{a,x} Tr[W_{a|x}] = -1/|A|^{|X|-1}.
  {
    sdp::SdpProblem p;
    std::vector<int> wp(A * X), wm(A * X), slack(A * num_lam), shift(A * num_lam);
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        wp[a + A * x] = p.add_block(tag("W+", a, x), d, sdp::BlockField::ComplexHermitian);
        wm[a + A * x] = p.add_block(tag("W-", a, x), d, sdp::BlockField::ComplexHermitian);
      }
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a) {
        slack[a + A * lam] = p.add_block(tag("T", a, lam), d, sdp::BlockField::ComplexHermitian);
        shift[a + A * lam] = p.add_free_scalar(tag("C", a, lam));
      }

    sdp::LinearExpr obj;
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        obj.add_block(wp[a + A * x], s.block(a, x).matrix());
        obj.add_block(wm[a + A * x], Matrix(-s.block(a, x).matrix()));
      }
    p.set_objective(sdp::Sense::Maximize, obj);

    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a) {
        std::vector<std::pair<int, double>> coeffs;
        for (int x = 0; x < X; ++x)
          if (DeterministicStrategy{A, X, lam}.matches(a, x)) {
            coeffs.emplace_back(wp[a + A * x], -1.0);
            coeffs.emplace_back(wm[a + A * x], 1.0);
          }
        coeffs.emplace_back(slack[a + A * lam], -1.0);
        p.add_matrix_equality(coeffs, {{shift[a + A * lam], eye}}, Matrix::Zero(d, d));
      }
    for (long long lam = 0; lam < num_lam; ++lam) {
      sdp::LinearExpr e;
      for (int a = 0; a < A; ++a) e.add_scalar(shift[a + A * lam], 1.0);
      p.add_constraint(std::move(e), 0.0);
    }
    {
      sdp::LinearExpr e;
      for (int x = 0; x < X; ++x)
        for (int a = 0; a < A; ++a) {
          e.add_block(wp[a + A * x], Matrix(n_per_cell * eye));
          e.add_block(wm[a + A * x], Matrix(-n_per_cell * eye));
        }
      p.add_constraint(std::move(e), -1.0);
    }

    sdp::SdpSolution sol = sdp::solve(p, cfg);
    out.dual_status = sol.status;
    out.dual_iterations = sol.iterations;
    out.mu_dual = sol.primal_objective;
    Assemblage wblocks(A, X, d);
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a)
        wblocks.set_block(a, x,
                          HermitianMatrix(Matrix(sol.primal_blocks[wp[a + A * x]] -
                                                 sol.primal_blocks[wm[a + A * x]])));
    Witness w(std::move(wblocks), 0.0, 0.0);
    w.scale = w.recomputed_scale();
    out.witness = std::move(w);
    out.shift_multipliers.resize(A * num_lam);
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a)
        out.shift_multipliers[a + A * lam] = sol.free_scalar_values[a + A * lam];
  }

  out.gap = std::abs(out.mu_star - out.mu_dual);
  out.in_model = out.mu_star <= kMembershipTol;
  return out;
}

RobustnessResult robustness_ni(const Assemblage& s, const sdp::SolverConfig& cfg) {
  require_valid(s, "robustness_ni");
  const int A = s.num_outcomes();
  const int X = s.num_inputs();
  const int d = s.dim();
  const long long num_lam = strategy_count(A, X);
  const Matrix eye = Matrix::Identity(d, d);

  RobustnessResult out;

  // Mixing program: minimal t with s + t*Pi = (1+t) * model member, both the
  // member (chi~) and the noise part (chi) ranging over the model cone.
  {
    sdp::SdpProblem p;
    std::vector<int> chit(A * num_lam), chi(A * num_lam);
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a) {
        chit[a + A * lam] = p.add_block(tag("F", a, lam), d, sdp::BlockField::ComplexHermitian);
        chi[a + A * lam] = p.add_block(tag("G", a, lam), d, sdp::BlockField::ComplexHermitian);
      }
    const int t = p.add_free_scalar("t");
    sdp::LinearExpr obj;
    obj.add_scalar(t, 1.0);
    p.set_objective(sdp::Sense::Minimize, obj);

    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        std::vector<std::pair<int, double>> coeffs;
        for (long long lam = 0; lam < num_lam; ++lam)
          if (DeterministicStrategy{A, X, lam}.matches(a, x)) {
            coeffs.emplace_back(chit[a + A * lam], 1.0);
            coeffs.emplace_back(chi[a + A * lam], -1.0);
          }
        p.add_matrix_equality(coeffs, {}, s.block(a, x).matrix());
      }
    {
      sdp::LinearExpr e;
      for (long long lam = 0; lam < num_lam; ++lam) e.add_block(chit[0 + A * lam], eye);
      e.add_scalar(t, -1.0);
      p.add_constraint(std::move(e), 1.0);
    }
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 1; a < A; ++a) {
        sdp::LinearExpr e1;
        e1.add_block(chit[a + A * lam], eye).add_block(chit[0 + A * lam], Matrix(-eye));
        p.add_constraint(std::move(e1), 0.0);
        sdp::LinearExpr e2;
        e2.add_block(chi[a + A * lam], eye).add_block(chi[0 + A * lam], Matrix(-eye));
        p.add_constraint(std::move(e2), 0.0);
      }

    sdp::SdpSolution sol = sdp::solve(p, cfg);
    out.primal_status = sol.status;
    out.primal_iterations = sol.iterations;
    const double t_raw = sol.free_scalar_values[0];
    out.t_star = std::max(0.0, t_raw);

    Assemblage noise(A, X, d);
    Assemblage target(A, X, d);
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        Matrix noise_sum = Matrix::Zero(d, d);
        Matrix target_sum = Matrix::Zero(d, d);
        for (long long lam = 0; lam < num_lam; ++lam)
          if (DeterministicStrategy{A, X, lam}.matches(a, x)) {
            noise_sum += sol.primal_blocks[chi[a + A * lam]];
            target_sum += sol.primal_blocks[chit[a + A * lam]];
          }
        noise.set_block(a, x, HermitianMatrix(noise_sum));
        target.set_block(a, x, HermitianMatrix(target_sum));
      }
    if (out.t_star > 1e-9) {
      out.noise = noise.scaled(1.0 / t_raw);
    } else {
      Assemblage uniform(A, X, d);
      for (int x = 0; x < X; ++x)
        for (int a = 0; a < A; ++a)
          uniform.set_block(a, x, HermitianMatrix(Matrix(eye / (A * d))));
      out.noise = uniform;
    }
    out.target = target.scaled(1.0 / (1.0 + t_raw));
  }

  // Witness program: the explicit dual with spectral envelopes
  // B'_{a,lambda} I <= sum_x D_lambda(a|x) V_{a|x} <= B_{a,lambda} I.
  {
    sdp::SdpProblem p;
    std::vector<int> vp(A * X), vm(A * X), up(A * num_lam), lo(A * num_lam);
    std::vector<int> bu(A * num_lam), bl(A * num_lam);
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        vp[a + A * x] = p.add_block(tag("V+", a, x), d, sdp::BlockField::ComplexHermitian);
        vm[a + A * x] = p.add_block(tag("V-", a, x), d, sdp::BlockField::ComplexHermitian);
      }
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a) {
        up[a + A * lam] = p.add_block(tag("TU", a, lam), d, sdp::BlockField::ComplexHermitian);
        lo[a + A * lam] = p.add_block(tag("TL", a, lam), d, sdp::BlockField::ComplexHermitian);
        bu[a + A * lam] = p.add_free_scalar(tag("B", a, lam));
        bl[a + A * lam] = p.add_free_scalar(tag("B'", a, lam));
      }

    sdp::LinearExpr obj;
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        obj.add_block(vp[a + A * x], s.block(a, x).matrix());
        obj.add_block(vm[a + A * x], Matrix(-s.block(a, x).matrix()));
      }
    p.set_objective(sdp::Sense::Maximize, obj);

    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a) {
        std::vector<std::pair<int, double>> upper;
        std::vector<std::pair<int, double>> lower;
        for (int x = 0; x < X; ++x)
          if (DeterministicStrategy{A, X, lam}.matches(a, x)) {
            upper.emplace_back(vp[a + A * x], -1.0);
            upper.emplace_back(vm[a + A * x], 1.0);
            lower.emplace_back(vp[a + A * x], 1.0);
            lower.emplace_back(vm[a + A * x], -1.0);
          }
        upper.emplace_back(up[a + A * lam], -1.0);
        lower.emplace_back(lo[a + A * lam], -1.0);
        p.add_matrix_equality(upper, {{bu[a + A * lam], eye}}, Matrix::Zero(d, d));
        p.add_matrix_equality(lower, {{bl[a + A * lam], Matrix(-eye)}}, Matrix::Zero(d, d));
      }
    for (long long lam = 0; lam < num_lam; ++lam) {
      sdp::LinearExpr e1, e2;
      for (int a = 0; a < A; ++a) {
        e1.add_scalar(bu[a + A * lam], 1.0);
        e2.add_scalar(bl[a + A * lam], 1.0);
      }
      p.add_constraint(std::move(e1), 1.0);
      p.add_constraint(std::move(e2), 0.0);
    }

    sdp::SdpSolution sol = sdp::solve(p, cfg);
    out.dual_status = sol.status;
    out.dual_iterations = sol.iterations;
    out.t_dual = sol.primal_objective - 1.0;
    Assemblage vblocks(A, X, d);
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a)
        vblocks.set_block(a, x,
                          HermitianMatrix(Matrix(sol.primal_blocks[vp[a + A * x]] -
                                                 sol.primal_blocks[vm[a + A * x]])));
    Witness w(std::move(vblocks), 1.0, 0.0);
    w.scale = w.recomputed_scale();
    out.witness = std::move(w);
    out.upper_multipliers.resize(A * num_lam);
    out.lower_multipliers.resize(A * num_lam);
    for (long long lam = 0; lam < num_lam; ++lam)
      for (int a = 0; a < A; ++a) {
        out.upper_multipliers[a + A * lam] = sol.free_scalar_values[bu[a + A * lam]];
        out.lower_multipliers[a + A * lam] = sol.free_scalar_values[bl[a + A * lam]];
      }
  }

  out.gap = std::abs(std::max(0.0, out.t_dual) - out.t_star);
  return out;
}

double exact_model_value(const Witness& w) {
  const int A = w.blocks.num_outcomes();
  const int X = w.blocks.num_inputs();
  const int d = w.blocks.dim();
  const long long num_lam = strategy_count(A, X);
  double best = -std::numeric_limits<double>::infinity();
  for (long long lam = 0; lam < num_lam; ++lam) {
    double value = 0;
    for (int a = 0; a < A; ++a) {
      Matrix f = Matrix::Zero(d, d);
      bool reachable = false;
      for (int x = 0; x < X; ++x)
        if (DeterministicStrategy{A, X, lam}.matches(a, x)) {
          f += w.blocks.block(a, x).matrix();
          reachable = true;
        }
      if (reachable) value += eig_hermitian(HermitianMatrix(f)).eigenvalues(0);
    }
    best = std::max(best, value);
  }
  return best;
}

Assemblage concentrated_maximizer(const Witness& w, long long lambda) {
  const int A = w.blocks.num_outcomes();
  const int X = w.blocks.num_inputs();
  const int d = w.blocks.dim();
  const long long num_lam = strategy_count(A, X);
  require(lambda >= 0 && lambda < num_lam, "concentrated_maximizer: strategy out of range");
  std::vector<QuantumState> row;
  row.reserve(A);
  for (int a = 0; a < A; ++a) {
    Matrix f = Matrix::Zero(d, d);
    for (int x = 0; x < X; ++x)
      if (DeterministicStrategy{A, X, lambda}.matches(a, x)) f += w.blocks.block(a, x).matrix();
    EigResult eig = eig_hermitian(HermitianMatrix(f));
    Vector top = eig.eigenvectors.col(0);
    row.emplace_back(HermitianMatrix(Matrix(top * top.adjoint())));
  }
  std::vector<double> weights(num_lam, 0.0);
  weights[lambda] = 1.0;
  std::vector<std::vector<QuantumState>> states(num_lam, row);
  return assemble_1sqi(weights, states, X);
}

AnalyticBoundResult analytic_rank1_bound(const AnalyticBoundInput& inp) {
  const int X = static_cast<int>(inp.u_vectors.size());
  require(X >= 1, "analytic_rank1_bound: need at least one direction");
  require(X <= 24, "analytic_rank1_bound: too many inputs");
  for (const auto& u : inp.u_vectors)
    require(u.allFinite(), "analytic_rank1_bound: directions must be finite");
  const long long num_lam = strategy_count(2, X);
  AnalyticBoundResult out;
  out.max_norm_sum = -1.0;
  for (long long lam = 0; lam < num_lam; ++lam) {
    Eigen::Vector3d v0 = Eigen::Vector3d::Zero();
    Eigen::Vector3d v1 = Eigen::Vector3d::Zero();
    DeterministicStrategy strat{2, X, lam};
    for (int x = 0; x < X; ++x)
      (strat.output(x) == 0 ? v0 : v1) += inp.u_vectors[x];
    const double norm_sum = v0.norm() + v1.norm();
    if (norm_sum > out.max_norm_sum + 1e-15) {
      out.max_norm_sum = norm_sum;
      out.best_strategy = lam;
    }
  }
  out.beta = 0.5 * X + 0.5 * out.max_norm_sum;
  return out;
}

SoundnessReport check_witness_soundness(const Witness& w, int trials, std::uint64_t seed) {
  SoundnessReport report;
  report.beta = w.beta;
  report.seed = seed;
  report.exact_model_max = exact_model_value(w);
  report.max_sampled_value = -std::numeric_limits<double>::infinity();
  const int A = w.blocks.num_outcomes();
  const int X = w.blocks.num_inputs();
  const int d = w.blocks.dim();
  const long long num_lam = strategy_count(A, X);
  auto record = [&](const Assemblage& s) {
    const double v = pair_value(w.blocks, s);
    report.max_sampled_value = std::max(report.max_sampled_value, v);
    if (v > w.beta + 1e-7) ++report.violations;
    ++report.trials;
  };
  for (long long lam = 0; lam < num_lam; ++lam) record(concentrated_maximizer(w, lam));
  for (int i = 0; i < trials; ++i)
    record(sample_random_1sqi(A, X, d, derive_seed(seed, i), i % 2 == 0));
  return report;
}

}  // namespace qinst
