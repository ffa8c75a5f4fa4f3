#include "qinst/steering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qinst {

namespace {

std::string tag(const std::string& base, long long idx) {
  std::ostringstream s;
  s << base << "[" << idx << "]";
  return s.str();
}

std::string tag2(const std::string& base, int a, int x) {
  std::ostringstream s;
  s << base << "[" << a << "," << x << "]";
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

LhsMembershipResult lhs_membership(const Assemblage& s, const sdp::SolverConfig& cfg) {
  require_valid(s, "lhs_membership");
  const int A = s.num_outcomes();
  const int X = s.num_inputs();
  const int d = s.dim();
  const long long num_lam = strategy_count(A, X);
  const double n_per_cell = static_cast<double>(pow_ll(A, X - 1));
  const Matrix eye = Matrix::Identity(d, d);

  LhsMembershipResult out;

  // Hidden-state program with a single shifted block per strategy.
  {
    sdp::SdpProblem p;
    std::vector<int> z(num_lam);
    for (long long lam = 0; lam < num_lam; ++lam)
      z[lam] = p.add_block(tag("Z", lam), d, sdp::BlockField::ComplexHermitian);
    const int mu = p.add_free_scalar("mu");
    sdp::LinearExpr obj;
    obj.add_scalar(mu, 1.0);
    p.set_objective(sdp::Sense::Minimize, obj);

    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        std::vector<std::pair<int, double>> coeffs;
        for (long long lam = 0; lam < num_lam; ++lam)
          if (DeterministicStrategy{A, X, lam}.matches(a, x)) coeffs.emplace_back(z[lam], 1.0);
        p.add_matrix_equality(coeffs, {{mu, Matrix(-n_per_cell * eye)}},
                              s.block(a, x).matrix());
      }

    sdp::SdpSolution sol = sdp::solve(p, cfg);
    out.primal_status = sol.status;
    out.primal_iterations = sol.iterations;
    if (sol.inconsistent_rows) {
      // Every outcome-independent decomposition reproduces one common
      // marginal for all inputs, so a signalling assemblage contradicts the
      // equality rows at any shift: no finite mu exists.
      out.mu_star = std::numeric_limits<double>::infinity();
    } else {
      out.mu_star = sol.free_scalar_values[0];
      out.hidden_blocks.reserve(num_lam);
      out.lambda_weights.resize(num_lam);
      for (long long lam = 0; lam < num_lam; ++lam) {
        out.hidden_blocks.emplace_back(Matrix(sol.primal_blocks[z[lam]] - out.mu_star * eye));
        out.lambda_weights[lam] = out.hidden_blocks.back().trace();
      }
    }
  }

  // Witness program: per-strategy slack -sum_{a,x} D_lambda(a|x) W_{a|x} >= 0
  // with normalization sum Tr[W] = -1/|A|^{|X|-1}.
  {
    sdp::SdpProblem p;
    std::vector<int> wp(A * X), wm(A * X), slack(num_lam);
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        wp[a + A * x] = p.add_block(tag2("W+", a, x), d, sdp::BlockField::ComplexHermitian);
        wm[a + A * x] = p.add_block(tag2("W-", a, x), d, sdp::BlockField::ComplexHermitian);
      }
    for (long long lam = 0; lam < num_lam; ++lam)
      slack[lam] = p.add_block(tag("T", lam), d, sdp::BlockField::ComplexHermitian);

    sdp::LinearExpr obj;
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        obj.add_block(wp[a + A * x], s.block(a, x).matrix());
        obj.add_block(wm[a + A * x], Matrix(-s.block(a, x).matrix()));
      }
    p.set_objective(sdp::Sense::Maximize, obj);

    for (long long lam = 0; lam < num_lam; ++lam) {
      std::vector<std::pair<int, double>> coeffs;
      for (int x = 0; x < X; ++x)
        for (int a = 0; a < A; ++a)
          if (DeterministicStrategy{A, X, lam}.matches(a, x)) {
            coeffs.emplace_back(wp[a + A * x], 1.0);
            coeffs.emplace_back(wm[a + A * x], -1.0);
          }
      coeffs.emplace_back(slack[lam], 1.0);
      p.add_matrix_equality(coeffs, {}, Matrix::Zero(d, d));
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
  }

  out.gap = std::abs(out.mu_star - out.mu_dual);
  out.lhs_feasible = out.mu_star <= kMembershipTol;
  return out;
}

SteeringRobustnessResult steering_robustness(const Assemblage& s, const sdp::SolverConfig& cfg) {
  require_valid(s, "steering_robustness");
  const int A = s.num_outcomes();
  const int X = s.num_inputs();
  const int d = s.dim();
  const long long num_lam = strategy_count(A, X);
  const Matrix eye = Matrix::Identity(d, d);

  SteeringRobustnessResult out;

  // Mixing program with outcome-independent hidden blocks for both families.
  {
    sdp::SdpProblem p;
    std::vector<int> chit(num_lam), chi(num_lam);
    for (long long lam = 0; lam < num_lam; ++lam) {
      chit[lam] = p.add_block(tag("F", lam), d, sdp::BlockField::ComplexHermitian);
      chi[lam] = p.add_block(tag("G", lam), d, sdp::BlockField::ComplexHermitian);
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
            coeffs.emplace_back(chit[lam], 1.0);
            coeffs.emplace_back(chi[lam], -1.0);
          }
        p.add_matrix_equality(coeffs, {}, s.block(a, x).matrix());
      }
    {
      sdp::LinearExpr e;
      for (long long lam = 0; lam < num_lam; ++lam) e.add_block(chit[lam], eye);
      e.add_scalar(t, -1.0);
      p.add_constraint(std::move(e), 1.0);
    }

    sdp::SdpSolution sol = sdp::solve(p, cfg);
    out.primal_status = sol.status;
    out.primal_iterations = sol.iterations;
    if (sol.inconsistent_rows) {
      // Mixtures of outcome-independent models stay nonsignalling, so no
      // finite mixing weight reaches a signalling assemblage.
      out.t_star = std::numeric_limits<double>::infinity();
    } else {
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
              noise_sum += sol.primal_blocks[chi[lam]];
              target_sum += sol.primal_blocks[chit[lam]];
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
  }

  // Witness program: 0 <= sum_{a,x} D_lambda(a|x) V_{a|x} <= I per strategy.
  {
    sdp::SdpProblem p;
    std::vector<int> vp(A * X), vm(A * X), up(num_lam), lo(num_lam);
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        vp[a + A * x] = p.add_block(tag2("V+", a, x), d, sdp::BlockField::ComplexHermitian);
        vm[a + A * x] = p.add_block(tag2("V-", a, x), d, sdp::BlockField::ComplexHermitian);
      }
    for (long long lam = 0; lam < num_lam; ++lam) {
      up[lam] = p.add_block(tag("TU", lam), d, sdp::BlockField::ComplexHermitian);
      lo[lam] = p.add_block(tag("TL", lam), d, sdp::BlockField::ComplexHermitian);
    }

    sdp::LinearExpr obj;
    for (int x = 0; x < X; ++x)
      for (int a = 0; a < A; ++a) {
        obj.add_block(vp[a + A * x], s.block(a, x).matrix());
        obj.add_block(vm[a + A * x], Matrix(-s.block(a, x).matrix()));
      }
    p.set_objective(sdp::Sense::Maximize, obj);

    for (long long lam = 0; lam < num_lam; ++lam) {
      std::vector<std::pair<int, double>> upper;
      std::vector<std::pair<int, double>> lower;
      for (int x = 0; x < X; ++x)
        for (int a = 0; a < A; ++a)
          if (DeterministicStrategy{A, X, lam}.matches(a, x)) {
            upper.emplace_back(vp[a + A * x], 1.0);
            upper.emplace_back(vm[a + A * x], -1.0);
            lower.emplace_back(vp[a + A * x], 1.0);
            lower.emplace_back(vm[a + A * x], -1.0);
          }
      upper.emplace_back(up[lam], 1.0);
      lower.emplace_back(lo[lam], -1.0);
      p.add_matrix_equality(upper, {}, eye);
      p.add_matrix_equality(lower, {}, Matrix::Zero(d, d));
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
  }

  out.gap = std::abs(std::max(0.0, out.t_dual) - out.t_star);
  return out;
}

SteeringResult analyze_steering(const Assemblage& s, const sdp::SolverConfig& cfg) {
  LhsMembershipResult m = lhs_membership(s, cfg);
  SteeringRobustnessResult r = steering_robustness(s, cfg);
  SteeringResult out;
  out.lhs_feasible = m.lhs_feasible;
  out.mu_star = m.mu_star;
  out.robustness = r.t_star;
  out.witness = r.witness;
  out.gap = std::max(m.gap, r.gap);
  return out;
}

}  // namespace qinst
