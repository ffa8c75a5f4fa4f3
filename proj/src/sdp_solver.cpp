#include <unistd.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qinst/json_io.hpp"
#include "qinst/sdp.hpp"

namespace qinst::sdp {

namespace {

struct RowTerm {
  int row;
  RealMatrix coeff;
};

struct LoweredRow {
  std::map<int, RealMatrix> coeffs;
  double rhs = 0.0;
};

// Real symmetric standard form produced from an SdpProblem: every complex
// Hermitian block becomes its 2d x 2d symmetric image, every free scalar a
// difference of two 1x1 blocks.
struct Lowered {
  std::vector<int> dims;
  bool maximize = false;
  std::vector<RealMatrix> C;
  std::vector<LoweredRow> all_rows;
  std::vector<int> kept;
  std::vector<int> dropped;
  bool inconsistent = false;
  RealVector b;                            // rhs of kept rows
  std::vector<std::vector<RowTerm>> terms; // kept rows grouped per block
  std::vector<std::string> warnings;
  int num_user_blocks = 0;
};

RealMatrix sym(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

double block_inner(const RealMatrix& a, const RealMatrix& b) {
  return (a.array() * b.array()).sum();
}

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

long double ld_inner(const LongMatrix& a, const LongMatrix& b) {
  return (a.array() * b.array()).sum();
}

LongMatrix ld_sym(const LongMatrix& m) { return 0.5L * (m + m.transpose()); }

Lowered lower(const SdpProblem& p) {
  Lowered low;
  low.maximize = p.sense() == Sense::Maximize;
  low.num_user_blocks = p.num_blocks();

  for (int b = 0; b < p.num_blocks(); ++b) {
    const BlockInfo& info = p.block(b);
    low.dims.push_back(info.field == BlockField::ComplexHermitian ? 2 * info.dim : info.dim);
  }
  for (int k = 0; k < p.num_free_scalars(); ++k) {
    low.dims.push_back(1);
    low.dims.push_back(1);
  }

  auto lower_expr = [&](const LinearExpr& e) {
    std::map<int, RealMatrix> out;
    for (const auto& [b, coeff] : e.block_terms) {
      const BlockInfo& info = p.block(b);
      RealMatrix lowered_coeff;
      if (info.field == BlockField::ComplexHermitian)
        lowered_coeff = 0.5 * embed_complex(info.dim).embed(coeff);
      else
        lowered_coeff = coeff.real();
      auto it = out.find(b);
      if (it == out.end())
        out.emplace(b, lowered_coeff);
      else
        it->second += lowered_coeff;
    }
    for (const auto& [k, c] : e.scalar_terms) {
      const int plus = p.num_blocks() + 2 * k;
      RealMatrix one(1, 1);
      one(0, 0) = c;
      auto itp = out.find(plus);
      if (itp == out.end())
        out.emplace(plus, one);
      else
        itp->second += one;
      one(0, 0) = -c;
      auto itm = out.find(plus + 1);
      if (itm == out.end())
        out.emplace(plus + 1, one);
      else
        itm->second += one;
    }
    return out;
  };

  low.C.resize(low.dims.size());
  for (std::size_t b = 0; b < low.dims.size(); ++b)
    low.C[b] = RealMatrix::Zero(low.dims[b], low.dims[b]);
  for (auto& [b, coeff] : lower_expr(p.objective())) low.C[b] = coeff;
  if (low.maximize)
    for (auto& c : low.C) c = -c;

  for (int i = 0; i < p.num_constraints(); ++i) {
    LoweredRow row;
    row.coeffs = lower_expr(p.constraint(i).lhs);
    row.rhs = p.constraint(i).rhs;
    low.all_rows.push_back(std::move(row));
  }

  // Keep a maximal linearly independent subset of the rows.
  const int m0 = static_cast<int>(low.all_rows.size());
  if (m0 > 0) {
    int svec_len = 0;
    std::vector<int> offsets(low.dims.size());
    for (std::size_t b = 0; b < low.dims.size(); ++b) {
      offsets[b] = svec_len;
      svec_len += low.dims[b] * (low.dims[b] + 1) / 2;
    }
    RealMatrix at = RealMatrix::Zero(svec_len, m0);
    const double rt2 = std::sqrt(2.0);
    for (int i = 0; i < m0; ++i)
      for (const auto& [b, coeff] : low.all_rows[i].coeffs) {
        int pos = offsets[b];
        for (int r = 0; r < low.dims[b]; ++r)
          for (int c = r; c < low.dims[b]; ++c, ++pos)
            at(pos, i) = (r == c) ? coeff(r, c) : rt2 * coeff(r, c);
      }
    Eigen::ColPivHouseholderQR<RealMatrix> qr(at);
    const int rank = static_cast<int>(qr.rank());
    std::vector<int> kept(qr.colsPermutation().indices().data(),
                          qr.colsPermutation().indices().data() + m0);
    kept.resize(rank);
    std::sort(kept.begin(), kept.end());
    low.kept = kept;
    std::vector<bool> is_kept(m0, false);
    for (int i : kept) is_kept[i] = true;
    for (int i = 0; i < m0; ++i)
      if (!is_kept[i]) low.dropped.push_back(i);
    if (!low.dropped.empty()) {
      std::ostringstream msg;
      msg << "dropped " << low.dropped.size()
          << " linearly dependent constraint row(s):";
      for (int i : low.dropped) msg << " " << i;
      low.warnings.push_back(msg.str());

      // A dropped row is harmless only when its right-hand side equals the
      // same combination of the kept rows; otherwise the equalities
      // contradict each other and no feasible point exists.
      std::vector<int> bad;
      if (rank > 0) {
        RealMatrix ak(svec_len, rank);
        RealVector bk(rank);
        for (int i = 0; i < rank; ++i) {
          ak.col(i) = at.col(low.kept[i]);
          bk(i) = low.all_rows[low.kept[i]].rhs;
        }
        Eigen::ColPivHouseholderQR<RealMatrix> qrk(ak);
        const double bmax = bk.cwiseAbs().maxCoeff();
        for (int j : low.dropped) {
          const RealVector c = qrk.solve(at.col(j));
          const double rhs_j = low.all_rows[j].rhs;
          const double tol = 1e-8 * (1.0 + std::abs(rhs_j) + c.cwiseAbs().sum() * bmax);
          if (std::abs(rhs_j - c.dot(bk)) > tol) bad.push_back(j);
        }
      } else {
        for (int j : low.dropped)
          if (std::abs(low.all_rows[j].rhs) > 1e-8) bad.push_back(j);
      }
      if (!bad.empty()) {
        low.inconsistent = true;
        std::ostringstream bm;
        bm << "dropped row(s) conflict with the retained system:";
        for (int j : bad) bm << " " << j;
        bm << "; the equality constraints admit no solution";
        low.warnings.push_back(bm.str());
      }
    }
  }

  const int m = static_cast<int>(low.kept.size());
  low.b.resize(m);
  low.terms.assign(low.dims.size(), {});
  for (int i = 0; i < m; ++i) {
    const LoweredRow& row = low.all_rows[low.kept[i]];
    low.b(i) = row.rhs;
    for (const auto& [b, coeff] : row.coeffs) low.terms[b].push_back(RowTerm{i, coeff});
  }
  return low;
}

struct Iterate {
  std::vector<RealMatrix> X, S;
  RealVector y;
};

// Largest step alpha with P + alpha * D still PSD, given the Cholesky factor
// of P.
double max_step(const Eigen::LLT<RealMatrix>& llt, const RealMatrix& d) {
  RealMatrix w = llt.matrixL().solve(d);
  RealMatrix t = llt.matrixL().solve(w.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym(t), Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min >= -1e-14) return 1e30;
  return 1.0 / (-lam_min);
}

struct IpmOutcome {
  SolveStatus status = SolveStatus::NumericalFailure;
  Iterate it;
  double pobj = 0, dobj = 0, relgap = 0, pres = 0, dres = 0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

IpmOutcome run_ipm(const Lowered& low, const SolverConfig& cfg) {
  const int nb = static_cast<int>(low.dims.size());
  const int m = static_cast<int>(low.kept.size());
  int n_total = 0;
  for (int d : low.dims) n_total += d;
  const bool trace = std::getenv("QINST_SDP_TRACE") != nullptr;

  IpmOutcome out;
  Iterate cur;
  cur.X.resize(nb);
  cur.S.resize(nb);
  for (int b = 0; b < nb; ++b) {
    cur.X[b] = cfg.initial_scaling * RealMatrix::Identity(low.dims[b], low.dims[b]);
    cur.S[b] = cfg.initial_scaling * RealMatrix::Identity(low.dims[b], low.dims[b]);
  }
  cur.y = RealVector::Zero(m);

  auto op_a = [&](const std::vector<RealMatrix>& x) {
    RealVector v = RealVector::Zero(m);
    for (int b = 0; b < nb; ++b)
      for (const auto& t : low.terms[b]) v(t.row) += block_inner(t.coeff, x[b]);
    return v;
  };
  auto op_at_block = [&](const RealVector& y, int b) {
    RealMatrix s = RealMatrix::Zero(low.dims[b], low.dims[b]);
    for (const auto& t : low.terms[b]) s += y(t.row) * t.coeff;
    return s;
  };

  // The direction computation multiplies by S^-1 twice, so its intermediates
  // grow like 1/mu while the assembled direction stays O(1); carrying that
  // pipeline in extended precision keeps the cancellation error out of the
  // residuals of the updated iterate.
  std::vector<std::vector<std::pair<int, LongMatrix>>> terms_ld(nb);
  for (int b = 0; b < nb; ++b)
    for (const auto& t : low.terms[b])
      terms_ld[b].emplace_back(t.row, t.coeff.cast<long double>());
  const LongVector b_ld = low.b.cast<long double>();
  auto op_at_block_ld = [&](const LongVector& y, int b) {
    LongMatrix s = LongMatrix::Zero(low.dims[b], low.dims[b]);
    for (const auto& [row, coeff] : terms_ld[b]) s += y(row) * coeff;
    return s;
  };

  // Near the optimum, finite-precision direction assembly lets A(X) = b
  // drift at the 1e-8 scale. Projecting X back onto the affine constraints
  // through the Gram matrix of the constraint map (factored once, does not
  // degrade as mu shrinks) repairs the drift; the projected point is only
  // accepted after its residuals are re-verified from scratch.
  RealMatrix gram;
  Eigen::LLT<RealMatrix> llt_gram;
  bool gram_ok = false;
  if (m > 0) {
    gram = RealMatrix::Zero(m, m);
    for (int b = 0; b < nb; ++b)
      for (const auto& ti : low.terms[b])
        for (const auto& tj : low.terms[b])
          gram(ti.row, tj.row) += block_inner(ti.coeff, tj.coeff);
    llt_gram.compute(gram);
    gram_ok = llt_gram.info() == Eigen::Success;
  }
  auto try_projected_exit = [&](const Iterate& cand, int at_iter) {
    if (!gram_ok) return false;
    const RealVector r = low.b - op_a(cand.X);
    if (!(r.cwiseAbs().maxCoeff() <= 1e-4)) return false;
    RealVector w = llt_gram.solve(r);
    w += llt_gram.solve(r - gram * w);
    Iterate fixed = cand;
    for (int b = 0; b < nb; ++b) fixed.X[b] += op_at_block(w, b);
    const double pres_f = (low.b - op_a(fixed.X)).cwiseAbs().maxCoeff();
    double pobj_f = 0, dres_f = 0;
    for (int b = 0; b < nb; ++b) {
      pobj_f += block_inner(low.C[b], fixed.X[b]);
      const RealMatrix rd_f = low.C[b] - fixed.S[b] - op_at_block(fixed.y, b);
      dres_f = std::max(dres_f, rd_f.cwiseAbs().maxCoeff());
    }
    const double dobj_f = (m > 0) ? low.b.dot(fixed.y) : 0.0;
    const double relgap_f =
        std::abs(pobj_f - dobj_f) / (1.0 + std::abs(pobj_f) + std::abs(dobj_f));
    if (std::getenv("QINST_SDP_TRACE") != nullptr)
      std::fprintf(stderr, "  proj attempt at it=%d: pres_f=%.3e dres_f=%.3e relgap_f=%.3e\n",
                   at_iter, pres_f, dres_f, relgap_f);
    if (pres_f > cfg.feas_tol || dres_f > cfg.feas_tol || relgap_f > cfg.gap_tol) return false;
    out.status = SolveStatus::Optimal;
    out.it = fixed;
    out.pobj = pobj_f;
    out.dobj = dobj_f;
    out.relgap = relgap_f;
    out.pres = pres_f;
    out.dres = dres_f;
    out.iterations = at_iter;
    return true;
  };

  Iterate best = cur;
  double best_score = std::numeric_limits<double>::infinity();
  double best_pobj = 0, best_dobj = 0, best_relgap = 0, best_pres = 0, best_dres = 0;
  int best_iter = 0;
  int stall_count = 0;
  double prev_pres = std::numeric_limits<double>::infinity();

  std::vector<Eigen::LLT<RealMatrix>> llt_x(nb), llt_s(nb);
  std::vector<RealMatrix> sinv(nb), rd(nb);

  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    RealVector rp = low.b - op_a(cur.X);
    double pobj = 0;
    for (int b = 0; b < nb; ++b) pobj += block_inner(low.C[b], cur.X[b]);
    const double dobj = (m > 0) ? low.b.dot(cur.y) : 0.0;
    double dres = 0;
    for (int b = 0; b < nb; ++b) {
      rd[b] = low.C[b] - cur.S[b] - op_at_block(cur.y, b);
      dres = std::max(dres, rd[b].cwiseAbs().maxCoeff());
    }
    const double pres = (m > 0) ? rp.cwiseAbs().maxCoeff() : 0.0;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (trace)
      std::fprintf(stderr, "ipm it=%3d pobj=% .12e dobj=% .12e relgap=%.3e pres=%.3e dres=%.3e\n",
                   iter, pobj, dobj, relgap, pres, dres);

    if (!std::isfinite(pres) || !std::isfinite(dres) || !std::isfinite(relgap)) {
      out.warnings.push_back("iterate diverged");
      break;
    }

    const double score = std::max({relgap, pres, dres});
    if (score < best_score) {
      best_score = score;
      best = cur;
      best_pobj = pobj;
      best_dobj = dobj;
      best_relgap = relgap;
      best_pres = pres;
      best_dres = dres;
      best_iter = iter;
    }
    if (pres <= cfg.feas_tol && dres <= cfg.feas_tol && relgap <= cfg.gap_tol) {
      out.status = SolveStatus::Optimal;
      out.it = cur;
      out.pobj = pobj;
      out.dobj = dobj;
      out.relgap = relgap;
      out.pres = pres;
      out.dres = dres;
      out.iterations = iter;
      return out;
    }
    if (dres <= cfg.feas_tol && try_projected_exit(cur, iter)) return out;

    // A direction solved past the Schur system's conditioning limit injects
    // its residual straight into primal feasibility. A jump in pres to the
    // scale of the remaining gap marks that event: the objective is then
    // polluted beyond what further iterations can recover, so stop on the
    // best iterate seen. Smaller jumps are left to the projected exit.
    if (pres > 1e-9 && pres > 100.0 * std::max(prev_pres, 1e-11) && pres > 0.1 * relgap) {
      out.warnings.push_back("search directions lost accuracy");
      break;
    }
    prev_pres = pres;

    if (iter - best_iter >= 10) {
      out.warnings.push_back("no progress over ten iterations");
      break;
    }

    double mu = 0;
    for (int b = 0; b < nb; ++b) mu += block_inner(cur.X[b], cur.S[b]);
    mu /= n_total;
    if (!(mu > 0) || !std::isfinite(mu)) {
      out.warnings.push_back("complementarity product lost positivity");
      break;
    }

    bool fact_ok = true;
    for (int b = 0; b < nb; ++b) {
      llt_s[b].compute(cur.S[b]);
      llt_x[b].compute(cur.X[b]);
      if (llt_s[b].info() != Eigen::Success || llt_x[b].info() != Eigen::Success) {
        fact_ok = false;
        break;
      }
      sinv[b] = llt_s[b].solve(RealMatrix::Identity(low.dims[b], low.dims[b]));
    }
    if (!fact_ok) {
      out.warnings.push_back("iterate lost positive definiteness");
      break;
    }

    std::vector<LongMatrix> x_ld(nb), s_ld(nb), sinv_ld(nb), rd_ld(nb);
    for (int b = 0; b < nb; ++b) {
      x_ld[b] = cur.X[b].cast<long double>();
      s_ld[b] = cur.S[b].cast<long double>();
      sinv_ld[b] = sinv[b].cast<long double>();
      rd_ld[b] = rd[b].cast<long double>();
    }

    // Schur complement M_ij = <A_i, sym(X A_j S^-1)> over all blocks.
    LongMatrix schur_l = LongMatrix::Zero(m, m);
    for (int b = 0; b < nb; ++b) {
      const auto& ts = terms_ld[b];
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const LongMatrix g = ld_sym(x_ld[b] * ts[j].second * sinv_ld[b]);
        for (std::size_t i = 0; i <= j; ++i) {
          const long double v = ld_inner(ts[i].second, g);
          schur_l(ts[i].first, ts[j].first) += v;
          if (ts[i].first != ts[j].first) schur_l(ts[j].first, ts[i].first) += v;
        }
      }
    }

    LongVector a_sinv = LongVector::Zero(m);
    for (int b = 0; b < nb; ++b)
      for (const auto& [row, coeff] : terms_ld[b]) a_sinv(row) += ld_inner(coeff, sinv_ld[b]);

    Eigen::LLT<LongMatrix> llt_m(schur_l);
    if (llt_m.info() != Eigen::Success) {
      bool fixed = false;
      long double ridge = 1e-12L * std::max<long double>(1.0L, schur_l.diagonal().maxCoeff());
      for (int attempt = 0; attempt < 2 && !fixed; ++attempt, ridge *= 1e3L) {
        llt_m.compute(LongMatrix(schur_l + ridge * LongMatrix::Identity(m, m)));
        fixed = llt_m.info() == Eigen::Success;
      }
      if (fixed)
        out.warnings.push_back("schur complement needed a diagonal ridge");
      else {
        out.warnings.push_back("schur complement factorization failed");
        break;
      }
    }

    long double dir_residual = 0.0L;
    auto schur_solve = [&](const LongVector& r) {
      LongVector v = llt_m.solve(r);
      for (int pass = 0; pass < 2; ++pass) v += llt_m.solve(LongVector(r - schur_l * v));
      if (trace)
        dir_residual = std::max(dir_residual, LongVector(r - schur_l * v).cwiseAbs().maxCoeff());
      return v;
    };

    auto newton = [&](long double tau, const std::vector<LongMatrix>* corr,
                      std::vector<LongMatrix>& dx, std::vector<LongMatrix>& ds,
                      LongVector& dy) {
      LongVector rhs = b_ld - tau * a_sinv;
      for (int b = 0; b < nb; ++b) {
        LongMatrix u = x_ld[b] * rd_ld[b];
        if (corr) u += (*corr)[b];
        const LongMatrix g = ld_sym(u * sinv_ld[b]);
        for (const auto& [row, coeff] : terms_ld[b]) rhs(row) += ld_inner(coeff, g);
      }
      dy = schur_solve(rhs);
      dx.resize(nb);
      ds.resize(nb);
      for (int b = 0; b < nb; ++b) {
        ds[b] = rd_ld[b] - op_at_block_ld(dy, b);
        LongMatrix u = x_ld[b] * ds[b];
        if (corr) u += (*corr)[b];
        dx[b] = tau * sinv_ld[b] - x_ld[b] - ld_sym(u * sinv_ld[b]);
      }
    };

    std::vector<LongMatrix> dx_aff, ds_aff;
    LongVector dy_aff;
    newton(0.0L, nullptr, dx_aff, ds_aff, dy_aff);

    double ap_aff = 1.0, ad_aff = 1.0;
    for (int b = 0; b < nb; ++b) {
      ap_aff = std::min(ap_aff, max_step(llt_x[b], RealMatrix(dx_aff[b].cast<double>())));
      ad_aff = std::min(ad_aff, max_step(llt_s[b], RealMatrix(ds_aff[b].cast<double>())));
    }
    long double mu_aff = 0;
    for (int b = 0; b < nb; ++b)
      mu_aff += ld_inner(x_ld[b] + static_cast<long double>(ap_aff) * dx_aff[b],
                         s_ld[b] + static_cast<long double>(ad_aff) * ds_aff[b]);
    mu_aff /= n_total;
    double sigma = std::pow(std::max(0.0, static_cast<double>(mu_aff)) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    std::vector<LongMatrix> corr(nb);
    for (int b = 0; b < nb; ++b) corr[b] = dx_aff[b] * ds_aff[b];

    std::vector<LongMatrix> dx_l, ds_l;
    LongVector dy_l;
    newton(static_cast<long double>(sigma) * static_cast<long double>(mu), &corr, dx_l, ds_l,
           dy_l);

    std::vector<RealMatrix> dx(nb), ds(nb);
    for (int b = 0; b < nb; ++b) {
      dx[b] = dx_l[b].cast<double>();
      ds[b] = ds_l[b].cast<double>();
    }
    RealVector dy = dy_l.cast<double>();

    const double gamma = 0.98;
    double ap = 1.0, ad = 1.0;
    for (int b = 0; b < nb; ++b) {
      ap = std::min(ap, gamma * max_step(llt_x[b], dx[b]));
      ad = std::min(ad, gamma * max_step(llt_s[b], ds[b]));
    }
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);

    if (trace)
      std::fprintf(stderr, "       mu=%.3e sigma=%.3f ap=%.3e ad=%.3e res=%.2e\n", mu, sigma,
                   ap, ad, static_cast<double>(dir_residual));

    if (std::max(ap, ad) < 1e-10) {
      if (++stall_count >= 2) {
        out.warnings.push_back("step size underflow");
        break;
      }
    } else {
      stall_count = 0;
    }

    for (int b = 0; b < nb; ++b) {
      cur.X[b] = sym(cur.X[b] + ap * dx[b]);
      cur.S[b] = sym(cur.S[b] + ad * ds[b]);
    }
    cur.y += ad * dy;

    // The two halves of a split free scalar enter every row and the objective
    // with opposite signs, so draining their common part leaves A(X) and
    // <C, X> invariant while removing the drift along the unbounded ray.
    // Draining all the way to zero would make the paired S entries blow up
    // like mu over the pair minimum, so pin the smaller coordinate near the
    // central-path level sqrt(mu) instead.
    const double pair_level = std::max(1e-8, std::sqrt(mu));
    for (int b = low.num_user_blocks; b + 1 < nb; b += 2) {
      const double shift = std::min(cur.X[b](0, 0), cur.X[b + 1](0, 0)) - pair_level;
      if (shift > 0) {
        cur.X[b](0, 0) -= shift;
        cur.X[b + 1](0, 0) -= shift;
      }
    }
  }

  if (best_dres <= cfg.feas_tol && try_projected_exit(best, iter)) return out;

  out.it = best;
  out.pobj = best_pobj;
  out.dobj = best_dobj;
  out.relgap = best_relgap;
  out.pres = best_pres;
  out.dres = best_dres;
  out.iterations = iter;
  if (out.status != SolveStatus::Optimal)
    out.status = (iter >= cfg.max_iterations) ? SolveStatus::MaxIterations
                                              : SolveStatus::NumericalFailure;
  return out;
}

}  // namespace

SdpSolution InteriorPointSolver::solve(const SdpProblem& p, const SolverConfig& cfg) {
  if (p.num_blocks() == 0) throw std::invalid_argument("solve: problem has no blocks");
  Lowered low = lower(p);

  if (low.inconsistent) {
    SdpSolution sol;
    sol.status = SolveStatus::NumericalFailure;
    sol.inconsistent_rows = true;
    sol.warnings = low.warnings;
    for (int b = 0; b < p.num_blocks(); ++b)
      sol.primal_blocks.push_back(Matrix::Zero(p.block(b).dim, p.block(b).dim));
    sol.free_scalar_values.assign(p.num_free_scalars(), 0.0);
    sol.dual_multipliers.assign(p.num_constraints(), 0.0);
    double max_res = 0.0;
    for (int i = 0; i < p.num_constraints(); ++i)
      max_res = std::max(max_res, std::abs(p.constraint(i).rhs));
    sol.max_constraint_residual = max_res;
    return sol;
  }

  IpmOutcome res = run_ipm(low, cfg);

  SdpSolution sol;
  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.warnings = low.warnings;
  sol.warnings.insert(sol.warnings.end(), res.warnings.begin(), res.warnings.end());

  const double sense_sign = low.maximize ? -1.0 : 1.0;
  sol.primal_objective = sense_sign * res.pobj;
  sol.dual_objective = sense_sign * res.dobj;
  sol.gap = res.relgap;

  sol.primal_blocks.reserve(p.num_blocks());
  double min_eig = std::numeric_limits<double>::infinity();
  for (int b = 0; b < p.num_blocks(); ++b) {
    const BlockInfo& info = p.block(b);
    Matrix val;
    if (info.field == BlockField::ComplexHermitian) {
      Matrix ext = embed_complex(info.dim).extract(res.it.X[b]);
      val = 0.5 * (ext + ext.adjoint());
    } else {
      val = sym(res.it.X[b]).cast<Complex>();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(val, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    sol.primal_blocks.push_back(std::move(val));
  }
  if (p.num_blocks() > 0) sol.min_block_eigenvalue = min_eig;

  sol.free_scalar_values.resize(p.num_free_scalars());
  for (int k = 0; k < p.num_free_scalars(); ++k) {
    const int plus = p.num_blocks() + 2 * k;
    sol.free_scalar_values[k] = res.it.X[plus](0, 0) - res.it.X[plus + 1](0, 0);
  }

  sol.dual_multipliers.assign(p.num_constraints(), 0.0);
  for (std::size_t i = 0; i < low.kept.size(); ++i)
    sol.dual_multipliers[low.kept[i]] = sense_sign * res.it.y(static_cast<int>(i));

  double max_res = 0.0;
  for (int i = 0; i < p.num_constraints(); ++i) {
    const Constraint& c = p.constraint(i);
    double v = -c.rhs;
    for (const auto& [b, coeff] : c.lhs.block_terms)
      v += (coeff * sol.primal_blocks[b]).trace().real();
    for (const auto& [k, cc] : c.lhs.scalar_terms) v += cc * sol.free_scalar_values[k];
    max_res = std::max(max_res, std::abs(v));
  }
  sol.max_constraint_residual = max_res;

  return sol;
}

SdpSolution solve(const SdpProblem& problem, const SolverConfig& config) {
  InteriorPointSolver s;
  return s.solve(problem, config);
}

nlohmann::json config_to_json(const SolverConfig& c) {
  return {{"gap_tol", c.gap_tol},
          {"feas_tol", c.feas_tol},
          {"max_iterations", c.max_iterations},
          {"initial_scaling", c.initial_scaling}};
}

SolverConfig config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  if (j.contains("gap_tol")) c.gap_tol = j.at("gap_tol").get<double>();
  if (j.contains("feas_tol")) c.feas_tol = j.at("feas_tol").get<double>();
  if (j.contains("max_iterations")) c.max_iterations = j.at("max_iterations").get<int>();
  if (j.contains("initial_scaling")) c.initial_scaling = j.at("initial_scaling").get<double>();
  return c;
}

SdpSolution ExternalProcessSolver::solve(const SdpProblem& problem, const SolverConfig& config) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  const unsigned ticket = counter++;
  const fs::path dir = fs::temp_directory_path();
  const std::string tag =
      "qinst_sdp_" + std::to_string(::getpid()) + "_" + std::to_string(ticket);
  const fs::path in = dir / (tag + "_in.json");
  const fs::path out = dir / (tag + "_out.json");

  nlohmann::json request = {{"problem", problem.to_json()}, {"config", config_to_json(config)}};
  save_json_file(in.string(), request);

  const std::string cmd = command_ + " '" + in.string() + "' '" + out.string() + "'";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    fs::remove(in);
    throw std::runtime_error("external solver failed with exit code " + std::to_string(rc));
  }
  nlohmann::json response = load_json_file(out.string());
  fs::remove(in);
  fs::remove(out);
  return SdpSolution::from_json(response);
}

}  // namespace qinst::sdp
