#include "lsos/sdp/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

namespace lsos::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using sos::LinearForm;
using sos::LiftedSdp;
using sos::SymbolicBlock;
using SpMat = Eigen::SparseMatrix<double>;

std::string to_string(Status s) {
  switch (s) {
    case Status::feasible: return "feasible";
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::unknown: return "unknown";
  }
  return "unknown";
}

namespace {

const double kSqrt2 = std::sqrt(2.0);

// min c'x  s.t.  Ax + s = b,  s in K = {0}^z x R+^l x PSD(n_1) x ... (svec)
struct Conic {
  SpMat A;
  VectorXd b, c;
  int zero = 0, nonneg = 0;
  std::vector<int> psd;          // block sizes
  std::vector<int> psd_offset;   // first row of each psd block
  double c_constant = 0;

  // where the rows of each sdp block / scalar live
  std::vector<int> block_row;  // first row of sdp.blocks[i]
  std::vector<int> scalar_row;
};

Conic assemble(const LiftedSdp& sdp, const LinearForm& objective) {
  Conic P;
  const int n = static_cast<int>(sdp.variables.size());
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> b;
  P.block_row.assign(sdp.blocks.size(), -1);

  auto emit = [&](const LinearForm& f, double w) {
    const int r = static_cast<int>(b.size());
    for (const auto& [v, coef] : f.coeffs) trip.emplace_back(r, v, -w * coef);
    b.push_back(w * f.constant);
  };

  for (std::size_t i = 0; i < sdp.blocks.size(); ++i) {
    const auto& blk = sdp.blocks[i];
    if (blk.kind != SymbolicBlock::Kind::zero) continue;
    P.block_row[i] = static_cast<int>(b.size());
    for (const auto& e : blk.entries) emit(e, 1.0);
  }
  P.zero = static_cast<int>(b.size());
  for (const auto& s : sdp.scalars) {
    P.scalar_row.push_back(static_cast<int>(b.size()));
    emit(s.form, 1.0);
  }
  P.nonneg = static_cast<int>(b.size()) - P.zero;
  for (std::size_t i = 0; i < sdp.blocks.size(); ++i) {
    const auto& blk = sdp.blocks[i];
    if (blk.kind != SymbolicBlock::Kind::psd) continue;
    P.block_row[i] = static_cast<int>(b.size());
    P.psd.push_back(blk.size());
    P.psd_offset.push_back(static_cast<int>(b.size()));
    const int s = blk.size();
    for (int r = 0; r < s; ++r)
      for (int c = r; c < s; ++c) emit(blk.at(r, c), r == c ? 1.0 : kSqrt2);
  }

  const int m = static_cast<int>(b.size());
  P.A.resize(m, n);
  P.A.setFromTriplets(trip.begin(), trip.end());
  P.A.makeCompressed();
  P.b = Eigen::Map<VectorXd>(b.data(), m);
  P.c = VectorXd::Zero(n);
  for (const auto& [v, coef] : objective.coeffs) P.c(v) += coef;
  P.c_constant = objective.constant;
  return P;
}

void project_psd_svec(double* s, int n, MatrixXd& work) {
  if (n == 1) {
    s[0] = std::max(0.0, s[0]);
    return;
  }
  work.resize(n, n);
  int k = 0;
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c, ++k) {
      double v = r == c ? s[k] : s[k] / kSqrt2;
      work(r, c) = v;
      work(c, r) = v;
    }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(work);
  const VectorXd& lam = es.eigenvalues();
  if (lam(0) >= 0) return;
  VectorXd clipped = lam.unaryExpr([](double l) { return l > 1e-12 ? l : 0.0; });
  MatrixXd X = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  k = 0;
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c, ++k) s[k] = r == c ? X(r, c) : X(r, c) * kSqrt2;
}

// Projection onto K* for the y part: zero-cone rows are free.
void project_dual_cone(VectorXd& y, const Conic& P, MatrixXd& work) {
  for (int i = P.zero; i < P.zero + P.nonneg; ++i) y(i) = std::max(0.0, y(i));
  for (std::size_t k = 0; k < P.psd.size(); ++k) project_psd_svec(y.data() + P.psd_offset[k], P.psd[k], work);
}

// Typical magnitude of each relation, read off bounds C - a t^2 >= 0.
std::map<std::string, double> relation_magnitudes(const LiftedSdp& sdp) {
  std::map<std::string, double> mag;
  auto scan = [&](const kb::Polynomial& p) {
    if (p.terms().size() != 2) return;
    const double C = p.constant_term();
    for (const auto& [mono, coef] : p.terms()) {
      if (mono.is_constant() || mono.factors().size() != 1 || mono.factors()[0].second != 2) continue;
      if (C <= 0 || coef >= 0) continue;
      const double v = std::sqrt(C / -coef);
      auto [it, fresh] = mag.emplace(mono.factors()[0].first.relation, v);
      if (!fresh) it->second = std::min(it->second, v);
    }
  };
  for (const auto& blk : sdp.blocks) scan(blk.multiplier);
  for (const auto& row : sdp.scalars) scan(row.poly);
  for (auto& [rel, v] : mag) v = std::max(v, 1.0);
  return mag;
}

double monomial_magnitude(const kb::Monomial& m, const std::map<std::string, double>& mag) {
  double v = 1;
  for (const auto& [t, k] : m.factors())
    if (auto it = mag.find(t.relation); it != mag.end()) v *= std::pow(it->second, k);
  return v;
}

double polynomial_magnitude(const kb::Polynomial& p, const std::map<std::string, double>& mag) {
  double v = 0;
  for (const auto& [mono, coef] : p.terms()) v = std::max(v, std::abs(coef) * monomial_magnitude(mono, mag));
  return v > 0 ? v : 1.0;
}

// Prescaling that brings moments of bounded relations to order one: column
// v by the magnitude of its monomial, block entry (r, c) by h_r h_c.
void magnitude_scaling(const LiftedSdp& sdp, const Conic& P, VectorXd& D0, VectorXd& E0) {
  const auto mag = relation_magnitudes(sdp);
  E0 = VectorXd::Ones(P.A.cols());
  D0 = VectorXd::Ones(P.A.rows());
  if (mag.empty()) return;
  for (std::size_t v = 0; v < sdp.variables.size(); ++v) E0(v) = monomial_magnitude(sdp.variables[v], mag);
  for (std::size_t i = 0; i < sdp.blocks.size(); ++i) {
    const auto& blk = sdp.blocks[i];
    const double mu = std::sqrt(polynomial_magnitude(blk.multiplier, mag));
    const int s = blk.size();
    VectorXd h(s);
    for (int r = 0; r < s; ++r) h(r) = 1.0 / (mu * monomial_magnitude(blk.rows[r], mag));
    for (int r = 0, k = P.block_row[i]; r < s; ++r)
      for (int c = r; c < s; ++c, ++k) D0(k) = h(r) * h(c);
  }
  for (std::size_t i = 0; i < sdp.scalars.size(); ++i)
    D0(P.scalar_row[i]) = 1.0 / polynomial_magnitude(sdp.scalars[i].poly, mag);
}

// Ruiz equilibration on top of a prescaling D0, E0; psd blocks are scaled by
// a diagonal congruence g_r g_c so the cone is preserved.
void equilibrate(const Conic& P, const VectorXd& D0, const VectorXd& E0, VectorXd& D, VectorXd& E) {
  const int m = static_cast<int>(P.A.rows());
  const int n = static_cast<int>(P.A.cols());
  const SpMat A0 = D0.asDiagonal() * P.A * E0.asDiagonal();
  VectorXd Dr = VectorXd::Ones(m), Er = VectorXd::Ones(n);
  std::vector<VectorXd> G;
  for (int s : P.psd) G.push_back(VectorXd::Ones(s));
  SpMat A = A0;
  for (int it = 0; it < 25; ++it) {
    VectorXd rn = VectorXd::Zero(m), cn = VectorXd::Zero(n);
    for (int j = 0; j < A.outerSize(); ++j)
      for (SpMat::InnerIterator e(A, j); e; ++e) {
        double a = std::abs(e.value());
        rn(e.row()) = std::max(rn(e.row()), a);
        cn(j) = std::max(cn(j), a);
      }
    auto inv_sqrt = [](double v) { return v > 0 ? 1.0 / std::sqrt(v) : 1.0; };
    for (int i = 0; i < P.zero + P.nonneg; ++i) Dr(i) = std::clamp(Dr(i) * inv_sqrt(rn(i)), 1e-4, 1e4);
    for (std::size_t k = 0; k < P.psd.size(); ++k) {
      const int s = P.psd[k];
      VectorXd& g = G[k];
      for (int r = 0, i = P.psd_offset[k]; r < s; i += s - r, ++r)
        g(r) = std::clamp(g(r) * std::sqrt(inv_sqrt(rn(i))), 1e-2, 1e2);
      for (int r = 0, i = P.psd_offset[k]; r < s; ++r)
        for (int c = r; c < s; ++c, ++i) Dr(i) = g(r) * g(c);
    }
    for (int j = 0; j < n; ++j) Er(j) = std::clamp(Er(j) * inv_sqrt(cn(j)), 1e-4, 1e4);
    A = Dr.asDiagonal() * A0 * Er.asDiagonal();
    if ((rn.array() - 1).abs().maxCoeff() < 1e-2 && (cn.array() - 1).abs().maxCoeff() < 1e-2) break;
  }
  D = D0.cwiseProduct(Dr);
  E = E0.cwiseProduct(Er);
}

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

DualWitness witness_from_ray(const LiftedSdp& sdp, const Conic& P, const VectorXd& y) {
  DualWitness w;
  for (std::size_t i = 0; i < sdp.blocks.size(); ++i) {
    const auto& blk = sdp.blocks[i];
    const int s = blk.size();
    MatrixXd Y = MatrixXd::Zero(s, s);
    int k = P.block_row[i];
    const bool psd = blk.kind == SymbolicBlock::Kind::psd;
    for (int r = 0; r < s; ++r)
      for (int c = r; c < s; ++c, ++k) {
        if (r == c) Y(r, c) = y(k);
        else Y(r, c) = Y(c, r) = psd ? y(k) / kSqrt2 : y(k) / 2.0;
      }
    w.blocks.push_back(std::move(Y));
  }
  for (int r : P.scalar_row) w.scalars.push_back(y(r));
  auto agg = aggregate(sdp, w);
  w.constant = agg.constant;
  for (const auto& [v, c] : agg.coeffs) w.residual = std::max(w.residual, std::abs(c));
  return w;
}

// Douglas-Rachford splitting on the homogeneous self-dual embedding
//   find u in C, v in C*, v = Q u,  Q = [0 A' c; -A 0 b; -c' -b' 0]
// in the metric R = diag(rho_x, r_y, 1):
//   u~ = (R + Q)^{-1} R w,  u = proj_C(2u~ - w),  w += alpha (u - u~).
// r_y = 1/scale (1/(1000 scale) on zero-cone rows); scale adapts to balance
// primal and dual residuals, which needs a refactorization.
class Embedding {
 public:
  Embedding(const SpMat& A, const VectorXd& b, const VectorXd& c, int zero_rows, double rho_x)
      : A_(A), At_(A.transpose()), b_(b), c_(c), zero_(zero_rows), rho_x_(rho_x) {}

  bool set_scale(double scale) {
    scale_ = scale;
    const int m = static_cast<int>(A_.rows());
    ry_.resize(m);
    for (int i = 0; i < m; ++i) ry_(i) = i < zero_ ? 1.0 / (1000.0 * scale) : 1.0 / scale;
    SpMat K = At_ * ry_.cwiseInverse().asDiagonal() * A_;
    SpMat I(A_.cols(), A_.cols());
    I.setIdentity();
    K += rho_x_ * I;
    ldlt_.compute(K);
    if (ldlt_.info() != Eigen::Success) return false;
    solve_m(c_, b_, px_, py_);
    hp_ = c_.dot(px_) + b_.dot(py_);
    return true;
  }
  double scale() const { return scale_; }
  const VectorXd& ry() const { return ry_; }
  double rho_x() const { return rho_x_; }

  // (R + Q) u = rhs
  void solve(const VectorXd& rx, const VectorXd& ry, double rt, VectorXd& x, VectorXd& y, double& t) const {
    solve_m(rx, ry, x, y);
    t = (rt + c_.dot(x) + b_.dot(y)) / (1.0 + hp_);
    x -= t * px_;
    y -= t * py_;
  }

 private:
  // [rho_x I, A'; -A, diag(ry)] (x, y) = (a, b)
  void solve_m(const VectorXd& a, const VectorXd& bb, VectorXd& x, VectorXd& y) const {
    x = ldlt_.solve(a - At_ * bb.cwiseQuotient(ry_));
    y = (bb + A_ * x).cwiseQuotient(ry_);
  }

  const SpMat& A_;
  SpMat At_;
  const VectorXd& b_;
  const VectorXd& c_;
  int zero_;
  double rho_x_;
  double scale_ = 1;
  VectorXd ry_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  VectorXd px_, py_;
  double hp_ = 0;
};

SolveResult run(const LiftedSdp& sdp, const LinearForm& objective, bool feasibility, const SolverConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  Conic P = assemble(sdp, objective);
  const int m = static_cast<int>(P.A.rows());
  const int n = static_cast<int>(P.A.cols());

  VectorXd D0, E0, D, E;
  magnitude_scaling(sdp, P, D0, E0);
  equilibrate(P, D0, E0, D, E);
  SpMat A = D.asDiagonal() * P.A * E.asDiagonal();
  VectorXd b = D.cwiseProduct(P.b);
  VectorXd c = E.cwiseProduct(P.c);
  const double sb = 1.0 / std::max(1.0, inf_norm(b));
  const double sc = 1.0 / std::max(1.0, inf_norm(c));
  b *= sb;
  c *= sc;

  Embedding emb(A, b, c, P.zero, 1e-6);
  if (!emb.set_scale(0.1)) {
    res.reason = "factorization failed";
    return res;
  }

  auto finish = [&](Status st) {
    res.status = st;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  };

  // iterates: u = (ux, uy, ut) in C, v = (vx, vs, vk) = R (w - u)
  VectorXd ux = VectorXd::Zero(n), uy = VectorXd::Zero(m);
  double ut = 1;
  VectorXd vs = VectorXd::Zero(m);
  double vk = 0;
  {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-1e-6, 1e-6);
    for (int i = 0; i < n; ++i) ux(i) = jitter(rng);
  }
  VectorXd wx = ux, wy = uy;
  double wt = 1 + vk;

  MatrixXd work;
  VectorXd tx, ty;
  double tt = 0;
  const double a = cfg.alpha;
  int last_rescale = 0;
  double tol = cfg.eps;
  double rescale_gap = 100;  // grows so that the scale settles

  for (int it = 1; it <= cfg.max_iters; ++it) {
    // u~ = (R + Q)^{-1} R w
    emb.solve(emb.rho_x() * wx, emb.ry().cwiseProduct(wy), wt, tx, ty, tt);
    // u = proj_C(2u~ - w)
    VectorXd nx = 2 * tx - wx;
    VectorXd ny = 2 * ty - wy;
    double nt = std::max(0.0, 2 * tt - wt);
    VectorXd pre = ny;
    project_dual_cone(ny, P, work);
    // v = R (u - (2u~ - w)) lies in the dual of C
    vs = emb.ry().cwiseProduct(ny - pre);
    vk = nt - (2 * tt - wt);
    ux = std::move(nx);
    uy = std::move(ny);
    ut = nt;
    // w += alpha (u - u~)
    wx += a * (ux - tx);
    wy += a * (uy - ty);
    wt += a * (ut - tt);

    if (it % cfg.check_every != 0 && it != cfg.max_iters) continue;
    res.iterations = it;

    // infeasibility: y in K*, A'y = 0, b'y < 0 (checked on the original data)
    VectorXd yr = D.cwiseProduct(uy);
    double by = P.b.dot(yr);
    if (by < 0) {
      VectorXd aty = P.A.transpose() * yr;
      if (inf_norm(aty) <= cfg.eps_infeasible * std::abs(by)) {
        yr /= -by;
        res.witness = witness_from_ray(sdp, P, yr);
        res.reason = "dual improving ray";
        return finish(Status::infeasible);
      }
    }
    // unboundedness: Ax + s = 0, c'x < 0
    if (!feasibility) {
      VectorXd xr = E.cwiseProduct(ux);
      double cx = P.c.dot(xr);
      if (cx < 0) {
        VectorXd sr = vs.cwiseQuotient(D);
        if (inf_norm(P.A * xr + sr) <= cfg.eps_infeasible * std::abs(cx)) {
          res.reason = "primal improving ray";
          return finish(Status::unbounded);
        }
      }
    }

    if (ut <= 1e-12) continue;
    VectorXd xs = ux / ut, ys = uy / ut, ss = vs / ut;
    VectorXd Ax = A * xs, Aty = A.transpose() * ys;
    VectorXd pr = Ax + ss - b, dr = Aty + c;
    res.primal_residual = inf_norm(pr) / (1 + inf_norm(b));
    res.dual_residual = inf_norm(dr) / (1 + inf_norm(c));
    double cx = c.dot(xs), by2 = b.dot(ys);
    res.gap = std::abs(cx + by2) / (1 + std::abs(cx) + std::abs(by2));
    if (cfg.log)
      *cfg.log << "iter " << it << " pres " << res.primal_residual << " dres " << res.dual_residual << " gap "
               << res.gap << " tau " << ut << " kappa " << vk << " scale " << emb.scale() << "\n";
    if (res.primal_residual <= tol && res.dual_residual <= tol && res.gap <= tol) {
      VectorXd x = E.cwiseProduct(xs) / sb;
      res.x.assign(x.data(), x.data() + n);
      // Scaled residuals do not bound violations in the original units;
      // keep iterating on a tighter tolerance until the point checks out.
      if (tol > 1e-13 && check_assignment(sdp, res.x, cfg.eps).worst > cfg.eps) {
        tol /= 10;
        continue;
      }
      res.value = P.c.dot(x) + P.c_constant;
      res.reason = "converged";
      return finish(feasibility ? Status::feasible : Status::optimal);
    }

    // Rebalance primal and dual progress.
    if (it - last_rescale >= rescale_gap) {
      double rel_p = inf_norm(pr) / std::max({inf_norm(Ax), inf_norm(ss), inf_norm(b), 1e-2});
      double rel_d = inf_norm(dr) / std::max({inf_norm(Aty), inf_norm(c), 1e-2});
      double ratio = std::sqrt(rel_p / std::max(rel_d, 1e-18));
      if (std::isfinite(ratio) && (ratio > 3 || ratio < 1.0 / 3)) {
        double scale = std::clamp(emb.scale() * ratio, 1e-6, 1e6);
        if (emb.set_scale(scale)) {
          wy = uy + vs.cwiseQuotient(emb.ry());
          wt = ut + vk;
          last_rescale = it;
          rescale_gap *= 1.5;
        }
      }
    }
  }
  if (ut > 1e-12) {
    VectorXd x = E.cwiseProduct(ux / ut) / sb;
    res.x.assign(x.data(), x.data() + n);
    res.value = P.c.dot(x) + P.c_constant;
  }
  res.reason = "iteration limit reached (" + std::to_string(cfg.max_iters) + ")";
  return finish(Status::unknown);
}

}  // namespace

SolveResult solve_feasibility(const LiftedSdp& sdp, const SolverConfig& cfg) { return run(sdp, {}, true, cfg); }

SolveResult optimize(const LiftedSdp& sdp, const LinearForm& objective, Direction dir, const SolverConfig& cfg) {
  if (cfg.eps <= 0) throw std::invalid_argument("solver tolerance must be positive");
  for (const auto& [v, c] : objective.coeffs)
    if (v < 0 || v >= static_cast<int>(sdp.variables.size()))
      throw std::invalid_argument("objective refers to an unknown moment variable");
  LinearForm f = objective;
  if (dir == Direction::maximize) {
    f.constant = -f.constant;
    for (auto& [v, c] : f.coeffs) c = -c;
  }
  SolveResult r = run(sdp, f, false, cfg);
  if (dir == Direction::maximize) r.value = -r.value;
  return r;
}

ViolationReport check_assignment(const LiftedSdp& sdp, const MomentAssignment& x, double eps) {
  if (x.size() < sdp.variables.size())
    throw std::invalid_argument("assignment covers " + std::to_string(x.size()) + " of " +
                                std::to_string(sdp.variables.size()) + " variables");
  ViolationReport rep;
  auto scale_of = [](const LinearForm& f, double& s) {
    s = std::max(s, std::abs(f.constant));
    for (const auto& [v, c] : f.coeffs) s = std::max(s, std::abs(c));
  };
  auto note = [&](std::string where, double amount) {
    rep.worst = std::max(rep.worst, amount);
    if (amount > eps) rep.items.push_back({std::move(where), amount});
  };
  for (std::size_t i = 0; i < sdp.blocks.size(); ++i) {
    const auto& blk = sdp.blocks[i];
    const int s = blk.size();
    double scale = 1;
    MatrixXd M(s, s);
    for (int r = 0; r < s; ++r)
      for (int c = r; c < s; ++c) {
        const auto& f = blk.at(r, c);
        scale_of(f, scale);
        M(r, c) = M(c, r) = f.eval(x);
      }
    scale = std::max(scale, M.cwiseAbs().maxCoeff());
    double v;
    if (blk.kind == SymbolicBlock::Kind::psd) {
      double lmin = s == 1 ? M(0, 0) : Eigen::SelfAdjointEigenSolver<MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
      v = std::max(0.0, -lmin);
    } else {
      v = M.cwiseAbs().maxCoeff();
    }
    note("block " + std::to_string(i) + " (" + blk.origin + ")", v / scale);
  }
  for (const auto& row : sdp.scalars) {
    double scale = 1;
    scale_of(row.form, scale);
    for (const auto& [v, c] : row.form.coeffs) scale = std::max(scale, std::abs(c * x[v]));
    note("scalar " + row.origin, std::max(0.0, -row.form.eval(x)) / scale);
  }
  return rep;
}

LinearForm aggregate(const LiftedSdp& sdp, const DualWitness& w) {
  LinearForm out;
  auto add_scaled = [&](const LinearForm& f, double s) {
    if (s == 0) return;
    out.constant += s * f.constant;
    for (const auto& [v, c] : f.coeffs) out.add(v, s * c);
  };
  for (std::size_t i = 0; i < sdp.blocks.size() && i < w.blocks.size(); ++i) {
    const auto& blk = sdp.blocks[i];
    for (int r = 0; r < blk.size(); ++r)
      for (int c = r; c < blk.size(); ++c) add_scaled(blk.at(r, c), r == c ? w.blocks[i](r, c) : 2 * w.blocks[i](r, c));
  }
  for (std::size_t k = 0; k < sdp.scalars.size() && k < w.scalars.size(); ++k) add_scaled(sdp.scalars[k].form, w.scalars[k]);
  return out;
}

bool verify_witness(const LiftedSdp& sdp, const DualWitness& w, double tol) {
  if (w.blocks.size() != sdp.blocks.size() || w.scalars.size() != sdp.scalars.size()) return false;
  for (std::size_t i = 0; i < sdp.blocks.size(); ++i) {
    if (w.blocks[i].rows() != sdp.blocks[i].size()) return false;
    if (sdp.blocks[i].kind == SymbolicBlock::Kind::psd && w.blocks[i].size() > 0) {
      double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(w.blocks[i], Eigen::EigenvaluesOnly).eigenvalues()(0);
      if (lmin < -tol) return false;
    }
  }
  for (double r : w.scalars)
    if (r < -tol) return false;
  auto agg = aggregate(sdp, w);
  if (agg.constant >= 0) return false;
  for (const auto& [v, c] : agg.coeffs)
    if (std::abs(c) > tol * std::abs(agg.constant)) return false;
  return true;
}

}  // namespace lsos::sdp
