#include "sisyn/qp.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <Eigen/SparseQR>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sisyn {

namespace {

double objective_at(const EqQp& qp, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(qp.h * x) + qp.g.dot(x) + qp.c0;
}

void validate(const EqQp& qp) {
  if (qp.h.rows() != qp.num_vars || qp.h.cols() != qp.num_vars)
    throw std::invalid_argument("solve_eq_ls: H dimension mismatch");
  if (qp.g.size() != qp.num_vars) throw std::invalid_argument("solve_eq_ls: g dimension mismatch");
  if (qp.e.cols() != qp.num_vars && qp.e.rows() > 0)
    throw std::invalid_argument("solve_eq_ls: E column count mismatch");
  if (qp.d.size() != qp.e.rows()) throw std::invalid_argument("solve_eq_ls: d dimension mismatch");
}

// Minimum-norm least-squares solve of E x = d through a QR factorization of
// E^T: with E^T P = Q R the system becomes R^T (Q^T x) = P^T d, whose leading
// triangular block determines the minimum-norm solution (remaining components
// of Q^T x set to zero).
class MinNormSolver {
 public:
  explicit MinNormSolver(const Eigen::SparseMatrix<double>& e) : nv_(int(e.cols())) {
    Eigen::SparseMatrix<double> et = e.transpose();
    et.makeCompressed();
    qr_.setPivotThreshold(1e-12);
    qr_.compute(et);
    if (qr_.info() != Eigen::Success)
      throw std::runtime_error("solve_eq_ls: sparse QR factorization failed");
    rank_ = int(qr_.rank());
  }

  int rank() const { return rank_; }

  Eigen::VectorXd min_norm_point(const Eigen::VectorXd& d) const {
    if (rank_ == 0) return Eigen::VectorXd::Zero(nv_);
    // Permuted right-hand side, leading `rank` entries.
    Eigen::VectorXd pd = qr_.colsPermutation().transpose() * d;
    // Leading rank x rank block of R, lower-triangular after transposition.
    const Eigen::SparseMatrix<double> r = qr_.matrixR();
    Eigen::SparseMatrix<double> r11(rank_, rank_);
    {
      std::vector<Eigen::Triplet<double>> trips;
      for (int col = 0; col < rank_; ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(r, col); it; ++it)
          if (it.row() < rank_) trips.emplace_back(int(it.row()), col, it.value());
      r11.setFromTriplets(trips.begin(), trips.end());
      r11.makeCompressed();
    }
    Eigen::SparseMatrix<double> r11t = r11.transpose();
    Eigen::VectorXd w1 = pd.head(rank_);
    r11t.triangularView<Eigen::Lower>().solveInPlace(w1);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(nv_);
    w.head(rank_) = w1;
    Eigen::VectorXd x = qr_.matrixQ() * w;
    return x;
  }

  // Dense orthonormal basis of the null space of E (trailing columns of Q).
  Eigen::MatrixXd null_basis() const {
    const int dim = nv_ - rank_;
    Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(nv_, dim);
    tail.bottomRows(dim) = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd z = qr_.matrixQ() * tail;
    return z;
  }

 private:
  int nv_;
  int rank_ = 0;
  Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr_;
};

// Direct KKT attempt. The constraint blocks produced by the synthesis
// assembly carry exactly dependent rows, so the plain KKT matrix is singular;
// we factor a proximally regularized copy (+delta on the Hessian block,
// -delta on the constraint block, which is nonsingular for any delta > 0) and
// run iterative refinement against the unregularized system. Refinement
// removes the regularization bias from the primal part; multiplier components
// along dependent rows stay damped, which is harmless. Returns true when the
// refined point satisfies both stationarity and the constraints.
bool try_kkt(const EqQp& qp, double tol_feas, Eigen::VectorXd& x_out, double& feas_rel_out) {
  const int nv = qp.num_vars;
  const int nc = int(qp.e.rows());
  const int n = nv + nc;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(qp.h.nonZeros()) + 2 * size_t(qp.e.nonZeros()) + size_t(n));
  double h_scale = 0.0;
  for (int col = 0; col < qp.h.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.h, col); it; ++it) {
      trips.emplace_back(int(it.row()), col, it.value());
      h_scale = std::max(h_scale, std::abs(it.value()));
    }
  for (int col = 0; col < qp.e.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.e, col); it; ++it) {
      trips.emplace_back(nv + int(it.row()), col, it.value());          // E
      trips.emplace_back(col, nv + int(it.row()), it.value());          // E^T
    }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();

  const double delta = 1e-8 * (1.0 + h_scale);
  for (int i = 0; i < nv; ++i) trips.emplace_back(i, i, delta);
  for (int i = nv; i < n; ++i) trips.emplace_back(i, i, -delta);
  Eigen::SparseMatrix<double> m_reg(n, n);
  m_reg.setFromTriplets(trips.begin(), trips.end());
  m_reg.makeCompressed();

  Eigen::VectorXd rhs(n);
  rhs.head(nv) = -qp.g;
  rhs.tail(nc) = qp.d;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m_reg);
  if (lu.info() != Eigen::Success) return false;
  Eigen::VectorXd v = lu.solve(rhs);
  if (!v.allFinite()) return false;

  const double stat_scale = 1.0 + qp.g.norm();
  const double feas_scale = 1.0 + qp.d.norm();
  Eigen::VectorXd best = v;
  double best_err = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int pass = 0; pass < 40; ++pass) {
    Eigen::VectorXd resid = rhs - m * v;
    const double err = std::max(resid.head(nv).norm() / stat_scale,
                                resid.tail(nc).norm() / feas_scale);
    if (err < best_err * 0.5) {
      stale = 0;
    } else if (++stale >= 3) {
      break;
    }
    if (err < best_err) {
      best_err = err;
      best = v;
    }
    if (err < 1e-13) break;
    Eigen::VectorXd dv = lu.solve(resid);
    if (!dv.allFinite()) break;
    v += dv;
  }

  const Eigen::VectorXd x = best.head(nv);
  const double feas_rel = (qp.e * x - qp.d).norm() / feas_scale;
  const Eigen::VectorXd lambda = best.tail(nc);
  const Eigen::VectorXd stat = qp.h * x + qp.g + qp.e.transpose() * lambda;
  const double stat_rel = stat.norm() / (1.0 + qp.g.norm() + (qp.h * x).norm());
  if (feas_rel > tol_feas || stat_rel > 1e-7) return false;
  x_out = x;
  feas_rel_out = feas_rel;
  return true;
}

}  // namespace

QpSolution solve_eq_ls(const EqQp& qp, double tol_feas) {
  validate(qp);
  QpSolution sol;
  const int nv = qp.num_vars;
  const int nc = int(qp.e.rows());

  if (nc == 0) {
    // Unconstrained: any minimizer of the convex quadratic will do; pick the
    // minimum-norm one via a dense complete orthogonal decomposition.
    Eigen::MatrixXd hd = Eigen::MatrixXd(qp.h);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(hd);
    sol.x = cod.solve(-qp.g);
    sol.feasible = true;
    sol.feas_residual = 0.0;
    sol.objective = objective_at(qp, sol.x);
    return sol;
  }

  // Fast path: direct KKT solve. A point feasible to tolerance certifies that
  // the minimum-norm residual is below tolerance as well.
  {
    Eigen::VectorXd x;
    double feas_rel = 0.0;
    if (try_kkt(qp, tol_feas, x, feas_rel)) {
      sol.feasible = true;
      sol.x = x;
      sol.feas_residual = feas_rel;
      sol.objective = objective_at(qp, sol.x);
      return sol;
    }
  }

  // Arbiter: minimum-norm least-squares solve decides feasibility. Dense
  // rank-revealing factorizations are used whenever affordable; the sparse QR
  // rank estimate is too brittle on the exactly dependent rows the synthesis
  // assembly produces.
  const bool dense_ok = long(nv) * long(nv) <= 50000000L && nc <= 4 * nv;
  Eigen::VectorXd x0;
  Eigen::MatrixXd z;
  if (dense_ok) {
    Eigen::MatrixXd ed(qp.e);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ed);
    x0 = cod.solve(qp.d);
    const double rel = (qp.e * x0 - qp.d).norm() / (1.0 + qp.d.norm());
    if (rel > tol_feas) {
      sol.feasible = false;
      sol.feas_residual = rel;
      sol.x = x0;
      sol.objective = objective_at(qp, x0);
      return sol;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ed.transpose());
    const int rank = int(qr.rank());
    Eigen::MatrixXd q = qr.householderQ();
    z = q.rightCols(nv - rank);
  } else {
    MinNormSolver mn(qp.e);
    x0 = mn.min_norm_point(qp.d);
    const double rel = (qp.e * x0 - qp.d).norm() / (1.0 + qp.d.norm());
    if (rel > tol_feas) {
      sol.feasible = false;
      sol.feas_residual = rel;
      sol.x = x0;
      sol.objective = objective_at(qp, x0);
      return sol;
    }
    const long null_dim = nv - mn.rank();
    if (null_dim > 0 && long(nv) * null_dim > 50000000L)
      throw std::runtime_error("solve_eq_ls: degenerate system too large for the null-space path");
    z = mn.null_basis();
  }

  // Feasible but the KKT route did not certify (typically rank-deficient E):
  // optimize over x = x0 + Z v with Z an orthonormal null-space basis.
  Eigen::VectorXd x = x0;
  if (z.cols() > 0) {
    Eigen::MatrixXd hz = qp.h * z;
    Eigen::MatrixXd hr = z.transpose() * hz;
    Eigen::VectorXd rhs = -z.transpose() * (qp.h * x0 + qp.g);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hr);
    Eigen::VectorXd v;
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      v = ldlt.solve(rhs);
      ok = v.allFinite() && (hr * v - rhs).norm() <= 1e-7 * (1.0 + rhs.norm());
    }
    if (!ok) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(hr);
      v = cod.solve(rhs);
      if (!v.allFinite()) throw std::runtime_error("solve_eq_ls: reduced solve failed");
    }
    x += z * v;
  }
  sol.feasible = true;
  sol.x = x;
  sol.feas_residual = (qp.e * x - qp.d).norm() / (1.0 + qp.d.norm());
  sol.objective = objective_at(qp, x);
  return sol;
}

}  // namespace sisyn
