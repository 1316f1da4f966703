#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace sisyn {

/// Equality-constrained convex quadratic program:
///   minimize 0.5 x' H x + g' x + c0   subject to   E x = d,
/// with H positive semidefinite.
struct EqQp {
  int num_vars = 0;
  Eigen::SparseMatrix<double> h;
  Eigen::VectorXd g;
  double c0 = 0.0;
  Eigen::SparseMatrix<double> e;
  Eigen::VectorXd d;
};

struct QpSolution {
  bool feasible = false;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// ||E x - d|| / (1 + ||d||) at the returned point (or at the minimum-norm
  /// least-squares point when infeasible).
  double feas_residual = 0.0;
};

/// Solves the program above. Feasibility is decided by the minimum-norm
/// least-squares residual of E x = d against tol_feas * (1 + ||d||); a sparse
/// KKT factorization answers first when it produces a point that satisfies the
/// constraints within that tolerance (such a point witnesses that the minimum
/// residual is also below it). Rank-deficient constraint rows are permitted.
/// Infeasibility is reported in the result; std::runtime_error is reserved for
/// numerical breakdown.
QpSolution solve_eq_ls(const EqQp& qp, double tol_feas = 1e-7);

}  // namespace sisyn
