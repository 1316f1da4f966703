#pragma once

#include <vector>

#include "sisyn/lti.hpp"
#include "sisyn/pattern.hpp"
#include "sisyn/qp.hpp"

namespace sisyn {

/// Right factor applied to the closed-loop parameters before the sparsity
/// constraints: Identity structures (U, Y) directly, Plant structures
/// (U G, Y G) = (Z - I, W) instead (square plants only).
enum class Gamma { Identity, Plant };

struct CostSpec {
  enum class Kind { Example1Blocks, StateFeedbackW, GenericFir };
  Kind kind = Kind::Example1Blocks;
  /// Present for GenericFir only: objective ||P11 + P12 * U * P21||_H2^2.
  FirSeries p11, p12, p21;

  static CostSpec example1_blocks() { return CostSpec{Kind::Example1Blocks, {}, {}, {}}; }
  static CostSpec state_feedback_w() { return CostSpec{Kind::StateFeedbackW, {}, {}, {}}; }
  static CostSpec generic(FirSeries p11, FirSeries p12, FirSeries p21) {
    return CostSpec{Kind::GenericFir, std::move(p11), std::move(p12), std::move(p21)};
  }
};

/// Problem description for FIR-truncated H2 design of u = K y with K
/// constrained to Sparse(S) through the pair (T, R).
struct SynthesisSpec {
  StateSpace plant;
  Pattern s;        ///< target controller pattern, m x p
  Pattern t;        ///< numerator pattern, m x p (defaults to S upstream)
  Pattern r;        ///< denominator pattern, p x p with R >= I_p
  int horizon = 0;  ///< FIR truncation order N >= 1
  Gamma gamma = Gamma::Identity;
  CostSpec cost;
  /// When false, only the T-side constraint is imposed (plain restriction,
  /// used for QI baselines); the sparsity-invariance precondition is skipped.
  bool impose_r_structure = true;

  double tol_feas = 1e-7;
  double struct_tol = 1e-7;        ///< controller sparsity check tolerance
  double stability_margin = 1e-6;  ///< closed-loop radius must stay below 1 - margin
};

/// Normalizes the spec in place: replaces R by its boolean closure R^{p-1} and
/// checks every precondition (dimensions, R >= I, the sparsity-invariance test
/// when impose_r_structure is set, square plant for Gamma::Plant). Throws on
/// violation, naming the violating index triple when invariance fails.
void finalize_spec(SynthesisSpec& spec);

/// The assembled equality-constrained QP together with the variable layout.
/// Decision variables are the free coefficient entries of U, Y, W, Z
/// (structural zeros eliminated, Y[0] = I, Z[0] = I, W[0] = 0 fixed) followed
/// by the four auxiliary state trajectories of the achievability recursions:
///   xi1+ = A xi1 + B U[t],  Y[t] = [t=0] I + C xi1[t]   (Y - G U = I)
///   xi2+ = A xi2 + B Z[t],  W[t] = C xi2[t]             (W - G Z = 0)
///   ze3+ = ze3 A + Y[t] C,  W[t] = ze3[t] B             (W - Y G = 0)
///   ze4+ = ze4 A + U[t] C,  Z[t] = [t=0] I + ze4[t] B   (Z - U G = I)
/// with zero terminal states at N + 1, which makes every product FIR and the
/// truncation a restriction of the infinite-horizon problem.
struct AssembledQp {
  EqQp qp;
  // Per-lag index maps into the variable vector; -1 marks entries that are
  // not variables (structural zeros or fixed coefficients).
  std::vector<Eigen::MatrixXi> u_idx, y_idx, w_idx, z_idx;
  int n = 0, m = 0, p = 0, horizon = 0;
};

AssembledQp assemble(const SynthesisSpec& spec);

/// The four closed-loop series extracted from a QP solution point, with the
/// fixed coefficients filled back in.
struct IopSeries {
  FirSeries u, y, w, z;
};

IopSeries extract_series(const AssembledQp& a, const Eigen::VectorXd& x);

struct SynthesisChecks {
  double constraint_residual = 0.0;     ///< ||E x - d|| / (1 + ||d||)
  bool controller_sparsity_ok = false;  ///< every K_fir coefficient inside Sparse(S)
  bool closed_loop_stable = false;
  double closed_loop_radius = 0.0;
  /// |h2_sq(Lyapunov, interconnection) - objective| / (1 + objective);
  /// -1 when the loop is unstable and the check cannot run.
  double lyap_vs_fir_cost_gap = -1.0;
  /// |h2_sq_fir(closed-loop blocks) - objective| / (1 + objective).
  double objective_vs_fir_gap = 0.0;
};

struct SynthesisResult {
  bool feasible = false;
  bool verified = false;  ///< feasible and both verification checks passed
  double cost_h2 = 0.0;
  double cost_h2_sq = 0.0;
  int horizon = 0;
  IopSeries series;    ///< valid when feasible
  FirSeries k_fir;     ///< long division of U by Y, 2N+1 terms
  Realization k_real;  ///< state-space controller realizing U Y^{-1}
  SynthesisChecks checks;
  double feas_residual = 0.0;  ///< minimum-norm residual when infeasible
};

/// Solves the FIR-truncated program and recovers the controller. Infeasibility
/// is reported in the result; exceptions indicate invalid specs or numerical
/// breakdown.
SynthesisResult synthesize(const SynthesisSpec& spec);

struct SweepRow {
  int horizon = 0;
  bool feasible = false;
  double cost_h2 = 0.0;
  /// |cost - previous feasible cost|; -1 for the first feasible row.
  double delta = -1.0;
};

/// Runs synthesize over a strictly increasing horizon list.
std::vector<SweepRow> sweep_horizon(const SynthesisSpec& spec, const std::vector<int>& horizons,
                                    std::vector<SynthesisResult>* results = nullptr);

}  // namespace sisyn
