#include "sisyn/synthesis.hpp"

#include <Eigen/SparseCore>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sisyn/invariance.hpp"

namespace sisyn {
namespace {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

MatrixXi make_index(const Pattern& mask, int& next) {
  MatrixXi idx = MatrixXi::Constant(mask.rows(), mask.cols(), -1);
  for (int i = 0; i < mask.rows(); ++i)
    for (int j = 0; j < mask.cols(); ++j)
      if (mask.at(i, j)) idx(i, j) = next++;
  return idx;
}

double rel_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

bool pattern_respected(const FirSeries& k, const Pattern& s, double tol) {
  for (int t = 0; t <= k.horizon(); ++t) {
    const MatrixXd& kt = k.coeff(t);
    const double scale = 1.0 + kt.cwiseAbs().maxCoeff();
    for (int i = 0; i < s.rows(); ++i)
      for (int j = 0; j < s.cols(); ++j)
        if (!s.at(i, j) && std::abs(kt(i, j)) > tol * scale) return false;
  }
  return true;
}

FirSeries generic_closed_loop(const CostSpec& cost, const FirSeries& u) {
  return fir_add(cost.p11, fir_convolve(fir_convolve(cost.p12, u), cost.p21));
}

/// The four-block closed-loop response [W, Y - I; Z - I, U] as one series.
FirSeries stacked_blocks(const IopSeries& s) {
  const int m = s.u.rows();
  const int p = s.u.cols();
  const int horizon = s.u.horizon();
  FirSeries blocks(p + m, m + p, horizon);
  for (int t = 0; t <= horizon; ++t) {
    MatrixXd& bt = blocks.coeff(t);
    bt.topLeftCorner(p, m) = s.w.coeff(t);
    bt.topRightCorner(p, p) = s.y.coeff(t);
    bt.bottomLeftCorner(m, m) = s.z.coeff(t);
    bt.bottomRightCorner(m, p) = s.u.coeff(t);
    if (t == 0) {
      bt.topRightCorner(p, p) -= MatrixXd::Identity(p, p);
      bt.bottomLeftCorner(m, m) -= MatrixXd::Identity(m, m);
    }
  }
  return blocks;
}

double objective_from_series(const SynthesisSpec& spec, const IopSeries& s) {
  switch (spec.cost.kind) {
    case CostSpec::Kind::Example1Blocks:
      return h2_sq_fir(stacked_blocks(s));
    case CostSpec::Kind::StateFeedbackW:
      return h2_sq_fir(s.w);
    case CostSpec::Kind::GenericFir:
      return h2_sq_fir(generic_closed_loop(spec.cost, s.u));
  }
  throw std::logic_error("synthesis: unknown cost kind");
}

/// Independent H2 recomputation from a state-space interconnection of the
/// recovered controller with the plant (Lyapunov route). Requires a stable
/// closed loop.
double closed_loop_h2_sq_lyap(const SynthesisSpec& spec, const Realization& k,
                              const MatrixXd& a_cl, const IopSeries& series) {
  const MatrixXd& A = spec.plant.A;
  const MatrixXd& B = spec.plant.B;
  const MatrixXd& C = spec.plant.C;
  const int n = spec.plant.states();
  const int m = spec.plant.inputs();
  const int p = spec.plant.outputs();
  const int nk = k.states();

  switch (spec.cost.kind) {
    case CostSpec::Kind::Example1Blocks: {
      // Disturbances (w1, w2) enter as G(u + w1) and y = G(u + w1) + w2;
      // outputs are (G(u + w1), u). The transfer is [W, Y - I; Z - I, U].
      MatrixXd b_cl(n + nk, m + p);
      b_cl << B, B * k.D, MatrixXd::Zero(nk, m), k.B;
      MatrixXd c_cl(p + m, n + nk);
      c_cl << C, MatrixXd::Zero(p, nk), k.D * C, k.C;
      MatrixXd d_cl = MatrixXd::Zero(p + m, m + p);
      d_cl.bottomRightCorner(m, p) = k.D;
      return h2_sq_lyap(Realization{a_cl, b_cl, c_cl, d_cl});
    }
    case CostSpec::Kind::StateFeedbackW: {
      // Disturbance shares the control channel, output is y: transfer W.
      MatrixXd b_cl(n + nk, m);
      b_cl << B, MatrixXd::Zero(nk, m);
      MatrixXd c_cl(p, n + nk);
      c_cl << C, MatrixXd::Zero(p, nk);
      return h2_sq_lyap(Realization{a_cl, b_cl, c_cl, MatrixXd::Zero(p, m)});
    }
    case CostSpec::Kind::GenericFir:
      return h2_sq_lyap(fir_shift_register(generic_closed_loop(spec.cost, series.u)));
  }
  throw std::logic_error("synthesis: unknown cost kind");
}

}  // namespace

void finalize_spec(SynthesisSpec& spec) {
  spec.plant.validate();
  const int m = spec.plant.inputs();
  const int p = spec.plant.outputs();

  if (spec.horizon < 1) throw std::invalid_argument("synthesis: horizon must be >= 1");
  if (spec.s.rows() != m || spec.s.cols() != p)
    throw std::invalid_argument("synthesis: S must be m x p");
  if (spec.t.rows() != m || spec.t.cols() != p)
    throw std::invalid_argument("synthesis: T must be m x p");
  if (spec.r.rows() != p || spec.r.cols() != p)
    throw std::invalid_argument("synthesis: R must be p x p");
  if (!leq(Pattern::identity(p), spec.r))
    throw std::invalid_argument("synthesis: R must contain the identity");
  if (!leq(spec.t, spec.s)) throw std::invalid_argument("synthesis: T must satisfy T <= S");

  // Imposing the closure instead of R itself does not change the feasible
  // set (X in Sparse(R) invertible has struct(X^{-1}) <= R^{p-1}) and makes
  // the convex restriction as large as possible.
  spec.r = bool_power(spec.r, p > 1 ? p - 1 : 1);

  if (spec.impose_r_structure) {
    const SiVerdict v = si_check(spec.t, spec.r, spec.s);
    if (!v.holds) {
      std::ostringstream msg;
      msg << "synthesis: (T, R) is not sparsity invariant for S; violating triple (i, j, k) = ("
          << v.violating_triple[0] << ", " << v.violating_triple[1] << ", "
          << v.violating_triple[2] << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  if (spec.gamma == Gamma::Plant && m != p)
    throw std::invalid_argument("synthesis: Gamma::Plant requires a square plant");

  if (spec.cost.kind == CostSpec::Kind::GenericFir) {
    const FirSeries& p11 = spec.cost.p11;
    const FirSeries& p12 = spec.cost.p12;
    const FirSeries& p21 = spec.cost.p21;
    if (p12.rows() == 0 || p21.cols() == 0)
      throw std::invalid_argument("synthesis: generic cost blocks are empty");
    if (p12.cols() != m || p21.rows() != p)
      throw std::invalid_argument("synthesis: generic cost blocks do not match U (m x p)");
    if (p11.rows() != p12.rows() || p11.cols() != p21.cols())
      throw std::invalid_argument("synthesis: P11 does not match P12 * U * P21");
  }
}

AssembledQp assemble(const SynthesisSpec& spec) {
  const MatrixXd& A = spec.plant.A;
  const MatrixXd& B = spec.plant.B;
  const MatrixXd& C = spec.plant.C;
  const int n = spec.plant.states();
  const int m = spec.plant.inputs();
  const int p = spec.plant.outputs();
  const int N = spec.horizon;

  // Which coefficients carry the sparsity constraints depends on Gamma:
  // Identity puts T on U and R on Y, Plant puts T on Z = U G + I and R on
  // W = Y G. Everything else is free.
  const bool identity_gamma = spec.gamma == Gamma::Identity;
  const Pattern mask_u = identity_gamma ? spec.t : Pattern::ones(m, p);
  const Pattern mask_y =
      (identity_gamma && spec.impose_r_structure) ? spec.r : Pattern::ones(p, p);
  const Pattern mask_w =
      (!identity_gamma && spec.impose_r_structure) ? spec.r : Pattern::ones(p, m);
  const Pattern mask_z = identity_gamma ? Pattern::ones(m, m) : spec.t;

  AssembledQp a;
  a.n = n;
  a.m = m;
  a.p = p;
  a.horizon = N;
  a.u_idx.resize(N + 1);
  a.y_idx.resize(N + 1);
  a.w_idx.resize(N + 1);
  a.z_idx.resize(N + 1);

  int next = 0;
  for (int t = 0; t <= N; ++t) a.u_idx[t] = make_index(mask_u, next);
  a.y_idx[0] = MatrixXi::Constant(p, p, -1);
  for (int t = 1; t <= N; ++t) a.y_idx[t] = make_index(mask_y, next);
  a.w_idx[0] = MatrixXi::Constant(p, m, -1);
  for (int t = 1; t <= N; ++t) a.w_idx[t] = make_index(mask_w, next);
  a.z_idx[0] = MatrixXi::Constant(m, m, -1);
  for (int t = 1; t <= N; ++t) a.z_idx[t] = make_index(mask_z, next);
  const int series_vars = next;

  const int xi1_off = next;
  next += N * n * p;
  const int xi2_off = next;
  next += N * n * m;
  const int ze3_off = next;
  next += N * p * n;
  const int ze4_off = next;
  next += N * m * n;
  const int num_vars = next;

  auto xi1 = [&](int t, int i, int j) { return xi1_off + (t - 1) * n * p + i * p + j; };
  auto xi2 = [&](int t, int i, int j) { return xi2_off + (t - 1) * n * m + i * m + j; };
  auto ze3 = [&](int t, int i, int j) { return ze3_off + (t - 1) * p * n + i * n + j; };
  auto ze4 = [&](int t, int i, int j) { return ze4_off + (t - 1) * m * n + i * n + j; };

  std::vector<Triplet> et;
  std::vector<double> rhs;
  int row = 0;
  auto new_row = [&](double d) {
    rhs.push_back(d);
    return row++;
  };
  auto add = [&](int r, int idx, double coef) {
    if (idx >= 0 && coef != 0.0) et.emplace_back(r, idx, coef);
  };

  // Y - G U = I via xi1+ = A xi1 + B U[t], xi1[N + 1] = 0, Y[t] = C xi1[t].
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) {
      const int r = new_row(0.0);
      add(r, xi1(1, i, j), 1.0);
      for (int k = 0; k < m; ++k) add(r, a.u_idx[0](k, j), -B(i, k));
    }
  for (int t = 1; t < N; ++t)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) {
        const int r = new_row(0.0);
        add(r, xi1(t + 1, i, j), 1.0);
        for (int l = 0; l < n; ++l) add(r, xi1(t, l, j), -A(i, l));
        for (int k = 0; k < m; ++k) add(r, a.u_idx[t](k, j), -B(i, k));
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) {
      const int r = new_row(0.0);
      for (int l = 0; l < n; ++l) add(r, xi1(N, l, j), A(i, l));
      for (int k = 0; k < m; ++k) add(r, a.u_idx[N](k, j), B(i, k));
    }
  for (int t = 1; t <= N; ++t)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        const int r = new_row(0.0);
        add(r, a.y_idx[t](i, j), 1.0);
        for (int l = 0; l < n; ++l) add(r, xi1(t, l, j), -C(i, l));
      }

  // W - G Z = 0 via xi2+ = A xi2 + B Z[t] with Z[0] = I fixed.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const int r = new_row(B(i, j));
      add(r, xi2(1, i, j), 1.0);
    }
  for (int t = 1; t < N; ++t)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const int r = new_row(0.0);
        add(r, xi2(t + 1, i, j), 1.0);
        for (int l = 0; l < n; ++l) add(r, xi2(t, l, j), -A(i, l));
        for (int k = 0; k < m; ++k) add(r, a.z_idx[t](k, j), -B(i, k));
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const int r = new_row(0.0);
      for (int l = 0; l < n; ++l) add(r, xi2(N, l, j), A(i, l));
      for (int k = 0; k < m; ++k) add(r, a.z_idx[N](k, j), B(i, k));
    }
  for (int t = 1; t <= N; ++t)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j) {
        const int r = new_row(0.0);
        add(r, a.w_idx[t](i, j), 1.0);
        for (int l = 0; l < n; ++l) add(r, xi2(t, l, j), -C(i, l));
      }

  // W - Y G = 0 via ze3+ = ze3 A + Y[t] C with Y[0] = I, W[t] = ze3[t] B.
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < n; ++j) {
      const int r = new_row(C(i, j));
      add(r, ze3(1, i, j), 1.0);
    }
  for (int t = 1; t < N; ++t)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < n; ++j) {
        const int r = new_row(0.0);
        add(r, ze3(t + 1, i, j), 1.0);
        for (int l = 0; l < n; ++l) add(r, ze3(t, i, l), -A(l, j));
        for (int k = 0; k < p; ++k) add(r, a.y_idx[t](i, k), -C(k, j));
      }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < n; ++j) {
      const int r = new_row(0.0);
      for (int l = 0; l < n; ++l) add(r, ze3(N, i, l), A(l, j));
      for (int k = 0; k < p; ++k) add(r, a.y_idx[N](i, k), C(k, j));
    }
  for (int t = 1; t <= N; ++t)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j) {
        const int r = new_row(0.0);
        add(r, a.w_idx[t](i, j), 1.0);
        for (int l = 0; l < n; ++l) add(r, ze3(t, i, l), -B(l, j));
      }

  // Z - U G = I via ze4+ = ze4 A + U[t] C, Z[t] = [t = 0] I + ze4[t] B.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const int r = new_row(0.0);
      add(r, ze4(1, i, j), 1.0);
      for (int k = 0; k < p; ++k) add(r, a.u_idx[0](i, k), -C(k, j));
    }
  for (int t = 1; t < N; ++t)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        const int r = new_row(0.0);
        add(r, ze4(t + 1, i, j), 1.0);
        for (int l = 0; l < n; ++l) add(r, ze4(t, i, l), -A(l, j));
        for (int k = 0; k < p; ++k) add(r, a.u_idx[t](i, k), -C(k, j));
      }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const int r = new_row(0.0);
      for (int l = 0; l < n; ++l) add(r, ze4(N, i, l), A(l, j));
      for (int k = 0; k < p; ++k) add(r, a.u_idx[N](i, k), C(k, j));
    }
  for (int t = 1; t <= N; ++t)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const int r = new_row(0.0);
        add(r, a.z_idx[t](i, j), 1.0);
        for (int l = 0; l < n; ++l) add(r, ze4(t, i, l), -B(l, j));
      }

  a.qp.num_vars = num_vars;
  a.qp.e.resize(row, num_vars);
  a.qp.e.setFromTriplets(et.begin(), et.end());
  a.qp.d = Eigen::Map<const VectorXd>(rhs.data(), row);

  std::vector<Triplet> ht;
  VectorXd g = VectorXd::Zero(num_vars);
  double c0 = 0.0;
  switch (spec.cost.kind) {
    case CostSpec::Kind::Example1Blocks:
      // || [W, Y - I; Z - I, U] ||^2: every free series coefficient enters
      // with unit weight (the fixed lags contribute zero).
      for (int v = 0; v < series_vars; ++v) ht.emplace_back(v, v, 2.0);
      break;
    case CostSpec::Kind::StateFeedbackW:
      for (int t = 1; t <= N; ++t)
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < m; ++j)
            if (a.w_idx[t](i, j) >= 0) ht.emplace_back(a.w_idx[t](i, j), a.w_idx[t](i, j), 2.0);
      break;
    case CostSpec::Kind::GenericFir: {
      // || P11 + P12 U P21 ||^2 = || L u + c ||^2 over the stacked FIR
      // coefficients; U variables occupy the leading indices.
      const FirSeries& p11 = spec.cost.p11;
      const FirSeries& p12 = spec.cost.p12;
      const FirSeries& p21 = spec.cost.p21;
      const int q = p12.rows();
      const int wc = p21.cols();
      const int tmax = std::max(p11.horizon(), p12.horizon() + N + p21.horizon());
      const int nres = (tmax + 1) * q * wc;
      auto ridx = [&](int tau, int rr, int cc) { return (tau * q + rr) * wc + cc; };

      VectorXd c = VectorXd::Zero(nres);
      for (int tau = 0; tau <= p11.horizon(); ++tau)
        for (int rr = 0; rr < q; ++rr)
          for (int cc = 0; cc < wc; ++cc) c(ridx(tau, rr, cc)) = p11.coeff(tau)(rr, cc);

      const int nu = (N + 1) * static_cast<int>(cardinality(mask_u));
      MatrixXd lmat = MatrixXd::Zero(nres, nu);
      for (int t = 0; t <= N; ++t)
        for (int bi = 0; bi < m; ++bi)
          for (int bj = 0; bj < p; ++bj) {
            const int v = a.u_idx[t](bi, bj);
            if (v < 0) continue;
            for (int aa = 0; aa <= p12.horizon(); ++aa)
              for (int cc2 = 0; cc2 <= p21.horizon(); ++cc2) {
                const int tau = aa + t + cc2;
                for (int rr = 0; rr < q; ++rr)
                  for (int cc = 0; cc < wc; ++cc)
                    lmat(ridx(tau, rr, cc), v) += p12.coeff(aa)(rr, bi) * p21.coeff(cc2)(bj, cc);
              }
          }
      const MatrixXd hu = 2.0 * (lmat.transpose() * lmat);
      for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nu; ++j)
          if (hu(i, j) != 0.0) ht.emplace_back(i, j, hu(i, j));
      g.head(nu) = 2.0 * (lmat.transpose() * c);
      c0 = c.squaredNorm();
      break;
    }
  }
  a.qp.h.resize(num_vars, num_vars);
  a.qp.h.setFromTriplets(ht.begin(), ht.end());
  a.qp.g = g;
  a.qp.c0 = c0;
  return a;
}

IopSeries extract_series(const AssembledQp& a, const Eigen::VectorXd& x) {
  const int N = a.horizon;
  const int m = a.m;
  const int p = a.p;
  IopSeries s{FirSeries(m, p, N), FirSeries(p, p, N), FirSeries(p, m, N), FirSeries(m, m, N)};
  s.y.coeff(0) = MatrixXd::Identity(p, p);
  s.z.coeff(0) = MatrixXd::Identity(m, m);
  auto fill = [&](const std::vector<MatrixXi>& idx, FirSeries& f) {
    for (int t = 0; t <= N; ++t)
      for (int i = 0; i < idx[t].rows(); ++i)
        for (int j = 0; j < idx[t].cols(); ++j)
          if (idx[t](i, j) >= 0) f.coeff(t)(i, j) = x(idx[t](i, j));
  };
  fill(a.u_idx, s.u);
  fill(a.y_idx, s.y);
  fill(a.w_idx, s.w);
  fill(a.z_idx, s.z);
  return s;
}

SynthesisResult synthesize(const SynthesisSpec& spec_in) {
  SynthesisSpec spec = spec_in;
  finalize_spec(spec);
  const AssembledQp a = assemble(spec);
  const QpSolution sol = solve_eq_ls(a.qp, spec.tol_feas);

  SynthesisResult res;
  res.horizon = spec.horizon;
  res.feas_residual = sol.feas_residual;
  if (!sol.feasible) return res;

  res.feasible = true;
  res.checks.constraint_residual = sol.feas_residual;
  res.series = extract_series(a, sol.x);
  res.cost_h2_sq = sol.objective;
  res.cost_h2 = std::sqrt(std::max(0.0, sol.objective));

  res.k_real = realize_controller(res.series.u, res.series.y);

  // The U Y^{-1} expansion, i.e. the long-division quotient, read off the
  // realized controller. The plain division recursion carries the cancelled
  // plant poles in its error dynamics, so its late terms drown in amplified
  // roundoff whenever the plant is unstable; the Markov walk of the deflated
  // realization computes the same coefficients without that growth.
  res.k_fir = FirSeries(int(res.k_real.D.rows()), int(res.k_real.D.cols()),
                        2 * spec.horizon);
  res.k_fir.coeff(0) = res.k_real.D;
  if (res.k_real.states() > 0) {
    Eigen::MatrixXd walk = res.k_real.B;
    for (int t = 1; t <= 2 * spec.horizon; ++t) {
      res.k_fir.coeff(t) = res.k_real.C * walk;
      walk = res.k_real.A * walk;
    }
  }
  res.checks.controller_sparsity_ok = pattern_respected(res.k_fir, spec.s, spec.struct_tol);

  const ClosedLoop cl = closed_loop(spec.plant, res.k_real, spec.stability_margin);
  res.checks.closed_loop_stable = cl.stable;
  res.checks.closed_loop_radius = cl.radius;

  res.checks.objective_vs_fir_gap = rel_gap(objective_from_series(spec, res.series), res.cost_h2_sq);
  if (cl.stable)
    res.checks.lyap_vs_fir_cost_gap =
        rel_gap(closed_loop_h2_sq_lyap(spec, res.k_real, cl.a_cl, res.series), res.cost_h2_sq);

  res.verified = res.checks.controller_sparsity_ok && res.checks.closed_loop_stable;
  return res;
}

std::vector<SweepRow> sweep_horizon(const SynthesisSpec& spec, const std::vector<int>& horizons,
                                    std::vector<SynthesisResult>* results) {
  if (horizons.empty()) throw std::invalid_argument("sweep: horizon list is empty");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] < 1) throw std::invalid_argument("sweep: horizons must be >= 1");
    if (i > 0 && horizons[i] <= horizons[i - 1])
      throw std::invalid_argument("sweep: horizons must be strictly increasing");
  }
  std::vector<SweepRow> rows;
  double prev_cost = 0.0;
  bool have_prev = false;
  for (int N : horizons) {
    SynthesisSpec s = spec;
    s.horizon = N;
    SynthesisResult r = synthesize(s);
    SweepRow row;
    row.horizon = N;
    row.feasible = r.feasible;
    if (r.feasible) {
      row.cost_h2 = r.cost_h2;
      row.delta = have_prev ? std::abs(r.cost_h2 - prev_cost) : -1.0;
      prev_cost = r.cost_h2;
      have_prev = true;
    }
    rows.push_back(row);
    if (results) results->push_back(std::move(r));
  }
  return rows;
}

}  // namespace sisyn
