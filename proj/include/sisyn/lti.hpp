#pragma once

#include <Eigen/Core>
#include <vector>

#include "sisyn/pattern.hpp"

namespace sisyn {

/// Strictly proper discrete-time plant x+ = A x + B u, y = C x.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }

  void validate() const;
};

/// State-space system with feedthrough: x+ = A x + B u, y = C x + D u.
struct Realization {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(D.cols()); }
  int outputs() const { return static_cast<int>(D.rows()); }

  void validate() const;

  /// Transfer matrix value C (zI - A)^{-1} B + D at a complex frequency.
  Eigen::MatrixXcd eval(std::complex<double> z) const;
};

/// Finite impulse response series F(z) = sum_{t=0}^{N} F[t] z^{-t}.
class FirSeries {
 public:
  FirSeries() = default;
  FirSeries(int rows, int cols, int horizon);  // zero coefficients
  explicit FirSeries(std::vector<Eigen::MatrixXd> coeffs);

  static FirSeries zero(int rows, int cols, int horizon) { return FirSeries(rows, cols, horizon); }
  /// identity * z^{-tap}
  static FirSeries delayed_identity(int n, int tap, int horizon);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int horizon() const { return static_cast<int>(c_.size()) - 1; }

  /// Coefficient at lag t; zero matrix beyond the horizon.
  const Eigen::MatrixXd& coeff(int t) const;
  Eigen::MatrixXd& coeff(int t);

  /// Grows (zero-pads) or shrinks the stored horizon.
  void resize_horizon(int horizon);
  /// Drops trailing coefficients with max-norm <= tol.
  void trim(double tol);

  double max_abs() const;

  /// Series value at a complex frequency z.
  Eigen::MatrixXcd eval(std::complex<double> z) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Eigen::MatrixXd> c_;
  Eigen::MatrixXd zero_;  // returned for lags beyond the stored horizon
};

/// Markov parameter of a strictly proper plant: 0 at t = 0, C A^{t-1} B for
/// t >= 1.
Eigen::MatrixXd markov(const StateSpace& sys, int t);

/// Markov parameters for t = 0 .. count-1.
std::vector<Eigen::MatrixXd> markov_sequence(const StateSpace& sys, int count);

/// Coefficientwise product of two FIR series (Cauchy convolution).
FirSeries fir_convolve(const FirSeries& f, const FirSeries& g);

FirSeries fir_add(const FirSeries& f, const FirSeries& g);

/// Squared H2 norm of an FIR series: sum of squared Frobenius norms of the
/// coefficients.
double h2_sq_fir(const FirSeries& f);

/// Squared H2 norm from a realization: trace(D^T D) + trace(B^T P B) with
/// P = A^T P A + C^T C solved directly (Schur back-substitution).
/// Throws std::runtime_error when A is not Schur stable.
double h2_sq_lyap(const Realization& sys);

/// Solves P = A^T P A + Q for symmetric Q; requires spectral_radius(A) < 1.
Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

double spectral_radius(const Eigen::MatrixXd& m);

/// Shift-register realization of an FIR series (D = F[0]).
Realization fir_shift_register(const FirSeries& f);

/// Formal power-series quotient K = U * Y^{-1} truncated to `terms`
/// coefficients (lags 0 .. terms-1). Requires Y square with invertible Y[0].
/// The quotient is well defined even when K is an unstable transfer matrix.
FirSeries fir_long_division(const FirSeries& u, const FirSeries& y, int terms);

/// State-space controller realizing K = U * Y^{-1} for an FIR pair with
/// Y[0] = I. When the quotient terminates (K itself FIR) the result is a
/// plain shift register; otherwise the register is closed with the feedback
/// of Y's tail and unobservable directions are eliminated exactly, so no
/// cancelled mode survives as a hidden eigenvalue.
Realization realize_controller(const FirSeries& u, const FirSeries& y, double tol = 1e-9);

/// Deflates exactly unobservable modes on or outside the unit circle (PBH
/// certificate per mode, iterated to a fixed point). Strictly stable hidden
/// modes are kept; the returned realization has the same transfer matrix and
/// no non-stable cancelled dynamics.
Realization eliminate_unobservable(const Realization& sys, double tol = 1e-8);

struct ClosedLoop {
  Eigen::MatrixXd a_cl;
  double radius = 0.0;
  bool stable = false;
};

/// Interconnection of a strictly proper plant with an output-feedback
/// controller u = K y. Stable iff spectral_radius(A_cl) < 1 - margin.
ClosedLoop closed_loop(const StateSpace& plant, const Realization& k, double margin = 1e-6);

/// Asserts that every unstable eigenvalue of A is both controllable and
/// observable (PBH rank tests); throws std::runtime_error otherwise.
void assert_no_hidden_unstable_modes(const StateSpace& sys, double tol = 1e-8);

}  // namespace sisyn
