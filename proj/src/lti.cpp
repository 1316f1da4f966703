#include "sisyn/lti.hpp"

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace sisyn {

namespace {

int svd_rank_complex(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double thresh = tol * std::max(1.0, sv(0));
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return rank;
}

// Orthonormal basis of the orthogonal complement of the (orthonormal) columns
// of v inside R^n.
Eigen::MatrixXd complement_basis(const Eigen::MatrixXd& v, int n) {
  if (v.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - v.cols());
}

}  // namespace

void StateSpace::validate() const {
  if (A.rows() != A.cols()) throw std::invalid_argument("StateSpace: A must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("StateSpace: B row count must match A");
  if (C.cols() != A.cols()) throw std::invalid_argument("StateSpace: C column count must match A");
}

void Realization::validate() const {
  if (A.rows() != A.cols()) throw std::invalid_argument("Realization: A must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("Realization: B row count must match A");
  if (C.cols() != A.cols())
    throw std::invalid_argument("Realization: C column count must match A");
  if (D.rows() != C.rows() || D.cols() != B.cols())
    throw std::invalid_argument("Realization: D must be outputs x inputs");
}

Eigen::MatrixXcd Realization::eval(std::complex<double> z) const {
  const int n = states();
  Eigen::MatrixXcd zi = z * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
  return C.cast<std::complex<double>>() * zi.partialPivLu().solve(B.cast<std::complex<double>>()) +
         D.cast<std::complex<double>>();
}

FirSeries::FirSeries(int rows, int cols, int horizon) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("FirSeries: empty dimensions");
  if (horizon < 0) throw std::invalid_argument("FirSeries: negative horizon");
  c_.assign(static_cast<size_t>(horizon) + 1, Eigen::MatrixXd::Zero(rows, cols));
  zero_ = Eigen::MatrixXd::Zero(rows, cols);
}

FirSeries::FirSeries(std::vector<Eigen::MatrixXd> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) throw std::invalid_argument("FirSeries: no coefficients");
  rows_ = static_cast<int>(c_.front().rows());
  cols_ = static_cast<int>(c_.front().cols());
  for (const auto& m : c_)
    if (m.rows() != rows_ || m.cols() != cols_)
      throw std::invalid_argument("FirSeries: inconsistent coefficient dimensions");
  zero_ = Eigen::MatrixXd::Zero(rows_, cols_);
}

FirSeries FirSeries::delayed_identity(int n, int tap, int horizon) {
  FirSeries f(n, n, horizon);
  if (tap < 0 || tap > horizon) throw std::invalid_argument("FirSeries: tap outside horizon");
  f.coeff(tap) = Eigen::MatrixXd::Identity(n, n);
  return f;
}

const Eigen::MatrixXd& FirSeries::coeff(int t) const {
  if (t < 0) throw std::out_of_range("FirSeries::coeff: negative lag");
  if (t >= static_cast<int>(c_.size())) return zero_;
  return c_[static_cast<size_t>(t)];
}

Eigen::MatrixXd& FirSeries::coeff(int t) {
  if (t < 0 || t >= static_cast<int>(c_.size()))
    throw std::out_of_range("FirSeries::coeff: lag outside stored horizon");
  return c_[static_cast<size_t>(t)];
}

void FirSeries::resize_horizon(int horizon) {
  if (horizon < 0) throw std::invalid_argument("FirSeries: negative horizon");
  c_.resize(static_cast<size_t>(horizon) + 1, Eigen::MatrixXd::Zero(rows_, cols_));
}

void FirSeries::trim(double tol) {
  while (c_.size() > 1 && c_.back().cwiseAbs().maxCoeff() <= tol) c_.pop_back();
}

double FirSeries::max_abs() const {
  double m = 0.0;
  for (const auto& coeff : c_) m = std::max(m, coeff.cwiseAbs().maxCoeff());
  return m;
}

Eigen::MatrixXcd FirSeries::eval(std::complex<double> z) const {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rows_, cols_);
  std::complex<double> zp(1.0, 0.0);
  for (size_t t = 0; t < c_.size(); ++t) {
    acc += c_[t].cast<std::complex<double>>() * zp;
    zp /= z;
  }
  return acc;
}

Eigen::MatrixXd markov(const StateSpace& sys, int t) {
  sys.validate();
  if (t < 0) throw std::invalid_argument("markov: negative lag");
  if (t == 0) return Eigen::MatrixXd::Zero(sys.outputs(), sys.inputs());
  Eigen::MatrixXd acc = sys.B;
  for (int k = 1; k < t; ++k) acc = sys.A * acc;
  return sys.C * acc;
}

std::vector<Eigen::MatrixXd> markov_sequence(const StateSpace& sys, int count) {
  sys.validate();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<size_t>(std::max(count, 0)));
  if (count <= 0) return out;
  out.push_back(Eigen::MatrixXd::Zero(sys.outputs(), sys.inputs()));
  Eigen::MatrixXd acc = sys.B;
  for (int t = 1; t < count; ++t) {
    out.push_back(sys.C * acc);
    acc = sys.A * acc;
  }
  return out;
}

FirSeries fir_convolve(const FirSeries& f, const FirSeries& g) {
  if (f.cols() != g.rows()) throw std::invalid_argument("fir_convolve: dimension mismatch");
  FirSeries out(f.rows(), g.cols(), f.horizon() + g.horizon());
  for (int a = 0; a <= f.horizon(); ++a)
    for (int b = 0; b <= g.horizon(); ++b) out.coeff(a + b) += f.coeff(a) * g.coeff(b);
  return out;
}

FirSeries fir_add(const FirSeries& f, const FirSeries& g) {
  if (f.rows() != g.rows() || f.cols() != g.cols())
    throw std::invalid_argument("fir_add: dimension mismatch");
  FirSeries out(f.rows(), f.cols(), std::max(f.horizon(), g.horizon()));
  for (int t = 0; t <= out.horizon(); ++t) out.coeff(t) = f.coeff(t) + g.coeff(t);
  return out;
}

double h2_sq_fir(const FirSeries& f) {
  double acc = 0.0;
  for (int t = 0; t <= f.horizon(); ++t) acc += f.coeff(t).squaredNorm();
  return acc;
}

Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows())
    throw std::invalid_argument("solve_discrete_lyapunov: dimension mismatch");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Eigen::MatrixXd::Zero(0, 0);
  if (spectral_radius(a) >= 1.0)
    throw std::runtime_error("solve_discrete_lyapunov: A is not Schur stable");

  // P = A^H P A + Q via complex Schur form of A: with A = U T U^H and
  // Pbar = U^H P U the equation becomes Pbar = T^H Pbar T + Qbar, solved one
  // column at a time against lower-triangular factors.
  Eigen::ComplexSchur<Eigen::MatrixXd> schur(a);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("solve_discrete_lyapunov: Schur decomposition failed");
  const Eigen::MatrixXcd t = schur.matrixT();
  const Eigen::MatrixXcd u = schur.matrixU();
  const Eigen::MatrixXcd th = t.adjoint();
  Eigen::MatrixXcd qbar = u.adjoint() * q.cast<std::complex<double>>() * u;

  Eigen::MatrixXcd pbar = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXcd rhs = qbar.col(k);
    if (k > 0) rhs += th * (pbar.leftCols(k) * t.block(0, k, k, 1));
    // (I - T(k,k) T^H) is lower triangular with diagonal 1 - T(k,k)*conj(T(l,l)).
    Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(n, n) - t(k, k) * th;
    pbar.col(k) = lhs.triangularView<Eigen::Lower>().solve(rhs);
  }
  Eigen::MatrixXd p = (u * pbar * u.adjoint()).real();
  return 0.5 * (p + p.transpose());
}

double h2_sq_lyap(const Realization& sys) {
  sys.validate();
  const Eigen::MatrixXd p = solve_discrete_lyapunov(sys.A, sys.C.transpose() * sys.C);
  return sys.D.squaredNorm() + (sys.B.transpose() * p * sys.B).trace();
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_radius: eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Realization fir_shift_register(const FirSeries& f) {
  const int r = f.rows();
  const int c = f.cols();
  const int n = f.horizon();  // taps 1..n live in the register
  Realization sys;
  sys.A = Eigen::MatrixXd::Zero(c * n, c * n);
  sys.B = Eigen::MatrixXd::Zero(c * n, c);
  sys.C = Eigen::MatrixXd::Zero(r, c * n);
  sys.D = f.coeff(0);
  for (int k = 1; k < n; ++k)
    sys.A.block(k * c, (k - 1) * c, c, c) = Eigen::MatrixXd::Identity(c, c);
  if (n > 0) sys.B.topRows(c) = Eigen::MatrixXd::Identity(c, c);
  for (int k = 1; k <= n; ++k) sys.C.middleCols((k - 1) * c, c) = f.coeff(k);
  return sys;
}

FirSeries fir_long_division(const FirSeries& u, const FirSeries& y, int terms) {
  if (y.rows() != y.cols()) throw std::invalid_argument("fir_long_division: Y must be square");
  if (u.cols() != y.rows())
    throw std::invalid_argument("fir_long_division: U columns must match Y dimension");
  if (terms <= 0) throw std::invalid_argument("fir_long_division: need at least one term");
  Eigen::PartialPivLU<Eigen::MatrixXd> y0(y.coeff(0));
  const double y0_det_scale = y.coeff(0).cwiseAbs().maxCoeff();
  if (!(y0_det_scale > 0.0) ||
      (y.coeff(0) * y0.inverse() - Eigen::MatrixXd::Identity(y.rows(), y.rows()))
              .cwiseAbs()
              .maxCoeff() > 1e-6)
    throw std::runtime_error("fir_long_division: Y[0] is singular");

  FirSeries k(u.rows(), u.cols(), terms - 1);
  for (int t = 0; t < terms; ++t) {
    Eigen::MatrixXd acc = u.coeff(t);
    for (int s = 0; s < t; ++s) acc -= k.coeff(s) * y.coeff(t - s);
    k.coeff(t) = y0.solve(acc.transpose()).transpose();
  }
  return k;
}

Realization eliminate_unobservable(const Realization& sys, double tol) {
  sys.validate();

  // Deflates modes outside the open unit disk (up to a small guard band) that
  // fail the per-mode observability test, i.e. directions v with A v = lam v
  // and C v = 0 at tolerance. MFD register realizations of U Y^{-1} carry the
  // plant's non-stable poles as exact cancellations of this kind; they must
  // not survive into closed-loop spectra. Strictly stable hidden modes are
  // left alone: they never threaten stability, and only a per-mode test keeps
  // the certificate free of the geometric error growth that subspace
  // iterations suffer on unstable hidden dynamics. Deflation repeats until no
  // certified mode remains, which also peels short Jordan chains.
  const double radius_floor = 1.0 - 1e-6;
  Realization cur = sys;
  for (int round = 0; round <= sys.states(); ++round) {
    const int n = cur.states();
    if (n == 0) return cur;
    const double scale = std::max(1.0, std::max(cur.A.norm(), cur.C.norm()));
    Eigen::EigenSolver<Eigen::MatrixXd> es(cur.A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eliminate_unobservable: eigenvalue computation failed");

    std::vector<Eigen::VectorXd> dirs;
    std::vector<std::complex<double>> seen;
    for (int i = 0; i < n; ++i) {
      std::complex<double> lam = es.eigenvalues()(i);
      if (std::abs(lam) < radius_floor) continue;
      if (lam.imag() < 0.0) lam = std::conj(lam);  // one test per pair
      bool dup = false;
      for (const auto& s : seen)
        if (std::abs(lam - s) < 1e-7 * scale) dup = true;
      if (dup) continue;
      seen.push_back(lam);

      Eigen::MatrixXcd pbh(n + int(cur.C.rows()), n);
      pbh << cur.A.cast<std::complex<double>>() -
                 lam * Eigen::MatrixXcd::Identity(n, n),
          cur.C.cast<std::complex<double>>();
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pbh, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      for (int j = n - 1; j >= 0; --j) {
        if (sv(j) > tol * scale) break;
        const Eigen::VectorXcd v = svd.matrixV().col(j);
        dirs.push_back(v.real());
        if (v.imag().norm() > 1e-12) dirs.push_back(v.imag());
      }
    }
    if (dirs.empty()) return cur;

    Eigen::MatrixXd span(n, int(dirs.size()));
    for (size_t c = 0; c < dirs.size(); ++c) span.col(int(c)) = dirs[c];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
    const int dim = int(qr.rank());
    Eigen::MatrixXd v =
        (qr.householderQ() * Eigen::MatrixXd::Identity(n, dim)).leftCols(dim);

    // The certified span must be close to A-invariant and unobserved; if the
    // certificates conflict, keep the realization and let the caller's
    // closed-loop checks flag it.
    const Eigen::MatrixXd av = cur.A * v;
    const double defect = std::max((av - v * (v.transpose() * av)).norm(),
                                   (cur.C * v).norm());
    if (defect > 100.0 * tol * scale) return cur;

    const Eigen::MatrixXd w = complement_basis(v, n);
    Realization red;
    red.A = w.transpose() * cur.A * w;
    red.B = w.transpose() * cur.B;
    red.C = cur.C * w;
    red.D = cur.D;
    cur = red;
  }
  return cur;
}

Realization realize_controller(const FirSeries& u, const FirSeries& y, double tol) {
  if (y.rows() != y.cols()) throw std::invalid_argument("realize_controller: Y must be square");
  if (u.cols() != y.rows())
    throw std::invalid_argument("realize_controller: U columns must match Y dimension");
  const int p = y.rows();
  if ((y.coeff(0) - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-6)
    throw std::invalid_argument("realize_controller: Y[0] must be the identity");

  const double scale = 1.0 + u.max_abs() + y.max_abs();

  // If the quotient terminates, K is itself FIR and a plain register suffices.
  {
    const int probe = u.horizon() + y.horizon() + 2;
    FirSeries k = fir_long_division(u, y, probe);
    k.trim(tol * scale);
    const FirSeries back = fir_convolve(k, y);
    double err = 0.0;
    for (int t = 0; t <= std::max(back.horizon(), u.horizon()); ++t)
      err = std::max(err, (back.coeff(t) - u.coeff(t)).cwiseAbs().maxCoeff());
    if (err <= tol * scale) return fir_shift_register(k);
  }

  // Register closed with the feedback of Y's tail: internal signal
  // xi = y - (Y - I) xi, output u = U xi.
  const int span = std::max(y.horizon(), u.horizon());
  Realization reg;
  reg.A = Eigen::MatrixXd::Zero(p * span, p * span);
  reg.B = Eigen::MatrixXd::Zero(p * span, p);
  reg.C = Eigen::MatrixXd::Zero(u.rows(), p * span);
  Eigen::MatrixXd fb(p, p * span);
  for (int k = 1; k <= span; ++k) fb.middleCols((k - 1) * p, p) = -y.coeff(k);
  reg.A.topRows(p) = fb;
  for (int k = 1; k < span; ++k)
    reg.A.block(k * p, (k - 1) * p, p, p) = Eigen::MatrixXd::Identity(p, p);
  reg.B.topRows(p) = Eigen::MatrixXd::Identity(p, p);
  reg.D = u.coeff(0);
  reg.C = u.coeff(0) * fb;
  for (int k = 1; k <= span; ++k) reg.C.middleCols((k - 1) * p, p) += u.coeff(k);

  // The register carries every zero of det Y as a mode; the ones cancelled in
  // U Y^{-1} are unobservable here and must not pollute closed-loop spectra.
  return eliminate_unobservable(reg, 1e-8);
}

ClosedLoop closed_loop(const StateSpace& plant, const Realization& k, double margin) {
  plant.validate();
  k.validate();
  if (k.inputs() != plant.outputs() || k.outputs() != plant.inputs())
    throw std::invalid_argument("closed_loop: controller dimensions must mirror the plant");
  const int n = plant.states();
  const int nk = k.states();
  ClosedLoop cl;
  cl.a_cl.resize(n + nk, n + nk);
  cl.a_cl.topLeftCorner(n, n) = plant.A + plant.B * k.D * plant.C;
  cl.a_cl.topRightCorner(n, nk) = plant.B * k.C;
  cl.a_cl.bottomLeftCorner(nk, n) = k.B * plant.C;
  cl.a_cl.bottomRightCorner(nk, nk) = k.A;
  cl.radius = spectral_radius(cl.a_cl);
  cl.stable = cl.radius < 1.0 - margin;
  return cl;
}

void assert_no_hidden_unstable_modes(const StateSpace& sys, double tol) {
  sys.validate();
  const int n = sys.states();
  if (n == 0) return;
  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("assert_no_hidden_unstable_modes: eigenvalue computation failed");
  for (int i = 0; i < n; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    if (std::abs(lambda) < 1.0) continue;
    Eigen::MatrixXcd ctrl(n, n + sys.inputs());
    ctrl << sys.A.cast<std::complex<double>>() - lambda * Eigen::MatrixXcd::Identity(n, n),
        sys.B.cast<std::complex<double>>();
    if (svd_rank_complex(ctrl, tol) < n)
      throw std::runtime_error(
          "realization has an uncontrollable unstable mode at |z| = " +
          std::to_string(std::abs(lambda)));
    Eigen::MatrixXcd obs(n + sys.outputs(), n);
    obs << sys.A.cast<std::complex<double>>() - lambda * Eigen::MatrixXcd::Identity(n, n),
        sys.C.cast<std::complex<double>>();
    if (svd_rank_complex(obs, tol) < n)
      throw std::runtime_error(
          "realization has an unobservable unstable mode at |z| = " +
          std::to_string(std::abs(lambda)));
  }
}

}  // namespace sisyn
