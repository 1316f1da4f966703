#include "sisyn/witness.hpp"

#include <Eigen/Dense>
#include <random>
#include <stdexcept>

#include "sisyn/invariance.hpp"

namespace sisyn {

namespace {

double draw_alpha(std::mt19937_64& rng, const WitnessOptions& opts) {
  std::uniform_real_distribution<double> mag(opts.alpha_min, opts.alpha_max);
  const double a = mag(rng);
  return (rng() & 1) ? a : -a;
}

double condition_estimate(const Eigen::MatrixXd& x) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return svd.singularValues().maxCoeff() / smin;
}

// One full pass over the support of R. Returns false when no admissible alpha
// was found for some entry.
bool apply_update_sweep(Eigen::MatrixXd& x, const Pattern& r, std::mt19937_64& rng,
                        const WitnessOptions& opts) {
  const int p = r.rows();
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (i == j || !r.at(i, j)) continue;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
      if (!lu.isInvertible()) return false;
      const Eigen::MatrixXd xinv = lu.inverse();
      const double scale = 1.0 + xinv.cwiseAbs().maxCoeff();

      bool placed = false;
      for (int attempt = 0; attempt < opts.max_alpha_retries; ++attempt) {
        const double alpha = draw_alpha(rng, opts);
        // Update X += alpha e_i e_j^T. Row i of the new inverse becomes
        //   Xinv(i,:) - (alpha Xinv(i,i) / (1 + alpha Xinv(j,i))) Xinv(j,:),
        // so reject alpha when the denominator nearly vanishes or when a
        // union-support entry of the updated row would drop below the margin.
        if (std::abs(1.0 + alpha * xinv(j, i)) < opts.margin) continue;
        bool ok = true;
        for (int k = 0; k < p && ok; ++k) {
          if (std::abs(xinv(i, k)) <= opts.struct_tol * scale &&
              std::abs(xinv(j, k)) <= opts.struct_tol * scale)
            continue;
          const double updated =
              xinv(i, k) + alpha * (xinv(i, k) * xinv(j, i) - xinv(i, i) * xinv(j, k));
          if (std::abs(updated) < opts.margin) ok = false;
        }
        if (!ok) continue;
        x(i, j) += alpha;
        placed = true;
        break;
      }
      if (!placed) return false;
    }
  }
  return true;
}

}  // namespace

Eigen::MatrixXd full_inverse_witness(const Pattern& r, std::uint64_t seed,
                                     const WitnessOptions& opts) {
  if (r.rows() != r.cols()) throw std::invalid_argument("full_inverse_witness: R must be square");
  const int p = r.rows();
  for (int i = 0; i < p; ++i)
    if (!r.at(i, i))
      throw std::invalid_argument("full_inverse_witness: R must contain the identity");

  const Pattern target = bool_power(r, p > 1 ? p - 1 : 1);
  std::mt19937_64 rng(seed);

  for (int rebuild = 0; rebuild < opts.max_rebuilds; ++rebuild) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(p, p);
    bool ok = true;
    // The inverse pattern grows monotonically across sweeps and reaches its
    // fixed point after at most p - 1 of them.
    const int sweeps = std::max(1, p - 1) + 1;
    for (int s = 0; s < sweeps && ok; ++s) {
      ok = apply_update_sweep(x, r, rng, opts);
      if (!ok) break;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
      if (!lu.isInvertible()) {
        ok = false;
        break;
      }
      if (struct_of(lu.inverse(), opts.struct_tol) == target) break;
    }
    if (!ok) continue;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
    if (!lu.isInvertible()) continue;
    if (struct_of(lu.inverse(), opts.struct_tol) != target) continue;
    if (condition_estimate(x) > opts.cond_bound) continue;
    return x;
  }
  throw std::runtime_error(
      "full_inverse_witness: failed to reach the target inverse pattern within the retry "
      "budget");
}

Eigen::MatrixXd product_witness(const Pattern& t, const Eigen::MatrixXd& w, std::uint64_t seed,
                                const WitnessOptions& opts) {
  if (t.cols() != w.rows())
    throw std::invalid_argument("product_witness: inner dimensions of T and W must agree");
  const Pattern rw = struct_of(w, opts.struct_tol);
  const Pattern target = bool_product(t, rw);
  std::mt19937_64 rng(seed);

  for (int rebuild = 0; rebuild < opts.max_rebuilds; ++rebuild) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(t.rows(), t.cols());
    bool failed = false;
    const long max_steps = 4 * cardinality(target) + 8;
    for (long step = 0; step < max_steps; ++step) {
      const Eigen::MatrixXd prod = z * w;
      const Pattern achieved = struct_of(prod, opts.struct_tol);
      if (achieved == target) return z;

      // First product entry that should be nonzero but is not.
      int bi = -1, bj = -1;
      for (int i = 0; i < target.rows() && bi < 0; ++i)
        for (int j = 0; j < target.cols(); ++j)
          if (target.at(i, j) && !achieved.at(i, j)) {
            bi = i;
            bj = j;
            break;
          }
      if (bi < 0) {
        // achieved has spurious entries beyond the target; submultiplicativity
        // rules this out, so treat it as a numerical degeneracy and restart.
        failed = true;
        break;
      }
      int bk = -1;
      for (int k = 0; k < t.cols(); ++k)
        if (t.at(bi, k) && rw.at(k, bj)) {
          bk = k;
          break;
        }
      if (bk < 0) {
        failed = true;  // cannot happen for a correct boolean product
        break;
      }

      const double scale = 1.0 + prod.cwiseAbs().maxCoeff() + w.cwiseAbs().maxCoeff();
      bool placed = false;
      for (int attempt = 0; attempt < opts.max_alpha_retries; ++attempt) {
        const double alpha = draw_alpha(rng, opts);
        // Bump Z(bi,bk) += alpha; row bi of the product moves by alpha * W(bk,:).
        // Keep every populated entry of that row above the margin.
        bool ok = true;
        for (int jj = 0; jj < target.cols() && ok; ++jj) {
          if (std::abs(prod(bi, jj)) <= opts.struct_tol * scale &&
              std::abs(w(bk, jj)) <= opts.struct_tol * scale)
            continue;
          if (std::abs(prod(bi, jj) + alpha * w(bk, jj)) < opts.margin) ok = false;
        }
        if (!ok) continue;
        z(bi, bk) += alpha;
        placed = true;
        break;
      }
      if (!placed) {
        failed = true;
        break;
      }
    }
    if (!failed) {
      const Pattern achieved = struct_of(z * w, opts.struct_tol);
      if (achieved == target) return z;
    }
  }
  throw std::runtime_error(
      "product_witness: failed to reach the target product pattern within the retry budget");
}

CounterexamplePair si_counterexample(const Pattern& t, const Pattern& r, const Pattern& s,
                                     std::uint64_t seed, const WitnessOptions& opts) {
  const SiVerdict verdict = si_check(t, r, s);
  if (verdict.holds)
    throw std::invalid_argument(
        "si_counterexample: sparsity invariance holds for (T, R, S); every Y X^{-1} stays in "
        "Sparse(S) and no counterexample exists");

  const Eigen::MatrixXd x = full_inverse_witness(r, seed, opts);
  const Eigen::MatrixXd xinv = x.inverse();
  // Decorrelate the second stage while keeping the result seed-deterministic.
  const std::uint64_t seed2 = seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull;
  const Eigen::MatrixXd y = product_witness(t, xinv, seed2, opts);

  CounterexamplePair pair;
  pair.y = y;
  pair.x = x;
  pair.achieved = struct_of(y * xinv, opts.struct_tol);
  if (leq(pair.achieved, s))
    throw std::runtime_error(
        "si_counterexample: constructed pair failed to escape Sparse(S); numerical degeneracy");
  return pair;
}

}  // namespace sisyn
