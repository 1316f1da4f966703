#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "sisyn/pattern.hpp"

namespace sisyn {

/// Tuning knobs shared by the witness constructors. Defaults match the CLI.
struct WitnessOptions {
  double alpha_min = 0.5;      ///< |alpha| is drawn uniformly from [alpha_min, alpha_max]
  double alpha_max = 1.5;
  double margin = 1e-6;        ///< nondegeneracy margin on update denominators/entries
  int max_alpha_retries = 100; ///< redraws of alpha per update before giving up
  int max_rebuilds = 20;       ///< full restarts before reporting failure
  double cond_bound = 1e8;     ///< reject witnesses with larger condition estimates
  double struct_tol = 1e-9;    ///< tolerance for struct_of on the result
};

/// Builds an invertible X with struct(X) <= R and struct(X^{-1}) equal to
/// bool_power(R, p-1), the densest inverse pattern reachable from R.
/// Starts from the identity and applies rank-one updates X += alpha e_i e_j^T
/// over the support of R, drawing alpha so that no existing inverse entry is
/// cancelled (Sherman-Morrison row update nondegeneracy).
/// Requires R square with R >= I_p. Deterministic for a fixed seed.
Eigen::MatrixXd full_inverse_witness(const Pattern& r, std::uint64_t seed,
                                     const WitnessOptions& opts = {});

/// Builds Z with struct(Z) <= T and struct(Z * W) = bool_product(T, struct_of(W))
/// by bumping single entries of Z until every reachable product entry is
/// nonzero. Deterministic for a fixed seed.
Eigen::MatrixXd product_witness(const Pattern& t, const Eigen::MatrixXd& w, std::uint64_t seed,
                                const WitnessOptions& opts = {});

/// A concrete (Y, X) pair disproving containment: Y in Sparse(T), X invertible
/// in Sparse(R), and struct(Y * X^{-1}) = achieved with achieved not <= S.
struct CounterexamplePair {
  Eigen::MatrixXd y;
  Eigen::MatrixXd x;
  Pattern achieved;
};

/// Constructs a counterexample for a triple where sparsity invariance fails.
/// Throws std::invalid_argument when si_check(T, R, S) holds (no
/// counterexample exists) or when R is inadmissible.
CounterexamplePair si_counterexample(const Pattern& t, const Pattern& r, const Pattern& s,
                                     std::uint64_t seed, const WitnessOptions& opts = {});

}  // namespace sisyn
