#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sisyn/pattern.hpp"

namespace sisyn {

/// Outcome of the sparsity-invariance test for a triple (T, R, S).
struct SiVerdict {
  bool holds = false;
  /// When holds is false: indices (i, j, k) with T(i,j) = 1, R^{p-1}(j,k) = 1
  /// and S(i,k) = 0, i.e. a product path that escapes S.
  std::array<int, 3> violating_triple{-1, -1, -1};
};

/// Largest pattern R (entrywise) with R >= I_p such that struct(T * X^{-1})
/// stays inside Sparse(T) for every invertible X in Sparse(R). Equivalently
/// the unique maximal solution of bool_product(T, R) <= T over R >= I_p.
/// T is m x p; the result is p x p.
Pattern r_star(const Pattern& t);

/// Tests whether every K = Y * X^{-1} with Y in Sparse(T) and invertible
/// X in Sparse(R) lies in Sparse(S): holds iff T <= S and T * R^{p-1} <= S.
/// Requires R square with R >= I_p.
SiVerdict si_check(const Pattern& t, const Pattern& r, const Pattern& s);

/// Quadratic-invariance test: S * delta * S <= S, where delta is the plant
/// pattern (delta maps controller outputs back to its inputs, so S is m x p
/// and delta is p x m).
bool qi_check(const Pattern& s, const Pattern& delta);

/// Equivalent QI test routed through r_star: holds iff
/// I_p + bool_product(delta, S) <= r_star(S).
bool qi_check_via_rstar(const Pattern& s, const Pattern& delta);

/// Smallest QI pattern containing S: least fixed point of
/// S <- S + S * delta * S.
Pattern qi_superset(const Pattern& s, const Pattern& delta);

/// Nearest QI subsets of S: enumerates T <= S by increasing removal count
/// d = 0, 1, ..., max_dist and returns every QI pattern in the first distance
/// class that contains one, sorted lexicographically by flattened entries.
/// Returns an empty list when no QI subset exists within max_dist.
/// Throws when the number of enumerated candidates would exceed `budget`.
std::vector<Pattern> qi_subsets(const Pattern& s, const Pattern& delta, int max_dist,
                                std::uint64_t budget = 1000000);

/// All square patterns R >= I_p with bool_product(T, bool_power(R, p-1)) <= T,
/// enumerated over the 2^(p^2 - p) off-diagonal supports. Restricted to
/// p <= 4; larger sizes are rejected.
std::vector<Pattern> feasible_r_set(const Pattern& t);

}  // namespace sisyn
