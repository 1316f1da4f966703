#pragma once

#include <cstdint>

#include "sisyn/lti.hpp"
#include "sisyn/pattern.hpp"

namespace sisyn {

/// The 5 x 5 unstable discrete-time plant used by example1: entries
/// u(z) = 0.1 / (z - 0.5) and v(z) = 1 / (z - 2) arranged as
///   [u 0 0 0 0; u v 0 0 0; u v u 0 0; u v u u 0; u v u u v].
/// Realized with one state per column (all entries of a column share a pole),
/// which is minimal: A = diag(0.5, 2, 0.5, 0.5, 2), B = I.
StateSpace example1_plant();

/// Target controller sparsity of example1.
Pattern example1_s();

/// Plant pattern Struct(G): full lower triangle.
Pattern example1_delta();

/// State-feedback plant x+ = A x + u + w, y = x, i.e. G(z) = (zI - A)^{-1}.
StateSpace lqr_plant(const Eigen::MatrixXd& a);

/// Directed ring 0 -> 1 -> ... -> n-1 -> 0 plus n extra seeded off-ring
/// entries; strongly connected by construction, entry magnitudes in
/// [0.3, 1.0] with random signs.
Eigen::MatrixXd random_strongly_connected(int n, std::uint64_t seed);

}  // namespace sisyn
