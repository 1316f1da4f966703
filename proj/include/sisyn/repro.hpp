#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sisyn/synthesis.hpp"

namespace sisyn {

struct Example1Row {
  int horizon = 0;
  bool feasible = false;
  double cost_h2 = 0.0;
  double delta = -1.0;  ///< |cost - previous cost|; -1 for the first row
  double feas_residual = 0.0;
};

struct Example1Repro {
  std::string variant;
  std::vector<Example1Row> rows;
  bool ok = false;
  double final_cost = 0.0;
  std::string message;
};

/// Reruns the discrete-time example1 experiment on a pinned horizon ladder.
/// Variants: "si" (T = S, R from Algorithm 1), "qi-subset" (nearest QI
/// subset imposed on U alone; expected infeasible at every horizon),
/// "superset" (nearest QI superset imposed on U alone; lower bound).
/// ok reflects the acceptance band: cost within 0.01 of 6.7278 / 6.7268 with
/// final sweep delta below 1e-3, or blanket infeasibility for "qi-subset".
Example1Repro repro_example1(const std::string& variant);

struct LqrRepro {
  int size = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  bool feasible = false;
  double cost_sq = 0.0;
  double k0_error = 0.0;      ///< max |K[0] + A|
  double k_tail_error = 0.0;  ///< max over t >= 1 of max |K[t]|
  std::string message;
};

/// Sparse LQR reproduction: strongly connected A of the given size,
/// S = Struct(A), Gamma = plant. The optimum is the static K = -A with
/// squared cost n; ok requires |cost_sq - n| <= 1e-6 and K within 1e-6 of -A.
LqrRepro repro_lqr(int size, std::uint64_t seed);

}  // namespace sisyn
