#include "sisyn/builtin.hpp"

#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sisyn {

StateSpace example1_plant() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  a.diagonal() << 0.5, 2.0, 0.5, 0.5, 2.0;
  const double u = 0.1;
  const double v = 1.0;
  Eigen::MatrixXd c(5, 5);
  c << u, 0, 0, 0, 0,  //
      u, v, 0, 0, 0,   //
      u, v, u, 0, 0,   //
      u, v, u, u, 0,   //
      u, v, u, u, v;
  return StateSpace{a, Eigen::MatrixXd::Identity(5, 5), c};
}

Pattern example1_s() {
  return Pattern::from_rows({"10000", "11000", "01100", "01110", "01111"});
}

Pattern example1_delta() {
  return Pattern::from_rows({"10000", "11000", "11100", "11110", "11111"});
}

StateSpace lqr_plant(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw std::invalid_argument("lqr_plant: A must be square and nonempty");
  const int n = static_cast<int>(a.rows());
  return StateSpace{a, Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n)};
}

Eigen::MatrixXd random_strongly_connected(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_strongly_connected: need n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.3, 1.0);
  std::uniform_int_distribution<int> pos(0, n - 1);
  auto draw = [&] { return (rng() & 1u) ? mag(rng) : -mag(rng); };

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = draw();
  int placed = 0;
  while (placed < n) {
    const int i = pos(rng);
    const int j = pos(rng);
    if (a(i, j) != 0.0) continue;
    a(i, j) = draw();
    ++placed;
  }
  return a;
}

}  // namespace sisyn
