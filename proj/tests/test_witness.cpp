#include <Eigen/Dense>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "sisyn/invariance.hpp"
#include "sisyn/witness.hpp"

using namespace sisyn;

namespace {

Pattern fix_s() { return Pattern::from_rows({"10000", "11000", "01100", "01110", "01111"}); }
Pattern fix_s2() { return Pattern::from_rows({"00000", "01000", "01100", "01110", "01111"}); }
Pattern fix_rs() { return Pattern::from_rows({"10000", "01000", "01100", "01110", "01111"}); }
Pattern fix_rs2() { return Pattern::from_rows({"11111", "01000", "01100", "01110", "01111"}); }

// Strictly diagonally dominant draw on Sparse(R); always invertible.
Eigen::MatrixXd dominant_on(const Pattern& r, std::mt19937_64& rng) {
  const int p = r.rows();
  std::uniform_real_distribution<double> off(-0.15, 0.15);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      if (i == j)
        x(i, j) = 2.0;
      else if (r.at(i, j))
        x(i, j) = off(rng);
    }
  return x;
}

}  // namespace

TEST_SUITE_BEGIN("witness");

TEST_CASE("full_inverse_witness diagonal case") {
  Eigen::MatrixXd x = full_inverse_witness(Pattern::identity(4), 7);
  CHECK(struct_of(x) == Pattern::identity(4));
  CHECK(struct_of(x.inverse()) == Pattern::identity(4));
}

TEST_CASE("full_inverse_witness on the example R") {
  Eigen::MatrixXd x = full_inverse_witness(fix_rs(), 0xC0FFEE);
  CHECK(leq(struct_of(x), fix_rs()));
  // (R*_S)^4 = R*_S, so the inverse must fill exactly R*_S.
  CHECK(struct_of(x.inverse()) == fix_rs());
}

TEST_CASE("full_inverse_witness achieves the boolean power on random R") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Pattern r = oracle::random_r_pattern(4, 0.35, rng);
    Eigen::MatrixXd x = full_inverse_witness(r, rng());
    CHECK(leq(struct_of(x), r));
    Eigen::MatrixXd xinv = x.inverse();
    CHECK((x * xinv - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(struct_of(xinv) == bool_power(r, 3));
  }
}

TEST_CASE("full_inverse_witness is deterministic per seed") {
  Pattern r = fix_rs2();
  Eigen::MatrixXd a = full_inverse_witness(r, 42);
  Eigen::MatrixXd b = full_inverse_witness(r, 42);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("full_inverse_witness rejects inadmissible R") {
  CHECK_THROWS_AS(full_inverse_witness(Pattern::ones(2, 3), 1), std::invalid_argument);
  Pattern no_diag = Pattern::ones(3, 3);
  no_diag.set(1, 1, false);
  CHECK_THROWS_AS(full_inverse_witness(no_diag, 1), std::invalid_argument);
}

TEST_CASE("lemma A1 upper bound holds for arbitrary sparse inverses") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + int(rng() % 4);
    Pattern r = oracle::random_r_pattern(p, 0.4, rng);
    Eigen::MatrixXd x = dominant_on(r, rng);
    CHECK(leq(struct_of(x.inverse()), bool_power(r, p - 1)));
  }
}

TEST_CASE("product_witness trivial cases") {
  Eigen::MatrixXd z0 = product_witness(Pattern::zero(2, 3), Eigen::MatrixXd::Random(3, 3), 5);
  CHECK(z0.cwiseAbs().maxCoeff() == 0.0);

  Pattern t = Pattern::ones(3, 4);
  Eigen::MatrixXd z = product_witness(t, Eigen::MatrixXd::Identity(4, 4), 5);
  CHECK(struct_of(z) == t);
  CHECK(struct_of(z * Eigen::MatrixXd::Identity(4, 4)) == t);
}

TEST_CASE("product_witness achieves the boolean product") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    Pattern t = oracle::random_pattern(3, 4, 0.45, rng);
    Pattern rw = oracle::random_pattern(4, 4, 0.45, rng);
    Eigen::MatrixXd w = oracle::random_on_pattern(rw, rng);
    Eigen::MatrixXd z = product_witness(t, w, rng());
    CHECK(leq(struct_of(z), t));
    CHECK(struct_of(z * w) == bool_product(t, struct_of(w)));
  }
}

TEST_CASE("product_witness dimension check") {
  CHECK_THROWS_AS(product_witness(Pattern::ones(2, 3), Eigen::MatrixXd::Identity(4, 4), 1),
                  std::invalid_argument);
}

TEST_CASE("si_counterexample on failing triples") {
  // S with the full R is not sparsity invariant; the pair must prove it.
  CounterexamplePair pair = si_counterexample(fix_s(), Pattern::ones(5, 5), fix_s(), 99);
  CHECK(leq(struct_of(pair.y), fix_s()));
  CHECK(leq(struct_of(pair.x), Pattern::ones(5, 5)));
  Eigen::MatrixXd k = pair.y * pair.x.inverse();
  CHECK(struct_of(k) == pair.achieved);
  CHECK_FALSE(leq(pair.achieved, fix_s()));
}

TEST_CASE("si_counterexample with diagonal R needs a dense Y") {
  Pattern s = fix_s();
  CounterexamplePair pair = si_counterexample(Pattern::ones(5, 5), Pattern::identity(5), s, 7);
  CHECK(struct_of(pair.x) == Pattern::identity(5));
  CHECK_FALSE(leq(pair.achieved, s));
}

TEST_CASE("si_counterexample rejects triples where SI holds") {
  CHECK_THROWS_AS(si_counterexample(fix_s2(), fix_rs2(), fix_s2(), 1), std::invalid_argument);
  CHECK_THROWS_AS(si_counterexample(fix_s(), fix_rs(), fix_s(), 1), std::invalid_argument);
}

TEST_CASE("si_counterexample succeeds across a seed suite") {
  std::mt19937_64 rng(34);
  int failing_triples = 0;
  while (failing_triples < 8) {
    const int m = 2 + int(rng() % 3);
    const int p = 2 + int(rng() % 3);
    Pattern t = oracle::random_pattern(m, p, 0.5, rng);
    Pattern r = oracle::random_r_pattern(p, 0.4, rng);
    Pattern s = oracle::random_pattern(m, p, 0.5, rng);
    if (si_check(t, r, s).holds) continue;
    ++failing_triples;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      CounterexamplePair pair = si_counterexample(t, r, s, seed);
      CHECK(leq(struct_of(pair.y), t));
      CHECK(leq(struct_of(pair.x), r));
      CHECK_FALSE(leq(pair.achieved, s));
      CHECK(struct_of(pair.y * pair.x.inverse()) == pair.achieved);
    }
  }
}

TEST_CASE("theorem 1 forward direction, sampled") {
  std::mt19937_64 rng(35);
  int holding_triples = 0;
  while (holding_triples < 10) {
    const int m = 2 + int(rng() % 3);
    const int p = 2 + int(rng() % 3);
    Pattern t = oracle::random_pattern(m, p, 0.3, rng);
    Pattern r = oracle::random_r_pattern(p, 0.25, rng);
    Pattern s = bool_sum(t, oracle::random_pattern(m, p, 0.5, rng));
    if (!si_check(t, r, s).holds) continue;
    ++holding_triples;
    for (int sample = 0; sample < 20; ++sample) {
      Eigen::MatrixXd y = oracle::random_on_pattern(t, rng);
      Eigen::MatrixXd x = dominant_on(r, rng);
      CHECK(leq(struct_of(y * x.inverse()), s));
    }
  }
}

TEST_SUITE_END();
