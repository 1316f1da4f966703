#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sisyn/invariance.hpp"

using namespace sisyn;

namespace {

// Frozen 5x5 fixtures from the worked examples.
Pattern fix_s() { return Pattern::from_rows({"10000", "11000", "01100", "01110", "01111"}); }
Pattern fix_rs() { return Pattern::from_rows({"10000", "01000", "01100", "01110", "01111"}); }
Pattern fix_s2() { return Pattern::from_rows({"00000", "01000", "01100", "01110", "01111"}); }
Pattern fix_rs2() { return Pattern::from_rows({"11111", "01000", "01100", "01110", "01111"}); }

Pattern lower_triangular(int n) {
  Pattern p(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) p.set(i, j, true);
  return p;
}

Pattern fix_delta() { return lower_triangular(5); }

bool lex_sorted(const std::vector<Pattern>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i].flat() < v[i - 1].flat()) return false;
  return true;
}

// First nonempty distance class of QI subsets, by direct enumeration over the
// support of S.
std::vector<Pattern> qi_subsets_naive(const Pattern& s, const Pattern& delta, int max_dist) {
  std::vector<std::pair<int, int>> support;
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 0; j < s.cols(); ++j)
      if (s.at(i, j)) support.emplace_back(i, j);
  const int card = int(support.size());
  for (int d = 0; d <= std::min(max_dist, card); ++d) {
    std::vector<Pattern> found;
    std::vector<int> pick(card, 0);
    std::fill(pick.begin(), pick.begin() + d, 1);
    std::sort(pick.begin(), pick.end());
    do {
      Pattern t = s;
      for (int b = 0; b < card; ++b)
        if (pick[b]) t.set(support[b].first, support[b].second, false);
      if (oracle::qi_naive(t, delta)) found.push_back(t);
    } while (std::next_permutation(pick.begin(), pick.end()));
    if (!found.empty()) {
      std::sort(found.begin(), found.end(),
                [](const Pattern& a, const Pattern& b) { return a.flat() < b.flat(); });
      found.erase(std::unique(found.begin(), found.end()), found.end());
      return found;
    }
  }
  return {};
}

}  // namespace

TEST_SUITE_BEGIN("invariance");

TEST_CASE("r_star reproduces the worked examples") {
  CHECK(r_star(fix_s()) == fix_rs());
  CHECK(r_star(fix_s2()) == fix_rs2());
  CHECK(r_star(Pattern::ones(3, 4)) == Pattern::ones(4, 4));
  CHECK(r_star(Pattern::zero(3, 4)) == Pattern::ones(4, 4));
  CHECK(r_star(Pattern::identity(3)) == Pattern::identity(3));
}

TEST_CASE("r_star output is feasible, idempotent and maximal") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 120; ++trial) {
    const int m = 1 + int(rng() % 4);
    const int p = 1 + int(rng() % 4);
    Pattern t = oracle::random_pattern(m, p, 0.45, rng);
    Pattern r = r_star(t);
    CHECK(leq(Pattern::identity(p), r));
    CHECK(leq(oracle::bool_product(t, oracle::bool_power(r, p - 1)), t));
    CHECK(bool_power(r, p - 1) == r);
  }
  // Exhaustive maximality for m <= 2, p <= 3: no feasible R escapes r_star.
  for (int m = 1; m <= 2; ++m)
    for (int p = 1; p <= 3; ++p)
      for (const Pattern& t : oracle::all_patterns(m, p)) {
        Pattern r = r_star(t);
        CHECK(r == oracle::r_star_exhaustive(t));
        for (const Pattern& cand : oracle::all_r_patterns(p))
          if (oracle::r_feasible_for(t, cand)) CHECK(leq(cand, r));
      }
}

TEST_CASE("r_star maximality on sampled 4-column patterns") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 25; ++trial) {
    Pattern t = oracle::random_pattern(3, 4, 0.5, rng);
    Pattern r = r_star(t);
    for (const Pattern& cand : oracle::all_r_patterns(4))
      if (oracle::r_feasible_for(t, cand)) CHECK(leq(cand, r));
  }
}

TEST_CASE("si_check fixtures") {
  CHECK(si_check(fix_s(), fix_rs(), fix_s()).holds);
  CHECK(si_check(fix_s2(), fix_rs2(), fix_s2()).holds);

  SiVerdict v = si_check(fix_s(), Pattern::ones(5, 5), fix_s());
  CHECK_FALSE(v.holds);
  const auto [i, j, k] = v.violating_triple;
  REQUIRE(i >= 0);
  CHECK(fix_s().at(i, j));
  CHECK_FALSE(fix_s().at(i, k));  // the product path escapes S

  SiVerdict ok = si_check(fix_s(), fix_rs(), fix_s());
  CHECK(ok.violating_triple == std::array<int, 3>{-1, -1, -1});
}

TEST_CASE("si_check rejects bad input") {
  Pattern r_no_diag = Pattern::zero(5, 5);
  CHECK_THROWS_AS(si_check(fix_s(), r_no_diag, fix_s()), std::invalid_argument);
  CHECK_THROWS_AS(si_check(fix_s(), Pattern::ones(4, 4), fix_s()), std::invalid_argument);
  CHECK_THROWS_AS(si_check(fix_s(), fix_rs(), Pattern::ones(4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(si_check(fix_s(), Pattern::ones(4, 5), fix_s()), std::invalid_argument);
}

TEST_CASE("si_check agrees with the direct boolean test") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + int(rng() % 4);
    const int p = 1 + int(rng() % 4);
    Pattern t = oracle::random_pattern(m, p, 0.4, rng);
    Pattern r = oracle::random_r_pattern(p, 0.3, rng);
    Pattern s = oracle::random_pattern(m, p, 0.6, rng);
    const bool expect =
        leq(t, s) && leq(oracle::bool_product(t, oracle::bool_power(r, p - 1)), s);
    SiVerdict v = si_check(t, r, s);
    CHECK(v.holds == expect);
    if (!v.holds) {
      const auto [i, j, k] = v.violating_triple;
      REQUIRE(i >= 0);
      CHECK(t.at(i, j));
      CHECK(oracle::bool_power(r, p - 1).at(j, k));
      CHECK_FALSE(s.at(i, k));
    }
  }
}

TEST_CASE("qi_check fixtures") {
  CHECK_FALSE(qi_check(fix_s(), fix_delta()));
  CHECK(qi_check(fix_s2(), fix_delta()));
  CHECK(qi_check(Pattern::ones(5, 5), fix_delta()));
  CHECK_THROWS_AS(qi_check(fix_s(), Pattern::ones(4, 5)), std::invalid_argument);
}

TEST_CASE("theorem 3 equivalence, exhaustive small sizes") {
  for (int m = 1; m <= 3; ++m)
    for (int p = 1; p <= 3; ++p)
      for (const Pattern& s : oracle::all_patterns(m, p))
        for (const Pattern& delta : oracle::all_patterns(p, m)) {
          const bool qi = qi_check(s, delta);
          CHECK(qi == oracle::qi_naive(s, delta));
          CHECK(qi == qi_check_via_rstar(s, delta));
        }
}

TEST_CASE("theorem 3 equivalence, random larger sizes") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + int(rng() % 6);
    const int p = 1 + int(rng() % 6);
    Pattern s = oracle::random_pattern(m, p, 0.4, rng);
    Pattern delta = oracle::random_pattern(p, m, 0.4, rng);
    CHECK(qi_check(s, delta) == qi_check_via_rstar(s, delta));
  }
}

TEST_CASE("theorem 3 fixtures") {
  // R*_{S2} >= I + Delta S2 holds; the analogous bound fails for S.
  Pattern claim = bool_sum(Pattern::identity(5), bool_product(fix_delta(), fix_s2()));
  CHECK(claim == Pattern::from_rows({"10000", "01000", "01100", "01110", "01111"}));
  CHECK(leq(claim, fix_rs2()));
  CHECK_FALSE(leq(bool_sum(Pattern::identity(5), bool_product(fix_delta(), fix_s())), fix_rs()));
}

TEST_CASE("qi_superset fixtures") {
  CHECK(qi_superset(fix_s(), fix_delta()) == lower_triangular(5));
  CHECK(qi_superset(fix_s2(), fix_delta()) == fix_s2());
  CHECK(qi_superset(Pattern::zero(5, 5), fix_delta()) == Pattern::zero(5, 5));
}

TEST_CASE("qi_superset is the least QI superset") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + int(rng() % 2);
    const int p = 2 + int(rng() % 2);
    Pattern s = oracle::random_pattern(m, p, 0.35, rng);
    Pattern delta = oracle::random_pattern(p, m, 0.35, rng);
    Pattern c = qi_superset(s, delta);
    CHECK(leq(s, c));
    CHECK(oracle::qi_naive(c, delta));
    // Every QI superset of S dominates the closure.
    for (const Pattern& q : oracle::all_patterns(m, p))
      if (leq(s, q) && oracle::qi_naive(q, delta)) CHECK(leq(c, q));
  }
}

TEST_CASE("qi_subsets fixtures") {
  std::vector<Pattern> two = qi_subsets(fix_s(), fix_delta(), 2);
  REQUIRE(two.size() == 1);
  CHECK(two[0] == fix_s2());

  CHECK(qi_subsets(fix_s(), fix_delta(), 1).empty());

  std::vector<Pattern> zero = qi_subsets(fix_s2(), fix_delta(), 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == fix_s2());
}

TEST_CASE("qi_subsets returns the first nonempty distance class, sorted") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 1 + int(rng() % 3);
    const int p = 1 + int(rng() % 3);
    Pattern s = oracle::random_pattern(m, p, 0.6, rng);
    Pattern delta = oracle::random_pattern(p, m, 0.5, rng);
    const int max_dist = int(rng() % 4);
    std::vector<Pattern> got = qi_subsets(s, delta, max_dist);
    std::vector<Pattern> want = qi_subsets_naive(s, delta, max_dist);
    CHECK(lex_sorted(got));
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == want[i]);
      CHECK(leq(got[i], s));
      CHECK(qi_check(got[i], delta));
    }
  }
}

TEST_CASE("qi_subsets budget cap") {
  // Searching to distance 12 on the 12-entry fixture enumerates thousands of
  // candidates; a budget of 10 must trip the guard.
  CHECK_THROWS_AS(qi_subsets(fix_s(), fix_delta(), 12, 10), std::runtime_error);
  CHECK_THROWS_AS(qi_subsets(fix_s(), fix_delta(), -1), std::invalid_argument);
}

TEST_CASE("feasible_r_set small cases") {
  std::vector<Pattern> all2 = feasible_r_set(Pattern::ones(3, 2));
  CHECK(all2.size() == 4);  // constraint vacuous: every R >= I_2 qualifies

  std::vector<Pattern> only_id = feasible_r_set(Pattern::identity(2));
  REQUIRE(only_id.size() == 1);
  CHECK(only_id[0] == Pattern::identity(2));

  CHECK_THROWS_AS(feasible_r_set(Pattern::ones(2, 5)), std::invalid_argument);
}

TEST_CASE("feasible_r_set matches per-candidate recheck and theorem 2") {
  Pattern t = Pattern::from_rows({"100", "110", "011"});  // leading 3x3 block of S
  std::vector<Pattern> set = feasible_r_set(t);
  size_t expect = 0;
  for (const Pattern& cand : oracle::all_r_patterns(3))
    if (oracle::r_feasible_for(t, cand)) ++expect;
  CHECK(set.size() == expect);
  Pattern rs = r_star(t);
  for (const Pattern& r : set) {
    CHECK(oracle::r_feasible_for(t, r));
    CHECK(leq(bool_power(r, 2), rs));  // Theorem 2 maximality
  }
}

TEST_SUITE_END();
