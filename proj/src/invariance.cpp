#include "sisyn/invariance.hpp"

#include <algorithm>
#include <stdexcept>

namespace sisyn {

namespace {

void require_r_admissible(const Pattern& r) {
  if (r.rows() != r.cols()) throw std::invalid_argument("si_check: R must be square");
  for (int i = 0; i < r.rows(); ++i)
    if (!r.at(i, i))
      throw std::invalid_argument("si_check: R must contain the identity (R(i,i) = 1)");
}

}  // namespace

Pattern r_star(const Pattern& t) {
  const int m = t.rows();
  const int p = t.cols();
  if (m == 0 || p == 0) throw std::invalid_argument("r_star: empty pattern");
  Pattern r = Pattern::ones(p, p);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < p; ++k) {
      if (t.at(i, k)) continue;
      // A nonzero X^{-1}(j,k) would propagate column k into T's zero at (i,k)
      // through any T(i,j) = 1, so forbid it.
      for (int j = 0; j < p; ++j) {
        if (t.at(i, j)) r.set(j, k, false);
      }
    }
  }
  return r;
}

SiVerdict si_check(const Pattern& t, const Pattern& r, const Pattern& s) {
  require_r_admissible(r);
  if (t.rows() != s.rows() || t.cols() != s.cols())
    throw std::invalid_argument("si_check: T and S must share dimensions");
  if (t.cols() != r.rows())
    throw std::invalid_argument("si_check: R must be p x p with p = cols(T)");
  const int p = r.rows();
  const Pattern r_closure = bool_power(r, p > 1 ? p - 1 : 1);
  SiVerdict verdict;
  for (int i = 0; i < t.rows(); ++i) {
    for (int k = 0; k < t.cols(); ++k) {
      if (s.at(i, k)) continue;
      for (int j = 0; j < p; ++j) {
        if (t.at(i, j) && r_closure.at(j, k)) {
          verdict.holds = false;
          verdict.violating_triple = {i, j, k};
          return verdict;
        }
      }
    }
  }
  verdict.holds = true;
  return verdict;
}

bool qi_check(const Pattern& s, const Pattern& delta) {
  if (s.cols() != delta.rows() || delta.cols() != s.rows())
    throw std::invalid_argument("qi_check: need S (m x p) and delta (p x m)");
  return leq(bool_product(bool_product(s, delta), s), s);
}

bool qi_check_via_rstar(const Pattern& s, const Pattern& delta) {
  if (s.cols() != delta.rows() || delta.cols() != s.rows())
    throw std::invalid_argument("qi_check_via_rstar: need S (m x p) and delta (p x m)");
  const Pattern lower = bool_sum(Pattern::identity(s.cols()), bool_product(delta, s));
  return leq(lower, r_star(s));
}

Pattern qi_superset(const Pattern& s, const Pattern& delta) {
  if (s.cols() != delta.rows() || delta.cols() != s.rows())
    throw std::invalid_argument("qi_superset: need S (m x p) and delta (p x m)");
  Pattern current = s;
  while (true) {
    Pattern next = bool_sum(current, bool_product(bool_product(current, delta), current));
    if (next == current) return current;
    current = next;
  }
}

std::vector<Pattern> qi_subsets(const Pattern& s, const Pattern& delta, int max_dist,
                                std::uint64_t budget) {
  if (s.cols() != delta.rows() || delta.cols() != s.rows())
    throw std::invalid_argument("qi_subsets: need S (m x p) and delta (p x m)");
  if (max_dist < 0) throw std::invalid_argument("qi_subsets: max_dist must be >= 0");

  std::vector<std::pair<int, int>> support;
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 0; j < s.cols(); ++j)
      if (s.at(i, j)) support.emplace_back(i, j);
  const int card = static_cast<int>(support.size());

  std::uint64_t enumerated = 0;
  for (int d = 0; d <= std::min(max_dist, card); ++d) {
    std::vector<Pattern> found;
    // Walk d-element removal sets in lexicographic index order.
    std::vector<int> pick(d);
    for (int i = 0; i < d; ++i) pick[i] = i;
    while (true) {
      if (++enumerated > budget)
        throw std::runtime_error("qi_subsets: candidate budget exceeded (" +
                                 std::to_string(budget) + ")");
      Pattern candidate = s;
      for (int idx : pick) candidate.set(support[idx].first, support[idx].second, false);
      if (qi_check(candidate, delta)) found.push_back(std::move(candidate));

      if (d == 0) break;
      int pos = d - 1;
      while (pos >= 0 && pick[pos] == card - d + pos) --pos;
      if (pos < 0) break;
      ++pick[pos];
      for (int i = pos + 1; i < d; ++i) pick[i] = pick[i - 1] + 1;
    }
    if (!found.empty()) {
      std::sort(found.begin(), found.end(),
                [](const Pattern& a, const Pattern& b) { return a.flat() < b.flat(); });
      return found;
    }
  }
  return {};
}

std::vector<Pattern> feasible_r_set(const Pattern& t) {
  const int p = t.cols();
  if (p > 4)
    throw std::invalid_argument("feasible_r_set: restricted to p <= 4 (got p = " +
                                std::to_string(p) + ")");
  if (p == 0 || t.rows() == 0) throw std::invalid_argument("feasible_r_set: empty pattern");

  std::vector<std::pair<int, int>> offdiag;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) offdiag.emplace_back(i, j);

  std::vector<Pattern> result;
  const std::uint64_t total = 1ull << offdiag.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    Pattern r = Pattern::identity(p);
    for (size_t b = 0; b < offdiag.size(); ++b)
      if (bits & (1ull << b)) r.set(offdiag[b].first, offdiag[b].second, true);
    if (leq(bool_product(t, bool_power(r, p > 1 ? p - 1 : 1)), t)) result.push_back(std::move(r));
  }
  return result;
}

}  // namespace sisyn
