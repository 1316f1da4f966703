#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sisyn {

/// Result of comparing two patterns entrywise.
enum class PatternOrder { Equal, Less, Greater, Incomparable };

/// Dense binary matrix. Zero entries mark positions that are forced to
/// vanish in any matrix conforming to the pattern.
class Pattern {
 public:
  Pattern() = default;
  Pattern(int rows, int cols);  // all-zero

  static Pattern zero(int rows, int cols);
  static Pattern identity(int n);
  static Pattern ones(int rows, int cols);

  /// Builds a pattern from row strings, e.g. {"10010", "01101"} or
  /// {"1 0 0 1 0", ...}. Throws on ragged or malformed rows.
  static Pattern from_rows(const std::vector<std::string>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool at(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j] != 0; }
  void set(int i, int j, bool v) { data_[static_cast<size_t>(i) * cols_ + j] = v ? 1 : 0; }

  bool operator==(const Pattern& other) const = default;

  /// Row-major flattened entries; also the lexicographic sort key.
  const std::vector<std::uint8_t>& flat() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Boolean matrix product: entry (i,j) is 1 iff some k has A(i,k) = B(k,j) = 1.
Pattern bool_product(const Pattern& a, const Pattern& b);

/// Entrywise OR. Dimensions must agree.
Pattern bool_sum(const Pattern& a, const Pattern& b);

/// True iff every entry of a is <= the matching entry of b.
bool leq(const Pattern& a, const Pattern& b);

/// True iff leq(a, b) and a != b.
bool lt(const Pattern& a, const Pattern& b);

PatternOrder compare(const Pattern& a, const Pattern& b);

/// Number of nonzero entries.
long cardinality(const Pattern& a);

/// k-fold boolean product of a square pattern; k = 0 gives the identity.
/// Uses repeated squaring.
Pattern bool_power(const Pattern& a, long k);

/// Pattern of numerically nonzero entries of a real matrix. Entry (i,j) is 1
/// iff |M(i,j)| > tol * (1 + max |M|).
Pattern struct_of(const Eigen::MatrixXd& m, double tol = 1e-9);

/// Parses the ".pat" text format: one row per line, entries '0'/'1' separated
/// by single spaces, '#'-prefixed lines ignored. Ragged rows are rejected.
Pattern parse_pattern(std::string_view text);

/// Serializes to the ".pat" format (LF line endings, no trailing whitespace).
std::string to_text(const Pattern& p);

Pattern read_pattern_file(const std::string& path);
void write_pattern_file(const Pattern& p, const std::string& path);

/// Multi-pattern text: patterns separated by lines containing only "---".
std::vector<Pattern> parse_pattern_list(std::string_view text);
std::string to_text(const std::vector<Pattern>& list);

}  // namespace sisyn
