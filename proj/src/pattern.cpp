#include "sisyn/pattern.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sisyn {

namespace {

void check_same_shape(const Pattern& a, const Pattern& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Pattern::Pattern(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Pattern: negative dimension");
  data_.assign(static_cast<size_t>(rows) * cols, 0);
}

Pattern Pattern::zero(int rows, int cols) { return Pattern(rows, cols); }

Pattern Pattern::identity(int n) {
  Pattern p(n, n);
  for (int i = 0; i < n; ++i) p.set(i, i, true);
  return p;
}

Pattern Pattern::ones(int rows, int cols) {
  Pattern p(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) p.set(i, j, true);
  return p;
}

Pattern Pattern::from_rows(const std::vector<std::string>& rows) {
  Pattern p;
  std::vector<std::vector<bool>> parsed;
  for (const std::string& row : rows) {
    std::vector<bool> bits;
    for (char c : row) {
      if (c == '0')
        bits.push_back(false);
      else if (c == '1')
        bits.push_back(true);
      else if (c == ' ' || c == '\t')
        continue;
      else
        throw std::invalid_argument("Pattern::from_rows: unexpected character '" +
                                    std::string(1, c) + "'");
    }
    parsed.push_back(std::move(bits));
  }
  if (parsed.empty()) throw std::invalid_argument("Pattern::from_rows: no rows");
  const size_t cols = parsed.front().size();
  for (const auto& r : parsed)
    if (r.size() != cols) throw std::invalid_argument("Pattern::from_rows: ragged rows");
  p = Pattern(static_cast<int>(parsed.size()), static_cast<int>(cols));
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) p.set(i, j, parsed[i][j]);
  return p;
}

Pattern bool_product(const Pattern& a, const Pattern& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("bool_product: inner dimension mismatch (" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                ")");
  }
  Pattern out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      if (!a.at(i, k)) continue;
      for (int j = 0; j < b.cols(); ++j) {
        if (b.at(k, j)) out.set(i, j, true);
      }
    }
  }
  return out;
}

Pattern bool_sum(const Pattern& a, const Pattern& b) {
  check_same_shape(a, b, "bool_sum");
  Pattern out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.set(i, j, a.at(i, j) || b.at(i, j));
  return out;
}

bool leq(const Pattern& a, const Pattern& b) {
  check_same_shape(a, b, "leq");
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a.at(i, j) && !b.at(i, j)) return false;
  return true;
}

bool lt(const Pattern& a, const Pattern& b) { return leq(a, b) && !(a == b); }

PatternOrder compare(const Pattern& a, const Pattern& b) {
  check_same_shape(a, b, "compare");
  bool a_le_b = true, b_le_a = true;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      if (a.at(i, j) && !b.at(i, j)) a_le_b = false;
      if (b.at(i, j) && !a.at(i, j)) b_le_a = false;
    }
  }
  if (a_le_b && b_le_a) return PatternOrder::Equal;
  if (a_le_b) return PatternOrder::Less;
  if (b_le_a) return PatternOrder::Greater;
  return PatternOrder::Incomparable;
}

long cardinality(const Pattern& a) {
  long n = 0;
  for (auto v : a.flat()) n += v;
  return n;
}

Pattern bool_power(const Pattern& a, long k) {
  if (a.rows() != a.cols()) throw std::invalid_argument("bool_power: pattern must be square");
  if (k < 0) throw std::invalid_argument("bool_power: negative exponent");
  Pattern result = Pattern::identity(a.rows());
  Pattern base = a;
  while (k > 0) {
    if (k & 1) result = bool_product(result, base);
    k >>= 1;
    if (k > 0) base = bool_product(base, base);
  }
  return result;
}

Pattern struct_of(const Eigen::MatrixXd& m, double tol) {
  Pattern p(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  const double scale = m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0;
  const double thresh = tol * (1.0 + scale);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > thresh) p.set(i, j, true);
  return p;
}

namespace {

// Parses the body lines of one pattern; `lines` holds raw lines with comments
// and blank lines already removed.
Pattern pattern_from_lines(const std::vector<std::string>& lines) {
  if (lines.empty()) throw std::invalid_argument("pattern parse: no data rows");
  std::vector<std::vector<bool>> rows;
  for (const std::string& line : lines) {
    std::vector<bool> bits;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) {
      if (tok == "0")
        bits.push_back(false);
      else if (tok == "1")
        bits.push_back(true);
      else
        throw std::invalid_argument("pattern parse: invalid token '" + tok + "'");
    }
    if (bits.empty()) throw std::invalid_argument("pattern parse: empty row");
    rows.push_back(std::move(bits));
  }
  const size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw std::invalid_argument("pattern parse: ragged rows");
  Pattern p(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) p.set(i, j, rows[i][j]);
  return p;
}

std::vector<std::string> clean_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string current;
  auto flush = [&]() {
    // Trim trailing CR so CRLF input still parses.
    if (!current.empty() && current.back() == '\r') current.pop_back();
    std::string_view sv(current);
    size_t start = sv.find_first_not_of(" \t");
    if (start != std::string_view::npos && sv[start] != '#') lines.push_back(current);
    current.clear();
  };
  for (char c : text) {
    if (c == '\n')
      flush();
    else
      current.push_back(c);
  }
  if (!current.empty()) flush();
  return lines;
}

bool is_separator(const std::string& line) {
  std::istringstream iss(line);
  std::string tok;
  if (!(iss >> tok)) return false;
  if (tok != "---") return false;
  return !(iss >> tok);
}

}  // namespace

Pattern parse_pattern(std::string_view text) {
  std::vector<std::string> lines = clean_lines(text);
  for (const auto& l : lines)
    if (is_separator(l))
      throw std::invalid_argument("pattern parse: unexpected '---' separator in single pattern");
  return pattern_from_lines(lines);
}

std::string to_text(const Pattern& p) {
  std::string out;
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      if (j > 0) out.push_back(' ');
      out.push_back(p.at(i, j) ? '1' : '0');
    }
    out.push_back('\n');
  }
  return out;
}

Pattern read_pattern_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pattern file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pattern(ss.str());
}

void write_pattern_file(const Pattern& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pattern file: " + path);
  out << to_text(p);
}

std::vector<Pattern> parse_pattern_list(std::string_view text) {
  std::vector<std::string> lines = clean_lines(text);
  std::vector<Pattern> result;
  std::vector<std::string> chunk;
  for (const std::string& line : lines) {
    if (is_separator(line)) {
      result.push_back(pattern_from_lines(chunk));
      chunk.clear();
    } else {
      chunk.push_back(line);
    }
  }
  if (!chunk.empty()) result.push_back(pattern_from_lines(chunk));
  return result;
}

std::string to_text(const std::vector<Pattern>& list) {
  std::string out;
  for (size_t i = 0; i < list.size(); ++i) {
    if (i > 0) out += "---\n";
    out += to_text(list[i]);
  }
  return out;
}

}  // namespace sisyn
