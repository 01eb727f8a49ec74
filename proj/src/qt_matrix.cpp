#include "qcf/qt_matrix.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace qcf {

const char* to_string(ValidationFailure::Code code) {
  switch (code) {
    case ValidationFailure::Code::NotSquare: return "NotSquare";
    case ValidationFailure::Code::OrderTooSmall: return "OrderTooSmall";
    case ValidationFailure::Code::SumNotOne: return "SumNotOne";
    case ValidationFailure::Code::NonpositiveLine: return "NonpositiveLine";
    case ValidationFailure::Code::NegativeBoundarySubmatrix: return "NegativeBoundarySubmatrix";
  }
  return "Unknown";
}

std::string ValidationFailure::message() const {
  std::ostringstream os;
  os << to_string(code);
  switch (code) {
    case Code::SumNotOne:
      os << ": entries sum to " << offending_sum;
      break;
    case Code::NonpositiveLine:
      os << ": " << (line == LineKind::Column ? "column " : "row ") << index << " sums to " << offending_sum;
      break;
    case Code::NegativeBoundarySubmatrix:
      os << ": columns " << corners.col_lo << ".." << corners.col_hi << ", rows " << corners.row_lo << ".."
         << corners.row_hi << " sum to " << offending_sum;
      break;
    default:
      break;
  }
  return os.str();
}

namespace {

ValidationFailure fail(ValidationFailure::Code code) { return ValidationFailure{code, LineKind::Column, 0, {}, {}}; }

}  // namespace

std::optional<ValidationFailure> check_matrix(const ColumnGrid& g) {
  using Code = ValidationFailure::Code;
  const int m = static_cast<int>(g.size());
  for (const auto& column : g)
    if (static_cast<int>(column.size()) != m) return fail(Code::NotSquare);
  if (m < 2) return fail(Code::OrderTooSmall);

  Rational total;
  for (const auto& column : g)
    for (const auto& t : column) total += t;
  if (total != Rational(1)) {
    auto f = fail(Code::SumNotOne);
    f.offending_sum = total;
    return f;
  }

  // (b)
  for (int i = 0; i < m; ++i) {
    Rational s;
    for (int j = 0; j < m; ++j) s += g[i][j];
    if (s.sign() <= 0) return ValidationFailure{Code::NonpositiveLine, LineKind::Column, i + 1, {}, s};
  }
  for (int j = 0; j < m; ++j) {
    Rational s;
    for (int i = 0; i < m; ++i) s += g[i][j];
    if (s.sign() <= 0) return ValidationFailure{Code::NonpositiveLine, LineKind::Row, j + 1, {}, s};
  }

  // (c) A contiguous block touching column 1 is a stack of row prefixes, one
  // touching the last column a stack of row suffixes, and likewise for rows
  // with column prefixes/suffixes. So every such block is nonnegative iff
  // every line prefix and suffix is.
  auto negative = [](const CellRange& c, const Rational& s) {
    return ValidationFailure{Code::NegativeBoundarySubmatrix, LineKind::Column, 0, c, s};
  };
  for (int i = 0; i < m; ++i) {
    Rational s;
    for (int j = 0; j < m; ++j) {
      s += g[i][j];
      if (s.sign() < 0) return negative({i + 1, i + 1, 1, j + 1}, s);
    }
    s = Rational();
    for (int j = m - 1; j >= 0; --j) {
      s += g[i][j];
      if (s.sign() < 0) return negative({i + 1, i + 1, j + 1, m}, s);
    }
  }
  for (int j = 0; j < m; ++j) {
    Rational s;
    for (int i = 0; i < m; ++i) {
      s += g[i][j];
      if (s.sign() < 0) return negative({1, i + 1, j + 1, j + 1}, s);
    }
    s = Rational();
    for (int i = m - 1; i >= 0; --i) {
      s += g[i][j];
      if (s.sign() < 0) return negative({i + 1, m, j + 1, j + 1}, s);
    }
  }
  return std::nullopt;
}

QtMatrix2 build_matrix(const ColumnGrid& g) {
  if (auto failure = check_matrix(g)) throw MatrixValidationError(*failure);

  QtMatrix2 out;
  const int m = static_cast<int>(g.size());
  out.order_ = m;
  out.entries_.reserve(static_cast<std::size_t>(m) * m);
  for (const auto& column : g)
    for (const auto& t : column) {
      // Implied by (a)-(c); a failure here is a bug in check_matrix.
      if (t < Rational(-1, 3) || t > Rational(1))
        throw std::logic_error("validated entry outside [-1/3, 1]: " + t.str());
      out.entries_.push_back(t);
    }

  const std::size_t side = static_cast<std::size_t>(m) + 1;
  out.prefix_.assign(side * side, Rational());
  out.abs_prefix_.assign(side * side, Rational());
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) {
      const Rational& t = out.at(i, j);
      out.prefix_[out.pidx(i, j)] =
          t + out.prefix_[out.pidx(i - 1, j)] + out.prefix_[out.pidx(i, j - 1)] - out.prefix_[out.pidx(i - 1, j - 1)];
      out.abs_prefix_[out.pidx(i, j)] = abs(t) + out.abs_prefix_[out.pidx(i - 1, j)] +
                                        out.abs_prefix_[out.pidx(i, j - 1)] - out.abs_prefix_[out.pidx(i - 1, j - 1)];
    }
  return out;
}

Rational QtMatrix2::column_sum(int col) const { return block_sum({col, col, 1, order_}); }

Rational QtMatrix2::row_sum(int row) const { return block_sum({1, order_, row, row}); }

Rational QtMatrix2::block_sum(const CellRange& b) const {
  return prefix(b.col_hi, b.row_hi) - prefix(b.col_lo - 1, b.row_hi) - prefix(b.col_hi, b.row_lo - 1) +
         prefix(b.col_lo - 1, b.row_lo - 1);
}

bool QtMatrix2::is_proper() const {
  for (const auto& t : entries_)
    if (t.sign() < 0) return true;
  return false;
}

ColumnGrid QtMatrix2::columns() const {
  ColumnGrid g(order_, std::vector<Rational>(order_));
  for (int i = 0; i < order_; ++i)
    for (int j = 0; j < order_; ++j) g[i][j] = entries_[idx(i, j)];
  return g;
}

std::vector<std::vector<Rational>> QtMatrix2::rows_top_first() const {
  std::vector<std::vector<Rational>> rows(order_, std::vector<Rational>(order_));
  for (int r = 0; r < order_; ++r)
    for (int i = 0; i < order_; ++i) rows[r][i] = entries_[idx(i, order_ - 1 - r)];
  return rows;
}

ColumnGrid from_rows_top_first(const std::vector<std::vector<Rational>>& rows) {
  const std::size_t height = rows.size();
  std::size_t width = 0;
  for (const auto& row : rows) width = std::max(width, row.size());
  ColumnGrid g(width, std::vector<Rational>());
  for (std::size_t i = 0; i < width; ++i) {
    for (std::size_t r = height; r-- > 0;) {
      if (i < rows[r].size()) g[i].push_back(rows[r][i]);
    }
  }
  return g;
}

PartitionPair partitions(const QtMatrix2& m) {
  const int n = m.order();
  PartitionPair pp;
  pp.p.reserve(n + 1);
  pp.q.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    pp.p.push_back(m.prefix(k, n));
    pp.q.push_back(m.prefix(n, k));
  }
  return pp;
}

SelfSimilarity self_similarity_check(const QtMatrix2& m) {
  SelfSimilarity out{true, {}};
  const int n = m.order();
  for (int i = 1; i <= n; ++i) {
    const Rational width = m.column_sum(i);
    for (int j = 1; j <= n; ++j) {
      const Rational& t = m.at(i, j);
      if (t.is_zero()) continue;
      if (width != m.row_sum(j)) out.holds = false;
      out.ratios.push_back(width);
    }
  }
  return out;
}

QtMatrix2 canonical_matrix(const CanonicalKind& kind) {
  if (kind.family == CanonicalKind::Family::T0) {
    const Rational z, a(1, 3);
    return build_matrix(from_rows_top_first({{z, a, z}, {a, -a, a}, {z, a, z}}));
  }
  const Rational& r = kind.r;
  if (r.sign() <= 0 || r >= Rational(1))
    throw ParameterOutOfRange("Tr needs 0 < r < 1, got " + r.str());
  const Rational z, c = r / Rational(15), e = r / Rational(5);
  return build_matrix(from_rows_top_first({
      {z, c, e, c},
      {z, e, -c, e},
      {z, c, e, c},
      {Rational(1) - r, z, z, z},
  }));
}

void write_matrix(std::ostream& os, const QtMatrix2& m) {
  os << "order " << m.order() << '\n';
  for (const auto& row : m.rows_top_first()) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
    os << '\n';
  }
}

ColumnGrid read_matrix_grid(std::istream& is) {
  std::string keyword;
  int order = 0;
  if (!(is >> keyword >> order) || keyword != "order")
    throw std::runtime_error("matrix file must start with 'order <m>'");
  if (order < 1) throw std::runtime_error("matrix order must be positive");
  std::vector<std::vector<Rational>> rows(order, std::vector<Rational>(order));
  for (int r = 0; r < order; ++r)
    for (int c = 0; c < order; ++c) {
      std::string token;
      if (!(is >> token)) throw std::runtime_error("matrix file truncated");
      rows[r][c] = Rational::parse(token);
    }
  std::string extra;
  if (is >> extra) throw std::runtime_error("unexpected trailing token in matrix file: " + extra);
  return from_rows_top_first(rows);
}

QtMatrix2 read_matrix(std::istream& is) { return build_matrix(read_matrix_grid(is)); }

}  // namespace qcf
