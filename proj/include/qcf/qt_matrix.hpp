#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcf/rational.hpp"

namespace qcf {

/// Closed axis-aligned rectangle [u_lo, u_hi] x [v_lo, v_hi] with exact corners.
struct Box2 {
  Rational u_lo, u_hi, v_lo, v_hi;

  Rational width() const { return u_hi - u_lo; }
  Rational height() const { return v_hi - v_lo; }
  bool contains(const Box2& inner) const {
    return u_lo <= inner.u_lo && inner.u_hi <= u_hi && v_lo <= inner.v_lo && inner.v_hi <= v_hi;
  }
  friend bool operator==(const Box2&, const Box2&) = default;
};

/// Block of a matrix given by inclusive column range and row range (1-based).
struct CellRange {
  int col_lo = 0, col_hi = 0, row_lo = 0, row_hi = 0;
  friend bool operator==(const CellRange&, const CellRange&) = default;
};

enum class LineKind { Column, Row };

/// Why a grid is not a quasi-transformation matrix. Conditions are tested
/// in the order: shape, (a) total sum, (b) line sums, (c) boundary blocks.
struct ValidationFailure {
  enum class Code { NotSquare, OrderTooSmall, SumNotOne, NonpositiveLine, NegativeBoundarySubmatrix };

  Code code;
  LineKind line = LineKind::Column;  // NonpositiveLine
  int index = 0;                     // NonpositiveLine, 1-based
  CellRange corners;                 // NegativeBoundarySubmatrix
  Rational offending_sum;            // total, line or block sum that failed

  std::string message() const;
};

const char* to_string(ValidationFailure::Code code);

class MatrixValidationError : public std::runtime_error {
 public:
  explicit MatrixValidationError(ValidationFailure failure)
      : std::runtime_error(failure.message()), failure_(std::move(failure)) {}
  const ValidationFailure& failure() const { return failure_; }

 private:
  ValidationFailure failure_;
};

class ParameterOutOfRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid addressed as grid[i][j] with i the column and j the row counted
/// from the bottom, both 0-based here; QtMatrix2 accessors are 1-based.
using ColumnGrid = std::vector<std::vector<Rational>>;

/// Validated quasi-transformation matrix with cached prefix sums.
///
/// Entries are addressed column first, rows counted bottom to top, so at(i, j)
/// is the mass placed on the rectangle [p_{i-1}, p_i] x [q_{j-1}, q_j].
class QtMatrix2 {
 public:
  int order() const { return order_; }

  const Rational& at(int col, int row) const { return entries_[idx(col - 1, row - 1)]; }

  /// Sum of at(i', j') over i' <= col, j' <= row; zero when either index is 0.
  const Rational& prefix(int col, int row) const { return prefix_[pidx(col, row)]; }
  const Rational& abs_prefix(int col, int row) const { return abs_prefix_[pidx(col, row)]; }

  Rational column_sum(int col) const;
  Rational row_sum(int row) const;

  /// Sum over the inclusive block of columns [c0, c1] and rows [r0, r1].
  Rational block_sum(const CellRange& block) const;

  /// Has at least one negative entry.
  bool is_proper() const;

  ColumnGrid columns() const;
  /// Human reading order: top row first, columns left to right.
  std::vector<std::vector<Rational>> rows_top_first() const;

  friend bool operator==(const QtMatrix2& a, const QtMatrix2& b) { return a.entries_ == b.entries_; }

 private:
  friend QtMatrix2 build_matrix(const ColumnGrid& by_column);

  std::size_t idx(int i0, int j0) const { return static_cast<std::size_t>(i0) * order_ + j0; }
  std::size_t pidx(int i, int j) const { return static_cast<std::size_t>(i) * (order_ + 1) + j; }

  int order_ = 0;
  std::vector<Rational> entries_;
  std::vector<Rational> prefix_;
  std::vector<Rational> abs_prefix_;
};

/// Returns the first violated condition, or nothing when the grid is a
/// quasi-transformation matrix.
std::optional<ValidationFailure> check_matrix(const ColumnGrid& by_column);

/// Validates and builds; throws MatrixValidationError on failure.
QtMatrix2 build_matrix(const ColumnGrid& by_column);

/// Converts from reading order (top row first) to the column/bottom-up layout.
ColumnGrid from_rows_top_first(const std::vector<std::vector<Rational>>& rows);

/// Breakpoints p_0..p_m (columns) and q_0..q_m (rows).
struct PartitionPair {
  std::vector<Rational> p;
  std::vector<Rational> q;
  int order() const { return static_cast<int>(p.size()) - 1; }
  Box2 cell(int col, int row) const { return {p[col - 1], p[col], q[row - 1], q[row]}; }
};

PartitionPair partitions(const QtMatrix2& m);

struct SelfSimilarity {
  bool holds = false;
  /// Side length of each nonzero cell (column-major order). Meaningful when holds.
  std::vector<Rational> ratios;
};

/// Support is self-similar iff every nonzero cell is a square, i.e.
/// t_ij * (column sum i) == t_ij * (row sum j) for all i, j.
SelfSimilarity self_similarity_check(const QtMatrix2& m);

struct CanonicalKind {
  enum class Family { T0, Tr } family = Family::T0;
  Rational r;
  static CanonicalKind t0() { return {Family::T0, Rational()}; }
  static CanonicalKind tr(Rational r) { return {Family::Tr, r}; }
};

/// T0: the 3x3 plus-shaped proper matrix with -1/3 at the centre.
/// Tr: the 4x4 family with mass 1-r in the bottom-left cell and a 3x3 block of
/// r/15 (corners), r/5 (edges) and -r/15 (centre) in the top-right.
QtMatrix2 canonical_matrix(const CanonicalKind& kind);

/// Text format: "order m" then m lines of m rationals, top row first.
void write_matrix(std::ostream& os, const QtMatrix2& m);
QtMatrix2 read_matrix(std::istream& is);
/// Reads only the grid, without validation.
ColumnGrid read_matrix_grid(std::istream& is);

}  // namespace qcf
