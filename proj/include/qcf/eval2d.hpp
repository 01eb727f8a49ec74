#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcf/qt_matrix.hpp"
#include "qcf/rational.hpp"

namespace qcf {

class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct CellIndex {
  int col = 0;
  int row = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Half-open cell lookup: p_{i-1} <= u < p_i, with u == 1 closing into column m.
CellIndex locate_cell(const PartitionPair& parts, double u, double v);
CellIndex locate_cell(const PartitionPair& parts, const Rational& u, const Rational& v);

/// A function on the unit square that should behave like a quasi-copula.
///
/// Holds a floating-point evaluator, optionally an exact one on rational
/// points, and the absolute error the floating evaluator promises.
class Evaluable {
 public:
  enum class Origin { Product, Minimum, Lukasiewicz, Transform, FixedPoint, Custom };

  using RealFn = std::function<double(double, double)>;
  using ExactFn = std::function<std::optional<Rational>(const Rational&, const Rational&)>;

  Evaluable(Origin origin, std::string name, RealFn real, ExactFn exact = {}, double tolerance = 0.0);

  double operator()(double u, double v) const { return real_(u, v); }
  /// Exact value, or nothing if this function has no exact evaluator or
  /// cannot resolve the point exactly.
  std::optional<Rational> exact(const Rational& u, const Rational& v) const;
  bool has_exact() const { return static_cast<bool>(exact_); }

  Origin origin() const { return origin_; }
  const std::string& name() const { return name_; }
  double tolerance() const { return tolerance_; }

 private:
  Origin origin_;
  std::string name_;
  RealFn real_;
  ExactFn exact_;
  double tolerance_;
};

Evaluable product_copula();      // uv
Evaluable minimum_copula();      // min(u, v)
Evaluable lukasiewicz_copula();  // max(u + v - 1, 0)

/// One application of the T-transformation at (u, v).
double apply_T(const QtMatrix2& m, const Evaluable& q, double u, double v);
std::optional<Rational> apply_T_exact(const QtMatrix2& m, const Evaluable& q, const Rational& u, const Rational& v);

/// T(Q) as a new Evaluable; keeps the exact path if `q` has one.
Evaluable transformed(const QtMatrix2& m, Evaluable q);

struct EvalResult {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Evaluates the unique fixed point Q_T of a quasi-transformation matrix.
///
/// Inside cell (i, j) the fixed-point equation has one recursive term, scaled
/// by t_ij, so evaluation is a single descent. It ends exactly on a cell
/// boundary or a zero entry; otherwise it stops once the accumulated |prod t|
/// drops to the tolerance and substitutes uv for the tail.
class FixedPointEvaluator {
 public:
  explicit FixedPointEvaluator(QtMatrix2 matrix, double tolerance = 1e-12, int max_depth = 64);

  EvalResult eval(double u, double v) const;

  /// Exact descent in rational arithmetic. Ends on boundaries, zero entries,
  /// or when the rescaled point repeats (the linear recursion is then solved
  /// in closed form). Nothing if max_depth passes first or on overflow.
  std::optional<Rational> eval_exact(const Rational& u, const Rational& v) const;

  const QtMatrix2& matrix() const { return *matrix_; }
  const PartitionPair& parts() const { return parts_; }
  double tolerance() const { return tolerance_; }
  int max_depth() const { return max_depth_; }

  Evaluable as_evaluable() const;

 private:
  std::shared_ptr<const QtMatrix2> matrix_;
  PartitionPair parts_;
  std::vector<double> p_, q_;
  double tolerance_;
  int max_depth_;
};

EvalResult eval_fixed_point(const FixedPointEvaluator& f, double u, double v);

struct RealRect {
  double u1, u2, v1, v2;
};

/// Four-corner volume; the error bound is four times the evaluator tolerance.
EvalResult volume(const Evaluable& q, const RealRect& rect);
std::optional<Rational> volume_exact(const Evaluable& q, const Box2& rect);

/// Depth-l cell R_{i_1..i_l; j_1..j_l}: outermost index first.
struct CellPath {
  std::vector<int> cols;
  std::vector<int> rows;
  int depth() const { return static_cast<int>(cols.size()); }
};

Box2 cell_box(const PartitionPair& parts, const CellPath& path);
Rational path_mass(const QtMatrix2& m, const CellPath& path);

/// Q_T(u, v) = g1 + g2 u + g3 v on a cell whose last entry is zero.
struct AffineCoefficients {
  Rational g1, g2, g3;
  double operator()(double u, double v) const { return g1.to_double() + g2.to_double() * u + g3.to_double() * v; }
};

class PathMassNonzero : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

AffineCoefficients affine_coefficients(const QtMatrix2& m, const CellPath& path);

struct AxiomReport {
  double slack = 0.0;  // allowed violation: 2x evaluator tolerance
  int samples = 0;
  double boundary_worst = 0.0;   // (C1)
  double monotone_worst = 0.0;   // (Q2): largest decrease
  double lipschitz_worst = 0.0;  // (Q3): largest excess over |du| + |dv|
  int boundary_violations = 0;
  int monotone_violations = 0;
  int lipschitz_violations = 0;

  bool ok() const { return boundary_violations == 0 && monotone_violations == 0 && lipschitz_violations == 0; }
};

/// Seeded random audit of (C1), (Q2) and (Q3).
AxiomReport axiom_report(const Evaluable& q, int samples, std::uint64_t seed);

/// CSV with header u,v,value,error_bound; rows ordered u-major over an
/// n x n uniform grid k/(n-1).
void write_grid_csv(std::ostream& os, int n, std::span<const EvalResult> grid);

}  // namespace qcf
