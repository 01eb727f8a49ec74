#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcf/ifs_support.hpp"
#include "qcf/qt_matrix.hpp"
#include "qcf/rational.hpp"

namespace qcf {

inline constexpr std::size_t kMaxDenseEntries = 1'000'000;

/// Dense n-dimensional matrix of masses t_i over a product partition.
///
/// Storage is flat with axis 1 varying fastest. Indices in the public API are
/// one-based, as in t_{i_1, ..., i_n}. The per-axis breakpoints a_{k,0..m_k}
/// are cumulative slab sums and are only strictly increasing for valid input.
class MultiMatrix {
 public:
  MultiMatrix(std::vector<int> shape, std::vector<Rational> entries);

  static MultiMatrix from_2d(const QtMatrix2& m);
  static MultiMatrix from_grid(const ColumnGrid& g);

  int dims() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<Rational>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t flat(std::span<const int> index) const;
  /// Writes the one-based index of flat position `pos`.
  void unflatten(std::size_t pos, std::span<int> index) const;
  const Rational& at(std::span<const int> index) const { return entries_[flat(index)]; }

  const Rational& slab_sum(int axis, int k) const { return slab_sums_[axis][k - 1]; }
  const std::vector<Rational>& axis_breaks(int axis) const { return breaks_[axis]; }
  const std::vector<std::size_t>& strides() const { return strides_; }

  bool is_proper() const;

  friend bool operator==(const MultiMatrix& a, const MultiMatrix& b) {
    return a.shape_ == b.shape_ && a.entries_ == b.entries_;
  }

 private:
  std::vector<int> shape_;
  std::vector<std::size_t> strides_;
  std::vector<Rational> entries_;
  std::vector<std::vector<Rational>> slab_sums_;
  std::vector<std::vector<Rational>> breaks_;
};

struct NdValidation {
  enum class Code { Ok, SumNotOne, NonpositiveSlab, ConditionCFailure };
  Code code = Code::Ok;
  int axis = 0;            // 1-based
  int slab = 0;            // 1-based
  std::vector<int> index;  // ConditionCFailure: the index r
  Rational value;

  bool ok() const { return code == Code::Ok; }
  std::string message() const;
};

const char* to_string(NdValidation::Code code);

/// Membership test for matrices generated by an n-quasi-copula:
/// (a) total 1, (b) every slab sum positive, (c) every partial slab sum
/// sum_{i <= r} t_i - sum_{i <= r^(j)} t_i lies in [0, slab sum].
NdValidation validate_nd(const MultiMatrix& t);

/// max_i ( sum_{r <= i} |t_r| - sum_{r <= i - 1} |t_r| ).
Rational contraction_alpha(const MultiMatrix& t);

/// A function on [0,1]^n, with an optional exact evaluator.
class EvaluableN {
 public:
  using RealFn = std::function<double(std::span<const double>)>;
  using ExactFn = std::function<std::optional<Rational>(std::span<const Rational>)>;

  EvaluableN(int dims, std::string name, RealFn real, ExactFn exact = {});

  int dims() const { return dims_; }
  const std::string& name() const { return name_; }
  double operator()(std::span<const double> u) const { return real_(u); }
  std::optional<Rational> exact(std::span<const Rational> u) const;

 private:
  int dims_;
  std::string name_;
  RealFn real_;
  ExactFn exact_;
};

EvaluableN product_n(int n);
EvaluableN minimum_n(int n);
EvaluableN lukasiewicz_n(int n);

/// T(Q)(u) = sum_i t_i Q(r_i(u)) with r_i clamping each rescaled coordinate to [0, 1].
double apply_T_nd(const MultiMatrix& t, const EvaluableN& q, std::span<const double> u);
std::optional<Rational> apply_T_nd_exact(const MultiMatrix& t, const EvaluableN& q, std::span<const Rational> u);

/// 2^n-corner inclusion-exclusion of an exact function over [lo, hi].
std::optional<Rational> box_volume_exact(const EvaluableN& f, std::span<const Rational> lo,
                                         std::span<const Rational> hi);

/// Exact values of Q_T on the lattice of all depth-k cell corners.
struct LatticeValues {
  int depth = 0;
  std::vector<std::vector<Rational>> coords;  // per axis, increasing
  std::vector<Rational> values;               // axis 1 fastest

  int dims() const { return static_cast<int>(coords.size()); }
  const Rational& at(std::span<const int> lattice_index) const;
  /// Inclusion-exclusion over the lattice box [lo, hi] (zero-based lattice indices).
  Rational box_volume(std::span<const int> lo, std::span<const int> hi) const;
  /// Certified enclosure of Q_T at an arbitrary point from monotonicity and
  /// the 1-Lipschitz bound per coordinate.
  std::pair<double, double> bounds(std::span<const double> point) const;
};

LatticeValues lattice_eval(const MultiMatrix& t, int depth, std::uint64_t budget = kDefaultRectBudget);

/// The 4 x ... x 4 family: 1-r at (1,...,1), zero on any other index containing
/// a 1, -(r/3)/K at (3,...,3), (2n-1)/(2n-3) (r/3)/K when all indices but one
/// are 3, and (r/3)/K elsewhere; K = 3^(n-1) - 1 + (2n-1)/(2n-3).
MultiMatrix make_step_matrix(int n, const Rational& r);

/// The 3 x ... x 3 matrix of equal cubes of side 1/3 with -(1/3)/K at the centre.
MultiMatrix make_cube_matrix(int n);

/// Solves (1-r)^s + 3^n (r/3)^s = 1 for s in ]1, n[ by bisection.
double solve_dim_nd(int n, double r, double tol = 1e-12);

/// JSON {"n", "shape", "entries"}; entries are rational strings, axis 1 fastest.
void write_multi_json(std::ostream& os, const MultiMatrix& t);
MultiMatrix read_multi_json(std::istream& is);
/// JSON {"n", "depth", "coords", "values"} with rational strings.
void write_lattice_json(std::ostream& os, const LatticeValues& lattice);

}  // namespace qcf
