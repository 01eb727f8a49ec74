#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "qcf/eval2d.hpp"
#include "qcf/qt_matrix.hpp"

namespace qcf {

/// omega_ij(u, v) = (p_{i-1} + (p_i - p_{i-1}) u, q_{j-1} + (q_j - q_{j-1}) v),
/// mapping the unit square onto the cell R_ij.
struct SimilarityMap {
  CellIndex cell;
  Box2 image;
  Rational mass;

  bool is_similarity() const { return image.width() == image.height(); }
  /// Contraction ratio; the column width when the map is a similarity.
  Rational ratio() const { return image.width(); }
};

struct MapSet {
  std::vector<SimilarityMap> maps;
  bool all_similarities = true;
};

/// One map per nonzero entry, column-major order.
MapSet nonzero_maps(const QtMatrix2& m);

struct SignedRect {
  Box2 box;
  Rational mass;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t requested, std::uint64_t budget);
  std::uint64_t requested() const { return requested_; }

 private:
  std::uint64_t requested_;
};

/// Depth-l cover of the support: one rectangle per nonzero path.
class SupportApprox {
 public:
  SupportApprox(int depth, std::vector<CellIndex> alphabet, std::vector<SignedRect> rects,
                std::vector<std::uint16_t> paths);

  int depth() const { return depth_; }
  const std::vector<SignedRect>& rects() const { return rects_; }
  std::size_t size() const { return rects_.size(); }
  /// Cells with t_ij != 0, in the order used by path digits.
  const std::vector<CellIndex>& alphabet() const { return alphabet_; }
  CellPath path(std::size_t k) const;

 private:
  int depth_;
  std::vector<CellIndex> alphabet_;
  std::vector<SignedRect> rects_;
  std::vector<std::uint16_t> paths_;  // depth digits per rect, outermost first
};

inline constexpr std::uint64_t kDefaultRectBudget = 10'000'000;

/// Throws BudgetExceeded when |Z|^depth exceeds the budget.
SupportApprox enumerate_support(const QtMatrix2& m, int depth, std::uint64_t budget = kDefaultRectBudget);

/// Open unit square as witness: every image inside the square, images with
/// pairwise disjoint interiors.
bool moran_check(std::span<const SimilarityMap> maps);

class NoRootInRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DimensionReport {
  std::vector<double> ratios;
  double s = 0.0;
  double residual = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
  int iterations = 0;
};

/// Solves sum c^s = 1 by bisection. The sum is strictly decreasing in s, so
/// the root is unique; bisection runs to machine precision and the residual
/// is checked against `tol`.
DimensionReport solve_moran(std::span<const double> ratios, double tol = 1e-12);

void write_dimension_json(std::ostream& os, const DimensionReport& report);
void write_support_json(std::ostream& os, const SupportApprox& support);

// Family of proper matrices with one corner square of side 1-r and 3^n cubes of
// side r/3: its dimension solves g(r, s) = (1-r)^s + 3^n (r/3)^s = 1.

double family_g(double r, double s, int n = 2);
/// d g / d r at fixed s.
double family_g_derivative(double r, double s, int n = 2);
/// The unique r in ]0,1[ where d g / d r vanishes, for s in ]1, n[.
double critical_r(double s, int n = 2);

enum class FamilyDirection { SOfR, ROfS };

/// SOfR solves the Moran equation of the family's ratios for s; ROfS finds
/// the r in ]r_s, 1[ with g(r, s) = 1 by bisection in r.
double family_dimension(FamilyDirection direction, double value, int n = 2, double tol = 1e-12);

/// Row-major occupancy raster over the unit square, row 0 at v = 0.
struct OccupancyGrid {
  int resolution = 0;
  std::vector<std::uint8_t> cells;

  bool occupied(int x, int y) const {
    return cells[static_cast<std::size_t>(y) * resolution + x] != 0;
  }
};

class DegenerateScales : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BoxCountResult {
  double dim = 0.0;
  double fit_residual = 0.0;  // RMS residual of the log-log fit
  std::vector<double> scales;
  std::vector<std::int64_t> counts;
};

/// Counts occupied delta-boxes for each scale and fits ln N against -ln delta.
/// Each scale times the resolution must be an integer box side dividing it.
BoxCountResult box_counting_estimate(const OccupancyGrid& mask, std::span<const Rational> scales);

}  // namespace qcf
