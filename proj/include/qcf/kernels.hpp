#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version, used by the
// library, and a plain serial version in kernels::serial that is kept as the
// reference for tests and benchmarks. Both must produce identical output.

#include <cstdint>
#include <span>
#include <vector>

#include "qcf/eval2d.hpp"
#include "qcf/ifs_support.hpp"
#include "qcf/multi_nd.hpp"

namespace qcf::kernels {

/// Q_T on the n x n grid k/(n-1), u-major.
std::vector<EvalResult> evaluate_grid(const FixedPointEvaluator& f, int n);

/// All depth-l compositions of `maps`; rects and path digits in lexicographic
/// path order (outermost digit most significant).
void expand_paths(std::span<const SimilarityMap> maps, int depth, std::vector<SignedRect>& rects,
                  std::vector<std::uint16_t>& paths);

/// Sign bit per pixel (1 positive, 2 negative), row 0 at v = 0.
std::vector<std::uint8_t> rasterize(std::span<const SignedRect> rects, int resolution);

/// Number of occupied boxes of each side (in pixels); sides divide the resolution.
std::vector<std::int64_t> box_counts(const OccupancyGrid& mask, std::span<const int> box_sides);

/// sup over the grid {k/(points-1)}^n of |T(q1)(u) - T(q2)(u)|.
double transform_gap_sup(const MultiMatrix& t, const EvaluableN& q1, const EvaluableN& q2, int points_per_axis);

/// In-place inclusive prefix sums of a dense tensor (axis 1 fastest).
void prefix_sums(std::vector<Rational>& values, std::span<const int> dims);

namespace serial {

std::vector<EvalResult> evaluate_grid(const FixedPointEvaluator& f, int n);
void expand_paths(std::span<const SimilarityMap> maps, int depth, std::vector<SignedRect>& rects,
                  std::vector<std::uint16_t>& paths);
std::vector<std::uint8_t> rasterize(std::span<const SignedRect> rects, int resolution);
std::vector<std::int64_t> box_counts(const OccupancyGrid& mask, std::span<const int> box_sides);
double transform_gap_sup(const MultiMatrix& t, const EvaluableN& q1, const EvaluableN& q2, int points_per_axis);
void prefix_sums(std::vector<Rational>& values, std::span<const int> dims);

}  // namespace serial

}  // namespace qcf::kernels
