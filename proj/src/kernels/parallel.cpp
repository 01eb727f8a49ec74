#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>

#include "detail.hpp"
#include "qcf/kernels.hpp"

namespace qcf::kernels {

std::vector<EvalResult> evaluate_grid(const FixedPointEvaluator& f, int n) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points per side");
  std::vector<EvalResult> out(static_cast<std::size_t>(n) * n);
  const std::int64_t total = static_cast<std::int64_t>(n) * n;
  detail::ErrorSlot err;
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < total; ++k) {
    err.run([&] {
      const double u = static_cast<double>(k / n) / (n - 1);
      const double v = static_cast<double>(k % n) / (n - 1);
      out[k] = f.eval(u, v);
    });
  }
  err.rethrow();
  return out;
}

void expand_paths(std::span<const SimilarityMap> maps, int depth, std::vector<SignedRect>& rects,
                  std::vector<std::uint16_t>& paths) {
  const std::uint64_t base = maps.size();
  const std::uint64_t total = detail::checked_power(base, depth, UINT64_MAX / 2);
  rects.assign(total, SignedRect{});
  paths.assign(total * depth, 0);
  if (total == 0) return;

  // Parallel over the leading `split` digits; each task walks its subtree
  // depth-first so shared prefixes are composed once.
  int split = 0;
  std::uint64_t tasks = 1;
  while (split < depth && tasks < 1024) {
    tasks *= base;
    ++split;
  }
  const std::uint64_t leaves = total / tasks;
  const int tail = depth - split;

  detail::ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t task = 0; task < static_cast<std::int64_t>(tasks); ++task) {
    err.run([&] {
      std::vector<std::uint16_t> digits(depth, 0);
      std::uint64_t rest = static_cast<std::uint64_t>(task);
      for (int level = split - 1; level >= 0; --level) {
        digits[level] = static_cast<std::uint16_t>(rest % base);
        rest /= base;
      }
      // boxes[l], masses[l]: composition of the first l digits.
      std::vector<Box2> boxes(depth + 1, detail::unit_box());
      std::vector<Rational> masses(depth + 1, Rational(1));
      for (int level = 0; level < split; ++level) {
        boxes[level + 1] = detail::compose(boxes[level], maps[digits[level]].image);
        masses[level + 1] = masses[level] * maps[digits[level]].mass;
      }
      int dirty = split;  // first level whose composition is stale
      const std::uint64_t first = static_cast<std::uint64_t>(task) * leaves;
      for (std::uint64_t leaf = 0; leaf < leaves; ++leaf) {
        for (int level = dirty; level < depth; ++level) {
          boxes[level + 1] = detail::compose(boxes[level], maps[digits[level]].image);
          masses[level + 1] = masses[level] * maps[digits[level]].mass;
        }
        const std::size_t k = static_cast<std::size_t>(first + leaf);
        rects[k] = SignedRect{boxes[depth], masses[depth]};
        std::copy(digits.begin(), digits.end(), paths.begin() + static_cast<std::ptrdiff_t>(k * depth));
        // Odometer over the tail digits.
        int level = depth - 1;
        while (level >= split && ++digits[level] == base) digits[level--] = 0;
        dirty = std::max(level, split);
        if (tail == 0) break;
      }
    });
  }
  err.rethrow();
}

std::vector<std::uint8_t> rasterize(std::span<const SignedRect> rects, int resolution) {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(resolution) * resolution, 0);
  detail::ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(rects.size()); ++k) {
    err.run([&] {
      const SignedRect& r = rects[k];
      if (r.mass.is_zero()) return;
      const std::uint8_t bit = r.mass.sign() > 0 ? 1 : 2;
      const auto [x0, x1] = detail::pixel_span(r.box.u_lo, r.box.u_hi, resolution);
      const auto [y0, y1] = detail::pixel_span(r.box.v_lo, r.box.v_hi, resolution);
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
          std::atomic_ref<std::uint8_t> cell(cells[static_cast<std::size_t>(y) * resolution + x]);
          if ((cell.load(std::memory_order_relaxed) & bit) == 0) cell.fetch_or(bit, std::memory_order_relaxed);
        }
    });
  }
  err.rethrow();
  return cells;
}

std::vector<std::int64_t> box_counts(const OccupancyGrid& mask, std::span<const int> box_sides) {
  std::vector<std::int64_t> counts;
  const int res = mask.resolution;
  for (int side : box_sides) {
    const int boxes = res / side;
    std::int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(boxes) * boxes; ++b) {
      const int bx = static_cast<int>(b % boxes), by = static_cast<int>(b / boxes);
      bool hit = false;
      for (int y = by * side; y < (by + 1) * side && !hit; ++y) {
        const std::uint8_t* row = mask.cells.data() + static_cast<std::size_t>(y) * res;
        for (int x = bx * side; x < (bx + 1) * side; ++x)
          if (row[x]) {
            hit = true;
            break;
          }
      }
      count += hit ? 1 : 0;
    }
    counts.push_back(count);
  }
  return counts;
}

double transform_gap_sup(const MultiMatrix& t, const EvaluableN& q1, const EvaluableN& q2, int points_per_axis) {
  const detail::TransformPlan plan(t);
  const int n = plan.dims();
  std::int64_t total = 1;
  for (int a = 0; a < n; ++a) total *= points_per_axis;
  double sup = 0.0;
  detail::ErrorSlot err;
#pragma omp parallel reduction(max : sup)
  {
    auto scratch = plan.scratch();
    std::vector<double> u(n);
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < total; ++k) {
      err.run([&] {
        std::int64_t rest = k;
        for (int a = 0; a < n; ++a) {
          u[a] = static_cast<double>(rest % points_per_axis) / (points_per_axis - 1);
          rest /= points_per_axis;
        }
        const double gap = std::abs(plan.eval(q1, u, scratch) - plan.eval(q2, u, scratch));
        sup = std::max(sup, gap);
      });
    }
  }
  err.rethrow();
  return sup;
}

void prefix_sums(std::vector<Rational>& values, std::span<const int> dims) {
  std::size_t stride = 1;
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (values.size() != total) throw std::invalid_argument("tensor size does not match its dimensions");
  detail::ErrorSlot err;
  for (int d : dims) {
    const std::size_t block = stride * d;
    const std::int64_t lines = static_cast<std::int64_t>(total / d);
#pragma omp parallel for schedule(static)
    for (std::int64_t line = 0; line < lines; ++line) {
      err.run([&] {
        const std::size_t outer = static_cast<std::size_t>(line) / stride;
        const std::size_t inner = static_cast<std::size_t>(line) % stride;
        const std::size_t start = outer * block + inner;
        for (int k = 1; k < d; ++k) values[start + k * stride] += values[start + (k - 1) * stride];
      });
    }
    err.rethrow();
    stride = block;
  }
}

}  // namespace qcf::kernels
