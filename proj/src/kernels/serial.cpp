#include <cmath>

#include "detail.hpp"
#include "qcf/kernels.hpp"

namespace qcf::kernels::serial {

std::vector<EvalResult> evaluate_grid(const FixedPointEvaluator& f, int n) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points per side");
  std::vector<EvalResult> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.push_back(f.eval(static_cast<double>(a) / (n - 1), static_cast<double>(b) / (n - 1)));
  return out;
}

namespace {

void expand(std::span<const SimilarityMap> maps, int depth, const Box2& box, const Rational& mass,
            std::vector<std::uint16_t>& prefix, std::vector<SignedRect>& rects, std::vector<std::uint16_t>& paths) {
  if (static_cast<int>(prefix.size()) == depth) {
    rects.push_back({box, mass});
    paths.insert(paths.end(), prefix.begin(), prefix.end());
    return;
  }
  for (std::size_t k = 0; k < maps.size(); ++k) {
    prefix.push_back(static_cast<std::uint16_t>(k));
    expand(maps, depth, detail::compose(box, maps[k].image), mass * maps[k].mass, prefix, rects, paths);
    prefix.pop_back();
  }
}

}  // namespace

void expand_paths(std::span<const SimilarityMap> maps, int depth, std::vector<SignedRect>& rects,
                  std::vector<std::uint16_t>& paths) {
  rects.clear();
  paths.clear();
  std::vector<std::uint16_t> prefix;
  expand(maps, depth, detail::unit_box(), Rational(1), prefix, rects, paths);
}

std::vector<std::uint8_t> rasterize(std::span<const SignedRect> rects, int resolution) {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(resolution) * resolution, 0);
  for (const SignedRect& r : rects) {
    if (r.mass.is_zero()) continue;
    const std::uint8_t bit = r.mass.sign() > 0 ? 1 : 2;
    const auto [x0, x1] = detail::pixel_span(r.box.u_lo, r.box.u_hi, resolution);
    const auto [y0, y1] = detail::pixel_span(r.box.v_lo, r.box.v_hi, resolution);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) cells[static_cast<std::size_t>(y) * resolution + x] |= bit;
  }
  return cells;
}

std::vector<std::int64_t> box_counts(const OccupancyGrid& mask, std::span<const int> box_sides) {
  std::vector<std::int64_t> counts;
  const int res = mask.resolution;
  for (int side : box_sides) {
    const int boxes = res / side;
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(boxes) * boxes, 0);
    for (int y = 0; y < res; ++y)
      for (int x = 0; x < res; ++x)
        if (mask.occupied(x, y)) hit[static_cast<std::size_t>(y / side) * boxes + x / side] = 1;
    std::int64_t count = 0;
    for (auto h : hit) count += h;
    counts.push_back(count);
  }
  return counts;
}

double transform_gap_sup(const MultiMatrix& t, const EvaluableN& q1, const EvaluableN& q2, int points_per_axis) {
  const detail::TransformPlan plan(t);
  auto scratch = plan.scratch();
  const int n = t.dims();
  std::vector<int> counter(n, 0);
  std::vector<double> u(n);
  double sup = 0.0;
  while (true) {
    for (int a = 0; a < n; ++a) u[a] = static_cast<double>(counter[a]) / (points_per_axis - 1);
    sup = std::max(sup, std::abs(plan.eval(q1, u, scratch) - plan.eval(q2, u, scratch)));
    int a = 0;
    while (a < n && ++counter[a] == points_per_axis) counter[a++] = 0;
    if (a == n) break;
  }
  return sup;
}

void prefix_sums(std::vector<Rational>& values, std::span<const int> dims) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (values.size() != total) throw std::invalid_argument("tensor size does not match its dimensions");
  std::size_t stride = 1;
  for (int d : dims) {
    for (std::size_t pos = 0; pos < total; ++pos)
      if ((pos / stride) % d != 0) values[pos] += values[pos - stride];
    stride *= d;
  }
}

}  // namespace qcf::kernels::serial
