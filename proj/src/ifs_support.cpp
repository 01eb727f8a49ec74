#include "qcf/ifs_support.hpp"

#include <cmath>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"
#include "qcf/kernels.hpp"

namespace qcf {

MapSet nonzero_maps(const QtMatrix2& m) {
  const PartitionPair parts = partitions(m);
  MapSet out;
  for (int col = 1; col <= m.order(); ++col)
    for (int row = 1; row <= m.order(); ++row) {
      const Rational& t = m.at(col, row);
      if (t.is_zero()) continue;
      SimilarityMap w{{col, row}, parts.cell(col, row), t};
      out.all_similarities = out.all_similarities && w.is_similarity();
      out.maps.push_back(std::move(w));
    }
  return out;
}

BudgetExceeded::BudgetExceeded(std::uint64_t requested, std::uint64_t budget)
    : std::runtime_error("support needs " + std::to_string(requested) + " rectangles, budget is " +
                         std::to_string(budget)),
      requested_(requested) {}

SupportApprox::SupportApprox(int depth, std::vector<CellIndex> alphabet, std::vector<SignedRect> rects,
                             std::vector<std::uint16_t> paths)
    : depth_(depth), alphabet_(std::move(alphabet)), rects_(std::move(rects)), paths_(std::move(paths)) {}

CellPath SupportApprox::path(std::size_t k) const {
  CellPath p;
  for (int level = 0; level < depth_; ++level) {
    const CellIndex& c = alphabet_[paths_[k * depth_ + level]];
    p.cols.push_back(c.col);
    p.rows.push_back(c.row);
  }
  return p;
}

SupportApprox enumerate_support(const QtMatrix2& m, int depth, std::uint64_t budget) {
  if (depth < 0) throw ParameterOutOfRange("depth must be nonnegative");
  const MapSet set = nonzero_maps(m);
  std::uint64_t count = 1;
  for (int k = 0; k < depth; ++k) {
    if (count > budget / set.maps.size()) {
      // Report the true size when it still fits in 64 bits.
      long double exact = std::pow(static_cast<long double>(set.maps.size()), depth);
      throw BudgetExceeded(exact < 1.8e19L ? static_cast<std::uint64_t>(exact) : UINT64_MAX, budget);
    }
    count *= set.maps.size();
  }
  if (count > budget) throw BudgetExceeded(count, budget);

  std::vector<SignedRect> rects;
  std::vector<std::uint16_t> paths;
  kernels::expand_paths(set.maps, depth, rects, paths);
  std::vector<CellIndex> alphabet;
  for (const auto& w : set.maps) alphabet.push_back(w.cell);
  return SupportApprox(depth, std::move(alphabet), std::move(rects), std::move(paths));
}

bool moran_check(std::span<const SimilarityMap> maps) {
  const Rational zero, one(1);
  for (const auto& w : maps) {
    const Box2& b = w.image;
    if (b.u_lo < zero || b.v_lo < zero || b.u_hi > one || b.v_hi > one) return false;
    if (!(b.u_lo < b.u_hi && b.v_lo < b.v_hi)) return false;
  }
  for (std::size_t a = 0; a < maps.size(); ++a)
    for (std::size_t b = a + 1; b < maps.size(); ++b) {
      const Box2& x = maps[a].image;
      const Box2& y = maps[b].image;
      const bool overlap = x.u_lo < y.u_hi && y.u_lo < x.u_hi && x.v_lo < y.v_hi && y.v_lo < x.v_hi;
      if (overlap) return false;
    }
  return true;
}

namespace {

double moran_f(std::span<const double> ratios, double s) {
  double sum = 0.0;
  for (double c : ratios) sum += std::pow(c, s);
  return sum - 1.0;
}

}  // namespace

DimensionReport solve_moran(std::span<const double> ratios, double tol) {
  if (ratios.empty()) throw ParameterOutOfRange("no ratios given");
  for (double c : ratios)
    if (!(c > 0.0 && c < 1.0)) throw ParameterOutOfRange("ratio outside ]0,1[: " + std::to_string(c));

  double lo = 1e-9;
  if (!(moran_f(ratios, lo) > 0.0))
    throw NoRootInRange("sum of c^s never exceeds 1; at least two maps are needed");
  double hi = 1.0;
  while (!(moran_f(ratios, hi) < 0.0)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NoRootInRange("no sign change of sum c^s - 1 below s = 1e6");
  }

  DimensionReport report;
  report.ratios.assign(ratios.begin(), ratios.end());
  int iterations = 0;
  while (iterations < 2000) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++iterations;
    const double f = moran_f(ratios, mid);
    if (f == 0.0) {
      lo = hi = mid;
      break;
    }
    (f > 0.0 ? lo : hi) = mid;
  }
  report.s_lo = lo;
  report.s_hi = hi;
  report.s = 0.5 * (lo + hi);
  report.residual = std::abs(moran_f(ratios, report.s));
  report.iterations = iterations;
  if (report.residual > tol)
    throw NoRootInRange("bisection stalled with residual " + std::to_string(report.residual));
  return report;
}

void write_dimension_json(std::ostream& os, const DimensionReport& report) {
  nlohmann::json j;
  j["ratios"] = report.ratios;
  j["s"] = report.s;
  j["residual"] = report.residual;
  j["bracket"] = {report.s_lo, report.s_hi};
  j["iterations"] = report.iterations;
  os << j.dump(2) << '\n';
}

void write_support_json(std::ostream& os, const SupportApprox& support) {
  nlohmann::json records = nlohmann::json::array();
  for (std::size_t k = 0; k < support.size(); ++k) {
    const CellPath p = support.path(k);
    const SignedRect& r = support.rects()[k];
    records.push_back({{"i_path", p.cols},
                       {"j_path", p.rows},
                       {"corners", nlohmann::json::array({nlohmann::json::array({r.box.u_lo.str(), r.box.v_lo.str()}),
                                                         nlohmann::json::array({r.box.u_hi.str(), r.box.v_hi.str()})})},
                       {"mass", r.mass.str()}});
  }
  os << records.dump() << '\n';
}

double family_g(double r, double s, int n) {
  return std::pow(1.0 - r, s) + std::pow(3.0, n) * std::pow(r / 3.0, s);
}

double family_g_derivative(double r, double s, int n) {
  return s * (-std::pow(1.0 - r, s - 1.0) + std::pow(3.0, n - 1) * std::pow(r / 3.0, s - 1.0));
}

double critical_r(double s, int n) {
  if (n < 2) throw ParameterOutOfRange("ambient dimension must be at least 2");
  if (!(s > 1.0 && s < n)) throw ParameterOutOfRange("s must lie in ]1, n[");
  return 1.0 / (1.0 + std::pow(3.0, (n - s) / (s - 1.0)));
}

double family_dimension(FamilyDirection direction, double value, int n, double tol) {
  if (n < 2) throw ParameterOutOfRange("ambient dimension must be at least 2");
  if (direction == FamilyDirection::SOfR) {
    if (!(value > 0.0 && value < 1.0)) throw ParameterOutOfRange("r must lie in ]0,1[");
    std::vector<double> ratios{1.0 - value};
    const double cube = std::pow(3.0, n);
    ratios.insert(ratios.end(), static_cast<std::size_t>(cube), value / 3.0);
    return solve_moran(ratios, tol).s;
  }

  const double s = value;
  if (!(s > 1.0 && s < n)) throw ParameterOutOfRange("s must lie in ]1, n[");
  // g(., s) decreases on ]0, r_s] and increases on [r_s, 1[, with g(r_s) < 1 < g(1).
  double lo = critical_r(s, n);
  double hi = 1.0;
  if (!(family_g(lo, s, n) < 1.0)) throw NoRootInRange("g(r_s, s) is not below 1");
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (family_g(mid, s, n) < 1.0 ? lo : hi) = mid;
  }
  const double r = 0.5 * (lo + hi);
  if (std::abs(family_g(r, s, n) - 1.0) > tol)
    throw NoRootInRange("bisection in r stalled away from g = 1");
  return r;
}

BoxCountResult box_counting_estimate(const OccupancyGrid& mask, std::span<const Rational> scales) {
  if (scales.size() < 3) throw DegenerateScales("box counting needs at least 3 scales");
  std::set<Rational> distinct(scales.begin(), scales.end());
  if (distinct.size() != scales.size()) throw DegenerateScales("box counting scales must be distinct");

  std::vector<int> sides;
  const Rational res(mask.resolution);
  for (const Rational& delta : scales) {
    if (!(delta > Rational(0) && delta <= Rational(1)))
      throw DegenerateScales("scale outside ]0,1]: " + delta.str());
    const Rational side = delta * res;
    if (side.denominator() != 1 || mask.resolution % side.numerator() != 0)
      throw DegenerateScales("scale " + delta.str() + " does not divide the raster resolution " +
                             std::to_string(mask.resolution));
    sides.push_back(static_cast<int>(side.numerator()));
  }
  bool any = false;
  for (auto c : mask.cells) any = any || c != 0;
  if (!any) throw DegenerateScales("mask is empty");

  BoxCountResult out;
  out.counts = kernels::box_counts(mask, sides);
  const std::size_t k = scales.size();
  std::vector<double> x(k), y(k);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out.scales.push_back(scales[i].to_double());
    x[i] = -std::log(out.scales[i]);
    y[i] = std::log(static_cast<double>(out.counts[i]));
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  out.dim = sxy / sxx;
  const double intercept = my - out.dim * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = y[i] - (intercept + out.dim * x[i]);
    rss += e * e;
  }
  out.fit_residual = std::sqrt(rss / k);
  return out;
}

}  // namespace qcf
