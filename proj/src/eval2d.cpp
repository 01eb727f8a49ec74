#include "qcf/eval2d.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace qcf {

namespace {

constexpr double kRounding = 8 * DBL_EPSILON;

void check_domain(double u, double v) {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw OutOfDomain("point outside the unit square: (" + std::to_string(u) + ", " + std::to_string(v) + ")");
}

void check_domain(const Rational& u, const Rational& v) {
  const Rational zero, one(1);
  if (u < zero || u > one || v < zero || v > one)
    throw OutOfDomain("point outside the unit square: (" + u.str() + ", " + v.str() + ")");
}

int locate(const std::vector<double>& breaks, double x) {
  const int m = static_cast<int>(breaks.size()) - 1;
  for (int i = 1; i < m; ++i)
    if (x < breaks[i]) return i;
  return m;
}

int locate(const std::vector<Rational>& breaks, const Rational& x) {
  const int m = static_cast<int>(breaks.size()) - 1;
  for (int i = 1; i < m; ++i)
    if (x < breaks[i]) return i;
  return m;
}

std::vector<double> to_doubles(const std::vector<Rational>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.to_double());
  return out;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

CellIndex locate_cell(const PartitionPair& parts, double u, double v) {
  check_domain(u, v);
  const int m = parts.order();
  auto find = [m](const std::vector<Rational>& breaks, double x) {
    for (int i = 1; i < m; ++i)
      if (x < breaks[i].to_double()) return i;
    return m;
  };
  return {find(parts.p, u), find(parts.q, v)};
}

CellIndex locate_cell(const PartitionPair& parts, const Rational& u, const Rational& v) {
  check_domain(u, v);
  return {locate(parts.p, u), locate(parts.q, v)};
}

// ---------------------------------------------------------------------------

Evaluable::Evaluable(Origin origin, std::string name, RealFn real, ExactFn exact, double tolerance)
    : origin_(origin), name_(std::move(name)), real_(std::move(real)), exact_(std::move(exact)), tolerance_(tolerance) {}

std::optional<Rational> Evaluable::exact(const Rational& u, const Rational& v) const {
  if (!exact_) return std::nullopt;
  return exact_(u, v);
}

Evaluable product_copula() {
  return Evaluable(
      Evaluable::Origin::Product, "Pi", [](double u, double v) { return u * v; },
      [](const Rational& u, const Rational& v) -> std::optional<Rational> { return u * v; }, kRounding);
}

Evaluable minimum_copula() {
  return Evaluable(
      Evaluable::Origin::Minimum, "M", [](double u, double v) { return std::min(u, v); },
      [](const Rational& u, const Rational& v) -> std::optional<Rational> { return std::min(u, v); }, kRounding);
}

Evaluable lukasiewicz_copula() {
  return Evaluable(
      Evaluable::Origin::Lukasiewicz, "W", [](double u, double v) { return std::max(u + v - 1.0, 0.0); },
      [](const Rational& u, const Rational& v) -> std::optional<Rational> {
        return std::max(u + v - Rational(1), Rational());
      },
      kRounding);
}

// ---------------------------------------------------------------------------

double apply_T(const QtMatrix2& m, const Evaluable& q, double u, double v) {
  const PartitionPair parts = partitions(m);
  const CellIndex c = locate_cell(parts, u, v);
  const int i = c.col, j = c.row;
  const double p0 = parts.p[i - 1].to_double(), pw = (parts.p[i] - parts.p[i - 1]).to_double();
  const double q0 = parts.q[j - 1].to_double(), qw = (parts.q[j] - parts.q[j - 1]).to_double();
  const double s = clamp01((u - p0) / pw);
  const double t = clamp01((v - q0) / qw);
  const double below_left = m.prefix(i - 1, j - 1).to_double();
  const double below = (m.prefix(i, j - 1) - m.prefix(i - 1, j - 1)).to_double();
  const double left = (m.prefix(i - 1, j) - m.prefix(i - 1, j - 1)).to_double();
  return below_left + s * below + t * left + m.at(i, j).to_double() * q(s, t);
}

std::optional<Rational> apply_T_exact(const QtMatrix2& m, const Evaluable& q, const Rational& u, const Rational& v) {
  const PartitionPair parts = partitions(m);
  const CellIndex c = locate_cell(parts, u, v);
  const int i = c.col, j = c.row;
  try {
    const Rational s = (u - parts.p[i - 1]) / (parts.p[i] - parts.p[i - 1]);
    const Rational t = (v - parts.q[j - 1]) / (parts.q[j] - parts.q[j - 1]);
    Rational out = m.prefix(i - 1, j - 1) + s * (m.prefix(i, j - 1) - m.prefix(i - 1, j - 1)) +
                   t * (m.prefix(i - 1, j) - m.prefix(i - 1, j - 1));
    const Rational& tij = m.at(i, j);
    if (tij.is_zero()) return out;
    auto inner = q.exact(s, t);
    if (!inner) return std::nullopt;
    return out + tij * *inner;
  } catch (const RationalOverflow&) {
    return std::nullopt;
  }
}

Evaluable transformed(const QtMatrix2& m, Evaluable q) {
  auto mat = std::make_shared<const QtMatrix2>(m);
  auto base = std::make_shared<const Evaluable>(std::move(q));
  Evaluable::ExactFn exact;
  if (base->has_exact())
    exact = [mat, base](const Rational& u, const Rational& v) { return apply_T_exact(*mat, *base, u, v); };
  return Evaluable(
      Evaluable::Origin::Transform, "T(" + base->name() + ")",
      [mat, base](double u, double v) { return apply_T(*mat, *base, u, v); }, std::move(exact),
      base->tolerance() + kRounding);
}

// ---------------------------------------------------------------------------

FixedPointEvaluator::FixedPointEvaluator(QtMatrix2 matrix, double tolerance, int max_depth)
    : matrix_(std::make_shared<const QtMatrix2>(std::move(matrix))),
      parts_(partitions(*matrix_)),
      p_(to_doubles(parts_.p)),
      q_(to_doubles(parts_.q)),
      tolerance_(tolerance),
      max_depth_(max_depth) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be positive");
}

EvalResult FixedPointEvaluator::eval(double u, double v) const {
  check_domain(u, v);
  const QtMatrix2& m = *matrix_;
  double acc = 0.0;
  double scale = 1.0;
  for (int depth = 0;; ++depth) {
    if (u <= 0.0 || v <= 0.0) return {acc, 0.0};
    if (u >= 1.0) return {acc + scale * v, 0.0};
    if (v >= 1.0) return {acc + scale * u, 0.0};
    if (depth == max_depth_ || std::abs(scale) <= tolerance_) break;

    const int i = locate(p_, u), j = locate(q_, v);
    const double s = clamp01((u - p_[i - 1]) / (p_[i] - p_[i - 1]));
    const double t = clamp01((v - q_[j - 1]) / (q_[j] - q_[j - 1]));
    const double below_left = m.prefix(i - 1, j - 1).to_double();
    const double below = m.prefix(i, j - 1).to_double() - below_left;
    const double left = m.prefix(i - 1, j).to_double() - below_left;
    acc += scale * (below_left + s * below + t * left);
    const Rational& tij = m.at(i, j);
    if (tij.is_zero()) return {acc, 0.0};
    scale *= tij.to_double();
    u = s;
    v = t;
  }
  // Any quasi-copula fits in the tail; uv is the cheapest.
  return {acc + scale * u * v, std::abs(scale)};
}

std::optional<Rational> FixedPointEvaluator::eval_exact(const Rational& u0, const Rational& v0) const {
  check_domain(u0, v0);
  const QtMatrix2& m = *matrix_;
  struct State {
    Rational u, v, acc, scale;
  };
  std::vector<State> seen;
  try {
    Rational u = u0, v = v0, acc, scale(1);
    const Rational zero, one(1);
    for (int depth = 0; depth <= max_depth_; ++depth) {
      if (u == zero || v == zero) return acc;
      if (u == one) return acc + scale * v;
      if (v == one) return acc + scale * u;
      for (const State& s : seen) {
        if (s.u == u && s.v == v && s.scale != scale) {
          // acc_j + scale_j X == acc + scale X at the repeated point X = Q_T(u, v).
          const Rational x = (acc - s.acc) / (s.scale - scale);
          return s.acc + s.scale * x;
        }
      }
      seen.push_back({u, v, acc, scale});

      const int i = locate(parts_.p, u), j = locate(parts_.q, v);
      const Rational s = (u - parts_.p[i - 1]) / (parts_.p[i] - parts_.p[i - 1]);
      const Rational t = (v - parts_.q[j - 1]) / (parts_.q[j] - parts_.q[j - 1]);
      const Rational& below_left = m.prefix(i - 1, j - 1);
      acc += scale * (below_left + s * (m.prefix(i, j - 1) - below_left) + t * (m.prefix(i - 1, j) - below_left));
      const Rational& tij = m.at(i, j);
      if (tij.is_zero()) return acc;
      scale *= tij;
      u = s;
      v = t;
    }
  } catch (const RationalOverflow&) {
  }
  return std::nullopt;
}

Evaluable FixedPointEvaluator::as_evaluable() const {
  auto self = std::make_shared<const FixedPointEvaluator>(*this);
  return Evaluable(
      Evaluable::Origin::FixedPoint, "Q_T", [self](double u, double v) { return self->eval(u, v).value; },
      [self](const Rational& u, const Rational& v) { return self->eval_exact(u, v); }, tolerance_);
}

EvalResult eval_fixed_point(const FixedPointEvaluator& f, double u, double v) { return f.eval(u, v); }

// ---------------------------------------------------------------------------

EvalResult volume(const Evaluable& q, const RealRect& r) {
  check_domain(r.u1, r.v1);
  check_domain(r.u2, r.v2);
  if (r.u1 > r.u2 || r.v1 > r.v2) throw OutOfDomain("volume needs u1 <= u2 and v1 <= v2");
  if (r.u1 == r.u2 || r.v1 == r.v2) return {0.0, 0.0};
  const double value = q(r.u2, r.v2) - q(r.u2, r.v1) - q(r.u1, r.v2) + q(r.u1, r.v1);
  return {value, 4.0 * q.tolerance()};
}

std::optional<Rational> volume_exact(const Evaluable& q, const Box2& r) {
  check_domain(r.u_lo, r.v_lo);
  check_domain(r.u_hi, r.v_hi);
  if (r.u_lo > r.u_hi || r.v_lo > r.v_hi) throw OutOfDomain("volume needs u1 <= u2 and v1 <= v2");
  if (r.u_lo == r.u_hi || r.v_lo == r.v_hi) return Rational();
  auto a = q.exact(r.u_hi, r.v_hi);
  auto b = q.exact(r.u_hi, r.v_lo);
  auto c = q.exact(r.u_lo, r.v_hi);
  auto d = q.exact(r.u_lo, r.v_lo);
  if (!a || !b || !c || !d) return std::nullopt;
  try {
    return *a - *b - *c + *d;
  } catch (const RationalOverflow&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------

Box2 cell_box(const PartitionPair& parts, const CellPath& path) {
  if (path.cols.size() != path.rows.size()) throw std::invalid_argument("cell path index vectors differ in length");
  Rational u_lo, u_w(1), v_lo, v_w(1);
  for (std::size_t k = 0; k < path.cols.size(); ++k) {
    const int i = path.cols[k], j = path.rows[k];
    if (i < 1 || i > parts.order() || j < 1 || j > parts.order())
      throw std::out_of_range("cell path index out of range");
    u_lo += u_w * parts.p[i - 1];
    u_w *= parts.p[i] - parts.p[i - 1];
    v_lo += v_w * parts.q[j - 1];
    v_w *= parts.q[j] - parts.q[j - 1];
  }
  return {u_lo, u_lo + u_w, v_lo, v_lo + v_w};
}

Rational path_mass(const QtMatrix2& m, const CellPath& path) {
  Rational mass(1);
  for (std::size_t k = 0; k < path.cols.size(); ++k) mass *= m.at(path.cols[k], path.rows[k]);
  return mass;
}

AffineCoefficients affine_coefficients(const QtMatrix2& m, const CellPath& path) {
  if (path.depth() == 0 || path.cols.size() != path.rows.size())
    throw std::invalid_argument("affine_coefficients needs a non-empty cell path");
  if (!m.at(path.cols.back(), path.rows.back()).is_zero())
    throw PathMassNonzero("last entry of the cell path is not zero");
  const PartitionPair parts = partitions(m);

  // (c, a, b) describe Q_T = c + a x + b y in the local coordinates of the
  // current level; unwind from the innermost cell outward.
  Rational c, a, b;
  for (int k = path.depth() - 1; k >= 0; --k) {
    const int i = path.cols[k], j = path.rows[k];
    const Rational& base = m.prefix(i - 1, j - 1);
    const Rational below = m.prefix(i, j - 1) - base;
    const Rational left = m.prefix(i - 1, j) - base;
    const Rational& t = m.at(i, j);
    c = base + t * c;
    a = below + t * a;
    b = left + t * b;
    // x_{k+1} = (x_k - p_{i-1}) / w_i
    const Rational w = parts.p[i] - parts.p[i - 1];
    const Rational h = parts.q[j] - parts.q[j - 1];
    c -= a * parts.p[i - 1] / w + b * parts.q[j - 1] / h;
    a /= w;
    b /= h;
  }
  return {c, a, b};
}

// ---------------------------------------------------------------------------

AxiomReport axiom_report(const Evaluable& q, int samples, std::uint64_t seed) {
  AxiomReport rep;
  rep.slack = 2.0 * q.tolerance();
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto note = [&rep](double excess, double& worst, int& count) {
    worst = std::max(worst, excess);
    if (excess > rep.slack) ++count;
  };

  constexpr int kEdge = 256;
  for (int k = 0; k <= kEdge; ++k) {
    const double t = static_cast<double>(k) / kEdge;
    note(std::abs(q(t, 0.0)), rep.boundary_worst, rep.boundary_violations);
    note(std::abs(q(0.0, t)), rep.boundary_worst, rep.boundary_violations);
    note(std::abs(q(t, 1.0) - t), rep.boundary_worst, rep.boundary_violations);
    note(std::abs(q(1.0, t) - t), rep.boundary_worst, rep.boundary_violations);
  }

  // Half the pairs are close together: local violations are what we hunt.
  auto partner = [&](double x, int k) {
    if (k % 2 == 0) return unit(rng);
    const double reach = std::pow(10.0, -1.0 - 4.0 * unit(rng));
    return std::clamp(x + reach * (2.0 * unit(rng) - 1.0), 0.0, 1.0);
  };

  for (int k = 0; k < samples; ++k) {
    const double u = unit(rng), v = unit(rng);
    const double u2 = partner(u, k), v2 = partner(v, k);
    const double lo_u = std::min(u, u2), hi_u = std::max(u, u2);
    const double lo_v = std::min(v, v2), hi_v = std::max(v, v2);
    note(q(lo_u, v) - q(hi_u, v), rep.monotone_worst, rep.monotone_violations);
    note(q(u, lo_v) - q(u, hi_v), rep.monotone_worst, rep.monotone_violations);
    note(std::abs(q(u, v) - q(u2, v2)) - (std::abs(u - u2) + std::abs(v - v2)), rep.lipschitz_worst,
         rep.lipschitz_violations);
  }
  return rep;
}

void write_grid_csv(std::ostream& os, int n, std::span<const EvalResult> grid) {
  if (n < 2 || grid.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("grid size does not match n x n");
  os << "u,v,value,error_bound\n";
  char line[128];
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const EvalResult& r = grid[static_cast<std::size_t>(a) * n + b];
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", static_cast<double>(a) / (n - 1),
                    static_cast<double>(b) / (n - 1), r.value, r.error_bound);
      os << line;
    }
}

}  // namespace qcf
