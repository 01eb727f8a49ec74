#include "qcf/multi_nd.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "kernels/detail.hpp"
#include "qcf/eval2d.hpp"
#include "qcf/kernels.hpp"

namespace qcf {

namespace {

std::size_t checked_size(const std::vector<int>& shape) {
  std::size_t total = 1;
  for (int m : shape) {
    if (m < 2) throw ParameterOutOfRange("every axis needs at least 2 slabs");
    if (total > kMaxDenseEntries / static_cast<std::size_t>(m))
      throw ParameterOutOfRange("matrix exceeds the dense storage limit of " + std::to_string(kMaxDenseEntries) +
                                " entries");
    total *= static_cast<std::size_t>(m);
  }
  return total;
}

std::string index_str(std::span<const int> idx) {
  std::string s = "(";
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? "," : "") + std::to_string(idx[k]);
  return s + ")";
}

// Visits every one-based index of `shape` in storage order.
template <typename F>
void for_each_index(const std::vector<int>& shape, F&& visit) {
  std::vector<int> idx(shape.size(), 1);
  std::size_t pos = 0;
  while (true) {
    visit(pos, std::span<const int>(idx));
    ++pos;
    std::size_t a = 0;
    while (a < shape.size() && ++idx[a] > shape[a]) idx[a++] = 1;
    if (a == shape.size()) return;
  }
}

void check_point(int dims, std::span<const double> u) {
  if (static_cast<int>(u.size()) != dims) throw std::invalid_argument("point has the wrong dimension");
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0)) throw OutOfDomain("point outside the unit cube");
}

void check_point(int dims, std::span<const Rational> u) {
  if (static_cast<int>(u.size()) != dims) throw std::invalid_argument("point has the wrong dimension");
  for (const Rational& x : u)
    if (x < Rational(0) || x > Rational(1)) throw OutOfDomain("point outside the unit cube: " + x.str());
}

// Prefix sums padded with a zero layer in front of every axis, so that
// index 0 on any axis reads as the empty sum.
struct PaddedPrefix {
  std::vector<int> dims;
  std::vector<std::size_t> strides;
  std::vector<Rational> values;

  PaddedPrefix(const MultiMatrix& t, bool absolute) {
    std::size_t stride = 1;
    for (int m : t.shape()) {
      dims.push_back(m + 1);
      strides.push_back(stride);
      stride *= static_cast<std::size_t>(m + 1);
    }
    values.assign(stride, Rational());
    for_each_index(t.shape(), [&](std::size_t pos, std::span<const int> idx) {
      const Rational& x = t.entries()[pos];
      values[offset(idx)] = absolute ? abs(x) : x;
    });
    kernels::prefix_sums(values, dims);
  }

  std::size_t offset(std::span<const int> idx) const {
    std::size_t off = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) off += static_cast<std::size_t>(idx[a]) * strides[a];
    return off;
  }
};

}  // namespace

MultiMatrix::MultiMatrix(std::vector<int> shape, std::vector<Rational> entries)
    : shape_(std::move(shape)), entries_(std::move(entries)) {
  if (shape_.size() < 2) throw ParameterOutOfRange("a multidimensional matrix needs at least 2 axes");
  if (checked_size(shape_) != entries_.size())
    throw std::invalid_argument("entry count " + std::to_string(entries_.size()) + " does not match the shape");
  std::size_t stride = 1;
  for (int m : shape_) {
    strides_.push_back(stride);
    stride *= static_cast<std::size_t>(m);
  }
  for (int m : shape_) slab_sums_.emplace_back(m, Rational());
  for_each_index(shape_, [&](std::size_t pos, std::span<const int> idx) {
    for (std::size_t a = 0; a < shape_.size(); ++a) slab_sums_[a][idx[a] - 1] += entries_[pos];
  });
  for (const auto& sums : slab_sums_) {
    std::vector<Rational> b{Rational()};
    for (const Rational& s : sums) b.push_back(b.back() + s);
    breaks_.push_back(std::move(b));
  }
}

MultiMatrix MultiMatrix::from_grid(const ColumnGrid& g) {
  const int m = static_cast<int>(g.size());
  std::vector<Rational> entries(static_cast<std::size_t>(m) * m);
  for (int col = 0; col < m; ++col) {
    if (static_cast<int>(g[col].size()) != m) throw std::invalid_argument("grid is not square");
    for (int row = 0; row < m; ++row) entries[col + static_cast<std::size_t>(m) * row] = g[col][row];
  }
  return MultiMatrix({m, m}, std::move(entries));
}

MultiMatrix MultiMatrix::from_2d(const QtMatrix2& m) { return from_grid(m.columns()); }

std::size_t MultiMatrix::flat(std::span<const int> index) const {
  if (index.size() != shape_.size()) throw std::invalid_argument("index has the wrong dimension");
  std::size_t pos = 0;
  for (std::size_t a = 0; a < index.size(); ++a) {
    if (index[a] < 1 || index[a] > shape_[a]) throw std::out_of_range("index out of range: " + index_str(index));
    pos += static_cast<std::size_t>(index[a] - 1) * strides_[a];
  }
  return pos;
}

void MultiMatrix::unflatten(std::size_t pos, std::span<int> index) const {
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    index[a] = static_cast<int>(pos % shape_[a]) + 1;
    pos /= shape_[a];
  }
}

bool MultiMatrix::is_proper() const {
  return std::any_of(entries_.begin(), entries_.end(), [](const Rational& x) { return x.sign() < 0; });
}

const char* to_string(NdValidation::Code code) {
  switch (code) {
    case NdValidation::Code::Ok: return "ok";
    case NdValidation::Code::SumNotOne: return "SumNotOne";
    case NdValidation::Code::NonpositiveSlab: return "NonpositiveSlab";
    case NdValidation::Code::ConditionCFailure: return "ConditionCFailure";
  }
  return "unknown";
}

std::string NdValidation::message() const {
  switch (code) {
    case Code::Ok: return "valid";
    case Code::SumNotOne: return "entries sum to " + value.str() + ", not 1";
    case Code::NonpositiveSlab:
      return "slab " + std::to_string(slab) + " of axis " + std::to_string(axis) + " has sum " + value.str();
    case Code::ConditionCFailure:
      return "partial slab sum " + value.str() + " at index " + index_str(index) + " along axis " +
             std::to_string(axis) + " leaves [0, slab sum]";
  }
  return "unknown";
}

NdValidation validate_nd(const MultiMatrix& t) {
  NdValidation out;
  Rational total;
  for (const Rational& x : t.entries()) total += x;
  if (total != Rational(1)) {
    out.code = NdValidation::Code::SumNotOne;
    out.value = total;
    return out;
  }
  for (int a = 0; a < t.dims(); ++a)
    for (int k = 1; k <= t.shape()[a]; ++k)
      if (t.slab_sum(a, k).sign() <= 0) {
        out.code = NdValidation::Code::NonpositiveSlab;
        out.axis = a + 1;
        out.slab = k;
        out.value = t.slab_sum(a, k);
        return out;
      }

  const PaddedPrefix prefix(t, false);
  bool failed = false;
  for_each_index(t.shape(), [&](std::size_t, std::span<const int> idx) {
    if (failed) return;
    const std::size_t here = prefix.offset(idx);
    for (int a = 0; a < t.dims(); ++a) {
      const Rational d = prefix.values[here] - prefix.values[here - prefix.strides[a]];
      if (d.sign() < 0 || d > t.slab_sum(a, idx[a])) {
        out.code = NdValidation::Code::ConditionCFailure;
        out.axis = a + 1;
        out.slab = idx[a];
        out.index.assign(idx.begin(), idx.end());
        out.value = d;
        failed = true;
        return;
      }
    }
  });
  return out;
}

Rational contraction_alpha(const MultiMatrix& t) {
  const PaddedPrefix prefix(t, true);
  std::size_t diagonal = 0;
  for (std::size_t s : prefix.strides) diagonal += s;
  Rational best;
  for_each_index(t.shape(), [&](std::size_t, std::span<const int> idx) {
    const std::size_t here = prefix.offset(idx);
    best = std::max(best, prefix.values[here] - prefix.values[here - diagonal]);
  });
  return best;
}

EvaluableN::EvaluableN(int dims, std::string name, RealFn real, ExactFn exact)
    : dims_(dims), name_(std::move(name)), real_(std::move(real)), exact_(std::move(exact)) {}

std::optional<Rational> EvaluableN::exact(std::span<const Rational> u) const {
  if (!exact_) return std::nullopt;
  return exact_(u);
}

EvaluableN product_n(int n) {
  return EvaluableN(
      n, "product",
      [](std::span<const double> u) {
        double p = 1.0;
        for (double x : u) p *= x;
        return p;
      },
      [](std::span<const Rational> u) -> std::optional<Rational> {
        Rational p(1);
        for (const Rational& x : u) p *= x;
        return p;
      });
}

EvaluableN minimum_n(int n) {
  return EvaluableN(
      n, "minimum", [](std::span<const double> u) { return *std::min_element(u.begin(), u.end()); },
      [](std::span<const Rational> u) -> std::optional<Rational> { return *std::min_element(u.begin(), u.end()); });
}

EvaluableN lukasiewicz_n(int n) {
  return EvaluableN(
      n, "lukasiewicz",
      [n](std::span<const double> u) {
        double s = 1.0 - n;
        for (double x : u) s += x;
        return std::max(s, 0.0);
      },
      [n](std::span<const Rational> u) -> std::optional<Rational> {
        Rational s(1 - n);
        for (const Rational& x : u) s += x;
        return std::max(s, Rational());
      });
}

double apply_T_nd(const MultiMatrix& t, const EvaluableN& q, std::span<const double> u) {
  check_point(t.dims(), u);
  const kernels::detail::TransformPlan plan(t);
  auto scratch = plan.scratch();
  return plan.eval(q, u, scratch);
}

std::optional<Rational> apply_T_nd_exact(const MultiMatrix& t, const EvaluableN& q, std::span<const Rational> u) {
  check_point(t.dims(), u);
  const int n = t.dims();
  std::vector<std::vector<Rational>> clamped(n);
  for (int a = 0; a < n; ++a) {
    const auto& b = t.axis_breaks(a);
    for (std::size_t k = 0; k + 1 < b.size(); ++k)
      clamped[a].push_back(std::clamp((u[a] - b[k]) / (b[k + 1] - b[k]), Rational(0), Rational(1)));
  }
  Rational sum;
  std::vector<int> idx(n);
  std::vector<Rational> point(n);
  for (std::size_t pos = 0; pos < t.size(); ++pos) {
    const Rational& w = t.entries()[pos];
    if (w.is_zero()) continue;
    t.unflatten(pos, idx);
    bool vanishes = false;
    for (int a = 0; a < n && !vanishes; ++a) {
      point[a] = clamped[a][idx[a] - 1];
      vanishes = point[a].is_zero();
    }
    if (vanishes) continue;
    const auto value = q.exact(point);
    if (!value) return std::nullopt;
    sum += w * *value;
  }
  return sum;
}

std::optional<Rational> box_volume_exact(const EvaluableN& f, std::span<const Rational> lo,
                                         std::span<const Rational> hi) {
  const std::size_t n = lo.size();
  if (hi.size() != n) throw std::invalid_argument("box corners differ in dimension");
  std::vector<Rational> corner(n);
  Rational sum;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int lows = 0;
    for (std::size_t a = 0; a < n; ++a) {
      const bool low = ((mask >> a) & 1) == 0;
      corner[a] = low ? lo[a] : hi[a];
      lows += low ? 1 : 0;
    }
    const auto value = f.exact(corner);
    if (!value) return std::nullopt;
    sum += (lows % 2 == 0) ? *value : -*value;
  }
  return sum;
}

namespace {

std::size_t lattice_offset(const LatticeValues& l, std::span<const int> idx) {
  std::size_t off = 0, stride = 1;
  for (std::size_t a = 0; a < l.coords.size(); ++a) {
    if (idx[a] < 0 || idx[a] >= static_cast<int>(l.coords[a].size()))
      throw std::out_of_range("lattice index out of range");
    off += static_cast<std::size_t>(idx[a]) * stride;
    stride *= l.coords[a].size();
  }
  return off;
}

}  // namespace

const Rational& LatticeValues::at(std::span<const int> lattice_index) const {
  return values[lattice_offset(*this, lattice_index)];
}

Rational LatticeValues::box_volume(std::span<const int> lo, std::span<const int> hi) const {
  const int n = dims();
  std::vector<int> corner(n);
  Rational sum;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int lows = 0;
    for (int a = 0; a < n; ++a) {
      const bool low = ((mask >> a) & 1) == 0;
      corner[a] = low ? lo[a] : hi[a];
      lows += low ? 1 : 0;
    }
    const Rational& v = at(corner);
    sum += (lows % 2 == 0) ? v : -v;
  }
  return sum;
}

std::pair<double, double> LatticeValues::bounds(std::span<const double> point) const {
  const int n = dims();
  check_point(n, point);
  std::vector<int> lo(n), hi(n);
  double below = 0.0, above = 0.0;
  for (int a = 0; a < n; ++a) {
    const auto& c = coords[a];
    auto it = std::upper_bound(c.begin(), c.end(), point[a], [](double x, const Rational& r) { return x < r.to_double(); });
    int h = static_cast<int>(it - c.begin());
    int l = h - 1;
    if (l >= 0 && c[l].to_double() == point[a]) h = l;
    if (h >= static_cast<int>(c.size())) h = static_cast<int>(c.size()) - 1;
    l = std::max(l, 0);
    lo[a] = l;
    hi[a] = h;
    below += point[a] - c[l].to_double();
    above += c[h].to_double() - point[a];
  }
  const double q_lo = at(lo).to_double();
  const double q_hi = at(hi).to_double();
  return {std::max(q_lo, q_hi - above), std::min(q_hi, q_lo + below)};
}

LatticeValues lattice_eval(const MultiMatrix& t, int depth, std::uint64_t budget) {
  if (depth < 0) throw ParameterOutOfRange("depth must be nonnegative");
  const int n = t.dims();

  std::vector<std::size_t> nonzero;
  for (std::size_t pos = 0; pos < t.size(); ++pos)
    if (!t.entries()[pos].is_zero()) nonzero.push_back(pos);
  std::uint64_t paths = 1;
  for (int k = 0; k < depth; ++k) {
    if (paths > budget / nonzero.size()) throw BudgetExceeded(budget + 1, budget);
    paths *= nonzero.size();
  }

  LatticeValues out;
  out.depth = depth;
  std::vector<int> dims(n);
  std::uint64_t lattice_size = 1;
  for (int a = 0; a < n; ++a) {
    const auto& b = t.axis_breaks(a);
    std::vector<Rational> c{Rational(0), Rational(1)};
    for (int k = 0; k < depth; ++k) {
      std::vector<Rational> next{Rational(0)};
      for (std::size_t i = 1; i < b.size(); ++i)
        for (std::size_t x = 1; x < c.size(); ++x) next.push_back(b[i - 1] + (b[i] - b[i - 1]) * c[x]);
      c = std::move(next);
    }
    dims[a] = static_cast<int>(c.size());
    lattice_size *= c.size();
    if (lattice_size > budget) throw BudgetExceeded(lattice_size, budget);
    out.coords.push_back(std::move(c));
  }

  // Scatter each depth-k cell mass onto its upper corner, then sum prefixes.
  out.values.assign(lattice_size, Rational());
  std::vector<std::vector<int>> entry_index(nonzero.size(), std::vector<int>(n));
  for (std::size_t e = 0; e < nonzero.size(); ++e) t.unflatten(nonzero[e], entry_index[e]);
  std::vector<std::size_t> digits(depth, 0);
  std::vector<int> cell(n);
  for (std::uint64_t p = 0; p < paths; ++p) {
    Rational mass(1);
    std::fill(cell.begin(), cell.end(), 0);
    for (int level = 0; level < depth; ++level) {
      const std::size_t e = digits[level];
      mass *= t.entries()[nonzero[e]];
      for (int a = 0; a < n; ++a) cell[a] = cell[a] * t.shape()[a] + (entry_index[e][a] - 1);
    }
    for (int& c : cell) ++c;
    out.values[lattice_offset(out, cell)] += mass;
    for (int level = depth - 1; level >= 0; --level) {
      if (++digits[level] < nonzero.size()) break;
      digits[level] = 0;
    }
  }
  kernels::prefix_sums(out.values, dims);
  return out;
}

namespace {

Rational step_k(int n) {
  Rational pow3(1);
  for (int k = 0; k < n - 1; ++k) pow3 *= Rational(3);
  return pow3 - Rational(1) + Rational(2 * n - 1, 2 * n - 3);
}

// Entry of the cube pattern on {lo, lo+1, lo+2}^n centred at lo+1.
Rational cube_entry(std::span<const int> idx, int centre, int n, const Rational& unit) {
  int at_centre = 0;
  for (int i : idx) at_centre += (i == centre) ? 1 : 0;
  if (at_centre == n) return -unit;
  if (at_centre == n - 1) return Rational(2 * n - 1, 2 * n - 3) * unit;
  return unit;
}

}  // namespace

MultiMatrix make_step_matrix(int n, const Rational& r) {
  if (n < 2) throw ParameterOutOfRange("ambient dimension must be at least 2");
  if (!(r > Rational(0) && r < Rational(1))) throw ParameterOutOfRange("r must lie in ]0,1[: " + r.str());
  const Rational unit = r / Rational(3) / step_k(n);
  std::vector<int> shape(n, 4);
  std::vector<Rational> entries(checked_size(shape));
  for_each_index(shape, [&](std::size_t pos, std::span<const int> idx) {
    const int ones = static_cast<int>(std::count(idx.begin(), idx.end(), 1));
    if (ones == n)
      entries[pos] = Rational(1) - r;
    else if (ones > 0)
      entries[pos] = Rational();
    else
      entries[pos] = cube_entry(idx, 3, n, unit);
  });
  return MultiMatrix(std::move(shape), std::move(entries));
}

MultiMatrix make_cube_matrix(int n) {
  if (n < 2) throw ParameterOutOfRange("ambient dimension must be at least 2");
  const Rational unit = Rational(1, 3) / step_k(n);
  std::vector<int> shape(n, 3);
  std::vector<Rational> entries(checked_size(shape));
  for_each_index(shape, [&](std::size_t pos, std::span<const int> idx) { entries[pos] = cube_entry(idx, 2, n, unit); });
  return MultiMatrix(std::move(shape), std::move(entries));
}

double solve_dim_nd(int n, double r, double tol) {
  if (n < 2) throw ParameterOutOfRange("ambient dimension must be at least 2");
  if (!(r > 0.0 && r < 1.0)) throw ParameterOutOfRange("r must lie in ]0,1[");
  auto h = [&](double s) { return family_g(r, s, n) - 1.0; };
  double lo = 1.0, hi = static_cast<double>(n);
  if (!(h(lo) > 0.0 && h(hi) < 0.0)) throw NoRootInRange("no sign change of the dimension equation on ]1, n[");
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  if (std::abs(h(s)) > tol) throw NoRootInRange("bisection stalled with residual above tolerance");
  return s;
}

void write_multi_json(std::ostream& os, const MultiMatrix& t) {
  nlohmann::json j;
  j["n"] = t.dims();
  j["shape"] = t.shape();
  std::vector<std::string> entries;
  for (const Rational& x : t.entries()) entries.push_back(x.str());
  j["entries"] = entries;
  os << j.dump() << '\n';
}

MultiMatrix read_multi_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed matrix JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("shape") || !j.contains("entries"))
    throw std::invalid_argument("matrix JSON needs \"shape\" and \"entries\"");
  std::vector<int> shape;
  std::vector<Rational> entries;
  try {
    shape = j.at("shape").get<std::vector<int>>();
    for (const auto& e : j.at("entries")) {
      if (e.is_string())
        entries.push_back(Rational::parse(e.get<std::string>()));
      else if (e.is_number_integer())
        entries.emplace_back(e.get<std::int64_t>());
      else
        throw std::invalid_argument("entries must be rational strings or integers");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed matrix JSON: ") + e.what());
  }
  if (j.contains("n") && j["n"].get<int>() != static_cast<int>(shape.size()))
    throw std::invalid_argument("\"n\" does not match the length of \"shape\"");
  return MultiMatrix(std::move(shape), std::move(entries));
}

void write_lattice_json(std::ostream& os, const LatticeValues& lattice) {
  nlohmann::json j;
  j["n"] = lattice.dims();
  j["depth"] = lattice.depth;
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& axis : lattice.coords) {
    std::vector<std::string> c;
    for (const Rational& x : axis) c.push_back(x.str());
    coords.push_back(c);
  }
  j["coords"] = coords;
  std::vector<std::string> values;
  for (const Rational& x : lattice.values) values.push_back(x.str());
  j["values"] = values;
  os << j.dump() << '\n';
}

}  // namespace qcf
