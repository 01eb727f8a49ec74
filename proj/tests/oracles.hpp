#pragma once

// Independent reference computations used by the tests. Everything here is
// written from the definitions directly, without calling into the library's
// algorithms, so that agreement is meaningful.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qcf/qt_matrix.hpp"
#include "qcf/rational.hpp"

namespace oracle {

using qcf::ColumnGrid;
using qcf::Rational;
using Code = qcf::ValidationFailure::Code;

/// Validity by enumerating every contiguous block (O(m^6) work, fine for m <= 5).
inline std::optional<Code> brute_force_check(const ColumnGrid& g) {
  const int m = static_cast<int>(g.size());
  for (const auto& col : g)
    if (static_cast<int>(col.size()) != m) return Code::NotSquare;
  if (m < 2) return Code::OrderTooSmall;

  Rational total;
  for (const auto& col : g)
    for (const auto& x : col) total += x;
  if (total != Rational(1)) return Code::SumNotOne;

  for (int k = 0; k < m; ++k) {
    Rational col_sum, row_sum;
    for (int l = 0; l < m; ++l) {
      col_sum += g[k][l];
      row_sum += g[l][k];
    }
    if (col_sum.sign() <= 0 || row_sum.sign() <= 0) return Code::NonpositiveLine;
  }

  for (int c0 = 0; c0 < m; ++c0)
    for (int c1 = c0; c1 < m; ++c1)
      for (int r0 = 0; r0 < m; ++r0)
        for (int r1 = r0; r1 < m; ++r1) {
          if (!(c0 == 0 || r0 == 0 || c1 == m - 1 || r1 == m - 1)) continue;
          Rational s;
          for (int c = c0; c <= c1; ++c)
            for (int r = r0; r <= r1; ++r) s += g[c][r];
          if (s.sign() < 0) return Code::NegativeBoundarySubmatrix;
        }
  return std::nullopt;
}

/// Column and row breakpoints from line sums.
struct Breaks {
  std::vector<Rational> p, q;
};

inline Breaks breaks_of(const ColumnGrid& g) {
  const int m = static_cast<int>(g.size());
  Breaks b{{Rational()}, {Rational()}};
  for (int k = 0; k < m; ++k) {
    Rational col_sum, row_sum;
    for (int l = 0; l < m; ++l) {
      col_sum += g[k][l];
      row_sum += g[l][k];
    }
    b.p.push_back(b.p.back() + col_sum);
    b.q.push_back(b.q.back() + row_sum);
  }
  return b;
}

/// Q_T at a depth-l cell corner (u, v): total mass of depth-l cells lying in
/// [0,u] x [0,v]. Enumerates all m^(2l) cells, zero ones included.
inline Rational corner_value(const ColumnGrid& g, int depth, const Rational& u, const Rational& v) {
  const int m = static_cast<int>(g.size());
  const Breaks b = breaks_of(g);
  Rational total;
  std::vector<int> cols(depth, 0), rows(depth, 0);
  while (true) {
    Rational u_lo, u_w(1), v_lo, v_w(1), mass(1);
    for (int k = 0; k < depth; ++k) {
      u_lo += u_w * b.p[cols[k]];
      u_w *= b.p[cols[k] + 1] - b.p[cols[k]];
      v_lo += v_w * b.q[rows[k]];
      v_w *= b.q[rows[k] + 1] - b.q[rows[k]];
      mass *= g[cols[k]][rows[k]];
    }
    if (u_lo + u_w <= u && v_lo + v_w <= v) total += mass;
    int k = 0;
    for (; k < depth; ++k) {
      if (++rows[k] < m) break;
      rows[k] = 0;
      if (++cols[k] < m) break;
      cols[k] = 0;
    }
    if (k == depth) break;
  }
  return total;
}

struct AffineFit {
  double g1 = 0, g2 = 0, g3 = 0;
  double max_residual = 0;
};

/// Least-squares plane through (u, v, value) samples.
inline AffineFit fit_affine(const std::vector<double>& u, const std::vector<double>& v,
                            const std::vector<double>& value) {
  const Eigen::Index k = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd a(k, 3);
  Eigen::VectorXd y(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = u[i];
    a(i, 2) = v[i];
    y(i) = value[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  AffineFit fit{c(0), c(1), c(2), 0.0};
  fit.max_residual = (a * c - y).cwiseAbs().maxCoeff();
  return fit;
}

/// (1-r)^s + 3^n (r/3)^s = 1 solved for s by plain bisection in long double.
inline double family_s(double r, int n = 2) {
  long double lo = 1.0L, hi = static_cast<long double>(n);
  const long double rr = r;
  for (int it = 0; it < 200; ++it) {
    const long double mid = (lo + hi) / 2;
    const long double g = std::pow(1.0L - rr, mid) + std::pow(3.0L, n) * std::pow(rr / 3.0L, mid);
    (g > 1.0L ? lo : hi) = mid;
  }
  return static_cast<double>((lo + hi) / 2);
}

/// Naive n-dimensional condition scan; indices one-based, axis 0 fastest.
struct DenseNd {
  std::vector<int> shape;
  std::vector<Rational> t;

  std::size_t pos(const std::vector<int>& idx) const {
    std::size_t p = 0, stride = 1;
    for (std::size_t a = 0; a < shape.size(); ++a) {
      p += static_cast<std::size_t>(idx[a] - 1) * stride;
      stride *= shape[a];
    }
    return p;
  }

  template <typename F>
  void each(F&& f) const {
    std::vector<int> idx(shape.size(), 1);
    while (true) {
      f(idx);
      std::size_t a = 0;
      while (a < shape.size() && ++idx[a] > shape[a]) idx[a++] = 1;
      if (a == shape.size()) return;
    }
  }

  /// Sum of t_i over i <= r, optionally with |t|.
  Rational lower_sum(const std::vector<int>& r, bool absolute = false) const {
    for (int x : r)
      if (x <= 0) return Rational();
    Rational s;
    each([&](const std::vector<int>& i) {
      for (std::size_t a = 0; a < i.size(); ++a)
        if (i[a] > r[a]) return;
      s += absolute ? qcf::abs(t[pos(i)]) : t[pos(i)];
    });
    return s;
  }

  bool valid() const {
    Rational total;
    for (const auto& x : t) total += x;
    if (total != Rational(1)) return false;
    for (std::size_t a = 0; a < shape.size(); ++a)
      for (int k = 1; k <= shape[a]; ++k) {
        Rational s;
        each([&](const std::vector<int>& i) {
          if (i[a] == k) s += t[pos(i)];
        });
        if (s.sign() <= 0) return false;
      }
    bool ok = true;
    each([&](const std::vector<int>& r) {
      for (std::size_t a = 0; a < shape.size() && ok; ++a) {
        Rational slab;
        each([&](const std::vector<int>& i) {
          if (i[a] == r[a]) slab += t[pos(i)];
        });
        std::vector<int> prev = r;
        --prev[a];
        const Rational d = lower_sum(r) - lower_sum(prev);
        if (d.sign() < 0 || d > slab) ok = false;
      }
    });
    return ok;
  }

  Rational alpha() const {
    Rational best;
    each([&](const std::vector<int>& i) {
      std::vector<int> prev = i;
      for (int& x : prev) --x;
      best = std::max(best, lower_sum(i, true) - lower_sum(prev, true));
    });
    return best;
  }
};

/// Uniformly random rational in [0, 1] with denominator up to `max_den`.
inline Rational random_unit_rational(std::mt19937_64& rng, std::int64_t max_den) {
  std::uniform_int_distribution<std::int64_t> den(1, max_den);
  const std::int64_t q = den(rng);
  std::uniform_int_distribution<std::int64_t> num(0, q);
  return Rational(num(rng), q);
}

}  // namespace oracle
