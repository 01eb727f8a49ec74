#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "qcf/ifs_support.hpp"
#include "qcf/multi_nd.hpp"

namespace qcf::kernels::detail {

/// Pixels of [lo, hi] that overlap it with positive length: [first, last).
inline std::pair<int, int> pixel_span(const Rational& lo, const Rational& hi, int resolution) {
  const Rational res(resolution);
  int first = static_cast<int>((lo * res).floor());
  int last = static_cast<int>((hi * res).ceil());
  first = std::clamp(first, 0, resolution);
  last = std::clamp(last, first, resolution);
  return {first, last};
}

/// parent o omega: the image of `child` placed inside `parent`.
inline Box2 compose(const Box2& parent, const Box2& child) {
  const Rational w = parent.width(), h = parent.height();
  return {parent.u_lo + w * child.u_lo, parent.u_lo + w * child.u_hi, parent.v_lo + h * child.v_lo,
          parent.v_lo + h * child.v_hi};
}

inline Box2 unit_box() { return {Rational(0), Rational(1), Rational(0), Rational(1)}; }

/// Precomputed pieces of T(Q)(u) = sum_i t_i Q(r_i(u)) over the nonzero t_i.
class TransformPlan {
 public:
  explicit TransformPlan(const MultiMatrix& t) : dims_(t.dims()) {
    for (int a = 0; a < dims_; ++a) {
      std::vector<double> b;
      for (const auto& x : t.axis_breaks(a)) b.push_back(x.to_double());
      breaks_.push_back(std::move(b));
    }
    std::vector<int> idx(dims_);
    for (std::size_t pos = 0; pos < t.size(); ++pos) {
      if (t.entries()[pos].is_zero()) continue;
      t.unflatten(pos, idx);
      for (int& i : idx) --i;
      weights_.push_back(t.entries()[pos].to_double());
      index_.insert(index_.end(), idx.begin(), idx.end());
    }
  }

  int dims() const { return dims_; }

  struct Scratch {
    std::vector<std::vector<double>> clamped;
    std::vector<double> point;
  };

  Scratch scratch() const {
    Scratch s;
    for (const auto& b : breaks_) s.clamped.emplace_back(b.size() - 1);
    s.point.resize(dims_);
    return s;
  }

  double eval(const EvaluableN& q, std::span<const double> u, Scratch& s) const {
    for (int a = 0; a < dims_; ++a) {
      const auto& b = breaks_[a];
      for (std::size_t k = 0; k + 1 < b.size(); ++k)
        s.clamped[a][k] = std::clamp((u[a] - b[k]) / (b[k + 1] - b[k]), 0.0, 1.0);
    }
    double sum = 0.0;
    for (std::size_t e = 0; e < weights_.size(); ++e) {
      const int* idx = &index_[e * dims_];
      bool vanishes = false;
      for (int a = 0; a < dims_; ++a) {
        const double c = s.clamped[a][idx[a]];
        if (c == 0.0) {
          vanishes = true;
          break;
        }
        s.point[a] = c;
      }
      if (!vanishes) sum += weights_[e] * q(s.point);
    }
    return sum;
  }

 private:
  int dims_;
  std::vector<std::vector<double>> breaks_;
  std::vector<double> weights_;
  std::vector<int> index_;  // zero-based, dims_ per nonzero entry
};

/// Carries the first exception out of an OpenMP region.
class ErrorSlot {
 public:
  template <typename F>
  void run(F&& body) noexcept {
    try {
      body();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

inline std::uint64_t checked_power(std::uint64_t base, int exponent, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (int k = 0; k < exponent; ++k) {
    if (base != 0 && out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

}  // namespace qcf::kernels::detail
