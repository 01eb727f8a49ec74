#include <gtest/gtest.h>

#include <omp.h>

#include <random>

#include "qcf/kernels.hpp"
#include "qcf/render.hpp"

using namespace qcf;

namespace {

QtMatrix2 t0() { return canonical_matrix(CanonicalKind::t0()); }
QtMatrix2 tr_half() { return canonical_matrix(CanonicalKind::tr(Rational(1, 2))); }

// Runs the body with several thread counts so the parallel path really splits.
template <typename F>
void with_threads(F&& body) {
  const int saved = omp_get_max_threads();
  for (int threads : {1, 3, 8}) {
    omp_set_num_threads(threads);
    body(threads);
  }
  omp_set_num_threads(saved);
}

}  // namespace

TEST(Kernels, EvaluateGrid) {
  const FixedPointEvaluator f(tr_half());
  const auto ref = kernels::serial::evaluate_grid(f, 33);
  with_threads([&](int threads) {
    const auto par = kernels::evaluate_grid(f, 33);
    ASSERT_EQ(par.size(), ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
      EXPECT_EQ(par[k].value, ref[k].value) << threads;
      EXPECT_EQ(par[k].error_bound, ref[k].error_bound);
    }
  });
  EXPECT_THROW(kernels::evaluate_grid(f, 1), std::invalid_argument);
}

TEST(Kernels, ExpandPaths) {
  const auto maps = nonzero_maps(tr_half()).maps;
  std::vector<SignedRect> ref_rects, rects;
  std::vector<std::uint16_t> ref_paths, paths;
  kernels::serial::expand_paths(maps, 3, ref_rects, ref_paths);
  ASSERT_EQ(ref_rects.size(), 1000u);
  with_threads([&](int) {
    kernels::expand_paths(maps, 3, rects, paths);
    ASSERT_EQ(rects.size(), ref_rects.size());
    EXPECT_EQ(paths, ref_paths);
    for (std::size_t k = 0; k < rects.size(); ++k) {
      EXPECT_EQ(rects[k].mass, ref_rects[k].mass);
      EXPECT_EQ(rects[k].box.u_lo, ref_rects[k].box.u_lo);
      EXPECT_EQ(rects[k].box.u_hi, ref_rects[k].box.u_hi);
      EXPECT_EQ(rects[k].box.v_lo, ref_rects[k].box.v_lo);
      EXPECT_EQ(rects[k].box.v_hi, ref_rects[k].box.v_hi);
    }
  });
}

TEST(Kernels, ExpandPathsDeepTail) {
  // 5^6 paths: enough leading digits to split the work with levels left over.
  const auto maps = nonzero_maps(t0()).maps;
  std::vector<SignedRect> ref_rects, rects;
  std::vector<std::uint16_t> ref_paths, paths;
  kernels::serial::expand_paths(maps, 6, ref_rects, ref_paths);
  with_threads([&](int) {
    kernels::expand_paths(maps, 6, rects, paths);
    ASSERT_EQ(rects.size(), ref_rects.size());
    EXPECT_EQ(paths, ref_paths);
    for (std::size_t k = 0; k < rects.size(); ++k) {
      EXPECT_EQ(rects[k].mass, ref_rects[k].mass);
      EXPECT_EQ(rects[k].box, ref_rects[k].box);
    }
  });
}

TEST(Kernels, ExpandPathsDepthZero) {
  std::vector<SignedRect> rects;
  std::vector<std::uint16_t> paths;
  kernels::expand_paths(nonzero_maps(t0()).maps, 0, rects, paths);
  ASSERT_EQ(rects.size(), 1u);
  EXPECT_EQ(rects[0].mass, Rational(1));
  EXPECT_TRUE(paths.empty());
}

TEST(Kernels, Rasterize) {
  const SupportApprox s = enumerate_support(tr_half(), 4);
  const auto ref = kernels::serial::rasterize(s.rects(), 300);
  with_threads([&](int) { EXPECT_EQ(kernels::rasterize(s.rects(), 300), ref); });
}

TEST(Kernels, BoxCounts) {
  const SignedMask m = rasterize_support(enumerate_support(t0(), 5), 243);
  const OccupancyGrid g = m.occupancy();
  const std::vector<int> sides{1, 3, 9, 27, 81};
  const auto ref = kernels::serial::box_counts(g, sides);
  EXPECT_EQ(ref, (std::vector<std::int64_t>{3125, 625, 125, 25, 5}));
  with_threads([&](int) { EXPECT_EQ(kernels::box_counts(g, sides), ref); });
}

TEST(Kernels, TransformGapSup) {
  const MultiMatrix t = make_step_matrix(3, Rational(1, 2));
  const double ref = kernels::serial::transform_gap_sup(t, product_n(3), minimum_n(3), 17);
  EXPECT_GT(ref, 0.0);
  with_threads([&](int) { EXPECT_EQ(kernels::transform_gap_sup(t, product_n(3), minimum_n(3), 17), ref); });
}

TEST(Kernels, PrefixSums) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> num(-5, 5);
  const std::vector<int> dims{5, 4, 3};
  std::vector<Rational> values(60);
  for (auto& v : values) v = Rational(num(rng), 7);
  auto ref = values;
  kernels::serial::prefix_sums(ref, dims);
  // Direct definition at a few points.
  auto at = [&](int a, int b, int c) { return static_cast<std::size_t>(a + 5 * (b + 4 * c)); };
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 3; ++c) {
        Rational s;
        for (int x = 0; x <= a; ++x)
          for (int y = 0; y <= b; ++y)
            for (int z = 0; z <= c; ++z) s += values[at(x, y, z)];
        EXPECT_EQ(ref[at(a, b, c)], s);
      }
  with_threads([&](int) {
    auto par = values;
    kernels::prefix_sums(par, dims);
    EXPECT_EQ(par, ref);
  });
  auto wrong = values;
  wrong.pop_back();
  EXPECT_THROW(kernels::prefix_sums(wrong, dims), std::invalid_argument);
}

TEST(Kernels, ExceptionsLeaveParallelRegions) {
  // 1/(2^40) squared overflows int64 denominators inside the worker threads.
  const Rational tiny(1, std::int64_t{1} << 40);
  const std::vector<SimilarityMap> maps{{{1, 1}, {0, tiny, 0, tiny}, tiny}, {{2, 2}, {tiny, 1, tiny, 1}, tiny}};
  std::vector<SignedRect> rects;
  std::vector<std::uint16_t> paths;
  EXPECT_THROW(kernels::expand_paths(maps, 3, rects, paths), RationalOverflow);
}
