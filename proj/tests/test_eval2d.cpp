#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qcf/eval2d.hpp"

using namespace qcf;

namespace {

QtMatrix2 t0() { return canonical_matrix(CanonicalKind::t0()); }
QtMatrix2 tr_half() { return canonical_matrix(CanonicalKind::tr(Rational(1, 2))); }
QtMatrix2 uniform2() { return build_matrix(ColumnGrid(2, std::vector<Rational>(2, Rational(1, 4)))); }

}  // namespace

TEST(Eval2d, LocateCell) {
  const PartitionPair p = partitions(t0());
  EXPECT_EQ(locate_cell(p, 0.5, 0.5), (CellIndex{2, 2}));
  EXPECT_EQ(locate_cell(p, Rational(1, 3), Rational(0)), (CellIndex{2, 1}));
  EXPECT_EQ(locate_cell(p, 1.0, 1.0), (CellIndex{3, 3}));
  EXPECT_EQ(locate_cell(partitions(tr_half()), 1.0, 0.0), (CellIndex{4, 1}));
  EXPECT_THROW(locate_cell(p, 1.5, 0.2), OutOfDomain);
  EXPECT_THROW(locate_cell(p, 0.2, -0.1), OutOfDomain);
}

TEST(Eval2d, ApplyTAtCentre) {
  EXPECT_NEAR(apply_T(t0(), product_copula(), 0.5, 0.5), 0.25, 1e-15);
  EXPECT_EQ(apply_T_exact(t0(), product_copula(), Rational(1, 2), Rational(1, 2)), Rational(1, 4));
}

TEST(Eval2d, ApplyTKeepsBoundary) {
  std::mt19937_64 rng(5);
  for (const QtMatrix2& m : {t0(), tr_half(), uniform2()})
    for (const Evaluable& q : {product_copula(), minimum_copula(), lukasiewicz_copula()})
      for (int k = 0; k < 50; ++k) {
        const Rational u = oracle::random_unit_rational(rng, 97);
        EXPECT_EQ(apply_T_exact(m, q, u, Rational(1)), u);
        EXPECT_EQ(apply_T_exact(m, q, Rational(1), u), u);
        EXPECT_EQ(apply_T_exact(m, q, u, Rational(0)), Rational());
      }
}

TEST(Eval2d, UniformMatrixFixesProduct) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double u = unit(rng), v = unit(rng);
    EXPECT_NEAR(apply_T(uniform2(), product_copula(), u, v), u * v, 1e-15);
  }
}

TEST(Eval2d, CellVolumeEqualsEntryForAnyBase) {
  for (const QtMatrix2& m : {t0(), tr_half(), canonical_matrix(CanonicalKind::tr(Rational(3, 10)))}) {
    const PartitionPair p = partitions(m);
    for (const Evaluable& base : {product_copula(), minimum_copula(), lukasiewicz_copula()}) {
      const Evaluable tq = transformed(m, base);
      for (int i = 1; i <= m.order(); ++i)
        for (int j = 1; j <= m.order(); ++j) EXPECT_EQ(volume_exact(tq, p.cell(i, j)), m.at(i, j));
    }
  }
}

TEST(Eval2d, FixedPointCentreOfT0) {
  const FixedPointEvaluator f(t0());
  const EvalResult r = f.eval(0.5, 0.5);
  EXPECT_NEAR(r.value, 0.25, 1e-12);
  EXPECT_LE(r.error_bound, 1e-12);
  EXPECT_EQ(f.eval_exact(Rational(1, 2), Rational(1, 2)), Rational(1, 4));
}

TEST(Eval2d, FixedPointBoundaryIsExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const QtMatrix2& m : {t0(), tr_half()}) {
    const FixedPointEvaluator f(m);
    for (int k = 0; k < 100; ++k) {
      const double u = unit(rng);
      EXPECT_EQ(f.eval(u, 0.0).value, 0.0);
      EXPECT_EQ(f.eval(0.0, u).value, 0.0);
      EXPECT_EQ(f.eval(u, 1.0).value, u);
      EXPECT_EQ(f.eval(1.0, u).value, u);
    }
  }
}

// At depth-l corners Q_T equals the total mass of the depth-l cells below-left.
TEST(Eval2d, CornerValuesMatchCellMassOracle) {
  for (const QtMatrix2& m : {t0(), tr_half(), uniform2()}) {
    const FixedPointEvaluator f(m);
    const ColumnGrid g = m.columns();
    const oracle::Breaks b = oracle::breaks_of(g);
    std::vector<Rational> coords;
    for (const auto& outer : b.p) coords.push_back(outer);
    // depth-2 corners along each axis
    std::vector<Rational> fine;
    for (std::size_t i = 1; i < b.p.size(); ++i)
      for (const auto& x : b.p) fine.push_back(b.p[i - 1] + (b.p[i] - b.p[i - 1]) * x);
    for (const Rational& u : fine)
      for (const Rational& v : fine) {
        const Rational expected = oracle::corner_value(g, 2, u, v);
        EXPECT_EQ(f.eval_exact(u, v), expected) << u << "," << v;
        EXPECT_NEAR(f.eval(u.to_double(), v.to_double()).value, expected.to_double(), 1e-12);
      }
  }
}

TEST(Eval2d, FixedPointIsSelfConsistent) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const QtMatrix2& m : {t0(), tr_half()}) {
    const FixedPointEvaluator f(m);
    const Evaluable q = f.as_evaluable();
    for (int k = 0; k < 300; ++k) {
      const double u = unit(rng), v = unit(rng);
      EXPECT_NEAR(q(u, v), apply_T(m, q, u, v), 2 * f.tolerance());
    }
  }
}

TEST(Eval2d, IteratesFromDifferentBasesConverge) {
  // max |t| = 1/3 for T0, so 25 steps shrink the gap below 2e-12.
  Evaluable from_pi = product_copula(), from_m = minimum_copula();
  const QtMatrix2 m = t0();
  for (int step = 0; step < 25; ++step) {
    from_pi = transformed(m, from_pi);
    from_m = transformed(m, from_m);
  }
  const FixedPointEvaluator f(m);
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b) {
      const double u = a / 20.0, v = b / 20.0;
      EXPECT_NEAR(from_pi(u, v), from_m(u, v), 2e-12);
      EXPECT_NEAR(from_pi(u, v), f.eval(u, v).value, 2e-12);
    }
}

TEST(Eval2d, Volumes) {
  const FixedPointEvaluator f(t0());
  const Evaluable q = f.as_evaluable();
  const Rational a(1, 3), b(2, 3), c(4, 9), d(5, 9);
  EXPECT_EQ(volume_exact(q, Box2{a, b, a, b}), Rational(-1, 3));
  EXPECT_EQ(volume_exact(q, Box2{c, d, c, d}), Rational(1, 9));
  EXPECT_EQ(volume_exact(q, Box2{0, 1, 0, 1}), Rational(1));
  const EvalResult r = volume(q, RealRect{1.0 / 3, 2.0 / 3, 1.0 / 3, 2.0 / 3});
  EXPECT_NEAR(r.value, -1.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(r.error_bound, 4 * f.tolerance());
  EXPECT_EQ(volume(q, RealRect{0.3, 0.3, 0.1, 0.9}).value, 0.0);
}

TEST(Eval2d, PathGeometryAndMass) {
  const QtMatrix2 m = t0();
  const PartitionPair p = partitions(m);
  const CellPath centre{{2, 2}, {2, 2}};
  const Box2 box = cell_box(p, centre);
  EXPECT_EQ(box.u_lo, Rational(4, 9));
  EXPECT_EQ(box.u_hi, Rational(5, 9));
  EXPECT_EQ(path_mass(m, centre), Rational(1, 9));
  EXPECT_EQ(path_mass(m, CellPath{{2, 1}, {2, 2}}), Rational(-1, 9));
}

TEST(Eval2d, AffineCoefficientsKnownCells) {
  const AffineCoefficients origin = affine_coefficients(t0(), CellPath{{1}, {1}});
  EXPECT_EQ(origin.g1, Rational());
  EXPECT_EQ(origin.g2, Rational());
  EXPECT_EQ(origin.g3, Rational());

  const AffineCoefficients below = affine_coefficients(tr_half(), CellPath{{2}, {1}});
  EXPECT_EQ(below.g2, Rational());
  EXPECT_EQ(below.g3, Rational(1));

  EXPECT_THROW(affine_coefficients(t0(), CellPath{{2}, {2}}), PathMassNonzero);
}

// Every zero cell up to depth 2 of both matrices: the exact coefficients match
// a least-squares fit of sampled values and satisfy the monotone/Lipschitz bounds.
TEST(Eval2d, AffineCoefficientsMatchFit) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const QtMatrix2& m : {t0(), tr_half()}) {
    const FixedPointEvaluator f(m);
    const PartitionPair p = partitions(m);
    const int n = m.order();
    std::vector<CellPath> paths;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        if (m.at(i, j).is_zero()) {
          paths.push_back({{i}, {j}});
          continue;
        }
        for (int i2 = 1; i2 <= n; ++i2)
          for (int j2 = 1; j2 <= n; ++j2)
            if (m.at(i2, j2).is_zero()) paths.push_back({{i, i2}, {j, j2}});
      }
    ASSERT_FALSE(paths.empty());
    for (const CellPath& path : paths) {
      const AffineCoefficients g = affine_coefficients(m, path);
      EXPECT_GE(g.g2, Rational());
      EXPECT_GE(g.g3, Rational());
      EXPECT_LE(g.g2 + g.g3, Rational(2));
      const Box2 box = cell_box(p, path);
      std::vector<double> us, vs, values;
      for (int k = 0; k < 40; ++k) {
        const double u = box.u_lo.to_double() + unit(rng) * box.width().to_double();
        const double v = box.v_lo.to_double() + unit(rng) * box.height().to_double();
        us.push_back(u);
        vs.push_back(v);
        values.push_back(f.eval(u, v).value);
        EXPECT_NEAR(g(u, v), values.back(), 1e-12);
      }
      const oracle::AffineFit fit = oracle::fit_affine(us, vs, values);
      EXPECT_LT(fit.max_residual, 1e-10);
      EXPECT_NEAR(fit.g2, g.g2.to_double(), 1e-6);
      EXPECT_NEAR(fit.g3, g.g3.to_double(), 1e-6);
    }
  }
}

TEST(Eval2d, AxiomReport) {
  const FixedPointEvaluator f(t0());
  EXPECT_TRUE(axiom_report(f.as_evaluable(), 2000, 1).ok());
  EXPECT_TRUE(axiom_report(product_copula(), 2000, 1).ok());
  EXPECT_TRUE(axiom_report(lukasiewicz_copula(), 2000, 1).ok());

  const Evaluable bumpy(Evaluable::Origin::Custom, "bumpy", [](double u, double v) {
    return u * v + 0.2 * std::sin(40 * std::numbers::pi * u) * std::sin(std::numbers::pi * v);
  });
  const AxiomReport bad = axiom_report(bumpy, 2000, 1);
  EXPECT_FALSE(bad.ok());
  EXPECT_GT(bad.lipschitz_violations, 0);
  EXPECT_GT(bad.monotone_violations, 0);

  // Same seed, same report.
  const AxiomReport again = axiom_report(bumpy, 2000, 1);
  EXPECT_EQ(again.lipschitz_violations, bad.lipschitz_violations);
  EXPECT_EQ(again.lipschitz_worst, bad.lipschitz_worst);
}

TEST(Eval2d, MaxDepthReportsLargerBound) {
  const FixedPointEvaluator shallow(t0(), 1e-12, 3);
  const EvalResult r = shallow.eval(0.5, 0.5);
  EXPECT_NEAR(r.error_bound, 1.0 / 27, 1e-15);
  EXPECT_LE(std::abs(r.value - 0.25), r.error_bound);
}

TEST(Eval2d, GridCsv) {
  const FixedPointEvaluator f(t0());
  std::vector<EvalResult> grid;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) grid.push_back(f.eval(a / 2.0, b / 2.0));
  std::ostringstream os;
  write_grid_csv(os, 3, grid);
  std::istringstream lines(os.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "u,v,value,error_bound");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 9);
  EXPECT_NE(os.str().find("0.5,0.5,0.25"), std::string::npos);
}
