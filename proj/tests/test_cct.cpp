#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ccx/cct.hpp"
#include "ccx/metrics.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

namespace {

using ccx::ScalarGrid;
using ccx::TransformParams;

// double-Moreau reference for the lower transform, built on the brute-force
// envelope oracles
std::vector<double> brute_lower(const ScalarGrid& f, double lambda) {
  ScalarGrid mid = f.like(oracle::lower_moreau(f, lambda));
  return oracle::upper_moreau(mid, lambda);
}

std::vector<double> brute_upper(const ScalarGrid& f, double lambda) {
  ScalarGrid mid = f.like(oracle::upper_moreau(f, lambda));
  return oracle::lower_moreau(mid, lambda);
}

TEST(LowerTransform, MatchesBruteForceComposition) {
  std::mt19937 rng(111);
  for (int trial = 0; trial < 15; ++trial) {
    auto f = testutil::random_grid(rng, testutil::random_shape(rng, 14), -3.0, 3.0);
    for (double lam : {0.3, 1.0, 4.0}) {
      auto got = ccx::lower_transform(f, TransformParams{}.with_lambda(lam));
      auto want = brute_lower(f, lam);
      for (std::size_t c = 0; c < f.size(); ++c) EXPECT_NEAR(got[c], want[c], 1e-9);
    }
  }
}

TEST(UpperTransform, MatchesBruteForceComposition) {
  std::mt19937 rng(222);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = testutil::random_grid(rng, testutil::random_shape(rng, 14), -3.0, 3.0);
    auto got = ccx::upper_transform(f, TransformParams{}.with_lambda(0.7));
    auto want = brute_upper(f, 0.7);
    for (std::size_t c = 0; c < f.size(); ++c) EXPECT_NEAR(got[c], want[c], 1e-9);
  }
}

TEST(LowerTransform, NegativeAbsClosedForm) {
  // f(x) = -|x|, lambda = 0.25: the transform digs a parabolic cap
  // -1/(4 lambda) - lambda x^2 between the minima at |x| = 1/(2 lambda) = 2
  const double lam = 0.25;
  const int n = 241;
  ScalarGrid f({n}, 0.0, {0.05}, {-6.0});
  for (int i = 0; i < n; ++i) f.values()[i] = -std::abs(f.coord(0, i));

  auto cl = ccx::lower_transform(f, TransformParams{}.with_lambda(lam));
  for (int i = 0; i < n; ++i) {
    const double x = f.coord(0, i);
    if (std::abs(x) <= 2.0)
      EXPECT_NEAR(cl[i], -1.0 - 0.25 * x * x, 1e-9) << "x=" << x;
    else if (std::abs(x) <= 5.0)
      EXPECT_NEAR(cl[i], -std::abs(x), 1e-9) << "x=" << x;
  }
  EXPECT_NEAR(cl[120], -1.0, 1e-12);  // center cell

  // cross-check through the independent hull route: co[f + lambda x^2] - q
  std::vector<double> xs(n), aug(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = f.coord(0, i);
    aug[i] = f[i] + lam * xs[i] * xs[i];
  }
  auto hull = oracle::lower_hull_values(xs, aug);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(cl[i], hull[i] - lam * xs[i] * xs[i], 1e-9);
}

TEST(LowerTransform, ConvexDataIsFixed) {
  // samples of a convex function are a fixed point. The chord-based scheme
  // keeps them everywhere; the Moreau composition keeps them wherever the
  // touching parabola's contact point stays inside the domain, i.e. beyond a
  // boundary margin of max|grad f| / (2 lambda).
  const int n = 15;
  const double h = 0.5;
  ScalarGrid f({n, n}, 0.0, {h, h}, {-3.5, -3.5});
  double gmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = f.coord(0, i), y = f.coord(1, j);
      f.values()[static_cast<std::size_t>(i) * n + j] =
          0.1 * x * x + 0.08 * x * y + 0.1 * y * y + 0.03 * x;
      gmax = std::max(gmax, std::hypot(0.2 * x + 0.08 * y + 0.03, 0.08 * x + 0.2 * y));
    }

  for (double lam : {0.4, 1.0, 5.0}) {
    auto cl = ccx::lower_transform(f, TransformParams{}.with_lambda(lam));
    const int margin = static_cast<int>(std::ceil((gmax / (2.0 * lam) + 2.0 * h) / h));
    ASSERT_LT(2 * margin, n);
    for (int i = margin; i < n - margin; ++i)
      for (int j = margin; j < n - margin; ++j) {
        const std::size_t c = static_cast<std::size_t>(i) * n + j;
        EXPECT_NEAR(cl[c], f[c], 1e-9) << "lambda=" << lam << " cell " << i << "," << j;
      }

    TransformParams p = TransformParams{}.with_lambda(lam);
    p.scheme = ccx::Scheme::Oberman;
    auto ob = ccx::lower_transform(f, p);
    for (std::size_t c = 0; c < f.size(); ++c) EXPECT_NEAR(ob[c], f[c], 1e-12);
  }
}

// max interior recovery error of the lower transform at the given resolution
double tight_error(int n, double h, double lambda) {
  ScalarGrid f({n, n}, 0.0, {h, h}, {-0.5 * h * (n - 1), -0.5 * h * (n - 1)});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      f.values()[static_cast<std::size_t>(i) * n + j] =
          std::cos(f.coord(0, i)) + std::sin(f.coord(1, j));
  auto tight = ccx::lower_transform(f, TransformParams{}.with_lambda(lambda));
  // keep a boundary margin of |grad f| / (2 lambda) + 2h so the touching
  // paraboloid's contact point stays inside the domain
  const int margin = static_cast<int>(std::ceil((std::sqrt(2.0) / (2.0 * lambda)) / h)) + 2;
  double err = 0.0;
  for (int i = margin; i < n - margin; ++i)
    for (int j = margin; j < n - margin; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * n + j;
      EXPECT_LE(tight[c], f[c] + 1e-12);
      err = std::max(err, f[c] - tight[c]);
    }
  return err;
}

TEST(LowerTransform, TightForSmoothDataOnceLambdaPassesTheCurvature) {
  // f = cos(x) + sin(y) has Lip(grad f) = L = 1; with lambda >= L the
  // transform recovers f up to the lattice quantization of the touching
  // paraboloid's vertex, an O(lambda n h^2) effect that shrinks with h
  const double lam = 2.2;
  const double err_h = tight_error(33, 0.2, lam);
  EXPECT_LE(err_h, lam * 2.0 * 0.2 * 0.2 / 2.0);  // lambda n h^2 / 2
  const double err_h2 = tight_error(65, 0.1, lam);
  EXPECT_LE(err_h2, 0.5 * err_h + 1e-12);  // quadratic-in-h error decay

  // far below the curvature the transform must actually move
  ScalarGrid f({33, 33}, 0.0, {0.2, 0.2}, {-3.2, -3.2});
  for (int i = 0; i < 33; ++i)
    for (int j = 0; j < 33; ++j)
      f.values()[static_cast<std::size_t>(i) * 33 + j] =
          std::cos(f.coord(0, i)) + std::sin(f.coord(1, j));
  auto loose = ccx::lower_transform(f, TransformParams{}.with_lambda(0.05));
  double moved = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) moved = std::max(moved, f[c] - loose[c]);
  EXPECT_GT(moved, 0.1);
}

TEST(UpperTransform, SingletonFormula) {
  // unit spike on a 41x41 unit grid, lambda = 0.01: value lambda(1/sqrt(lambda) - r)^2
  // at Euclidean distance r inside the reach 1/sqrt(lambda) = 10
  ScalarGrid f({41, 41}, 0.0);
  f.values()[20 * 41 + 20] = 1.0;
  auto cu = ccx::upper_transform(f, TransformParams{}.with_lambda(0.01));
  EXPECT_NEAR(cu[20 * 41 + 20], 1.0, 1e-12);
  // distance 5 via the (3,4) offset
  EXPECT_NEAR(cu[(20 + 3) * 41 + (20 + 4)], 0.25, 1e-12);
  EXPECT_NEAR(cu[(20 - 4) * 41 + (20 + 3)], 0.25, 1e-12);
  // axis distance 5
  EXPECT_NEAR(cu[(20 + 5) * 41 + 20], 0.25, 1e-12);
}

TEST(UpperTransform, ExpansionBoundsTheSupport) {
  std::mt19937 rng(333);
  for (double lam : {0.25, 1.0}) {
    auto mask = testutil::random_mask(rng, {25, 19}, 0.08);
    auto chi = ccx::char_grid(mask, 1.0);
    auto cu = ccx::upper_transform(chi, TransformParams{}.with_lambda(lam));
    auto d2 = ccx::squared_distance_transform(mask);
    const double reach = 1.0 / std::sqrt(lam) + 1e-9;
    for (std::size_t c = 0; c < chi.size(); ++c) {
      if (mask[c]) EXPECT_NEAR(cu[c], 1.0, 1e-12);  // exactly one on the set
      if (d2[c] > reach * reach) EXPECT_LE(std::abs(cu[c]), 1e-9);
    }
  }
}

TEST(Transforms, OrderingChain) {
  std::mt19937 rng(444);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = testutil::random_grid(rng, testutil::random_shape(rng, 12), -2.0, 2.0);
    const double lam = 0.8;
    auto p = TransformParams{}.with_lambda(lam);
    auto mlo = ccx::lower_moreau(f, lam);
    auto cl = ccx::lower_transform(f, p);
    auto cu = ccx::upper_transform(f, p);
    auto mup = ccx::upper_moreau(f, lam);
    for (std::size_t c = 0; c < f.size(); ++c) {
      EXPECT_LE(mlo[c], cl[c] + 1e-9);
      EXPECT_LE(cl[c], f[c] + 1e-9);
      EXPECT_LE(f[c], cu[c] + 1e-9);
      EXPECT_LE(cu[c], mup[c] + 1e-9);
    }
  }
}

TEST(Transforms, LambdaMonotonicity) {
  std::mt19937 rng(555);
  auto f = testutil::random_grid(rng, {14, 11}, -2.0, 2.0);
  auto c1 = ccx::lower_transform(f, TransformParams{}.with_lambda(0.5));
  auto c2 = ccx::lower_transform(f, TransformParams{}.with_lambda(2.0));
  for (std::size_t c = 0; c < f.size(); ++c) {
    EXPECT_LE(c1[c], c2[c] + 1e-9);
    EXPECT_LE(c2[c], f[c] + 1e-9);
  }
}

TEST(Transforms, ProximalHullIsIdempotent) {
  std::mt19937 rng(666);
  auto f = testutil::random_grid(rng, {13, 9}, -2.0, 2.0);
  auto p = TransformParams{}.with_lambda(1.3);
  auto once = ccx::lower_transform(f, p);
  auto twice = ccx::lower_transform(once, p);
  for (std::size_t c = 0; c < f.size(); ++c) EXPECT_NEAR(twice[c], once[c], 1e-9);
}

TEST(Transforms, OrderPreserving) {
  std::mt19937 rng(777);
  auto f = testutil::random_grid(rng, {10, 10}, -2.0, 2.0);
  ScalarGrid g = f;
  std::uniform_real_distribution<double> bump(0.0, 1.5);
  for (auto& v : g.values()) v += bump(rng);
  auto p = TransformParams{}.with_lambda(0.9);
  auto cf = ccx::lower_transform(f, p);
  auto cg = ccx::lower_transform(g, p);
  for (std::size_t c = 0; c < f.size(); ++c) EXPECT_LE(cf[c], cg[c] + 1e-12);
}

TEST(Transforms, SupNormNonexpansive) {
  std::mt19937 rng(888);
  auto f = testutil::random_grid(rng, {9, 12}, -2.0, 2.0);
  ScalarGrid g = f;
  std::uniform_real_distribution<double> wig(-0.4, 0.4);
  double dist = 0.0;
  for (auto& v : g.values()) {
    const double w = wig(rng);
    v += w;
    dist = std::max(dist, std::abs(w));
  }
  auto p = TransformParams{}.with_lambda(1.1);
  auto cf = ccx::lower_transform(f, p);
  auto cg = ccx::lower_transform(g, p);
  for (std::size_t c = 0; c < f.size(); ++c)
    EXPECT_LE(std::abs(cf[c] - cg[c]), dist + 1e-12);
}

TEST(Transforms, HausdorffLipschitzOnCharacteristicFunctions) {
  std::mt19937 rng(999);
  const double rootn = std::sqrt(2.0);
  for (int trial = 0; trial < 8; ++trial) {
    auto e = testutil::random_mask(rng, {18, 16}, 0.15);
    auto fm = testutil::random_mask(rng, {18, 16}, 0.15);
    const double dh = ccx::hausdorff(e, fm);
    for (double lam : {0.25, 1.0}) {
      auto cue = ccx::upper_transform(ccx::char_grid(e, 1.0), TransformParams{}.with_lambda(lam));
      auto cuf = ccx::upper_transform(ccx::char_grid(fm, 1.0), TransformParams{}.with_lambda(lam));
      double sup = 0.0;
      for (std::size_t c = 0; c < cue.size(); ++c)
        sup = std::max(sup, std::abs(cue[c] - cuf[c]));
      EXPECT_LE(sup, 2.0 * std::sqrt(lam) * (dh + rootn) + 1e-9);
    }
  }
}

TEST(Transforms, FarFieldPerturbationsAreInvisible) {
  // R = (2 + sqrt(2)) sqrt(M / lambda) with M = sup|f|: edits beyond R from a
  // cell cannot change the transform there
  std::mt19937 rng(1010);
  ScalarGrid f({61}, 0.0, {1.0}, {0.0});
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (auto& v : f.values()) v = val(rng);
  const double lam = 1.0, M = 1.0;
  const double radius = (2.0 + std::sqrt(2.0)) * std::sqrt(M / lam);  // ~3.41 cells
  const int center = 30;

  auto p = TransformParams{}.with_lambda(lam);
  const double before = ccx::lower_transform(f, p)[center];
  ScalarGrid g = f;
  for (int i = 0; i < 61; ++i)
    if (std::abs(i - center) > radius + 1.0) g.values()[i] = val(rng);  // still within [-M, M]
  const double after = ccx::lower_transform(g, p)[center];
  EXPECT_DOUBLE_EQ(before, after);
}

TEST(Transforms, SchemesAgreeOnExactRoutes) {
  std::mt19937 rng(1111);
  for (int trial = 0; trial < 8; ++trial) {
    auto f = testutil::random_grid(rng, testutil::random_shape(rng, 10), -2.0, 2.0);
    auto p = TransformParams{}.with_lambda(1.4);
    auto a = ccx::lower_transform(f, p);
    p.scheme = ccx::Scheme::MoreauIterative;
    auto b = ccx::lower_transform(f, p);
    for (std::size_t c = 0; c < f.size(); ++c) EXPECT_NEAR(a[c], b[c], 1e-9);
  }
}

TEST(Transforms, ConvexSchemesTrackTheMoreauRoute) {
  std::mt19937 rng(1212);
  auto f = testutil::bandlimited_grid(rng, {21, 17}, 4, 1.0);
  double lo = f[0], hi = f[0];
  for (double v : f.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto p = TransformParams{}.with_lambda(0.6);
  auto moreau = ccx::lower_transform(f, p);

  p.scheme = ccx::Scheme::Oberman;
  p.stencil_radius = 2;
  p.tol = 1e-9;
  auto ob = ccx::lower_transform(f, p);

  p.scheme = ccx::Scheme::Biconjugate;
  auto bi = ccx::lower_transform(f, p);

  for (std::size_t c = 0; c < f.size(); ++c) {
    EXPECT_NEAR(ob[c], moreau[c], 5e-2 * (hi - lo));
    EXPECT_NEAR(bi[c], moreau[c], 5e-2 * (hi - lo));
  }
}

TEST(Transforms, QuadraticCenterDoesNotMatter) {
  std::mt19937 rng(1313);
  auto vals = testutil::bandlimited_grid(rng, {15, 15}, 3, 1.0).values();
  ScalarGrid a({15, 15}, vals, {0.3, 0.3}, {0.0, 0.0});
  ScalarGrid b({15, 15}, vals, {0.3, 0.3}, {17.3, -4.2});  // same data, shifted world frame

  auto p = TransformParams{}.with_lambda(1.0);
  p.scheme = ccx::Scheme::Oberman;
  p.tol = 1e-10;
  auto ca = ccx::lower_transform(a, p);
  auto cb = ccx::lower_transform(b, p);
  for (std::size_t c = 0; c < ca.size(); ++c) EXPECT_NEAR(ca[c], cb[c], 1e-6);

  // the Moreau route never looks at the origin at all
  p.scheme = ccx::Scheme::MoreauParabola;
  auto ma = ccx::lower_transform(a, p);
  auto mb = ccx::lower_transform(b, p);
  for (std::size_t c = 0; c < ma.size(); ++c) EXPECT_DOUBLE_EQ(ma[c], mb[c]);
}

TEST(Mixed, DualityAndSandwich) {
  std::mt19937 rng(1414);
  auto f = testutil::random_grid(rng, {12, 12}, -2.0, 2.0);
  TransformParams p;
  p.lambda = 1.5;
  p.tau = 0.5;

  auto ul = ccx::mixed_upper_lower(f, p);
  ScalarGrid neg = f.like(f.values());
  for (auto& v : neg.values()) v = -v;
  TransformParams q = p;
  std::swap(q.lambda, q.tau);
  auto lu = ccx::mixed_lower_upper(neg, q);
  for (std::size_t c = 0; c < f.size(); ++c) EXPECT_DOUBLE_EQ(ul[c], -lu[c]);

  // both mixed transforms live between the one-sided transforms
  auto cl = ccx::lower_transform(f, TransformParams{}.with_lambda(p.lambda));
  auto cu = ccx::upper_transform(f, TransformParams{}.with_lambda(p.tau));
  auto lu2 = ccx::mixed_lower_upper(f, p);
  for (std::size_t c = 0; c < f.size(); ++c) {
    EXPECT_LE(cl[c], ul[c] + 1e-9);
    EXPECT_LE(ul[c], cu[c] + 1e-9);
    EXPECT_LE(cl[c], lu2[c] + 1e-9);
    EXPECT_LE(lu2[c], cu[c] + 1e-9);
  }
}

TEST(Mixed, SmoothsKinksToCurvatureScale) {
  // f(x, y) = |x| - |y| has O(1) jumps in its first differences; the mixed
  // transform caps centered second differences at the lambda/tau curvature
  // scale instead of the grid scale
  const int n = 161;
  const double h = 0.025;
  ScalarGrid f({n, n}, 0.0, {h, h}, {-2.0, -2.0});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      f.values()[static_cast<std::size_t>(i) * n + j] =
          std::abs(f.coord(0, i)) - std::abs(f.coord(1, j));

  TransformParams p;
  p.lambda = 1.0;
  p.tau = 1.0;
  auto g = ccx::mixed_lower_upper(f, p);

  double raw = 0.0, smooth = 0.0;
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * n + j;
      raw = std::max(raw, std::abs(f[c - n] - 2.0 * f[c] + f[c + n]));
      raw = std::max(raw, std::abs(f[c - 1] - 2.0 * f[c] + f[c + 1]));
      smooth = std::max(smooth, std::abs(g[c - n] - 2.0 * g[c] + g[c + n]));
      smooth = std::max(smooth, std::abs(g[c - 1] - 2.0 * g[c] + g[c + 1]));
    }
  EXPECT_NEAR(raw, 2.0 * h, 1e-12);  // the kink: first differences jump by 2
  EXPECT_LE(smooth, 8.0 * std::max(p.lambda, p.tau) * h * h);

  // the lower-envelope side is exactly lambda-semiconvex
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * n + j;
      EXPECT_GE(g[c - n] - 2.0 * g[c] + g[c + n], -2.0 * p.lambda * h * h - 1e-12);
      EXPECT_GE(g[c - 1] - 2.0 * g[c] + g[c + 1], -2.0 * p.lambda * h * h - 1e-12);
    }
}

TEST(Transforms, SemiconvexityOfLowerOutput) {
  std::mt19937 rng(1515);
  auto f = testutil::random_grid(rng, {18, 18}, -2.0, 2.0);
  const double lam = 1.2, h = 1.0;
  auto cl = ccx::lower_transform(f, TransformParams{}.with_lambda(lam));
  for (int i = 1; i < 17; ++i)
    for (int j = 1; j < 17; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * 18 + j;
      EXPECT_GE(cl[c - 18] - 2.0 * cl[c] + cl[c + 18], -2.0 * lam * h * h - 1e-12);
      EXPECT_GE(cl[c - 1] - 2.0 * cl[c] + cl[c + 1], -2.0 * lam * h * h - 1e-12);
    }
}

TEST(Transforms, MirrorPaddingMatchesManualPadCropAndKeepsGeometry) {
  std::mt19937 rng(1616);
  auto f = testutil::random_grid(rng, {11, 13}, -2.0, 2.0);
  TransformParams p;
  p.lambda = 0.9;
  p.padding = {ccx::PadMode::Mirror, 4};
  auto got = ccx::lower_transform(f, p);
  EXPECT_TRUE(got.same_geometry(f));

  auto manual = ccx::crop(
      ccx::lower_transform(ccx::pad_mirror(f, 4), TransformParams{}.with_lambda(0.9)), 4);
  for (std::size_t c = 0; c < f.size(); ++c) EXPECT_DOUBLE_EQ(got[c], manual[c]);

  // padding keeps constants constant
  ScalarGrid k({7, 7}, 3.25);
  auto ck = ccx::lower_transform(k, p);
  for (std::size_t c = 0; c < k.size(); ++c) EXPECT_NEAR(ck[c], 3.25, 1e-12);
}

TEST(Transforms, ObermanNonConvergenceRaises) {
  std::mt19937 rng(1717);
  auto f = testutil::random_grid(rng, {24, 24}, -5.0, 5.0);
  TransformParams p;
  p.scheme = ccx::Scheme::Oberman;
  p.max_iters = 2;     // nowhere near enough sweeps
  p.tol = 1e-13;
  EXPECT_THROW(ccx::lower_transform(f, p), ccx::numerical_failure);
}

}  // namespace
