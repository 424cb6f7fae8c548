#pragma once

// Desk-scale reference experiments with embedded inputs. The command-line
// benchmark subcommands and the acceptance suite both run these, so the
// numbers they print come from one definition and the repository ships no
// binary assets.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ccx/cct.hpp"
#include "ccx/features.hpp"
#include "ccx/grid.hpp"
#include "ccx/metrics.hpp"
#include "ccx/restore.hpp"

namespace ccx::bench {

// --- upper transform of a one-cell spike --------------------------------------

// 41x41 unit-spacing grid centered on the origin with a single unit sample.
inline ScalarGrid singleton_field() {
  const int n = 41;
  ScalarGrid chi({n, n}, 0.0, {1.0, 1.0}, {-20.0, -20.0});
  chi[static_cast<std::size_t>(n / 2) * n + n / 2] = 1.0;
  return chi;
}

// Closed-form upper transform of the spike: a paraboloid cap of radius
// 1/sqrt(lambda), lambda (1/sqrt(lambda) - |x|)^2 inside and zero outside.
inline ScalarGrid singleton_exact_upper(const ScalarGrid& like, double lambda) {
  ScalarGrid exact = like.like(std::vector<double>(like.size(), 0.0));
  const double rad = 1.0 / std::sqrt(lambda);
  const int n0 = like.shape()[0], n1 = like.shape()[1];
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      const double r = std::hypot(like.coord(0, i), like.coord(1, j));
      if (r <= rad)
        exact[static_cast<std::size_t>(i) * n1 + j] = lambda * (rad - r) * (rad - r);
    }
  return exact;
}

struct SingletonRun {
  Scheme scheme = Scheme::MoreauParabola;
  double e_linf = 0.0;  // sup error relative to the exact cap height
  double e_h = 0.0;     // Hausdorff distance between exact and computed supports
  double seconds = 0.0;
};

inline SingletonRun singleton_run(Scheme scheme, double lambda = 0.01, double dual_h = 0.001) {
  const ScalarGrid chi = singleton_field();
  const ScalarGrid exact = singleton_exact_upper(chi, lambda);
  TransformParams p;
  p.lambda = lambda;
  p.scheme = scheme;
  if (scheme == Scheme::Biconjugate) p.dual_spacing = dual_h;
  const auto t0 = std::chrono::steady_clock::now();
  const ScalarGrid u = upper_transform(chi, p);
  const auto t1 = std::chrono::steady_clock::now();

  SingletonRun r;
  r.scheme = scheme;
  double peak = 0.0, dev = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    peak = std::max(peak, std::abs(exact[c]));
    dev = std::max(dev, std::abs(u[c] - exact[c]));
  }
  r.e_linf = dev / peak;
  r.e_h = support_hausdorff_error(exact, u);
  r.seconds = std::chrono::duration<double>(t1 - t0).count();
  return r;
}

// --- stable-ridge heights on straight and folded boundaries -------------------

struct CornerRun {
  double flat_height = 0.0;      // closed-form height on a straight boundary
  double half_plane_max = 0.0;   // measured max over half-plane boundary cells
  double corner_height = 0.0;    // closed-form height at a right-angle tip
  double tip_value = 0.0;        // measured value at the quarter-plane tip
};

// Half-plane {x >= 1} and quarter-plane {x >= 1, y >= 1} sampled on [0,2]^2
// with spacing 1/16, fine enough that 1/sqrt(tau) spans at least 8 cells.
inline CornerRun corner_run(double lambda = 8.0, double tau = 1.0) {
  const int n = 33;
  const double h = 1.0 / 16.0;
  MaskGrid half({n, n}, false, {h, h}, {0.0, 0.0});
  MaskGrid quarter = half;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * n + j;
      if (i * h >= 1.0) half.set(c, true);
      if (i * h >= 1.0 && j * h >= 1.0) quarter.set(c, true);
    }
  TransformParams p;
  p.lambda = lambda;
  p.tau = tau;

  CornerRun r;
  r.flat_height = mu1(lambda, tau);
  r.corner_height = mu2(1.0, lambda, tau);
  const FeatureMap srh = stable_ridge(half, p);
  auto on = [&](int i, int j) {
    return i >= 0 && i < n && j >= 0 && j < n && half[static_cast<std::size_t>(i) * n + j] != 0;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (on(i, j) &&
          (!on(i - 1, j) || !on(i + 1, j) || !on(i, j - 1) || !on(i, j + 1)))
        r.half_plane_max =
            std::max(r.half_plane_max, srh.grid[static_cast<std::size_t>(i) * n + j]);
  const FeatureMap srq = stable_ridge(quarter, p);
  r.tip_value = srq.grid[static_cast<std::size_t>(16) * n + 16];
  return r;
}

// --- medial-axis map of a two-point set ----------------------------------------

struct TwoPointRun {
  double midpoint_value = 0.0;
  double expected = 0.0;  // half-separation squared
  double spacing = 0.0;
};

// K = {-a, +a} e1 with a = 10h on a 61x61 grid over [-1.5, 1.5]^2.
inline TwoPointRun mma_two_point_run(double lambda = 1.0) {
  const int n = 61;
  const double h = 0.05, a = 10 * h;
  MaskGrid k({n, n}, false, {h, h}, {-1.5, -1.5});
  k.set(static_cast<std::size_t>(20) * n + 30, true);
  k.set(static_cast<std::size_t>(40) * n + 30, true);
  TransformParams p;
  p.lambda = lambda;
  const FeatureMap m = mma(k, p);
  return {m.grid[static_cast<std::size_t>(n / 2) * n + n / 2], a * a, h};
}

// --- natural-statistics test card and impulse-noise restoration ---------------

// Synthetic 8-bit photograph: random-phase 1/f^1.2 structure across nine
// octaves, two soft occlusion edges, and uniform pixel-scale grain, quantized
// to integers in [3, 252] so extreme-value detection stays unambiguous.
inline ScalarGrid natural_card(int n, unsigned seed = 2024u) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Wave {
    double kx, ky, ph, amp;
  };
  std::vector<Wave> waves;
  constexpr double kTwoPi = 6.283185307179586;
  for (int oct = 0; oct <= 8; ++oct) {
    const double f = std::pow(2.0, oct);
    for (int c = 0; c < 24; ++c) {
      const double th = kTwoPi * u(rng);
      const double fr = f * (0.75 + 0.5 * u(rng));  // cycles per image
      waves.push_back({kTwoPi * fr * std::cos(th) / n, kTwoPi * fr * std::sin(th) / n,
                       kTwoPi * u(rng), std::pow(fr, -1.2)});
    }
  }
  const double e1 = 0.25 + 0.5 * u(rng), e2 = 0.25 + 0.5 * u(rng);
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double a = 0.0;
      for (const Wave& w : waves) a += w.amp * std::cos(w.kx * i + w.ky * j + w.ph);
      a += 0.35 * std::tanh(18.0 * (static_cast<double>(i) / n - e1));
      a += 0.25 * std::tanh(14.0 * (static_cast<double>(j) / n - e2));
      v[static_cast<std::size_t>(i) * n + j] = a;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  std::uniform_real_distribution<double> g(-1.0, 1.0);
  for (auto& a : v) {
    a = 25.0 + (a - lo) / (hi - lo) * 205.0 + 20.0 * g(rng);
    a = std::floor(std::min(252.0, std::max(3.0, a)) + 0.5);
  }
  return ScalarGrid({n, n}, std::move(v));
}

// Overwrite the given fraction of cells with 0 or 255 at even odds.
inline std::pair<ScalarGrid, MaskGrid> salt_pepper(const ScalarGrid& clean, double fraction,
                                                   unsigned seed = 7u) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarGrid noisy = clean;
  MaskGrid mask(clean.shape(), false, clean.spacing(), clean.origin());
  for (std::size_t i = 0; i < noisy.size(); ++i)
    if (u(rng) < fraction) {
      noisy[i] = u(rng) < 0.5 ? 0.0 : 255.0;
      mask.set(i, true);
    }
  return {std::move(noisy), std::move(mask)};
}

struct DenoiseRun {
  double noisy_db = 0.0;
  double restored_db = 0.0;
  double eps_k = 0.0;
};

inline DenoiseRun salt_pepper_run(Scheme scheme, int n = 128, double fraction = 0.7,
                                  double lambda = 20.0, double level = 1e13, int pad = 2,
                                  unsigned card_seed = 2024u, unsigned noise_seed = 7u) {
  const ScalarGrid clean = natural_card(n, card_seed);
  auto [noisy, mask] = salt_pepper(clean, fraction, noise_seed);
  TransformParams p;
  p.lambda = lambda;
  p.level_M = level;
  p.scheme = scheme;
  if (scheme == Scheme::Oberman) {
    p.max_iters = 2000000;
    p.tol_abs = 1e-3;  // the relative test scales with the +/-level extension
  }
  const RestoreResult r = denoise_salt_pepper(noisy, mask, p, pad);
  return {psnr(noisy, clean).db, psnr(r.image, clean).db, r.eps_k};
}

}  // namespace ccx::bench
