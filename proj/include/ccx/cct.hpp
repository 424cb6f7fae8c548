#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ccx/convex.hpp"
#include "ccx/errors.hpp"
#include "ccx/grid.hpp"
#include "ccx/moreau.hpp"

namespace ccx {

namespace detail {

// Sweep counter for the iterative schemes (thread-local, accumulated across
// every solve since the last reset). Direct schemes contribute nothing.
inline thread_local long long iteration_accumulator = 0;

}  // namespace detail

inline void reset_iteration_count() { detail::iteration_accumulator = 0; }
inline long long iteration_count() { return detail::iteration_accumulator; }

namespace detail {

// lambda * |x - x0|^2 sampled on the grid, centered on the domain. The
// compensated transforms are invariant under moving the center (the
// difference of two such quadratics is affine), so any fixed choice works;
// the domain center keeps the augmentation small.
inline std::vector<double> centered_quadratic(const ScalarGrid& g, double lambda) {
  const int nd = g.ndim();
  std::vector<double> center(nd);
  for (int a = 0; a < nd; ++a)
    center[a] = g.origin()[a] + 0.5 * g.spacing()[a] * (g.shape()[a] - 1);
  std::vector<double> q(g.size());
  std::array<int, kMaxDims> idx{};
  for (std::size_t c = 0; c < q.size(); ++c) {
    double s = 0.0;
    for (int a = 0; a < nd; ++a) {
      const double d = g.coord(a, idx[a]) - center[a];
      s += d * d;
    }
    q[c] = lambda * s;
    for (int a = nd - 1; a >= 0; --a) {
      if (++idx[a] < g.shape()[a]) break;
      idx[a] = 0;
    }
  }
  return q;
}

// Convex envelope of `g` under the scheme selected in `p`.
inline ScalarGrid convex_envelope_core(const ScalarGrid& g, const TransformParams& p) {
  if (p.scheme == Scheme::Oberman) {
    const int iters = p.max_iters > 0 ? p.max_iters : 20000;
    auto r = oberman_convex_envelope(g, {p.stencil_radius}, p.tol, iters, p.tol_abs);
    if (!r.converged)
      throw numerical_failure("convex envelope did not converge after " +
                              std::to_string(r.iterations) + " sweeps (last update " +
                              std::to_string(r.last_change) + ")");
    iteration_accumulator += r.iterations;
    return std::move(r.grid);
  }
  // biconjugate: derive a dual step from the slope spread when none is given
  double hd = p.dual_spacing;
  if (hd <= 0.0) {
    const auto strides = strides_of(g.shape());
    double spread = 0.0;
    for (int a = 0; a < g.ndim(); ++a) {
      const int n = g.shape()[a];
      if (n < 2) continue;
      double mn = g[0], mx = g[0];
      bool first = true;
      const double h = g.spacing()[a];
      for_each_line(g.shape(), a, [&](std::size_t off) {
        for (int i = 0; i + 1 < n; ++i) {
          const double s = (g[off + (i + 1) * strides[a]] - g[off + i * strides[a]]) / h;
          if (first) {
            mn = mx = s;
            first = false;
          } else {
            mn = std::min(mn, s);
            mx = std::max(mx, s);
          }
        }
      });
      spread = std::max(spread, mx - mn);
    }
    hd = spread > 0.0 ? spread / 2048.0 : 1.0;
  }
  return biconjugate_envelope(g, hd);
}

// C^l on the grid as given (no padding): either the double Moreau form
// M^lambda(M_lambda(f)) or the compensated convex envelope
// co[f + lambda|x - x0|^2] - lambda|x - x0|^2.
inline ScalarGrid lower_core(const ScalarGrid& f, const TransformParams& p, double lambda) {
  switch (p.scheme) {
    case Scheme::MoreauParabola:
      return upper_moreau(lower_moreau(f, lambda), lambda);
    case Scheme::MoreauIterative: {
      int sweeps = p.max_iters;
      if (sweeps == 0) {
        for (int a = 0; a < f.ndim(); ++a) sweeps = std::max(sweeps, f.shape()[a]);
        ++sweeps;  // one extra pass so the fixed point is detected
      }
      auto lo = iterative_moreau(f, lambda, sweeps);
      ScalarGrid neg = lo.grid.like(lo.grid.values());
      for (auto& v : neg.values()) v = -v;
      auto up = iterative_moreau(neg, lambda, sweeps);
      iteration_accumulator += lo.iterations + up.iterations;
      ScalarGrid out = std::move(up.grid);
      for (auto& v : out.values()) v = -v;
      return out;
    }
    case Scheme::Oberman:
    case Scheme::Biconjugate: {
      const auto q = centered_quadratic(f, lambda);
      ScalarGrid aug = f;
      for (std::size_t i = 0; i < aug.size(); ++i) aug.values()[i] += q[i];
      ScalarGrid env = convex_envelope_core(aug, p);
      for (std::size_t i = 0; i < env.size(); ++i) env.values()[i] -= q[i];
      return env;
    }
  }
  throw invalid_parameters("unknown scheme");
}

inline ScalarGrid upper_core(const ScalarGrid& f, const TransformParams& p, double lambda) {
  ScalarGrid neg = f.like(f.values());
  for (auto& v : neg.values()) v = -v;
  ScalarGrid out = lower_core(neg, p, lambda);
  for (auto& v : out.values()) v = -v;
  return out;
}

template <typename Core>
ScalarGrid with_padding(const ScalarGrid& f, const TransformParams& p, Core&& core) {
  p.validate();
  if (p.padding.mode == PadMode::None || p.padding.width == 0) return core(f);
  const ScalarGrid padded = pad_mirror(f, p.padding.width);
  return crop(core(padded), p.padding.width);
}

}  // namespace detail

// Lower compensated transform C^l_lambda(f).
inline ScalarGrid lower_transform(const ScalarGrid& f, const TransformParams& p) {
  return detail::with_padding(f, p,
                              [&](const ScalarGrid& g) { return detail::lower_core(g, p, p.lambda); });
}

// Upper compensated transform C^u_lambda(f) = -C^l_lambda(-f).
inline ScalarGrid upper_transform(const ScalarGrid& f, const TransformParams& p) {
  return detail::with_padding(f, p,
                              [&](const ScalarGrid& g) { return detail::upper_core(g, p, p.lambda); });
}

// Mixed transform C^{u,l}_{tau,lambda}(f) = C^u_tau(C^l_lambda(f)).
inline ScalarGrid mixed_upper_lower(const ScalarGrid& f, const TransformParams& p) {
  return detail::with_padding(f, p, [&](const ScalarGrid& g) {
    return detail::upper_core(detail::lower_core(g, p, p.lambda), p, p.tau);
  });
}

// Mixed transform C^{l,u}_{lambda,tau}(f) = C^l_lambda(C^u_tau(f)).
inline ScalarGrid mixed_lower_upper(const ScalarGrid& f, const TransformParams& p) {
  return detail::with_padding(f, p, [&](const ScalarGrid& g) {
    return detail::lower_core(detail::upper_core(g, p, p.tau), p, p.lambda);
  });
}

}  // namespace ccx
