#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ccx/cct.hpp"
#include "ccx/errors.hpp"
#include "ccx/grid.hpp"
#include "ccx/moreau.hpp"

namespace ccx {

enum class FeatureKind {
  Ridge,
  Valley,
  Edge,
  StableRidge,
  StableValley,
  StableEdge,
  D2,
  InteriorCorner,
  Intersection,
  Mma,
};

inline const char* feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::Ridge: return "ridge";
    case FeatureKind::Valley: return "valley";
    case FeatureKind::Edge: return "edge";
    case FeatureKind::StableRidge: return "stable_ridge";
    case FeatureKind::StableValley: return "stable_valley";
    case FeatureKind::StableEdge: return "stable_edge";
    case FeatureKind::D2: return "d2";
    case FeatureKind::InteriorCorner: return "interior_corner";
    case FeatureKind::Intersection: return "intersection";
    case FeatureKind::Mma: return "mma";
  }
  return "unknown";
}

// A derived singularity map together with the parameters that produced it.
struct FeatureMap {
  ScalarGrid grid;
  FeatureKind kind = FeatureKind::Ridge;
  TransformParams params;
};

namespace detail {

inline void clamp_min(std::vector<double>& v, double lo) {
  for (auto& x : v) x = std::max(x, lo);
}

inline void clamp_max(std::vector<double>& v, double hi) {
  for (auto& x : v) x = std::min(x, hi);
}

}  // namespace detail

// R_lambda(f) = f - C^l_lambda(f): nonnegative, peaks on ridges of f.
inline FeatureMap ridge(const ScalarGrid& g, const TransformParams& p) {
  ScalarGrid m = lower_transform(g, p);
  for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = g[i] - m[i];
  detail::clamp_min(m.values(), 0.0);
  return {std::move(m), FeatureKind::Ridge, p};
}

// V_lambda(f) = f - C^u_lambda(f): nonpositive, dips on valleys of f.
inline FeatureMap valley(const ScalarGrid& g, const TransformParams& p) {
  ScalarGrid m = upper_transform(g, p);
  for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = g[i] - m[i];
  detail::clamp_max(m.values(), 0.0);
  return {std::move(m), FeatureKind::Valley, p};
}

// E_lambda(f) = C^u_lambda(f) - C^l_lambda(f) = R - V: nonnegative, lights up
// both kinds of singularity (jump edges in particular).
inline FeatureMap edge(const ScalarGrid& g, const TransformParams& p) {
  ScalarGrid up = upper_transform(g, p);
  ScalarGrid lo = lower_transform(g, p);
  for (std::size_t i = 0; i < up.size(); ++i) up.values()[i] -= lo[i];
  detail::clamp_min(up.values(), 0.0);
  return {std::move(up), FeatureKind::Edge, p};
}

namespace detail {

// C^u_lambda of the unit characteristic function of the mask: the common
// first stage of the stable feature transforms.
inline ScalarGrid stable_stage(const MaskGrid& k, const TransformParams& p) {
  return upper_transform(char_grid(k, 1.0), p);
}

}  // namespace detail

// SR_{lambda,tau}(chi) = C^u_lambda(chi) - C^l_tau(C^u_lambda(chi)).
inline FeatureMap stable_ridge(const MaskGrid& k, const TransformParams& p) {
  p.validate();
  ScalarGrid u = detail::stable_stage(k, p);
  ScalarGrid lo = lower_transform(u, p.with_lambda(p.tau));
  for (std::size_t i = 0; i < u.size(); ++i) u.values()[i] -= lo[i];
  detail::clamp_min(u.values(), 0.0);
  return {std::move(u), FeatureKind::StableRidge, p};
}

// SV_{lambda,tau}(chi) = V_tau(C^u_lambda(chi)); needs lambda > tau.
inline FeatureMap stable_valley(const MaskGrid& k, const TransformParams& p) {
  p.validate();
  if (!(p.lambda > p.tau))
    throw degenerate_parameters("stable valley transform needs lambda > tau");
  ScalarGrid u = detail::stable_stage(k, p);
  ScalarGrid up = upper_transform(u, p.with_lambda(p.tau));
  for (std::size_t i = 0; i < u.size(); ++i) u.values()[i] -= up[i];
  detail::clamp_max(u.values(), 0.0);
  return {std::move(u), FeatureKind::StableValley, p};
}

// SE_{lambda,tau}(chi) = E_tau(C^u_lambda(chi)); needs lambda > tau.
inline FeatureMap stable_edge(const MaskGrid& k, const TransformParams& p) {
  p.validate();
  if (!(p.lambda > p.tau))
    throw degenerate_parameters("stable edge transform needs lambda > tau");
  ScalarGrid u = detail::stable_stage(k, p);
  FeatureMap e = edge(u, p.with_lambda(p.tau));
  return {std::move(e.grid), FeatureKind::StableEdge, p};
}

// Standard feature height of a flat (codimension-1, regular) boundary point.
inline double mu1(double lambda, double tau) {
  if (!(lambda > 0.0) || !(tau > 0.0)) throw invalid_parameters("mu1 needs lambda, tau > 0");
  const double r = std::sqrt(lambda + tau) - std::sqrt(tau);
  return r * r / lambda;
}

// Feature height at the tip of a wedge with half-opening slope a >= 0;
// approaches mu1 as the wedge flattens (a -> infinity).
inline double mu2(double a, double lambda, double tau) {
  if (!(lambda > 0.0) || !(tau > 0.0)) throw invalid_parameters("mu2 needs lambda, tau > 0");
  if (a < 0.0) throw invalid_parameters("mu2 needs a >= 0");
  const double a2 = a * a;
  if (a2 <= std::sqrt((lambda + tau) / tau)) return lambda / (lambda + (1.0 + a2) * tau);
  return (1.0 + a2) / a2 * mu1(lambda, tau);
}

// D^2_lambda(x;K) = (max{0, 1 - sqrt(lambda) dist(x,K)})^2: 1 on K, 0 beyond
// reach 1/sqrt(lambda).
inline FeatureMap d2_lambda(const MaskGrid& k, const TransformParams& p) {
  p.validate();
  ScalarGrid d2 = squared_distance_transform(k);
  const double rl = std::sqrt(p.lambda);
  for (auto& v : d2.values()) {
    const double t = std::max(0.0, 1.0 - rl * std::sqrt(v));
    v = t * t;
  }
  return {std::move(d2), FeatureKind::D2, p};
}

// V^d_lambda(x;K) = C^u_lambda(D^2_lambda) - D^2_lambda: responds where the
// distance profile folds, i.e. at interior corners and crossings of K.
inline FeatureMap interior_corner_map(const MaskGrid& k, const TransformParams& p) {
  FeatureMap d2 = d2_lambda(k, p);
  ScalarGrid up = upper_transform(d2.grid, p);
  for (std::size_t i = 0; i < up.size(); ++i) up.values()[i] -= d2.grid[i];
  detail::clamp_min(up.values(), 0.0);
  return {std::move(up), FeatureKind::InteriorCorner, p};
}

// I_lambda(x;K) = |C^u_{4lambda}(chi) - 2(C^u_lambda(chi) - C^l_lambda(C^u_lambda(chi)))|:
// vanishes along regular stretches of K, spikes at crossings.
inline FeatureMap intersection_transform(const MaskGrid& k, const TransformParams& p) {
  p.validate();
  if (k.count() == 0) throw empty_set("intersection transform of an empty set");
  ScalarGrid chi = char_grid(k, 1.0);
  ScalarGrid wide = upper_transform(chi, p.with_lambda(4.0 * p.lambda));
  ScalarGrid u = upper_transform(chi, p);
  ScalarGrid lu = lower_transform(u, p);
  for (std::size_t i = 0; i < wide.size(); ++i)
    wide.values()[i] = std::abs(wide[i] - 2.0 * (u[i] - lu[i]));
  return {std::move(wide), FeatureKind::Intersection, p};
}

// M_lambda(x;K) = (1 + lambda)(dist^2(x;K) - C^l_lambda(dist^2(x;K))): the
// multiscale medial axis map; nonnegative and bounded by dist^2.
inline FeatureMap mma(const MaskGrid& k, const TransformParams& p) {
  p.validate();
  ScalarGrid d2 = squared_distance_transform(k);
  ScalarGrid lo = lower_transform(d2, p);
  for (std::size_t i = 0; i < d2.size(); ++i)
    d2.values()[i] = (1.0 + p.lambda) * (d2[i] - lo[i]);
  detail::clamp_min(d2.values(), 0.0);
  return {std::move(d2), FeatureKind::Mma, p};
}

// Cells where the map reaches at least `alpha`.
inline MaskGrid suplevel(const ScalarGrid& map, double alpha) {
  MaskGrid out(map.shape(), false, map.spacing(), map.origin());
  for (std::size_t i = 0; i < map.size(); ++i) out.set(i, map[i] >= alpha);
  return out;
}

inline MaskGrid suplevel(const FeatureMap& map, double alpha) { return suplevel(map.grid, alpha); }

// Marker cells: local maxima over the 3^n neighborhood that also exceed
// rho times the global maximum.
inline MaskGrid feature_markers(const ScalarGrid& map, double rho = 0.5) {
  if (!(rho >= 0.0) || !std::isfinite(rho))
    throw invalid_parameters("marker threshold must be finite and >= 0");
  double peak = map[0];
  for (double v : map.values()) peak = std::max(peak, v);

  const int nd = map.ndim();
  const auto strides = detail::strides_of(map.shape());
  MaskGrid out(map.shape(), false, map.spacing(), map.origin());
  std::array<int, kMaxDims> idx{};
  for (std::size_t c = 0; c < map.size(); ++c) {
    bool is_max = map[c] > rho * peak;
    if (is_max) {
      std::array<int, kMaxDims> off{};
      off.fill(-1);
      for (int a = nd; a < kMaxDims; ++a) off[a] = 0;
      for (;;) {
        std::ptrdiff_t d = 0;
        bool inside = true, self = true;
        for (int a = 0; a < nd; ++a) {
          const int j = idx[a] + off[a];
          if (j < 0 || j >= map.shape()[a]) {
            inside = false;
            break;
          }
          if (off[a] != 0) self = false;
          d += off[a] * static_cast<std::ptrdiff_t>(strides[a]);
        }
        if (inside && !self && map[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + d)] > map[c]) {
          is_max = false;
          break;
        }
        int a = nd - 1;
        for (; a >= 0; --a) {
          if (++off[a] <= 1) break;
          off[a] = -1;
        }
        if (a < 0) break;
      }
    }
    out.set(c, is_max);
    for (int a = nd - 1; a >= 0; --a) {
      if (++idx[a] < map.shape()[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace ccx
