#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ccx/errors.hpp"
#include "ccx/grid.hpp"

namespace ccx {

// Convex piecewise-affine function of one variable. The graph has kinks at
// (xs[i], gs[i]); `slopes` lists every finite slope left to right, i.e. an
// optional left ray, the N-1 segment slopes, and an optional right ray.
// Without a ray the function is +infinity beyond the end kink, so compact
// domains, half-lines and the whole line are all representable — and the
// family is closed under the Legendre-Fenchel transform.
struct PiecewiseAffine1D {
  std::vector<double> xs;
  std::vector<double> gs;
  std::vector<double> slopes;
  bool left_ray = false;
  bool right_ray = false;

  std::size_t kinks() const { return xs.size(); }

  // Compact-domain function: the interpolant of the kinks, +inf outside.
  static PiecewiseAffine1D compact(std::vector<double> xs, std::vector<double> gs) {
    PiecewiseAffine1D p;
    p.xs = std::move(xs);
    p.gs = std::move(gs);
    if (p.xs.size() != p.gs.size() || p.xs.empty())
      throw invalid_parameters("piecewise-affine data needs matching non-empty xs/gs");
    p.slopes.reserve(p.xs.size() - 1);
    for (std::size_t i = 0; i + 1 < p.xs.size(); ++i)
      p.slopes.push_back((p.gs[i + 1] - p.gs[i]) / (p.xs[i + 1] - p.xs[i]));
    p.validate();
    return p;
  }

  static PiecewiseAffine1D with_rays(std::vector<double> xs, std::vector<double> gs,
                                     double left_slope, double right_slope) {
    PiecewiseAffine1D p = compact(std::move(xs), std::move(gs));
    p.slopes.insert(p.slopes.begin(), left_slope);
    p.slopes.push_back(right_slope);
    p.left_ray = p.right_ray = true;
    p.validate();
    return p;
  }

  void validate() const {
    const std::size_t n = xs.size();
    if (n == 0 || gs.size() != n)
      throw invalid_parameters("piecewise-affine data needs matching non-empty xs/gs");
    const std::size_t want = n - 1 + (left_ray ? 1 : 0) + (right_ray ? 1 : 0);
    if (slopes.size() != want)
      throw invalid_parameters("piecewise-affine slope count inconsistent with rays");
    for (double x : xs)
      if (!std::isfinite(x)) throw invalid_parameters("piecewise-affine xs must be finite");
    for (double g : gs)
      if (!std::isfinite(g)) throw invalid_parameters("piecewise-affine gs must be finite");
    for (double s : slopes)
      if (!std::isfinite(s)) throw invalid_parameters("piecewise-affine slopes must be finite");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(xs[i] < xs[i + 1])) throw invalid_parameters("kink abscissae must strictly increase");
    const bool affine = n == 1 && left_ray && right_ray && slopes[0] == slopes[1];
    if (!affine)
      for (std::size_t i = 0; i + 1 < slopes.size(); ++i)
        if (!(slopes[i] < slopes[i + 1]))
          throw not_convex("piecewise-affine slopes must strictly increase");
  }
};

// Pointwise evaluation; +infinity outside the domain of finiteness.
inline double pa_value(const PiecewiseAffine1D& p, double x) {
  const std::size_t n = p.xs.size();
  if (x < p.xs.front()) {
    if (!p.left_ray) return std::numeric_limits<double>::infinity();
    return p.gs.front() + p.slopes.front() * (x - p.xs.front());
  }
  if (x > p.xs.back()) {
    if (!p.right_ray) return std::numeric_limits<double>::infinity();
    return p.gs.back() + p.slopes.back() * (x - p.xs.back());
  }
  std::size_t lo = 0, hi = n - 1;  // xs[lo] <= x <= xs[hi]
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (p.xs[mid] <= x ? lo : hi) = mid;
  }
  if (hi == lo) return p.gs[lo];
  const double t = (x - p.xs[lo]) / (p.xs[hi] - p.xs[lo]);
  return p.gs[lo] + t * (p.gs[hi] - p.gs[lo]);
}

// Exact Legendre-Fenchel transform. The dual kinks are the slopes of g, the
// dual slopes are the maximizing abscissae, and rays flip into bounded dual
// domains (and vice versa):
//   g*(s) = max over the graph of (x s - g(x)),
//   attained at kink a whenever s lies in its subdifferential.
inline PiecewiseAffine1D lf_transform_pa(const PiecewiseAffine1D& g) {
  g.validate();
  const std::size_t n = g.xs.size();
  const int L = g.left_ray ? 1 : 0, R = g.right_ray ? 1 : 0;
  const std::size_t m = g.slopes.size();

  PiecewiseAffine1D d;
  if (m == 0) {
    // single point mass: conjugate is affine with slope xs[0] everywhere
    d.xs = {0.0};
    d.gs = {-g.gs[0]};
    d.slopes = {g.xs[0], g.xs[0]};
    d.left_ray = d.right_ray = true;
    return d;
  }
  if (n == 1 && L && R && g.slopes[0] == g.slopes[1]) {
    // affine everywhere: conjugate is a point mass at its slope
    d.xs = {g.slopes[0]};
    d.gs = {g.xs[0] * g.slopes[0] - g.gs[0]};
    return d;
  }

  auto attain = [&](std::size_t k) {  // kink whose subdifferential holds slope k
    const std::ptrdiff_t a = static_cast<std::ptrdiff_t>(k) - L;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(a, 0, n - 1));
  };

  d.xs = g.slopes;
  d.gs.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t a = attain(k);
    d.gs[k] = g.xs[a] * g.slopes[k] - g.gs[a];
  }
  d.left_ray = !g.left_ray;
  d.right_ray = !g.right_ray;
  if (d.left_ray) d.slopes.push_back(g.xs.front());
  for (std::size_t k = 0; k + 1 < m; ++k) d.slopes.push_back(g.xs[attain(k + 1)]);
  if (d.right_ray) d.slopes.push_back(g.xs.back());
  d.validate();
  return d;
}

namespace detail {

// Lower convex hull (monotone chain) of samples with strictly increasing xs.
// Returns the kink indices; collinear interior points are dropped.
inline void lower_hull_indices(const double* xs, const double* f, int n,
                               std::vector<int>& hull) {
  hull.clear();
  for (int i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      // pop b when it sits on or above the chord a -> i
      if ((f[b] - f[a]) * (xs[i] - xs[b]) >= (f[i] - f[b]) * (xs[b] - xs[a]))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
}

// out[k] = max_j (dual[k] * xs[j] - f[j]) for ascending dual points: the
// Legendre-Fenchel transform of the sampled line, O(n + m) by walking the
// lower hull once.
inline void conjugate_samples_eval(const double* xs, const double* f, int n, const double* dual,
                                   int m, std::vector<int>& hull_scratch, double* out) {
  lower_hull_indices(xs, f, n, hull_scratch);
  const auto& hull = hull_scratch;
  const std::size_t segs = hull.size() - 1;
  std::size_t j = 0;
  for (int k = 0; k < m; ++k) {
    const double s = dual[k];
    while (j < segs) {
      const int a = hull[j], b = hull[j + 1];
      // advance while the segment slope is below s
      if (f[b] - f[a] < s * (xs[b] - xs[a]))
        ++j;
      else
        break;
    }
    const int a = hull[j];
    out[k] = s * xs[a] - f[a];
  }
}

}  // namespace detail

inline PiecewiseAffine1D lower_convex_hull(const std::vector<double>& xs,
                                           const std::vector<double>& values) {
  if (xs.size() != values.size() || xs.empty())
    throw invalid_parameters("lower_convex_hull: matching non-empty xs/values required");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1]))
      throw invalid_parameters("lower_convex_hull: xs must strictly increase");
  std::vector<int> hull;
  detail::lower_hull_indices(xs.data(), values.data(), static_cast<int>(xs.size()), hull);
  std::vector<double> hx(hull.size()), hg(hull.size());
  for (std::size_t i = 0; i < hull.size(); ++i) {
    hx[i] = xs[hull[i]];
    hg[i] = values[hull[i]];
  }
  return PiecewiseAffine1D::compact(std::move(hx), std::move(hg));
}

// --- stencil scheme ----------------------------------------------------------

struct StencilSpec {
  int radius = 1;
};

struct ObermanResult {
  ScalarGrid grid;
  bool converged = false;
  int iterations = 0;
  double last_change = 0.0;  // L2 norm of the final Jacobi update
};

namespace detail {

struct StencilPair {
  std::array<int, kMaxDims> plus{}, minus{};  // lattice offsets of the two ends
  std::ptrdiff_t dplus = 0, dminus = 0;       // flat offsets
  double wplus = 0.0, wminus = 0.0;           // convex weights putting x on the chord
};

// Convex combinations through the center along every primitive lattice
// direction of the stencil box: ends x + a d and x - b d with weights
// (b, a) / (a + b). Radius 1 reduces to midpoint averages of antipodal pairs.
inline std::vector<StencilPair> stencil_pairs(const std::vector<int>& shape,
                                              const std::vector<std::size_t>& strides,
                                              int radius) {
  const int nd = static_cast<int>(shape.size());
  std::vector<std::array<int, kMaxDims>> dirs;
  std::array<int, kMaxDims> r{};
  r.fill(-radius);
  for (int a = nd; a < kMaxDims; ++a) r[a] = 0;
  for (;;) {
    bool zero = true, canonical = false;
    int inf = 0, g = 0;
    for (int a = 0; a < nd; ++a) {
      if (r[a] != 0 && zero) {
        zero = false;
        canonical = r[a] > 0;  // keep one of each antipodal pair
      }
      inf = std::max(inf, std::abs(r[a]));
      g = std::gcd(g, std::abs(r[a]));
    }
    if (!zero && canonical && g == 1 && inf <= radius) dirs.push_back(r);
    int a = nd - 1;
    for (; a >= 0; --a) {
      if (++r[a] <= radius) break;
      r[a] = -radius;
    }
    if (a < 0) break;
  }

  std::vector<StencilPair> pairs;
  for (const auto& d : dirs) {
    int inf = 0;
    for (int a = 0; a < nd; ++a) inf = std::max(inf, std::abs(d[a]));
    const int reach = radius / inf;
    for (int ai = 1; ai <= reach; ++ai)
      for (int bi = 1; bi <= reach; ++bi) {
        StencilPair p;
        for (int a = 0; a < nd; ++a) {
          p.plus[a] = ai * d[a];
          p.minus[a] = -bi * d[a];
          p.dplus += static_cast<std::ptrdiff_t>(p.plus[a]) * strides[a];
          p.dminus += static_cast<std::ptrdiff_t>(p.minus[a]) * strides[a];
        }
        p.wplus = static_cast<double>(bi) / (ai + bi);
        p.wminus = static_cast<double>(ai) / (ai + bi);
        pairs.push_back(p);
      }
  }
  return pairs;
}

}  // namespace detail

// Iterative convex envelope: Jacobi sweeps of
//   u_next(x) = min( f(x), min over stencil chords through x of their value )
// starting from u_0 = f. The iterates decrease monotonically toward the
// stencil-limited convex envelope; convergence is declared when the L2 norm
// of a sweep's update drops below the tolerance.
inline ObermanResult oberman_convex_envelope(const ScalarGrid& f, StencilSpec stencil = {},
                                             double tol_rel = 1e-7, int max_iters = 20000,
                                             double tol_abs = 0.0) {
  if (stencil.radius < 1) throw invalid_parameters("stencil radius must be >= 1");
  if (max_iters < 1) throw invalid_parameters("max_iters must be >= 1");
  if (!(tol_rel > 0.0) && !(tol_abs > 0.0))
    throw invalid_parameters("a positive tolerance is required");

  const int nd = f.ndim();
  const auto& shape = f.shape();
  const auto strides = detail::strides_of(shape);
  const auto pairs = detail::stencil_pairs(shape, strides, stencil.radius);

  double norm_f = 0.0;
  for (double v : f.values()) norm_f += v * v;
  const double threshold = tol_abs > 0.0 ? tol_abs : tol_rel * std::sqrt(norm_f);

  const int margin = stencil.radius;
  bool has_interior = true;
  for (int a = 0; a < nd; ++a)
    if (2 * margin >= shape[a]) has_interior = false;

  std::vector<double> cur(f.values()), next(f.size());
  ObermanResult res{f, false, 0, 0.0};

  std::array<int, kMaxDims> idx{};
  for (int iter = 1; iter <= max_iters; ++iter) {
    idx.fill(0);
    double change2 = 0.0;
    for (std::size_t c = 0; c < cur.size(); ++c) {
      bool interior = has_interior;
      for (int a = 0; a < nd && interior; ++a)
        interior = idx[a] >= margin && idx[a] < shape[a] - margin;

      double best = f[c];
      if (interior) {
        for (const auto& p : pairs) {
          const double cand =
              p.wplus * cur[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + p.dplus)] +
              p.wminus * cur[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + p.dminus)];
          if (cand < best) best = cand;
        }
      } else {
        for (const auto& p : pairs) {
          bool inside = true;
          for (int a = 0; a < nd; ++a) {
            const int jp = idx[a] + p.plus[a], jm = idx[a] + p.minus[a];
            if (jp < 0 || jp >= shape[a] || jm < 0 || jm >= shape[a]) {
              inside = false;
              break;
            }
          }
          if (!inside) continue;
          const double cand =
              p.wplus * cur[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + p.dplus)] +
              p.wminus * cur[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + p.dminus)];
          if (cand < best) best = cand;
        }
      }
      next[c] = best;
      const double d = best - cur[c];
      change2 += d * d;
      for (int a = nd - 1; a >= 0; --a) {
        if (++idx[a] < shape[a]) break;
        idx[a] = 0;
      }
    }
    cur.swap(next);
    res.iterations = iter;
    res.last_change = std::sqrt(change2);
    if (res.last_change <= threshold) {
      res.converged = true;
      break;
    }
  }
  res.grid = f.like(std::move(cur));
  return res;
}

// --- biconjugate scheme ------------------------------------------------------

namespace detail {

struct ConjState {
  std::vector<double> buf;
  std::vector<int> shape;
  std::vector<std::vector<double>> coords;  // current axis coordinates
};

// Replace axis `ax` by its Legendre-Fenchel transform sampled at `target`.
inline void conjugate_axis(ConjState& st, int ax, const std::vector<double>& target) {
  const int nd = static_cast<int>(st.shape.size());
  const int n = st.shape[ax];
  const int m = static_cast<int>(target.size());
  std::size_t inner = 1, outer = 1;
  for (int a = ax + 1; a < nd; ++a) inner *= static_cast<std::size_t>(st.shape[a]);
  for (int a = 0; a < ax; ++a) outer *= static_cast<std::size_t>(st.shape[a]);

  const auto& xs = st.coords[ax];
  std::vector<double> out(outer * static_cast<std::size_t>(m) * inner);
  std::vector<double> line(n), res(m);
  std::vector<int> hull;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t r = 0; r < inner; ++r) {
      const std::size_t ibase = o * (static_cast<std::size_t>(n) * inner) + r;
      const std::size_t obase = o * (static_cast<std::size_t>(m) * inner) + r;
      for (int i = 0; i < n; ++i) line[i] = st.buf[ibase + static_cast<std::size_t>(i) * inner];
      conjugate_samples_eval(xs.data(), line.data(), n, target.data(), m, hull, res.data());
      for (int k = 0; k < m; ++k) out[obase + static_cast<std::size_t>(k) * inner] = res[k];
    }
  st.buf = std::move(out);
  st.shape[ax] = m;
  st.coords[ax] = target;
}

// Full transform f -> f* on the current coordinate system: conjugate the last
// axis, then repeatedly negate and conjugate the next axis to the left. The
// negation between axes makes the one-dimensional transforms compose into the
// n-dimensional one.
inline void conjugate_all(ConjState& st, const std::vector<std::vector<double>>& targets) {
  const int nd = static_cast<int>(st.shape.size());
  for (int ax = nd - 1; ax >= 0; --ax) {
    if (ax != nd - 1)
      for (auto& v : st.buf) v = -v;
    conjugate_axis(st, ax, targets[ax]);
  }
}

}  // namespace detail

// Discrete convex envelope through the double Legendre-Fenchel transform.
// Dual grids are uniform with step `dual_spacing`; their ranges are derived
// from the extreme finite-difference slopes of the input (or taken from
// `dual_range`, which must cover those slopes).
inline ScalarGrid biconjugate_envelope(const ScalarGrid& g, double dual_spacing,
                                       std::vector<std::pair<double, double>> dual_range = {}) {
  if (!(dual_spacing > 0.0) || !std::isfinite(dual_spacing))
    throw invalid_parameters("biconjugate_envelope: dual spacing must be finite and > 0");
  const int nd = g.ndim();
  if (!dual_range.empty() && static_cast<int>(dual_range.size()) != nd)
    throw invalid_parameters("biconjugate_envelope: one dual range per axis expected");

  // extreme forward-difference slopes per axis
  std::vector<double> lo(nd, 0.0), hi(nd, 0.0);
  const auto strides = detail::strides_of(g.shape());
  for (int a = 0; a < nd; ++a) {
    const int n = g.shape()[a];
    if (n < 2) continue;
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    const double h = g.spacing()[a];
    detail::for_each_line(g.shape(), a, [&](std::size_t off) {
      for (int i = 0; i + 1 < n; ++i) {
        const double s =
            (g[off + (i + 1) * strides[a]] - g[off + i * strides[a]]) / h;
        mn = std::min(mn, s);
        mx = std::max(mx, s);
      }
    });
    lo[a] = mn;
    hi[a] = mx;
  }

  std::vector<std::vector<double>> duals(nd), primal(nd);
  for (int a = 0; a < nd; ++a) {
    double rlo = lo[a] - dual_spacing, rhi = hi[a] + dual_spacing;
    if (!dual_range.empty()) {
      rlo = dual_range[a].first;
      rhi = dual_range[a].second;
      if (rlo > lo[a] || rhi < hi[a])
        throw dual_coverage("biconjugate_envelope: dual range on axis " + std::to_string(a) +
                            " does not cover slopes [" + std::to_string(lo[a]) + ", " +
                            std::to_string(hi[a]) + "]");
    }
    const double steps = std::ceil((rhi - rlo) / dual_spacing);
    if (!(steps < double{1 << 22}))
      throw invalid_parameters(
          "biconjugate_envelope: dual grid on axis " + std::to_string(a) +
          " would need more than 2^22 points; increase the dual spacing");
    const int m = std::max(1, static_cast<int>(steps)) + 1;
    duals[a].resize(m);
    for (int k = 0; k < m; ++k) duals[a][k] = rlo + k * dual_spacing;
    primal[a].resize(g.shape()[a]);
    for (int i = 0; i < g.shape()[a]; ++i) primal[a][i] = g.coord(a, i);
  }

  detail::ConjState st;
  st.buf = g.values();
  st.shape = g.shape();
  st.coords = primal;
  detail::conjugate_all(st, duals);    // f -> f*
  detail::conjugate_all(st, primal);   // f* -> f** on the original lattice
  return g.like(std::move(st.buf));
}

}  // namespace ccx
