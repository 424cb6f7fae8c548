#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ccx/errors.hpp"
#include "ccx/grid.hpp"

namespace ccx {

namespace detail {

struct EnvelopeScratch {
  std::vector<int> v;        // vertex index of each active parabola
  std::vector<double> z;     // interval boundaries between active parabolas
  std::vector<double> in;    // gathered line
  std::vector<double> out;   // envelope of the line
  void resize(std::size_t n) {
    v.resize(n);
    z.resize(n + 1);
    in.resize(n);
    out.resize(n);
  }
};

// Lower envelope of the parabolas p_j(x) = f[j] + w (x - j)^2 sampled at the
// integers 0..n-1. Exact in one forward sweep; ties keep the earlier vertex.
inline void lower_envelope_core(const double* f, int n, double w, double* out,
                                EnvelopeScratch& s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n == 1) {
    out[0] = f[0];
    return;
  }
  int k = 0;
  s.v[0] = 0;
  s.z[0] = -inf;
  s.z[1] = inf;
  for (int q = 1; q < n; ++q) {
    double x;
    for (;;) {
      const int r = s.v[k];
      // abscissa where parabola q overtakes parabola r
      x = 0.5 * ((f[q] - f[r]) / (w * (q - r)) + (q + r));
      if (k == 0 || x > s.z[k]) break;
      --k;
    }
    ++k;
    s.v[k] = q;
    s.z[k] = x;
    s.z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (s.z[k + 1] < q) ++k;
    const double d = q - s.v[k];
    out[q] = f[s.v[k]] + w * d * d;
  }
}

// One envelope pass along `axis`, in place.
inline void envelope_pass(std::vector<double>& vals, const std::vector<int>& shape,
                          const std::vector<double>& spacing, int axis, double lambda,
                          EnvelopeScratch& s) {
  const int n = shape[axis];
  const double w = lambda * spacing[axis] * spacing[axis];
  const std::size_t stride = strides_of(shape)[axis];
  s.resize(static_cast<std::size_t>(n));
  for_each_line(shape, axis, [&](std::size_t off) {
    for (int i = 0; i < n; ++i) s.in[i] = vals[off + stride * i];
    lower_envelope_core(s.in.data(), n, w, s.out.data(), s);
    for (int i = 0; i < n; ++i) vals[off + stride * i] = s.out[i];
  });
}

}  // namespace detail

// Lower envelope of parabolas along one line:
//   out[i] = min_j values[j] + lambda * (spacing * (i - j))^2
inline std::vector<double> lower_envelope_1d(const std::vector<double>& values, double lambda,
                                             double spacing = 1.0) {
  if (values.empty()) throw invalid_parameters("lower_envelope_1d: empty input");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw invalid_parameters("lower_envelope_1d: lambda must be finite and > 0");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw invalid_parameters("lower_envelope_1d: spacing must be finite and > 0");
  detail::EnvelopeScratch s;
  const int n = static_cast<int>(values.size());
  s.resize(values.size());
  std::vector<double> out(values.size());
  detail::lower_envelope_core(values.data(), n, lambda * spacing * spacing, out.data(), s);
  return out;
}

// Lower Moreau envelope  M_lambda(f)(x) = min_y f(y) + lambda |y - x|^2,
// exact on the lattice; the squared distance separates per axis, so the n-D
// envelope is a sequence of 1-D envelope passes.
inline ScalarGrid lower_moreau(const ScalarGrid& g, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw invalid_parameters("lower_moreau: lambda must be finite and > 0");
  std::vector<double> vals(g.values());
  detail::EnvelopeScratch s;
  for (int a = 0; a < g.ndim(); ++a)
    detail::envelope_pass(vals, g.shape(), g.spacing(), a, lambda, s);
  return g.like(std::move(vals));
}

// Upper Moreau envelope  M^lambda(f)(x) = max_y f(y) - lambda |y - x|^2.
inline ScalarGrid upper_moreau(const ScalarGrid& g, double lambda) {
  std::vector<double> neg(g.values());
  for (auto& v : neg) v = -v;
  ScalarGrid low = lower_moreau(g.like(std::move(neg)), lambda);
  for (auto& v : low.values()) v = -v;
  return low;
}

struct IterativeResult {
  ScalarGrid grid;
  int iterations = 0;      // sweeps actually performed
  bool fixed_point = false;  // a sweep changed nothing before the budget ran out
};

// Iterative approximation of the lower Moreau envelope. Sweep i relaxes over
// the 3^n neighborhood with weight (2i - 1) * lambda |r h|^2; after m sweeps
// the result is the envelope restricted to offsets |r|_inf <= m (the odd
// weights telescope to the exact squared distance along each axis).
inline IterativeResult iterative_moreau(const ScalarGrid& g, double lambda, int max_iters) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw invalid_parameters("iterative_moreau: lambda must be finite and > 0");
  if (max_iters < 0) throw invalid_parameters("iterative_moreau: max_iters must be >= 0");

  const int nd = g.ndim();
  const auto& shape = g.shape();
  const auto strides = detail::strides_of(shape);

  // Neighborhood offsets r in {-1,0,1}^nd with their base weights lambda |r h|^2.
  struct Offset {
    std::array<int, kMaxDims> r;
    std::ptrdiff_t delta;
    double weight;
  };
  std::vector<Offset> offsets;
  std::array<int, kMaxDims> r{};
  r.fill(-1);
  for (;;) {
    Offset o{};
    o.delta = 0;
    o.weight = 0.0;
    for (int a = 0; a < nd; ++a) {
      o.r[a] = r[a];
      o.delta += static_cast<std::ptrdiff_t>(r[a]) * static_cast<std::ptrdiff_t>(strides[a]);
      const double dh = r[a] * g.spacing()[a];
      o.weight += lambda * dh * dh;
    }
    offsets.push_back(o);
    int a = nd - 1;
    for (; a >= 0; --a) {
      if (++r[a] <= 1) break;
      r[a] = -1;
    }
    if (a < 0) break;
  }

  std::vector<double> cur(g.values()), next(g.size());
  IterativeResult res{g, 0, false};
  std::array<int, kMaxDims> idx{};
  for (int iter = 1; iter <= max_iters; ++iter) {
    const double tau = 2.0 * iter - 1.0;
    idx.fill(0);
    bool changed = false;
    for (std::size_t c = 0; c < cur.size(); ++c) {
      double best = cur[c];
      for (const auto& o : offsets) {
        bool inside = true;
        for (int a = 0; a < nd; ++a) {
          const int j = idx[a] + o.r[a];
          if (j < 0 || j >= shape[a]) {
            inside = false;
            break;
          }
        }
        if (!inside) continue;
        const double cand = cur[static_cast<std::size_t>(
                                static_cast<std::ptrdiff_t>(c) + o.delta)] +
                            tau * o.weight;
        if (cand < best) best = cand;
      }
      next[c] = best;
      if (best != cur[c]) changed = true;
      for (int a = nd - 1; a >= 0; --a) {
        if (++idx[a] < shape[a]) break;
        idx[a] = 0;
      }
    }
    res.iterations = iter;
    cur.swap(next);
    if (!changed) {
      res.fixed_point = true;
      break;
    }
  }
  res.grid = g.like(std::move(cur));
  return res;
}

// Exact squared Euclidean distance to the masked set: the lower Moreau
// envelope (lambda = 1) of the 0 / LARGE indicator, where LARGE exceeds the
// squared grid diameter so off-set cells never win.
inline ScalarGrid squared_distance_transform(const MaskGrid& mask) {
  if (mask.empty()) throw empty_set("squared_distance_transform: empty mask");
  double diam2 = 0.0;
  for (int a = 0; a < mask.ndim(); ++a) {
    const double len = (mask.shape()[a] - 1) * mask.spacing()[a];
    diam2 += len * len;
  }
  const double large = diam2 + 1.0;
  std::vector<double> v(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) v[i] = mask[i] ? 0.0 : large;
  ScalarGrid ind(mask.shape(), std::move(v), mask.spacing(), mask.origin());
  return lower_moreau(ind, 1.0);
}

}  // namespace ccx
