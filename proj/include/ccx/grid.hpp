#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccx/errors.hpp"

namespace ccx {

inline constexpr int kMaxDims = 3;

namespace detail {

inline void check_shape(const std::vector<int>& shape) {
  if (shape.empty() || shape.size() > static_cast<std::size_t>(kMaxDims))
    throw invalid_grid("grid needs 1 to 3 axes, got " + std::to_string(shape.size()));
  for (int n : shape)
    if (n < 1) throw invalid_grid("axis extent must be >= 1, got " + std::to_string(n));
}

inline std::size_t cell_count(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

inline void check_axis_field(const std::vector<double>& v, std::size_t ndim, bool positive,
                             const char* what) {
  if (v.size() != ndim)
    throw invalid_grid(std::string(what) + " must have one entry per axis");
  for (double x : v) {
    if (!std::isfinite(x) || (positive && x <= 0.0))
      throw invalid_grid(std::string(what) + " entries must be finite" +
                         (positive ? " and > 0" : ""));
  }
}

// Reflect a (possibly out-of-range) index into [0, n). The extension is
// symmetric about the cell edges, so the boundary sample repeats:
//   ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int mirror_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

// Row-major strides; the last axis is contiguous.
inline std::vector<std::size_t> strides_of(const std::vector<int>& shape) {
  std::vector<std::size_t> st(shape.size());
  std::size_t s = 1;
  for (int a = static_cast<int>(shape.size()) - 1; a >= 0; --a) {
    st[a] = s;
    s *= static_cast<std::size_t>(shape[a]);
  }
  return st;
}

// Calls fn(offset) for the first cell of every 1-D line along `axis`.
// Cells of the line are then offset, offset+stride, ..., offset+(n-1)*stride.
template <class F>
void for_each_line(const std::vector<int>& shape, int axis, F&& fn) {
  const auto strides = strides_of(shape);
  const std::size_t stride = strides[axis];
  const std::size_t total = cell_count(shape);
  const std::size_t line_len = static_cast<std::size_t>(shape[axis]);
  const std::size_t block = stride * line_len;  // span of one full line group
  for (std::size_t base = 0; base < total; base += block)
    for (std::size_t off = 0; off < stride; ++off) fn(base + off);
}

template <class T>
std::vector<T> pad_mirror_values(const std::vector<int>& shape, const std::vector<T>& in,
                                 int width) {
  if (width < 0) throw invalid_padding("padding width must be >= 0");
  for (std::size_t a = 0; a < shape.size(); ++a)
    if (width > shape[a])
      throw invalid_padding("padding width " + std::to_string(width) + " exceeds extent of axis " +
                            std::to_string(a));
  if (width == 0) return in;

  const int nd = static_cast<int>(shape.size());
  std::vector<int> out_shape(shape);
  for (auto& n : out_shape) n += 2 * width;
  const auto in_strides = strides_of(shape);
  std::vector<T> out(cell_count(out_shape));

  std::array<int, kMaxDims> idx{};  // odometer over the output grid
  for (std::size_t o = 0; o < out.size(); ++o) {
    std::size_t src = 0;
    for (int a = 0; a < nd; ++a) src += in_strides[a] * mirror_index(idx[a] - width, shape[a]);
    out[o] = in[src];
    for (int a = nd - 1; a >= 0; --a) {
      if (++idx[a] < out_shape[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

template <class T>
std::vector<T> crop_values(const std::vector<int>& shape, const std::vector<T>& in, int width) {
  if (width < 0) throw invalid_padding("crop width must be >= 0");
  for (std::size_t a = 0; a < shape.size(); ++a)
    if (shape[a] - 2 * width < 1)
      throw invalid_padding("crop width " + std::to_string(width) + " leaves axis " +
                            std::to_string(a) + " empty");
  if (width == 0) return in;

  const int nd = static_cast<int>(shape.size());
  std::vector<int> out_shape(shape);
  for (auto& n : out_shape) n -= 2 * width;
  const auto in_strides = strides_of(shape);
  std::vector<T> out(cell_count(out_shape));

  std::array<int, kMaxDims> idx{};
  for (std::size_t o = 0; o < out.size(); ++o) {
    std::size_t src = 0;
    for (int a = 0; a < nd; ++a) src += in_strides[a] * static_cast<std::size_t>(idx[a] + width);
    out[o] = in[src];
    for (int a = nd - 1; a >= 0; --a) {
      if (++idx[a] < out_shape[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace detail

// Dense real-valued function sampled on a regular 1-D/2-D/3-D grid.
// Values are row-major (last axis contiguous) and always finite.
class ScalarGrid {
 public:
  ScalarGrid() = default;

  ScalarGrid(std::vector<int> shape, std::vector<double> values, std::vector<double> spacing = {},
             std::vector<double> origin = {})
      : shape_(std::move(shape)),
        spacing_(std::move(spacing)),
        origin_(std::move(origin)),
        values_(std::move(values)) {
    detail::check_shape(shape_);
    if (spacing_.empty()) spacing_.assign(shape_.size(), 1.0);
    if (origin_.empty()) origin_.assign(shape_.size(), 0.0);
    detail::check_axis_field(spacing_, shape_.size(), /*positive=*/true, "spacing");
    detail::check_axis_field(origin_, shape_.size(), /*positive=*/false, "origin");
    if (values_.size() != detail::cell_count(shape_))
      throw invalid_grid("value count does not match shape");
    for (double v : values_)
      if (!std::isfinite(v)) throw invalid_grid("grid values must be finite");
  }

  ScalarGrid(std::vector<int> shape, double fill = 0.0, std::vector<double> spacing = {},
             std::vector<double> origin = {})
      : ScalarGrid(shape, std::vector<double>(detail::cell_count(shape), fill),
                   std::move(spacing), std::move(origin)) {}

  int ndim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<double>& origin() const { return origin_; }
  std::size_t size() const { return values_.size(); }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  const double* data() const { return values_.data(); }
  double* data() { return values_.data(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  // World coordinate of lattice index i along `axis`.
  double coord(int axis, int i) const { return origin_[axis] + spacing_[axis] * i; }

  // New grid with the same geometry and the given (size-checked) values.
  ScalarGrid like(std::vector<double> values) const {
    return ScalarGrid(shape_, std::move(values), spacing_, origin_);
  }
  ScalarGrid like(double fill = 0.0) const { return ScalarGrid(shape_, fill, spacing_, origin_); }

  bool same_geometry(const ScalarGrid& o) const {
    return shape_ == o.shape_ && spacing_ == o.spacing_ && origin_ == o.origin_;
  }

 private:
  std::vector<int> shape_;
  std::vector<double> spacing_;
  std::vector<double> origin_;
  std::vector<double> values_;
};

// Subset of grid cells, same geometry conventions as ScalarGrid.
class MaskGrid {
 public:
  MaskGrid() = default;

  MaskGrid(std::vector<int> shape, std::vector<std::uint8_t> flags,
           std::vector<double> spacing = {}, std::vector<double> origin = {})
      : shape_(std::move(shape)),
        spacing_(std::move(spacing)),
        origin_(std::move(origin)),
        flags_(std::move(flags)) {
    detail::check_shape(shape_);
    if (spacing_.empty()) spacing_.assign(shape_.size(), 1.0);
    if (origin_.empty()) origin_.assign(shape_.size(), 0.0);
    detail::check_axis_field(spacing_, shape_.size(), true, "spacing");
    detail::check_axis_field(origin_, shape_.size(), false, "origin");
    if (flags_.size() != detail::cell_count(shape_))
      throw invalid_grid("flag count does not match shape");
    for (auto& f : flags_) f = f ? 1 : 0;
  }

  MaskGrid(std::vector<int> shape, bool fill = false, std::vector<double> spacing = {},
           std::vector<double> origin = {})
      : MaskGrid(shape,
                 std::vector<std::uint8_t>(detail::cell_count(shape), fill ? 1 : 0),
                 std::move(spacing), std::move(origin)) {}

  int ndim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<double>& origin() const { return origin_; }
  std::size_t size() const { return flags_.size(); }

  const std::vector<std::uint8_t>& flags() const { return flags_; }
  std::vector<std::uint8_t>& flags() { return flags_; }
  bool operator[](std::size_t i) const { return flags_[i] != 0; }
  void set(std::size_t i, bool on) { flags_[i] = on ? 1 : 0; }

  double coord(int axis, int i) const { return origin_[axis] + spacing_[axis] * i; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto f : flags_) c += f;
    return c;
  }
  bool empty() const { return count() == 0; }

  bool same_geometry(const MaskGrid& o) const {
    return shape_ == o.shape_ && spacing_ == o.spacing_ && origin_ == o.origin_;
  }
  bool same_geometry(const ScalarGrid& o) const {
    return shape_ == o.shape() && spacing_ == o.spacing() && origin_ == o.origin();
  }

 private:
  std::vector<int> shape_;
  std::vector<double> spacing_;
  std::vector<double> origin_;
  std::vector<std::uint8_t> flags_;
};

// Scattered samples: values known on the masked cells only.
struct SampleField {
  MaskGrid mask;
  std::vector<double> values;  // full-size, meaningful on masked cells

  static SampleField from(const ScalarGrid& g, const MaskGrid& keep) {
    if (!keep.same_geometry(g)) throw invalid_grid("sample mask geometry differs from grid");
    SampleField s;
    s.mask = keep;
    s.values.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (keep[i]) s.values[i] = g[i];
    return s;
  }

  std::size_t sample_count() const { return mask.count(); }

  double max_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (mask[i]) m = std::max(m, std::abs(values[i]));
    return m;
  }

  // Smallest value range [min, max] over the samples; {0, 0} when empty.
  std::pair<double, double> value_range() const {
    double lo = 0.0, hi = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!mask[i]) continue;
      if (!seen) {
        lo = hi = values[i];
        seen = true;
      } else {
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
      }
    }
    return {lo, hi};
  }
};

enum class Scheme { MoreauParabola, MoreauIterative, Oberman, Biconjugate };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::MoreauParabola: return "moreau-parabola";
    case Scheme::MoreauIterative: return "moreau-iterative";
    case Scheme::Oberman: return "oberman";
    case Scheme::Biconjugate: return "biconjugate";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "moreau-parabola" || s == "moreau") return Scheme::MoreauParabola;
  if (s == "moreau-iterative" || s == "iter-moreau") return Scheme::MoreauIterative;
  if (s == "oberman") return Scheme::Oberman;
  if (s == "biconjugate" || s == "biconj") return Scheme::Biconjugate;
  throw invalid_parameters("unknown scheme '" + s + "'");
}

enum class PadMode { None, Mirror };

struct Padding {
  PadMode mode = PadMode::None;
  int width = 0;
};

// Parameters shared by the transform pipelines. `lambda` drives the primary
// transform, `tau` the secondary one in mixed/stable/smooth variants, and
// `level_M` the +/-M extension used by restoration.
struct TransformParams {
  double lambda = 1.0;
  double tau = 1.0;
  double level_M = 1e6;
  Scheme scheme = Scheme::MoreauParabola;
  Padding padding{};

  // Scheme knobs. Zero means "pick automatically".
  int max_iters = 0;           // iterative Moreau / Oberman sweep budget
  double tol = 1e-7;           // Oberman: relative L2-change tolerance
  double tol_abs = 0.0;        // Oberman: absolute override, used when > 0
  int stencil_radius = 1;      // Oberman stencil half-width
  double dual_spacing = 0.0;   // biconjugate dual grid step

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw invalid_parameters("lambda must be finite and > 0");
    if (!(tau > 0.0) || !std::isfinite(tau))
      throw invalid_parameters("tau must be finite and > 0");
    if (!(level_M > 0.0) || !std::isfinite(level_M))
      throw invalid_parameters("level_M must be finite and > 0");
    if (padding.width < 0) throw invalid_parameters("padding width must be >= 0");
    if (stencil_radius < 1) throw invalid_parameters("stencil radius must be >= 1");
    if (max_iters < 0) throw invalid_parameters("max_iters must be >= 0");
    if (dual_spacing < 0.0 || !std::isfinite(dual_spacing))
      throw invalid_parameters("dual spacing must be finite and >= 0");
    if (!(tol > 0.0)) throw invalid_parameters("tolerance must be > 0");
  }

  TransformParams with_lambda(double l) const {
    TransformParams p(*this);
    p.lambda = l;
    return p;
  }
};

// Mirror padding: each axis grows by `width` cells per side, filled by the
// symmetric reflection of the existing samples. The origin shifts so interior
// cells keep their world coordinates.
inline ScalarGrid pad_mirror(const ScalarGrid& g, int width) {
  auto vals = detail::pad_mirror_values(g.shape(), g.values(), width);
  std::vector<int> shape(g.shape());
  for (auto& n : shape) n += 2 * width;
  std::vector<double> origin(g.origin());
  for (int a = 0; a < g.ndim(); ++a) origin[a] -= width * g.spacing()[a];
  return ScalarGrid(shape, std::move(vals), g.spacing(), origin);
}

inline MaskGrid pad_mirror(const MaskGrid& m, int width) {
  auto flags = detail::pad_mirror_values(m.shape(), m.flags(), width);
  std::vector<int> shape(m.shape());
  for (auto& n : shape) n += 2 * width;
  std::vector<double> origin(m.origin());
  for (int a = 0; a < m.ndim(); ++a) origin[a] -= width * m.spacing()[a];
  return MaskGrid(shape, std::move(flags), m.spacing(), origin);
}

inline ScalarGrid crop(const ScalarGrid& g, int width) {
  auto vals = detail::crop_values(g.shape(), g.values(), width);
  std::vector<int> shape(g.shape());
  for (auto& n : shape) n -= 2 * width;
  std::vector<double> origin(g.origin());
  for (int a = 0; a < g.ndim(); ++a) origin[a] += width * g.spacing()[a];
  return ScalarGrid(shape, std::move(vals), g.spacing(), origin);
}

inline MaskGrid crop(const MaskGrid& m, int width) {
  auto flags = detail::crop_values(m.shape(), m.flags(), width);
  std::vector<int> shape(m.shape());
  for (auto& n : shape) n -= 2 * width;
  std::vector<double> origin(m.origin());
  for (int a = 0; a < m.ndim(); ++a) origin[a] += width * m.spacing()[a];
  return MaskGrid(shape, std::move(flags), m.spacing(), origin);
}

// Characteristic function of the masked set, scaled to `amplitude`.
inline ScalarGrid char_grid(const MaskGrid& m, double amplitude = 1.0) {
  if (!std::isfinite(amplitude)) throw invalid_parameters("amplitude must be finite");
  std::vector<double> v(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) v[i] = amplitude;
  return ScalarGrid(m.shape(), std::move(v), m.spacing(), m.origin());
}

}  // namespace ccx
