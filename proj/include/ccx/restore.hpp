#pragma once

// Scattered-data approximation and image restoration built on the compensated
// transforms: level extensions of a sample field, the average approximation
// and its smooth mixed variant, and the salt-&-pepper / inpainting pipelines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ccx/cct.hpp"
#include "ccx/errors.hpp"
#include "ccx/grid.hpp"

namespace ccx {

// f^{+M} / f^{-M}: the sample values on the sample set, +M (sign = +1) or -M
// (sign = -1) on its complement. The level must strictly dominate every
// sample magnitude, otherwise the extension would not bracket the data.
inline ScalarGrid extend_with_level(const SampleField& s, int sign, double level) {
  if (sign != 1 && sign != -1)
    throw invalid_parameters("extension sign must be +1 or -1");
  if (!std::isfinite(level) || level <= 0.0)
    throw invalid_parameters("extension level must be positive and finite");
  if (s.sample_count() == 0) throw empty_set("sample field has no cells");
  if (s.values.size() != s.mask.size())
    throw invalid_grid("sample value buffer does not match its mask");
  const double peak = s.max_abs();
  if (!(level > peak))
    throw level_too_small("extension level " + std::to_string(level) +
                          " must exceed the largest sample magnitude " + std::to_string(peak));
  std::vector<double> out(s.mask.size(), sign > 0 ? level : -level);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (s.mask[i]) out[i] = s.values[i];
  return ScalarGrid(s.mask.shape(), std::move(out), s.mask.spacing(), s.mask.origin());
}

// Default extension level when the caller does not pick one: a factor of 1e6
// above the sample scale, never below 1e6 itself.
inline double default_level(const SampleField& s) {
  const auto [lo, hi] = s.value_range();
  const double scale = std::max({hi - lo, std::abs(lo), std::abs(hi), 1.0});
  return 1e6 * scale;
}

// Average approximation A = (C^l_lambda(f^{+M}) + C^u_lambda(f^{-M})) / 2.
// The level M is taken from params.level_M; scale, scheme and scheme knobs
// come from the same parameter pack.
inline ScalarGrid average_transform(const SampleField& s, const TransformParams& p) {
  p.validate();
  const ScalarGrid up = extend_with_level(s, +1, p.level_M);
  const ScalarGrid down = extend_with_level(s, -1, p.level_M);
  const ScalarGrid lo = lower_transform(up, p);
  const ScalarGrid hi = upper_transform(down, p);
  std::vector<double> avg(lo.size());
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = 0.5 * (lo[i] + hi[i]);
  return lo.like(std::move(avg));
}

// Smooth average approximation
//   SA = (C^u_tau(C^l_lambda(f^{+M})) + C^l_tau(C^u_lambda(f^{-M}))) / 2.
// The outer smoothing scale is params.tau; it satisfies
// ||SA - A||_inf <= 16 * level_M * lambda / tau.
inline ScalarGrid smooth_average_transform(const SampleField& s, const TransformParams& p) {
  p.validate();
  const ScalarGrid up = extend_with_level(s, +1, p.level_M);
  const ScalarGrid down = extend_with_level(s, -1, p.level_M);
  const ScalarGrid lo_smooth = mixed_upper_lower(up, p);  // C^u_tau(C^l_lambda(.))
  TransformParams q = p;                                  // C^l_tau(C^u_lambda(.))
  q.lambda = p.tau;
  q.tau = p.lambda;
  const ScalarGrid hi_smooth = mixed_lower_upper(down, q);
  std::vector<double> avg(lo_smooth.size());
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = 0.5 * (lo_smooth[i] + hi_smooth[i]);
  return lo_smooth.like(std::move(avg));
}

// Restored image plus the measured fidelity of the raw approximation on the
// kept cells: eps_k is the relative L2 distance between the approximation and
// the input over the kept set, taken before the kept pixels are copied back
// (an absolute RMS if the kept data is identically zero).
struct RestoreResult {
  ScalarGrid image;
  double eps_k = 0.0;
};

namespace detail {

// Shared pipeline: mirror-pad the (corrupted) image and the bad-cell mask,
// approximate from the kept cells, crop, then copy the kept pixels through
// unchanged. Padding uses image values only, so corrupted values may appear
// in the padding ring exactly as they do inside.
inline RestoreResult restore_from_complement(const ScalarGrid& image, const MaskGrid& bad,
                                             const TransformParams& p, int pad_width) {
  p.validate();
  if (!bad.same_geometry(image))
    throw invalid_grid("bad-cell mask geometry differs from the image");
  if (bad.count() == bad.size()) throw empty_set("every cell is marked bad; nothing to sample");

  const ScalarGrid padded = pad_mirror(image, pad_width);
  const MaskGrid bad_padded = pad_mirror(bad, pad_width);
  MaskGrid keep = bad_padded;
  for (std::size_t i = 0; i < keep.size(); ++i) keep.set(i, !bad_padded[i]);

  TransformParams q = p;
  q.padding = Padding{};  // padding is handled here, not inside the engine
  const ScalarGrid approx = crop(average_transform(SampleField::from(padded, keep), q), pad_width);

  double num = 0.0, den = 0.0;
  std::vector<double> out(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (bad[i]) {
      out[i] = approx[i];
    } else {
      const double d = approx[i] - image[i];
      num += d * d;
      den += image[i] * image[i];
      out[i] = image[i];
    }
  }
  RestoreResult r;
  r.image = image.like(std::move(out));
  r.eps_k = den > 0.0 ? std::sqrt(num / den)
                      : std::sqrt(num / static_cast<double>(image.size() - bad.count()));
  return r;
}

}  // namespace detail

// Replace the cells flagged as noise with the average approximation built
// from the remaining cells. The image and mask are mirror-padded by
// `pad_width` cells first (values taken from the corrupted image itself) so
// samples exist on all sides of near-boundary noise.
inline RestoreResult denoise_salt_pepper(const ScalarGrid& image, const MaskGrid& noise,
                                         const TransformParams& p, int pad_width = 2) {
  return detail::restore_from_complement(image, noise, p, pad_width);
}

// Fill the damaged cells from the intact remainder of the image. Cells
// outside the damage mask are returned bit-identical.
inline RestoreResult inpaint(const ScalarGrid& image, const MaskGrid& damage,
                             const TransformParams& p) {
  return detail::restore_from_complement(image, damage, p, /*pad_width=*/0);
}

// Flag cells whose value sits exactly at the extremes of the representable
// range (salt or pepper in an 8-bit image). Detection is exact only when the
// clean image never attains those values.
inline MaskGrid detect_extremes(const ScalarGrid& image, double lo = 0.0, double hi = 255.0) {
  if (!(lo < hi)) throw invalid_parameters("extreme-value bounds must satisfy lo < hi");
  MaskGrid m(image.shape(), false, image.spacing(), image.origin());
  for (std::size_t i = 0; i < image.size(); ++i) m.set(i, image[i] == lo || image[i] == hi);
  return m;
}

}  // namespace ccx
