#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "ccx/errors.hpp"
#include "ccx/grid.hpp"
#include "ccx/moreau.hpp"

namespace ccx {

// PSNR against a fixed peak value. `exact` flags a zero mean-square error,
// where the decibel value would be infinite.
struct PsnrResult {
  bool exact = false;
  double db = std::numeric_limits<double>::infinity();
};

inline PsnrResult psnr(const ScalarGrid& a, const ScalarGrid& b, double peak = 255.0) {
  if (!a.same_geometry(b)) throw invalid_grid("psnr: grids must share geometry");
  if (!(peak > 0.0) || !std::isfinite(peak)) throw invalid_parameters("psnr: peak must be > 0");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return {true, std::numeric_limits<double>::infinity()};
  return {false, 10.0 * std::log10(peak * peak / mse)};
}

// ||a - b||_2 / ||ref||_2, optionally restricted to a mask.
inline double rel_l2(const ScalarGrid& a, const ScalarGrid& ref) {
  if (!a.same_geometry(ref)) throw invalid_grid("rel_l2: grids must share geometry");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw invalid_parameters("rel_l2: reference has zero norm");
  return std::sqrt(num / den);
}

inline double rel_l2(const ScalarGrid& a, const ScalarGrid& ref, const MaskGrid& where) {
  if (!a.same_geometry(ref)) throw invalid_grid("rel_l2: grids must share geometry");
  if (!where.same_geometry(a)) throw invalid_grid("rel_l2: mask must share geometry");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!where[i]) continue;
    const double d = a[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw invalid_parameters("rel_l2: reference has zero norm on the mask");
  return std::sqrt(num / den);
}

// Exact Hausdorff distance between the cell-center point sets of two masks on
// a common grid, computed from one squared distance transform per side.
inline double hausdorff(const MaskGrid& a, const MaskGrid& b) {
  if (!a.same_geometry(b)) throw invalid_grid("hausdorff: masks must share geometry");
  if (a.empty() || b.empty()) throw empty_set("hausdorff: both masks must be non-empty");
  const ScalarGrid da = squared_distance_transform(a);
  const ScalarGrid db = squared_distance_transform(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]) worst = std::max(worst, db[i]);
    if (b[i]) worst = std::max(worst, da[i]);
  }
  return std::sqrt(worst);
}

// Hausdorff distance between the supports {|value| > threshold} of two
// fields. A negative threshold selects 1e-8 times the largest magnitude seen
// in either field. Matching empty supports give 0; a one-sided empty support
// gives +infinity.
inline double support_hausdorff_error(const ScalarGrid& a, const ScalarGrid& b,
                                      double threshold = -1.0) {
  if (!a.same_geometry(b)) throw invalid_grid("support_hausdorff_error: grids must share geometry");
  if (threshold < 0.0) {
    double peak = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      peak = std::max({peak, std::abs(a[i]), std::abs(b[i])});
    threshold = 1e-8 * peak;
  }
  MaskGrid sa(a.shape(), false, a.spacing(), a.origin());
  MaskGrid sb = sa;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa.set(i, std::abs(a[i]) > threshold);
    sb.set(i, std::abs(b[i]) > threshold);
  }
  if (sa.empty() && sb.empty()) return 0.0;
  if (sa.empty() || sb.empty()) return std::numeric_limits<double>::infinity();
  return hausdorff(sa, sb);
}

}  // namespace ccx
