// ccx: compensated convex transforms, feature maps, restoration, distance
// transforms and metrics over grid files (fgrid / pgm / csv), plus built-in
// benchmarks with embedded synthetic inputs. Every subcommand emits a JSON
// report (stdout, or the file named by --report) matching
// schemas/report.schema.json.

#include <array>
#include <chrono>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccx/cct.hpp"
#include "ccx/errors.hpp"
#include "ccx/experiments.hpp"
#include "ccx/features.hpp"
#include "ccx/grid.hpp"
#include "ccx/io.hpp"
#include "ccx/metrics.hpp"
#include "ccx/moreau.hpp"
#include "ccx/restore.hpp"

namespace {

using nlohmann::json;

// Option storage. Each leaf subcommand owns one instance, so per-command
// defaults never leak into another command.
struct Args {
  std::string in, mask, cells, out, report, markers;
  std::string scheme = "moreau";
  double lambda = 1.0;
  double tau = 1.0;
  double level_m = 0.0;  // 0 = derive from the sample range
  double dual_h = 0.0;   // 0 = derive from the slope spread
  double threshold = -1.0;
  double rho = 0.5;
  double tol_abs = 0.0;  // 0 = keep the relative stopping rule
  int pad = 0;
  int max_iters = 0;  // 0 = scheme default budget
  int stencil = 1;
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void emit_report(const Args& a, json rep, double seconds) {
  rep["timing_seconds"] = seconds;
  const std::string text = rep.dump(2) + "\n";
  if (a.report.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(a.report, std::ios::binary | std::ios::trunc);
    if (!f) throw ccx::io_error("cannot open report file '" + a.report + "'");
    f << text;
    if (!f) throw ccx::io_error("cannot write report file '" + a.report + "'");
  }
}

ccx::TransformParams make_params(const Args& a, bool use_pad_flag = true) {
  ccx::TransformParams p;
  p.lambda = a.lambda;
  p.tau = a.tau;
  p.scheme = ccx::parse_scheme(a.scheme);
  if (a.level_m > 0.0) p.level_M = a.level_m;
  p.dual_spacing = a.dual_h;
  p.tol_abs = a.tol_abs;
  p.max_iters = a.max_iters;
  p.stencil_radius = a.stencil;
  if (use_pad_flag && a.pad > 0) p.padding = {ccx::PadMode::Mirror, a.pad};
  return p;
}

// Solver knobs shared by every subcommand that runs a transform.
void add_solver_flags(CLI::App* c, const std::shared_ptr<Args>& a) {
  c->add_option("--scheme", a->scheme, "moreau|iter-moreau|oberman|biconj (default moreau)");
  c->add_option("--pad", a->pad, "mirror-padding width in cells");
  c->add_option("--dual-h", a->dual_h, "dual grid spacing for the biconjugate scheme (0 = auto)");
  c->add_option("--max-iters", a->max_iters, "sweep budget for the iterative schemes (0 = default)");
  c->add_option("--tol-abs", a->tol_abs, "absolute stopping tolerance for the envelope solver");
  c->add_option("--stencil", a->stencil, "stencil radius for the envelope solver (default 1)");
}

json transform_params_json(const Args& a, bool with_tau) {
  json j{{"lambda", a.lambda},
         {"scheme", ccx::scheme_name(ccx::parse_scheme(a.scheme))},
         {"pad", a.pad},
         {"dual_h", a.dual_h}};
  if (with_tau) j["tau"] = a.tau;
  return j;
}

std::pair<double, double> value_range(const ccx::ScalarGrid& g) {
  double lo = g[0], hi = g[0];
  for (double v : g.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

// Marker cells as CSV of lattice coordinates, row-major, with a header row.
void write_markers_csv(const std::string& path, const ccx::MaskGrid& m) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ccx::io_error("cannot open marker file '" + path + "'");
  static const char* axis_names[ccx::kMaxDims] = {"i", "j", "k"};
  for (int a = 0; a < m.ndim(); ++a) f << (a ? "," : "") << axis_names[a];
  f << '\n';
  std::array<int, ccx::kMaxDims> idx{};
  for (std::size_t c = 0; c < m.size(); ++c) {
    if (m[c]) {
      for (int a = 0; a < m.ndim(); ++a) f << (a ? "," : "") << idx[a];
      f << '\n';
    }
    for (int a = m.ndim() - 1; a >= 0; --a) {
      if (++idx[a] < m.shape()[a]) break;
      idx[a] = 0;
    }
  }
  if (!f) throw ccx::io_error("cannot write marker file '" + path + "'");
}

void write_feature_sidecar(const std::string& grid_path, const ccx::FeatureMap& m,
                           const json& params) {
  json side{{"kind", ccx::feature_kind_name(m.kind)}, {"params", params}};
  const std::string path = grid_path + ".json";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ccx::io_error("cannot open sidecar file '" + path + "'");
  f << side.dump(2) << '\n';
  if (!f) throw ccx::io_error("cannot write sidecar file '" + path + "'");
}

json rel_l2_or_null(const ccx::ScalarGrid& a, const ccx::ScalarGrid& ref) {
  try {
    return ccx::rel_l2(a, ref);
  } catch (const ccx::invalid_parameters&) {
    return nullptr;  // zero-norm reference: the ratio is undefined
  }
}

// ---------------------------------------------------------------- cct group

void run_cct(const Args& a, int which, const char* name) {
  const ccx::ScalarGrid f = ccx::read_grid(a.in);
  const ccx::TransformParams p = make_params(a);
  ccx::reset_iteration_count();
  Timer t;
  ccx::ScalarGrid out = which == 0   ? ccx::lower_transform(f, p)
                        : which == 1 ? ccx::upper_transform(f, p)
                        : which == 2 ? ccx::mixed_upper_lower(f, p)
                                     : ccx::mixed_lower_upper(f, p);
  const double secs = t.seconds();
  ccx::write_grid(out, a.out);
  const auto [lo, hi] = value_range(out);
  emit_report(a,
              json{{"metric", std::string("cct.") + name},
                   {"value", json{{"iterations", ccx::iteration_count()}, {"min", lo}, {"max", hi}}},
                   {"params", transform_params_json(a, which >= 2)},
                   {"grids", json::array({a.in, a.out})}},
              secs);
}

void add_cct(CLI::App& app) {
  auto* grp = app.add_subcommand("cct", "quadratic compensated convex transforms of a grid");
  grp->require_subcommand(1);
  static const std::array<std::pair<const char*, const char*>, 4> kinds{{
      {"lower", "lower transform: tight convex-from-below regularization"},
      {"upper", "upper transform: tight concave-from-above regularization"},
      {"mixed-ul", "upper transform (scale tau) of the lower transform (scale lambda)"},
      {"mixed-lu", "lower transform (scale lambda) of the upper transform (scale tau)"},
  }};
  for (int which = 0; which < 4; ++which) {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand(kinds[which].first, kinds[which].second);
    c->add_option("--in", a->in, "input grid (.fgrid/.pgm/.csv)")->required();
    c->add_option("--out", a->out, "output grid path")->required();
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->add_option("--lambda", a->lambda, "curvature scale (default 1)");
    if (which >= 2) c->add_option("--tau", a->tau, "second curvature scale (default 1)");
    add_solver_flags(c, a);
    const char* name = kinds[which].first;
    c->callback([a, which, name] { run_cct(*a, which, name); });
  }
}

// ------------------------------------------------------------ feature group

enum class Feat { Ridge, Valley, Edge, SR, SV, SE, D2, Corner, Intersect, Mma, Suplevel };

void run_feature(const Args& a, Feat kind, const char* name) {
  const ccx::TransformParams p = make_params(a);

  if (kind == Feat::Suplevel) {
    const ccx::ScalarGrid map = ccx::read_grid(a.in);
    Timer t;
    const ccx::MaskGrid m = ccx::suplevel(map, a.threshold);
    const double secs = t.seconds();
    ccx::write_mask(m, a.out);
    emit_report(a,
                json{{"metric", "feature.suplevel"},
                     {"value", json{{"cells", m.count()}}},
                     {"params", json{{"threshold", a.threshold}}},
                     {"grids", json::array({a.in, a.out})}},
                secs);
    return;
  }

  ccx::reset_iteration_count();
  ccx::FeatureMap fm;
  double secs = 0.0;
  if (kind == Feat::Ridge || kind == Feat::Valley || kind == Feat::Edge) {
    const ccx::ScalarGrid f = ccx::read_grid(a.in);
    Timer t;
    fm = kind == Feat::Ridge ? ccx::ridge(f, p) : kind == Feat::Valley ? ccx::valley(f, p)
                                                                       : ccx::edge(f, p);
    secs = t.seconds();
  } else {
    const ccx::MaskGrid k = ccx::read_mask(a.in);
    Timer t;
    switch (kind) {
      case Feat::SR: fm = ccx::stable_ridge(k, p); break;
      case Feat::SV: fm = ccx::stable_valley(k, p); break;
      case Feat::SE: fm = ccx::stable_edge(k, p); break;
      case Feat::D2: fm = ccx::d2_lambda(k, p); break;
      case Feat::Corner: fm = ccx::interior_corner_map(k, p); break;
      case Feat::Intersect: fm = ccx::intersection_transform(k, p); break;
      default: fm = ccx::mma(k, p); break;
    }
    secs = t.seconds();
  }

  ccx::write_grid(fm.grid, a.out);
  const json params = transform_params_json(a, /*with_tau=*/true);
  write_feature_sidecar(a.out, fm, params);

  const auto [lo, hi] = value_range(fm.grid);
  json value{{"kind", ccx::feature_kind_name(fm.kind)},
             {"iterations", ccx::iteration_count()},
             {"min", lo},
             {"max", hi}};
  json grids = json::array({a.in, a.out});
  if (!a.markers.empty()) {
    const ccx::MaskGrid marks = ccx::feature_markers(fm.grid, a.rho);
    write_markers_csv(a.markers, marks);
    value["markers"] = marks.count();
  }
  json params_rep = params;
  params_rep["rho"] = a.rho;
  emit_report(a,
              json{{"metric", std::string("feature.") + name},
                   {"value", value},
                   {"params", params_rep},
                   {"grids", grids}},
              secs);
}

void add_feature(CLI::App& app) {
  auto* grp = app.add_subcommand("feature", "singularity / geometry maps derived from a grid or mask");
  grp->require_subcommand(1);
  struct Spec {
    const char* name;
    Feat kind;
    const char* help;
  };
  static const std::array<Spec, 11> specs{{
      {"ridge", Feat::Ridge, "ridge map f - lower(f) of a scalar grid"},
      {"valley", Feat::Valley, "valley map upper(f) - f of a scalar grid"},
      {"edge", Feat::Edge, "edge map upper(f) - lower(f) of a scalar grid"},
      {"sr", Feat::SR, "stable ridge map of a mask (scale-normalized, two-scale)"},
      {"sv", Feat::SV, "stable valley map of a mask (requires lambda > tau)"},
      {"se", Feat::SE, "stable edge map of a mask (requires lambda > tau)"},
      {"d2", Feat::D2, "squared-distance lower-transform map of a mask"},
      {"corner", Feat::Corner, "interior corner map of a mask"},
      {"intersect", Feat::Intersect, "intersection map: highlights crossings of thin sets"},
      {"mma", Feat::Mma, "multiscale medial-axis map of a mask"},
      {"suplevel", Feat::Suplevel, "binary mask of cells where a map reaches --threshold"},
  }};
  for (const Spec& s : specs) {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand(s.name, s.help);
    c->add_option("--in", a->in,
                  s.kind == Feat::Suplevel || s.kind == Feat::Ridge || s.kind == Feat::Valley ||
                          s.kind == Feat::Edge
                      ? "input grid (.fgrid/.pgm/.csv)"
                      : "input mask (nonzero cells form the set)")
        ->required();
    c->add_option("--out", a->out, "output path")->required();
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    if (s.kind == Feat::Suplevel) {
      c->add_option("--threshold", a->threshold, "level the mask keeps (cells with value >= threshold)")
          ->required();
    } else {
      c->add_option("--lambda", a->lambda, "curvature scale (default 1)");
      c->add_option("--tau", a->tau, "second curvature scale for stable maps (default 1)");
      add_solver_flags(c, a);
      c->add_option("--markers", a->markers, "also write marker cells (local maxima) as CSV here");
      c->add_option("--rho", a->rho, "marker threshold as a fraction of the global max (default 0.5)");
    }
    const Feat kind = s.kind;
    const char* name = s.name;
    c->callback([a, kind, name] { run_feature(*a, kind, name); });
  }
}

// ------------------------------------------------------------ restore group

void run_restore_fill(const Args& a, bool detect_if_no_mask, const char* name) {
  const ccx::ScalarGrid image = ccx::read_grid(a.in);
  ccx::MaskGrid bad = a.mask.empty() && detect_if_no_mask ? ccx::detect_extremes(image)
                                                          : ccx::read_mask(a.mask);
  ccx::TransformParams p = make_params(a, /*use_pad_flag=*/false);
  if (a.level_m <= 0.0) {
    ccx::MaskGrid keep = bad;
    for (std::size_t i = 0; i < keep.size(); ++i) keep.set(i, !bad[i]);
    p.level_M = ccx::default_level(ccx::SampleField::from(image, keep));
  }
  ccx::reset_iteration_count();
  Timer t;
  const ccx::RestoreResult r = ccx::denoise_salt_pepper(image, bad, p, a.pad);
  const double secs = t.seconds();
  ccx::write_grid(r.image, a.out);
  const auto ps = ccx::psnr(r.image, image);
  json value{{"psnr_vs_input", ps.exact ? json("exact") : json(ps.db)},
             {"eps", rel_l2_or_null(r.image, image)},
             {"eps_k", r.eps_k},
             {"iterations", ccx::iteration_count()}};
  json params = transform_params_json(a, /*with_tau=*/false);
  params["level_m"] = p.level_M;
  json grids = a.mask.empty() ? json::array({a.in, a.out}) : json::array({a.in, a.mask, a.out});
  emit_report(a, json{{"metric", std::string("restore.") + name},
                      {"value", value},
                      {"params", params},
                      {"grids", grids}},
              secs);
}

void run_restore_interp(const Args& a, bool smooth, const char* name) {
  const ccx::ScalarGrid values = ccx::read_grid(a.in);
  const ccx::MaskGrid keep = ccx::read_mask(a.mask);
  const ccx::SampleField s = ccx::SampleField::from(values, keep);
  ccx::TransformParams p = make_params(a);
  if (a.level_m <= 0.0) p.level_M = ccx::default_level(s);
  ccx::reset_iteration_count();
  Timer t;
  const ccx::ScalarGrid out =
      smooth ? ccx::smooth_average_transform(s, p) : ccx::average_transform(s, p);
  const double secs = t.seconds();
  ccx::write_grid(out, a.out);
  json eps_k;
  try {
    eps_k = ccx::rel_l2(out, values, keep);
  } catch (const ccx::invalid_parameters&) {
    eps_k = nullptr;
  }
  const auto [lo, hi] = value_range(out);
  json params = transform_params_json(a, smooth);
  params["level_m"] = p.level_M;
  emit_report(a,
              json{{"metric", std::string("restore.") + name},
                   {"value", json{{"eps_k", eps_k},
                                  {"min", lo},
                                  {"max", hi},
                                  {"iterations", ccx::iteration_count()}}},
                   {"params", params},
                   {"grids", json::array({a.in, a.mask, a.out})}},
              secs);
}

void add_restore(CLI::App& app) {
  auto* grp = app.add_subcommand("restore", "reconstruct grids from partial or corrupted samples");
  grp->require_subcommand(1);

  {
    auto a = std::make_shared<Args>();
    a->pad = 2;
    auto* c = grp->add_subcommand(
        "denoise", "replace salt-&-pepper cells with the average-transform reconstruction");
    c->add_option("--in", a->in, "corrupted image/grid")->required();
    c->add_option("--mask", a->mask,
                  "noise mask (nonzero = corrupted); omitted: flag exact 0/255 cells");
    c->add_option("--out", a->out, "restored output path")->required();
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->add_option("--lambda", a->lambda, "curvature scale (default 1)");
    c->add_option("--level-m", a->level_m, "extension level M (default: derived from sample range)");
    add_solver_flags(c, a);
    c->callback([a] { run_restore_fill(*a, /*detect_if_no_mask=*/true, "denoise"); });
  }
  {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand("inpaint", "fill masked damage from the intact remainder");
    c->add_option("--in", a->in, "damaged image/grid")->required();
    c->add_option("--mask", a->mask, "damage mask (nonzero = missing)")->required();
    c->add_option("--out", a->out, "restored output path")->required();
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->add_option("--lambda", a->lambda, "curvature scale (default 1)");
    c->add_option("--level-m", a->level_m, "extension level M (default: derived from sample range)");
    add_solver_flags(c, a);
    c->callback([a] { run_restore_fill(*a, /*detect_if_no_mask=*/false, "inpaint"); });
  }
  for (int smooth = 0; smooth < 2; ++smooth) {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand(
        smooth ? "smooth-interp" : "interp",
        smooth ? "average-transform interpolant with an extra smoothing pass at scale tau"
               : "average-transform interpolant of scattered samples");
    c->add_option("--in", a->in, "grid holding the sample values")->required();
    c->add_option("--mask", a->mask, "sample mask (nonzero = known cell)")->required();
    c->add_option("--out", a->out, "interpolant output path")->required();
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->add_option("--lambda", a->lambda, "curvature scale (default 1)");
    if (smooth) c->add_option("--tau", a->tau, "smoothing scale (default 1)");
    c->add_option("--level-m", a->level_m, "extension level M (default: derived from sample range)");
    add_solver_flags(c, a);
    const bool sm = smooth != 0;
    c->callback([a, sm] { run_restore_interp(*a, sm, sm ? "smooth-interp" : "interp"); });
  }
}

// --------------------------------------------------------------- dist group

void add_dist(CLI::App& app) {
  auto* grp = app.add_subcommand("dist", "distance transforms of masks");
  grp->require_subcommand(1);
  auto a = std::make_shared<Args>();
  auto* c = grp->add_subcommand("edt", "exact Euclidean distance to the nearest mask cell");
  c->add_option("--in", a->in, "input mask (nonzero cells form the set)")->required();
  c->add_option("--out", a->out, "output grid of distances")->required();
  c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
  c->callback([a] {
    const ccx::MaskGrid m = ccx::read_mask(a->in);
    Timer t;
    ccx::ScalarGrid d = ccx::squared_distance_transform(m);
    for (auto& v : d.values()) v = std::sqrt(v);
    const double secs = t.seconds();
    ccx::write_grid(d, a->out);
    const auto [lo, hi] = value_range(d);
    emit_report(*a,
                json{{"metric", "dist.edt"},
                     {"value", json{{"min", lo}, {"max", hi}}},
                     {"params", json::object()},
                     {"grids", json::array({a->in, a->out})}},
                secs);
  });
}

// ------------------------------------------------------------- metric group

void add_metric(CLI::App& app) {
  auto* grp = app.add_subcommand("metric", "compare two grids or masks");
  grp->require_subcommand(1);

  {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand("psnr", "peak signal-to-noise ratio (dB, peak 255)");
    c->add_option("--in", a->in, "reference grid")->required();
    c->add_option("--mask", a->mask, "candidate grid")->required();
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->callback([a] {
      const ccx::ScalarGrid ref = ccx::read_grid(a->in);
      const ccx::ScalarGrid cand = ccx::read_grid(a->mask);
      Timer t;
      const auto r = ccx::psnr(ref, cand);
      emit_report(*a,
                  json{{"metric", "psnr"},
                       {"value", r.exact ? json("exact") : json(r.db)},
                       {"params", json{{"peak", 255.0}}},
                       {"grids", json::array({a->in, a->mask})}},
                  t.seconds());
    });
  }
  {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand("rel-l2", "relative L2 error of a candidate against a reference");
    c->add_option("--in", a->in, "reference grid")->required();
    c->add_option("--mask", a->mask, "candidate grid")->required();
    c->add_option("--cells", a->cells, "restrict the error to the nonzero cells of this mask");
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->callback([a] {
      const ccx::ScalarGrid ref = ccx::read_grid(a->in);
      const ccx::ScalarGrid cand = ccx::read_grid(a->mask);
      Timer t;
      const double v = a->cells.empty() ? ccx::rel_l2(cand, ref)
                                        : ccx::rel_l2(cand, ref, ccx::read_mask(a->cells));
      json grids = a->cells.empty() ? json::array({a->in, a->mask})
                                    : json::array({a->in, a->mask, a->cells});
      emit_report(*a,
                  json{{"metric", "rel_l2"},
                       {"value", v},
                       {"params", json::object()},
                       {"grids", grids}},
                  t.seconds());
    });
  }
  {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand("hausdorff", "Hausdorff distance between two masks (world units)");
    c->add_option("--in", a->in, "first mask")->required();
    c->add_option("--mask", a->mask, "second mask")->required();
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->callback([a] {
      const ccx::MaskGrid e = ccx::read_mask(a->in);
      const ccx::MaskGrid f = ccx::read_mask(a->mask);
      Timer t;
      const double v = ccx::hausdorff(e, f);
      emit_report(*a,
                  json{{"metric", "hausdorff"},
                       {"value", v},
                       {"params", json::object()},
                       {"grids", json::array({a->in, a->mask})}},
                  t.seconds());
    });
  }
  {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand(
        "ehaus", "Hausdorff distance between the supports of two nonnegative maps");
    c->add_option("--in", a->in, "reference map")->required();
    c->add_option("--mask", a->mask, "candidate map")->required();
    c->add_option("--threshold", a->threshold,
                  "support threshold (default: 1e-8 of the reference peak)");
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->callback([a] {
      const ccx::ScalarGrid ref = ccx::read_grid(a->in);
      const ccx::ScalarGrid cand = ccx::read_grid(a->mask);
      Timer t;
      const double v = ccx::support_hausdorff_error(ref, cand, a->threshold);
      emit_report(*a,
                  json{{"metric", "support_hausdorff"},
                       {"value", v},
                       {"params", json{{"threshold", a->threshold}}},
                       {"grids", json::array({a->in, a->mask})}},
                  t.seconds());
    });
  }
}

// -------------------------------------------------------------- bench group

void add_bench(CLI::App& app) {
  auto* grp = app.add_subcommand("bench", "built-in experiments on embedded synthetic inputs");
  grp->require_subcommand(1);

  {
    auto a = std::make_shared<Args>();
    a->lambda = 0.01;
    a->dual_h = 0.001;
    auto* c = grp->add_subcommand(
        "singleton", "upper transform of a one-cell set vs the closed form, all schemes");
    c->add_option("--lambda", a->lambda, "curvature scale (default 0.01, cap radius 10 cells)");
    c->add_option("--dual-h", a->dual_h, "biconjugate dual spacing (default 0.001)");
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->callback([a] {
      Timer t;
      json schemes;
      for (ccx::Scheme s : {ccx::Scheme::MoreauParabola, ccx::Scheme::MoreauIterative,
                            ccx::Scheme::Oberman, ccx::Scheme::Biconjugate}) {
        const auto r = ccx::bench::singleton_run(s, a->lambda, a->dual_h);
        schemes[ccx::scheme_name(s)] = json{{"e_linf", r.e_linf}, {"e_h", r.e_h}};
      }
      emit_report(*a,
                  json{{"metric", "bench.singleton"},
                       {"value", schemes},
                       {"params", json{{"lambda", a->lambda}, {"dual_h", a->dual_h}}},
                       {"grids", json::array()}},
                  t.seconds());
    });
  }
  {
    auto a = std::make_shared<Args>();
    a->lambda = 8.0;
    auto* c = grp->add_subcommand(
        "corner", "stable-ridge heights on straight and right-angle mask boundaries");
    c->add_option("--lambda", a->lambda, "curvature scale (default 8)");
    c->add_option("--tau", a->tau, "second curvature scale (default 1)");
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->callback([a] {
      Timer t;
      const auto r = ccx::bench::corner_run(a->lambda, a->tau);
      emit_report(*a,
                  json{{"metric", "bench.corner"},
                       {"value", json{{"flat_height", r.flat_height},
                                      {"half_plane_max", r.half_plane_max},
                                      {"corner_height", r.corner_height},
                                      {"tip_value", r.tip_value}}},
                       {"params", json{{"lambda", a->lambda}, {"tau", a->tau}}},
                       {"grids", json::array()}},
                  t.seconds());
    });
  }
  {
    auto a = std::make_shared<Args>();
    auto* c = grp->add_subcommand(
        "mma-two-point", "medial-axis map of a two-point set vs the half-separation square");
    c->add_option("--lambda", a->lambda, "curvature scale (default 1)");
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->callback([a] {
      Timer t;
      const auto r = ccx::bench::mma_two_point_run(a->lambda);
      emit_report(*a,
                  json{{"metric", "bench.mma_two_point"},
                       {"value", json{{"midpoint", r.midpoint_value},
                                      {"expected", r.expected},
                                      {"spacing", r.spacing}}},
                       {"params", json{{"lambda", a->lambda}}},
                       {"grids", json::array()}},
                  t.seconds());
    });
  }
  {
    auto a = std::make_shared<Args>();
    a->lambda = 20.0;
    a->level_m = 1e13;
    a->pad = 2;
    auto* c = grp->add_subcommand(
        "sp-noise", "salt-&-pepper restoration of an embedded 128x128 natural-statistics card");
    c->add_option("--lambda", a->lambda, "curvature scale (default 20)");
    c->add_option("--level-m", a->level_m, "extension level M (default 1e13)");
    c->add_option("--pad", a->pad, "mirror-padding width in cells (default 2)");
    c->add_option("--scheme", a->scheme, "moreau|iter-moreau|oberman|biconj (default moreau)");
    c->add_option("--report", a->report, "write the JSON report to this file instead of stdout");
    c->callback([a] {
      Timer t;
      const auto r = ccx::bench::salt_pepper_run(ccx::parse_scheme(a->scheme), 128, 0.7, a->lambda,
                                                 a->level_m, a->pad);
      emit_report(*a,
                  json{{"metric", "bench.sp_noise"},
                       {"value", json{{"noisy_db", r.noisy_db},
                                      {"restored_db", r.restored_db},
                                      {"eps_k", r.eps_k}}},
                       {"params", json{{"lambda", a->lambda},
                                       {"level_m", a->level_m},
                                       {"pad", a->pad},
                                       {"scheme", ccx::scheme_name(ccx::parse_scheme(a->scheme))}}},
                       {"grids", json::array()}},
                  t.seconds());
    });
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccx: compensated convex transforms, feature maps and restoration on regular grids"};
  app.require_subcommand(1);
  add_cct(app);
  add_feature(app);
  add_restore(app);
  add_dist(app);
  add_metric(app);
  add_bench(app);

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the parse error to stderr
    std::cerr << '\n' << app.help() << std::flush;
    return 2;
  } catch (const ccx::numerical_failure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const ccx::dual_coverage& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const ccx::not_convex& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const ccx::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 3;
  }
}
