#include "pindot/exceptional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pindot/parallel.hpp"

namespace pindot {

std::string to_string(ExceptionalKind k) {
  switch (k) {
    case ExceptionalKind::dimension: return "dimension";
    case ExceptionalKind::measure: return "measure";
    default: return "interior";
  }
}

ExceptionalKind parse_kind(const std::string& s) {
  if (s == "dimension" || s == "E_u" || s == "u") return ExceptionalKind::dimension;
  if (s == "measure" || s == "E_plus" || s == "plus") return ExceptionalKind::measure;
  if (s == "interior" || s == "E_interior") return ExceptionalKind::interior;
  throw std::invalid_argument("unknown exceptional kind: " + s);
}

int default_angular_level(int n) { return n == 2 ? 10 : 5; }

ProjectionVerdict classify_projection(const ScalarSet& s, ExceptionalKind kind, double u, std::optional<Window> window) {
  ProjectionVerdict v;
  v.run = longest_run(s);
  if (s.empty()) {
    v.measure = Verdict::null;
  } else if (!window && s.resolution() < 4) {
    // too contracted to say anything at this level
    v.measure = Verdict::inconclusive;
  } else {
    const Window w = window ? *window : scalar_window(s);
    auto counts = covering_counts(s);
    v.slope = fit_counts(counts, 2, w, 1).slope;
    v.measure = measure_proxy_from_counts(counts, 2, 1, w).verdict;
  }
  switch (kind) {
    case ExceptionalKind::dimension: v.exceptional = v.slope < u - kSlopeMargin; break;
    case ExceptionalKind::measure: v.exceptional = v.measure == Verdict::null; break;
    case ExceptionalKind::interior: v.exceptional = v.run < kInteriorRun; break;
  }
  return v;
}

bool ExceptionalScan::is_exceptional_line(std::int64_t line) const {
  return std::binary_search(exceptional.begin(), exceptional.end(), line);
}

ExceptionalScan scan_directions(const PointCloud& a, ExceptionalKind kind, double u, const ScanOptions& opts) {
  const int n = a.dim();
  if (n != 2 && n != 3) throw std::invalid_argument("direction scans support n = 2 or 3");
  if (kind == ExceptionalKind::dimension && !(u > 0.0 && u <= 1.0)) throw std::invalid_argument("u must lie in (0, 1]");
  if (a.empty()) throw std::invalid_argument("cannot scan an empty cloud");
  ExceptionalScan scan;
  scan.kind = kind;
  scan.u = u;
  scan.dim = n;
  scan.angular_level = opts.angular_level < 0 ? default_angular_level(n) : opts.angular_level;
  const SphereGrid grid(n, scan.angular_level);
  const auto lines = static_cast<std::size_t>(grid.line_count());
  scan.directions.resize(lines);
  parallel_for(lines, [&](std::size_t i) {
    auto& d = scan.directions[i];
    d.line = static_cast<std::int64_t>(i);
    d.theta = grid.cap_center(grid.line_cap(d.line));
    d.verdict = classify_projection(orthogonal_project(a, d.theta), kind, u, opts.window);
  });
  for (const auto& d : scan.directions) {
    if (d.verdict.exceptional) scan.exceptional.push_back(d.line);
  }
  if (scan.angular_level >= 5) {
    scan.exc_dim = estimate_cap_dimension(grid, scan.exceptional, std::nullopt, true);
  } else {
    scan.exc_dim = estimate_cap_dimension(grid, scan.exceptional, Window{0, scan.angular_level}, true);
  }
  return scan;
}

double exceptional_bound(ExceptionalKind kind, int n, double u, double dim_a) {
  switch (kind) {
    case ExceptionalKind::dimension: return std::max(n - 1 + u - dim_a, 0.0);
    case ExceptionalKind::measure:
      if (!(dim_a > 1.0)) throw std::invalid_argument("measure bound needs dim A > 1");
      return n - dim_a;
    case ExceptionalKind::interior:
      if (n < 3 || !(dim_a > 2.0)) throw std::invalid_argument("interior bound needs n >= 3 and dim A > 2");
      return n + 1 - dim_a;
  }
  return 0.0;
}

std::optional<double> planar_dimension_bound(int n, double u, double dim_a) {
  if (n != 2) return std::nullopt;
  return std::max(2.0 * u - dim_a, 0.0);
}

BoundCheck check_bound(const ExceptionalScan& scan, double dim_a) {
  BoundCheck bc;
  bc.bound = exceptional_bound(scan.kind, scan.dim, scan.u, dim_a);
  bc.measured = scan.exc_dim.slope;
  bc.pass = bc.measured <= bc.bound + kBoundMargin;
  if (scan.kind == ExceptionalKind::dimension) {
    bc.planar_bound = planar_dimension_bound(scan.dim, scan.u, dim_a);
    if (bc.planar_bound) bc.planar_pass = bc.measured <= *bc.planar_bound + kBoundMargin;
  }
  return bc;
}

}  // namespace pindot
