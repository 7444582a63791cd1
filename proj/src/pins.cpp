#include "pindot/pins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pindot/parallel.hpp"
#include "pindot/rng.hpp"

namespace pindot {

namespace {

ExactPoint exact_center(const PointCloud& a, std::size_t i) {
  ExactPoint p;
  for (int ax = 0; ax < a.dim(); ++ax) p.push_back(a.center_exact(i, ax));
  return p;
}

// Cap of every cell as seen from x, -1 for the cell holding x.
std::vector<std::int64_t> cell_caps(const PointCloud& a, std::span<const double> x, const SphereGrid& grid) {
  const auto vecs = radial_vectors(a, x);
  const int n = a.dim();
  std::vector<std::int64_t> caps(a.size(), -1);
  for (std::size_t p = 0; p < a.size(); ++p) {
    std::span<const double> v(vecs.data() + p * n, static_cast<std::size_t>(n));
    if (!std::isnan(v[0])) caps[p] = grid.cap_index(v);
  }
  return caps;
}

double safe_slope(const PointCloud& a) {
  if (a.empty()) return 0.0;
  return estimate_dimension(a).slope;
}

}  // namespace

bool pin_report_passes(const PinReport& r) { return r.full_dimensional && r.pass_fraction >= kPinPassFraction; }

double pin_threshold(ExceptionalKind kind, int n, double u) {
  switch (kind) {
    case ExceptionalKind::dimension: return (n + u) / 2.0;
    case ExceptionalKind::measure: return (n + 1) / 2.0;
    default: return (n + 2) / 2.0;
  }
}

bool pin_passes(const ProjectionVerdict& v, ExceptionalKind kind, double u) {
  switch (kind) {
    case ExceptionalKind::dimension: return v.slope >= u - kSlopeMargin;
    case ExceptionalKind::measure: return v.measure == Verdict::positive;
    default: return v.run >= kInteriorRun;
  }
}

PinReport pin_pipeline(const PointCloud& a, const ExactPoint& x, ExceptionalKind kind, double u, const PinOptions& opts) {
  if (a.empty()) throw std::invalid_argument("pin pipeline needs a nonempty cloud");
  if (x.size() != static_cast<std::size_t>(a.dim())) throw std::invalid_argument("vantage point dimension mismatch");
  if (opts.samples < 1) throw std::invalid_argument("pin samples must be positive");
  const int n = a.dim();
  PinReport rep;
  rep.x = x;
  rep.kind = kind;
  rep.u = u;
  rep.slope_a = estimate_dimension(a).slope;
  rep.threshold = pin_threshold(kind, n, u);
  rep.exploratory = !(rep.slope_a > rep.threshold);

  ExceptionalScan local;
  const ExceptionalScan* scan = opts.precomputed_scan;
  if (!scan || scan->kind != kind || scan->u != u || scan->dim != n) {
    local = scan_directions(a, kind, u, opts.scan);
    scan = &local;
  }
  rep.angular_level = scan->angular_level;
  const SphereGrid grid = scan->grid();
  const auto xd = to_double(x);
  const auto caps = cell_caps(a, xd, grid);

  std::vector<bool> keep(a.size(), false);
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (caps[p] < 0) continue;
    rep.radial_caps.push_back(caps[p]);
    // keep only directions the scan certifies, not merely those it fails to reject
    if (pin_passes(scan->directions[grid.line_index(caps[p])].verdict, kind, u)) {
      keep[p] = true;
      rep.good_caps.push_back(caps[p]);
    }
  }
  for (auto* v : {&rep.radial_caps, &rep.good_caps}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  rep.a_x = a.subset(keep);
  if (rep.a_x.empty()) return rep;
  rep.dim_ax = estimate_dimension(rep.a_x);
  rep.full_dimensional = rep.dim_ax.slope >= rep.slope_a - kFullDimMargin;

  CounterRng rng(opts.seed);
  std::vector<std::size_t> picks(static_cast<std::size_t>(opts.samples));
  for (auto& p : picks) p = rng.below(rep.a_x.size());
  rep.pins.resize(picks.size());
  parallel_for(picks.size(), [&](std::size_t i) {
    PinSample& s = rep.pins[i];
    s.a = exact_center(rep.a_x, picks[i]);
    const auto ad = to_double(s.a);
    std::vector<double> w(n);
    for (int ax = 0; ax < n; ++ax) w[ax] = ad[ax] - xd[ax];
    const Direction dir = Direction::from_vector(w, grid.level());
    s.cap = dir.cap_index;
    s.dot_verdict = classify_projection(dot_product_set(a, s.a, x, matched_dot_level(a, s.a, x)), kind, u, opts.scan.window);
    s.proj_verdict = classify_projection(orthogonal_project(a, dir.vector), kind, u, opts.scan.window);
    s.pass = pin_passes(s.dot_verdict, kind, u);
    s.agrees = s.pass == pin_passes(s.proj_verdict, kind, u);
  });
  const auto passed = std::count_if(rep.pins.begin(), rep.pins.end(), [](const PinSample& s) { return s.pass; });
  const auto agreed = std::count_if(rep.pins.begin(), rep.pins.end(), [](const PinSample& s) { return s.agrees; });
  rep.pass_fraction = static_cast<double>(passed) / static_cast<double>(rep.pins.size());
  rep.agreement = static_cast<double>(agreed) / static_cast<double>(rep.pins.size());
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct Plane {
  std::vector<double> point;
  std::vector<std::vector<double>> basis;  // orthonormal
};

bool orthonormalize(std::vector<std::vector<double>>& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double d = std::inner_product(vs[i].begin(), vs[i].end(), vs[j].begin(), 0.0);
      for (std::size_t t = 0; t < vs[i].size(); ++t) vs[i][t] -= d * vs[j][t];
    }
    double norm = std::sqrt(std::inner_product(vs[i].begin(), vs[i].end(), vs[i].begin(), 0.0));
    if (norm < 1e-9) return false;
    for (double& v : vs[i]) v /= norm;
  }
  return true;
}

double plane_distance(const Plane& pl, const std::vector<double>& y) {
  std::vector<double> d(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = y[i] - pl.point[i];
  for (const auto& b : pl.basis) {
    double c = std::inner_product(d.begin(), d.end(), b.begin(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= c * b[i];
  }
  return std::sqrt(std::inner_product(d.begin(), d.end(), d.begin(), 0.0));
}

void combinations(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

DispersionReport dispersion_check(const PointCloud& x, int k, int budget, std::uint64_t seed) {
  const int n = x.dim();
  if (k < 1 || k > n - 1) throw std::invalid_argument("dispersion: k must lie in [1, n-1]");
  if (x.empty()) throw std::invalid_argument("dispersion: empty cloud");
  if (budget < 0) throw std::invalid_argument("dispersion: negative budget");
  DispersionReport rep;
  rep.k = k;
  const double base_slope = estimate_dimension(x).slope;

  std::vector<Plane> planes;
  std::vector<std::vector<int>> subsets;
  std::vector<int> cur;
  combinations(n, k, 0, cur, subsets);
  for (const auto& s : subsets) {
    Plane pl{std::vector<double>(n, 0.0), {}};
    for (int ax : s) {
      std::vector<double> e(n, 0.0);
      e[ax] = 1.0;
      pl.basis.push_back(e);
    }
    planes.push_back(pl);
  }
  if (x.size() > static_cast<std::size_t>(k)) {
    CounterRng rng(seed);
    int made = 0;
    for (int attempt = 0; made < budget && attempt < 20 * budget + 20; ++attempt) {
      std::vector<std::size_t> idx;
      while (idx.size() < static_cast<std::size_t>(k + 1)) {
        std::size_t i = rng.below(x.size());
        if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
      }
      Plane pl{x.center(idx[0]), {}};
      for (int j = 1; j <= k; ++j) {
        auto c = x.center(idx[j]);
        for (int t = 0; t < n; ++t) c[t] -= pl.point[t];
        pl.basis.push_back(c);
      }
      if (!orthonormalize(pl.basis)) continue;
      planes.push_back(pl);
      ++made;
    }
  }

  const double reach = 1.5 * x.cell_width();
  std::vector<double> ratios(planes.size());
  parallel_for(planes.size(), [&](std::size_t i) {
    std::vector<bool> keep(x.size());
    for (std::size_t p = 0; p < x.size(); ++p) keep[p] = plane_distance(planes[i], x.center(p)) > reach;
    const PointCloud rest = x.subset(keep);
    if (rest.empty()) {
      ratios[i] = 0.0;
    } else if (base_slope <= 0.0) {
      ratios[i] = 1.0;
    } else {
      ratios[i] = std::min(1.0, safe_slope(rest) / base_slope);
    }
  });
  rep.planes_tested = planes.size();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] < ratios[worst]) worst = i;
  }
  rep.worst_ratio = ratios.empty() ? 1.0 : ratios[worst];
  rep.dispersed = rep.worst_ratio >= kDispersionRatio;
  if (!planes.empty()) {
    rep.witness.push_back(planes[worst].point);
    for (const auto& b : planes[worst].basis) rep.witness.push_back(b);
  }
  return rep;
}

// ---------------------------------------------------------------------------

int default_radial_level(const PointCloud& a) { return a.dim() == 2 ? std::min(a.level(), 16) : 6; }

DimensionReport radial_dimension(const PointCloud& a, std::span<const double> x, int angular_level) {
  SphereGrid grid(a.dim(), angular_level);
  const auto caps = radial_project(a, x, angular_level);
  return estimate_cap_dimension(grid, caps);
}

TranslationReport translation_scan(const PointCloud& a, const PointCloud& x, int k, ExceptionalKind kind, double u,
                                   const TranslationOptions& opts) {
  if (a.dim() != x.dim()) throw std::invalid_argument("translation scan: dimension mismatch");
  if (x.empty() || a.empty()) throw std::invalid_argument("translation scan: empty cloud");
  const int n = a.dim();
  TranslationReport rep;
  rep.k = k;
  rep.slope_a = estimate_dimension(a).slope;
  rep.slope_x = estimate_dimension(x).slope;
  rep.dispersion = dispersion_check(x, k, opts.dispersion_budget, opts.seed);
  if (!rep.dispersion.dispersed) rep.warnings.push_back("X is not k-planar dispersed at this resolution");
  if (rep.slope_x + 1e-9 < rep.slope_a) rep.warnings.push_back("dim X < dim A");
  if (!(rep.slope_a > pin_threshold(kind, n, u))) rep.warnings.push_back("dim A below the pinned threshold");
  rep.exploratory = !rep.warnings.empty();

  const ExceptionalScan scan = scan_directions(a, kind, u, opts.scan);
  const int radial_level = opts.radial_level < 0 ? default_radial_level(a) : opts.radial_level;
  const double cutoff = n - rep.slope_a + kFullDimMargin;

  CounterRng rng(opts.seed ^ 0xa5a5a5a5ULL);
  rep.samples.resize(static_cast<std::size_t>(opts.translations));
  for (auto& s : rep.samples) s.x = exact_center(x, rng.below(x.size()));
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    auto& s = rep.samples[i];
    s.radial_slope = radial_dimension(a, to_double(s.x), radial_level).slope;
    s.in_xa = s.radial_slope > cutoff;
    if (!s.in_xa) continue;
    PinOptions po;
    po.samples = opts.pins_per_x;
    po.seed = opts.seed + 7919 * (i + 1);
    po.scan = opts.scan;
    po.precomputed_scan = &scan;
    s.pins = pin_pipeline(a, s.x, kind, u, po);
  }
  std::size_t in_xa = 0, passing = 0;
  for (const auto& s : rep.samples) {
    if (!s.in_xa) continue;
    ++in_xa;
    if (pin_report_passes(*s.pins)) ++passing;
    for (const auto& pin : s.pins->pins) {
      DifferencePin d;
      d.a1 = s.x;
      d.a2 = pin.a;
      for (int ax = 0; ax < n; ++ax) d.a0.push_back(pin.a[ax] - s.x[ax]);
      const ExactPoint origin(n, Rational(0));
      d.identity_exact = dot_product_values(a, d.a0, origin) == dot_product_values(a, d.a2, d.a1);
      d.positive = pin.pass;
      rep.difference_pins.push_back(std::move(d));
    }
  }
  rep.xa_fraction = rep.samples.empty() ? 0.0 : static_cast<double>(in_xa) / static_cast<double>(rep.samples.size());
  rep.pin_pass_fraction = in_xa == 0 ? 0.0 : static_cast<double>(passing) / static_cast<double>(in_xa);
  return rep;
}

// ---------------------------------------------------------------------------

RestrictedReport restricted_pipeline(const PointCloud& a, const ExactPoint& x, const SphereCurve& gamma, double u,
                                     const RestrictedOptions& opts) {
  if (gamma.dim != a.dim()) throw std::invalid_argument("curve and cloud dimensions differ");
  if (x.size() != static_cast<std::size_t>(a.dim())) throw std::invalid_argument("vantage point dimension mismatch");
  RestrictedReport rep;
  rep.curve = nondegeneracy_check(gamma);
  if (!rep.curve.pass) throw std::invalid_argument("degenerate curve rejected");
  const double slope_a = estimate_dimension(a).slope;
  if (!(u > 0.0) || u > std::min(slope_a, 1.0)) throw std::invalid_argument("u must lie in (0, min(dim A, 1)]");
  rep.angular_level = opts.angular_level;
  const SphereGrid grid(a.dim(), opts.angular_level);
  const auto xd = to_double(x);
  const auto caps = cell_caps(a, xd, grid);
  std::vector<std::int64_t> hit_caps;
  for (auto c : caps) {
    if (c >= 0) hit_caps.push_back(c);
  }
  std::sort(hit_caps.begin(), hit_caps.end());
  hit_caps.erase(std::unique(hit_caps.begin(), hit_caps.end()), hit_caps.end());

  const std::size_t m = gamma.params.size();
  std::vector<char> hit(m), bad(m);
  std::vector<std::int64_t> tcap(m);
  parallel_for(m, [&](std::size_t i) {
    tcap[i] = grid.cap_index(gamma.samples[i]);
    hit[i] = std::binary_search(hit_caps.begin(), hit_caps.end(), tcap[i]);
    const auto v = classify_projection(orthogonal_project(a, gamma.samples[i]), ExceptionalKind::dimension, u, opts.window);
    bad[i] = v.exceptional;
  });
  std::vector<std::int64_t> good_caps;
  int tlevel = 0;
  while ((std::size_t{1} << tlevel) < m - 1) ++tlevel;
  std::vector<std::int64_t> bad_cells;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = gamma.params[i];
    if (hit[i]) rep.t_hit.push_back(t);
    if (bad[i]) {
      rep.t_bad.push_back(t);
      bad_cells.push_back(std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(std::ldexp(t, tlevel))),
                                                 (std::int64_t{1} << tlevel) - 1));
    }
    if (hit[i] && !bad[i]) good_caps.push_back(tcap[i]);
  }
  rep.bad_dim_bound = u + kBoundMargin;
  if (bad_cells.empty() || tlevel < 5) {
    rep.bad_dim.window = default_window(tlevel);
    rep.bad_dim.slope = 0.0;
  } else {
    rep.bad_dim = estimate_dimension(ScalarSet(tlevel, bad_cells, 1.0));
  }
  rep.pass = rep.bad_dim.slope <= rep.bad_dim_bound;
  std::sort(good_caps.begin(), good_caps.end());
  good_caps.erase(std::unique(good_caps.begin(), good_caps.end()), good_caps.end());
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (caps[p] >= 0 && std::binary_search(good_caps.begin(), good_caps.end(), caps[p])) {
      ++rep.pin_count;
      if (rep.pins.size() < 32) rep.pins.push_back(exact_center(a, p));
    }
  }
  return rep;
}

}  // namespace pindot
