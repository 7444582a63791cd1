#include "pindot/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pindot {

namespace {

i128 ipow(i128 b, int k) {
  i128 r = 1;
  for (int i = 0; i < k; ++i) r *= b;
  return r;
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Index of the base^-k cell holding the center of native cell c at `level`.
struct Coarsener {
  int level, base, k;
  i128 mul, den;
  Coarsener(int level_, int base_, int k_) : level(level_), base(base_), k(k_) {
    if (base < 2) throw std::invalid_argument("counting base must be >= 2");
    if (k < 0 || k > max_count_level(level, base)) throw std::invalid_argument("counting level above native resolution");
    mul = ipow(base, k);
    den = i128{1} << (level + 1);
  }
  std::int64_t operator()(std::int64_t c) const {
    if (base == 2) return c >> (level - k);
    return static_cast<std::int64_t>(floor_div((2 * i128{c} + 1) * mul, den));
  }
};

std::int64_t count_rows(const std::vector<std::int64_t>& flat, int dim, const Coarsener& co) {
  const std::size_t rows = flat.size() / static_cast<std::size_t>(dim);
  if (rows == 0) return 0;
  std::vector<std::int64_t> lo(dim, INT64_MAX), hi(dim, INT64_MIN);
  std::vector<std::int64_t> keys(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    keys[i] = co(flat[i]);
    const int ax = static_cast<int>(i % dim);
    lo[ax] = std::min(lo[ax], keys[i]);
    hi[ax] = std::max(hi[ax], keys[i]);
  }
  std::vector<int> bits(dim);
  int total = 0;
  for (int ax = 0; ax < dim; ++ax) {
    auto span = static_cast<std::uint64_t>(hi[ax] - lo[ax]) + 1;
    int b = 0;
    while (b < 64 && (std::uint64_t{1} << b) < span) ++b;
    bits[ax] = b;
    total += b;
  }
  if (total <= 64) {
    std::vector<std::uint64_t> packed(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      std::uint64_t v = 0;
      for (int ax = 0; ax < dim; ++ax) {
        v = (bits[ax] == 64 ? 0 : v << bits[ax]) | static_cast<std::uint64_t>(keys[r * dim + ax] - lo[ax]);
      }
      packed[r] = v;
    }
    std::sort(packed.begin(), packed.end());
    return static_cast<std::int64_t>(std::unique(packed.begin(), packed.end()) - packed.begin());
  }
  std::vector<std::size_t> idx(rows);
  for (std::size_t r = 0; r < rows; ++r) idx[r] = r;
  auto row_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(keys.begin() + a * dim, keys.begin() + (a + 1) * dim, keys.begin() + b * dim,
                                        keys.begin() + (b + 1) * dim);
  };
  std::sort(idx.begin(), idx.end(), row_less);
  std::int64_t n = 1;
  for (std::size_t r = 1; r < rows; ++r) {
    if (row_less(idx[r - 1], idx[r])) ++n;
  }
  return n;
}

}  // namespace

int max_count_level(int level, int base) {
  if (base < 2) throw std::invalid_argument("counting base must be >= 2");
  if (base == 2) return level;
  int k = 0;
  i128 p = base;
  while (p <= (i128{1} << level)) {
    ++k;
    p *= base;
  }
  return k;
}

Window default_window(int max_level) { return max_level >= 6 ? Window{2, max_level - 1} : Window{0, max_level}; }

Window scalar_window(const ScalarSet& s, int base) {
  const int kmax = max_count_level(s.resolution(), base);
  const int shift = static_cast<int>(std::lround(s.scale_shift() / std::log2(static_cast<double>(base))));
  Window w{std::max(0, 3 - shift), kmax - 1};
  if (w.hi - w.lo + 1 >= 4) return w;
  if (kmax < 4) throw std::invalid_argument("scalar set resolves fewer than four levels");
  return Window{kmax - 4, kmax - 1};
}

std::int64_t covering_count(const PointCloud& a, int k, int base) {
  if (k > max_count_level(a.level(), base)) throw std::invalid_argument("covering level above native resolution");
  return count_rows(a.flat_cells(), a.dim(), Coarsener(a.level(), base, k));
}

std::int64_t covering_count(const ScalarSet& s, int k, int base) {
  if (k > max_count_level(s.level(), base)) throw std::invalid_argument("covering level above native resolution");
  Coarsener co(s.level(), base, k);
  std::int64_t n = 0;
  std::int64_t prev = 0;
  // cells are sorted and the coarsening map is monotone
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::int64_t key = co(s.cells()[i]);
    if (i == 0 || key != prev) ++n;
    prev = key;
  }
  return n;
}

std::vector<std::int64_t> covering_counts(const PointCloud& a, int base) {
  std::vector<std::int64_t> out;
  for (int k = 0; k <= max_count_level(a.level(), base); ++k) out.push_back(covering_count(a, k, base));
  return out;
}

std::vector<std::int64_t> covering_counts(const ScalarSet& s, int base) {
  std::vector<std::int64_t> out;
  for (int k = 0; k <= max_count_level(s.level(), base); ++k) out.push_back(covering_count(s, k, base));
  return out;
}

DimensionReport fit_counts(std::vector<std::int64_t> counts, int base, std::optional<Window> window, int ambient_dim) {
  DimensionReport rep;
  rep.base = base;
  const int kmax = static_cast<int>(counts.size()) - 1;
  rep.window = window.value_or(default_window(kmax));
  if (rep.window.lo < 0 || rep.window.hi > kmax || rep.window.hi - rep.window.lo + 1 < 4) {
    throw std::invalid_argument("dimension window must span at least 4 available levels");
  }
  if (counts.empty() || counts.back() == 0) throw std::invalid_argument("cannot estimate the dimension of an empty set");
  const double lb = std::log(static_cast<double>(base));
  for (int k = 0; k <= kmax; ++k) rep.proxy_measure.push_back(static_cast<double>(counts[k]) * std::pow(base, -k));
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const int m = rep.window.hi - rep.window.lo + 1;
  for (int k = rep.window.lo; k <= rep.window.hi; ++k) {
    const double x = k * lb;
    const double y = std::log(static_cast<double>(counts[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  const double slope = cxy / vx;
  rep.r2 = vy <= 1e-12 ? 1.0 : std::clamp(cxy * cxy / (vx * vy), 0.0, 1.0);
  rep.slope = std::clamp(slope, 0.0, static_cast<double>(ambient_dim));
  rep.counts = std::move(counts);
  return rep;
}

DimensionReport estimate_dimension(const PointCloud& a, std::optional<Window> window, int base) {
  if (a.empty()) throw std::invalid_argument("cannot estimate the dimension of an empty cloud");
  return fit_counts(covering_counts(a, base), base, window, a.dim());
}

DimensionReport estimate_dimension(const ScalarSet& s, std::optional<Window> window, int base) {
  if (s.empty()) throw std::invalid_argument("cannot estimate the dimension of an empty set");
  auto rep = fit_counts(covering_counts(s, base), base, window ? window : scalar_window(s, base), 1);
  rep.interior_run = longest_run(s);
  return rep;
}

std::vector<std::int64_t> cap_counts(const SphereGrid& grid, const std::vector<std::int64_t>& caps) {
  std::vector<std::int64_t> out;
  for (int j = 0; j <= grid.level(); ++j) {
    std::vector<std::int64_t> c;
    c.reserve(caps.size());
    for (std::int64_t cap : caps) c.push_back(grid.coarsen(cap, j));
    std::sort(c.begin(), c.end());
    out.push_back(static_cast<std::int64_t>(std::unique(c.begin(), c.end()) - c.begin()));
  }
  return out;
}

DimensionReport estimate_cap_dimension(const SphereGrid& grid, const std::vector<std::int64_t>& caps,
                                       std::optional<Window> window, bool lines) {
  std::vector<std::int64_t> counts;
  for (int j = 0; j <= grid.level(); ++j) {
    SphereGrid coarse(grid.dim(), j);
    std::vector<std::int64_t> c;
    c.reserve(caps.size());
    for (std::int64_t id : caps) {
      std::int64_t cap = lines ? grid.line_cap(id) : id;
      std::int64_t cc = grid.coarsen(cap, j);
      c.push_back(lines ? coarse.line_index(cc) : cc);
    }
    std::sort(c.begin(), c.end());
    counts.push_back(static_cast<std::int64_t>(std::unique(c.begin(), c.end()) - c.begin()));
  }
  if (caps.empty()) {
    DimensionReport rep;
    rep.counts = counts;
    rep.window = window.value_or(default_window(grid.level()));
    return rep;
  }
  return fit_counts(std::move(counts), 2, window, grid.dim() - 1);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::positive: return "positive";
    case Verdict::null: return "null";
    default: return "inconclusive";
  }
}

MeasureProxy measure_proxy_from_counts(const std::vector<std::int64_t>& counts, int base, int dim,
                                       std::optional<Window> window) {
  const int kmax = static_cast<int>(counts.size()) - 1;
  if (kmax + 1 < 3) throw std::invalid_argument("measure proxy needs at least 3 levels");
  MeasureProxy mp;
  mp.window = window.value_or(kmax >= 5 ? default_window(kmax) : Window{0, kmax});
  if (mp.window.lo < 0 || mp.window.hi > kmax || mp.window.hi - mp.window.lo + 1 < 3) {
    throw std::invalid_argument("measure proxy window must span at least 3 levels");
  }
  for (int k = 0; k <= kmax; ++k) mp.ratios.push_back(static_cast<double>(counts[k]) * std::pow(base, -dim * k));
  if (counts[mp.window.hi] == 0) {
    mp.verdict = Verdict::null;
    mp.decay = 0.0;
    return mp;
  }
  // decay over the finest levels only: at coarse levels delta is comparable to
  // the set's extent and the boundary cell dominates delta N(delta)
  const int tail = std::max(mp.window.lo, mp.window.hi - (kDecayLevels - 1));
  if (mp.ratios[tail] > 0.0) {
    mp.decay = std::pow(mp.ratios[mp.window.hi] / mp.ratios[tail], 1.0 / (mp.window.hi - tail));
  }
  double lo = mp.ratios[mp.window.hi], hi = lo;
  for (int k = mp.window.hi - 2; k < mp.window.hi; ++k) {
    lo = std::min(lo, mp.ratios[k]);
    hi = std::max(hi, mp.ratios[k]);
  }
  mp.flatness = lo / hi;
  if (mp.decay <= kNullDecay) {
    mp.verdict = Verdict::null;
  } else if (mp.flatness >= kFlatRatio) {
    mp.verdict = Verdict::positive;
  } else {
    mp.verdict = Verdict::inconclusive;
  }
  return mp;
}

MeasureProxy measure_proxy(const ScalarSet& s, int base, std::optional<Window> window) {
  if (s.empty()) {
    MeasureProxy mp;
    mp.verdict = Verdict::null;
    mp.decay = 0.0;
    return mp;
  }
  return measure_proxy_from_counts(covering_counts(s, base), base, 1, window ? window : scalar_window(s, base));
}

std::int64_t longest_run(const ScalarSet& s) {
  std::int64_t best = 0, run = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    run = (i > 0 && s.cells()[i] == s.cells()[i - 1] + 1) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

InteriorProbe interior_probe(const ScalarSet& s, int run_length) {
  if (run_length < 4) throw std::invalid_argument("interior probe run length must be >= 4");
  InteriorProbe p;
  p.longest_run = longest_run(s);
  p.has_interior = p.longest_run >= run_length;
  return p;
}

}  // namespace pindot
