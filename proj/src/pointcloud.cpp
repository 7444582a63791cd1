#include "pindot/pointcloud.hpp"

#include "pindot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pindot {

namespace {

std::int64_t ceil_half(const Rational& x) {
  // ceil(x / 2)
  return -((-x).floor_scaled_pow2(-1));
}

// Sorts cell rows lexicographically and merges duplicates.
void canonicalize(int dim, std::vector<std::int64_t>& cells, std::optional<std::vector<double>>& weights) {
  const std::size_t d = static_cast<std::size_t>(dim);
  const std::size_t count = cells.size() / d;
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(cells.begin() + a * d, cells.begin() + (a + 1) * d, cells.begin() + b * d,
                                        cells.begin() + (b + 1) * d);
  };
  auto row_eq = [&](std::size_t a, std::size_t b) {
    return std::equal(cells.begin() + a * d, cells.begin() + (a + 1) * d, cells.begin() + b * d);
  };
  bool sorted = true;
  for (std::size_t i = 1; i < count && sorted; ++i) sorted = row_less(i - 1, i);
  if (sorted) return;
  std::sort(order.begin(), order.end(), row_less);
  std::vector<std::int64_t> out;
  out.reserve(cells.size());
  std::vector<double> out_w;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t r = order[i];
    if (i > 0 && row_eq(order[i - 1], r)) {
      if (weights) out_w.back() += (*weights)[r];
      continue;
    }
    out.insert(out.end(), cells.begin() + r * d, cells.begin() + (r + 1) * d);
    if (weights) out_w.push_back((*weights)[r]);
  }
  cells = std::move(out);
  if (weights) *weights = std::move(out_w);
}

}  // namespace

PointCloud::PointCloud(int dim, int level, std::vector<std::int64_t> flat_cells, double bound,
                       std::optional<std::vector<double>> weights)
    : dim_(dim), level_(level), bound_(bound), cells_(std::move(flat_cells)), weights_(std::move(weights)) {
  if (dim < 1 || dim > kMaxAmbientDim) throw std::invalid_argument("ambient_dim must be in [1, 4]");
  if (level < 0 || level > 40) throw std::invalid_argument("level must be in [0, 40]");
  if (!(bound > 0.0)) throw std::invalid_argument("bound must be positive");
  if (cells_.size() % static_cast<std::size_t>(dim) != 0) throw std::invalid_argument("cell array not a multiple of dim");
  if (weights_ && weights_->size() != size()) throw std::invalid_argument("weights must match cells");
  const double limit = std::ldexp(bound, level);
  for (std::int64_t c : cells_) {
    if (std::fabs(static_cast<double>(c)) > limit) throw std::invalid_argument("cell outside bounding box");
  }
  if (weights_) {
    double total = 0.0;
    for (double w : *weights_) {
      if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
      total += w;
    }
    if (std::fabs(total - 1.0) > std::ldexp(1.0, -40)) throw std::invalid_argument("weights must sum to 1");
  }
  canonicalize(dim_, cells_, weights_);
}

double PointCloud::cell_width() const { return std::ldexp(1.0, -level_); }

double PointCloud::center(std::size_t i, int axis) const {
  return std::ldexp(2.0 * static_cast<double>(cells_[i * dim_ + axis]) + 1.0, -(level_ + 1));
}

std::vector<double> PointCloud::center(std::size_t i) const {
  std::vector<double> out(dim_);
  for (int a = 0; a < dim_; ++a) out[a] = center(i, a);
  return out;
}

Rational PointCloud::center_exact(std::size_t i, int axis) const {
  return Rational(2 * cells_[i * dim_ + axis] + 1, std::int64_t{1} << (level_ + 1));
}

const std::vector<double>& PointCloud::weights() const {
  if (!weights_) throw std::logic_error("cloud has no weights");
  return *weights_;
}

std::vector<double> PointCloud::measure() const {
  if (weights_) return *weights_;
  return std::vector<double>(size(), size() ? 1.0 / static_cast<double>(size()) : 0.0);
}

PointCloud PointCloud::with_uniform_weights() const {
  PointCloud out = *this;
  out.weights_ = measure();
  return out;
}

PointCloud PointCloud::without_weights() const {
  PointCloud out = *this;
  out.weights_.reset();
  return out;
}

std::optional<std::size_t> PointCloud::find(std::span<const std::int64_t> key) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto row = cell(mid);
    if (std::lexicographical_compare(row.begin(), row.end(), key.begin(), key.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size() && std::equal(key.begin(), key.end(), cell(lo).begin())) return lo;
  return std::nullopt;
}

std::vector<std::int64_t> PointCloud::cell_of(std::span<const double> point) const {
  std::vector<std::int64_t> out(point.size());
  for (std::size_t a = 0; a < point.size(); ++a) {
    out[a] = static_cast<std::int64_t>(std::floor(std::ldexp(point[a], level_)));
  }
  return out;
}

std::vector<std::int64_t> PointCloud::cell_of_exact(std::span<const Rational> point) const {
  std::vector<std::int64_t> out(point.size());
  for (std::size_t a = 0; a < point.size(); ++a) out[a] = point[a].floor_scaled_pow2(level_);
  return out;
}

PointCloud PointCloud::coarsen(int to_level) const {
  if (to_level > level_ || to_level < 0) throw std::invalid_argument("coarsen target must be in [0, level]");
  const int shift = level_ - to_level;
  std::vector<std::int64_t> out(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) out[i] = cells_[i] >> shift;
  return PointCloud(dim_, to_level, std::move(out), bound_, weights_);
}

PointCloud PointCloud::subset(const std::vector<bool>& keep) const {
  std::vector<std::int64_t> out;
  std::optional<std::vector<double>> w;
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!keep[i]) continue;
    auto row = cell(i);
    out.insert(out.end(), row.begin(), row.end());
    if (weights_) {
      if (!w) w.emplace();
      w->push_back((*weights_)[i]);
      total += (*weights_)[i];
    }
  }
  if (w) {
    if (total > 0.0) {
      for (double& x : *w) x /= total;
    } else {
      w.reset();
    }
  }
  return PointCloud(dim_, level_, std::move(out), bound_, std::move(w));
}

PointCloud PointCloud::transform_axes(std::span<const int> perm, std::span<const int> sign) const {
  if (static_cast<int>(perm.size()) != dim_ || static_cast<int>(sign.size()) != dim_) {
    throw std::invalid_argument("axis transform must match dimension");
  }
  std::vector<std::int64_t> out(cells_.size());
  for (std::size_t i = 0; i < size(); ++i) {
    for (int j = 0; j < dim_; ++j) {
      std::int64_t c = cells_[i * dim_ + perm[j]];
      out[i * dim_ + j] = sign[j] < 0 ? -c - 1 : c;
    }
  }
  return PointCloud(dim_, level_, std::move(out), bound_, weights_);
}

void CantorSpec::validate() const {
  if (branches < 2) throw std::invalid_argument("cantor: branches must be >= 2");
  if (ratio.sign() <= 0 || ratio > Rational(1, 2)) throw std::invalid_argument("cantor: ratio must lie in (0, 1/2]");
  if (ratio * Rational(branches) > Rational(1)) throw std::invalid_argument("cantor: branches * ratio > 1 (children overlap)");
  if (depth < 0) throw std::invalid_argument("cantor: depth must be >= 0");
}

double CantorSpec::dimension() const { return std::log(static_cast<double>(branches)) / -std::log(ratio.to_double()); }

int min_level(const CantorSpec& spec) {
  // smallest m with ratio^depth >= 2^-m, decided exactly in 128 bits when possible
  if (spec.depth == 0) return 0;
  const double est = spec.depth * std::log2(1.0 / spec.ratio.to_double());
  int m = std::max(0, static_cast<int>(std::floor(est)) - 1);
  i128 p = 1, q = 1;
  bool exact = true;
  for (int i = 0; i < spec.depth && exact; ++i) {
    p *= spec.ratio.num();
    q *= spec.ratio.den();
    if (q > (i128{1} << 100)) exact = false;
  }
  if (!exact) return static_cast<int>(std::ceil(est - 1e-12));
  while (m < 100 && (p << m) < q) ++m;
  return m;
}

std::vector<std::pair<Rational, Rational>> cantor_intervals(const CantorSpec& spec) {
  spec.validate();
  std::vector<std::pair<Rational, Rational>> cur{{Rational(0), Rational(1)}};
  const Rational gap_step = spec.branches > 1 ? (Rational(1) - spec.ratio) / Rational(spec.branches - 1) : Rational(0);
  for (int d = 0; d < spec.depth; ++d) {
    std::vector<std::pair<Rational, Rational>> next;
    next.reserve(cur.size() * static_cast<std::size_t>(spec.branches));
    for (const auto& [lo, hi] : cur) {
      Rational len = hi - lo;
      Rational child = len * spec.ratio;
      for (int b = 0; b < spec.branches; ++b) {
        Rational start = lo + len * gap_step * Rational(b);
        next.emplace_back(start, start + child);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

PointCloud gen_cantor_1d(const CantorSpec& spec, int level, Rational origin, Rational scale, double bound) {
  spec.validate();
  if (scale.sign() <= 0) throw std::invalid_argument("cantor: scale must be positive");
  const auto intervals = cantor_intervals(spec);
  const Rational two_pow(std::int64_t{1} << (level + 1));
  std::vector<std::int64_t> cells;
  for (const auto& [lo, hi] : intervals) {
    Rational a = origin + scale * lo;
    Rational b = origin + scale * hi;
    // (2c + 1) / 2^(m+1) in [a, b]
    std::int64_t cmin = ceil_half(a * two_pow - Rational(1));
    std::int64_t cmax = (b * two_pow - Rational(1)).floor_scaled_pow2(-1);
    if (cmax < cmin) throw std::invalid_argument("cantor: level too coarse for depth");
    for (std::int64_t c = cmin; c <= cmax; ++c) cells.push_back(c);
  }
  return PointCloud(1, level, std::move(cells), bound);
}

PointCloud gen_interval(int level, Rational lo, Rational hi, double bound) {
  if (hi < lo) throw std::invalid_argument("interval: hi < lo");
  const Rational two_pow(std::int64_t{1} << (level + 1));
  std::int64_t cmin = ceil_half(lo * two_pow - Rational(1));
  std::int64_t cmax = (hi * two_pow - Rational(1)).floor_scaled_pow2(-1);
  std::vector<std::int64_t> cells;
  for (std::int64_t c = cmin; c <= cmax; ++c) cells.push_back(c);
  return PointCloud(1, level, std::move(cells), bound);
}

PointCloud gen_point(int dim, int level, double bound) {
  return PointCloud(dim, level, std::vector<std::int64_t>(static_cast<std::size_t>(dim), 0), bound);
}

PointCloud gen_product(std::span<const PointCloud> factors) {
  if (factors.empty() || factors.size() > static_cast<std::size_t>(kMaxAmbientDim)) {
    throw std::invalid_argument("product: need 1 to 4 factors");
  }
  const int level = factors.front().level();
  bool all_weighted = true;
  double bound = 0.0;
  std::size_t total = 1;
  for (const auto& f : factors) {
    if (f.dim() != 1) throw std::invalid_argument("product: factors must be one-dimensional");
    if (f.level() != level) throw std::invalid_argument("product: mismatched levels");
    all_weighted = all_weighted && f.has_weights();
    bound = std::max(bound, f.bound());
    total *= f.size();
  }
  const int dim = static_cast<int>(factors.size());
  std::vector<std::int64_t> cells;
  cells.reserve(total * static_cast<std::size_t>(dim));
  std::optional<std::vector<double>> weights;
  if (all_weighted) weights.emplace();
  std::vector<std::size_t> idx(factors.size(), 0);
  if (total == 0) return PointCloud(dim, level, {}, bound);
  // odometer over factor indices; last factor varies fastest so output is already sorted
  while (true) {
    double w = 1.0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      cells.push_back(factors[f].cell(idx[f])[0]);
      if (all_weighted) w *= factors[f].weights()[idx[f]];
    }
    if (all_weighted) weights->push_back(w);
    std::size_t f = factors.size();
    while (f > 0) {
      --f;
      if (++idx[f] < factors[f].size()) break;
      idx[f] = 0;
      if (f == 0) return PointCloud(dim, level, std::move(cells), bound, std::move(weights));
    }
  }
}

int sharpness_depth(int level) {
  // deepest d with 3^-d >= 2^-level
  int d = 0;
  i128 p3 = 1;
  while (p3 * 3 <= (i128{1} << level)) {
    p3 *= 3;
    ++d;
  }
  return d;
}

PointCloud gen_sharpness_line(int level) {
  if (level < 8) throw std::invalid_argument("sharpness line needs level >= 8");
  CantorSpec spec{Rational(1, 3), 2, sharpness_depth(level)};
  PointCloud c = gen_cantor_1d(spec, level);
  PointCloud zero = gen_point(1, level);
  std::vector<PointCloud> f{c, zero};
  return gen_product(f);
}

CantorSpec cantor_spec_for_dimension(double target, int level) {
  if (!(target > 0.0) || target > 1.0) throw std::invalid_argument("cantor dimension must lie in (0, 1]");
  CantorSpec best;
  double best_err = 1e9;
  for (int q = 2; q <= 16; ++q) {
    for (int p = 1; 2 * p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      Rational r(p, q);
      for (int b = 2; b <= 8; ++b) {
        if (Rational(b) * r > Rational(1)) break;
        CantorSpec s{r, b, 0};
        double err = std::fabs(s.dimension() - target);
        if (err < best_err - 1e-12) {
          best_err = err;
          best = s;
        }
      }
    }
  }
  // deepest depth still resolved at this level
  while (true) {
    CantorSpec next = best;
    next.depth = best.depth + 1;
    if (min_level(next) > level || next.depth > 24) break;
    best = next;
  }
  return best;
}

SlabConstruction gen_slab_construction(int n, int k, double s, int level) {
  if (n < 2 || n > kMaxAmbientDim) throw std::invalid_argument("slab: n must be in [2, 4]");
  if (k < 1 || k > 8) throw std::invalid_argument("slab: k must be in [1, 8]");
  if (s < 0.0) throw std::invalid_argument("slab: s must be >= 0");
  if (s > n - 1 + 1e-12) throw std::invalid_argument("slab: s > n-1 (construction only yields dimension <= n-1)");
  if ((std::int64_t{1} << level) < k) throw std::invalid_argument("slab: level too coarse for k slices");
  SlabConstruction out;
  std::vector<PointCloud> transverse;
  for (int a = 1; a < n; ++a) {
    if (s == 0.0) {
      transverse.push_back(gen_point(1, level));
      continue;
    }
    CantorSpec spec = cantor_spec_for_dimension(s / (n - 1), level);
    // keep each slice at most ~2^20 cells
    while (spec.depth > 0 && std::pow(static_cast<double>(spec.branches), spec.depth * (n - 1)) > 1048576.0) --spec.depth;
    out.factor_specs.push_back(spec);
    transverse.push_back(gen_cantor_1d(spec, level));
  }
  std::vector<std::int64_t> cells;
  for (int i = 1; i <= k; ++i) {
    std::int64_t c = ((std::int64_t{i} << level) / k) - 1;
    out.offsets.push_back(Rational(2 * c + 1, std::int64_t{1} << (level + 1)));
    std::vector<PointCloud> factors{PointCloud(1, level, {c})};
    factors.insert(factors.end(), transverse.begin(), transverse.end());
    PointCloud slice = gen_product(factors);
    cells.insert(cells.end(), slice.flat_cells().begin(), slice.flat_cells().end());
  }
  out.cloud = PointCloud(n, level, std::move(cells));
  return out;
}

PointCloud gen_random(int dim, int level, std::size_t count, std::uint64_t seed, double bound) {
  if (dim < 1 || dim > kMaxAmbientDim) throw std::invalid_argument("random: dim must be in [1, 4]");
  if (level < 0 || level > 30) throw std::invalid_argument("random: level must be in [0, 30]");
  if (count == 0) throw std::invalid_argument("random: count must be positive");
  CounterRng rng(seed);
  const auto side = std::uint64_t{1} << level;
  std::vector<std::int64_t> cells(count * static_cast<std::size_t>(dim));
  for (auto& c : cells) c = static_cast<std::int64_t>(rng.below(side));
  return PointCloud(dim, level, std::move(cells), bound);
}

}  // namespace pindot
